use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use le2st::config::PartialConfig;
use le2st::csvfmt::{
    dimension_row, divergence_row, fmt_sig9, render_csv, summary_row, trials_row,
    DIMENSION_HEADER, DIVERGENCE_HEADER, SUMMARY_HEADER, TRIALS_HEADER,
};
use le2st::error::{Error, Result};
use le2st::pipeline::ExperimentConfig;
use le2st::runner::{budget_to_q_max, dimension_sweep, estimate_error_rates, trial_divergence};
use le2st::synth::{gaussian_location_risk, generate_synthetic};
use le2st_core::query::{lp_brute_force, lp_closed_form, LpInstance, QueryScheme};
use le2st_core::theory::{expected_fr_variant_bimodal, expected_fr_variant_passive_lower_bound, expected_mn, TheoryParams};
use le2st_core::Error as CoreError;

/// Label-efficient two-sample testing experiments.
#[derive(Parser, Debug)]
#[command(name = "le2st", version, about)]
struct Cli {
    /// Worker threads for trials (0 = all cores); LE2ST_THREADS is the fallback
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one scheme at a fixed budget; writes trials and summary CSV
    Run(RunArgs),
    /// Sweep budget fractions (all schemes) or dimensions at one budget
    Sweep(SweepArgs),
    /// Print the closed-form expectation table over a query-count range
    Theory(TheoryArgs),
    /// Check the weighting closed form against vertex enumeration
    Lpcheck(LpcheckArgs),
    /// Write a synthetic dataset as CSV
    Synth(SynthArgs),
}

/// Run-configuration keys; flags override the config file.
#[derive(Args, Debug, Clone)]
struct ConfigFlags {
    /// TOML config file with the same keys as these flags
    #[arg(long)]
    config: Option<PathBuf>,
    /// Data family: null, location_alt, or scale_alt
    #[arg(long)]
    kind: Option<String>,
    #[arg(long = "n_total")]
    n_total: Option<usize>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    delta1: Option<f64>,
    #[arg(long)]
    delta2: Option<f64>,
    #[arg(long)]
    sigma: Option<f64>,
    /// Uniformly labeled seed count
    #[arg(long = "Q")]
    q: Option<usize>,
    /// Total label budget, seed included
    #[arg(long = "Q_max")]
    q_max: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    /// bimodal, passive, uncertainty, or certainty
    #[arg(long)]
    scheme: Option<String>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long = "master_seed")]
    master_seed: Option<u64>,
    #[arg(long = "learning_rate")]
    learning_rate: Option<f64>,
    #[arg(long)]
    iterations: Option<u32>,
    #[arg(long = "l2_penalty")]
    l2_penalty: Option<f64>,
    #[arg(long = "cv_folds")]
    cv_folds: Option<usize>,
}

impl ConfigFlags {
    fn merged(&self) -> Result<PartialConfig> {
        let base = match &self.config {
            Some(path) => PartialConfig::from_toml_file(path)?,
            None => PartialConfig::default(),
        };
        let overrides = PartialConfig {
            kind: self.kind.clone(),
            n_total: self.n_total,
            d: self.d,
            delta1: self.delta1,
            delta2: self.delta2,
            sigma: self.sigma,
            q: self.q,
            q_max: self.q_max,
            alpha: self.alpha,
            scheme: self.scheme.clone(),
            trials: self.trials,
            master_seed: self.master_seed,
            learning_rate: self.learning_rate,
            iterations: self.iterations,
            l2_penalty: self.l2_penalty,
            cv_folds: self.cv_folds,
        };
        Ok(base.overlay(overrides))
    }
}

#[derive(Args, Debug)]
struct RunArgs {
    #[command(flatten)]
    config: ConfigFlags,
    #[arg(long = "trials_out", default_value = "trials.csv")]
    trials_out: PathBuf,
    #[arg(long = "summary_out", default_value = "summary.csv")]
    summary_out: PathBuf,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    config: ConfigFlags,
    /// Budget fractions in (0, 1], comma separated; runs all four schemes
    #[arg(long, value_delimiter = ',')]
    budgets: Option<Vec<f64>>,
    /// Dimensions to sweep at --budget; location alternative data
    #[arg(long, value_delimiter = ',')]
    dims: Option<Vec<usize>>,
    /// Budget fraction for --dims
    #[arg(long)]
    budget: Option<f64>,
    #[arg(long = "summary_out", default_value = "sweep_summary.csv")]
    summary_out: PathBuf,
    /// Also write every per-trial record
    #[arg(long = "trials_out")]
    trials_out: Option<PathBuf>,
    /// Also write per-budget divergence estimates
    #[arg(long = "divergence_out")]
    divergence_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct TheoryArgs {
    #[arg(long = "nq_min", default_value_t = 2)]
    nq_min: u32,
    #[arg(long = "nq_max", default_value_t = 100)]
    nq_max: u32,
    #[arg(long = "nq_step", default_value_t = 1)]
    nq_step: u32,
    /// Class-0 prior in [0, 1]
    #[arg(long, default_value_t = 0.5)]
    u: f64,
    /// Overlap risk in [0, 0.5]; defaults to quadrature from --delta1
    #[arg(long)]
    risk: Option<f64>,
    /// Location separation used to derive the risk when --risk is absent
    #[arg(long)]
    delta1: Option<f64>,
    #[arg(long, default_value_t = 2)]
    d: u32,
    /// Write the table here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct LpcheckArgs {
    /// Posterior count per instance (2 to 12)
    #[arg(long, default_value_t = 8)]
    h: usize,
    /// Target priors to test, comma separated
    #[arg(long = "u", value_delimiter = ',', default_values_t = [0.2, 0.4, 0.6])]
    u_list: Vec<f64>,
    #[arg(long, default_value_t = 1000)]
    instances: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct SynthArgs {
    #[command(flatten)]
    config: ConfigFlags,
    #[arg(long)]
    out: PathBuf,
    /// Append the hidden label column (debugging only)
    #[arg(long = "reveal_labels")]
    reveal_labels: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = match resolve_threads(cli.threads) {
        Ok(t) => t,
        Err(e) => return report(e),
    };
    let outcome = with_threads(threads, || match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Theory(args) => cmd_theory(args),
        Command::Lpcheck(args) => cmd_lpcheck(args),
        Command::Synth(args) => cmd_synth(args),
    });
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => report(e),
    }
}

fn report(e: Error) -> ExitCode {
    eprintln!("error: {e}");
    match e {
        Error::Config(_) => ExitCode::from(2),
        _ => ExitCode::from(1),
    }
}

fn resolve_threads(flag: Option<usize>) -> Result<usize> {
    if let Some(t) = flag {
        return Ok(t);
    }
    match std::env::var("LE2ST_THREADS") {
        Ok(text) => text
            .trim()
            .parse::<usize>()
            .map_err(|_| Error::Config(format!("LE2ST_THREADS must be an integer, got `{text}`"))),
        Err(_) => Ok(0),
    }
}

fn with_threads<T: Send>(threads: usize, work: impl FnOnce() -> T + Send) -> T {
    if threads == 0 {
        work()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("thread pool construction")
            .install(work)
    }
}

fn write_file(path: &PathBuf, contents: &str) -> Result<()> {
    std::fs::write(path, contents)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_run(args: RunArgs) -> Result<()> {
    let resolved = args.config.merged()?.resolve(true)?;
    let spec = resolved.spec;
    let cfg = resolved.experiment;
    let summary = estimate_error_rates(&spec, &cfg)?;
    let budget_fraction = cfg.q_max as f64 / spec.n_total as f64;

    let trial_rows: Vec<String> = summary
        .records
        .iter()
        .map(|record| trials_row(record, cfg.scheme, &spec, &cfg))
        .collect();
    write_file(&args.trials_out, &render_csv(TRIALS_HEADER, &trial_rows))?;

    let summary_rows = vec![summary_row(cfg.scheme, budget_fraction, &summary)];
    write_file(&args.summary_out, &render_csv(SUMMARY_HEADER, &summary_rows))?;
    println!(
        "{}: rejection rate {} (95% CI [{}, {}]) over {} trials",
        cfg.scheme,
        fmt_sig9(summary.rejection_rate),
        fmt_sig9(summary.ci_low),
        fmt_sig9(summary.ci_high),
        summary.trials
    );
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> Result<()> {
    match (&args.budgets, &args.dims) {
        (Some(_), Some(_)) => Err(Error::Config(
            "choose either --budgets or --dims, not both".into(),
        )),
        (None, None) => Err(Error::Config(
            "sweep needs --budgets or --dims".into(),
        )),
        (Some(budgets), None) => sweep_budgets(&args, budgets),
        (None, Some(dims)) => sweep_dims(&args, dims),
    }
}

fn sweep_budgets(args: &SweepArgs, budgets: &[f64]) -> Result<()> {
    if budgets.is_empty() {
        return Err(Error::Config("budget list must not be empty".into()));
    }
    for &b in budgets {
        if !(b > 0.0 && b <= 1.0) {
            return Err(Error::Config(format!(
                "budget fractions must lie in (0, 1], got {b}"
            )));
        }
    }
    let resolved = args.config.merged()?.resolve(false)?;
    let spec = resolved.spec;
    let base = resolved.experiment;

    let mut summary_rows = Vec::new();
    let mut trial_rows = Vec::new();
    let mut divergence_rows = Vec::new();
    for scheme in QueryScheme::ALL {
        for &budget in budgets {
            let cfg = ExperimentConfig {
                scheme,
                q_max: budget_to_q_max(budget, spec.n_total, base.q),
                ..base.clone()
            };
            let summary = estimate_error_rates(&spec, &cfg)?;
            summary_rows.push(summary_row(scheme, budget, &summary));
            if args.trials_out.is_some() {
                trial_rows.extend(
                    summary
                        .records
                        .iter()
                        .map(|record| trials_row(record, scheme, &spec, &cfg)),
                );
            }
            if args.divergence_out.is_some() {
                let values: Vec<f64> = summary
                    .records
                    .iter()
                    .filter_map(|r| trial_divergence(&r.outcome))
                    .collect();
                let point = summarize_divergence(budget, cfg.q_max, &values);
                divergence_rows.push(divergence_row(scheme, &point));
            }
        }
    }
    write_file(&args.summary_out, &render_csv(SUMMARY_HEADER, &summary_rows))?;
    if let Some(path) = &args.trials_out {
        write_file(path, &render_csv(TRIALS_HEADER, &trial_rows))?;
    }
    if let Some(path) = &args.divergence_out {
        write_file(path, &render_csv(DIVERGENCE_HEADER, &divergence_rows))?;
    }
    Ok(())
}

fn summarize_divergence(budget: f64, q_max: usize, values: &[f64]) -> le2st::runner::DivergencePoint {
    let (mean, std_dev) = if values.is_empty() {
        (f64::NAN, f64::NAN)
    } else {
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        let var = if values.len() > 1 {
            values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (values.len() - 1) as f64
        } else {
            0.0
        };
        (mean, var.sqrt())
    };
    le2st::runner::DivergencePoint {
        budget,
        q_max,
        mean,
        std_dev,
        trials_used: values.len(),
    }
}

fn sweep_dims(args: &SweepArgs, dims: &[usize]) -> Result<()> {
    if dims.is_empty() {
        return Err(Error::Config("dimension list must not be empty".into()));
    }
    let budget = args
        .budget
        .ok_or_else(|| Error::Config("--dims requires --budget".into()))?;
    let resolved = args.config.merged()?.resolve(false)?;
    let points = dimension_sweep(
        &resolved.spec,
        &resolved.experiment,
        dims,
        budget,
        &QueryScheme::ALL,
    )?;
    let rows: Vec<String> = points.iter().map(|p| dimension_row(p, budget)).collect();
    write_file(&args.summary_out, &render_csv(DIMENSION_HEADER, &rows))?;
    Ok(())
}

fn cmd_theory(args: TheoryArgs) -> Result<()> {
    if args.nq_min < 2 {
        return Err(Error::Config("--nq_min must be at least 2".into()));
    }
    if args.nq_max < args.nq_min {
        return Err(Error::Config("--nq_max must be at least --nq_min".into()));
    }
    if args.nq_step == 0 {
        return Err(Error::Config("--nq_step must be positive".into()));
    }
    if !(0.0..=1.0).contains(&args.u) {
        return Err(Error::Config("--u must lie in [0, 1]".into()));
    }
    let risk = match (args.risk, args.delta1) {
        (Some(risk), _) => {
            if !(0.0..=0.5).contains(&risk) {
                return Err(Error::Config("--risk must lie in [0, 0.5]".into()));
            }
            risk
        }
        (None, Some(delta1)) => gaussian_location_risk(delta1, args.u.clamp(0.01, 0.99)),
        (None, None) => {
            return Err(Error::Config(
                "provide --risk, or --delta1 to derive it by quadrature".into(),
            ))
        }
    };

    // the bound does not involve the prior, so any interior value works
    let prior_for_bound = if args.u > 0.0 && args.u < 1.0 { args.u } else { 0.5 };
    let mut rows = Vec::new();
    let mut n_q = args.nq_min;
    while n_q <= args.nq_max {
        let e_qb = expected_fr_variant_bimodal(n_q);
        let ratio = e_qb / (n_q as f64 - 1.0);
        let tp = TheoryParams::new(n_q, prior_for_bound, 1.0, args.d, risk)
            .map_err(|e| Error::Config(e.to_string()))?;
        let e_qp_lb = expected_fr_variant_passive_lower_bound(&tp);
        let e_mn = expected_mn(n_q, args.u);
        rows.push(format!(
            "{n_q},{},{},{},{}",
            fmt_sig9(e_qb),
            fmt_sig9(ratio),
            fmt_sig9(e_qp_lb),
            fmt_sig9(e_mn)
        ));
        n_q = match n_q.checked_add(args.nq_step) {
            Some(next) => next,
            None => break,
        };
    }
    let table = render_csv("N_q,E_qb,ratio,E_qp_lb,E_mn", &rows);
    match &args.out {
        Some(path) => write_file(path, &table)?,
        None => print!("{table}"),
    }
    Ok(())
}

fn cmd_lpcheck(args: LpcheckArgs) -> Result<()> {
    if !(2..=12).contains(&args.h) {
        return Err(Error::Config("--h must lie in [2, 12]".into()));
    }
    if args.instances == 0 {
        return Err(Error::Config("--instances must be positive".into()));
    }
    for &u in &args.u_list {
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::Config(format!(
                "target priors must lie in (0, 1), got {u}"
            )));
        }
    }

    const TOLERANCE: f64 = 1e-9;
    let mut total_failures = 0usize;
    for &u in &args.u_list {
        let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
        let mut passed = 0usize;
        let mut failed = 0usize;
        let mut skipped = 0usize;
        for _ in 0..args.instances {
            let h = rng.gen_range(2..=args.h);
            let p0: Vec<f64> = (0..h).map(|_| rng.gen::<f64>()).collect();
            let inst = LpInstance::new(p0, u).expect("uniform draws are valid posteriors");
            let closed = match lp_closed_form(&inst) {
                Ok(solution) => solution,
                Err(CoreError::Infeasible) | Err(CoreError::DegenerateInstance) => {
                    skipped += 1;
                    continue;
                }
                Err(e) => return Err(e.into()),
            };
            let brute = lp_brute_force(&inst)?;
            let p = inst.posteriors();
            let constraint = closed.w0 * p[closed.q0] + closed.w1 * p[closed.q1];
            let ok = (closed.objective - brute.objective).abs() <= TOLERANCE
                && (constraint - u).abs() <= TOLERANCE
                && closed.w0 >= -TOLERANCE
                && closed.w1 >= -TOLERANCE
                && (closed.w0 + closed.w1 - 1.0).abs() <= TOLERANCE;
            if ok {
                passed += 1;
            } else {
                failed += 1;
            }
        }
        total_failures += failed;
        println!("u={u}: pass={passed} fail={failed} skipped={skipped} (infeasible)");
    }
    if total_failures > 0 {
        return Err(Error::Failure(format!(
            "{total_failures} instances disagreed beyond {TOLERANCE:e}"
        )));
    }
    println!("closed form matches vertex enumeration at {TOLERANCE:e}");
    Ok(())
}

fn cmd_synth(args: SynthArgs) -> Result<()> {
    let spec = args.config.merged()?.resolve_spec()?;
    let (ps, oracle) = generate_synthetic(&spec)?;

    let mut header = String::from("id");
    for axis in 0..spec.d {
        header.push_str(&format!(",x{axis}"));
    }
    if args.reveal_labels {
        header.push_str(",label");
    }
    let mut rows = Vec::with_capacity(ps.len());
    for pos in 0..ps.len() {
        let id = ps.id_at(pos);
        let mut row = id.to_string();
        for &value in ps.point(pos) {
            row.push(',');
            row.push_str(&fmt_sig9(value));
        }
        if args.reveal_labels {
            let label = oracle.peek(id).expect("generator labels every id");
            row.push(',');
            row.push(if label { '1' } else { '0' });
        }
        rows.push(row);
    }
    write_file(&args.out, &render_csv(&header, &rows))
}
