//! Monte Carlo estimation over independent trials. Each trial's seeds
//! derive from (master_seed, trial index) alone, trials run in parallel
//! through rayon, and aggregation walks the records in trial order, so
//! summaries do not depend on scheduling.

use le2st_core::fr::{f_divergence_estimate, FrInputs};
use le2st_core::query::QueryScheme;
use le2st_core::Error as CoreError;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::pipeline::{run_three_stage, stage_one, ExperimentConfig, TestOutcome};
use crate::seeding::mix_seed;
use crate::synth::{generate_synthetic, SyntheticKind, SyntheticSpec};

const STREAM_DATA: u64 = 0x44;
const STREAM_RUN: u64 = 0x52;

/// Seed of trial `trial` under `master_seed`; pure and stable.
pub fn derive_trial_seed(master_seed: u64, trial: usize) -> u64 {
    mix_seed(master_seed, 1 + trial as u64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    pub outcome: TestOutcome,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorRateSummary {
    pub rejection_rate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub trials: usize,
    pub records: Vec<TrialRecord>,
}

/// Wilson 95% score interval for a binomial proportion.
pub fn wilson_interval(successes: usize, trials: usize) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959_963_984_540_054_f64;
    let n = trials as f64;
    let p_hat = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p_hat + z2 / (2.0 * n)) / denom;
    let half = z * libm::sqrt(p_hat * (1.0 - p_hat) / n + z2 / (4.0 * n * n)) / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

fn run_trial(spec: &SyntheticSpec, cfg: &ExperimentConfig, trial: usize) -> Result<TrialRecord> {
    let trial_seed = derive_trial_seed(cfg.master_seed, trial);
    let data_spec = SyntheticSpec {
        seed: mix_seed(trial_seed, STREAM_DATA),
        ..spec.clone()
    };
    let (ps, mut oracle) = generate_synthetic(&data_spec)?;
    let outcome = run_three_stage(&ps, &mut oracle, cfg, mix_seed(trial_seed, STREAM_RUN))?;
    Ok(TrialRecord {
        trial,
        seed: trial_seed,
        outcome,
    })
}

/// Runs `cfg.trials` independent draws of the dataset and pipeline and
/// reports the rejection rate with its Wilson interval.
pub fn estimate_error_rates(
    spec: &SyntheticSpec,
    cfg: &ExperimentConfig,
) -> Result<ErrorRateSummary> {
    spec.validate()?;
    cfg.validate(spec.n_total)?;
    let records: Vec<TrialRecord> = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| run_trial(spec, cfg, trial))
        .collect::<Result<Vec<_>>>()?;
    let rejections = records.iter().filter(|r| r.outcome.reject).count();
    let (ci_low, ci_high) = wilson_interval(rejections, cfg.trials);
    Ok(ErrorRateSummary {
        rejection_rate: rejections as f64 / cfg.trials as f64,
        ci_low,
        ci_high,
        trials: cfg.trials,
        records,
    })
}

/// Divergence of one finished run, estimated from its own tree counts
/// with the plug-in degree constant. None when the run was degenerate or
/// the radicand is not positive.
pub fn trial_divergence(outcome: &TestOutcome) -> Option<f64> {
    if outcome.degenerate {
        return None;
    }
    let fr = FrInputs::new(outcome.r, outcome.m_q, outcome.n_q, outcome.c_n).ok()?;
    let a_d = outcome.c_n as f64 / (outcome.m_q + outcome.n_q) as f64;
    f_divergence_estimate(&fr, a_d).ok()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivergencePoint {
    pub budget: f64,
    pub q_max: usize,
    pub mean: f64,
    pub std_dev: f64,
    pub trials_used: usize,
}

/// Budget fraction to a concrete label count, never below the seed count
/// and never above the pool.
pub fn budget_to_q_max(budget: f64, n_total: usize, q: usize) -> usize {
    let raw = (budget * n_total as f64).round() as usize;
    raw.clamp(q, n_total)
}

/// Mean per-trial divergence of the queried set at each budget fraction.
pub fn divergence_curve(
    spec: &SyntheticSpec,
    cfg: &ExperimentConfig,
    budgets: &[f64],
) -> Result<Vec<DivergencePoint>> {
    if budgets.is_empty() {
        return Err(Error::Config("at least one budget fraction is required".into()));
    }
    let mut points = Vec::with_capacity(budgets.len());
    for &budget in budgets {
        if !(budget > 0.0 && budget <= 1.0) {
            return Err(Error::Config(format!(
                "budget fractions must lie in (0, 1], got {budget}"
            )));
        }
        let run_cfg = ExperimentConfig {
            q_max: budget_to_q_max(budget, spec.n_total, cfg.q),
            ..cfg.clone()
        };
        let summary = estimate_error_rates(spec, &run_cfg)?;
        let values: Vec<f64> = summary
            .records
            .iter()
            .filter_map(|r| trial_divergence(&r.outcome))
            .collect();
        let (mean, std_dev) = if values.is_empty() {
            (f64::NAN, f64::NAN)
        } else {
            let mean = values.iter().sum::<f64>() / values.len() as f64;
            let var = if values.len() > 1 {
                values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
                    / (values.len() - 1) as f64
            } else {
                0.0
            };
            (mean, libm::sqrt(var))
        };
        points.push(DivergencePoint {
            budget,
            q_max: run_cfg.q_max,
            mean,
            std_dev,
            trials_used: values.len(),
        });
    }
    Ok(points)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimensionPoint {
    pub d: usize,
    pub scheme: QueryScheme,
    pub rejection_rate: f64,
    pub type2_error: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub trials: usize,
}

/// Location-alternative Type II error per scheme as the dimension grows,
/// at a fixed budget fraction.
pub fn dimension_sweep(
    spec: &SyntheticSpec,
    cfg: &ExperimentConfig,
    dims: &[usize],
    budget: f64,
    schemes: &[QueryScheme],
) -> Result<Vec<DimensionPoint>> {
    if dims.is_empty() {
        return Err(Error::Config("at least one dimension is required".into()));
    }
    if !(budget > 0.0 && budget <= 1.0) {
        return Err(Error::Config(format!(
            "budget fractions must lie in (0, 1], got {budget}"
        )));
    }
    let mut points = Vec::with_capacity(dims.len() * schemes.len());
    for &d in dims {
        let dim_spec = SyntheticSpec {
            d,
            kind: SyntheticKind::LocationAlt,
            ..spec.clone()
        };
        for &scheme in schemes {
            let run_cfg = ExperimentConfig {
                scheme,
                q_max: budget_to_q_max(budget, spec.n_total, cfg.q),
                ..cfg.clone()
            };
            let summary = estimate_error_rates(&dim_spec, &run_cfg)?;
            points.push(DimensionPoint {
                d,
                scheme,
                rejection_rate: summary.rejection_rate,
                type2_error: 1.0 - summary.rejection_rate,
                ci_low: summary.ci_low,
                ci_high: summary.ci_high,
                trials: summary.trials,
            });
        }
    }
    Ok(points)
}

#[derive(Debug, Clone, PartialEq)]
pub struct NullErrorSummary {
    pub mean_error: f64,
    pub per_trial: Vec<f64>,
}

/// Trains on the seed set only and scores hold-out accuracy against the
/// hidden labels under the null. A healthy pipeline hovers near one half
/// because features carry no label signal.
pub fn classifier_null_error(
    spec: &SyntheticSpec,
    cfg: &ExperimentConfig,
) -> Result<NullErrorSummary> {
    if spec.kind != SyntheticKind::Null {
        return Err(Error::Config(
            "the null classifier diagnostic requires kind = null".into(),
        ));
    }
    spec.validate()?;
    cfg.validate(spec.n_total)?;
    let per_trial: Vec<f64> = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| -> Result<f64> {
            let trial_seed = derive_trial_seed(cfg.master_seed, trial);
            let data_spec = SyntheticSpec {
                seed: mix_seed(trial_seed, STREAM_DATA),
                ..spec.clone()
            };
            let (ps, mut oracle) = generate_synthetic(&data_spec)?;
            let run_seed = mix_seed(trial_seed, STREAM_RUN);
            let mut rng =
                ChaCha8Rng::seed_from_u64(mix_seed(run_seed, crate::pipeline::STREAM_SELECT));
            let train = le2st_core::posterior::TrainConfig {
                seed: mix_seed(run_seed, crate::pipeline::STREAM_TRAIN),
                ..cfg.train.clone()
            };
            let (state, model, _) = stage_one(&ps, &mut oracle, cfg.q, &train, &mut rng)?;
            let holdout = state.pool();
            if holdout.is_empty() {
                return Err(Error::Config("no hold-out points left".into()));
            }
            let mut wrong = 0usize;
            for &id in holdout {
                let row = ps
                    .point_by_id(id)
                    .ok_or_else(|| CoreError::InvalidInput(format!("unknown point id {id}")))?;
                let predicted = model.posterior(row)? > 0.5;
                let truth = oracle
                    .peek(id)
                    .ok_or_else(|| CoreError::InvalidInput(format!("oracle knows no point {id}")))?;
                if predicted != truth {
                    wrong += 1;
                }
            }
            Ok(wrong as f64 / holdout.len() as f64)
        })
        .collect::<Result<Vec<_>>>()?;
    let mean_error = per_trial.iter().sum::<f64>() / per_trial.len() as f64;
    Ok(NullErrorSummary {
        mean_error,
        per_trial,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_interval_examples() {
        // 10 rejections out of 200
        let (low, high) = wilson_interval(10, 200);
        assert!((low - 0.0274).abs() < 1e-3, "low {low}");
        assert!((high - 0.0896).abs() < 1e-3, "high {high}");
        // all rejections pin the upper end at one
        let (_, high) = wilson_interval(50, 50);
        assert!((high - 1.0).abs() < 1e-12);
        let (low, _) = wilson_interval(0, 50);
        assert!((0.0..1e-12).contains(&low));
    }

    #[test]
    fn trial_seeds_are_a_pure_function() {
        assert_eq!(derive_trial_seed(5, 9), derive_trial_seed(5, 9));
        assert_ne!(derive_trial_seed(5, 9), derive_trial_seed(5, 10));
        assert_ne!(derive_trial_seed(5, 9), derive_trial_seed(6, 9));
    }

    #[test]
    fn parallel_and_sequential_summaries_agree() {
        let spec = SyntheticSpec::new(SyntheticKind::LocationAlt, 60, 2, 0);
        let cfg = ExperimentConfig {
            q: 8,
            q_max: 20,
            trials: 12,
            master_seed: 99,
            ..ExperimentConfig::default()
        };
        let wide = estimate_error_rates(&spec, &cfg).unwrap();
        let narrow = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| estimate_error_rates(&spec, &cfg).unwrap());
        assert_eq!(wide.records.len(), narrow.records.len());
        for (a, b) in wide.records.iter().zip(&narrow.records) {
            assert_eq!(a, b);
        }
        assert_eq!(wide.rejection_rate, narrow.rejection_rate);
    }

    #[test]
    fn budget_mapping_clamps() {
        assert_eq!(budget_to_q_max(0.2, 500, 30), 100);
        assert_eq!(budget_to_q_max(0.01, 500, 30), 30);
        assert_eq!(budget_to_q_max(1.0, 500, 30), 500);
    }

    #[test]
    fn divergence_curve_rejects_bad_budgets() {
        let spec = SyntheticSpec::new(SyntheticKind::Null, 40, 2, 0);
        let cfg = ExperimentConfig {
            q: 8,
            q_max: 20,
            trials: 2,
            ..ExperimentConfig::default()
        };
        assert!(divergence_curve(&spec, &cfg, &[]).is_err());
        assert!(divergence_curve(&spec, &cfg, &[1.4]).is_err());
    }

    #[test]
    fn untrained_model_errs_at_the_class_imbalance() {
        // zero iterations leave the constant 0.5 posterior; everything is
        // predicted class 0, so the hold-out error is the class-1 fraction
        let spec = SyntheticSpec {
            class_balance: 0.3,
            ..SyntheticSpec::new(SyntheticKind::Null, 400, 2, 0)
        };
        let cfg = ExperimentConfig {
            q: 20,
            q_max: 40,
            trials: 10,
            master_seed: 3,
            train: le2st_core::posterior::TrainConfig {
                iterations: 0,
                ..Default::default()
            },
            ..ExperimentConfig::default()
        };
        let summary = classifier_null_error(&spec, &cfg).unwrap();
        assert!(
            (summary.mean_error - 0.7).abs() < 0.05,
            "constant model should err at the class-1 fraction, got {}",
            summary.mean_error
        );
    }

    #[test]
    fn null_diagnostic_requires_null_data() {
        let spec = SyntheticSpec::new(SyntheticKind::LocationAlt, 40, 2, 0);
        let cfg = ExperimentConfig {
            q: 8,
            q_max: 20,
            trials: 2,
            ..ExperimentConfig::default()
        };
        assert!(classifier_null_error(&spec, &cfg).is_err());
    }
}
