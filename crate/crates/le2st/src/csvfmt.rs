//! CSV rendering. Floats print with nine significant digits in the
//! style of printf `%.9g`; assembled files are plain strings so callers
//! can compare bytes directly.

use le2st_core::query::QueryScheme;

use crate::pipeline::ExperimentConfig;
use crate::runner::{DimensionPoint, DivergencePoint, ErrorRateSummary, TrialRecord};
use crate::synth::SyntheticSpec;

/// Nine significant digits: fixed notation while the exponent fits,
/// scientific otherwise, trailing zeros trimmed.
pub fn fmt_sig9(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let formatted = format!("{:.8e}", x.abs());
    let (mantissa, exponent) = formatted
        .split_once('e')
        .expect("exponential format always carries an e");
    let exponent: i32 = exponent.parse().expect("exponent is an integer");
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    debug_assert_eq!(digits.len(), 9);

    let body = if (-4..9).contains(&exponent) {
        if exponent >= 0 {
            let split = exponent as usize + 1;
            let int_part = &digits[..split];
            let frac = digits[split..].trim_end_matches('0');
            if frac.is_empty() {
                int_part.to_string()
            } else {
                format!("{int_part}.{frac}")
            }
        } else {
            let zeros = "0".repeat((-exponent - 1) as usize);
            let frac = format!("{zeros}{digits}");
            format!("0.{}", frac.trim_end_matches('0'))
        }
    } else {
        let frac = digits[1..].trim_end_matches('0');
        if frac.is_empty() {
            format!("{}e{exponent}", &digits[..1])
        } else {
            format!("{}.{frac}e{exponent}", &digits[..1])
        }
    };
    if x < 0.0 {
        format!("-{body}")
    } else {
        body
    }
}

pub const TRIALS_HEADER: &str =
    "trial,seed,scheme,budget_fraction,N,d,Q,Q_max,R,m_q,n_q,C_N,W,p,reject,degenerate_flag,oracle_calls";

pub const SUMMARY_HEADER: &str = "scheme,budget_fraction,rejection_rate,ci_low,ci_high,trials";

pub const DIVERGENCE_HEADER: &str =
    "scheme,budget_fraction,mean_divergence,std_divergence,trials";

pub const DIMENSION_HEADER: &str =
    "scheme,d,budget_fraction,rejection_rate,type2_error,ci_low,ci_high,trials";

fn flag(b: bool) -> &'static str {
    if b {
        "1"
    } else {
        "0"
    }
}

pub fn trials_row(
    record: &TrialRecord,
    scheme: QueryScheme,
    spec: &SyntheticSpec,
    cfg: &ExperimentConfig,
) -> String {
    let o = &record.outcome;
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
        record.trial,
        record.seed,
        scheme,
        fmt_sig9(cfg.q_max as f64 / spec.n_total as f64),
        spec.n_total,
        spec.d,
        cfg.q,
        cfg.q_max,
        o.r,
        o.m_q,
        o.n_q,
        o.c_n,
        fmt_sig9(o.w),
        fmt_sig9(o.p),
        flag(o.reject),
        flag(o.degenerate),
        o.oracle_calls,
    )
}

pub fn summary_row(scheme: QueryScheme, budget_fraction: f64, summary: &ErrorRateSummary) -> String {
    format!(
        "{},{},{},{},{},{}",
        scheme,
        fmt_sig9(budget_fraction),
        fmt_sig9(summary.rejection_rate),
        fmt_sig9(summary.ci_low),
        fmt_sig9(summary.ci_high),
        summary.trials,
    )
}

pub fn divergence_row(scheme: QueryScheme, point: &DivergencePoint) -> String {
    format!(
        "{},{},{},{},{}",
        scheme,
        fmt_sig9(point.budget),
        fmt_sig9(point.mean),
        fmt_sig9(point.std_dev),
        point.trials_used,
    )
}

pub fn dimension_row(point: &DimensionPoint, budget: f64) -> String {
    format!(
        "{},{},{},{},{},{},{},{}",
        point.scheme,
        point.d,
        fmt_sig9(budget),
        fmt_sig9(point.rejection_rate),
        fmt_sig9(point.type2_error),
        fmt_sig9(point.ci_low),
        fmt_sig9(point.ci_high),
        point.trials,
    )
}

/// Joins a header and rows into file contents with a trailing newline.
pub fn render_csv(header: &str, rows: &[String]) -> String {
    let mut out = String::with_capacity(header.len() + 1 + rows.iter().map(|r| r.len() + 1).sum::<usize>());
    out.push_str(header);
    out.push('\n');
    for row in rows {
        out.push_str(row);
        out.push('\n');
    }
    out
}
