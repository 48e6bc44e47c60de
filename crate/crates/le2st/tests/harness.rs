//! Sanity oracles for the Monte Carlo harness on configurations whose
//! outcomes are known analytically.

use le2st::pipeline::ExperimentConfig;
use le2st::runner::{divergence_curve, estimate_error_rates};
use le2st::synth::{SyntheticKind, SyntheticSpec};
use le2st_core::query::QueryScheme;

/// Labeling everything under a unit-separation location alternative
/// leaves no Type II error: the full-sample test rejects every trial.
#[test]
fn full_budget_location_alternative_has_full_power() {
    let spec = SyntheticSpec::new(SyntheticKind::LocationAlt, 500, 2, 0);
    let cfg = ExperimentConfig {
        q: 30,
        q_max: 500,
        trials: 50,
        scheme: QueryScheme::Passive,
        master_seed: 7,
        ..ExperimentConfig::default()
    };
    let summary = estimate_error_rates(&spec, &cfg).unwrap();
    assert_eq!(summary.rejection_rate, 1.0, "Type II error must be 0/50");
    assert_eq!(summary.ci_high, 1.0);
    assert!(summary.records.iter().all(|r| r.outcome.reject));
}

/// Under the null at full budget the divergence estimate centers on
/// zero, up to Monte Carlo noise.
#[test]
fn null_divergence_is_near_zero_at_full_budget() {
    let spec = SyntheticSpec::new(SyntheticKind::Null, 200, 2, 0);
    let cfg = ExperimentConfig {
        q: 20,
        q_max: 200,
        trials: 30,
        scheme: QueryScheme::Passive,
        master_seed: 13,
        ..ExperimentConfig::default()
    };
    let point = &divergence_curve(&spec, &cfg, &[1.0]).unwrap()[0];
    assert_eq!(point.trials_used, 30);
    assert!(
        point.mean.abs() < 0.1,
        "null divergence {} is not near zero",
        point.mean
    );
}
