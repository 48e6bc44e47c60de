//! Synthetic two-class datasets: a null family where both groups share
//! one Gaussian, a location alternative with means at plus and minus
//! `delta1` on the first axis, and a scale alternative that also widens
//! one group by `1 + sigma`.
//!
//! Gaussians are drawn by Box-Muller from a per-spec ChaCha stream, with
//! trig and logs routed through libm, so a seed pins the dataset bytes
//! on every platform.

use std::collections::BTreeMap;
use std::str::FromStr;

use le2st_core::geometry::PointSet;
use le2st_core::Error as CoreError;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::oracle::LabelOracle;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SyntheticKind {
    Null,
    LocationAlt,
    ScaleAlt,
}

impl SyntheticKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            SyntheticKind::Null => "null",
            SyntheticKind::LocationAlt => "location_alt",
            SyntheticKind::ScaleAlt => "scale_alt",
        }
    }
}

impl FromStr for SyntheticKind {
    type Err = CoreError;

    fn from_str(s: &str) -> std::result::Result<Self, CoreError> {
        match s {
            "null" => Ok(SyntheticKind::Null),
            "location_alt" => Ok(SyntheticKind::LocationAlt),
            "scale_alt" => Ok(SyntheticKind::ScaleAlt),
            other => Err(CoreError::InvalidInput(format!("unknown kind `{other}`"))),
        }
    }
}

impl std::fmt::Display for SyntheticKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub kind: SyntheticKind,
    pub n_total: usize,
    pub d: usize,
    pub delta1: f64,
    pub delta2: f64,
    pub sigma: f64,
    pub class_balance: f64,
    pub seed: u64,
}

impl SyntheticSpec {
    pub fn new(kind: SyntheticKind, n_total: usize, d: usize, seed: u64) -> Self {
        Self {
            kind,
            n_total,
            d,
            delta1: 1.0,
            delta2: 0.6,
            sigma: 0.6,
            class_balance: 0.5,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_total < 4 {
            return Err(CoreError::InvalidInput("n_total must be at least 4".into()).into());
        }
        if self.d == 0 {
            return Err(CoreError::InvalidInput("d must be at least 1".into()).into());
        }
        if !(self.class_balance > 0.0 && self.class_balance < 1.0) {
            return Err(CoreError::InvalidInput("class_balance must lie in (0, 1)".into()).into());
        }
        for (name, value) in [
            ("delta1", self.delta1),
            ("delta2", self.delta2),
            ("sigma", self.sigma),
        ] {
            if !value.is_finite() {
                return Err(CoreError::InvalidInput(format!("{name} must be finite")).into());
            }
        }
        if self.sigma <= -1.0 {
            return Err(CoreError::InvalidInput("sigma must exceed -1".into()).into());
        }
        Ok(())
    }
}

/// Standard normals by Box-Muller, two per uniform pair.
fn fill_standard_normal(rng: &mut ChaCha8Rng, out: &mut [f64]) {
    let mut idx = 0;
    while idx < out.len() {
        let u1: f64 = 1.0 - rng.gen::<f64>();
        let u2: f64 = rng.gen();
        let radius = libm::sqrt(-2.0 * libm::log(u1));
        let angle = std::f64::consts::TAU * u2;
        out[idx] = radius * libm::cos(angle);
        idx += 1;
        if idx < out.len() {
            out[idx] = radius * libm::sin(angle);
            idx += 1;
        }
    }
}

/// Features plus a metered oracle over the hidden labels. The label
/// sequence is shuffled so ids carry no class information.
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<(PointSet, LabelOracle)> {
    spec.validate()?;
    let n = spec.n_total;
    let d = spec.d;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let n_class0 = ((n as f64) * spec.class_balance).round() as usize;
    let n_class0 = n_class0.clamp(1, n - 1);
    let mut labels: Vec<bool> = (0..n).map(|i| i >= n_class0).collect();
    labels.shuffle(&mut rng);

    let mut coords = vec![0.0; n * d];
    fill_standard_normal(&mut rng, &mut coords);

    let scale1 = libm::sqrt(1.0 + spec.sigma);
    for (point, &class1) in coords.chunks_exact_mut(d).zip(&labels) {
        match spec.kind {
            SyntheticKind::Null => {}
            SyntheticKind::LocationAlt => {
                point[0] += if class1 { -spec.delta1 } else { spec.delta1 };
            }
            SyntheticKind::ScaleAlt => {
                if class1 {
                    for x in point.iter_mut() {
                        *x *= scale1;
                    }
                    point[0] -= spec.delta2;
                } else {
                    point[0] += spec.delta2;
                }
            }
        }
    }

    let ps = PointSet::new(coords, d)?;
    let label_map: BTreeMap<usize, bool> = labels.into_iter().enumerate().collect();
    Ok((ps, LabelOracle::new(label_map)))
}

/// Class-overlap risk for the location family along its discriminating
/// axis: `int 2 pi0(x) pi1(x) / (pi0(x) + pi1(x)) dx` with
/// `pi0 = u N(delta, 1)` and `pi1 = (1-u) N(-delta, 1)`, by Simpson's
/// rule on a wide bracket.
pub fn gaussian_location_risk(delta: f64, u: f64) -> f64 {
    let half = (10.0 + delta.abs()).max(10.0);
    let steps = 20_000usize; // even
    let h = 2.0 * half / steps as f64;
    let density = |x: f64, mean: f64| -> f64 {
        libm::exp(-0.5 * (x - mean) * (x - mean)) / libm::sqrt(2.0 * std::f64::consts::PI)
    };
    let integrand = |x: f64| -> f64 {
        let pi0 = u * density(x, delta);
        let pi1 = (1.0 - u) * density(x, -delta);
        let total = pi0 + pi1;
        if total <= 0.0 {
            0.0
        } else {
            2.0 * pi0 * pi1 / total
        }
    };
    let mut sum = integrand(-half) + integrand(half);
    for i in 1..steps {
        let x = -half + i as f64 * h;
        sum += integrand(x) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    (sum * h / 3.0).clamp(0.0, 0.5)
}
