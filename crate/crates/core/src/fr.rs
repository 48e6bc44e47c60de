//! The Friedman-Rafsky cut-edge statistic, its null moments and p-value,
//! the asymptotic form of the statistic, and the divergence estimate read
//! off the same counts.
//!
//! The test is one-sided lower-tail: few cut edges are evidence that the
//! two classes occupy different regions, so small statistics give small
//! p-values.

use crate::error::{Error, Result};
use crate::geometry::Mst;
use crate::math;

/// Counts feeding the statistic: cut edges `r`, class sizes `m` and `n`,
/// and the tree's shared-node pair count `c_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrInputs {
    r: usize,
    m: usize,
    n: usize,
    c_n: usize,
}

impl FrInputs {
    /// Requires one point per class, at least 4 points total (the null
    /// variance divides by (N-2)(N-3)), and `r` within the edge count.
    pub fn new(r: usize, m: usize, n: usize, c_n: usize) -> Result<Self> {
        if m < 1 || n < 1 {
            return Err(Error::InvalidInput("both classes must be present".into()));
        }
        if m + n < 4 {
            return Err(Error::InvalidInput(
                "need at least 4 points for the null variance".into(),
            ));
        }
        if r > m + n - 1 {
            return Err(Error::InvalidInput(
                "more cut edges than tree edges".into(),
            ));
        }
        Ok(Self { r, m, n, c_n })
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn c_n(&self) -> usize {
        self.c_n
    }

    pub fn total(&self) -> usize {
        self.m + self.n
    }
}

/// Exact mean and variance of the cut-edge count under a uniformly random
/// assignment of `m` labels among `m + n` nodes of a tree with `c_n`
/// shared-node pairs.
pub fn null_moments(fr: &FrInputs) -> (f64, f64) {
    let m = fr.m as f64;
    let n = fr.n as f64;
    let big_n = m + n;
    let c = fr.c_n as f64;
    let mean = 2.0 * m * n / big_n;
    let var = (2.0 * m * n / (big_n * (big_n - 1.0)))
        * ((2.0 * m * n - big_n) / big_n
            + (c - big_n + 2.0) / ((big_n - 2.0) * (big_n - 3.0))
                * (big_n * (big_n - 1.0) - 4.0 * m * n + 2.0));
    (mean, var)
}

/// Standardized cut-edge count `(r - E[R]) / sqrt(Var[R])`.
pub fn fr_statistic(fr: &FrInputs) -> Result<f64> {
    let (mean, var) = null_moments(fr);
    if var.is_nan() || var <= 0.0 {
        return Err(Error::DegenerateVariance);
    }
    Ok((fr.r as f64 - mean) / math::sqrt(var))
}

/// Lower-tail p-value of the observed statistic under the standard
/// normal null law.
pub fn p_value(w: f64) -> f64 {
    math::normal_cdf(w)
}

/// Parameters of the large-sample limit of the statistic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticParams {
    risk: f64,
    u: f64,
    a_d: f64,
    n: usize,
}

impl AsymptoticParams {
    /// `risk` is the class-overlap integral (in [0, 0.5]), `u` the class-0
    /// prior, `a_d` the limit of shared-node pairs per node, `n` the
    /// sample count.
    pub fn new(risk: f64, u: f64, a_d: f64, n: usize) -> Result<Self> {
        if !(0.0..=0.5).contains(&risk) || !risk.is_finite() {
            return Err(Error::InvalidInput("risk must lie in [0, 0.5]".into()));
        }
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::InvalidInput("prior must lie in (0, 1)".into()));
        }
        if !a_d.is_finite() || a_d < 0.0 {
            return Err(Error::InvalidInput(
                "degree constant must be finite and nonnegative".into(),
            ));
        }
        if n == 0 {
            return Err(Error::InvalidInput("sample count must be positive".into()));
        }
        Ok(Self { risk, u, a_d, n })
    }
}

/// Limit form of the statistic:
/// `sqrt(N) (risk - 2uv) / sqrt(2uv [2uv + (A_d - 1)(1 - 4uv)])`.
pub fn asymptotic_statistic(ap: &AsymptoticParams) -> Result<f64> {
    let two_uv = 2.0 * ap.u * (1.0 - ap.u);
    let var = two_uv * (two_uv + (ap.a_d - 1.0) * (1.0 - 2.0 * two_uv));
    if var.is_nan() || var <= 0.0 {
        return Err(Error::DegenerateVariance);
    }
    Ok(math::sqrt(ap.n as f64) * (ap.risk - two_uv) / math::sqrt(var))
}

/// Plug-in estimate of the dimension constant: shared-node pairs per node.
pub fn estimate_ad(mst: &Mst) -> f64 {
    mst.shared_node_pairs() as f64 / mst.node_count() as f64
}

/// Divergence between the two labeled groups estimated from the tree
/// counts: with `r = 2mn/N^2` and the plug-in overlap `R/N`, returns
/// `(r - R/N) / sqrt((3 - 2 A_d) r^2 + (A_d - 1) r)`.
///
/// Zero when the cut-edge frequency matches its null expectation; grows
/// toward the separable limit as cut edges vanish.
pub fn f_divergence_estimate(fr: &FrInputs, a_d: f64) -> Result<f64> {
    let big_n = fr.total() as f64;
    let r_prior = 2.0 * fr.m as f64 * fr.n as f64 / (big_n * big_n);
    let radicand = (3.0 - 2.0 * a_d) * r_prior * r_prior + (a_d - 1.0) * r_prior;
    if radicand.is_nan() || radicand <= 0.0 {
        return Err(Error::DegenerateVariance);
    }
    Ok((r_prior - fr.r as f64 / big_n) / math::sqrt(radicand))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{euclidean_mst, PointSet};
    use alloc::vec;

    #[test]
    fn statistic_is_zero_at_the_null_mean() {
        let fr = FrInputs::new(2, 2, 2, 2).unwrap();
        assert_eq!(fr_statistic(&fr).unwrap(), 0.0);
    }

    #[test]
    fn path_of_four_with_split_labels() {
        // 1D path, labels 0,0,1,1: R = 1, C_N = 2, Var[R] = 2/3
        let fr = FrInputs::new(1, 2, 2, 2).unwrap();
        let (mean, var) = null_moments(&fr);
        assert!((mean - 2.0).abs() < 1e-15);
        assert!((var - 2.0 / 3.0).abs() < 1e-15);
        let w = fr_statistic(&fr).unwrap();
        assert!((w - (-1.224_744_871_391_589)).abs() < 1e-12);
    }

    #[test]
    fn p_value_examples() {
        assert_eq!(p_value(0.0), 0.5);
        assert!((p_value(-1.6449) - 0.05).abs() < 1e-4);
        assert!(p_value(-40.0) < 1e-300);
        assert!(p_value(40.0) > 1.0 - 1e-12);
    }

    #[test]
    fn input_guards() {
        assert!(FrInputs::new(0, 0, 4, 2).is_err());
        assert!(FrInputs::new(0, 2, 1, 1).is_err());
        assert!(FrInputs::new(4, 2, 2, 2).is_err());
    }

    #[test]
    fn asymptotic_examples_at_balanced_prior() {
        // at u = 1/2 the degree constant cancels: W = sqrt(N)(risk - 1/2)/(1/2)
        let ap = AsymptoticParams::new(0.0, 0.5, 3.0, 100).unwrap();
        assert!((asymptotic_statistic(&ap).unwrap() - (-10.0)).abs() < 1e-12);
        let ap = AsymptoticParams::new(0.25, 0.5, 0.77, 100).unwrap();
        assert!((asymptotic_statistic(&ap).unwrap() - (-5.0)).abs() < 1e-12);
        let ap = AsymptoticParams::new(0.5, 0.5, 1.3, 64).unwrap();
        assert_eq!(asymptotic_statistic(&ap).unwrap(), 0.0);
    }

    #[test]
    fn asymptotic_statistic_scales_as_root_n() {
        let base = AsymptoticParams::new(0.2, 0.4, 0.9, 50).unwrap();
        let quadrupled = AsymptoticParams::new(0.2, 0.4, 0.9, 200).unwrap();
        let w1 = asymptotic_statistic(&base).unwrap();
        let w4 = asymptotic_statistic(&quadrupled).unwrap();
        assert!((w4 - 2.0 * w1).abs() < 1e-12 * w1.abs());
    }

    #[test]
    fn ad_estimate_on_paths() {
        let ps = PointSet::new((0..10).map(|i| i as f64).collect(), 1).unwrap();
        let mst = euclidean_mst(&ps);
        assert!((estimate_ad(&mst) - 0.8).abs() < 1e-15);

        let two = PointSet::new(vec![0.0, 1.0], 1).unwrap();
        assert_eq!(estimate_ad(&euclidean_mst(&two)), 0.0);
    }

    #[test]
    fn divergence_balanced_cases() {
        // m = n makes r = 1/2 and the radicand 1/4 for any degree constant
        for a_d in [0.3, 0.8, 1.7] {
            let fr = FrInputs::new(0, 10, 10, 14).unwrap();
            assert!((f_divergence_estimate(&fr, a_d).unwrap() - 1.0).abs() < 1e-12);
            let fr = FrInputs::new(5, 10, 10, 14).unwrap();
            assert!((f_divergence_estimate(&fr, a_d).unwrap() - 0.5).abs() < 1e-12);
            // R/N equal to r: null behavior in expectation
            let fr = FrInputs::new(10, 10, 10, 14).unwrap();
            assert!(f_divergence_estimate(&fr, a_d).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn divergence_degenerate_radicand() {
        // heavily unbalanced classes push the radicand negative
        let fr = FrInputs::new(1, 1, 99, 80).unwrap();
        assert_eq!(
            f_divergence_estimate(&fr, 0.6).unwrap_err(),
            Error::DegenerateVariance
        );
    }
}
