//! Closed-form finite-sample expectations for the de-standardized
//! statistic `R - 2mn/N` under the two query regimes, the binomial
//! product moment they share, and the k-th-nearest-neighbor error
//! recursion used to bound the passive side.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

/// Inputs to the passive-side lower bound: query count, class prior,
/// overlap risk, dimension, and optionally the coefficients `c_l`
/// (for l = 2, 3, ...) of the finite-sample error expansion. Without
/// coefficients the bound keeps only its leading term.
#[derive(Debug, Clone, PartialEq)]
pub struct TheoryParams {
    n_q: u32,
    u: f64,
    a_d: f64,
    d: u32,
    risk: f64,
    series: Option<Vec<f64>>,
}

impl TheoryParams {
    pub fn new(n_q: u32, u: f64, a_d: f64, d: u32, risk: f64) -> Result<Self> {
        if n_q < 2 {
            return Err(Error::InvalidInput("need at least 2 queries".into()));
        }
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::InvalidInput("prior must lie in (0, 1)".into()));
        }
        if !a_d.is_finite() {
            return Err(Error::InvalidInput("degree constant must be finite".into()));
        }
        if d == 0 {
            return Err(Error::InvalidInput("dimension must be at least 1".into()));
        }
        if !(0.0..=0.5).contains(&risk) || !risk.is_finite() {
            return Err(Error::InvalidInput("risk must lie in [0, 0.5]".into()));
        }
        Ok(Self {
            n_q,
            u,
            a_d,
            d,
            risk,
            series: None,
        })
    }

    /// Attaches expansion coefficients; `series[0]` is `c_2`.
    pub fn with_series(mut self, coefficients: Vec<f64>) -> Self {
        self.series = Some(coefficients);
        self
    }

    pub fn n_q(&self) -> u32 {
        self.n_q
    }

    pub fn u(&self) -> f64 {
        self.u
    }

    /// `r = 2u(1-u)`, derived so it can never drift from `u`.
    pub fn r(&self) -> f64 {
        2.0 * self.u * (1.0 - self.u)
    }

    pub fn a_d(&self) -> f64 {
        self.a_d
    }

    pub fn risk(&self) -> f64 {
        self.risk
    }
}

/// Expected de-standardized statistic when both class modes are queried
/// evenly and the modes are far apart:
/// `(N_q - 1) ((1 - 2^-N_q)/(N_q - 1) - 1/2)`.
pub fn expected_fr_variant_bimodal(n_q: u32) -> f64 {
    let nq = n_q as f64;
    1.0 - math::exp2(-nq) - (nq - 1.0) / 2.0
}

/// Lower bound for the passive side:
/// `(N_q - 1) (risk + sum_l c_l (N_q - 1)^(-l/d) - 1/2)`.
pub fn expected_fr_variant_passive_lower_bound(tp: &TheoryParams) -> f64 {
    let nq = tp.n_q as f64;
    let mut inner = tp.risk - 0.5;
    if let Some(coeffs) = &tp.series {
        for (idx, c) in coeffs.iter().enumerate() {
            let l = (idx + 2) as f64;
            inner += c * math::powf(nq - 1.0, -l / tp.d as f64);
        }
    }
    (nq - 1.0) * inner
}

/// `E[m (N_q - m)]` for `m ~ Binomial(N_q, u)`: equals
/// `N_q (N_q - 1) u (1 - u)`.
pub fn expected_mn(n_q: u32, u: f64) -> f64 {
    let nq = n_q as f64;
    nq * (nq - 1.0) * u * (1.0 - u)
}

/// Cut-edge law in the well-separated two-mode regime:
/// `(P(R = 0), P(R = 1)) = (2^-N_q, 1 - 2^-N_q)`.
pub fn bimodal_cut_edge_distribution(n_q: u32) -> (f64, f64) {
    let p_zero = math::exp2(-(n_q as f64));
    (p_zero, 1.0 - p_zero)
}

/// Classification error `f_k(N)` of the k-th-nearest-neighbor rule,
/// indexed by `(k, N)`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct KnnErrorTable {
    entries: BTreeMap<(u32, u32), f64>,
}

impl KnnErrorTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, k: u32, n: u32, error: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&error) || !error.is_finite() {
            return Err(Error::InvalidInput("error rates lie in [0, 1]".into()));
        }
        self.entries.insert((k, n), error);
        Ok(())
    }

    pub fn get(&self, k: u32, n: u32) -> Option<f64> {
        self.entries.get(&(k, n)).copied()
    }
}

/// `f_k(N) = N/(k-1) [f_{k-1}(N-1) - f_{k-1}(N)] + f_{k-1}(N)`,
/// reading the `k-1` row from `table`.
pub fn knn_error_recursion(table: &KnnErrorTable, k: u32, n: u32) -> Result<f64> {
    if k < 2 {
        return Err(Error::InvalidInput("recursion starts at k = 2".into()));
    }
    if n < 2 {
        return Err(Error::InvalidInput("need at least 2 training examples".into()));
    }
    let prev_smaller = table
        .get(k - 1, n - 1)
        .ok_or_else(|| Error::InvalidInput(format!("missing table entry ({}, {})", k - 1, n - 1)))?;
    let prev_same = table
        .get(k - 1, n)
        .ok_or_else(|| Error::InvalidInput(format!("missing table entry ({}, {})", k - 1, n)))?;
    Ok(n as f64 / (k - 1) as f64 * (prev_smaller - prev_same) + prev_same)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn bimodal_expectation_closed_form() {
        assert!((expected_fr_variant_bimodal(2) - 0.25).abs() < 1e-15);
        assert!((expected_fr_variant_bimodal(10) - (-3.5009765625)).abs() < 1e-15);
    }

    #[test]
    fn bimodal_ratio_approaches_minus_half() {
        let n_q = 100;
        let ratio = expected_fr_variant_bimodal(n_q) / (n_q as f64 - 1.0);
        assert!((ratio + 0.5).abs() < 0.011);
    }

    #[test]
    fn passive_lower_bound_values() {
        let total_overlap = TheoryParams::new(7, 0.5, 0.8, 2, 0.5).unwrap();
        assert_eq!(expected_fr_variant_passive_lower_bound(&total_overlap), 0.0);

        let tp = TheoryParams::new(11, 0.5, 0.8, 2, 0.1).unwrap();
        assert!((expected_fr_variant_passive_lower_bound(&tp) - (-4.0)).abs() < 1e-12);
    }

    #[test]
    fn passive_bound_ratio_stays_above_minus_half_with_overlap() {
        for n_q in [4u32, 16, 256, 4096] {
            let tp = TheoryParams::new(n_q, 0.3, 0.8, 3, 0.05).unwrap();
            let ratio = expected_fr_variant_passive_lower_bound(&tp) / (n_q as f64 - 1.0);
            assert!(ratio > -0.5);
        }
    }

    #[test]
    fn series_terms_raise_the_bound() {
        let plain = TheoryParams::new(50, 0.5, 0.8, 2, 0.1).unwrap();
        let with_series = plain.clone().with_series(vec![0.3, 0.2]);
        assert!(
            expected_fr_variant_passive_lower_bound(&with_series)
                > expected_fr_variant_passive_lower_bound(&plain)
        );
    }

    #[test]
    fn binomial_product_moment() {
        assert_eq!(expected_mn(5, 0.0), 0.0);
        assert!((expected_mn(2, 0.5) - 0.5).abs() < 1e-15);
        assert!((expected_mn(10, 0.5) - 22.5).abs() < 1e-15);
        // symmetric in u <-> 1 - u
        assert!((expected_mn(17, 0.3) - expected_mn(17, 0.7)).abs() < 1e-12);
    }

    #[test]
    fn cut_edge_distribution_sums_to_one() {
        let (p0, p1) = bimodal_cut_edge_distribution(2);
        assert!((p0 - 0.25).abs() < 1e-15);
        assert!((p1 - 0.75).abs() < 1e-15);
        for n_q in [2u32, 5, 30] {
            let (a, b) = bimodal_cut_edge_distribution(n_q);
            assert!((a + b - 1.0).abs() < 1e-15);
            // E[R] = P(R = 1) is the term inside the bimodal expectation
            let e_r = b;
            let nq = n_q as f64;
            assert!((expected_fr_variant_bimodal(n_q) - (e_r - (nq - 1.0) / 2.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn knn_recursion_examples() {
        let mut table = KnnErrorTable::new();
        table.insert(1, 4, 0.3).unwrap();
        table.insert(1, 5, 0.28).unwrap();
        let f2 = knn_error_recursion(&table, 2, 5).unwrap();
        assert!((f2 - 0.38).abs() < 1e-12);

        // constant-in-N rows are fixed points of the recursion
        table.insert(1, 7, 0.2).unwrap();
        table.insert(1, 8, 0.2).unwrap();
        assert!((knn_error_recursion(&table, 2, 8).unwrap() - 0.2).abs() < 1e-15);

        assert!(knn_error_recursion(&table, 1, 5).is_err());
        assert!(knn_error_recursion(&table, 2, 4).is_err());
        assert!(table.insert(1, 3, 1.5).is_err());
    }
}
