//! Monte Carlo oracles for the closed-form expectations.

mod common;

use std::collections::BTreeMap;

use common::{rng, standard_normal};
use le2st_core::geometry::{euclidean_mst, PointSet};
use le2st_core::theory::{
    bimodal_cut_edge_distribution, expected_fr_variant_bimodal,
    expected_fr_variant_passive_lower_bound, expected_mn, TheoryParams,
};
use rand::Rng;

#[test]
fn binomial_product_moment_matches_simulation() {
    let mut rng = rng(0x626d_6f6d);
    let n_q = 10u32;
    let u = 0.5;
    let reps = 1_000_000usize;
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..reps {
        let m = (0..n_q).filter(|_| rng.gen::<f64>() < u).count() as f64;
        let value = m * (n_q as f64 - m);
        sum += value;
        sum_sq += value * value;
    }
    let mc_mean = sum / reps as f64;
    let mc_var = sum_sq / reps as f64 - mc_mean * mc_mean;
    let se = (mc_var / reps as f64).sqrt();
    let expected = expected_mn(n_q, u);
    assert!((expected - 22.5).abs() < 1e-12);
    assert!(
        (mc_mean - expected).abs() < 3.0 * se,
        "simulated {mc_mean}, closed form {expected}, se {se}"
    );
}

/// Two tight clusters far apart, labels assigned by independent fair
/// coins. Every tree has at most one cut edge; an i.i.d. fair-label
/// mixture sweeps a single class with probability 2 * 2^-n (either class
/// can sweep), twice the single-class mass 2^-n the closed form tracks.
#[test]
fn separated_cluster_simulation_bounds_cut_edges() {
    let mut rng = rng(0x636c_7573);
    for n_q in [3u32, 5, 8] {
        let reps = 40_000usize;
        let mut zero_cut = 0usize;
        for _ in 0..reps {
            let mut coords = Vec::with_capacity(n_q as usize);
            let mut labels: BTreeMap<usize, bool> = BTreeMap::new();
            for id in 0..n_q as usize {
                let class1 = rng.gen::<f64>() < 0.5;
                let center = if class1 { 100.0 } else { 0.0 };
                coords.push(center + 0.05 * standard_normal(&mut rng));
                labels.insert(id, class1);
            }
            let ps = PointSet::new(coords, 1).unwrap();
            let r = euclidean_mst(&ps).cut_edge_count(&labels).unwrap();
            assert!(r <= 1, "separated clusters admit at most one cut edge");
            if r == 0 {
                zero_cut += 1;
            }
        }
        let (p_zero_one_class, _) = bimodal_cut_edge_distribution(n_q);
        let mixture_p_zero = 2.0 * p_zero_one_class;
        let observed = zero_cut as f64 / reps as f64;
        let se = (mixture_p_zero * (1.0 - mixture_p_zero) / reps as f64).sqrt();
        assert!(
            (observed - mixture_p_zero).abs() < 3.0 * se,
            "n_q={n_q}: observed {observed}, mixture law {mixture_p_zero}, se {se}"
        );
    }
}

/// Feeding the recursion a nonincreasing nearest-neighbor error table
/// never drops below that table: higher-order neighbors can only do
/// worse. Checked on an analytic `1/4 + 1/(2N)` row, whose recursed
/// rows stay nonincreasing themselves.
#[test]
fn recursion_respects_the_nearest_neighbor_floor() {
    use le2st_core::theory::{knn_error_recursion, KnnErrorTable};

    let f1 = |n: u32| 0.25 + 0.5 / n as f64;
    let mut table = KnnErrorTable::new();
    for n in 2..=30u32 {
        table.insert(1, n, f1(n)).unwrap();
    }
    for n in 3..=30u32 {
        let f2 = knn_error_recursion(&table, 2, n).unwrap();
        table.insert(2, n, f2).unwrap();
    }
    for n in 4..=30u32 {
        let f2 = table.get(2, n).unwrap();
        assert!(f2 >= f1(n), "f2({n}) = {f2} under the floor {}", f1(n));
        let f3 = knn_error_recursion(&table, 3, n).unwrap();
        assert!(f3 >= f1(n), "f3({n}) = {f3} under the floor {}", f1(n));
    }
}

/// The bimodal expectation falls below the passive-side leading-order
/// bound once `(1 - 2^-n)/(n - 1) < risk`, and the crossover arrives by
/// n = 21 whenever the overlap risk is at least 0.05.
#[test]
fn bimodal_dominates_passive_bound_past_the_crossover() {
    for &risk in &[0.05, 0.1, 0.25, 0.5] {
        let crossover = (4u32..=20_000)
            .find(|&n| (1.0 - (-(n as f64)).exp2()) / (n as f64 - 1.0) < risk)
            .expect("crossover exists");
        assert!(
            crossover <= 21,
            "risk {risk}: crossover {crossover} arrived late"
        );
        for n_q in crossover..=10_000 {
            let tp = TheoryParams::new(n_q, 0.5, 0.8, 2, risk).unwrap();
            assert!(
                expected_fr_variant_bimodal(n_q) < expected_fr_variant_passive_lower_bound(&tp),
                "ordering failed at n_q={n_q}, risk={risk}"
            );
        }
    }
}
