#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// One standard normal draw via Box-Muller.
pub fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Calls `f` with every m-subset of `0..n` in lexicographic order.
pub fn for_each_combination(n: usize, m: usize, mut f: impl FnMut(&[usize])) {
    if m > n {
        return;
    }
    let mut idx: Vec<usize> = (0..m).collect();
    loop {
        f(&idx);
        if m == 0 {
            return;
        }
        let mut i = m as isize - 1;
        while i >= 0 && idx[i as usize] == n - m + i as usize {
            i -= 1;
        }
        if i < 0 {
            return;
        }
        let i = i as usize;
        idx[i] += 1;
        for j in i + 1..m {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Decodes a Prufer sequence over `0..n` into the edges of its tree.
pub fn prufer_to_edges(seq: &[usize], n: usize) -> Vec<(usize, usize)> {
    assert!(n >= 2 && seq.len() == n - 2);
    let mut deg = vec![1usize; n];
    for &s in seq {
        deg[s] += 1;
    }
    let mut used = vec![false; n];
    let mut edges = Vec::with_capacity(n - 1);
    for &s in seq {
        let leaf = (0..n).find(|&v| deg[v] == 1 && !used[v]).unwrap();
        edges.push((leaf, s));
        used[leaf] = true;
        deg[s] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&v| !used[v] && deg[v] == 1).collect();
    edges.push((rest[0], rest[1]));
    edges
}

/// Calls `f` with the edge list of every labeled tree on `n >= 2` nodes.
pub fn for_each_spanning_tree(n: usize, mut f: impl FnMut(&[(usize, usize)])) {
    if n == 2 {
        f(&[(0, 1)]);
        return;
    }
    let len = n - 2;
    let mut seq = vec![0usize; len];
    loop {
        f(&prufer_to_edges(&seq, n));
        let mut pos = 0;
        loop {
            if pos == len {
                return;
            }
            seq[pos] += 1;
            if seq[pos] < n {
                break;
            }
            seq[pos] = 0;
            pos += 1;
        }
    }
}

/// erf by its Maclaurin series; accurate to ~1e-14 for |x| <= 2.
pub fn erf_series(x: f64) -> f64 {
    let mut term = x;
    let mut sum = x;
    let x2 = x * x;
    for k in 1..200 {
        term *= -x2 / k as f64;
        let contribution = term / (2 * k + 1) as f64;
        sum += contribution;
        if contribution.abs() < 1e-18 {
            break;
        }
    }
    sum * 2.0 / std::f64::consts::PI.sqrt()
}

/// Standard normal CDF from the series erf; independent of the library path.
pub fn normal_cdf_series(x: f64) -> f64 {
    0.5 * (1.0 + erf_series(x / std::f64::consts::SQRT_2))
}
