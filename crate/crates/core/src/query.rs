//! Label-query schemes for the budgeted stage, and the small linear
//! program whose solution motivates the bimodal scheme.
//!
//! All argmax/argmin ties resolve to the lowest id so that runs are
//! reproducible. The bimodal pair is always distinct: the class-1 pick
//! excludes whatever the class-0 pick chose.

use alloc::format;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};

/// Pool of unlabeled ids plus the ordered list of queried (id, label)
/// pairs. The pool is kept sorted; pool and queried ids never overlap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryState {
    pool: Vec<usize>,
    queried: Vec<(usize, bool)>,
}

impl QueryState {
    pub fn new(ids: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut pool: Vec<usize> = ids.into_iter().collect();
        pool.sort_unstable();
        if pool.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidInput("duplicate ids in pool".into()));
        }
        Ok(Self {
            pool,
            queried: Vec::new(),
        })
    }

    pub fn pool(&self) -> &[usize] {
        &self.pool
    }

    pub fn queried(&self) -> &[(usize, bool)] {
        &self.queried
    }

    pub fn budget_used(&self) -> usize {
        self.queried.len()
    }

    /// Moves `id` from the pool into the queried list.
    pub fn mark_queried(&mut self, id: usize, label: bool) -> Result<()> {
        match self.pool.binary_search(&id) {
            Ok(pos) => {
                self.pool.remove(pos);
                self.queried.push((id, label));
                Ok(())
            }
            Err(_) => Err(Error::InvalidInput(format!("id {id} is not in the pool"))),
        }
    }
}

/// The four selection rules. `Bimodal` is the scheme of interest; the
/// others are the baselines it is compared against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QueryScheme {
    Bimodal,
    Passive,
    Uncertainty,
    Certainty,
}

impl QueryScheme {
    pub const ALL: [QueryScheme; 4] = [
        QueryScheme::Bimodal,
        QueryScheme::Passive,
        QueryScheme::Uncertainty,
        QueryScheme::Certainty,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            QueryScheme::Bimodal => "bimodal",
            QueryScheme::Passive => "passive",
            QueryScheme::Uncertainty => "uncertainty",
            QueryScheme::Certainty => "certainty",
        }
    }

    /// Two distinct ids for this round. `posterior1` maps an id to
    /// `P(z=1 | s)`; only the passive scheme consumes randomness.
    pub fn select_pair<F, R>(
        &self,
        state: &QueryState,
        posterior1: &F,
        rng: &mut R,
    ) -> Result<(usize, usize)>
    where
        F: Fn(usize) -> f64,
        R: Rng + ?Sized,
    {
        match self {
            QueryScheme::Bimodal => bimodal_select(state, posterior1),
            QueryScheme::Passive => passive_select(state, rng),
            QueryScheme::Uncertainty => uncertainty_select(state, posterior1),
            QueryScheme::Certainty => certainty_select(state, posterior1),
        }
    }

    /// The scheme's first pick alone, for an odd final budget step.
    pub fn select_one<F, R>(&self, state: &QueryState, posterior1: &F, rng: &mut R) -> Result<usize>
    where
        F: Fn(usize) -> f64,
        R: Rng + ?Sized,
    {
        let pool = state.pool();
        if pool.is_empty() {
            return Err(Error::PoolExhausted);
        }
        Ok(match self {
            QueryScheme::Bimodal => argmax(pool, None, &|id| 1.0 - posterior1(id)).unwrap(),
            QueryScheme::Passive => pool[rng.gen_range(0..pool.len())],
            QueryScheme::Uncertainty => argmax(pool, None, &|id| -certainty(posterior1(id))).unwrap(),
            QueryScheme::Certainty => argmax(pool, None, &|id| certainty(posterior1(id))).unwrap(),
        })
    }
}

impl fmt::Display for QueryScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for QueryScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bimodal" => Ok(QueryScheme::Bimodal),
            "passive" => Ok(QueryScheme::Passive),
            "uncertainty" => Ok(QueryScheme::Uncertainty),
            "certainty" => Ok(QueryScheme::Certainty),
            other => Err(Error::InvalidInput(format!("unknown scheme `{other}`"))),
        }
    }
}

fn certainty(p1: f64) -> f64 {
    if p1 > 1.0 - p1 {
        p1
    } else {
        1.0 - p1
    }
}

/// First id maximizing `score`, skipping `skip`; ties go to the lowest id
/// because the pool is sorted.
fn argmax<F>(pool: &[usize], skip: Option<usize>, score: &F) -> Option<usize>
where
    F: Fn(usize) -> f64,
{
    let mut best: Option<(usize, f64)> = None;
    for &id in pool {
        if Some(id) == skip {
            continue;
        }
        let s = score(id);
        let replace = match best {
            None => true,
            Some((_, b)) => s > b,
        };
        if replace {
            best = Some((id, s));
        }
    }
    best.map(|(id, _)| id)
}

/// The pool point most confidently class 0 and the pool point most
/// confidently class 1, in that order.
pub fn bimodal_select<F>(state: &QueryState, posterior1: &F) -> Result<(usize, usize)>
where
    F: Fn(usize) -> f64,
{
    let pool = state.pool();
    if pool.len() < 2 {
        return Err(Error::PoolExhausted);
    }
    let id_a = argmax(pool, None, &|id| 1.0 - posterior1(id)).unwrap();
    let id_b = argmax(pool, Some(id_a), posterior1).unwrap();
    Ok((id_a, id_b))
}

/// Two uniform draws without replacement.
pub fn passive_select<R>(state: &QueryState, rng: &mut R) -> Result<(usize, usize)>
where
    R: Rng + ?Sized,
{
    let pool = state.pool();
    if pool.len() < 2 {
        return Err(Error::PoolExhausted);
    }
    let first = rng.gen_range(0..pool.len());
    let second = {
        let raw = rng.gen_range(0..pool.len() - 1);
        if raw >= first {
            raw + 1
        } else {
            raw
        }
    };
    Ok((pool[first], pool[second]))
}

/// The two pool points whose max-class posterior is smallest, i.e.
/// closest to the decision boundary.
pub fn uncertainty_select<F>(state: &QueryState, posterior1: &F) -> Result<(usize, usize)>
where
    F: Fn(usize) -> f64,
{
    let pool = state.pool();
    if pool.len() < 2 {
        return Err(Error::PoolExhausted);
    }
    let id_a = argmax(pool, None, &|id| -certainty(posterior1(id))).unwrap();
    let id_b = argmax(pool, Some(id_a), &|id| -certainty(posterior1(id))).unwrap();
    Ok((id_a, id_b))
}

/// The two pool points with the largest max-class posterior, whichever
/// class that is.
pub fn certainty_select<F>(state: &QueryState, posterior1: &F) -> Result<(usize, usize)>
where
    F: Fn(usize) -> f64,
{
    let pool = state.pool();
    if pool.len() < 2 {
        return Err(Error::PoolExhausted);
    }
    let id_a = argmax(pool, None, &|id| certainty(posterior1(id))).unwrap();
    let id_b = argmax(pool, Some(id_a), &|id| certainty(posterior1(id))).unwrap();
    Ok((id_a, id_b))
}

/// A weighting problem over class-0 posteriors: maximize the expected
/// squared posterior subject to the weighted posterior mean hitting the
/// target prior `u`.
#[derive(Debug, Clone, PartialEq)]
pub struct LpInstance {
    p0: Vec<f64>,
    u: f64,
}

impl LpInstance {
    pub fn new(p0: Vec<f64>, u: f64) -> Result<Self> {
        if p0.is_empty() {
            return Err(Error::InvalidInput("no posteriors".into()));
        }
        if !p0.iter().all(|p| p.is_finite() && (0.0..=1.0).contains(p)) {
            return Err(Error::InvalidInput("posteriors must lie in [0, 1]".into()));
        }
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::InvalidInput("target prior must lie in (0, 1)".into()));
        }
        Ok(Self { p0, u })
    }

    pub fn posteriors(&self) -> &[f64] {
        &self.p0
    }

    pub fn u(&self) -> f64 {
        self.u
    }

    fn extremes(&self) -> (usize, usize) {
        let mut lo = 0;
        let mut hi = 0;
        for (i, &p) in self.p0.iter().enumerate() {
            if p < self.p0[lo] {
                lo = i;
            }
            if p > self.p0[hi] {
                hi = i;
            }
        }
        (lo, hi)
    }
}

/// An optimal weighting: all mass on indices `q0` (smallest class-0
/// posterior) and `q1` (largest), with weights `w0 + w1 = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LpSolution {
    pub q0: usize,
    pub q1: usize,
    pub w0: f64,
    pub w1: f64,
    pub objective: f64,
}

/// Closed-form optimum: put weight on the two extreme posteriors, split
/// so the constraint holds.
pub fn lp_closed_form(inst: &LpInstance) -> Result<LpSolution> {
    let (q0, q1) = inst.extremes();
    let lo = inst.p0[q0];
    let hi = inst.p0[q1];
    if lo == hi {
        return Err(Error::DegenerateInstance);
    }
    if inst.u < lo || inst.u > hi {
        return Err(Error::Infeasible);
    }
    let w0 = (hi - inst.u) / (hi - lo);
    let w1 = (inst.u - lo) / (hi - lo);
    Ok(LpSolution {
        q0,
        q1,
        w0,
        w1,
        objective: w0 * lo * lo + w1 * hi * hi,
    })
}

/// Independent check of [`lp_closed_form`]: enumerates every vertex of
/// the feasible polytope (each pair of indices solved for its two
/// weights) and returns the best feasible one. Limited to 12 variables.
pub fn lp_brute_force(inst: &LpInstance) -> Result<LpSolution> {
    let h = inst.p0.len();
    if h > 12 {
        return Err(Error::InvalidInput(
            "vertex enumeration is limited to 12 variables".into(),
        ));
    }
    let (lo_idx, hi_idx) = inst.extremes();
    if inst.p0[lo_idx] == inst.p0[hi_idx] {
        return Err(Error::DegenerateInstance);
    }
    if inst.u < inst.p0[lo_idx] || inst.u > inst.p0[hi_idx] {
        return Err(Error::Infeasible);
    }

    const WEIGHT_EPS: f64 = 1e-12;
    let mut best: Option<LpSolution> = None;
    for i in 0..h {
        for j in (i + 1)..h {
            let (pi, pj) = (inst.p0[i], inst.p0[j]);
            if pi == pj {
                continue;
            }
            let wi = (inst.u - pj) / (pi - pj);
            let wj = 1.0 - wi;
            if wi < -WEIGHT_EPS || wj < -WEIGHT_EPS {
                continue;
            }
            let wi = wi.clamp(0.0, 1.0);
            let wj = wj.clamp(0.0, 1.0);
            let objective = wi * pi * pi + wj * pj * pj;
            // orient the vertex so q0 holds the smaller posterior
            let vertex = if pi < pj {
                LpSolution { q0: i, q1: j, w0: wi, w1: wj, objective }
            } else {
                LpSolution { q0: j, q1: i, w0: wj, w1: wi, objective }
            };
            let keep = match &best {
                None => true,
                Some(b) => vertex.objective > b.objective,
            };
            if keep {
                best = Some(vertex);
            }
        }
    }
    best.ok_or(Error::Infeasible)
}
