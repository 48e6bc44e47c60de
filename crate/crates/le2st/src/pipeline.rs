//! The three-stage pipeline: uniformly label a seed set and train the
//! posterior model, spend the remaining budget through a query scheme in
//! batches of two, then run the cut-edge test on everything labeled.
//!
//! Degenerate runs (single-class labeled set, too few points, or zero
//! null variance) are recorded as accepts with `degenerate` set and NaN
//! statistics; the caller decides how to aggregate them.

use std::collections::BTreeMap;

use le2st_core::fr::{fr_statistic, p_value, FrInputs};
use le2st_core::geometry::{euclidean_mst, PointSet};
use le2st_core::posterior::{train_logistic, PosteriorModel, TrainConfig};
use le2st_core::query::{QueryScheme, QueryState};
use le2st_core::Error as CoreError;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

use crate::error::Result;
use crate::oracle::LabelOracle;
use crate::seeding::mix_seed;

pub(crate) const STREAM_SELECT: u64 = 0x53;
pub(crate) const STREAM_TRAIN: u64 = 0x54;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    /// Seed labels drawn uniformly before training.
    pub q: usize,
    /// Total label budget, seed labels included.
    pub q_max: usize,
    pub alpha: f64,
    pub scheme: QueryScheme,
    pub trials: usize,
    pub train: TrainConfig,
    pub master_seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            q: 30,
            q_max: 100,
            alpha: 0.05,
            scheme: QueryScheme::Bimodal,
            trials: 200,
            train: TrainConfig::default(),
            master_seed: 0,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self, n_total: usize) -> Result<()> {
        if self.q == 0 {
            return Err(CoreError::InvalidInput("Q must be positive".into()).into());
        }
        if self.q > self.q_max {
            return Err(CoreError::InvalidInput("Q must not exceed Q_max".into()).into());
        }
        if self.q_max > n_total {
            return Err(CoreError::InvalidInput("Q_max must not exceed n_total".into()).into());
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(CoreError::InvalidInput("alpha must lie in (0, 1)".into()).into());
        }
        if self.trials == 0 {
            return Err(CoreError::InvalidInput("trials must be positive".into()).into());
        }
        self.train.validate()?;
        Ok(())
    }
}

/// Result of one full pipeline run. `w` and `p` are NaN when
/// `degenerate` is set; such runs never reject.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestOutcome {
    pub r: usize,
    pub m_q: usize,
    pub n_q: usize,
    pub c_n: usize,
    pub w: f64,
    pub p: f64,
    pub reject: bool,
    pub degenerate: bool,
    pub oracle_calls: u64,
}

fn gather_features(ps: &PointSet, queried: &[(usize, bool)]) -> Result<(Vec<f64>, Vec<bool>)> {
    let mut features = Vec::with_capacity(queried.len() * ps.dim());
    let mut labels = Vec::with_capacity(queried.len());
    for &(id, z) in queried {
        let row = ps
            .point_by_id(id)
            .ok_or_else(|| CoreError::InvalidInput(format!("unknown point id {id}")))?;
        features.extend_from_slice(row);
        labels.push(z);
    }
    Ok((features, labels))
}

/// Uniformly label `q` points, train the posterior model, and return the
/// state. Single-class seed sets fall back to the constant model with
/// the degenerate flag set.
pub(crate) fn stage_one(
    ps: &PointSet,
    oracle: &mut LabelOracle,
    q: usize,
    train: &TrainConfig,
    rng: &mut ChaCha8Rng,
) -> Result<(QueryState, PosteriorModel, bool)> {
    let mut state = QueryState::new(ps.ids().iter().copied())?;
    let seed_ids: Vec<usize> = {
        let pool = state.pool();
        rand::seq::index::sample(rng, pool.len(), q)
            .iter()
            .map(|idx| pool[idx])
            .collect()
    };
    for id in seed_ids {
        let z = oracle.query(id)?;
        state.mark_queried(id, z)?;
    }
    let (features, labels) = gather_features(ps, state.queried())?;
    match train_logistic(&features, ps.dim(), &labels, train) {
        Ok(model) => Ok((state, model, false)),
        Err(CoreError::DegenerateTraining) => {
            Ok((state, PosteriorModel::constant(ps.dim()), true))
        }
        Err(e) => Err(e.into()),
    }
}

/// Runs the full pipeline on `ps` with the labels behind `oracle`.
///
/// `run_seed` drives both the uniform seed draw and any randomness in
/// the query scheme; repeated calls with the same arguments return the
/// same outcome bit for bit.
pub fn run_three_stage(
    ps: &PointSet,
    oracle: &mut LabelOracle,
    cfg: &ExperimentConfig,
    run_seed: u64,
) -> Result<TestOutcome> {
    cfg.validate(ps.len())?;
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(run_seed, STREAM_SELECT));
    let train = TrainConfig {
        seed: mix_seed(run_seed, STREAM_TRAIN),
        ..cfg.train.clone()
    };
    let (mut state, model, mut degenerate) = stage_one(ps, oracle, cfg.q, &train, &mut rng)?;

    // the model is frozen after stage one, so score the pool once
    let mut posteriors: BTreeMap<usize, f64> = BTreeMap::new();
    for pos in 0..ps.len() {
        posteriors.insert(ps.id_at(pos), model.posterior(ps.point(pos))?);
    }
    let score = |id: usize| posteriors[&id];

    while state.budget_used() < cfg.q_max {
        let remaining = cfg.q_max - state.budget_used();
        if remaining == 1 {
            match cfg.scheme.select_one(&state, &score, &mut rng) {
                Ok(id) => {
                    let z = oracle.query(id)?;
                    state.mark_queried(id, z)?;
                }
                Err(CoreError::PoolExhausted) => break,
                Err(e) => return Err(e.into()),
            }
        } else {
            match cfg.scheme.select_pair(&state, &score, &mut rng) {
                Ok((a, b)) => {
                    let za = oracle.query(a)?;
                    state.mark_queried(a, za)?;
                    let zb = oracle.query(b)?;
                    state.mark_queried(b, zb)?;
                }
                Err(CoreError::PoolExhausted) => break,
                Err(e) => return Err(e.into()),
            }
        }
    }

    let queried_ids: Vec<usize> = state.queried().iter().map(|&(id, _)| id).collect();
    let labels: BTreeMap<usize, bool> = state.queried().iter().copied().collect();
    let subset = ps.subset(&queried_ids)?;
    let mst = euclidean_mst(&subset);
    let r = mst.cut_edge_count(&labels)?;
    let c_n = mst.shared_node_pairs();
    let n_q = state.queried().iter().filter(|&&(_, z)| z).count();
    let m_q = state.queried().len() - n_q;

    let (w, p, reject) = if m_q == 0 || n_q == 0 || m_q + n_q < 4 {
        degenerate = true;
        (f64::NAN, f64::NAN, false)
    } else {
        let fr = FrInputs::new(r, m_q, n_q, c_n)?;
        match fr_statistic(&fr) {
            Ok(w) => {
                let p = p_value(w);
                (w, p, p < cfg.alpha)
            }
            Err(CoreError::DegenerateVariance) => {
                degenerate = true;
                (f64::NAN, f64::NAN, false)
            }
            Err(e) => return Err(e.into()),
        }
    };

    Ok(TestOutcome {
        r,
        m_q,
        n_q,
        c_n,
        w,
        p,
        reject,
        degenerate,
        oracle_calls: oracle.calls(),
    })
}
