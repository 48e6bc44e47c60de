//! Posterior modelling for the seed stage: L2-regularized logistic
//! regression fit by full-batch gradient descent, plus sigmoid
//! calibration in the style of Platt (1999) fitted on cross-validated
//! scores for base classifiers whose raw output is an uncalibrated
//! margin.
//!
//! Logistic regression already outputs probabilities, so the calibrated
//! path is optional; the trainer returns an uncalibrated model and
//! [`train_platt_calibrated`] layers the sigmoid on top when wanted.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::math;

/// Posteriors are clamped to `[CLAMP, 1 - CLAMP]`.
pub const POSTERIOR_CLAMP: f64 = 1e-12;

/// Training hyperparameters. `seed` drives fold shuffling for
/// cross-validated calibration; plain training is deterministic anyway.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub iterations: u32,
    pub l2_penalty: f64,
    pub cv_folds: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.1,
            iterations: 500,
            l2_penalty: 1e-3,
            cv_folds: 3,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.learning_rate.is_finite() || self.learning_rate <= 0.0 {
            return Err(Error::InvalidInput("learning_rate must be positive".into()));
        }
        if !self.l2_penalty.is_finite() || self.l2_penalty < 0.0 {
            return Err(Error::InvalidInput("l2_penalty must be nonnegative".into()));
        }
        if self.cv_folds < 2 {
            return Err(Error::InvalidInput("cv_folds must be at least 2".into()));
        }
        Ok(())
    }
}

/// A linear scorer with an optional calibration sigmoid `(a, b)` mapping
/// the raw score `f` to `1 / (1 + exp(a f + b))`.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorModel {
    weights: Vec<f64>,
    bias: f64,
    calibration: Option<(f64, f64)>,
}

impl PosteriorModel {
    /// Untrained model in `dim` dimensions; every posterior is 0.5.
    pub fn constant(dim: usize) -> Self {
        Self {
            weights: vec![0.0; dim],
            bias: 0.0,
            calibration: None,
        }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    pub fn calibration(&self) -> Option<(f64, f64)> {
        self.calibration
    }

    pub fn with_calibration(mut self, a: f64, b: f64) -> Self {
        self.calibration = Some((a, b));
        self
    }

    /// Linear score `w . x + b`.
    pub fn raw_score(&self, point: &[f64]) -> Result<f64> {
        if point.len() != self.weights.len() {
            return Err(Error::DimensionMismatch {
                expected: self.weights.len(),
                actual: point.len(),
            });
        }
        let dot: f64 = self.weights.iter().zip(point).map(|(w, x)| w * x).sum();
        Ok(dot + self.bias)
    }

    /// `P(z = 1 | point)`, clamped away from 0 and 1.
    pub fn posterior(&self, point: &[f64]) -> Result<f64> {
        let score = self.raw_score(point)?;
        let p = match self.calibration {
            None => sigmoid(score),
            Some((a, b)) => sigmoid(-(a * score + b)),
        };
        Ok(p.clamp(POSTERIOR_CLAMP, 1.0 - POSTERIOR_CLAMP))
    }
}

pub(crate) fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + math::exp(-t))
    } else {
        let e = math::exp(t);
        e / (1.0 + e)
    }
}

fn check_shape(features: &[f64], dim: usize, labels: &[bool]) -> Result<()> {
    if dim == 0 {
        return Err(Error::InvalidInput("dimension must be at least 1".into()));
    }
    if labels.is_empty() {
        return Err(Error::InvalidInput("no training examples".into()));
    }
    if features.len() != labels.len() * dim {
        return Err(Error::InvalidInput(format!(
            "{} coordinates do not match {} examples of dimension {dim}",
            features.len(),
            labels.len()
        )));
    }
    if !features.iter().all(|x| x.is_finite()) {
        return Err(Error::InvalidInput("non-finite feature".into()));
    }
    Ok(())
}

fn has_both_classes(labels: &[bool]) -> bool {
    labels.iter().any(|&z| z) && labels.iter().any(|&z| !z)
}

/// Mean logistic loss plus `l2/2 ||w||^2` (bias unpenalized).
pub fn logistic_loss(
    features: &[f64],
    dim: usize,
    labels: &[bool],
    weights: &[f64],
    bias: f64,
    l2_penalty: f64,
) -> f64 {
    let mut total = 0.0;
    for (row, &z) in features.chunks_exact(dim).zip(labels) {
        let s: f64 = weights.iter().zip(row).map(|(w, x)| w * x).sum::<f64>() + bias;
        // ln(1 + e^s) - z s without overflow on either tail
        let softplus = if s > 0.0 {
            s + math::ln(1.0 + math::exp(-s))
        } else {
            math::ln(1.0 + math::exp(s))
        };
        total += softplus - if z { s } else { 0.0 };
    }
    total / labels.len() as f64
        + 0.5 * l2_penalty * weights.iter().map(|w| w * w).sum::<f64>()
}

/// Gradient of [`logistic_loss`] in `(weights, bias)`.
pub fn logistic_gradient(
    features: &[f64],
    dim: usize,
    labels: &[bool],
    weights: &[f64],
    bias: f64,
    l2_penalty: f64,
) -> (Vec<f64>, f64) {
    let mut grad_w = vec![0.0; dim];
    let mut grad_b = 0.0;
    for (row, &z) in features.chunks_exact(dim).zip(labels) {
        let s: f64 = weights.iter().zip(row).map(|(w, x)| w * x).sum::<f64>() + bias;
        let residual = sigmoid(s) - if z { 1.0 } else { 0.0 };
        for (g, x) in grad_w.iter_mut().zip(row) {
            *g += residual * x;
        }
        grad_b += residual;
    }
    let inv_n = 1.0 / labels.len() as f64;
    for (g, w) in grad_w.iter_mut().zip(weights) {
        *g = *g * inv_n + l2_penalty * w;
    }
    (grad_w, grad_b * inv_n)
}

/// Fits logistic regression by `cfg.iterations` full-batch gradient steps
/// from the zero model. Deterministic for a given configuration.
pub fn train_logistic(
    features: &[f64],
    dim: usize,
    labels: &[bool],
    cfg: &TrainConfig,
) -> Result<PosteriorModel> {
    cfg.validate()?;
    check_shape(features, dim, labels)?;
    if !has_both_classes(labels) {
        return Err(Error::DegenerateTraining);
    }
    let mut weights = vec![0.0; dim];
    let mut bias = 0.0;
    for _ in 0..cfg.iterations {
        let (grad_w, grad_b) =
            logistic_gradient(features, dim, labels, &weights, bias, cfg.l2_penalty);
        for (w, g) in weights.iter_mut().zip(&grad_w) {
            *w -= cfg.learning_rate * g;
        }
        bias -= cfg.learning_rate * grad_b;
    }
    Ok(PosteriorModel {
        weights,
        bias,
        calibration: None,
    })
}

/// Out-of-fold raw scores from `cfg.cv_folds` refits: the examples are
/// shuffled by `cfg.seed`, split into strided folds, and each fold is
/// scored by a model trained on its complement.
pub fn cross_validated_scores(
    features: &[f64],
    dim: usize,
    labels: &[bool],
    cfg: &TrainConfig,
) -> Result<Vec<f64>> {
    cfg.validate()?;
    check_shape(features, dim, labels)?;
    let n = labels.len();
    if n < cfg.cv_folds {
        return Err(Error::InvalidInput(format!(
            "{n} examples cannot fill {} folds",
            cfg.cv_folds
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    order.shuffle(&mut rng);

    let mut scores = vec![0.0; n];
    for fold in 0..cfg.cv_folds {
        let held_out: Vec<usize> = order.iter().copied().skip(fold).step_by(cfg.cv_folds).collect();
        let mut in_fold = vec![false; n];
        for &i in &held_out {
            in_fold[i] = true;
        }
        let mut train_features = Vec::with_capacity((n - held_out.len()) * dim);
        let mut train_labels = Vec::with_capacity(n - held_out.len());
        for i in 0..n {
            if !in_fold[i] {
                train_features.extend_from_slice(&features[i * dim..(i + 1) * dim]);
                train_labels.push(labels[i]);
            }
        }
        let model = train_logistic(&train_features, dim, &train_labels, cfg)?;
        for &i in &held_out {
            scores[i] = model.raw_score(&features[i * dim..(i + 1) * dim])?;
        }
    }
    Ok(scores)
}

/// Fits the calibration sigmoid `p(z=1|f) = 1/(1 + exp(a f + b))` to
/// score/label pairs by gradient descent on the log-loss against the
/// smoothed targets `(N+ + 1)/(N+ + 2)` and `1/(N- + 2)`.
pub fn platt_calibrate(scores: &[f64], labels: &[bool], cfg: &TrainConfig) -> Result<(f64, f64)> {
    cfg.validate()?;
    if scores.len() != labels.len() || labels.is_empty() {
        return Err(Error::InvalidInput(
            "scores and labels must be nonempty and equal length".into(),
        ));
    }
    if !scores.iter().all(|s| s.is_finite()) {
        return Err(Error::InvalidInput("non-finite score".into()));
    }
    if !has_both_classes(labels) {
        return Err(Error::DegenerateTraining);
    }
    let n_pos = labels.iter().filter(|&&z| z).count() as f64;
    let n_neg = labels.len() as f64 - n_pos;
    let target_pos = (n_pos + 1.0) / (n_pos + 2.0);
    let target_neg = 1.0 / (n_neg + 2.0);

    let mut a = 0.0;
    let mut b = math::ln((n_neg + 1.0) / (n_pos + 1.0));
    let inv_n = 1.0 / labels.len() as f64;
    for _ in 0..cfg.iterations {
        let mut grad_a = 0.0;
        let mut grad_b = 0.0;
        for (&f, &z) in scores.iter().zip(labels) {
            let p = sigmoid(-(a * f + b));
            let t = if z { target_pos } else { target_neg };
            grad_a += (t - p) * f;
            grad_b += t - p;
        }
        a -= cfg.learning_rate * grad_a * inv_n;
        b -= cfg.learning_rate * grad_b * inv_n;
    }
    Ok((a, b))
}

/// Trains on all examples, then fits the calibration sigmoid on
/// cross-validated out-of-fold scores and attaches it to the model.
pub fn train_platt_calibrated(
    features: &[f64],
    dim: usize,
    labels: &[bool],
    cfg: &TrainConfig,
) -> Result<PosteriorModel> {
    let base = train_logistic(features, dim, labels, cfg)?;
    let scores = cross_validated_scores(features, dim, labels, cfg)?;
    let (a, b) = platt_calibrate(&scores, labels, cfg)?;
    Ok(base.with_calibration(a, b))
}
