//! Run configuration: optional TOML file plus flag overrides, resolved
//! into the synthetic-data spec and experiment settings. Unknown keys
//! are rejected and every diagnostic names the offending key.

use std::path::Path;

use le2st_core::posterior::TrainConfig;
use le2st_core::query::QueryScheme;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::pipeline::ExperimentConfig;
use crate::synth::{SyntheticKind, SyntheticSpec};

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialConfig {
    pub kind: Option<String>,
    pub n_total: Option<usize>,
    pub d: Option<usize>,
    pub delta1: Option<f64>,
    pub delta2: Option<f64>,
    pub sigma: Option<f64>,
    #[serde(rename = "Q")]
    pub q: Option<usize>,
    #[serde(rename = "Q_max")]
    pub q_max: Option<usize>,
    pub alpha: Option<f64>,
    pub scheme: Option<String>,
    pub trials: Option<usize>,
    pub master_seed: Option<u64>,
    pub learning_rate: Option<f64>,
    pub iterations: Option<u32>,
    pub l2_penalty: Option<f64>,
    pub cv_folds: Option<usize>,
}

impl PartialConfig {
    pub fn from_toml_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    /// Keys set in `overrides` win over `self`.
    pub fn overlay(mut self, overrides: PartialConfig) -> PartialConfig {
        macro_rules! take {
            ($field:ident) => {
                if overrides.$field.is_some() {
                    self.$field = overrides.$field;
                }
            };
        }
        take!(kind);
        take!(n_total);
        take!(d);
        take!(delta1);
        take!(delta2);
        take!(sigma);
        take!(q);
        take!(q_max);
        take!(alpha);
        take!(scheme);
        take!(trials);
        take!(master_seed);
        take!(learning_rate);
        take!(iterations);
        take!(l2_penalty);
        take!(cv_folds);
        self
    }

    /// Just the data spec, for commands that never run the pipeline.
    pub fn resolve_spec(&self) -> Result<SyntheticSpec> {
        let kind_text = self
            .kind
            .as_deref()
            .ok_or_else(|| Error::Config("missing required key `kind`".into()))?;
        let kind: SyntheticKind = kind_text
            .parse()
            .map_err(|_| Error::Config(format!("invalid value for key `kind`: `{kind_text}`")))?;
        let n_total = self
            .n_total
            .ok_or_else(|| Error::Config("missing required key `n_total`".into()))?;
        let mut spec = SyntheticSpec::new(kind, n_total, self.d.unwrap_or(2), self.master_seed.unwrap_or(0));
        if let Some(delta1) = self.delta1 {
            spec.delta1 = delta1;
        }
        if let Some(delta2) = self.delta2 {
            spec.delta2 = delta2;
        }
        if let Some(sigma) = self.sigma {
            spec.sigma = sigma;
        }
        spec.validate().map_err(|e| Error::Config(e.to_string()))?;
        Ok(spec)
    }

    /// Fills defaults, checks ranges, and builds the concrete configs.
    /// `require_scheme` is off for commands that run every scheme.
    pub fn resolve(&self, require_scheme: bool) -> Result<ResolvedConfig> {
        let kind_text = self
            .kind
            .as_deref()
            .ok_or_else(|| Error::Config("missing required key `kind`".into()))?;
        let kind: SyntheticKind = kind_text
            .parse()
            .map_err(|_| Error::Config(format!("invalid value for key `kind`: `{kind_text}`")))?;
        let n_total = self
            .n_total
            .ok_or_else(|| Error::Config("missing required key `n_total`".into()))?;
        let q_max = self
            .q_max
            .ok_or_else(|| Error::Config("missing required key `Q_max`".into()))?;
        let scheme = match (&self.scheme, require_scheme) {
            (Some(text), _) => text.parse::<QueryScheme>().map_err(|_| {
                Error::Config(format!("invalid value for key `scheme`: `{text}`"))
            })?,
            (None, true) => return Err(Error::Config("missing required key `scheme`".into())),
            (None, false) => QueryScheme::Bimodal,
        };

        let d = self.d.unwrap_or(2);
        let q = self.q.unwrap_or(30);
        let alpha = self.alpha.unwrap_or(0.05);
        let trials = self.trials.unwrap_or(200);
        let master_seed = self.master_seed.unwrap_or(0);

        if n_total < 4 {
            return Err(Error::Config("invalid value for key `n_total`: need at least 4".into()));
        }
        if d == 0 {
            return Err(Error::Config("invalid value for key `d`: need at least 1".into()));
        }
        if q == 0 {
            return Err(Error::Config("invalid value for key `Q`: need at least 1".into()));
        }
        if q > q_max {
            return Err(Error::Config("invalid value for key `Q_max`: must be at least Q".into()));
        }
        if q_max > n_total {
            return Err(Error::Config(
                "invalid value for key `Q_max`: must not exceed n_total".into(),
            ));
        }
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::Config(
                "invalid value for key `alpha`: must lie in (0, 1)".into(),
            ));
        }
        if trials == 0 {
            return Err(Error::Config("invalid value for key `trials`: need at least 1".into()));
        }

        let mut spec = SyntheticSpec::new(kind, n_total, d, master_seed);
        if let Some(delta1) = self.delta1 {
            spec.delta1 = delta1;
        }
        if let Some(delta2) = self.delta2 {
            spec.delta2 = delta2;
        }
        if let Some(sigma) = self.sigma {
            spec.sigma = sigma;
        }
        spec.validate().map_err(|e| Error::Config(e.to_string()))?;

        let train = TrainConfig {
            learning_rate: self.learning_rate.unwrap_or(0.1),
            iterations: self.iterations.unwrap_or(500),
            l2_penalty: self.l2_penalty.unwrap_or(1e-3),
            cv_folds: self.cv_folds.unwrap_or(3),
            seed: 0,
        };
        train
            .validate()
            .map_err(|e| Error::Config(e.to_string()))?;

        let experiment = ExperimentConfig {
            q,
            q_max,
            alpha,
            scheme,
            trials,
            train,
            master_seed,
        };
        Ok(ResolvedConfig { spec, experiment })
    }
}

#[derive(Debug, Clone)]
pub struct ResolvedConfig {
    pub spec: SyntheticSpec,
    pub experiment: ExperimentConfig,
}
