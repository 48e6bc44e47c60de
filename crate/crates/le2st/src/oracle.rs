//! The metered label source. Everything downstream of data generation
//! learns labels only by calling [`LabelOracle::query`], which counts.

use std::collections::BTreeMap;

use le2st_core::Error as CoreError;

use crate::error::Result;

/// Hides the true id-to-label map behind a monotone call counter.
#[derive(Debug, Clone)]
pub struct LabelOracle {
    labels: BTreeMap<usize, bool>,
    calls: u64,
}

impl LabelOracle {
    pub fn new(labels: BTreeMap<usize, bool>) -> Self {
        Self { labels, calls: 0 }
    }

    /// Returns the label of `id` and increments the call counter.
    pub fn query(&mut self, id: usize) -> Result<bool> {
        let label = self
            .labels
            .get(&id)
            .copied()
            .ok_or_else(|| CoreError::InvalidInput(format!("oracle knows no point {id}")))?;
        self.calls += 1;
        Ok(label)
    }

    /// Queries made so far.
    pub fn calls(&self) -> u64 {
        self.calls
    }

    /// Label without spending a call. For diagnostics and debug dumps
    /// only; the pipeline itself never uses this.
    pub fn peek(&self, id: usize) -> Option<bool> {
        self.labels.get(&id).copied()
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}
