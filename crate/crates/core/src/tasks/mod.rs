//! Loss oracles and datasets for desk-scale experiments.

mod classify;
mod data;
mod fewshot;
mod quadratic;

pub use classify::{logistic_task, mlp_task, ClassifierTask};
pub use data::{ingest_csv, synthetic_blobs, BlobSpec, Dataset, Standardizer, VARIANCE_FLOOR};
pub use fewshot::{few_shot_sample, FewShotSpec, FewShotSplits};
pub use quadratic::{quadratic_task, QuadraticTask};

use serde::{Deserialize, Serialize};

use crate::engine::ParameterVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Validation,
    Test,
}

/// An objective the engine can query. Implementations must be pure: the same
/// parameters and batch give the same bits.
pub trait Task: Send + Sync {
    fn name(&self) -> &str;

    /// Named parameter segments in storage order.
    fn layout(&self) -> &[(String, usize)];

    fn dimension(&self) -> usize {
        self.layout().iter().map(|s| s.1).sum()
    }

    fn segment_lengths(&self) -> Vec<usize> {
        self.layout().iter().map(|s| s.1).collect()
    }

    fn initial_params(&self) -> ParameterVector;

    /// Training rows available for batching; 0 when the loss takes no data.
    fn train_len(&self) -> usize;

    /// Mean loss over `batch`, indices into the training split.
    fn loss(&self, theta: &[f64], batch: &[usize]) -> f64;

    /// Loss over the whole training split.
    fn train_loss(&self, theta: &[f64]) -> f64 {
        let all: Vec<usize> = (0..self.train_len()).collect();
        self.loss(theta, &all)
    }

    fn metric(&self, theta: &[f64], split: Split) -> f64;

    fn metric_name(&self) -> &'static str;
}
