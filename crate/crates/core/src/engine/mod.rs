//! Two-point zeroth-order gradient estimation and the ZO-SGD loop.
//!
//! Directions are never stored: each query records a provider snapshot and
//! the direction is regenerated from it whenever it has to be applied.

mod estimator;
mod params;
mod train;

pub use estimator::{estimate_gradient, perturb, zo_sgd_step, QueryResult};
pub use params::{to_grid, ParameterVector, Segment, GRID_BITS};
pub use train::{
    train, train_from, EvalPoint, LossPoint, TrainReport, BLOWUP_FACTOR, DIVERGENCE_PATIENCE,
};

pub(crate) use train::real;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn default_q() -> usize {
    1
}
fn default_batch_size() -> usize {
    32
}
fn default_eval_every() -> u64 {
    50
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZoConfig {
    pub epsilon: f64,
    pub lr: f64,
    #[serde(default = "default_q")]
    pub q: usize,
    pub steps: u64,
    #[serde(default = "default_batch_size")]
    pub batch_size: usize,
    #[serde(default = "default_eval_every")]
    pub eval_every: u64,
    #[serde(default)]
    pub master_seed: u64,
    /// Store each direction instead of replaying it; for differential tests.
    #[serde(default)]
    pub materialize: bool,
}

impl Default for ZoConfig {
    fn default() -> Self {
        Self {
            epsilon: 1e-3,
            lr: 1e-3,
            q: default_q(),
            steps: 1000,
            batch_size: default_batch_size(),
            eval_every: default_eval_every(),
            master_seed: 0,
            materialize: false,
        }
    }
}

impl ZoConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return bad("epsilon must be positive");
        }
        if !(self.lr > 0.0 && self.lr.is_finite()) {
            return bad("lr must be positive");
        }
        if self.q == 0 {
            return bad("q must be at least 1");
        }
        if self.batch_size == 0 || self.eval_every == 0 {
            return bad("batch_size and eval_every must be at least 1");
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(ZoConfig::default().validate().is_ok());
        for c in [
            ZoConfig {
                epsilon: 0.0,
                ..Default::default()
            },
            ZoConfig {
                lr: -1.0,
                ..Default::default()
            },
            ZoConfig {
                q: 0,
                ..Default::default()
            },
            ZoConfig {
                epsilon: f64::NAN,
                ..Default::default()
            },
        ] {
            assert!(c.validate().is_err());
        }
    }
}
