use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::estimator::{estimate_gradient, zo_sgd_step};
use super::params::ParameterVector;
use super::ZoConfig;
use crate::error::{Error, Result};
use crate::perturb::{resource_report, PerturbationProvider, ProviderKind, ResourceProxyReport};
use crate::rng::{derive_seed, SplitMix64};
use crate::tasks::{Split, Task};

const BATCH_STREAM: u64 = 0x4241_5443;

/// Consecutive non-finite steps after which a run is declared diverged.
pub const DIVERGENCE_PATIENCE: u32 = 10;

/// A finite loss above `BLOWUP_FACTOR * max(initial_loss, 1)` also counts as
/// divergence. Far from the optimum `θ ± εu` rounds back to `θ`, so a blown-up
/// run can stall at a huge but finite loss instead of overflowing.
pub const BLOWUP_FACTOR: f64 = 1e6;

/// JSON has no NaN or infinities; write them as strings and accept both forms.
pub(crate) mod real {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else if x.is_nan() {
            s.serialize_str("NaN")
        } else if *x > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(x) => Ok(x),
            Repr::Text(t) => match t.as_str() {
                "NaN" => Ok(f64::NAN),
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                other => Err(serde::de::Error::custom(format!("not a number: {other}"))),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossPoint {
    pub step: u64,
    #[serde(with = "real")]
    pub loss: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalPoint {
    pub step: u64,
    /// Loss over the full training split.
    #[serde(with = "real")]
    pub loss: f64,
    /// Task metric on the test split.
    #[serde(with = "real")]
    pub metric: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub task: String,
    pub provider: ProviderKind,
    pub dimension: usize,
    pub steps_run: u64,
    pub diverged: bool,
    pub metric_name: String,
    #[serde(with = "real")]
    pub initial_loss: f64,
    #[serde(with = "real")]
    pub final_loss: f64,
    #[serde(with = "real")]
    pub final_metric: f64,
    /// Per step, the mean of the two perturbed batch losses (averaged over queries).
    pub loss_curve: Vec<LossPoint>,
    pub eval_curve: Vec<EvalPoint>,
    pub provider_stats: ResourceProxyReport,
    /// Not serialized, so emitted reports stay reproducible.
    #[serde(skip)]
    pub wall_time: f64,
}

impl TrainReport {
    pub fn converged(&self) -> bool {
        !self.diverged
    }
}

/// Runs `cfg.steps` estimate-and-update steps from the task's initial point.
pub fn train(
    task: &dyn Task,
    provider: &mut PerturbationProvider,
    cfg: &ZoConfig,
) -> Result<TrainReport> {
    let theta = task.initial_params();
    train_from(task, theta, provider, cfg).map(|(r, _)| r)
}

/// Like [`train`], from an explicit starting point; returns the final parameters too.
pub fn train_from(
    task: &dyn Task,
    mut theta: ParameterVector,
    provider: &mut PerturbationProvider,
    cfg: &ZoConfig,
) -> Result<(TrainReport, ParameterVector)> {
    cfg.validate()?;
    if provider.dimension() != task.dimension() || theta.dim() != task.dimension() {
        return Err(Error::DimensionMismatch {
            expected: task.dimension(),
            got: provider.dimension().max(theta.dim()),
        });
    }
    let started = Instant::now();
    let n = task.train_len();
    let mut batches = SplitMix64::new(derive_seed(cfg.master_seed, BATCH_STREAM));
    let mut batch: Vec<usize> = (0..n).collect();
    let mut pool: Vec<usize> = (0..n).collect();

    let initial_loss = task.train_loss(theta.values());
    let blowup = BLOWUP_FACTOR * initial_loss.abs().max(1.0);
    let mut loss_curve = Vec::with_capacity(cfg.steps as usize);
    let mut eval_curve = Vec::new();
    let mut bad_streak = 0u32;
    let mut diverged = false;
    let mut steps_run = 0;

    for step in 1..=cfg.steps {
        if n > cfg.batch_size {
            // partial Fisher-Yates: the first batch_size slots are a uniform draw
            for i in 0..cfg.batch_size {
                let j = i + batches.next_below((n - i) as u64) as usize;
                pool.swap(i, j);
            }
            batch.clear();
            batch.extend_from_slice(&pool[..cfg.batch_size]);
        }
        steps_run = step;
        match estimate_gradient(|t| task.loss(t, &batch), &mut theta, provider, cfg) {
            Ok(grads) => {
                let mean = grads.iter().map(|g| g.mean_loss()).sum::<f64>() / grads.len() as f64;
                loss_curve.push(LossPoint { step, loss: mean });
                zo_sgd_step(&mut theta, &grads, cfg, provider)?;
                bad_streak = 0;
                if !theta.is_finite() || mean > blowup {
                    diverged = true;
                }
            }
            Err(Error::NonFiniteLoss { .. }) => {
                loss_curve.push(LossPoint {
                    step,
                    loss: f64::NAN,
                });
                bad_streak += 1;
                if bad_streak >= DIVERGENCE_PATIENCE {
                    diverged = true;
                }
            }
            Err(e) => return Err(e),
        }
        if step % cfg.eval_every == 0 || diverged {
            eval_curve.push(EvalPoint {
                step,
                loss: task.train_loss(theta.values()),
                metric: task.metric(theta.values(), Split::Test),
            });
        }
        if diverged {
            break;
        }
    }

    let final_loss = task.train_loss(theta.values());
    let final_metric = task.metric(theta.values(), Split::Test);
    let report = TrainReport {
        task: task.name().to_string(),
        provider: provider.kind(),
        dimension: task.dimension(),
        steps_run,
        diverged,
        metric_name: task.metric_name().to_string(),
        initial_loss,
        final_loss,
        final_metric,
        loss_curve,
        eval_curve,
        provider_stats: resource_report(provider.config(), provider.segments())?,
        wall_time: started.elapsed().as_secs_f64(),
    };
    Ok((report, theta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perturb::ProviderConfig;
    use crate::tasks::quadratic_task;

    fn bowl_cfg() -> ZoConfig {
        ZoConfig {
            epsilon: 1e-3,
            lr: 0.05,
            steps: 2000,
            ..ZoConfig::default()
        }
    }

    fn run(pc: &ProviderConfig, cfg: &ZoConfig) -> TrainReport {
        let task = quadratic_task(20, 1.0, 0);
        let mut p =
            PerturbationProvider::new(pc, &task.segment_lengths(), cfg.master_seed).unwrap();
        train(&task, &mut p, cfg).unwrap()
    }

    #[test]
    fn gaussian_converges_on_bowl() {
        let r = run(&ProviderConfig::gaussian(), &bowl_cfg());
        assert!(!r.diverged);
        assert!(r.final_loss < 1e-2, "{}", r.final_loss);
        assert_eq!(r.eval_curve.len(), 40);
        assert_eq!(r.steps_run, 2000);
    }

    #[test]
    fn raw_integers_fail_on_bowl() {
        let pc = ProviderConfig::new(ProviderKind::UniformInt);
        let r = run(&pc, &bowl_cfg());
        assert!(r.final_loss > r.initial_loss);
        assert!(r.diverged);
        assert!(r.steps_run < 2000);
    }

    #[test]
    fn repeat_runs_are_identical() {
        let pc = ProviderConfig::pool(255);
        let cfg = ZoConfig {
            steps: 300,
            ..bowl_cfg()
        };
        let a = run(&pc, &cfg);
        let b = run(&pc, &cfg);
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    #[test]
    fn report_round_trips_through_json() {
        let mut r = run(
            &ProviderConfig::gaussian(),
            &ZoConfig {
                steps: 20,
                eval_every: 10,
                ..bowl_cfg()
            },
        );
        r.final_metric = f64::NAN;
        r.final_loss = f64::INFINITY;
        let text = serde_json::to_string(&r).unwrap();
        let back: TrainReport = serde_json::from_str(&text).unwrap();
        assert!(back.final_metric.is_nan());
        assert_eq!(back.final_loss, f64::INFINITY);
        assert_eq!(back.loss_curve, r.loss_curve);
    }

    #[test]
    fn dimension_checked() {
        let task = quadratic_task(5, 1.0, 0);
        let mut p = PerturbationProvider::new(&ProviderConfig::gaussian(), &[6], 0).unwrap();
        assert!(matches!(
            train(&task, &mut p, &bowl_cfg()),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
