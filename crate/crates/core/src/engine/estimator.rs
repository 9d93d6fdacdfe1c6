use super::params::{to_grid, ParameterVector};
use super::ZoConfig;
use crate::error::{Error, Result};
use crate::perturb::{PerturbationProvider, Snapshot};

/// One two-point query: the finite-difference coefficient and where in the
/// provider stream its direction starts.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryResult {
    pub coefficient: f64,
    pub snapshot: Snapshot,
    pub loss_plus: f64,
    pub loss_minus: f64,
    /// The direction itself, kept only in materialize mode.
    pub direction: Option<Vec<f64>>,
}

impl QueryResult {
    pub fn mean_loss(&self) -> f64 {
        0.5 * (self.loss_plus + self.loss_minus)
    }
}

/// Replays the direction at `snapshot` and adds `multiple * to_grid(scale * u)`
/// to every coordinate. The provider is left just past that direction.
pub fn perturb(
    theta: &mut ParameterVector,
    provider: &mut PerturbationProvider,
    snapshot: &Snapshot,
    scale: f64,
    multiple: f64,
) -> Result<()> {
    check_dim(theta, provider)?;
    provider.restore(snapshot)?;
    let t = theta.values_mut();
    provider.stream(|i, u| t[i] += multiple * to_grid(scale * u))
}

fn check_dim(theta: &ParameterVector, provider: &PerturbationProvider) -> Result<()> {
    if theta.dim() != provider.dimension() {
        return Err(Error::DimensionMismatch {
            expected: provider.dimension(),
            got: theta.dim(),
        });
    }
    Ok(())
}

fn apply_stored(theta: &mut ParameterVector, u: &[f64], scale: f64, multiple: f64) {
    for (t, &x) in theta.values_mut().iter_mut().zip(u) {
        *t += multiple * to_grid(scale * x);
    }
}

/// Two-point estimates along `cfg.q` consecutive provider directions.
///
/// Each query evaluates the loss at `θ + εu` and `θ − εu`, perturbing in
/// place, and leaves `θ` bit-identical afterwards. On a non-finite loss the
/// parameters are still restored before the error is returned.
pub fn estimate_gradient(
    mut loss: impl FnMut(&[f64]) -> f64,
    theta: &mut ParameterVector,
    provider: &mut PerturbationProvider,
    cfg: &ZoConfig,
) -> Result<Vec<QueryResult>> {
    check_dim(theta, provider)?;
    let eps = cfg.epsilon;
    let mut out = Vec::with_capacity(cfg.q);
    for _ in 0..cfg.q {
        let snapshot = provider.snapshot();
        let (loss_plus, loss_minus, direction) = if cfg.materialize {
            let u = provider.next_perturbation(theta.dim())?;
            apply_stored(theta, &u, eps, 1.0);
            let lp = loss(theta.values());
            apply_stored(theta, &u, eps, -2.0);
            let lm = loss(theta.values());
            apply_stored(theta, &u, eps, 1.0);
            (lp, lm, Some(u))
        } else {
            perturb(theta, provider, &snapshot, eps, 1.0)?;
            let lp = loss(theta.values());
            perturb(theta, provider, &snapshot, eps, -2.0)?;
            let lm = loss(theta.values());
            perturb(theta, provider, &snapshot, eps, 1.0)?;
            (lp, lm, None)
        };
        if !loss_plus.is_finite() || !loss_minus.is_finite() {
            return Err(Error::NonFiniteLoss {
                step: snapshot.step(),
            });
        }
        out.push(QueryResult {
            coefficient: (loss_plus - loss_minus) / (2.0 * eps),
            snapshot,
            loss_plus,
            loss_minus,
            direction,
        });
    }
    Ok(out)
}

/// `θ ← θ − (η/q) Σ gᵢ uᵢ`, regenerating each `uᵢ` from its snapshot (or
/// using the stored copy in materialize mode). Each query's contribution is
/// rounded to the parameter grid before it is added.
pub fn zo_sgd_step(
    theta: &mut ParameterVector,
    grads: &[QueryResult],
    cfg: &ZoConfig,
    provider: &mut PerturbationProvider,
) -> Result<()> {
    check_dim(theta, provider)?;
    let q = grads.len() as f64;
    for g in grads {
        let scale = -cfg.lr * g.coefficient / q;
        match &g.direction {
            Some(u) => apply_stored(theta, u, scale, 1.0),
            None => perturb(theta, provider, &g.snapshot, scale, 1.0)?,
        }
    }
    // materialized queries already advanced the provider; replayed ones end
    // just past the last direction either way
    Ok(())
}
