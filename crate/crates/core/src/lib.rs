//! Zeroth-order optimization with hardware-friendly perturbations.
//!
//! The crate replaces per-weight Gaussian noise with a small set of uniform
//! random numbers that are reused across weights, either from a pre-generated
//! pool or from an array of LFSRs, and rescales every perturbation so its norm
//! matches a same-dimension Gaussian vector.
//!
//! - [`rng`]: LFSR generators and the software Gaussian/uniform streams.
//! - [`modscale`]: expected Gaussian norm, power-of-two factors, scale LUTs.
//! - [`perturb`]: perturbation providers with snapshot/replay.
//! - [`engine`]: two-point gradient estimation and ZO-SGD.
//! - [`tasks`]: quadratic, logistic and MLP objectives with few-shot splits.
//! - [`bench`]: experiment configs, runs, sweeps, comparisons and reports.
//!
//! ```
//! use zoperturb::engine::{train, ZoConfig};
//! use zoperturb::perturb::{PerturbationProvider, ProviderConfig};
//! use zoperturb::tasks::{quadratic_task, Task};
//!
//! let task = quadratic_task(20, 1.0, 0);
//! let mut provider = PerturbationProvider::new(&ProviderConfig::otf(31, 8), &task.segment_lengths(), 1)?;
//! let cfg = ZoConfig { lr: 0.05, steps: 500, ..ZoConfig::default() };
//! let report = train(&task, &mut provider, &cfg)?;
//! assert!(report.final_loss < 1e-2 * report.initial_loss);
//! # Ok::<(), zoperturb::Error>(())
//! ```

pub mod bench;
pub mod engine;
mod error;
pub mod modscale;
pub mod perturb;
pub mod rng;
pub mod tasks;

pub use error::{Error, Result};
