//! Perturbation providers: the two reuse strategies (pre-generated pool and
//! on-the-fly LFSR array) plus the full-distribution baselines, all with
//! snapshot/replay so perturbations are regenerated instead of stored.

mod array;
mod pool;
mod provider;
mod resources;

pub use array::{ArraySpec, RngArray};
pub use pool::{pool_build, PoolScaling, RandomPool, DEFAULT_POOL_SIZE, DEFAULT_VALUE_BITS};
pub use provider::{PerturbationProvider, ProviderConfig, ProviderKind, Snapshot};
pub use resources::{resource_report, ResourceProxyReport, EXPONENT_BITS};
