//! Bit-exact random primitives: hardware-style LFSR words and the software
//! streams used by the Gaussian baseline and host-side pool generation.

mod gaussian;
mod lfsr;
mod splitmix;

pub use gaussian::{gaussian_next, GaussianStream};
pub use lfsr::{
    default_taps, lfsr_period, lfsr_step, word_to_signed, word_to_unit, LfsrSpec, LfsrState,
    MAX_BITS, MIN_BITS,
};
pub use splitmix::{derive_seed, SplitMix64};
