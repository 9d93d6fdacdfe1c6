//! Adaptive modulus scaling.
//!
//! A uniform perturbation `u` is rescaled so its 2-norm equals the expected
//! norm of a same-dimension standard Gaussian vector. Factors are rounded to
//! powers of two so the device only shifts; for on-the-fly arrays they are
//! precomputed per phase into a [`ScaleLut`].

mod gamma;
mod lut;

pub use gamma::{
    expected_gaussian_norm, expected_gaussian_norm_direct, gamma_half_integer, log_gamma,
};
pub use lut::{build_scale_lut, LutRegistry, PhaseEntry, ScaleLut};

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

use crate::error::{Error, Result};

/// `expected_norm / actual_norm`.
pub fn scale_factor(expected_norm: f64, actual_norm: f64) -> Result<f64> {
    if actual_norm == 0.0 {
        return Err(Error::ZeroNorm);
    }
    Ok(expected_norm / actual_norm)
}

/// Nearest power-of-two exponent of `s`, ties rounded up, so that
/// `s / 2^e` lies in `[2^-1/2, 2^1/2)`.
pub fn round_pow2(s: f64) -> Result<i32> {
    if !s.is_finite() || s <= 0.0 {
        return Err(Error::Domain {
            func: "round_pow2",
            value: s,
        });
    }
    let mut e = (s.log2() + 0.5).floor() as i32;
    // log2 can be off by an ulp near a band edge
    loop {
        let r = s / pow2(e);
        if r >= SQRT_2 {
            e += 1;
        } else if r < FRAC_1_SQRT_2 {
            e -= 1;
        } else {
            return Ok(e);
        }
    }
}

/// Exact `2^e` for exponents in the normal range.
pub fn pow2(e: i32) -> f64 {
    2f64.powi(e)
}

pub(crate) fn exponent_to_i8(e: i32) -> Result<i8> {
    i8::try_from(e).map_err(|_| Error::ExponentRange(e))
}

#[cfg(test)]
pub(crate) fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}
