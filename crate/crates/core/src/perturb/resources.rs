use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::pool::PoolScaling;
use super::provider::{ProviderConfig, ProviderKind};
use crate::error::{Error, Result};

/// Bits per stored scale exponent.
pub const EXPONENT_BITS: u64 = 8;
const SOFTWARE_STATE_BITS: u64 = 64;

/// Static storage accounting for one provider and parameter layout.
///
/// `stored_bits_total = generator_state_bits + pool_entries * value_bits +
/// lut_valid_entries * exponent_bits`. LUT slot zero is never addressed and
/// is not counted as stored.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceProxyReport {
    pub provider: ProviderKind,
    pub dimension: usize,
    pub generator_count: usize,
    pub bit_width: u32,
    pub generator_state_bits: u64,
    pub pool_entries: usize,
    pub value_bits: u32,
    pub lut_count: usize,
    pub lut_entries: usize,
    pub lut_valid_entries: usize,
    pub exponent_bits: u64,
    pub stored_bits_total: u64,
    pub distinct_random_values_per_step: usize,
}

pub fn resource_report(config: &ProviderConfig, segments: &[usize]) -> Result<ResourceProxyReport> {
    if segments.is_empty() || segments.contains(&0) {
        return Err(Error::InvalidConfig(
            "resource report needs nonempty segments".into(),
        ));
    }
    let d: usize = segments.iter().sum();
    let distinct_dims = segments.iter().collect::<BTreeSet<_>>().len();
    let mut r = ResourceProxyReport {
        provider: config.provider,
        dimension: d,
        generator_count: 1,
        bit_width: 64,
        generator_state_bits: SOFTWARE_STATE_BITS,
        pool_entries: 0,
        value_bits: 0,
        lut_count: 0,
        lut_entries: 0,
        lut_valid_entries: 0,
        exponent_bits: EXPONENT_BITS,
        stored_bits_total: 0,
        distinct_random_values_per_step: d,
    };
    match config.provider {
        ProviderKind::Gaussian | ProviderKind::Rademacher | ProviderKind::UniformRaw => {}
        ProviderKind::UniformInt => {
            r.bit_width = config.bits;
            r.generator_state_bits = config.bits as u64;
        }
        ProviderKind::Pool => {
            r.generator_count = 0;
            r.bit_width = config.value_bits;
            r.generator_state_bits = 0;
            r.pool_entries = config.pool_size;
            r.value_bits = config.value_bits;
            if config.pool_scale == PoolScaling::PerOffset {
                r.lut_count = distinct_dims;
                r.lut_entries = distinct_dims * config.pool_size;
                r.lut_valid_entries = r.lut_entries;
            }
            r.distinct_random_values_per_step = d.min(config.pool_size);
        }
        ProviderKind::Otf => {
            r.generator_count = config.n_rngs;
            r.bit_width = config.bits;
            r.generator_state_bits = config.n_rngs as u64 * config.bits as u64;
            r.lut_count = distinct_dims;
            r.lut_entries = distinct_dims << config.bits;
            r.lut_valid_entries = distinct_dims * ((1usize << config.bits) - 1);
        }
    }
    r.stored_bits_total = r.generator_state_bits
        + r.pool_entries as u64 * r.value_bits as u64
        + r.lut_valid_entries as u64 * r.exponent_bits;
    Ok(r)
}
