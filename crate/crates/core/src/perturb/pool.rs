//! Pre-generation: a fixed pool of `N` uniform values read as a wrap-around
//! stream. Reading `d` values at a time and carrying the leftovers into the
//! next perturbation is the same as a cursor that advances by `d` mod `N`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::array::is_pow2_minus_one;
use crate::error::{Error, Result};
use crate::modscale::{expected_gaussian_norm, exponent_to_i8, pow2, round_pow2, scale_factor};
use crate::rng::{word_to_unit, SplitMix64};

pub const DEFAULT_POOL_SIZE: usize = (1 << 12) - 1;
pub const DEFAULT_VALUE_BITS: u32 = 12;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PoolScaling {
    /// One power-of-two exponent per start offset, exact on the host.
    #[default]
    PerOffset,
    /// A single factor from the pool's mean square; cheaper, not norm-exact.
    GlobalRms,
}

#[derive(Debug, Clone, PartialEq)]
enum OffsetScales {
    PerOffset(Vec<i8>),
    Global(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RandomPool {
    raw: Vec<f64>,
    cursor: usize,
    value_bits: u32,
    scaling: PoolScaling,
    tables: BTreeMap<usize, OffsetScales>,
}

/// Pool of `size` values scaled for perturbations of length `d`.
pub fn pool_build(master_seed: u64, size: usize, d: usize) -> Result<RandomPool> {
    RandomPool::build(
        master_seed,
        size,
        DEFAULT_VALUE_BITS,
        &[d],
        PoolScaling::PerOffset,
    )
}

impl RandomPool {
    pub fn build(
        master_seed: u64,
        size: usize,
        value_bits: u32,
        dims: &[usize],
        scaling: PoolScaling,
    ) -> Result<Self> {
        if !is_pow2_minus_one(size) || size < 3 {
            return Err(Error::InvalidSize(size));
        }
        if !(2..=32).contains(&value_bits) {
            return Err(Error::InvalidConfig(format!(
                "pool value bits {value_bits} outside [2, 32]"
            )));
        }
        let mut src = SplitMix64::new(master_seed);
        let raw: Vec<f64> = (0..size)
            .map(|_| word_to_unit((src.next_u64() >> (64 - value_bits)) as u32, value_bits))
            .collect();
        let mut pool = Self {
            raw,
            cursor: 0,
            value_bits,
            scaling,
            tables: BTreeMap::new(),
        };
        for &d in dims {
            if d == 0 {
                return Err(Error::InvalidConfig(
                    "pool dimension must be at least 1".into(),
                ));
            }
            if !pool.tables.contains_key(&d) {
                let t = pool.scales_for(d)?;
                pool.tables.insert(d, t);
            }
        }
        Ok(pool)
    }

    fn scales_for(&self, d: usize) -> Result<OffsetScales> {
        let expected = expected_gaussian_norm(d);
        let n = self.raw.len();
        match self.scaling {
            PoolScaling::GlobalRms => {
                let mean_sq = self.raw.iter().map(|x| x * x).sum::<f64>() / n as f64;
                Ok(OffsetScales::Global(scale_factor(
                    expected,
                    (mean_sq * d as f64).sqrt(),
                )?))
            }
            PoolScaling::PerOffset => {
                let mut prefix = Vec::with_capacity(2 * n + 1);
                prefix.push(0.0);
                let mut acc = 0.0;
                for i in 0..2 * n {
                    let x = self.raw[i % n];
                    acc += x * x;
                    prefix.push(acc);
                }
                let total = prefix[n];
                let (wraps, rem) = (d / n, d % n);
                (0..n)
                    .map(|o| {
                        let sq = wraps as f64 * total + (prefix[o + rem] - prefix[o]);
                        let s = scale_factor(expected, sq.sqrt())?;
                        exponent_to_i8(round_pow2(s)?)
                    })
                    .collect::<Result<Vec<_>>>()
                    .map(OffsetScales::PerOffset)
            }
        }
    }

    pub fn size(&self) -> usize {
        self.raw.len()
    }

    pub fn cursor(&self) -> usize {
        self.cursor
    }

    pub fn value_bits(&self) -> u32 {
        self.value_bits
    }

    pub fn scaling(&self) -> PoolScaling {
        self.scaling
    }

    pub fn raw_values(&self) -> &[f64] {
        &self.raw
    }

    pub fn dimensions(&self) -> impl Iterator<Item = usize> + '_ {
        self.tables.keys().copied()
    }

    /// Stored exponent for a window of length `d` starting at `offset`.
    pub fn offset_exponent(&self, d: usize, offset: usize) -> Option<i8> {
        match self.tables.get(&d)? {
            OffsetScales::PerOffset(t) => t.get(offset).copied(),
            OffsetScales::Global(_) => None,
        }
    }

    /// Unscaled wrap-around read of length `d` starting at `offset`.
    pub fn window(&self, offset: usize, d: usize) -> Vec<f64> {
        let n = self.raw.len();
        (0..d).map(|i| self.raw[(offset + i) % n]).collect()
    }

    fn scale_at(&self, d: usize) -> Result<f64> {
        match self.tables.get(&d) {
            Some(OffsetScales::PerOffset(t)) => Ok(pow2(t[self.cursor] as i32)),
            Some(OffsetScales::Global(s)) => Ok(*s),
            None => Err(Error::DimensionMismatch {
                expected: self.tables.keys().next().copied().unwrap_or(0),
                got: d,
            }),
        }
    }

    /// Streams the scaled window at the cursor, then advances it by `d`.
    pub fn stream_perturbation(&mut self, d: usize, mut out: impl FnMut(f64)) -> Result<()> {
        let scale = self.scale_at(d)?;
        let n = self.raw.len();
        let mut i = self.cursor;
        for _ in 0..d {
            out(self.raw[i] * scale);
            i += 1;
            if i == n {
                i = 0;
            }
        }
        self.cursor = (self.cursor + d) % n;
        Ok(())
    }

    pub fn next_perturbation(&mut self, d: usize) -> Result<Vec<f64>> {
        let mut v = Vec::with_capacity(d);
        self.stream_perturbation(d, |x| v.push(x))?;
        Ok(v)
    }

    pub(crate) fn set_cursor(&mut self, cursor: usize) -> Result<()> {
        if cursor >= self.raw.len() {
            return Err(Error::CorruptSnapshot);
        }
        self.cursor = cursor;
        Ok(())
    }
}
