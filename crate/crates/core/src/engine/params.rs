use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameters live on a dyadic grid of step `2^-GRID_BITS`. Grid values below
/// `2^(53 - GRID_BITS)` in magnitude add and subtract exactly, so perturbing by
/// a grid-rounded delta and removing it again restores every bit.
pub const GRID_BITS: i32 = 40;

const GRID_SCALE: f64 = (1u64 << GRID_BITS) as f64;

/// Rounds `x` to the parameter grid.
#[inline]
pub fn to_grid(x: f64) -> f64 {
    (x * GRID_SCALE).round() / GRID_SCALE
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub name: String,
    pub offset: usize,
    pub len: usize,
}

/// Flat model parameters plus their per-layer layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterVector {
    values: Vec<f64>,
    layout: Vec<Segment>,
}

impl ParameterVector {
    /// `segments` are `(name, length)` pairs laid out back to back.
    pub fn new<S: AsRef<str>>(values: Vec<f64>, segments: &[(S, usize)]) -> Result<Self> {
        let total: usize = segments.iter().map(|s| s.1).sum();
        if total != values.len() || segments.iter().any(|s| s.1 == 0) {
            return Err(Error::InvalidConfig(format!(
                "layout covers {total} values but the vector has {}",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig("parameters must be finite".into()));
        }
        let mut offset = 0;
        let layout = segments
            .iter()
            .map(|(name, len)| {
                let len = *len;
                let s = Segment {
                    name: name.as_ref().to_string(),
                    offset,
                    len,
                };
                offset += len;
                s
            })
            .collect();
        Ok(Self {
            values: values.into_iter().map(to_grid).collect(),
            layout,
        })
    }

    /// Single-segment vector.
    pub fn flat(values: Vec<f64>) -> Result<Self> {
        let d = values.len();
        Self::new(values, &[("params", d)])
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn layout(&self) -> &[Segment] {
        &self.layout
    }

    pub fn segment_lengths(&self) -> Vec<usize> {
        self.layout.iter().map(|s| s.len).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn to_bits(&self) -> Vec<u64> {
        self.values.iter().map(|v| v.to_bits()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn layout_offsets() {
        let p = ParameterVector::new(vec![0.0; 10], &[("a", 4), ("b", 6)]).unwrap();
        assert_eq!(p.layout()[1].offset, 4);
        assert_eq!(p.segment_lengths(), vec![4, 6]);
        assert!(ParameterVector::new(vec![0.0; 9], &[("a", 4), ("b", 6)]).is_err());
        assert!(ParameterVector::flat(vec![f64::NAN]).is_err());
    }

    proptest! {
        #[test]
        fn grid_addition_round_trips(theta in -4000.0f64..4000.0, delta in -50.0f64..50.0) {
            let t = to_grid(theta);
            let d = to_grid(delta);
            let plus = t + d;
            let minus = plus - 2.0 * d;
            prop_assert_eq!((minus + d).to_bits(), t.to_bits());
            prop_assert_eq!((plus - d).to_bits(), t.to_bits());
        }
    }
}
