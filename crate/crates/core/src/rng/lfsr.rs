//! Fibonacci linear-feedback shift registers.
//!
//! The register shifts left by one each clock; the feedback bit, the XOR of
//! the tapped bits, enters at the LSB. Tap `t` names bit `t - 1` counted from
//! the LSB, so the highest tap `b` is the MSB. One clock emits the whole
//! post-step register as a `b`-bit word.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MIN_BITS: u32 = 4;
pub const MAX_BITS: u32 = 32;

/// Maximal-length tap sets for every supported width.
const DEFAULT_TAPS: [&[u32]; 29] = [
    &[4, 3],
    &[5, 3],
    &[6, 5],
    &[7, 6],
    &[8, 6, 5, 4],
    &[9, 5],
    &[10, 7],
    &[11, 9],
    &[12, 6, 4, 1],
    &[13, 4, 3, 1],
    &[14, 13, 12, 2],
    &[15, 14],
    &[16, 15, 13, 4],
    &[17, 14],
    &[18, 11],
    &[19, 6, 2, 1],
    &[20, 17],
    &[21, 19],
    &[22, 21],
    &[23, 18],
    &[24, 23, 22, 17],
    &[25, 22],
    &[26, 6, 2, 1],
    &[27, 5, 2, 1],
    &[28, 25],
    &[29, 27],
    &[30, 6, 4, 1],
    &[31, 28],
    &[32, 22, 2, 1],
];

/// Shipped maximal-period taps for `bits`, if the width is supported.
pub fn default_taps(bits: u32) -> Option<&'static [u32]> {
    if (MIN_BITS..=MAX_BITS).contains(&bits) {
        Some(DEFAULT_TAPS[(bits - MIN_BITS) as usize])
    } else {
        None
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "LfsrSpecRepr", into = "LfsrSpecRepr")]
pub struct LfsrSpec {
    bit_width: u32,
    taps: Vec<u32>,
    seed: u32,
    tap_mask: u32,
}

#[derive(Serialize, Deserialize)]
struct LfsrSpecRepr {
    bit_width: u32,
    taps: Vec<u32>,
    seed: u32,
}

impl TryFrom<LfsrSpecRepr> for LfsrSpec {
    type Error = Error;

    fn try_from(r: LfsrSpecRepr) -> Result<Self> {
        LfsrSpec::new(r.bit_width, &r.taps, r.seed)
    }
}

impl From<LfsrSpec> for LfsrSpecRepr {
    fn from(s: LfsrSpec) -> Self {
        LfsrSpecRepr {
            bit_width: s.bit_width,
            taps: s.taps,
            seed: s.seed,
        }
    }
}

impl LfsrSpec {
    pub fn new(bit_width: u32, taps: &[u32], seed: u32) -> Result<Self> {
        if !(MIN_BITS..=MAX_BITS).contains(&bit_width) {
            return Err(Error::InvalidLfsr(format!(
                "bit width {bit_width} outside [{MIN_BITS}, {MAX_BITS}]"
            )));
        }
        let mut taps = taps.to_vec();
        taps.sort_unstable_by(|a, b| b.cmp(a));
        taps.dedup();
        if taps.first() != Some(&bit_width) {
            return Err(Error::InvalidLfsr(format!(
                "highest tap must equal the bit width {bit_width}"
            )));
        }
        if taps.iter().any(|&t| t == 0 || t > bit_width) {
            return Err(Error::InvalidLfsr(format!("tap outside [1, {bit_width}]")));
        }
        let mask = mask(bit_width);
        if seed == 0 || seed & !mask != 0 {
            return Err(Error::InvalidLfsr(format!(
                "seed {seed} must be nonzero and below 2^{bit_width}"
            )));
        }
        let tap_mask = taps.iter().fold(0u32, |m, &t| m | 1 << (t - 1));
        Ok(Self {
            bit_width,
            taps,
            seed,
            tap_mask,
        })
    }

    /// Spec with the shipped taps for `bit_width`.
    pub fn with_default_taps(bit_width: u32, seed: u32) -> Result<Self> {
        let taps = default_taps(bit_width)
            .ok_or_else(|| Error::InvalidLfsr(format!("no default taps for {bit_width} bits")))?;
        Self::new(bit_width, taps, seed)
    }

    pub fn bit_width(&self) -> u32 {
        self.bit_width
    }

    pub fn taps(&self) -> &[u32] {
        &self.taps
    }

    pub fn seed(&self) -> u32 {
        self.seed
    }

    /// Same width and taps, different seed.
    pub fn reseeded(&self, seed: u32) -> Result<Self> {
        Self::new(self.bit_width, &self.taps, seed)
    }

    pub fn period_bound(&self) -> u64 {
        (1u64 << self.bit_width) - 1
    }

    fn mask(&self) -> u32 {
        mask(self.bit_width)
    }
}

fn mask(bits: u32) -> u32 {
    if bits == 32 {
        u32::MAX
    } else {
        (1u32 << bits) - 1
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LfsrState {
    spec: LfsrSpec,
    state: u32,
    step_count: u64,
}

impl LfsrState {
    pub fn new(spec: LfsrSpec) -> Self {
        let state = spec.seed;
        Self {
            spec,
            state,
            step_count: 0,
        }
    }

    pub fn spec(&self) -> &LfsrSpec {
        &self.spec
    }

    /// Current register contents (the most recent output word, or the seed).
    pub fn word(&self) -> u32 {
        self.state
    }

    pub fn step_count(&self) -> u64 {
        self.step_count
    }

    /// Position within the maximal period.
    pub fn phase(&self) -> u64 {
        self.step_count % self.spec.period_bound()
    }

    /// Clocks the register once and returns the new word.
    pub fn step(&mut self) -> u32 {
        self.state = next_state(self.state, self.spec.tap_mask, self.spec.mask());
        self.step_count += 1;
        self.state
    }

    pub(crate) fn restore_raw(&mut self, state: u32, step_count: u64) {
        debug_assert!(state != 0);
        self.state = state;
        self.step_count = step_count;
    }
}

/// Pure transition: `(state) -> (state', word)`.
pub fn lfsr_step(state: &LfsrState) -> (LfsrState, u32) {
    let mut next = state.clone();
    let word = next.step();
    (next, word)
}

#[inline]
fn next_state(state: u32, tap_mask: u32, mask: u32) -> u32 {
    let feedback = (state & tap_mask).count_ones() & 1;
    ((state << 1) | feedback) & mask
}

/// Orbit length of the spec's seed, or `LimitExceeded` if longer than `limit`.
pub fn lfsr_period(spec: &LfsrSpec, limit: u64) -> Result<u64> {
    let mask = spec.mask();
    let start = spec.seed;
    let mut s = start;
    for n in 1..=limit {
        s = next_state(s, spec.tap_mask, mask);
        if s == start {
            return Ok(n);
        }
    }
    Err(Error::LimitExceeded { limit })
}

/// Midpoint mapping of a `b`-bit word onto (-1, 1).
pub fn word_to_unit(word: u32, bits: u32) -> f64 {
    debug_assert!(bits == 32 || word < (1u32 << bits));
    let scale = (1u64 << bits) as f64;
    (2.0 * word as f64 + 1.0 - scale) / scale
}

/// Signed midpoint value `word - 2^(b-1) + 1/2`, the unscaled integer reading.
pub fn word_to_signed(word: u32, bits: u32) -> f64 {
    word as f64 - (1u64 << (bits - 1)) as f64 + 0.5
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn first_step_from_one() {
        let spec = LfsrSpec::new(8, &[8, 6, 5, 4], 1).unwrap();
        let (next, word) = lfsr_step(&LfsrState::new(spec));
        // bits 7,5,4,3 of 0x01 are clear, so the feedback is 0
        assert_eq!(word, 0x02);
        assert_eq!(next.word(), 0x02);
        assert_eq!(next.step_count(), 1);
    }

    #[test]
    fn feedback_enters_lsb() {
        // 0x80: bit 7 set -> feedback 1, the MSB shifts out
        let spec = LfsrSpec::new(8, &[8, 6, 5, 4], 0x80).unwrap();
        let mut st = LfsrState::new(spec);
        assert_eq!(st.step(), 0x01);
        // 0xB8 has bits 7,5,4,3 set: even parity
        let spec = LfsrSpec::new(8, &[8, 6, 5, 4], 0xB8).unwrap();
        let mut st = LfsrState::new(spec);
        assert_eq!(st.step(), 0x70);
    }

    #[test]
    fn eight_bit_orbit_is_full() {
        let spec = LfsrSpec::new(8, &[8, 6, 5, 4], 1).unwrap();
        let mut st = LfsrState::new(spec);
        let mut seen = HashSet::new();
        seen.insert(st.word());
        for _ in 0..254 {
            seen.insert(st.step());
        }
        assert_eq!(seen.len(), 255);
        assert!(!seen.contains(&0));
        assert_eq!(st.step(), 1);
    }

    #[test]
    fn period_examples() {
        let spec = LfsrSpec::new(8, &[8, 6, 5, 4], 0x5A).unwrap();
        assert_eq!(lfsr_period(&spec, 256).unwrap(), 255);
        let spec = LfsrSpec::new(4, &[4, 3], 9).unwrap();
        assert_eq!(lfsr_period(&spec, 16).unwrap(), 15);
    }

    #[test]
    fn non_maximal_taps_split_into_short_orbits() {
        let periods: Vec<u64> = (1..16)
            .map(|seed| lfsr_period(&LfsrSpec::new(4, &[4, 2], seed).unwrap(), 16).unwrap())
            .collect();
        // x^4 + x^2 + 1 = (x^2 + x + 1)^2: orbits of length 6 and 3
        assert!(periods.iter().all(|&p| p == 6 || p == 3));
        assert_eq!(periods.iter().filter(|&&p| p == 3).count(), 3);
    }

    #[test]
    fn period_limit() {
        let spec = LfsrSpec::new(8, &[8, 6, 5, 4], 1).unwrap();
        assert!(matches!(
            lfsr_period(&spec, 100),
            Err(Error::LimitExceeded { limit: 100 })
        ));
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(LfsrSpec::new(8, &[8, 6, 5, 4], 0).is_err());
        assert!(LfsrSpec::new(8, &[8, 6, 5, 4], 256).is_err());
        assert!(LfsrSpec::new(8, &[7, 6], 1).is_err());
        assert!(LfsrSpec::new(8, &[9, 8], 1).is_err());
        assert!(LfsrSpec::new(3, &[3, 2], 1).is_err());
        assert!(LfsrSpec::new(8, &[8, 0], 1).is_err());
    }

    #[test]
    fn unit_mapping_examples() {
        assert_eq!(word_to_unit(128, 8), 0.00390625);
        assert_eq!(word_to_unit(255, 8), 0.99609375);
        assert_eq!(word_to_unit(1, 8), -253.0 / 256.0);
        assert_eq!(word_to_unit(0, 8), -255.0 / 256.0);
    }

    #[test]
    fn unit_mapping_is_odd_about_midpoint() {
        for b in [4u32, 8, 12] {
            let top = (1u32 << b) - 1;
            for w in 0..=top {
                let u = word_to_unit(w, b);
                assert!(u > -1.0 && u < 1.0);
                assert_eq!(u, -word_to_unit(top - w, b));
                if w > 0 {
                    assert!(u > word_to_unit(w - 1, b));
                }
            }
        }
    }

    #[test]
    fn signed_reading_reaches_large_magnitudes() {
        assert_eq!(word_to_signed(255, 8), 127.5);
        assert_eq!(word_to_signed(0, 8), -127.5);
        assert_eq!(word_to_signed(200, 8), 128.0 * word_to_unit(200, 8));
    }

    #[test]
    fn same_spec_same_sequence() {
        let spec = LfsrSpec::with_default_taps(14, 777).unwrap();
        let mut a = LfsrState::new(spec.clone());
        let mut b = LfsrState::new(spec);
        for _ in 0..1000 {
            assert_eq!(a.step(), b.step());
        }
    }
}
