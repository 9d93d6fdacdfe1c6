//! On-the-fly generation: `n` lockstep LFSRs assemble a perturbation cycle by
//! cycle, and the first-position generator rotates to the end of the array
//! after every cycle.
//!
//! All generators share one width and tap set and differ only in seed, so a
//! single phase counter describes the whole array. The LUT address is the
//! current word of generator 0, the "first RNG" whose position the pointer
//! tracks; with maximal taps that word identifies the phase.
//!
//! A perturbation of length `d` takes `c = ceil(d / n)` cycles. Full cycles
//! emit all `n` words in pointer order. The final cycle keeps `r = d - (c-1)n`
//! words: those of generators `0..r`, still in pointer order. Keeping a fixed
//! generator set there makes the norm independent of the pointer, which is
//! what lets a phase-indexed LUT carry the exact factor.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modscale::{pow2, ScaleLut};
use crate::rng::{default_taps, word_to_unit, LfsrSpec, LfsrState, SplitMix64};

pub(crate) fn is_pow2_minus_one(n: usize) -> bool {
    n >= 1 && (n + 1).is_power_of_two()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArraySpec {
    bits: u32,
    taps: Vec<u32>,
    seeds: Vec<u32>,
    rotation: bool,
}

impl ArraySpec {
    pub fn new(bits: u32, taps: Option<&[u32]>, seeds: Vec<u32>, rotation: bool) -> Result<Self> {
        let taps = match taps {
            Some(t) => t.to_vec(),
            None => default_taps(bits)
                .ok_or_else(|| Error::InvalidLfsr(format!("no default taps for {bits} bits")))?
                .to_vec(),
        };
        if !is_pow2_minus_one(seeds.len()) {
            return Err(Error::InvalidConfig(format!(
                "RNG count {} is not a power of two minus one",
                seeds.len()
            )));
        }
        let mut sorted = seeds.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != seeds.len() {
            return Err(Error::InvalidConfig(
                "RNG seeds must be pairwise distinct".into(),
            ));
        }
        // validates width, taps and every seed
        let first = LfsrSpec::new(bits, &taps, seeds[0])?;
        for &s in &seeds[1..] {
            first.reseeded(s)?;
        }
        Ok(Self {
            bits,
            taps: first.taps().to_vec(),
            seeds,
            rotation,
        })
    }

    /// `n` distinct nonzero seeds drawn from `master_seed`.
    pub fn from_master_seed(
        bits: u32,
        taps: Option<&[u32]>,
        n: usize,
        master_seed: u64,
        rotation: bool,
    ) -> Result<Self> {
        let states = (1u64 << bits) - 1;
        if n as u64 > states {
            return Err(Error::InvalidConfig(format!(
                "{n} generators need distinct seeds but only {states} nonzero states exist"
            )));
        }
        let mut src = SplitMix64::new(master_seed);
        let mut seeds = Vec::with_capacity(n);
        while seeds.len() < n {
            let s = (src.next_below(states) + 1) as u32;
            if !seeds.contains(&s) {
                seeds.push(s);
            }
        }
        Self::new(bits, taps, seeds, rotation)
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn taps(&self) -> &[u32] {
        &self.taps
    }

    pub fn seeds(&self) -> &[u32] {
        &self.seeds
    }

    pub fn n_rngs(&self) -> usize {
        self.seeds.len()
    }

    pub fn rotation(&self) -> bool {
        self.rotation
    }

    pub fn with_rotation(&self, rotation: bool) -> Self {
        Self {
            rotation,
            ..self.clone()
        }
    }

    pub fn period(&self) -> u64 {
        (1u64 << self.bits) - 1
    }

    pub fn generator_spec(&self, index: usize) -> LfsrSpec {
        LfsrSpec::new(self.bits, &self.taps, self.seeds[index]).expect("validated at construction")
    }

    /// Identity of the generator configuration. Rotation is excluded: it
    /// reorders components but never changes which values a phase produces.
    pub fn fingerprint(&self) -> u64 {
        let mut h = Fnv::default();
        h.write_u64(self.bits as u64);
        for &t in &self.taps {
            h.write_u64(t as u64);
        }
        h.write_u64(u64::MAX);
        for &s in &self.seeds {
            h.write_u64(s as u64);
        }
        h.finish()
    }

    /// Cycles per perturbation and the words kept from the final cycle.
    pub fn schedule(&self, d: usize) -> (usize, usize) {
        let n = self.n_rngs();
        let cycles = d.div_ceil(n);
        (cycles, d - (cycles - 1) * n)
    }
}

/// 64-bit FNV-1a.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Fnv(u64);

impl Default for Fnv {
    fn default() -> Self {
        Fnv(0xcbf2_9ce4_8422_2325)
    }
}

impl Fnv {
    pub(crate) fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 ^= b as u64;
            self.0 = self.0.wrapping_mul(0x0100_0000_01b3);
        }
    }

    pub(crate) fn write_u64(&mut self, v: u64) {
        self.write(&v.to_le_bytes());
    }

    pub(crate) fn finish(&self) -> u64 {
        self.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub(crate) struct ArrayState {
    words: Vec<u32>,
    step_count: u64,
    pointer: usize,
    cycle_count: u64,
}

#[derive(Debug, Clone)]
pub struct RngArray {
    spec: ArraySpec,
    generators: Vec<LfsrState>,
    pointer: usize,
    cycle_count: u64,
    words: Vec<u32>,
}

impl RngArray {
    pub fn new(spec: ArraySpec) -> Self {
        let generators = (0..spec.n_rngs())
            .map(|i| LfsrState::new(spec.generator_spec(i)))
            .collect();
        let n = spec.n_rngs();
        Self {
            spec,
            generators,
            pointer: 0,
            cycle_count: 0,
            words: vec![0; n],
        }
    }

    pub fn spec(&self) -> &ArraySpec {
        &self.spec
    }

    pub fn pointer(&self) -> usize {
        self.pointer
    }

    pub fn cycle_count(&self) -> u64 {
        self.cycle_count
    }

    /// Array phase in `[0, 2^b - 1)`.
    pub fn phase(&self) -> u64 {
        self.generators[0].phase()
    }

    /// LUT address for the next assembly: generator 0's current word.
    pub fn address(&self) -> u32 {
        self.generators[0].word()
    }

    pub fn generators(&self) -> &[LfsrState] {
        &self.generators
    }

    /// One clock: every generator steps once. Calls `emit(generator, word)`
    /// in pointer order, then rotates the pointer.
    pub fn cycle(&mut self, mut emit: impl FnMut(usize, u32)) {
        for (w, g) in self.words.iter_mut().zip(self.generators.iter_mut()) {
            *w = g.step();
        }
        let n = self.generators.len();
        for k in 0..n {
            let j = (self.pointer + k) % n;
            emit(j, self.words[j]);
        }
        if self.spec.rotation {
            self.pointer = (self.pointer + 1) % n;
        }
        self.cycle_count += 1;
    }

    fn assemble(&mut self, d: usize, scale: f64, mut out: impl FnMut(f64)) {
        let bits = self.spec.bits;
        let (cycles, keep) = self.spec.schedule(d);
        for c in 0..cycles {
            let last = c + 1 == cycles;
            self.cycle(|j, w| {
                if !last || j < keep {
                    out(word_to_unit(w, bits) * scale);
                }
            });
        }
    }

    /// Streams one LUT-scaled perturbation of length `d`.
    pub fn stream_perturbation(
        &mut self,
        lut: &ScaleLut,
        d: usize,
        out: impl FnMut(f64),
    ) -> Result<()> {
        if lut.fingerprint() != self.spec.fingerprint() || lut.dimension() != d {
            return Err(Error::LutMismatch);
        }
        let e = lut.query(self.address())?;
        self.assemble(d, pow2(e as i32), out);
        Ok(())
    }

    pub fn next_perturbation(&mut self, lut: &ScaleLut, d: usize) -> Result<Vec<f64>> {
        let mut v = Vec::with_capacity(d);
        self.stream_perturbation(lut, d, |x| v.push(x))?;
        Ok(v)
    }

    /// Assembly without LUT scaling: the raw unit-range words.
    pub fn next_unscaled(&mut self, d: usize) -> Vec<f64> {
        let mut v = Vec::with_capacity(d);
        self.assemble(d, 1.0, |x| v.push(x));
        v
    }

    pub(crate) fn state(&self) -> ArrayState {
        ArrayState {
            words: self.generators.iter().map(|g| g.word()).collect(),
            step_count: self.generators[0].step_count(),
            pointer: self.pointer,
            cycle_count: self.cycle_count,
        }
    }

    pub(crate) fn restore(&mut self, st: &ArrayState) -> Result<()> {
        let n = self.generators.len();
        if st.words.len() != n || st.pointer >= n || st.words.contains(&0) {
            return Err(Error::CorruptSnapshot);
        }
        for (g, &w) in self.generators.iter_mut().zip(&st.words) {
            g.restore_raw(w, st.step_count);
        }
        self.pointer = st.pointer;
        self.cycle_count = st.cycle_count;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn spec(bits: u32, n: usize, rotation: bool) -> ArraySpec {
        ArraySpec::from_master_seed(bits, None, n, 42, rotation).unwrap()
    }

    #[test]
    fn rejects_bad_arrays() {
        assert!(ArraySpec::new(4, None, vec![1, 2], true).is_err());
        assert!(ArraySpec::new(4, None, vec![1, 1, 2], true).is_err());
        assert!(ArraySpec::new(4, None, vec![1, 2, 16], true).is_err());
        assert!(ArraySpec::from_master_seed(4, None, 31, 0, true).is_err());
        assert!(ArraySpec::new(4, None, vec![1, 2, 3], true).is_ok());
    }

    #[test]
    fn two_cycles_in_pointer_order() {
        let s = ArraySpec::new(4, None, vec![1, 5, 9], true).unwrap();
        let mut arr = RngArray::new(s.clone());
        let v = arr.next_unscaled(6);

        let mut gens: Vec<LfsrState> = (0..3)
            .map(|i| LfsrState::new(s.generator_spec(i)))
            .collect();
        let c1: Vec<u32> = gens.iter_mut().map(|g| g.step()).collect();
        let c2: Vec<u32> = gens.iter_mut().map(|g| g.step()).collect();
        let expect: Vec<f64> = [c1[0], c1[1], c1[2], c2[1], c2[2], c2[0]]
            .iter()
            .map(|&w| word_to_unit(w, 4))
            .collect();
        assert_eq!(v, expect);
        assert_eq!(arr.pointer(), 2);
        assert_eq!(arr.cycle_count(), 2);
    }

    #[test]
    fn partial_cycle_keeps_leading_generators() {
        let s = ArraySpec::new(4, None, vec![1, 5, 9], true).unwrap();
        let mut arr = RngArray::new(s.clone());
        arr.cycle(|_, _| {});
        // pointer is now 1; a 2-long perturbation keeps generators 0 and 1
        let v = arr.next_unscaled(2);
        let mut gens: Vec<LfsrState> = (0..3)
            .map(|i| LfsrState::new(s.generator_spec(i)))
            .collect();
        for g in gens.iter_mut() {
            g.step();
        }
        let c2: Vec<u32> = gens.iter_mut().map(|g| g.step()).collect();
        assert_eq!(v, vec![word_to_unit(c2[1], 4), word_to_unit(c2[0], 4)]);
    }

    #[test]
    fn lockstep_and_pointer_rotation() {
        let mut arr = RngArray::new(spec(8, 7, true));
        for t in 1..=20u64 {
            arr.cycle(|_, _| {});
            assert!(arr.generators().iter().all(|g| g.step_count() == t));
            assert_eq!(arr.pointer() as u64, t % 7);
        }
        let mut fixed = RngArray::new(spec(8, 7, false));
        fixed.cycle(|_, _| {});
        assert_eq!(fixed.pointer(), 0);
    }

    fn distinct_combinations(bits: u32, n: usize) -> usize {
        let s = spec(bits, n, true);
        let period = s.period() as usize;
        let mut arr = RngArray::new(s);
        let mut seen = HashSet::new();
        for _ in 0..n * period {
            let mut tuple = Vec::with_capacity(n);
            arr.cycle(|_, w| tuple.push(w));
            seen.insert(tuple);
        }
        seen.len()
    }

    #[test]
    fn rotation_multiplies_combinations_when_coprime() {
        // gcd(7, 15) = 1 and gcd(31, 255) = 1: every (phase, pointer) pair occurs
        assert_eq!(distinct_combinations(4, 7), 7 * 15);
        assert_eq!(distinct_combinations(8, 31), 31 * 255);
    }

    #[test]
    fn rotation_combinations_are_lcm_bounded() {
        // gcd(3, 15) = 3: the pointer is tied to the phase, lcm(3, 15) = 15
        assert_eq!(distinct_combinations(4, 3), 15);
        assert_eq!(distinct_combinations(4, 1), 15);
        // rotation off collapses to one ordering per phase
        let s = spec(4, 7, false);
        let mut arr = RngArray::new(s);
        let mut seen = HashSet::new();
        for _ in 0..7 * 15 {
            let mut tuple = Vec::new();
            arr.cycle(|_, w| tuple.push(w));
            seen.insert(tuple);
        }
        assert_eq!(seen.len(), 15);
    }

    #[test]
    fn fingerprint_ignores_rotation_only() {
        let a = spec(8, 7, true);
        assert_eq!(a.fingerprint(), a.with_rotation(false).fingerprint());
        let b = ArraySpec::from_master_seed(8, None, 7, 43, true).unwrap();
        assert_ne!(a.fingerprint(), b.fingerprint());
    }
}
