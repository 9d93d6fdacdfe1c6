use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{expected_gaussian_norm, exponent_to_i8, round_pow2, scale_factor};
use crate::error::{Error, Result};
use crate::perturb::ArraySpec;
use crate::rng::{word_to_unit, LfsrState};

/// LUTs are materialized as one slot per address, so keep them bounded.
pub const MAX_LUT_BITS: u32 = 24;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseEntry {
    pub phase: u64,
    pub address: u32,
    pub exact_factor: f64,
    pub exponent: i8,
}

/// Phase-addressed table of power-of-two scale exponents for one array
/// configuration and one perturbation dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleLut {
    bit_width: u32,
    dimension: usize,
    array_fingerprint: u64,
    entries: Vec<Option<i8>>,
    phases: Vec<PhaseEntry>,
}

impl ScaleLut {
    pub fn bit_width(&self) -> u32 {
        self.bit_width
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn fingerprint(&self) -> u64 {
        self.array_fingerprint
    }

    /// Slot count, `2^b`, including the unreachable zero address.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn valid_entries(&self) -> usize {
        self.entries.iter().filter(|e| e.is_some()).count()
    }

    pub fn query(&self, address: u32) -> Result<i8> {
        self.entries
            .get(address as usize)
            .copied()
            .flatten()
            .ok_or(Error::InvalidAddress(address))
    }

    /// Build-time record of every phase, in phase order.
    pub fn phases(&self) -> &[PhaseEntry] {
        &self.phases
    }
}

/// Precomputes, for every array phase, the exact factor that brings the
/// perturbation assembled from that phase to the expected Gaussian norm, and
/// stores its power-of-two exponent at the address generator 0 shows then.
pub fn build_scale_lut(spec: &ArraySpec, d: usize) -> Result<ScaleLut> {
    if d == 0 {
        return Err(Error::InvalidConfig(
            "LUT dimension must be at least 1".into(),
        ));
    }
    let bits = spec.bits();
    if bits > MAX_LUT_BITS {
        return Err(Error::InvalidConfig(format!(
            "scale LUTs support at most {MAX_LUT_BITS} bits, got {bits}"
        )));
    }
    let period = spec.period() as usize;
    let n = spec.n_rngs();
    let (cycles, keep) = spec.schedule(d);

    // Per-phase squared sums: all generators, and the generators kept from a
    // partial final cycle. orbit0 holds generator 0's word at each phase.
    let mut full = vec![0.0f64; period];
    let mut part = vec![0.0f64; period];
    let mut orbit0 = vec![0u32; period];
    for j in 0..n {
        let mut g = LfsrState::new(spec.generator_spec(j));
        for t in 0..period {
            if j == 0 {
                orbit0[t] = g.word();
            }
            let u = word_to_unit(g.word(), bits);
            full[t] += u * u;
            if j < keep {
                part[t] += u * u;
            }
            g.step();
        }
    }

    let expected = expected_gaussian_norm(d);
    let full_cycles = cycles - 1;
    // Direct summation while cheap, cyclic prefix sums otherwise.
    let prefix = (full_cycles > 4096).then(|| {
        let mut p = Vec::with_capacity(2 * period + 1);
        p.push(0.0);
        let mut acc = 0.0;
        for t in 0..2 * period {
            acc += full[t % period];
            p.push(acc);
        }
        p
    });
    let total: f64 = full.iter().sum();

    let mut entries = vec![None; 1usize << bits];
    let mut owner = vec![u64::MAX; 1usize << bits];
    let mut phases = Vec::with_capacity(period);
    for p in 0..period {
        let mut sq = 0.0;
        match &prefix {
            None => {
                for i in 1..=full_cycles {
                    sq += full[(p + i) % period];
                }
            }
            Some(pre) => {
                let wraps = full_cycles / period;
                let rem = full_cycles % period;
                sq += wraps as f64 * total;
                sq += pre[p + 1 + rem] - pre[p + 1];
            }
        }
        sq += part[(p + cycles) % period];

        let exact = scale_factor(expected, sq.sqrt())?;
        let exponent = exponent_to_i8(round_pow2(exact)?)?;
        let address = orbit0[p];
        let slot = address as usize;
        if owner[slot] != u64::MAX {
            return Err(Error::AddressCollision {
                address,
                first: owner[slot],
                second: p as u64,
            });
        }
        owner[slot] = p as u64;
        entries[slot] = Some(exponent);
        phases.push(PhaseEntry {
            phase: p as u64,
            address,
            exact_factor: exact,
            exponent,
        });
    }

    Ok(ScaleLut {
        bit_width: bits,
        dimension: d,
        array_fingerprint: spec.fingerprint(),
        entries,
        phases,
    })
}

/// One LUT per distinct perturbation dimension.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LutRegistry {
    luts: BTreeMap<usize, ScaleLut>,
}

impl LutRegistry {
    pub fn build(spec: &ArraySpec, dims: &[usize]) -> Result<Self> {
        let mut luts = BTreeMap::new();
        for &d in dims {
            if let std::collections::btree_map::Entry::Vacant(slot) = luts.entry(d) {
                slot.insert(build_scale_lut(spec, d)?);
            }
        }
        Ok(Self { luts })
    }

    pub fn get(&self, d: usize) -> Option<&ScaleLut> {
        self.luts.get(&d)
    }

    pub fn iter(&self) -> impl Iterator<Item = &ScaleLut> {
        self.luts.values()
    }

    pub fn len(&self) -> usize {
        self.luts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.luts.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perturb::RngArray;

    #[test]
    fn valid_entries_and_zero_slot() {
        for (bits, n, d) in [(4, 3, 12), (4, 7, 5), (8, 31, 738), (6, 3, 1)] {
            let spec = ArraySpec::from_master_seed(bits, None, n, 1, true).unwrap();
            let lut = build_scale_lut(&spec, d).unwrap();
            assert_eq!(lut.len(), 1 << bits);
            assert_eq!(lut.valid_entries(), (1 << bits) - 1);
            assert!(matches!(lut.query(0), Err(Error::InvalidAddress(0))));
        }
    }

    #[test]
    fn query_round_trips_build_record() {
        let spec = ArraySpec::from_master_seed(6, None, 7, 3, true).unwrap();
        let lut = build_scale_lut(&spec, 40).unwrap();
        let mut built: Vec<i8> = lut.phases().iter().map(|p| p.exponent).collect();
        let mut queried = Vec::new();
        for p in lut.phases() {
            assert_eq!(lut.query(p.address).unwrap(), p.exponent);
        }
        for a in 1..64u32 {
            queried.push(lut.query(a).unwrap());
        }
        built.sort_unstable();
        queried.sort_unstable();
        assert_eq!(built, queried);
    }

    #[test]
    fn non_maximal_taps_collide() {
        let spec = ArraySpec::new(4, Some(&[4, 2]), vec![1, 2, 3], true).unwrap();
        assert!(matches!(
            build_scale_lut(&spec, 6),
            Err(Error::AddressCollision { .. })
        ));
    }

    #[test]
    fn factors_match_array_assembly() {
        // d not a multiple of n exercises the partial final cycle
        for rotation in [true, false] {
            let spec = ArraySpec::from_master_seed(5, None, 7, 9, rotation).unwrap();
            let d = 45;
            let lut = build_scale_lut(&spec, d).unwrap();
            let mut arr = RngArray::new(spec);
            let e = expected_gaussian_norm(d);
            for _ in 0..200 {
                let phase = arr.phase() as usize;
                let v = arr.next_unscaled(d);
                let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                let rec = &lut.phases()[phase];
                assert!(((e / norm) / rec.exact_factor - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn prefix_path_matches_direct_sum() {
        // 5 generators, 4-bit: 15 phases; d big enough for > 4096 full cycles
        let spec = ArraySpec::from_master_seed(4, None, 3, 5, true).unwrap();
        let d = 3 * 5000 + 2;
        let lut = build_scale_lut(&spec, d).unwrap();
        let mut arr = RngArray::new(spec);
        for _ in 0..15 {
            let phase = arr.phase() as usize;
            let v = arr.next_unscaled(d);
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            let s = expected_gaussian_norm(d) / norm;
            assert!((s / lut.phases()[phase].exact_factor - 1.0).abs() < 1e-11);
        }
    }

    #[test]
    fn registry_dedups_dimensions() {
        let spec = ArraySpec::from_master_seed(4, None, 3, 5, true).unwrap();
        let reg = LutRegistry::build(&spec, &[12, 5, 12]).unwrap();
        assert_eq!(reg.len(), 2);
        assert_eq!(reg.get(5).unwrap().dimension(), 5);
        assert!(reg.get(7).is_none());
    }
}
