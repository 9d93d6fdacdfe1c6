use serde::{Deserialize, Serialize};

use super::array::{ArraySpec, ArrayState, Fnv, RngArray};
use super::pool::{PoolScaling, RandomPool, DEFAULT_POOL_SIZE, DEFAULT_VALUE_BITS};
use crate::error::{Error, Result};
use crate::modscale::LutRegistry;
use crate::rng::{derive_seed, word_to_signed, GaussianStream, LfsrSpec, LfsrState, SplitMix64};

const PROVIDER_STREAM: u64 = 0x5045_5254;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProviderKind {
    Gaussian,
    Rademacher,
    UniformRaw,
    UniformInt,
    Pool,
    Otf,
}

impl ProviderKind {
    pub fn is_scaled(self) -> bool {
        matches!(self, ProviderKind::Pool | ProviderKind::Otf)
    }

    pub fn name(self) -> &'static str {
        match self {
            ProviderKind::Gaussian => "gaussian",
            ProviderKind::Rademacher => "rademacher",
            ProviderKind::UniformRaw => "uniform-raw",
            ProviderKind::UniformInt => "uniform-int",
            ProviderKind::Pool => "pool",
            ProviderKind::Otf => "otf",
        }
    }
}

impl std::fmt::Display for ProviderKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.pad(self.name())
    }
}

fn default_pool_size() -> usize {
    DEFAULT_POOL_SIZE
}
fn default_n_rngs() -> usize {
    31
}
fn default_bits() -> u32 {
    8
}
fn default_value_bits() -> u32 {
    DEFAULT_VALUE_BITS
}
fn default_true() -> bool {
    true
}

/// The `[provider]` block of an experiment config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProviderConfig {
    pub provider: ProviderKind,
    #[serde(default = "default_pool_size")]
    pub pool_size: usize,
    #[serde(default = "default_n_rngs")]
    pub n_rngs: usize,
    #[serde(default = "default_bits")]
    pub bits: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub taps: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default)]
    pub pool_scale: PoolScaling,
    #[serde(default = "default_value_bits")]
    pub value_bits: u32,
    #[serde(default = "default_true")]
    pub rotation: bool,
}

impl ProviderConfig {
    pub fn new(kind: ProviderKind) -> Self {
        Self {
            provider: kind,
            pool_size: default_pool_size(),
            n_rngs: default_n_rngs(),
            bits: default_bits(),
            taps: None,
            seed: None,
            pool_scale: PoolScaling::default(),
            value_bits: default_value_bits(),
            rotation: true,
        }
    }

    pub fn gaussian() -> Self {
        Self::new(ProviderKind::Gaussian)
    }

    pub fn pool(size: usize) -> Self {
        Self {
            pool_size: size,
            ..Self::new(ProviderKind::Pool)
        }
    }

    pub fn otf(n_rngs: usize, bits: u32) -> Self {
        Self {
            n_rngs,
            bits,
            ..Self::new(ProviderKind::Otf)
        }
    }

    /// Seed actually used by the provider given the run's master seed.
    pub fn resolved_seed(&self, master_seed: u64) -> u64 {
        self.seed
            .unwrap_or_else(|| derive_seed(master_seed, PROVIDER_STREAM))
    }

    pub fn array_spec(&self, master_seed: u64) -> Result<ArraySpec> {
        ArraySpec::from_master_seed(
            self.bits,
            self.taps.as_deref(),
            self.n_rngs,
            self.resolved_seed(master_seed),
            self.rotation,
        )
    }
}

#[derive(Debug, Clone)]
enum Source {
    Gaussian(GaussianStream),
    Rademacher(SplitMix64),
    UniformRaw(SplitMix64),
    UniformInt(LfsrState),
    Pool(RandomPool),
    Otf { array: RngArray, luts: LutRegistry },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum SourceState {
    Gaussian(GaussianStream),
    Rademacher(SplitMix64),
    UniformRaw(SplitMix64),
    UniformInt { word: u32, step_count: u64 },
    Pool { cursor: usize },
    Otf(ArrayState),
}

/// Opaque provider state at one point of its stream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    fingerprint: u64,
    step: u64,
    state: SourceState,
}

impl Snapshot {
    /// Number of perturbations the provider had emitted when this was taken.
    pub fn step(&self) -> u64 {
        self.step
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        serde_json::to_vec(self).expect("snapshot serializes")
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        serde_json::from_slice(bytes).map_err(|_| Error::CorruptSnapshot)
    }
}

/// A deterministic source of perturbation vectors for one parameter layout.
///
/// Scaled providers (`pool`, `otf`) generate each layout segment as its own
/// perturbation, scaled for that segment's dimension; the unscaled baselines
/// draw the whole vector from one stream.
#[derive(Debug, Clone)]
pub struct PerturbationProvider {
    config: ProviderConfig,
    segments: Vec<usize>,
    dimension: usize,
    fingerprint: u64,
    step: u64,
    source: Source,
}

impl PerturbationProvider {
    pub fn new(config: &ProviderConfig, segments: &[usize], master_seed: u64) -> Result<Self> {
        if segments.is_empty() || segments.contains(&0) {
            return Err(Error::InvalidConfig(
                "provider layout needs nonempty segments".into(),
            ));
        }
        let seed = config.resolved_seed(master_seed);
        let source = match config.provider {
            ProviderKind::Gaussian => Source::Gaussian(GaussianStream::new(seed)),
            ProviderKind::Rademacher => Source::Rademacher(SplitMix64::new(seed)),
            ProviderKind::UniformRaw => Source::UniformRaw(SplitMix64::new(seed)),
            ProviderKind::UniformInt => {
                let states = (1u64 << config.bits.min(32)) - 1;
                let s = (SplitMix64::new(seed).next_below(states.max(1)) + 1) as u32;
                let spec = match &config.taps {
                    Some(t) => LfsrSpec::new(config.bits, t, s)?,
                    None => LfsrSpec::with_default_taps(config.bits, s)?,
                };
                Source::UniformInt(LfsrState::new(spec))
            }
            ProviderKind::Pool => Source::Pool(RandomPool::build(
                seed,
                config.pool_size,
                config.value_bits,
                segments,
                config.pool_scale,
            )?),
            ProviderKind::Otf => {
                let spec = config.array_spec(master_seed)?;
                let luts = LutRegistry::build(&spec, segments)?;
                Source::Otf {
                    array: RngArray::new(spec),
                    luts,
                }
            }
        };

        let mut h = Fnv::default();
        h.write(&serde_json::to_vec(config).expect("config serializes"));
        for &s in segments {
            h.write_u64(s as u64);
        }
        h.write_u64(seed);

        Ok(Self {
            config: config.clone(),
            segments: segments.to_vec(),
            dimension: segments.iter().sum(),
            fingerprint: h.finish(),
            step: 0,
            source,
        })
    }

    pub fn kind(&self) -> ProviderKind {
        self.config.provider
    }

    pub fn config(&self) -> &ProviderConfig {
        &self.config
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn segments(&self) -> &[usize] {
        &self.segments
    }

    /// Perturbations emitted so far.
    pub fn step_index(&self) -> u64 {
        self.step
    }

    pub fn pool(&self) -> Option<&RandomPool> {
        match &self.source {
            Source::Pool(p) => Some(p),
            _ => None,
        }
    }

    pub fn array(&self) -> Option<&RngArray> {
        match &self.source {
            Source::Otf { array, .. } => Some(array),
            _ => None,
        }
    }

    pub fn luts(&self) -> Option<&LutRegistry> {
        match &self.source {
            Source::Otf { luts, .. } => Some(luts),
            _ => None,
        }
    }

    /// Streams one full perturbation as `(index, value)` pairs.
    pub fn stream(&mut self, mut out: impl FnMut(usize, f64)) -> Result<()> {
        let d = self.dimension;
        match &mut self.source {
            Source::Gaussian(g) => (0..d).for_each(|i| out(i, g.next_gaussian())),
            Source::Rademacher(s) => {
                (0..d).for_each(|i| out(i, if s.next_u64() >> 63 == 1 { 1.0 } else { -1.0 }))
            }
            Source::UniformRaw(s) => (0..d).for_each(|i| out(i, s.next_unit())),
            Source::UniformInt(l) => {
                let bits = l.spec().bit_width();
                (0..d).for_each(|i| out(i, word_to_signed(l.step(), bits)))
            }
            Source::Pool(p) => {
                let mut i = 0;
                for &len in &self.segments {
                    p.stream_perturbation(len, |x| {
                        out(i, x);
                        i += 1;
                    })?;
                }
            }
            Source::Otf { array, luts } => {
                let mut i = 0;
                for &len in &self.segments {
                    let lut = luts.get(len).expect("LUT built for every segment");
                    array.stream_perturbation(lut, len, |x| {
                        out(i, x);
                        i += 1;
                    })?;
                }
            }
        }
        self.step += 1;
        Ok(())
    }

    pub fn next_perturbation(&mut self, d: usize) -> Result<Vec<f64>> {
        if d != self.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                got: d,
            });
        }
        let mut v = vec![0.0; d];
        self.stream(|i, x| v[i] = x)?;
        Ok(v)
    }

    pub fn snapshot(&self) -> Snapshot {
        let state = match &self.source {
            Source::Gaussian(g) => SourceState::Gaussian(*g),
            Source::Rademacher(s) => SourceState::Rademacher(*s),
            Source::UniformRaw(s) => SourceState::UniformRaw(*s),
            Source::UniformInt(l) => SourceState::UniformInt {
                word: l.word(),
                step_count: l.step_count(),
            },
            Source::Pool(p) => SourceState::Pool { cursor: p.cursor() },
            Source::Otf { array, .. } => SourceState::Otf(array.state()),
        };
        Snapshot {
            fingerprint: self.fingerprint,
            step: self.step,
            state,
        }
    }

    pub fn restore(&mut self, snap: &Snapshot) -> Result<()> {
        if snap.fingerprint != self.fingerprint {
            return Err(Error::CorruptSnapshot);
        }
        match (&mut self.source, &snap.state) {
            (Source::Gaussian(g), SourceState::Gaussian(s)) => *g = *s,
            (Source::Rademacher(g), SourceState::Rademacher(s)) => *g = *s,
            (Source::UniformRaw(g), SourceState::UniformRaw(s)) => *g = *s,
            (Source::UniformInt(l), SourceState::UniformInt { word, step_count }) => {
                if *word == 0 {
                    return Err(Error::CorruptSnapshot);
                }
                l.restore_raw(*word, *step_count)
            }
            (Source::Pool(p), SourceState::Pool { cursor }) => p.set_cursor(*cursor)?,
            (Source::Otf { array, .. }, SourceState::Otf(st)) => array.restore(st)?,
            _ => return Err(Error::CorruptSnapshot),
        }
        self.step = snap.step;
        Ok(())
    }
}
