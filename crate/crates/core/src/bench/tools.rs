use std::io::Write;

use super::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::modscale::LutRegistry;
use crate::perturb::ProviderKind;
use crate::rng::{LfsrSpec, LfsrState};

/// Writes every scale LUT the config's on-the-fly provider would build, as
/// CSV `dimension,address,phase,exact_factor,exponent` in address order.
pub fn lut_dump(cfg: &ExperimentConfig, out: impl Write) -> Result<usize> {
    if cfg.provider.provider != ProviderKind::Otf {
        return Err(Error::config(
            "provider.provider",
            "lut dump needs an otf provider",
        ));
    }
    let task = cfg.build_task()?;
    let spec = cfg.provider.array_spec(cfg.zo.master_seed)?;
    let registry = LutRegistry::build(&spec, &task.segment_lengths())?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["dimension", "address", "phase", "exact_factor", "exponent"])?;
    let mut rows = 0;
    for lut in registry.iter() {
        let mut phases = lut.phases().to_vec();
        phases.sort_by_key(|p| p.address);
        for p in phases {
            w.write_record([
                lut.dimension().to_string(),
                p.address.to_string(),
                p.phase.to_string(),
                p.exact_factor.to_string(),
                p.exponent.to_string(),
            ])?;
            rows += 1;
        }
    }
    w.flush().map_err(|e| Error::io("<lut output>", e))?;
    Ok(rows)
}

/// The next `count` register words of one LFSR, one per line.
pub fn rng_emit(
    bits: u32,
    taps: Option<&[u32]>,
    seed: u32,
    count: u64,
    mut out: impl Write,
) -> Result<()> {
    let spec = match taps {
        Some(t) => LfsrSpec::new(bits, t, seed)?,
        None => LfsrSpec::with_default_taps(bits, seed)?,
    };
    let mut g = LfsrState::new(spec);
    for _ in 0..count {
        writeln!(out, "{}", g.step()).map_err(|e| Error::io("<rng output>", e))?;
    }
    Ok(())
}
