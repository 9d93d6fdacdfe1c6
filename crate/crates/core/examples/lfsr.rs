//! Step a few LFSRs, measure their periods and show how a non-maximal tap set
//! splits the state space.

use zoperturb::rng::{default_taps, lfsr_period, LfsrSpec, LfsrState};

fn main() -> zoperturb::Result<()> {
    let mut g = LfsrState::new(LfsrSpec::with_default_taps(8, 1)?);
    let words: Vec<u32> = (0..8).map(|_| g.step()).collect();
    println!(
        "8-bit, taps {:?}, seed 1: {words:?}",
        default_taps(8).unwrap()
    );

    for bits in [4, 8, 12, 16] {
        let spec = LfsrSpec::with_default_taps(bits, 1)?;
        println!("{bits:>2} bits: period {}", lfsr_period(&spec, 1 << 20)?);
    }

    let periods: Vec<u64> = (1..16)
        .map(|s| lfsr_period(&LfsrSpec::new(4, &[4, 2], s).unwrap(), 64).unwrap())
        .collect();
    println!("taps [4, 2] by seed: {periods:?}");
    Ok(())
}
