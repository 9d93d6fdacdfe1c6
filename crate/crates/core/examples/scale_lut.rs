//! Build the phase-addressed scale LUT for a tiny array and print it.

use zoperturb::modscale::build_scale_lut;
use zoperturb::perturb::ArraySpec;

fn main() -> zoperturb::Result<()> {
    let spec = ArraySpec::new(4, None, vec![1, 6, 11], true)?;
    let lut = build_scale_lut(&spec, 12)?;
    println!("{} slots, {} valid", lut.len(), lut.valid_entries());
    println!("phase address exact_factor exponent");
    for p in lut.phases() {
        println!(
            "{:>5} {:>7} {:>12.6} {:>8}",
            p.phase, p.address, p.exact_factor, p.exponent
        );
    }
    Ok(())
}
