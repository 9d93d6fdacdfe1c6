//! On-the-fly perturbations from an LFSR array: the pointer rotates every
//! cycle and the LUT exponent comes from generator 0's word.

use zoperturb::modscale::{build_scale_lut, expected_gaussian_norm};
use zoperturb::perturb::{ArraySpec, RngArray};

fn main() -> zoperturb::Result<()> {
    let d = 100;
    let spec = ArraySpec::from_master_seed(8, None, 7, 42, true)?;
    let lut = build_scale_lut(&spec, d)?;
    let mut array = RngArray::new(spec);
    println!("target norm {:.4}", expected_gaussian_norm(d));
    for _ in 0..5 {
        let (addr, ptr) = (array.address(), array.pointer());
        let v = array.next_perturbation(&lut, d)?;
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        println!(
            "address {addr:>3} pointer {ptr} exponent {:>2} norm {norm:.4}",
            lut.query(addr)?
        );
    }
    Ok(())
}
