//! Expected Gaussian norm and the two ways of rescaling a uniform vector to
//! it: the exact factor and its nearest power of two.

use zoperturb::modscale::{expected_gaussian_norm, pow2, round_pow2, scale_factor};
use zoperturb::rng::SplitMix64;

fn main() -> zoperturb::Result<()> {
    let mut rng = SplitMix64::new(7);
    println!(
        "{:>6} {:>10} {:>10} {:>10} {:>4} {:>8}",
        "d", "E|z|", "|u|", "factor", "exp", "ratio"
    );
    for d in [1, 7, 64, 738, 4096, 1_000_000] {
        let target = expected_gaussian_norm(d);
        let u: Vec<f64> = (0..d).map(|_| rng.next_unit()).collect();
        let n = u.iter().map(|x| x * x).sum::<f64>().sqrt();
        let s = scale_factor(target, n)?;
        let e = round_pow2(s)?;
        // after a power-of-two shift the norm is within a factor sqrt(2) of target
        println!(
            "{d:>6} {target:>10.4} {n:>10.4} {s:>10.4} {e:>4} {:>8.4}",
            pow2(e) * n / target
        );
    }
    Ok(())
}
