//! A pre-generated pool read as a wrap-around stream. Consecutive
//! perturbations overlap in values but start at different offsets.

use zoperturb::perturb::pool_build;

fn main() -> zoperturb::Result<()> {
    let d = 10;
    let mut pool = pool_build(3, 15, d)?;
    for _ in 0..4 {
        let start = pool.cursor();
        let v = pool.next_perturbation(d)?;
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let shown: Vec<String> = v.iter().take(4).map(|x| format!("{x:+.3}")).collect();
        println!(
            "offset {start:>2}: [{} ...] norm {norm:.4}",
            shown.join(", ")
        );
    }
    Ok(())
}
