//! Pool-size sweep on the MLP task, aggregated over the config's seeds.

use std::path::Path;

use zoperturb::bench::{sweep_cells, ExperimentConfig, SweepAxis};

fn main() -> zoperturb::Result<()> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/mlp_pool.toml");
    let mut cfg = ExperimentConfig::load(path)?;
    cfg.zo.steps = 500;
    let (result, _) = sweep_cells(
        &cfg,
        SweepAxis::PoolSize,
        &[255, 1023, 4095],
        &cfg.run_seeds(),
    )?;
    for c in &result.cells {
        println!(
            "pool_size {:>5}: final loss {:.4} ± {:.4} ({} runs)",
            c.value, c.mean_final_loss, c.std_final_loss, c.usable
        );
    }
    Ok(())
}
