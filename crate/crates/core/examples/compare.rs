//! Compare providers across seeds using the shipped logistic configs.

use std::path::Path;

use zoperturb::bench::{compare_runs, ExperimentConfig};

fn main() -> zoperturb::Result<()> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let configs = ["gaussian", "pool", "otf", "uniform_int"]
        .iter()
        .map(|p| ExperimentConfig::load(dir.join(format!("logistic_{p}.toml"))))
        .collect::<zoperturb::Result<Vec<_>>>()?;
    let table = compare_runs(&configs)?;
    for s in &table.summary {
        println!(
            "{:<12} {} {:.4} ± {:.4} over {} seeds",
            s.label, table.metric_name, s.mean_final_metric, s.std_final_metric, s.runs
        );
    }
    Ok(())
}
