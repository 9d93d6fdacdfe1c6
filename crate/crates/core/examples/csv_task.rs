//! Load a labelled CSV, draw a few-shot split and train an MLP on it.

use std::path::Path;

use zoperturb::engine::{train, ZoConfig};
use zoperturb::perturb::{PerturbationProvider, ProviderConfig};
use zoperturb::tasks::{ingest_csv, mlp_task, FewShotSpec, Task};

fn main() -> zoperturb::Result<()> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/toy.csv");
    let data = ingest_csv(&path, "label")?;
    println!(
        "{} rows, features {:?}, classes {:?}",
        data.len(),
        data.feature_names(),
        data.class_names()
    );
    let spec = FewShotSpec {
        k: 4,
        k_val: 2,
        test_cap: 100,
        seed: 3,
    };
    let task = mlp_task(&data, &[8], &spec)?;
    let cfg = ZoConfig {
        lr: 1e-2,
        steps: 500,
        ..ZoConfig::default()
    };
    let mut p = PerturbationProvider::new(&ProviderConfig::otf(7, 8), &task.segment_lengths(), 0)?;
    let r = train(&task, &mut p, &cfg)?;
    println!("d = {}, test accuracy {:.3}", r.dimension, r.final_metric);
    Ok(())
}
