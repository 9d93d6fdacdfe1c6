//! Train few-shot logistic regression on synthetic blobs with each provider.

use zoperturb::engine::{train, ZoConfig};
use zoperturb::perturb::{PerturbationProvider, ProviderConfig, ProviderKind};
use zoperturb::tasks::{logistic_task, synthetic_blobs, BlobSpec, FewShotSpec, Task};

fn main() -> zoperturb::Result<()> {
    let data = synthetic_blobs(&BlobSpec {
        per_class: 400,
        features: 50,
        classes: 2,
        separation: 6.0,
        seed: 7,
    })?;
    let task = logistic_task(&data, &FewShotSpec::new(16, 1))?;
    let cfg = ZoConfig {
        steps: 1000,
        master_seed: 1,
        ..ZoConfig::default()
    };
    let providers = [
        ProviderConfig::gaussian(),
        ProviderConfig::pool(4095),
        ProviderConfig::otf(31, 8),
        ProviderConfig::new(ProviderKind::UniformInt),
    ];
    for pc in providers {
        let mut p = PerturbationProvider::new(&pc, &task.segment_lengths(), cfg.master_seed)?;
        let r = train(&task, &mut p, &cfg)?;
        println!(
            "{:<12} loss {:.4} -> {:.4}, test accuracy {:.3}, diverged {}",
            pc.provider, r.initial_loss, r.final_loss, r.final_metric, r.diverged
        );
    }
    Ok(())
}
