//! Static storage accounting for the providers on a 1M-parameter model.

use zoperturb::perturb::{resource_report, ProviderConfig};

fn main() -> zoperturb::Result<()> {
    let segments = [1_000_000];
    for pc in [
        ProviderConfig::gaussian(),
        ProviderConfig::pool(4095),
        ProviderConfig::otf(31, 8),
        ProviderConfig::otf(31, 14),
    ] {
        let r = resource_report(&pc, &segments)?;
        println!(
            "{:<8} generators {:>2} x {:>2} bits, pool {:>4}, LUT slots {:>5}, stored bits {:>6}, values/step {}",
            r.provider.name(),
            r.generator_count,
            r.bit_width,
            r.pool_entries,
            r.lut_entries,
            r.stored_bits_total,
            r.distinct_random_values_per_step
        );
    }
    Ok(())
}
