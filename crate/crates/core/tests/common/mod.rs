#![allow(dead_code)]

use std::path::{Path, PathBuf};

/// Small quadratic experiment writing into `out`.
pub fn quadratic_toml(out: &Path, provider: &str, steps: u64) -> String {
    format!(
        r#"output_dir = "{}"

[task]
kind = "quadratic"
d = 20
init = 5.0

[provider]
provider = "{provider}"

[zo]
epsilon = 1e-3
lr = 0.05
steps = {steps}
eval_every = 50
master_seed = 1
"#,
        out.display()
    )
}

/// Few-shot logistic regression on small blobs.
pub fn logistic_toml(out: &Path, provider: &str, steps: u64, seeds: &[u64]) -> String {
    let seeds: Vec<String> = seeds.iter().map(u64::to_string).collect();
    format!(
        r#"output_dir = "{}"
seeds = [{}]

[task]
kind = "logistic"

[task.data]
source = "blobs"
per_class = 200
features = 16
separation = 4.0
seed = 3

[task.few_shot]
k = 8
test_cap = 200

[provider]
provider = "{provider}"
n_rngs = 7
bits = 8
pool_size = 1023

[zo]
epsilon = 1e-3
lr = 1e-2
steps = {steps}
eval_every = 25
master_seed = 1
"#,
        out.display(),
        seeds.join(", ")
    )
}

pub fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}
