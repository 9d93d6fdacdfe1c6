//! Two-point estimates on a quadratic, checked against the analytic
//! gradient, followed by a few ZO-SGD steps.

use zoperturb::engine::{estimate_gradient, zo_sgd_step, ZoConfig};
use zoperturb::perturb::{PerturbationProvider, ProviderConfig};
use zoperturb::tasks::{quadratic_task, Task};

fn main() -> zoperturb::Result<()> {
    let task = quadratic_task(20, 10.0, 1);
    let mut theta = task.initial_params();
    let mut provider = PerturbationProvider::new(&ProviderConfig::otf(31, 8), &[20], 5)?;
    let cfg = ZoConfig {
        lr: 0.01,
        materialize: true,
        ..ZoConfig::default()
    };

    let grad = task.gradient(theta.values());
    let q = estimate_gradient(|t| task.value(t), &mut theta, &mut provider, &cfg)?;
    let u = q[0].direction.as_ref().unwrap();
    let exact: f64 = u.iter().zip(&grad).map(|(a, b)| a * b).sum();
    println!("g = {:.9}, u·∇f = {exact:.9}", q[0].coefficient);

    let cfg = ZoConfig {
        materialize: false,
        ..cfg
    };
    for step in 1..=200 {
        let q = estimate_gradient(|t| task.value(t), &mut theta, &mut provider, &cfg)?;
        zo_sgd_step(&mut theta, &q, &cfg, &mut provider)?;
        if step % 50 == 0 {
            println!("step {step:>3}: f = {:.4}", task.value(theta.values()));
        }
    }
    Ok(())
}
