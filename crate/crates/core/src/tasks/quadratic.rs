use super::{Split, Task};
use crate::engine::ParameterVector;
use crate::rng::SplitMix64;
use crate::tasks::data::fisher_yates;

/// `f(θ) = ½ θᵀAθ` with diagonal `A`.
#[derive(Debug, Clone)]
pub struct QuadraticTask {
    eigenvalues: Vec<f64>,
    init: f64,
    layout: Vec<(String, usize)>,
}

/// Diagonal quadratic whose eigenvalues are log-spaced over
/// `[1, condition_number]` and assigned to coordinates in a seeded order.
pub fn quadratic_task(d: usize, condition_number: f64, seed: u64) -> QuadraticTask {
    assert!(d >= 1, "quadratic needs d >= 1");
    assert!(condition_number >= 1.0, "condition number must be >= 1");
    let mut eigenvalues: Vec<f64> = (0..d)
        .map(|i| {
            if d == 1 {
                1.0
            } else {
                condition_number.powf(i as f64 / (d - 1) as f64)
            }
        })
        .collect();
    fisher_yates(&mut eigenvalues, &mut SplitMix64::new(seed));
    QuadraticTask {
        eigenvalues,
        init: 5.0,
        layout: vec![("theta".into(), d)],
    }
}

impl QuadraticTask {
    /// Starting point `(v, ..., v)`.
    pub fn with_init(mut self, v: f64) -> Self {
        self.init = v;
        self
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Analytic `Aθ`, for checking estimators against.
    pub fn gradient(&self, theta: &[f64]) -> Vec<f64> {
        theta
            .iter()
            .zip(&self.eigenvalues)
            .map(|(t, l)| t * l)
            .collect()
    }

    pub fn value(&self, theta: &[f64]) -> f64 {
        0.5 * theta
            .iter()
            .zip(&self.eigenvalues)
            .map(|(t, l)| l * t * t)
            .sum::<f64>()
    }
}

impl Task for QuadraticTask {
    fn name(&self) -> &str {
        "quadratic"
    }

    fn layout(&self) -> &[(String, usize)] {
        &self.layout
    }

    fn initial_params(&self) -> ParameterVector {
        ParameterVector::new(vec![self.init; self.eigenvalues.len()], &self.layout)
            .expect("layout matches dimension")
    }

    fn train_len(&self) -> usize {
        0
    }

    fn loss(&self, theta: &[f64], _batch: &[usize]) -> f64 {
        self.value(theta)
    }

    fn metric(&self, theta: &[f64], _split: Split) -> f64 {
        self.value(theta)
    }

    fn metric_name(&self) -> &'static str {
        "loss"
    }
}
