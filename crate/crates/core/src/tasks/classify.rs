use super::data::{Dataset, Standardizer};
use super::fewshot::{few_shot_sample, FewShotSpec, FewShotSplits};
use super::{Split, Task};
use crate::engine::ParameterVector;
use crate::error::{Error, Result};
use crate::rng::{derive_seed, SplitMix64};

const MAX_DIMENSION: usize = 1_000_000;
const INIT_STREAM: u64 = 0x494E_4954;

/// Fully connected softmax classifier over few-shot splits. With no hidden
/// layers it is multinomial logistic regression.
#[derive(Debug, Clone)]
pub struct ClassifierTask {
    name: &'static str,
    train: Dataset,
    validation: Dataset,
    test: Dataset,
    splits: FewShotSplits,
    standardizer: Standardizer,
    /// Layer widths from input to output.
    widths: Vec<usize>,
    layout: Vec<(String, usize)>,
    init: Vec<f64>,
}

/// Multinomial logistic regression, `d = (features + 1) * classes`,
/// initialized at zero.
pub fn logistic_task(data: &Dataset, few_shot: &FewShotSpec) -> Result<ClassifierTask> {
    ClassifierTask::build("logistic", data, &[], few_shot)
}

/// Tanh network with the given hidden widths and Xavier-uniform initial
/// weights drawn from the few-shot seed.
pub fn mlp_task(
    data: &Dataset,
    hidden: &[usize],
    few_shot: &FewShotSpec,
) -> Result<ClassifierTask> {
    if hidden.is_empty() || hidden.contains(&0) {
        return Err(Error::InvalidConfig(
            "MLP hidden sizes must be nonempty and positive".into(),
        ));
    }
    ClassifierTask::build("mlp", data, hidden, few_shot)
}

impl ClassifierTask {
    fn build(
        name: &'static str,
        data: &Dataset,
        hidden: &[usize],
        few_shot: &FewShotSpec,
    ) -> Result<Self> {
        let splits = few_shot_sample(data, few_shot)?;
        let standardizer = Standardizer::fit(data, &splits.train);
        let scaled = standardizer.transform(data);

        let mut widths = vec![data.n_features()];
        widths.extend_from_slice(hidden);
        widths.push(data.class_count());
        let mut layout = Vec::new();
        for (l, w) in widths.windows(2).enumerate() {
            let (fan_in, fan_out) = (w[0], w[1]);
            let prefix = if hidden.is_empty() {
                String::new()
            } else {
                format!("layer{l}.")
            };
            layout.push((format!("{prefix}weight"), fan_in * fan_out));
            layout.push((format!("{prefix}bias"), fan_out));
        }
        let d: usize = layout.iter().map(|s| s.1).sum();
        if d > MAX_DIMENSION {
            return Err(Error::InvalidConfig(format!(
                "model has {d} parameters, limit is {MAX_DIMENSION}"
            )));
        }

        let mut init = vec![0.0; d];
        if !hidden.is_empty() {
            let mut rng = SplitMix64::new(derive_seed(few_shot.seed, INIT_STREAM));
            let mut at = 0;
            for w in widths.windows(2) {
                let a = (6.0 / (w[0] + w[1]) as f64).sqrt();
                for x in &mut init[at..at + w[0] * w[1]] {
                    *x = a * rng.next_unit();
                }
                at += w[0] * w[1] + w[1];
            }
        }

        Ok(Self {
            name,
            train: scaled.subset(&splits.train),
            validation: scaled.subset(&splits.validation),
            test: scaled.subset(&splits.test),
            splits,
            standardizer,
            widths,
            layout,
            init,
        })
    }

    pub fn splits(&self) -> &FewShotSplits {
        &self.splits
    }

    pub fn standardizer(&self) -> &Standardizer {
        &self.standardizer
    }

    pub fn class_count(&self) -> usize {
        *self.widths.last().expect("output layer")
    }

    pub fn split(&self, split: Split) -> &Dataset {
        match split {
            Split::Train => &self.train,
            Split::Validation => &self.validation,
            Split::Test => &self.test,
        }
    }

    /// Output logits for one standardized row.
    fn forward(&self, theta: &[f64], x: &[f64], bufs: &mut [Vec<f64>; 2]) -> usize {
        let layers = self.widths.len() - 1;
        let mut at = 0;
        bufs[0].clear();
        bufs[0].extend_from_slice(x);
        let mut cur = 0;
        for (l, w) in self.widths.windows(2).enumerate() {
            let (fan_in, fan_out) = (w[0], w[1]);
            let (weights, rest) = theta[at..].split_at(fan_in * fan_out);
            let bias = &rest[..fan_out];
            at += fan_in * fan_out + fan_out;
            let (src, dst) = if cur == 0 {
                let (a, b) = bufs.split_at_mut(1);
                (&a[0], &mut b[0])
            } else {
                let (a, b) = bufs.split_at_mut(1);
                (&b[0], &mut a[0])
            };
            dst.clear();
            for (o, row) in weights.chunks_exact(fan_in).enumerate() {
                let mut z = bias[o];
                for (wv, a) in row.iter().zip(src.iter()) {
                    z += wv * a;
                }
                dst.push(if l + 1 < layers { z.tanh() } else { z });
            }
            cur = 1 - cur;
        }
        cur
    }

    fn cross_entropy(logits: &[f64], label: usize) -> f64 {
        let m = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lse = m + logits.iter().map(|z| (z - m).exp()).sum::<f64>().ln();
        lse - logits[label]
    }

    fn mean_loss(&self, theta: &[f64], data: &Dataset, rows: impl Iterator<Item = usize>) -> f64 {
        let mut bufs = [Vec::new(), Vec::new()];
        let mut total = 0.0;
        let mut n = 0usize;
        for i in rows {
            let out = self.forward(theta, data.row(i), &mut bufs);
            total += Self::cross_entropy(&bufs[out], data.label(i));
            n += 1;
        }
        total / n as f64
    }

    pub fn accuracy(&self, theta: &[f64], split: Split) -> f64 {
        let data = self.split(split);
        if data.is_empty() {
            return f64::NAN;
        }
        let mut bufs = [Vec::new(), Vec::new()];
        let mut correct = 0usize;
        for i in 0..data.len() {
            let out = self.forward(theta, data.row(i), &mut bufs);
            let logits = &bufs[out];
            let mut best = 0;
            for (c, &z) in logits.iter().enumerate() {
                if z > logits[best] {
                    best = c;
                }
            }
            correct += usize::from(best == data.label(i));
        }
        correct as f64 / data.len() as f64
    }

    pub fn split_loss(&self, theta: &[f64], split: Split) -> f64 {
        let data = self.split(split);
        self.mean_loss(theta, data, 0..data.len())
    }
}

impl Task for ClassifierTask {
    fn name(&self) -> &str {
        self.name
    }

    fn layout(&self) -> &[(String, usize)] {
        &self.layout
    }

    fn initial_params(&self) -> ParameterVector {
        ParameterVector::new(self.init.clone(), &self.layout).expect("layout matches init")
    }

    fn train_len(&self) -> usize {
        self.train.len()
    }

    fn loss(&self, theta: &[f64], batch: &[usize]) -> f64 {
        self.mean_loss(theta, &self.train, batch.iter().copied())
    }

    fn train_loss(&self, theta: &[f64]) -> f64 {
        self.split_loss(theta, Split::Train)
    }

    fn metric(&self, theta: &[f64], split: Split) -> f64 {
        self.accuracy(theta, split)
    }

    fn metric_name(&self) -> &'static str {
        "accuracy"
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tasks::{synthetic_blobs, BlobSpec};
    use proptest::prelude::*;

    fn blobs(features: usize) -> Dataset {
        synthetic_blobs(&BlobSpec {
            per_class: 80,
            features,
            classes: 2,
            separation: 3.0,
            seed: 9,
        })
        .unwrap()
    }

    #[test]
    fn mlp_parameter_count() {
        let t = mlp_task(&blobs(20), &[32], &FewShotSpec::new(16, 1)).unwrap();
        assert_eq!(t.dimension(), 738);
        let lens: Vec<usize> = t.layout().iter().map(|s| s.1).collect();
        assert_eq!(lens, vec![640, 32, 64, 2]);
        assert!(mlp_task(&blobs(20), &[], &FewShotSpec::new(16, 1)).is_err());
    }

    #[test]
    fn logistic_dimension() {
        let t = logistic_task(&blobs(7), &FewShotSpec::new(16, 1)).unwrap();
        assert_eq!(t.dimension(), 16);
        assert_eq!(t.train_len(), 32);
    }

    #[test]
    fn zero_weights_give_log_class_count() {
        let t = mlp_task(&blobs(20), &[32], &FewShotSpec::new(16, 1)).unwrap();
        let zero = vec![0.0; t.dimension()];
        assert!((t.train_loss(&zero) - 2f64.ln()).abs() < 1e-15);
        let l = logistic_task(&blobs(5), &FewShotSpec::new(16, 1)).unwrap();
        assert!((l.train_loss(l.initial_params().values()) - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn loss_is_pure() {
        let t = mlp_task(&blobs(6), &[5, 4], &FewShotSpec::new(10, 2)).unwrap();
        let theta = t.initial_params();
        let a = t.loss(theta.values(), &[3, 1, 4, 1, 5]);
        let b = t.loss(theta.values(), &[3, 1, 4, 1, 5]);
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn logits_match_hand_computation() {
        let ds = Dataset::new(
            vec![1.0, 2.0, -1.0, 0.0, 0.5, 1.0, 3.0, -2.0],
            2,
            vec![0, 1, 0, 1],
            2,
        )
        .unwrap();
        let t = logistic_task(
            &ds,
            &FewShotSpec {
                k: 1,
                k_val: 0,
                test_cap: 10,
                seed: 0,
            },
        )
        .unwrap();
        // weight rows per class, then bias
        let theta = [0.5, -1.0, 2.0, 0.25, 0.1, -0.3];
        let i = 0;
        let x = t.split(Split::Train).row(i).to_vec();
        let z0 = 0.5 * x[0] - 1.0 * x[1] + 0.1;
        let z1 = 2.0 * x[0] + 0.25 * x[1] - 0.3;
        let y = t.split(Split::Train).label(i);
        let z = [z0, z1];
        let expect = (z0.exp() + z1.exp()).ln() - z[y];
        assert!((t.loss(&theta, &[i]) - expect).abs() < 1e-12);
    }

    #[test]
    fn normalization_fitted_on_train_only() {
        let ds = blobs(4);
        let spec = FewShotSpec::new(16, 5);
        let t = logistic_task(&ds, &spec).unwrap();
        let direct = Standardizer::fit(&ds, &t.splits().train);
        assert_eq!(t.standardizer(), &direct);
        let train = t.split(Split::Train);
        for j in 0..4 {
            let m: f64 =
                (0..train.len()).map(|i| train.row(i)[j]).sum::<f64>() / train.len() as f64;
            assert!(m.abs() < 1e-12);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn logistic_loss_is_convex(seed in 0u64..1000, lambda in 0.01f64..0.99) {
            let t = logistic_task(&blobs(5), &FewShotSpec::new(16, 3)).unwrap();
            let mut rng = SplitMix64::new(seed);
            let d = t.dimension();
            let a: Vec<f64> = (0..d).map(|_| 4.0 * rng.next_unit()).collect();
            let b: Vec<f64> = (0..d).map(|_| 4.0 * rng.next_unit()).collect();
            let mix: Vec<f64> = a.iter().zip(&b).map(|(x, y)| lambda * x + (1.0 - lambda) * y).collect();
            let lhs = t.train_loss(&mix);
            let rhs = lambda * t.train_loss(&a) + (1.0 - lambda) * t.train_loss(&b);
            prop_assert!(lhs <= rhs + 1e-12);
        }
    }
}
