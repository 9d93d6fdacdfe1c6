use serde::{Deserialize, Serialize};

use super::data::{fisher_yates, Dataset};
use crate::error::{Error, Result};
use crate::rng::SplitMix64;

fn default_test_cap() -> usize {
    1000
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FewShotSpec {
    /// Training rows per class.
    pub k: usize,
    /// Validation rows per class.
    pub k_val: usize,
    #[serde(default = "default_test_cap")]
    pub test_cap: usize,
    pub seed: u64,
}

impl FewShotSpec {
    pub fn new(k: usize, seed: u64) -> Self {
        Self {
            k,
            k_val: k,
            test_cap: default_test_cap(),
            seed,
        }
    }
}

/// Disjoint row indices into the source dataset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FewShotSplits {
    pub train: Vec<usize>,
    pub validation: Vec<usize>,
    pub test: Vec<usize>,
}

/// Per class, shuffles that class's rows and takes `k` for training and the
/// next `k_val` for validation. The test split is drawn from what remains.
pub fn few_shot_sample(data: &Dataset, spec: &FewShotSpec) -> Result<FewShotSplits> {
    if spec.k == 0 {
        return Err(Error::InvalidConfig("few-shot k must be at least 1".into()));
    }
    let mut rng = SplitMix64::new(spec.seed);
    let mut train = Vec::new();
    let mut validation = Vec::new();
    let mut rest = Vec::new();
    for c in 0..data.class_count() {
        let mut rows: Vec<usize> = (0..data.len()).filter(|&i| data.label(i) == c).collect();
        let need = spec.k + spec.k_val;
        if rows.len() < need {
            return Err(Error::InsufficientData(format!(
                "class {} has {} rows, {need} needed",
                data.class_names()[c],
                rows.len()
            )));
        }
        fisher_yates(&mut rows, &mut rng);
        train.extend_from_slice(&rows[..spec.k]);
        validation.extend_from_slice(&rows[spec.k..need]);
        rest.extend_from_slice(&rows[need..]);
    }
    fisher_yates(&mut rest, &mut rng);
    rest.truncate(spec.test_cap);
    if rest.is_empty() {
        return Err(Error::InsufficientData(
            "no rows left for the test split".into(),
        ));
    }
    // interleave classes so that any prefix of the training split is mixed
    fisher_yates(&mut train, &mut rng);
    Ok(FewShotSplits {
        train,
        validation,
        test: rest,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tasks::{synthetic_blobs, BlobSpec};
    use std::collections::HashSet;

    fn blobs() -> Dataset {
        synthetic_blobs(&BlobSpec {
            per_class: 100,
            features: 3,
            classes: 2,
            separation: 2.0,
            seed: 1,
        })
        .unwrap()
    }

    #[test]
    fn counts() {
        let ds = blobs();
        let s = few_shot_sample(&ds, &FewShotSpec::new(16, 3)).unwrap();
        assert_eq!(s.train.len(), 32);
        assert_eq!(s.validation.len(), 32);
        assert_eq!(s.test.len(), 200 - 64);
        for c in 0..2 {
            assert_eq!(s.train.iter().filter(|&&i| ds.label(i) == c).count(), 16);
        }
        let capped = FewShotSpec {
            test_cap: 10,
            ..FewShotSpec::new(16, 3)
        };
        assert_eq!(few_shot_sample(&ds, &capped).unwrap().test.len(), 10);
    }

    #[test]
    fn disjoint_and_deterministic() {
        let ds = blobs();
        let spec = FewShotSpec::new(8, 11);
        let s = few_shot_sample(&ds, &spec).unwrap();
        assert_eq!(s, few_shot_sample(&ds, &spec).unwrap());
        assert_ne!(s, few_shot_sample(&ds, &FewShotSpec::new(8, 12)).unwrap());
        let mut all = HashSet::new();
        for i in s.train.iter().chain(&s.validation).chain(&s.test) {
            assert!(all.insert(*i));
        }
    }

    #[test]
    fn too_few_rows() {
        let ds = blobs();
        assert!(matches!(
            few_shot_sample(&ds, &FewShotSpec::new(60, 1)),
            Err(Error::InsufficientData(_))
        ));
    }
}
