use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{GaussianStream, SplitMix64};

pub const VARIANCE_FLOOR: f64 = 1e-8;

/// Row-major labelled feature matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: Vec<f64>,
    n_features: usize,
    labels: Vec<usize>,
    class_count: usize,
    feature_names: Vec<String>,
    class_names: Vec<String>,
}

impl Dataset {
    pub fn new(
        features: Vec<f64>,
        n_features: usize,
        labels: Vec<usize>,
        class_count: usize,
    ) -> Result<Self> {
        if n_features == 0 || features.len() != labels.len() * n_features {
            return Err(Error::InvalidConfig(format!(
                "{} feature values do not form {} rows of {n_features}",
                features.len(),
                labels.len()
            )));
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= class_count) {
            return Err(Error::InvalidConfig(format!(
                "label {bad} out of range for {class_count} classes"
            )));
        }
        if features.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidConfig("features must be finite".into()));
        }
        Ok(Self {
            features,
            n_features,
            labels,
            class_count,
            feature_names: (0..n_features).map(|i| format!("x{i}")).collect(),
            class_names: (0..class_count).map(|c| c.to_string()).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn class_count(&self) -> usize {
        self.class_count
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.n_features..(i + 1) * self.n_features]
    }

    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    /// Rows `idx` in order, as a new dataset with the same schema.
    pub fn subset(&self, idx: &[usize]) -> Self {
        let mut features = Vec::with_capacity(idx.len() * self.n_features);
        for &i in idx {
            features.extend_from_slice(self.row(i));
        }
        Self {
            features,
            n_features: self.n_features,
            labels: idx.iter().map(|&i| self.labels[i]).collect(),
            class_count: self.class_count,
            feature_names: self.feature_names.clone(),
            class_names: self.class_names.clone(),
        }
    }

    pub fn class_population(&self, class: usize) -> usize {
        self.labels.iter().filter(|&&l| l == class).count()
    }
}

/// Reads a CSV with a header row. Every column except `label_column` must be
/// numeric; labels are mapped to ids in sorted order of their spelling.
pub fn ingest_csv(path: impl AsRef<Path>, label_column: &str) -> Result<Dataset> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::io(path, io),
            other => Error::Ingest {
                row: 1,
                column: String::new(),
                message: format!("{other:?}"),
            },
        })?;
    let headers: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    let label_idx = headers
        .iter()
        .position(|h| h == label_column)
        .ok_or_else(|| Error::Ingest {
            row: 1,
            column: label_column.to_string(),
            message: "label column not in header".into(),
        })?;

    let mut features = Vec::new();
    let mut raw_labels = Vec::new();
    for record in reader.records() {
        let record = record?;
        let row = record.position().map_or(0, |p| p.line() as usize);
        if record.len() != headers.len() {
            return Err(Error::Ingest {
                row,
                column: String::new(),
                message: format!("expected {} cells, found {}", headers.len(), record.len()),
            });
        }
        for (j, cell) in record.iter().enumerate() {
            let fail = |message: String| Error::Ingest {
                row,
                column: headers[j].clone(),
                message,
            };
            if cell.is_empty() {
                return Err(fail("missing value".into()));
            }
            if j == label_idx {
                raw_labels.push(cell.to_string());
                continue;
            }
            let x: f64 = cell
                .parse()
                .map_err(|_| fail(format!("not a number: {cell:?}")))?;
            if !x.is_finite() {
                return Err(fail(format!("non-finite value {cell:?}")));
            }
            features.push(x);
        }
    }
    if raw_labels.is_empty() {
        return Err(Error::InsufficientData(format!(
            "{} has no data rows",
            path.display()
        )));
    }

    let class_names: Vec<String> = raw_labels
        .iter()
        .cloned()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let labels = raw_labels
        .iter()
        .map(|l| class_names.binary_search(l).expect("label collected above"))
        .collect();
    let feature_names: Vec<String> = headers
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != label_idx)
        .map(|(_, h)| h.clone())
        .collect();
    let mut ds = Dataset::new(features, feature_names.len(), labels, class_names.len())?;
    ds.feature_names = feature_names;
    ds.class_names = class_names;
    Ok(ds)
}

/// Per-feature z-score transform.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub scale: Vec<f64>,
}

impl Standardizer {
    /// Statistics over the given rows only.
    pub fn fit(data: &Dataset, rows: &[usize]) -> Self {
        let f = data.n_features();
        let n = rows.len().max(1) as f64;
        let mut mean = vec![0.0; f];
        for &i in rows {
            for (m, x) in mean.iter_mut().zip(data.row(i)) {
                *m += x;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut var = vec![0.0; f];
        for &i in rows {
            for ((v, x), m) in var.iter_mut().zip(data.row(i)).zip(&mean) {
                *v += (x - m) * (x - m);
            }
        }
        let scale = var
            .into_iter()
            .map(|v| (v / n).max(VARIANCE_FLOOR).sqrt())
            .collect();
        Self { mean, scale }
    }

    pub fn transform(&self, data: &Dataset) -> Dataset {
        let mut out = data.clone();
        for row in out.features.chunks_mut(data.n_features) {
            for ((x, m), s) in row.iter_mut().zip(&self.mean).zip(&self.scale) {
                *x = (*x - m) / s;
            }
        }
        out
    }
}

/// Gaussian class clusters with unit covariance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlobSpec {
    pub per_class: usize,
    pub features: usize,
    pub classes: usize,
    /// Distance between class means.
    pub separation: f64,
    pub seed: u64,
}

pub fn synthetic_blobs(spec: &BlobSpec) -> Result<Dataset> {
    if spec.classes < 2 || spec.features == 0 || spec.per_class == 0 {
        return Err(Error::InvalidConfig(
            "blobs need at least 2 classes, 1 feature and 1 row per class".into(),
        ));
    }
    let mut g = GaussianStream::new(spec.seed);
    // random unit directions; for two classes the means sit at +-sep/2 on one axis
    let means: Vec<Vec<f64>> = if spec.classes == 2 {
        let dir = unit_vector(&mut g, spec.features);
        [0.5, -0.5]
            .iter()
            .map(|s| dir.iter().map(|x| x * s * spec.separation).collect())
            .collect()
    } else {
        (0..spec.classes)
            .map(|_| {
                let dir = unit_vector(&mut g, spec.features);
                dir.iter()
                    .map(|x| x * spec.separation * std::f64::consts::FRAC_1_SQRT_2)
                    .collect()
            })
            .collect()
    };
    let n = spec.per_class * spec.classes;
    let mut order: Vec<usize> = (0..n).map(|i| i % spec.classes).collect();
    let mut shuffle = SplitMix64::new(spec.seed ^ 0xB10B);
    fisher_yates(&mut order, &mut shuffle);

    let mut features = Vec::with_capacity(n * spec.features);
    for &c in &order {
        for &m in &means[c] {
            features.push(m + g.next_gaussian());
        }
    }
    Dataset::new(features, spec.features, order, spec.classes)
}

fn unit_vector(g: &mut GaussianStream, d: usize) -> Vec<f64> {
    let v: Vec<f64> = (0..d).map(|_| g.next_gaussian()).collect();
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / n).collect()
}

pub(crate) fn fisher_yates<T>(v: &mut [T], rng: &mut SplitMix64) {
    for i in (1..v.len()).rev() {
        let j = rng.next_below(i as u64 + 1) as usize;
        v.swap(i, j);
    }
}
