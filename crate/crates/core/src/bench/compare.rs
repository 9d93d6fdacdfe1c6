use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::run::{execute, fmt_real, write_json};
use super::sweep::mean_std;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareRow {
    pub label: String,
    pub seed: u64,
    pub diverged: bool,
    #[serde(with = "crate::engine::real")]
    pub final_loss: f64,
    #[serde(with = "crate::engine::real")]
    pub final_metric: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareSummary {
    pub label: String,
    pub runs: usize,
    pub diverged: usize,
    /// Over every run, diverged ones included.
    #[serde(with = "crate::engine::real")]
    pub mean_final_metric: f64,
    #[serde(with = "crate::engine::real")]
    pub std_final_metric: f64,
    /// Over runs that did not diverge.
    #[serde(with = "crate::engine::real")]
    pub mean_final_loss: f64,
    #[serde(with = "crate::engine::real")]
    pub std_final_loss: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub metric_name: String,
    pub seeds: Vec<u64>,
    pub rows: Vec<CompareRow>,
    pub summary: Vec<CompareSummary>,
}

impl Comparison {
    pub fn summary_for(&self, label: &str) -> Option<&CompareSummary> {
        self.summary.iter().find(|s| s.label == label)
    }
}

/// Provider names, suffixed with the position when a provider repeats.
fn labels(configs: &[ExperimentConfig]) -> Vec<String> {
    configs
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let name = c.provider.provider.name();
            let dup = configs
                .iter()
                .filter(|o| o.provider.provider == c.provider.provider)
                .count()
                > 1;
            if dup {
                format!("{name}#{i}")
            } else {
                name.to_string()
            }
        })
        .collect()
}

/// Runs each provider config over the shared seeds. Configs must agree on
/// everything but the provider block.
pub fn compare_runs(configs: &[ExperimentConfig]) -> Result<Comparison> {
    let first = configs
        .first()
        .ok_or_else(|| Error::config("configs", "nothing to compare"))?;
    for c in &configs[1..] {
        if c.task != first.task {
            return Err(Error::MismatchedConfigs("task"));
        }
        if c.zo != first.zo {
            return Err(Error::MismatchedConfigs("zo"));
        }
        if c.run_seeds() != first.run_seeds() {
            return Err(Error::MismatchedConfigs("seeds"));
        }
    }
    let seeds = first.run_seeds();
    let labels = labels(configs);
    let jobs: Vec<(usize, u64)> = (0..configs.len())
        .flat_map(|i| seeds.iter().map(move |&s| (i, s)))
        .collect();
    let reports = jobs
        .par_iter()
        .map(|&(i, s)| execute(&configs[i].with_seed(s)))
        .collect::<Result<Vec<_>>>()?;

    let rows: Vec<CompareRow> = jobs
        .iter()
        .zip(&reports)
        .map(|(&(i, seed), r)| CompareRow {
            label: labels[i].clone(),
            seed,
            diverged: r.diverged,
            final_loss: r.final_loss,
            final_metric: r.final_metric,
        })
        .collect();
    let summary = labels
        .iter()
        .map(|l| {
            let mine: Vec<&CompareRow> = rows.iter().filter(|r| &r.label == l).collect();
            let metrics: Vec<f64> = mine.iter().map(|r| r.final_metric).collect();
            let losses: Vec<f64> = mine
                .iter()
                .filter(|r| !r.diverged)
                .map(|r| r.final_loss)
                .collect();
            let (mm, sm) = mean_std(&metrics);
            let (ml, sl) = mean_std(&losses);
            CompareSummary {
                label: l.clone(),
                runs: mine.len(),
                diverged: mine.iter().filter(|r| r.diverged).count(),
                mean_final_metric: mm,
                std_final_metric: sm,
                mean_final_loss: ml,
                std_final_loss: sl,
            }
        })
        .collect();
    Ok(Comparison {
        metric_name: reports[0].metric_name.clone(),
        seeds,
        rows,
        summary,
    })
}

/// [`compare_runs`], then writes `compare.json` and `compare.csv` into `dir`.
pub fn compare(configs: &[ExperimentConfig], dir: &Path) -> Result<Comparison> {
    let table = compare_runs(configs)?;
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_json(&dir.join("compare.json"), &table)?;
    let path = dir.join("compare.csv");
    let mut w = csv::Writer::from_path(&path)?;
    w.write_record(["provider", "seed", "diverged", "final_loss", "final_metric"])?;
    for r in &table.rows {
        w.write_record([
            r.label.clone(),
            r.seed.to_string(),
            r.diverged.to_string(),
            fmt_real(r.final_loss),
            fmt_real(r.final_metric),
        ])?;
    }
    w.flush().map_err(|e| Error::io(&path, e))?;
    Ok(table)
}
