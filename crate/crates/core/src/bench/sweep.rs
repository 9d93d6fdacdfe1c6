use std::fs;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::run::{execute, fmt_real, write_json};
use crate::engine::TrainReport;
use crate::error::{Error, Result};
use crate::perturb::ProviderKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    PoolSize,
    NRngs,
    Bits,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::PoolSize => "pool_size",
            SweepAxis::NRngs => "n_rngs",
            SweepAxis::Bits => "bits",
        }
    }

    /// `cfg` with this axis set to `value`. Custom taps are dropped when the
    /// width changes so each width uses its shipped taps.
    pub fn apply(self, cfg: &ExperimentConfig, value: u64) -> Result<ExperimentConfig> {
        let kind = cfg.provider.provider;
        let ok = match self {
            SweepAxis::PoolSize => kind == ProviderKind::Pool,
            SweepAxis::NRngs => kind == ProviderKind::Otf,
            SweepAxis::Bits => matches!(kind, ProviderKind::Otf | ProviderKind::UniformInt),
        };
        if !ok {
            return Err(Error::config(
                "axis",
                format!("{} does not apply to provider {kind}", self.name()),
            ));
        }
        let mut c = cfg.clone();
        match self {
            SweepAxis::PoolSize => c.provider.pool_size = value as usize,
            SweepAxis::NRngs => c.provider.n_rngs = value as usize,
            SweepAxis::Bits => {
                if c.provider.bits != value as u32 {
                    c.provider.taps = None;
                }
                c.provider.bits = value as u32;
            }
        }
        Ok(c)
    }
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pool_size" => Ok(SweepAxis::PoolSize),
            "n_rngs" => Ok(SweepAxis::NRngs),
            "bits" => Ok(SweepAxis::Bits),
            other => Err(Error::config(
                "axis",
                format!("unknown axis {other:?}; expected pool_size, n_rngs or bits"),
            )),
        }
    }
}

/// `(axis value, seed, report or error)` for one cell.
pub type CellOutcome = (u64, u64, Result<TrainReport>);

/// Outcome of one (axis value, seed) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub value: u64,
    pub seed: u64,
    pub diverged: bool,
    #[serde(with = "crate::engine::real")]
    pub final_loss: f64,
    #[serde(with = "crate::engine::real")]
    pub final_metric: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl RunRecord {
    fn from_result(value: u64, seed: u64, r: &Result<TrainReport>) -> Self {
        match r {
            Ok(rep) => Self {
                value,
                seed,
                diverged: rep.diverged,
                final_loss: rep.final_loss,
                final_metric: rep.final_metric,
                error: None,
            },
            Err(e) => Self {
                value,
                seed,
                diverged: false,
                final_loss: f64::NAN,
                final_metric: f64::NAN,
                error: Some(e.to_string()),
            },
        }
    }

    /// Counted in the aggregate statistics.
    pub fn usable(&self) -> bool {
        self.error.is_none() && !self.diverged && self.final_loss.is_finite()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub value: u64,
    pub runs: usize,
    pub usable: usize,
    pub diverged: usize,
    pub failed: usize,
    #[serde(with = "crate::engine::real")]
    pub mean_final_loss: f64,
    #[serde(with = "crate::engine::real")]
    pub std_final_loss: f64,
    #[serde(with = "crate::engine::real")]
    pub mean_final_metric: f64,
    #[serde(with = "crate::engine::real")]
    pub std_final_metric: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub axis: SweepAxis,
    pub values: Vec<u64>,
    pub seeds: Vec<u64>,
    pub cells: Vec<SweepCell>,
    pub records: Vec<RunRecord>,
}

impl SweepResult {
    pub fn cell(&self, value: u64) -> Option<&SweepCell> {
        self.cells.iter().find(|c| c.value == value)
    }
}

/// Mean and sample standard deviation, summed left to right.
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() == 1 {
        return (mean, 0.0);
    }
    let ss: f64 = xs.iter().map(|x| (x - mean) * (x - mean)).sum();
    (mean, (ss / (n - 1.0)).sqrt())
}

/// Per-value statistics over the usable records, in `values` order.
pub fn aggregate(values: &[u64], records: &[RunRecord]) -> Vec<SweepCell> {
    values
        .iter()
        .map(|&v| {
            let mine: Vec<&RunRecord> = records.iter().filter(|r| r.value == v).collect();
            let good: Vec<&RunRecord> = mine.iter().copied().filter(|r| r.usable()).collect();
            let losses: Vec<f64> = good.iter().map(|r| r.final_loss).collect();
            let metrics: Vec<f64> = good.iter().map(|r| r.final_metric).collect();
            let (ml, sl) = mean_std(&losses);
            let (mm, sm) = mean_std(&metrics);
            SweepCell {
                value: v,
                runs: mine.len(),
                usable: good.len(),
                diverged: mine.iter().filter(|r| r.diverged).count(),
                failed: mine.iter().filter(|r| r.error.is_some()).count(),
                mean_final_loss: ml,
                std_final_loss: sl,
                mean_final_metric: mm,
                std_final_metric: sm,
            }
        })
        .collect()
}

/// Runs every (value, seed) cell, in parallel, without writing files.
/// Failing cells are recorded rather than aborting the sweep.
pub fn sweep_cells(
    cfg: &ExperimentConfig,
    axis: SweepAxis,
    values: &[u64],
    seeds: &[u64],
) -> Result<(SweepResult, Vec<CellOutcome>)> {
    if values.is_empty() || seeds.is_empty() {
        return Err(Error::config(
            "values",
            "sweep needs at least one value and one seed",
        ));
    }
    let configs: Vec<(u64, u64, ExperimentConfig)> = values
        .iter()
        .map(|&v| axis.apply(cfg, v).map(|c| (v, c)))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flat_map(|(v, c)| seeds.iter().map(move |&s| (v, s, c.with_seed(s))))
        .collect();
    let outcomes: Vec<CellOutcome> = configs
        .into_par_iter()
        .map(|(v, s, c)| (v, s, execute(&c)))
        .collect();
    let records: Vec<RunRecord> = outcomes
        .iter()
        .map(|(v, s, r)| RunRecord::from_result(*v, *s, r))
        .collect();
    let result = SweepResult {
        axis,
        values: values.to_vec(),
        seeds: seeds.to_vec(),
        cells: aggregate(values, &records),
        records,
    };
    Ok((result, outcomes))
}

/// [`sweep_cells`], then writes `sweep.json`, `sweep.csv` and one report per
/// successful cell under `runs/`.
pub fn sweep(
    cfg: &ExperimentConfig,
    axis: SweepAxis,
    values: &[u64],
    seeds: &[u64],
) -> Result<SweepResult> {
    let (result, outcomes) = sweep_cells(cfg, axis, values, seeds)?;
    let dir = &cfg.output_dir;
    let runs = dir.join("runs");
    fs::create_dir_all(&runs).map_err(|e| Error::io(&runs, e))?;
    for (v, s, r) in &outcomes {
        if let Ok(rep) = r {
            write_json(
                &runs.join(format!("{}={v}_seed={s}.json", axis.name())),
                rep,
            )?;
        }
    }
    write_json(&dir.join("sweep.json"), &result)?;
    let path = dir.join("sweep.csv");
    let mut w = csv::Writer::from_path(&path)?;
    w.write_record([
        axis.name(),
        "runs",
        "usable",
        "diverged",
        "failed",
        "mean_final_loss",
        "std_final_loss",
        "mean_final_metric",
        "std_final_metric",
    ])?;
    for c in &result.cells {
        w.write_record([
            c.value.to_string(),
            c.runs.to_string(),
            c.usable.to_string(),
            c.diverged.to_string(),
            c.failed.to_string(),
            fmt_real(c.mean_final_loss),
            fmt_real(c.std_final_loss),
            fmt_real(c.mean_final_metric),
            fmt_real(c.std_final_metric),
        ])?;
    }
    w.flush().map_err(|e| Error::io(&path, e))?;
    Ok(result)
}
