use std::fs;
use std::path::Path;

use super::config::ExperimentConfig;
use crate::engine::{train, TrainReport};
use crate::error::{Error, Result};
use crate::perturb::{resource_report, PerturbationProvider, ResourceProxyReport};

/// Trains once under the config's `zo.master_seed`, writing nothing.
pub fn execute(cfg: &ExperimentConfig) -> Result<TrainReport> {
    let task = cfg.build_task()?;
    let mut provider =
        PerturbationProvider::new(&cfg.provider, &task.segment_lengths(), cfg.zo.master_seed)?;
    train(task.as_ref(), &mut provider, &cfg.zo)
}

/// [`execute`], then writes `report.json`, `curve.csv` and `resources.json`
/// into the output directory.
pub fn run(cfg: &ExperimentConfig) -> Result<TrainReport> {
    let report = execute(cfg)?;
    write_run_outputs(&cfg.output_dir, &report)?;
    Ok(report)
}

pub fn write_run_outputs(dir: &Path, report: &TrainReport) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_json(&dir.join("report.json"), report)?;
    write_json(&dir.join("resources.json"), &report.provider_stats)?;
    let path = dir.join("curve.csv");
    let mut w = csv::Writer::from_path(&path)?;
    w.write_record(["step", "loss", "metric"])?;
    for p in &report.eval_curve {
        w.write_record([p.step.to_string(), fmt_real(p.loss), fmt_real(p.metric)])?;
    }
    w.flush().map_err(|e| Error::io(&path, e))?;
    Ok(())
}

pub fn resources(cfg: &ExperimentConfig) -> Result<ResourceProxyReport> {
    let task = cfg.build_task()?;
    resource_report(&cfg.provider, &task.segment_lengths())
}

/// One-line human summary of a finished run.
pub fn summary_line(r: &TrainReport) -> String {
    format!(
        "{} {} d={} steps={} diverged={} loss {:.6} -> {:.6} {}={:.4} ({:.2}s)",
        r.task,
        r.provider,
        r.dimension,
        r.steps_run,
        r.diverged,
        r.initial_loss,
        r.final_loss,
        r.metric_name,
        r.final_metric,
        r.wall_time
    )
}

pub(crate) fn write_json<T: serde::Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub(crate) fn fmt_real(x: f64) -> String {
    if x.is_finite() {
        format!("{x}")
    } else if x.is_nan() {
        "NaN".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}
