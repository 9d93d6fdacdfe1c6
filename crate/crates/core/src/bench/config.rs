use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::engine::ZoConfig;
use crate::error::{Error, Result};
use crate::perturb::ProviderConfig;
use crate::tasks::{
    ingest_csv, logistic_task, mlp_task, quadratic_task, synthetic_blobs, BlobSpec, Dataset,
    FewShotSpec, Task,
};

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}
fn default_condition() -> f64 {
    1.0
}
fn default_init() -> f64 {
    5.0
}
fn default_classes() -> usize {
    2
}
fn default_k() -> usize {
    16
}
fn default_test_cap() -> usize {
    1000
}

/// A whole experiment: what to optimize, how to perturb, how to step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    /// Repetition seeds for sweeps and comparisons. Each replaces
    /// `zo.master_seed` and, unless set explicitly, the few-shot seed.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub seeds: Vec<u64>,
    pub task: TaskConfig,
    pub provider: ProviderConfig,
    pub zo: ZoConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum TaskConfig {
    Quadratic {
        d: usize,
        #[serde(default = "default_condition")]
        condition_number: f64,
        #[serde(default = "default_init")]
        init: f64,
        #[serde(default)]
        seed: u64,
    },
    Logistic {
        data: DataConfig,
        #[serde(default)]
        few_shot: FewShotConfig,
    },
    Mlp {
        data: DataConfig,
        #[serde(default)]
        few_shot: FewShotConfig,
        hidden: Vec<usize>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "lowercase", deny_unknown_fields)]
pub enum DataConfig {
    Blobs {
        per_class: usize,
        features: usize,
        #[serde(default = "default_classes")]
        classes: usize,
        separation: f64,
        #[serde(default)]
        seed: u64,
    },
    /// `path` is resolved against the config file's directory.
    Csv { path: PathBuf, label_column: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FewShotConfig {
    #[serde(default = "default_k")]
    pub k: usize,
    /// Defaults to `k`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_val: Option<usize>,
    #[serde(default = "default_test_cap")]
    pub test_cap: usize,
    /// Defaults to the run seed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl Default for FewShotConfig {
    fn default() -> Self {
        Self {
            k: default_k(),
            k_val: None,
            test_cap: default_test_cap(),
            seed: None,
        }
    }
}

impl FewShotConfig {
    pub fn spec(&self, run_seed: u64) -> FewShotSpec {
        FewShotSpec {
            k: self.k,
            k_val: self.k_val.unwrap_or(self.k),
            test_cap: self.test_cap,
            seed: self.seed.unwrap_or(run_seed),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| {
            let field = e
                .span()
                .map(|s| format!("bytes {}..{}", s.start, s.end))
                .unwrap_or_else(|| "config".into());
            Error::config(field, e.message().to_string())
        })?;
        cfg.zo
            .validate()
            .map_err(|e| Error::config("zo", e.to_string()))?;
        Ok(cfg)
    }

    /// Parses the file and resolves relative data paths against its directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::from_toml(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        if let Some(DataConfig::Csv { path: p, .. }) = cfg.task.data_mut() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        cfg.check_files()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("experiment config serializes")
    }

    fn check_files(&self) -> Result<()> {
        if let Some(DataConfig::Csv { path, .. }) = self.task.data() {
            if !path.is_file() {
                return Err(Error::config(
                    "task.data.path",
                    format!("{} does not exist", path.display()),
                ));
            }
        }
        Ok(())
    }

    /// Seeds to repeat over: `seeds`, or just `zo.master_seed`.
    pub fn run_seeds(&self) -> Vec<u64> {
        if self.seeds.is_empty() {
            vec![self.zo.master_seed]
        } else {
            self.seeds.clone()
        }
    }

    /// The same experiment under another run seed.
    pub fn with_seed(&self, seed: u64) -> Self {
        let mut c = self.clone();
        c.zo.master_seed = seed;
        c
    }

    pub fn build_task(&self) -> Result<Box<dyn Task>> {
        self.task.build(self.zo.master_seed)
    }
}

impl TaskConfig {
    fn data(&self) -> Option<&DataConfig> {
        match self {
            TaskConfig::Quadratic { .. } => None,
            TaskConfig::Logistic { data, .. } | TaskConfig::Mlp { data, .. } => Some(data),
        }
    }

    fn data_mut(&mut self) -> Option<&mut DataConfig> {
        match self {
            TaskConfig::Quadratic { .. } => None,
            TaskConfig::Logistic { data, .. } | TaskConfig::Mlp { data, .. } => Some(data),
        }
    }

    pub fn build(&self, run_seed: u64) -> Result<Box<dyn Task>> {
        Ok(match self {
            TaskConfig::Quadratic {
                d,
                condition_number,
                init,
                seed,
            } => {
                if *d == 0 || condition_number.is_nan() || *condition_number < 1.0 {
                    return Err(Error::config(
                        "task",
                        "quadratic needs d >= 1 and condition_number >= 1",
                    ));
                }
                Box::new(quadratic_task(*d, *condition_number, *seed).with_init(*init))
            }
            TaskConfig::Logistic { data, few_shot } => {
                Box::new(logistic_task(&data.load()?, &few_shot.spec(run_seed))?)
            }
            TaskConfig::Mlp {
                data,
                few_shot,
                hidden,
            } => Box::new(mlp_task(&data.load()?, hidden, &few_shot.spec(run_seed))?),
        })
    }
}

impl DataConfig {
    pub fn load(&self) -> Result<Dataset> {
        match self {
            DataConfig::Blobs {
                per_class,
                features,
                classes,
                separation,
                seed,
            } => synthetic_blobs(&BlobSpec {
                per_class: *per_class,
                features: *features,
                classes: *classes,
                separation: *separation,
                seed: *seed,
            }),
            DataConfig::Csv { path, label_column } => {
                if !path.is_file() {
                    return Err(Error::config(
                        "task.data.path",
                        format!("{} does not exist", path.display()),
                    ));
                }
                ingest_csv(path, label_column)
            }
        }
    }
}
