use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use zoperturb::bench::{
    self, ExperimentConfig, SweepAxis, EXIT_CONVERGED, EXIT_DIVERGED, EXIT_ERROR,
};
use zoperturb::{Error, Result};

#[derive(Parser)]
#[command(
    name = "zoperturb",
    version,
    about = "Zeroth-order training with hardware-style perturbations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train once; writes report.json, curve.csv and resources.json.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Cross product of one provider axis and several seeds.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        axis: SweepAxis,
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<u64>,
        /// Defaults to the config's seeds.
        #[arg(long, value_delimiter = ',')]
        seeds: Vec<u64>,
    },
    /// Same task and optimizer, different providers.
    Compare {
        #[arg(long, value_delimiter = ',', required = true)]
        configs: Vec<PathBuf>,
        /// Defaults to `<first config's output_dir>/compare`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Static storage accounting for the config's provider.
    Resources {
        #[arg(long)]
        config: PathBuf,
    },
    Lut {
        #[command(subcommand)]
        command: LutCommand,
    },
    Rng {
        #[command(subcommand)]
        command: RngCommand,
    },
}

#[derive(Subcommand)]
enum LutCommand {
    /// Print the scale LUTs of an otf provider as CSV.
    Dump {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Subcommand)]
enum RngCommand {
    /// Print successive LFSR words.
    Emit {
        #[arg(long)]
        bits: u32,
        /// Shipped taps for the width when omitted.
        #[arg(long, value_delimiter = ',')]
        taps: Vec<u32>,
        #[arg(long)]
        seed: u32,
        #[arg(long, default_value_t = 16)]
        count: u64,
    },
}

fn dispatch(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Run { config } => {
            let cfg = ExperimentConfig::load(&config)?;
            let report = bench::run(&cfg)?;
            println!("{}", bench::summary_line(&report));
            Ok(if report.diverged {
                EXIT_DIVERGED
            } else {
                EXIT_CONVERGED
            })
        }
        Command::Sweep {
            config,
            axis,
            values,
            seeds,
        } => {
            let cfg = ExperimentConfig::load(&config)?;
            let seeds = if seeds.is_empty() {
                cfg.run_seeds()
            } else {
                seeds
            };
            let result = bench::sweep(&cfg, axis, &values, &seeds)?;
            for c in &result.cells {
                println!(
                    "{}={} loss {:.6} ± {:.6} metric {:.4} ± {:.4} ({} usable, {} diverged, {} failed)",
                    axis.name(),
                    c.value,
                    c.mean_final_loss,
                    c.std_final_loss,
                    c.mean_final_metric,
                    c.std_final_metric,
                    c.usable,
                    c.diverged,
                    c.failed
                );
            }
            Ok(EXIT_CONVERGED)
        }
        Command::Compare { configs, out } => {
            let cfgs = configs
                .iter()
                .map(ExperimentConfig::load)
                .collect::<Result<Vec<_>>>()?;
            let dir = out.unwrap_or_else(|| cfgs[0].output_dir.join("compare"));
            let table = bench::compare(&cfgs, &dir)?;
            for s in &table.summary {
                println!(
                    "{:<14} {} {:.4} ± {:.4}  diverged {}/{}",
                    s.label,
                    table.metric_name,
                    s.mean_final_metric,
                    s.std_final_metric,
                    s.diverged,
                    s.runs
                );
            }
            Ok(EXIT_CONVERGED)
        }
        Command::Resources { config } => {
            let cfg = ExperimentConfig::load(&config)?;
            let report = bench::resources(&cfg)?;
            let text = serde_json::to_string_pretty(&report)?;
            writeln!(io::stdout(), "{text}").map_err(|e| Error::Io {
                path: "<stdout>".into(),
                source: e,
            })?;
            Ok(EXIT_CONVERGED)
        }
        Command::Lut {
            command: LutCommand::Dump { config },
        } => {
            let cfg = ExperimentConfig::load(&config)?;
            bench::lut_dump(&cfg, std::io::stdout().lock())?;
            Ok(EXIT_CONVERGED)
        }
        Command::Rng {
            command:
                RngCommand::Emit {
                    bits,
                    taps,
                    seed,
                    count,
                },
        } => {
            let taps = (!taps.is_empty()).then_some(taps.as_slice());
            bench::rng_emit(bits, taps, seed, count, std::io::stdout().lock())?;
            Ok(EXIT_CONVERGED)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // usage errors are errors, not divergence
            return ExitCode::from(if e.use_stderr() { EXIT_ERROR as u8 } else { 0 });
        }
    };
    let code = match dispatch(cli) {
        Ok(code) => code,
        Err(e) if e.is_broken_pipe() => EXIT_CONVERGED,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    };
    ExitCode::from(code as u8)
}
