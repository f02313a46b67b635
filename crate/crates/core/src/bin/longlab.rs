use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use longitude_lab::experiment::{plot_report, read_report, run, write_outputs, ExperimentConfig, ExperimentError};

#[derive(Parser)]
#[command(name = "longlab", version, about = "Run longitude-lab experiments and plot their reports")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiments named in a config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; overrides `out` in the config.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides `seed` in the config.
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides `tolerance_scale` in the config.
        #[arg(long)]
        tolerance_scale: Option<f64>,
    },
    /// Write SVG plots for an existing report next to it.
    Plot {
        #[arg(long)]
        report: PathBuf,
    },
}

fn execute(cli: Cli) -> Result<bool, ExperimentError> {
    match cli.command {
        Command::Run {
            config,
            out,
            seed,
            tolerance_scale,
        } => {
            let text = std::fs::read_to_string(&config).map_err(|e| ExperimentError::Io {
                path: config.clone(),
                message: e.to_string(),
            })?;
            let mut cfg = ExperimentConfig::parse(&text)?;
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            if let Some(scale) = tolerance_scale {
                if !(scale > 0.0) {
                    return Err(longitude_lab::experiment::ConfigError::InvalidValue {
                        key: "tolerance_scale".into(),
                        value: scale.to_string(),
                        reason: "must be positive".into(),
                    }
                    .into());
                }
                cfg.tolerance_scale = scale;
            }
            let dir = out.or_else(|| cfg.out.clone()).unwrap_or_else(|| PathBuf::from("."));
            let report = run(&cfg)?;
            let artifacts = write_outputs(&report, &dir)?;
            for r in &report.records {
                println!(
                    "{} {}/{}: measured {:e}, reference {:e}",
                    if r.pass { "PASS" } else { "FAIL" },
                    r.experiment,
                    r.name,
                    r.measured,
                    r.reference
                );
            }
            println!("wrote {} and {} plots", artifacts.json.display(), artifacts.plots.len());
            Ok(report.all_pass())
        }
        Command::Plot { report } => {
            let parsed = read_report(&report)?;
            let dir = report
                .parent()
                .filter(|p| !p.as_os_str().is_empty())
                .map(PathBuf::from)
                .unwrap_or_else(|| PathBuf::from("."));
            let written = plot_report(&parsed, &dir)?;
            for p in &written {
                println!("{}", p.display());
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match execute(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
