//! Command-line driver: simulate trajectories, evaluate the theoretical
//! codifference series, estimate it from data, fit model parameters, and run
//! Monte Carlo studies, all from one TOML configuration.
//!
//! Every run writes a small JSON manifest next to its outputs recording the
//! command, tool version, effective seed, resolved configuration, output
//! paths, and wall-clock time, so results stay attributable.
//!
//! Exit codes: 0 success, 2 configuration or validation errors, 3 numerical
//! or fitting failures, 4 I/O errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use codiff::config::ExperimentConfig;
use codiff::estimator::empirical_codiff_series;
use codiff::fit::{fit_pipeline, run_mc_study};
use codiff::io::{read_trajectory, write_codiff_series, write_summary, write_trajectory};
use codiff::theory::theory_series;
use codiff::var::simulate;
use codiff::{rng, Error};

#[derive(Parser)]
#[command(name = "codiff", version, about = "Codifference analysis of bivariate VAR(1) series")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a trajectory and write it as x1,x2 CSV.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the seed from the configuration.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate the theoretical codifference series as h,cd CSV.
    Theory {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Overrides the lag range from the configuration.
        #[arg(long)]
        h_max: Option<i64>,
        /// Overrides the series truncation from the configuration.
        #[arg(long)]
        j_trunc: Option<usize>,
    },
    /// Estimate the codifference series of a trajectory CSV.
    Estimate {
        traj: PathBuf,
        #[arg(long, default_value_t = 10)]
        h_max: i64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit model parameters to a trajectory CSV, writing a JSON report.
    Fit {
        traj: PathBuf,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a Monte Carlo study and write its summary CSV into a directory.
    Mc {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the study seed from the configuration.
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides the replication count from the configuration.
        #[arg(long)]
        replications: Option<usize>,
        #[arg(long)]
        out_dir: PathBuf,
    },
}

#[derive(serde::Serialize)]
struct RunManifest {
    command: String,
    tool_version: String,
    seed: Option<u64>,
    config: Option<serde_json::Value>,
    outputs: Vec<String>,
    wall_clock_ms: u64,
}

fn manifest_for(
    command: &str,
    seed: Option<u64>,
    config: Option<&ExperimentConfig>,
    outputs: &[&Path],
    started: Instant,
) -> RunManifest {
    RunManifest {
        command: command.to_string(),
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        seed,
        config: config.map(|c| serde_json::to_value(c).expect("config serializes")),
        outputs: outputs.iter().map(|p| p.display().to_string()).collect(),
        wall_clock_ms: started.elapsed().as_millis() as u64,
    }
}

fn write_manifest(path: &Path, manifest: &RunManifest) -> codiff::Result<()> {
    let text = serde_json::to_string_pretty(manifest).expect("manifest serializes");
    fs::write(path, text)?;
    Ok(())
}

/// Manifest path for a single-file output: `<out>.manifest.json`.
fn sidecar(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

fn run(command: Command) -> codiff::Result<()> {
    let started = Instant::now();
    match command {
        Command::Simulate { config, seed, out } => {
            let cfg = ExperimentConfig::from_path(&config)?;
            let model = cfg.to_model()?;
            let seed = seed.unwrap_or(cfg.simulate.seed);
            let mut r = rng::master(seed);
            let traj = simulate(&model, cfg.simulate.n, cfg.simulate.burn_in, &mut r)?;
            write_trajectory(&out, &traj)?;
            let manifest = manifest_for("simulate", Some(seed), Some(&cfg), &[&out], started);
            write_manifest(&sidecar(&out), &manifest)
        }
        Command::Theory {
            config,
            out,
            h_max,
            j_trunc,
        } => {
            let cfg = ExperimentConfig::from_path(&config)?;
            let theta = cfg.to_theta()?;
            let noise = cfg.to_noise()?;
            let h_max = h_max.unwrap_or(cfg.theory.h_max);
            let j_trunc = match j_trunc {
                Some(j) => j,
                None => cfg.effective_j_trunc()?,
            };
            let series = theory_series(&theta, &noise, h_max, j_trunc)?;
            write_codiff_series(&out, &series)?;
            let manifest = manifest_for("theory", None, Some(&cfg), &[&out], started);
            write_manifest(&sidecar(&out), &manifest)
        }
        Command::Estimate { traj, h_max, out } => {
            let data = read_trajectory(&traj)?;
            let series = empirical_codiff_series(&data, h_max)?;
            write_codiff_series(&out, &series)?;
            let manifest = manifest_for("estimate", None, None, &[&out], started);
            write_manifest(&sidecar(&out), &manifest)
        }
        Command::Fit { traj, config, out } => {
            let cfg = ExperimentConfig::from_path(&config)?;
            let opts = cfg.to_fit_options()?;
            let data = read_trajectory(&traj)?;
            let fit = fit_pipeline(&data, &opts)?;
            let report = serde_json::json!({
                "a1_hat": fit.a1_hat,
                "a4_hat": fit.a4_hat,
                "pooled": fit.pooled,
                "amplitude_pos": fit.amplitude_pos,
                "amplitude_neg": fit.amplitude_neg,
                "decay_sse": fit.decay_sse,
                "noise": {
                    "alpha_hat": fit.noise.alpha_hat,
                    "r11_hat": fit.noise.cov_hat.r11(),
                    "r12_hat": fit.noise.cov_hat.r12(),
                    "r22_hat": fit.noise.cov_hat.r22(),
                    "objective": fit.noise.objective,
                },
            });
            fs::write(&out, serde_json::to_string_pretty(&report).expect("report serializes"))?;
            let manifest = manifest_for("fit", None, Some(&cfg), &[&out], started);
            write_manifest(&sidecar(&out), &manifest)
        }
        Command::Mc {
            config,
            seed,
            replications,
            out_dir,
        } => {
            let cfg = ExperimentConfig::from_path(&config)?;
            let mut study = cfg.to_mc_study()?;
            if let Some(s) = seed {
                study.seed = s;
            }
            if let Some(r) = replications {
                study.replications = r;
            }
            let summary = run_mc_study(&study)?;
            fs::create_dir_all(&out_dir)?;
            let out = out_dir.join("summary.csv");
            write_summary(&out, &summary.to_rows())?;
            let manifest =
                manifest_for("mc", Some(study.seed), Some(&cfg), &[&out], started);
            write_manifest(&out_dir.join("manifest.json"), &manifest)
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidParameter(_)
        | Error::NonStationary { .. }
        | Error::LagOutOfRange { .. }
        | Error::Config(_) => 2,
        Error::DegenerateCf { .. } | Error::UnderdeterminedFit { .. } | Error::FitFailure(_) => 3,
        Error::Stage { source, .. } => exit_code(source),
        Error::Csv { .. } | Error::Io(_) => 4,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
