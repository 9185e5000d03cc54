//! Command-line harness.
//!
//! Verbs: `scatter`, `phase`, `asymptote`, `painleve`, `simulate`, `compare`.
//! Each is runnable standalone against a TOML config; any key is overridable
//! with repeated `--override key=value` flags. Errors are data: a structured
//! JSON report is written next to the outputs and mapped to a stable exit
//! code (0 success, 2 configuration, 3 discrete spectrum, 4 numerical).

use clap::{Parser, ValueEnum};
use emkdv::pipeline::{
    run_asymptote, run_compare, run_painleve, run_phase, run_scatter, run_simulate, ExperimentConfig,
    PipelineReport,
};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Verb {
    Scatter,
    Phase,
    Asymptote,
    Painleve,
    Simulate,
    Compare,
}

#[derive(Parser, Debug)]
#[command(
    name = "emkdv",
    about = "Forward scattering, long-time asymptotics, and a spectral reference solver for an extended fifth-order mKdV equation"
)]
struct Args {
    /// TOML experiment configuration; built-in defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Output directory (overrides the config's output.dir).
    #[arg(long)]
    out: Option<PathBuf>,

    /// Pipeline stage to run.
    #[arg(long, value_enum)]
    verb: Verb,

    /// Repeatable key=value override with dotted paths, e.g. pde.dt=0.001.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

fn load_config(args: &Args) -> emkdv::Result<ExperimentConfig> {
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::from_file(&path.to_string_lossy())?,
        None => ExperimentConfig::default(),
    };
    cfg = cfg.apply_overrides(&args.overrides)?;
    if let Some(out) = &args.out {
        cfg.output.dir = out.to_string_lossy().into_owned();
    }
    Ok(cfg)
}

fn dispatch(verb: Verb, cfg: &ExperimentConfig, out_dir: &Path) -> emkdv::Result<PipelineReport> {
    match verb {
        Verb::Scatter => run_scatter(cfg, out_dir),
        Verb::Phase => run_phase(cfg, out_dir),
        Verb::Asymptote => run_asymptote(cfg, out_dir),
        Verb::Painleve => run_painleve(cfg, out_dir),
        Verb::Simulate => run_simulate(cfg, out_dir),
        Verb::Compare => run_compare(cfg, out_dir),
    }
}

fn write_error_report(out_dir: &Path, verb: Verb, err: &emkdv::Error) {
    let report = serde_json::json!({
        "module": err.module(),
        "operation": format!("{verb:?}").to_lowercase(),
        "error": err.to_string(),
        "exit_code": err.exit_code(),
    });
    let _ = std::fs::create_dir_all(out_dir);
    let _ = std::fs::write(
        out_dir.join("error.json"),
        serde_json::to_string_pretty(&report).unwrap_or_default() + "\n",
    );
}

fn main() -> ExitCode {
    let args = Args::parse();
    let cfg = match load_config(&args) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let out_dir = PathBuf::from(&cfg.output.dir);
    match dispatch(args.verb, &cfg, &out_dir) {
        Ok(report) => {
            println!("config sha256: {}", report.config_sha256);
            if let Some(z) = report.zero_count {
                println!("zero count certificate: {z}");
            }
            if let Some(d) = report.energy_drift {
                println!("energy drift: {d:e}");
            }
            for f in &report.files {
                println!("wrote {f}");
            }
            if !report.records.is_empty() {
                println!("records: {}", report.records.len());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error [{}]: {e}", e.module());
            write_error_report(&out_dir, args.verb, &e);
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
