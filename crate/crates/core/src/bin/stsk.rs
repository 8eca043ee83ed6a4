//! Command-line front end for STSK simulations.
//!
//! Exit status: 0 on success, 1 when `verify` finds a failing check, 2 on
//! configuration, construction or I/O errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use stsk_core::dmfile;
use stsk_core::harness::{self, report, SimConfig};

#[derive(Parser)]
#[command(name = "stsk", version, about = "Space-time shift keying simulations")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Monte-Carlo symbol error rate versus SNR.
    Ser(RunArgs),
    /// DCMC capacity versus SNR.
    Capacity(RunArgs),
    /// Coding gain and diversity order table.
    Gains(CommonArgs),
    /// Structural checks on a configured codebook.
    Verify(CommonArgs),
    /// Write the configured dispersion matrices to a DM file.
    ExportDms(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Configuration file (`key = value` lines).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file; defaults to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; results do not depend on this.
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Comma-separated SNR list in dB.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    snr: Option<Vec<f64>>,
    #[arg(long)]
    max_trials: Option<u64>,
    #[arg(long)]
    min_errors: Option<u64>,
    /// Monte-Carlo samples per capacity point.
    #[arg(long)]
    samples: Option<usize>,
}

enum Failure {
    Verify,
    Error(String),
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Error(e.to_string())
    }
}

fn load(args: &CommonArgs) -> Result<SimConfig, Failure> {
    let mut cfg = match &args.config {
        Some(p) => SimConfig::from_file(p)?,
        None => SimConfig::default(),
    };
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

fn load_run(args: &RunArgs) -> Result<SimConfig, Failure> {
    let mut cfg = load(&args.common)?;
    if let Some(s) = &args.snr {
        cfg.snr_db = s.clone();
    }
    if let Some(v) = args.max_trials {
        cfg.max_trials = v;
    }
    if let Some(v) = args.min_errors {
        cfg.min_errors = v;
    }
    if let Some(v) = args.samples {
        cfg.capacity_samples = v;
    }
    cfg.validate()?;
    if cfg.snr_db.is_empty() {
        return Err(Failure::Error("no SNR points: set snr_db in the config or pass --snr".into()));
    }
    Ok(cfg)
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Error(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cmd: Cmd) -> Result<(), Failure> {
    match cmd {
        Cmd::Ser(a) => {
            let cfg = load_run(&a)?;
            let points = harness::with_threads(a.common.threads, || harness::run_ser_campaign(&cfg))?;
            emit(&a.common.out, &report::ser_csv(&cfg, &report::source_revision(), &points))
        }
        Cmd::Capacity(a) => {
            let cfg = load_run(&a)?;
            let points = harness::with_threads(a.common.threads, || harness::run_capacity_campaign(&cfg))?;
            emit(&a.common.out, &report::capacity_csv(&cfg, &report::source_revision(), &points))
        }
        Cmd::Gains(a) => {
            let entries = match &a.config {
                Some(_) => {
                    let cfg = load(&a)?;
                    cfg.validate()?;
                    vec![harness::campaign::gain_entry_from_config(&cfg)?]
                }
                None => harness::default_gain_entries(),
            };
            let rows = harness::with_threads(a.threads, || harness::run_gain_table(&entries));
            let text = if a.out.is_some() { report::gain_csv(&rows) } else { report::gain_table_text(&rows) };
            emit(&a.out, &text)
        }
        Cmd::Verify(a) => {
            let cfg = load(&a)?;
            cfg.validate()?;
            let rep = harness::with_threads(a.threads, || harness::run_verify(&cfg))?;
            emit(&a.out, &report::verify_text(&rep))?;
            if rep.passed() {
                Ok(())
            } else {
                Err(Failure::Verify)
            }
        }
        Cmd::ExportDms(a) => {
            let cfg = load(&a)?;
            cfg.validate()?;
            let set = harness::with_threads(a.threads, || harness::build_dms(&cfg))?;
            emit(&a.out, &dmfile::to_string(&set))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verify) => ExitCode::from(1),
        Err(Failure::Error(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
