//! Command-line entry point.
//!
//! Exit codes: 0 success, 1 experiment ran but a check failed, 2 blow-up,
//! 3 invalid configuration or arguments, 4 I/O failure.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::error::Error;
use crate::experiments::{run_experiment, ExperimentKind};
use crate::integrate::SimParams;
use crate::io::config::Config;
use crate::io::manifest::{Manifest, OutDirLock};
use crate::io::report::{write_report_csv, Table};
use crate::io::snapshot::read_snapshot_full;
use crate::spectral;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_BLOWUP: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "eplab", version, about = "Euler-Poincare pseudospectral simulator and verification lab")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Args)]
struct RunArgs {
    /// JSON configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides the config).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for random initial data (overrides the config).
    #[arg(long)]
    seed: Option<u64>,
    /// Suppress the summary on standard output.
    #[arg(long)]
    quiet: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate one initial condition at a single alpha.
    Simulate(RunArgs),
    /// Doubling times of the Sobolev norm across an alpha grid.
    UniformTime(RunArgs),
    /// Convergence rate of EP_alpha towards EP_0.
    ZeroAlpha(RunArgs),
    /// Splitting errors against mollified initial data.
    BonaSmith(RunArgs),
    /// Commutator, convexity and Littlewood-Paley verifiers.
    VerifyLemmas(RunArgs),
    /// Print the header and Sobolev norm of a snapshot.
    Inspect {
        snapshot: PathBuf,
        /// Sobolev index of the reported norm (default: 2.5 for d >= 2, 2.0 for d = 1).
        #[arg(long)]
        s: Option<f64>,
        #[arg(long)]
        quiet: bool,
    },
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::BlowUp(_) => EXIT_BLOWUP,
        Error::Io { .. } | Error::Csv { .. } | Error::Snapshot { .. } => EXIT_IO,
        _ => EXIT_CONFIG,
    }
}

fn fail(e: &Error) -> i32 {
    eprintln!("eplab: {e}");
    exit_code(e)
}

/// Runs the CLI on `argv` (including the program name) and returns the
/// process exit code.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let (kind, args) = match cli.command {
        Command::Inspect { snapshot, s, quiet } => return inspect(&snapshot, s, quiet),
        Command::Simulate(a) => (ExperimentKind::Simulate, a),
        Command::UniformTime(a) => (ExperimentKind::UniformTime, a),
        Command::ZeroAlpha(a) => (ExperimentKind::ZeroAlpha, a),
        Command::BonaSmith(a) => (ExperimentKind::BonaSmith, a),
        Command::VerifyLemmas(a) => (ExperimentKind::LemmaSuite, a),
    };
    run(kind, &args)
}

fn run(kind: ExperimentKind, args: &RunArgs) -> i32 {
    let raw = match fs::read(&args.config) {
        Ok(b) => b,
        Err(e) => return fail(&Error::io(&args.config, e)),
    };
    let text = match String::from_utf8(raw.clone()) {
        Ok(t) => t,
        Err(_) => return fail(&Error::Config("config is not valid UTF-8".into())),
    };
    let config = match Config::parse(&text) {
        Ok(c) => c,
        Err(e) => return fail(&e),
    };
    let spec = match config.to_spec(kind, args.seed) {
        Ok(s) => s,
        Err(e) => return fail(&e),
    };
    let mut resolved = config.resolved(kind);
    let out = args.out.clone().or(resolved.out_dir.clone()).unwrap_or_default();
    resolved.out_dir = Some(out.clone());
    resolved.initial_data = spec.initial_data.clone();

    let _lock = match OutDirLock::acquire(&out) {
        Ok(l) => l,
        Err(e) => return fail(&e),
    };
    let dir = out.join(kind.name());
    let resolved_json = serde_json::to_value(&resolved).expect("config serializes");
    let mut manifest = Manifest::new(kind.name(), Some(spec.seed), &raw, resolved_json);

    let report = match run_experiment(&spec) {
        Ok(r) => r,
        Err(Error::BlowUp(b)) => {
            eprintln!("eplab: blow-up detected at t = {:.6}: {}", b.t, b.reason);
            let partial = dir.join("runs");
            let file = partial.join("blowup.csv");
            let written = fs::create_dir_all(&partial)
                .map_err(|e| Error::io(&partial, e))
                .and_then(|_| write_report_csv(&Table::diagnostics(&b.trajectory), &file));
            if let Err(e) = written {
                eprintln!("eplab: {e}");
            } else {
                manifest.outputs.push("runs/blowup.csv".into());
            }
            manifest.notes.push(format!("blow-up at t = {}: {}", b.t, b.reason));
            manifest.verdict = Some(false);
            let _ = manifest.write(&dir.join("manifest.json"));
            return EXIT_BLOWUP;
        }
        Err(e) => return fail(&e),
    };

    match report.write(&dir) {
        Ok(files) => manifest.outputs = files,
        Err(e) => return fail(&e),
    }
    manifest.outputs.push("manifest.json".into());
    manifest.verdict = Some(report.pass());
    manifest.notes = report.notes.clone();
    if let Err(e) = manifest.write(&dir.join("manifest.json")) {
        return fail(&e);
    }

    if !args.quiet {
        for c in &report.checks {
            println!(
                "{} {}: value {:.6e}, bound {:.6e} ({})",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                c.value,
                c.bound,
                c.detail
            );
        }
        println!("wrote {}", dir.display());
    }
    if report.pass() {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    }
}

fn inspect(path: &Path, s: Option<f64>, quiet: bool) -> i32 {
    let snap = match read_snapshot_full(path) {
        Ok(s) => s,
        Err(e) => return fail(&e),
    };
    let h = snap.header;
    let s = s.unwrap_or_else(|| SimParams::defaults_for(h.dim as usize).s);
    let norm = spectral::sobolev_norm(&snap.field, s);
    if !quiet {
        println!("version {}", h.version);
        println!("d {}", h.dim);
        println!("n {}", h.n);
        println!("length {:.17e}", h.length);
        println!("time {:.17e}", h.time);
        println!("alpha {:.17e}", h.alpha);
        println!("hs_norm(s={s}) {norm:.17e}");
    }
    EXIT_OK
}
