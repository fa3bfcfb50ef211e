//! Command-line front end.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use super::config::{ExperimentConfig, ExperimentKind, FadingSpec, Trajectory};
use super::experiments::{run_experiment, ExperimentOutput};
use super::table::emit_csv;
use super::HarnessError;
use crate::mec::FilterMode;

/// Directory for CSV output when `--out` is not given.
pub const OUT_DIR_ENV: &str = "AERIALNET_OUT_DIR";

#[derive(Debug, Parser)]
#[command(
    name = "aerialnet",
    version,
    about = "UAV surveillance network experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Air-to-ground path loss against UAV height.
    A2gSweep(Common),
    /// Mean SINR at the central UAV against sub-UAV density.
    A2aSinr(Common),
    /// Coverage probability against transmit power and threshold.
    A2aCoverage(Common),
    /// On-board packet filtering of a trajectory.
    Filter(FilterArgs),
    /// Analytic against Monte Carlo coverage cross-check.
    Selftest(Common),
}

#[derive(Debug, Args)]
struct Common {
    /// TOML experiment configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Monte Carlo trials per grid point.
    #[arg(long)]
    trials: Option<usize>,
    /// CSV destination.
    #[arg(long)]
    out: Option<PathBuf>,
    /// off, rayleigh or rice:<K dB>.
    #[arg(long)]
    fading: Option<FadingSpec>,
}

#[derive(Debug, Args)]
struct FilterArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, value_parser = parse_mode)]
    mode: Option<FilterMode>,
    /// Trajectory CSV; overrides the bundled trajectory.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, value_enum)]
    trajectory: Option<Trajectory>,
}

fn parse_mode(s: &str) -> Result<FilterMode, String> {
    match s {
        "paper-literal" => Ok(FilterMode::PaperLiteral),
        "corrected" => Ok(FilterMode::Corrected),
        _ => Err(format!(
            "unknown mode `{s}` (expected paper-literal or corrected)"
        )),
    }
}

fn build_config(kind: ExperimentKind, common: &Common) -> Result<ExperimentConfig, HarnessError> {
    let mut cfg = match &common.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    cfg.experiment = kind;
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    if let Some(t) = common.trials {
        cfg.trials = t;
    }
    if let Some(f) = common.fading {
        cfg.a2g.fading = f;
    }
    Ok(cfg)
}

fn destination(kind: ExperimentKind, out: &Option<PathBuf>) -> PathBuf {
    match out {
        Some(p) => p.clone(),
        None => {
            let dir = std::env::var_os(OUT_DIR_ENV)
                .map(PathBuf::from)
                .unwrap_or_else(|| PathBuf::from("."));
            dir.join(format!("{}.csv", kind.name()))
        }
    }
}

fn report(out: &ExperimentOutput) {
    let mut stdout = std::io::stdout().lock();
    if out.kind == ExperimentKind::Selftest {
        let t = &out.table;
        let col = |n: &str| t.column(n).expect("selftest column");
        let (th, pw, an, mc, tol, ok) = (
            col("threshold_db"),
            col("tx_power_w"),
            col("p_cov_analytic"),
            col("p_cov_mc"),
            col("tolerance"),
            col("pass"),
        );
        for r in &t.rows {
            let verdict = if r[ok] == "true" { "PASS" } else { "FAIL" };
            let _ = writeln!(
                stdout,
                "{verdict} theta={} dB P_s={} W analytic={} mc={} tol={}",
                r[th], r[pw], r[an], r[mc], r[tol]
            );
        }
    }
    let _ = writeln!(stdout, "{}", out.summary);
}

fn execute(cli: Cli) -> Result<bool, HarnessError> {
    let (cfg, out) = match &cli.command {
        Command::A2gSweep(c) => (build_config(ExperimentKind::A2gSweep, c)?, &c.out),
        Command::A2aSinr(c) => (build_config(ExperimentKind::A2aSinr, c)?, &c.out),
        Command::A2aCoverage(c) => (build_config(ExperimentKind::A2aCoverage, c)?, &c.out),
        Command::Selftest(c) => (build_config(ExperimentKind::Selftest, c)?, &c.out),
        Command::Filter(f) => {
            let mut cfg = build_config(ExperimentKind::Filter, &f.common)?;
            if let Some(m) = f.mode {
                cfg.filter.mode = m;
            }
            if let Some(t) = f.trajectory {
                cfg.filter.trajectory = t;
                cfg.filter.input = None;
            }
            if let Some(p) = &f.input {
                cfg.filter.input = Some(p.to_string_lossy().into_owned());
            }
            (cfg, &f.common.out)
        }
    };
    let result = run_experiment(&cfg)?;
    let path = destination(cfg.experiment, out);
    emit_csv(&result.table, &path)?;
    report(&result);
    Ok(result.passed.unwrap_or(true))
}

/// Parses `args` (program name first), runs the experiment and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(true) => 0,
        Ok(false) => {
            eprintln!("aerialnet: selftest failed");
            2
        }
        Err(e) => {
            eprintln!("aerialnet: {e}");
            e.exit_code()
        }
    }
}
