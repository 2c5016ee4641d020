//! Batch front-end.
//!
//! Exit codes: 0 success, 2 usage, 3 unreadable or malformed config,
//! 4 failed validation, 5 aborted run, 6 output failure.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::config::ExperimentSpec;
use crate::sim::{compute_metrics, simulate, ControllerKind, Metrics, RunLog, Setup};
use crate::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_READ: i32 = 3;
pub const EXIT_INVALID: i32 = 4;
pub const EXIT_ABORT: i32 = 5;
pub const EXIT_OUTPUT: i32 = 6;

/// The annotated default experiment.
pub const DEFAULT_CONFIG: &str = include_str!("../configs/default.toml");

#[derive(Debug, Parser)]
#[command(name = "dualarm", version, about = "Dual-arm payload transport with DSC and RBFN-DSC control")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one experiment and write log.csv, metrics.csv and (RBFN mode) weights.csv.
    Run {
        config: PathBuf,
        /// Overrides the config's output_dir.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run DSC-certain and RBFN-DSC on the same setup and tabulate the differences.
    Compare {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a config without running it.
    Validate { config: PathBuf },
    /// Print the default experiment config.
    Defaults,
}

struct Failure {
    code: i32,
    error: Error,
}

fn at(code: i32) -> impl Fn(Error) -> Failure {
    move |error| Failure { code, error }
}

/// Runs the command line `args` (program name first). Returns the exit status.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    let result = match cli.command {
        Command::Run { config, out: dir } => cmd_run(&config, dir.as_deref(), out),
        Command::Compare { config, out: dir } => cmd_compare(&config, dir.as_deref(), out),
        Command::Validate { config } => cmd_validate(&config, out),
        Command::Defaults => out.write_all(DEFAULT_CONFIG.as_bytes()).map_err(|e| at(EXIT_OUTPUT)(e.into())),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.error);
            f.code
        }
    }
}

fn load(path: &Path) -> Result<(ExperimentSpec, String), Failure> {
    let (spec, text) = ExperimentSpec::load(path).map_err(at(EXIT_READ))?;
    spec.validate().map_err(at(EXIT_INVALID))?;
    Ok((spec, text))
}

fn cmd_validate(path: &Path, out: &mut dyn Write) -> Result<(), Failure> {
    let (spec, _) = load(path)?;
    writeln!(out, "{}: ok ({})", path.display(), spec.name).map_err(|e| at(EXIT_OUTPUT)(e.into()))
}

fn run_dir(spec: &ExperimentSpec, root: Option<&Path>, controller: ControllerKind) -> PathBuf {
    root.unwrap_or(&spec.output_dir).join(&spec.name).join(controller.label())
}

/// Writes the config snapshot, log, metrics and weights of one run into `dir`.
fn write_run(dir: &Path, snapshot: &str, log: &RunLog, metrics: &Metrics) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("config.toml"), snapshot)?;
    log.write_csv(BufWriter::new(File::create(dir.join("log.csv"))?))?;
    metrics.write_csv(File::create(dir.join("metrics.csv"))?)?;
    if let Some(w) = &log.weights {
        w.write_csv(File::create(dir.join("weights.csv"))?)?;
    }
    Ok(())
}

fn run_one(setup: &Setup) -> Result<(RunLog, Metrics)> {
    let log = simulate(setup)?;
    let metrics = compute_metrics(&log, setup.sim.settle_threshold)?;
    Ok((log, metrics))
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "not settled".to_string(), |x| format!("{x:.3}"))
}

fn cmd_run(path: &Path, root: Option<&Path>, out: &mut dyn Write) -> Result<(), Failure> {
    let (spec, text) = load(path)?;
    let (log, metrics) = run_one(&spec.setup()).map_err(at(EXIT_ABORT))?;
    let dir = run_dir(&spec, root, spec.sim.controller);
    write_run(&dir, &text, &log, &metrics).map_err(at(EXIT_OUTPUT))?;
    let mut report = || -> std::io::Result<()> {
        writeln!(out, "{} ({}) -> {}", spec.name, spec.sim.controller.label(), dir.display())?;
        writeln!(out, "joint  settling[s]  rmse[rad]")?;
        for j in 0..4 {
            writeln!(out, "{:>5}  {:>11}  {:.3e}", j + 1, fmt_opt(metrics.settling_time[j]), metrics.rmse[j])?;
        }
        writeln!(out, "lyapunov violations: {}", metrics.lyapunov_violations)
    };
    report().map_err(|e| at(EXIT_OUTPUT)(e.into()))
}

/// Per-joint comparison of the two controllers.
#[derive(Debug, Clone, PartialEq)]
pub struct JointComparison {
    pub joint: usize,
    pub dsc_settling: Option<f64>,
    pub rbfn_settling: Option<f64>,
    pub dsc_rmse: f64,
    pub rbfn_rmse: f64,
    pub dsc_max_after: Option<f64>,
    pub rbfn_max_after: Option<f64>,
}

impl JointComparison {
    /// RBFN-DSC settling time minus DSC-certain settling time.
    pub fn settling_lag(&self) -> Option<f64> {
        Some(self.rbfn_settling? - self.dsc_settling?)
    }
}

pub fn compare_metrics(dsc: &Metrics, rbfn: &Metrics) -> Vec<JointComparison> {
    (0..4)
        .map(|j| JointComparison {
            joint: j + 1,
            dsc_settling: dsc.settling_time[j],
            rbfn_settling: rbfn.settling_time[j],
            dsc_rmse: dsc.rmse[j],
            rbfn_rmse: rbfn.rmse[j],
            dsc_max_after: dsc.max_error_after_settling[j],
            rbfn_max_after: rbfn.max_error_after_settling[j],
        })
        .collect()
}

fn opt_cell(v: Option<f64>) -> String {
    v.map_or_else(|| "none".to_string(), |x| x.to_string())
}

fn write_comparison(dir: &Path, rows: &[JointComparison], dsc: &RunLog, rbfn: &RunLog) -> Result<()> {
    let mut wtr = csv::Writer::from_path(dir.join("comparison.csv"))?;
    wtr.write_record([
        "joint",
        "dsc_settling_time",
        "rbfn_settling_time",
        "settling_lag",
        "dsc_rmse",
        "rbfn_rmse",
        "rmse_difference",
        "dsc_max_error_after_settling",
        "rbfn_max_error_after_settling",
    ])?;
    for r in rows {
        wtr.write_record([
            r.joint.to_string(),
            opt_cell(r.dsc_settling),
            opt_cell(r.rbfn_settling),
            opt_cell(r.settling_lag()),
            r.dsc_rmse.to_string(),
            r.rbfn_rmse.to_string(),
            (r.rbfn_rmse - r.dsc_rmse).to_string(),
            opt_cell(r.dsc_max_after),
            opt_cell(r.rbfn_max_after),
        ])?;
    }
    wtr.flush()?;

    // Error series of both runs on the shared time grid, plus their difference.
    let mut wtr = csv::Writer::from_writer(BufWriter::new(File::create(dir.join("errors.csv"))?));
    let mut header = vec!["t".to_string()];
    for prefix in ["dsc_z1_", "rbfn_z1_", "diff_z1_"] {
        header.extend((1..=4).map(|j| format!("{prefix}{j}")));
    }
    wtr.write_record(&header)?;
    for (a, b) in dsc.records.iter().zip(&rbfn.records) {
        let mut row = vec![a.t.to_string()];
        row.extend(a.z1.iter().map(|v| v.to_string()));
        row.extend(b.z1.iter().map(|v| v.to_string()));
        row.extend((b.z1 - a.z1).iter().map(|v| v.to_string()));
        wtr.write_record(&row)?;
    }
    wtr.flush()?;
    Ok(())
}

fn cmd_compare(path: &Path, root: Option<&Path>, out: &mut dyn Write) -> Result<(), Failure> {
    let (spec, text) = load(path)?;
    let with = |controller| {
        let mut s = spec.setup();
        s.sim.controller = controller;
        s
    };
    let (dsc_setup, rbfn_setup) = (with(ControllerKind::DscCertain), with(ControllerKind::RbfnDsc));
    let (dsc, rbfn) = std::thread::scope(|scope| {
        let a = scope.spawn(|| run_one(&dsc_setup));
        let b = scope.spawn(|| run_one(&rbfn_setup));
        (
            a.join().expect("simulation thread panicked"),
            b.join().expect("simulation thread panicked"),
        )
    });
    let (dsc_log, dsc_metrics) = dsc.map_err(at(EXIT_ABORT))?;
    let (rbfn_log, rbfn_metrics) = rbfn.map_err(at(EXIT_ABORT))?;

    let dsc_dir = run_dir(&spec, root, ControllerKind::DscCertain);
    let rbfn_dir = run_dir(&spec, root, ControllerKind::RbfnDsc);
    let parent = dsc_dir.parent().map(Path::to_path_buf).unwrap_or_default();
    let rows = compare_metrics(&dsc_metrics, &rbfn_metrics);
    let written = write_run(&dsc_dir, &text, &dsc_log, &dsc_metrics)
        .and_then(|_| write_run(&rbfn_dir, &text, &rbfn_log, &rbfn_metrics))
        .and_then(|_| write_comparison(&parent, &rows, &dsc_log, &rbfn_log));
    written.map_err(at(EXIT_OUTPUT))?;

    let mut report = || -> std::io::Result<()> {
        writeln!(out, "{} -> {}", spec.name, parent.display())?;
        writeln!(out, "joint  dsc settling  rbfn settling  lag[s]  dsc rmse   rbfn rmse")?;
        for r in &rows {
            writeln!(
                out,
                "{:>5}  {:>12}  {:>13}  {:>6}  {:.3e}  {:.3e}",
                r.joint,
                fmt_opt(r.dsc_settling),
                fmt_opt(r.rbfn_settling),
                r.settling_lag().map_or("-".into(), |v| format!("{v:.3}")),
                r.dsc_rmse,
                r.rbfn_rmse
            )?;
        }
        Ok(())
    };
    report().map_err(|e| at(EXIT_OUTPUT)(e.into()))
}
