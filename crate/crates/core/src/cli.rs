//! Command-line front end: `run`, `compare`, `validate-fis` and `demo`.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::config::ScenarioConfig;
use crate::fis::traffic::rule_matrix;
use crate::fis::Fis;
use crate::metrics::compare_runs;
use crate::scenario::{
    demo_config, load_fis, load_fis_file, run_scenario, run_seeds, FisLoadError, RunOutput,
};

#[derive(Debug, Parser)]
#[command(
    name = "fuzzy-signal",
    version,
    about = "Fuzzy traffic signal simulator"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate one seed and write the event log, time series and metrics.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: u64,
        /// Override a config key, e.g. `--set lambda.N.through=0.2`.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Paired runs of two controllers over the same seeds.
    Compare {
        #[arg(long)]
        config: PathBuf,
        /// `kind[:key=value;...]`, e.g. `fuzzy:preemption=false`.
        #[arg(long)]
        controller_a: String,
        #[arg(long)]
        controller_b: String,
        #[arg(long, value_delimiter = ',', required = true)]
        seeds: Vec<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Parse a rule-base file, check it and print its rule matrix.
    ValidateFis { path: PathBuf },
    /// Run the built-in asymmetric scenario with seed 1.
    Demo {
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Invalid(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code. Normal output goes to `out`, diagnostics to `err`.
pub fn main_with<I, T>(args: I, out: &mut dyn std::io::Write, err: &mut dyn std::io::Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = if code == 0 {
                write!(out, "{e}")
            } else {
                write!(err, "{e}")
            };
            return code;
        }
    };
    match execute(cli.command, default_threads()) {
        Ok(report) => {
            let _ = out.write_all(report.as_bytes());
            0
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn default_threads() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

/// Runs a parsed command and returns the text to print on success.
pub fn execute(command: Command, threads: usize) -> Result<String, CliError> {
    match command {
        Command::Run {
            config,
            seed,
            overrides,
            out,
        } => {
            let mut cfg = load_config(&config, &overrides)?;
            cfg.seed = seed;
            run_one(&cfg, &out)
        }
        Command::Compare {
            config,
            controller_a,
            controller_b,
            seeds,
            out,
        } => {
            if seeds.len() < 2 {
                return Err(CliError::Usage("compare needs at least two seeds".into()));
            }
            let base = load_config(&config, &[])?;
            let a = with_controller(&base, &controller_a)?;
            let b = with_controller(&base, &controller_b)?;
            compare(&a, &b, &seeds, threads, &out)
        }
        Command::ValidateFis { path } => {
            let fis = load_fis_file(&path).map_err(fis_error)?;
            validate_report(&fis).map_err(CliError::Invalid)
        }
        Command::Demo { out } => {
            let mut cfg = demo_config();
            cfg.seed = 1;
            run_one(&cfg, &out)
        }
    }
}

/// Reads a config file and applies overrides. A relative `fuzzy.fis` in
/// the file is taken relative to the file; one given as an override is
/// taken relative to the working directory.
pub fn load_config(path: &Path, overrides: &[String]) -> Result<ScenarioConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let mut cfg = ScenarioConfig::parse(&text)
        .map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))?;
    let dir = path.parent().unwrap_or(Path::new(""));
    absolutize_fis(&mut cfg, dir)?;
    let from_file = cfg.controller.fis.clone();
    for o in overrides {
        cfg.apply_override(o)
            .map_err(|e| CliError::Invalid(format!("--set {o}: {e}")))?;
    }
    if cfg.controller.fis != from_file {
        absolutize_fis(&mut cfg, Path::new(""))?;
    }
    cfg.validate()
        .map_err(|e| CliError::Invalid(e.to_string()))?;
    Ok(cfg)
}

fn absolutize_fis(cfg: &mut ScenarioConfig, base: &Path) -> Result<(), CliError> {
    if let Some(p) = &cfg.controller.fis {
        if p.is_relative() {
            let joined = base.join(p);
            let abs = std::path::absolute(&joined)
                .map_err(|e| CliError::Io(format!("{}: {e}", joined.display())))?;
            cfg.controller.fis = Some(abs);
        }
    }
    Ok(())
}

/// Applies a controller specification `kind[:key=value;...]`. Keys
/// without a section belong to `controller`.
pub fn with_controller(base: &ScenarioConfig, spec: &str) -> Result<ScenarioConfig, CliError> {
    let mut cfg = base.clone();
    let (kind, rest) = spec.split_once(':').unwrap_or((spec, ""));
    let invalid =
        |e: crate::config::ConfigError| CliError::Invalid(format!("controller `{spec}`: {e}"));
    cfg.set("controller.kind", kind.trim()).map_err(invalid)?;
    for pair in rest.split(';').map(str::trim).filter(|p| !p.is_empty()) {
        let (key, value) = pair.split_once('=').ok_or_else(|| {
            CliError::Usage(format!(
                "controller `{spec}`: expected key=value, got `{pair}`"
            ))
        })?;
        let key = key.trim();
        let key = if key.contains('.') {
            key.to_string()
        } else {
            format!("controller.{key}")
        };
        cfg.set(&key, value.trim()).map_err(invalid)?;
    }
    cfg.validate().map_err(invalid)?;
    Ok(cfg)
}

fn fis_error(e: FisLoadError) -> CliError {
    match e {
        FisLoadError::Io { .. } => CliError::Io(e.to_string()),
        FisLoadError::Format { .. } => CliError::Invalid(e.to_string()),
    }
}

fn fis_for(cfg: &ScenarioConfig) -> Result<Fis, CliError> {
    load_fis(cfg).map_err(fis_error)
}

fn run_one(cfg: &ScenarioConfig, out: &Path) -> Result<String, CliError> {
    let fis = fis_for(cfg)?;
    let run = run_scenario(cfg, fis).map_err(|e| CliError::Invalid(e.to_string()))?;
    write_run(cfg, &run, out)?;
    Ok(run.metrics.to_table())
}

/// Writes `events.csv`, `timeseries.csv`, `metrics.csv` and
/// `resolved-config.cfg` into `dir`.
pub fn write_run(cfg: &ScenarioConfig, run: &RunOutput, dir: &Path) -> Result<(), CliError> {
    write_atomic(dir, "events.csv", &run.event_log_csv())?;
    write_atomic(dir, "timeseries.csv", &run.time_series_csv())?;
    write_atomic(dir, "metrics.csv", &run.metrics.to_csv())?;
    write_atomic(dir, "resolved-config.cfg", &cfg.to_text())
}

fn compare(
    a: &ScenarioConfig,
    b: &ScenarioConfig,
    seeds: &[u64],
    threads: usize,
    out: &Path,
) -> Result<String, CliError> {
    let runs = |cfg: &ScenarioConfig| {
        let fis = fis_for(cfg)?;
        run_seeds(cfg, &fis, seeds, threads).map_err(|e| CliError::Invalid(e.to_string()))
    };
    let (ra, rb) = (runs(a)?, runs(b)?);
    let ma: Vec<_> = ra.iter().map(|r| r.metrics.clone()).collect();
    let mb: Vec<_> = rb.iter().map(|r| r.metrics.clone()).collect();
    let cmp = compare_runs(&ma, &mb).expect("paired by construction");

    let mut pairs = String::from(
        "seed,mean_wait_a,mean_wait_b,mean_queue_a,mean_queue_b,throughput_a,throughput_b,ev_delay_a,ev_delay_b\n",
    );
    for ((seed, x), y) in seeds.iter().zip(&ma).zip(&mb) {
        let _ = writeln!(
            pairs,
            "{seed},{:.6},{:.6},{:.6},{:.6},{},{},{:.6},{:.6}",
            x.mean_wait,
            y.mean_wait,
            x.mean_queue,
            y.mean_queue,
            x.throughput,
            y.throughput,
            x.ev_mean_delay(),
            y.ev_mean_delay()
        );
    }
    write_atomic(out, "pairs.csv", &pairs)?;
    write_atomic(out, "comparison.csv", &cmp.to_csv())?;
    write_atomic(out, "resolved-config-a.cfg", &a.to_text())?;
    write_atomic(out, "resolved-config-b.cfg", &b.to_text())?;

    let mut report = String::new();
    let _ = writeln!(
        report,
        "per-seed mean_wait (A = {}, B = {})",
        a.controller.kind.as_str(),
        b.controller.kind.as_str()
    );
    let _ = writeln!(report, "{:>10} {:>12} {:>12}", "seed", "A", "B");
    for ((seed, x), y) in seeds.iter().zip(&ma).zip(&mb) {
        let _ = writeln!(
            report,
            "{seed:>10} {:>12.3} {:>12.3}",
            x.mean_wait, y.mean_wait
        );
    }
    report.push('\n');
    report.push_str(&cmp.to_table());
    Ok(report)
}

/// Checks a rule base and renders its matrix. Two-input systems with five
/// terms everywhere must cover all 25 antecedent pairs exactly once.
pub fn validate_report(fis: &Fis) -> Result<String, String> {
    let inputs = fis.inputs();
    let five_term = inputs.len() == 2
        && inputs.iter().all(|v| v.terms().len() == 5)
        && fis.output().terms().len() == 5;
    let matrix = rule_matrix(fis);
    if five_term && matrix.is_none() {
        return Err(format!(
            "incomplete rule base: {} rules, expected exactly one for each of the 25 antecedent pairs",
            fis.rules().len()
        ));
    }
    let mut report = format!(
        "{}: {} inputs, {} rules, output `{}`\n",
        fis.name(),
        inputs.len(),
        fis.rules().len(),
        fis.output().name()
    );
    if let (Some(m), [rows, cols]) = (matrix, inputs) {
        let out_labels: Vec<&str> = fis
            .output()
            .terms()
            .iter()
            .map(|t| t.label.as_str())
            .collect();
        let width = rows
            .terms()
            .iter()
            .chain(cols.terms())
            .map(|t| t.label.len())
            .chain(out_labels.iter().map(|l| l.len()))
            .max()
            .unwrap_or(1);
        let _ = writeln!(report, "rows: {}, columns: {}", rows.name(), cols.name());
        let _ = write!(report, "{:width$}", "");
        for t in cols.terms() {
            let _ = write!(report, " {:>width$}", t.label);
        }
        report.push('\n');
        for (t, row) in rows.terms().iter().zip(&m) {
            let _ = write!(report, "{:width$}", t.label);
            for &c in row {
                let _ = write!(report, " {:>width$}", out_labels[c]);
            }
            report.push('\n');
        }
    }
    report.push_str("ok\n");
    Ok(report)
}

/// Writes `contents` to `dir/name` through a temporary file and a rename,
/// so readers never see a partial file.
pub fn write_atomic(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    let io = |e: std::io::Error, p: &Path| CliError::Io(format!("{}: {e}", p.display()));
    std::fs::create_dir_all(dir).map_err(|e| io(e, dir))?;
    let target = dir.join(name);
    let tmp = dir.join(format!(".{name}.tmp"));
    let write = || -> std::io::Result<()> {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
        std::fs::rename(&tmp, &target)
    };
    write().map_err(|e| {
        let _ = std::fs::remove_file(&tmp);
        io(e, &target)
    })
}
