// Copyright 2026 The ROA Authors
// SPDX-License-Identifier: Apache-2.0

use std::io::Write;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};

use roa_core::integrator::Status;
use roa_core::observables::RhoForm;
use roa_core::presets::{self, PresetError};
use roa_core::report::{self, Metric, RunManifest, Table};
use roa_core::simulate::{run_with, RunOptions};
use roa_core::{LorentzianPeak, Method, Scenario};

const EXIT_FAILURE: u8 = 1;
const EXIT_SCHEMA: u8 = 2;
const EXIT_DIVERGED: u8 = 3;
const EXIT_NUMERICAL: u8 = 4;

#[derive(Parser)]
#[command(name = "roa", version, about = "Reduced operator simulations of open quantum systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write its trajectory CSV and manifest.
    Run(RunArgs),
    /// Compare one column of two trajectory CSVs.
    Compare(CompareArgs),
    /// Print a built-in scenario as JSON.
    Preset(PresetArgs),
    /// Run several scenarios concurrently, one output file each.
    Sweep(SweepArgs),
    /// Check a scenario without running it.
    Validate(SourceArgs),
}

#[derive(Args, Clone)]
struct SourceArgs {
    /// Scenario JSON file.
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Built-in scenario: bath-A, bath-B, bath-C, bath-D or ring-15.
    #[arg(long)]
    preset: Option<String>,
    /// Override the scenario's method.
    #[arg(long)]
    method: Option<Method>,
    /// Lorentzian peaks for ring-15, as a JSON list of {gamma, Gamma, omega0}.
    #[arg(long)]
    peaks: Option<String>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long = "t-max")]
    t_max: Option<f64>,
}

#[derive(Args, Clone)]
struct RunArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Trajectory CSV path; defaults to `<name>_<method>.csv`.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Single-threaded, fixed-order execution.
    #[arg(long)]
    deterministic: bool,
    /// Density-matrix form written to the CSV.
    #[arg(long, default_value = "positive", value_parser = parse_form)]
    rho_form: RhoForm,
    /// Skip the n_max + 1 truncation check of pm-reference runs.
    #[arg(long)]
    no_pm_check: bool,
    /// Also write a gnuplot script next to the CSV.
    #[arg(long)]
    gnuplot: bool,
}

#[derive(Args)]
struct CompareArgs {
    a: PathBuf,
    b: PathBuf,
    #[arg(long, default_value = "rho_1_1_re")]
    column: String,
    #[arg(long, default_value = "rms")]
    metric: Metric,
    /// Linearly interpolate the second file onto the first file's times.
    #[arg(long)]
    interpolate: bool,
    /// Print the full comparison as JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct PresetArgs {
    name: String,
    #[arg(long)]
    method: Option<Method>,
    #[arg(long)]
    peaks: Option<String>,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// Scenario JSON files.
    #[arg(required = true)]
    configs: Vec<PathBuf>,
    #[arg(long)]
    method: Option<Method>,
    /// Directory receiving `<config stem>.csv` per scenario.
    #[arg(long = "output-dir", default_value = ".")]
    output_dir: PathBuf,
    /// Run the scenarios one after another.
    #[arg(long)]
    deterministic: bool,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long = "t-max")]
    t_max: Option<f64>,
}

fn parse_form(s: &str) -> Result<RhoForm, String> {
    match s {
        "positive" => Ok(RhoForm::Positive),
        "trace" => Ok(RhoForm::Trace),
        _ => Err(format!("unknown form `{s}` (expected positive or trace)")),
    }
}

/// An error tagged with its process exit code.
#[derive(Debug)]
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl Failure {
    fn schema(error: impl Into<anyhow::Error>) -> Self {
        Self { code: EXIT_SCHEMA, error: error.into() }
    }
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Self { code: EXIT_FAILURE, error: e.into() }
    }
}

fn parse_peaks(text: &str) -> Result<Vec<LorentzianPeak>, Failure> {
    let peaks: Vec<LorentzianPeak> = serde_json::from_str(text).map_err(|e| Failure::schema(anyhow!("--peaks: {e}")))?;
    for p in &peaks {
        p.check().map_err(|e| Failure::schema(anyhow!("--peaks: {e}")))?;
    }
    Ok(peaks)
}

fn build_preset(name: &str, method: Option<Method>, peaks: Option<&str>) -> Result<Scenario, Failure> {
    let method = method.unwrap_or(Method::LorentzianLow);
    let result = if name == "ring-15" {
        let peaks = match peaks {
            Some(text) => parse_peaks(text)?,
            None => Vec::new(),
        };
        presets::ring15(&peaks, method)
    } else {
        presets::preset_with_method(name, method)
    };
    result.map_err(|e: PresetError| Failure::schema(e))
}

fn load(source: &SourceArgs) -> Result<(Scenario, String), Failure> {
    let (mut sc, label) = match (&source.config, &source.preset) {
        (Some(path), _) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let mut sc = Scenario::from_json(&text).map_err(Failure::schema)?;
            if let Some(m) = source.method {
                sc.method = m;
            }
            let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "scenario".into());
            let label = sc_label(&sc_name(&sc, &stem));
            (sc, label)
        }
        (None, Some(name)) => {
            let sc = build_preset(name, source.method, source.peaks.as_deref())?;
            (sc, name.clone())
        }
        (None, None) => return Err(Failure::schema(anyhow!("give --config PATH or --preset NAME"))),
    };
    if let Some(dt) = source.dt {
        sc.integrator.dt = dt;
    }
    if let Some(t) = source.t_max {
        sc.integrator.t_max = t;
    }
    Ok((sc, label))
}

fn sc_name(sc: &Scenario, fallback: &str) -> String {
    sc.name.clone().unwrap_or_else(|| fallback.to_string())
}

fn sc_label(name: &str) -> String {
    name.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' }).collect()
}

fn execute(sc: &Scenario, label: &str, output: &Path, opts: &RunOptions, gnuplot: bool, deterministic: bool) -> Result<(), Failure> {
    let validated = sc.validate().map_err(Failure::schema)?;
    let out = run_with(&validated, opts).map_err(|e| Failure { code: EXIT_NUMERICAL, error: e.into() })?;
    let file = fs::File::create(output).with_context(|| format!("creating {}", output.display()))?;
    report::write_csv(std::io::BufWriter::new(file), out.n_sites, &out.trajectory)?;
    let output_str = output.to_string_lossy().into_owned();
    let manifest = RunManifest {
        scenario: label.to_string(),
        method: out.method,
        integrator: out.integrator,
        output: output_str.clone(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        runtime_seconds: out.runtime.as_secs_f64(),
        status: out.trajectory.status.clone(),
        samples: out.trajectory.len(),
        deterministic,
        pm_max_delta_rho11: out.pm_convergence.map(|c| c.max_delta_rho11),
    };
    fs::write(report::manifest_path(&output_str), manifest.to_json())?;
    if gnuplot {
        let script = output.with_extension("gp");
        let csv_name = output.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or(output_str.clone());
        fs::write(script, report::gnuplot_script(&csv_name, out.n_sites))?;
    }
    if let Some(c) = out.pm_convergence {
        eprintln!("pm truncation check: max |Δρ₁₁| between n_max = {} and {} is {:.3e}", c.n_max, c.n_max + 1, c.max_delta_rho11);
    }
    match out.trajectory.status {
        Status::Completed => Ok(()),
        Status::Diverged { time } => {
            Err(Failure { code: EXIT_DIVERGED, error: anyhow!("{label}: {} diverged at t = {time}", out.method) })
        }
        Status::Error { time, message } => {
            Err(Failure { code: EXIT_NUMERICAL, error: anyhow!("{label}: numerical error at t = {time}: {message}") })
        }
    }
}

fn cmd_run(args: &RunArgs) -> Result<(), Failure> {
    let (sc, label) = load(&args.source)?;
    let output = args.output.clone().unwrap_or_else(|| PathBuf::from(format!("{label}_{}.csv", sc.method)));
    let opts = RunOptions {
        rho_form: args.rho_form,
        pm_convergence_check: !args.no_pm_check,
        ..RunOptions::default()
    };
    execute(&sc, &label, &output, &opts, args.gnuplot, args.deterministic)?;
    println!("{}", output.display());
    Ok(())
}

fn cmd_compare(args: &CompareArgs) -> Result<(), Failure> {
    let read = |p: &Path| -> Result<Table, Failure> {
        let f = fs::File::open(p).with_context(|| format!("opening {}", p.display()))?;
        Ok(Table::read(f).with_context(|| format!("reading {}", p.display()))?)
    };
    let (a, b) = (read(&args.a)?, read(&args.b)?);
    let c = report::compare(&a, &b, &args.column, args.interpolate)?;
    if args.json {
        println!("{}", serde_json::to_string_pretty(&c)?);
    } else {
        let name = match args.metric {
            Metric::Rms => "rms",
            Metric::MaxAbs => "max-abs",
        };
        println!("{} {name} {:.6e} over t in [{}, {}] ({} points)", c.column, c.value(args.metric), c.t_start, c.t_end, c.points);
    }
    Ok(())
}

fn cmd_preset(args: &PresetArgs) -> Result<(), Failure> {
    let sc = build_preset(&args.name, args.method, args.peaks.as_deref())?;
    match &args.output {
        Some(p) => fs::write(p, sc.to_json() + "\n")?,
        None => print_stdout(&sc.to_json())?,
    }
    Ok(())
}

/// Writes to stdout, treating a closed pipe as success.
fn print_stdout(text: &str) -> std::io::Result<()> {
    let mut out = std::io::stdout().lock();
    match writeln!(out, "{text}") {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        other => other,
    }
}

fn cmd_validate(args: &SourceArgs) -> Result<(), Failure> {
    let (sc, label) = load(args)?;
    let v = sc.validate().map_err(Failure::schema)?;
    println!("{label}: valid ({} sites, method {})", v.n_sites(), v.method);
    Ok(())
}

fn cmd_sweep(args: &SweepArgs) -> Result<(), Failure> {
    fs::create_dir_all(&args.output_dir)?;
    let jobs: Vec<(RunArgs, PathBuf)> = args
        .configs
        .iter()
        .map(|cfg| {
            let stem = cfg.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "scenario".into());
            let output = args.output_dir.join(format!("{stem}.csv"));
            let run = RunArgs {
                source: SourceArgs { config: Some(cfg.clone()), preset: None, method: args.method, peaks: None, dt: args.dt, t_max: args.t_max },
                output: Some(output.clone()),
                deterministic: args.deterministic,
                rho_form: RhoForm::Positive,
                no_pm_check: false,
                gnuplot: false,
            };
            (run, output)
        })
        .collect();
    let results: Vec<Result<(), Failure>> = if args.deterministic {
        jobs.iter().map(|(r, _)| cmd_run(r)).collect()
    } else {
        std::thread::scope(|s| {
            let handles: Vec<_> = jobs.iter().map(|(r, _)| s.spawn(move || cmd_run(r))).collect();
            handles.into_iter().map(|h| h.join().unwrap_or_else(|_| Err(anyhow!("worker panicked").into()))).collect()
        })
    };
    let mut worst: Option<Failure> = None;
    for ((_, out), r) in jobs.iter().zip(results) {
        if let Err(f) = r {
            eprintln!("{}: {:#}", out.display(), f.error);
            if worst.as_ref().is_none_or(|w| f.code > w.code) {
                worst = Some(f);
            }
        }
    }
    worst.map_or(Ok(()), Err)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Preset(a) => cmd_preset(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Validate(a) => cmd_validate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
