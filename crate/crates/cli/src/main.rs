use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use berryphase::FdSteps;
use berryphase_cli::config::{ExperimentConfig, LoopSpec, Method, OutputFormat};
use berryphase_cli::output::write_records;
use berryphase_cli::tables::{connection_table, curvature_table, GridSpec};
use berryphase_cli::validate::run_suite;
use berryphase_cli::{parse_angle, run_experiment_with, sweep_with, CliError, RunOptions};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "berryphase", version, about = "Berry phases of spin and SU(3) coherent states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a single experiment.
    Phase(ExperimentArgs),
    /// Repeat an experiment over values of one fixed coordinate.
    Sweep {
        #[command(flatten)]
        experiment: ExperimentArgs,
        /// Coordinate to vary (must be held fixed by the loop).
        #[arg(long)]
        coord: String,
        /// Comma-separated values, e.g. "pi/6,pi/4,pi/3".
        #[arg(long, conflicts_with = "linspace", allow_hyphen_values = true)]
        values: Option<String>,
        /// Evenly spaced values "start,stop,count" (both ends included).
        #[arg(long, allow_hyphen_values = true)]
        linspace: Option<String>,
    },
    /// Tabulate the Berry connection over a grid.
    Connection(GridArgs),
    /// Tabulate the Berry curvature over a grid.
    Curvature(GridArgs),
    /// Run the built-in reproduction suite and print PASS/FAIL per check.
    Validate {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct ExperimentArgs {
    /// TOML experiment config; flags below override its fields.
    config: Option<PathBuf>,
    #[arg(long)]
    family: Option<String>,
    /// line, overlap, surface, schrodinger or all.
    #[arg(long)]
    method: Option<String>,
    /// "sweep=phi,theta=pi/2[,turns=N][,radial=..][,radial_from=..]" or a .csv path.
    #[arg(long = "loop")]
    loop_spec: Option<String>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    grid: Option<usize>,
    /// Traversal time for the Schrödinger method.
    #[arg(long = "T")]
    total_time: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    seed: Option<u64>,
    /// Add wall-clock seconds to each record (output is then not reproducible byte for byte).
    #[arg(long)]
    timing: bool,
}

#[derive(Args)]
struct GridArgs {
    #[arg(long)]
    family: String,
    /// Two grid coordinates, e.g. "theta,phi" (default: the first two).
    #[arg(long)]
    axes: Option<String>,
    /// Values for the remaining coordinates, e.g. "g=pi/6,gamma=0".
    #[arg(long, allow_hyphen_values = true)]
    fixed: Option<String>,
    /// Points per axis.
    #[arg(long, default_value_t = 16)]
    grid: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Record,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => OutputFormat::Csv,
            Format::Record => OutputFormat::Record,
        }
    }
}

fn build_config(a: &ExperimentArgs) -> Result<ExperimentConfig, CliError> {
    let mut cfg = match &a.config {
        Some(path) => ExperimentConfig::from_path(path)?,
        None => {
            let family = a
                .family
                .clone()
                .ok_or_else(|| CliError::Config("--family is required without a config file".into()))?;
            let spec = a
                .loop_spec
                .as_deref()
                .ok_or_else(|| CliError::Config("--loop is required without a config file".into()))?;
            ExperimentConfig::new(&family, Method::Line, LoopSpec::parse_flag(spec)?)
        }
    };
    if let Some(f) = &a.family {
        cfg.family = f.clone();
    }
    if let Some(m) = &a.method {
        cfg.method = Method::parse(m)?;
    }
    if let (Some(spec), Some(_)) = (&a.loop_spec, &a.config) {
        cfg.loop_spec = LoopSpec::parse_flag(spec)?;
    }
    if let Some(n) = a.samples {
        cfg.resolution.samples = n;
    }
    if let Some(n) = a.grid {
        cfg.resolution.grid = n;
    }
    if let Some(t) = a.total_time {
        cfg.oracle.total_time = t;
    }
    if let Some(s) = a.steps {
        cfg.oracle.steps = Some(s);
    }
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    if let Some(p) = &a.out {
        cfg.output.path = Some(p.clone());
    }
    if let Some(f) = a.format {
        cfg.output.format = f.into();
    }
    Ok(cfg)
}

fn open_output(path: Option<&PathBuf>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => {
            Box::new(BufWriter::new(File::create(p).map_err(|e| CliError::Output(format!("{}: {e}", p.display())))?))
        }
        None => Box::new(io::stdout().lock()),
    })
}

fn parse_values(values: Option<&str>, linspace: Option<&str>) -> Result<Vec<f64>, CliError> {
    let angle = |s: &str| parse_angle(s.trim()).map_err(|e| CliError::Config(e.to_string()));
    match (values, linspace) {
        (Some(v), None) => v.split(',').filter(|s| !s.trim().is_empty()).map(angle).collect(),
        (None, Some(l)) => {
            let parts: Vec<&str> = l.split(',').collect();
            let [a, b, n] = parts[..] else {
                return Err(CliError::Config("--linspace expects start,stop,count".into()));
            };
            let (a, b) = (angle(a)?, angle(b)?);
            let n: usize = n.trim().parse().map_err(|_| CliError::Config(format!("bad count `{n}`")))?;
            Ok(match n {
                0 => vec![],
                1 => vec![a],
                _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
            })
        }
        _ => Err(CliError::Config("sweep needs --values or --linspace".into())),
    }
}

fn parse_fixed(s: Option<&str>) -> Result<BTreeMap<String, f64>, CliError> {
    let mut out = BTreeMap::new();
    for part in s.unwrap_or("").split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("--fixed: expected name=value, got `{part}`")))?;
        out.insert(k.trim().to_string(), parse_angle(v.trim()).map_err(|e| CliError::Config(e.to_string()))?);
    }
    Ok(out)
}

fn grid(args: &GridArgs, curvature: bool) -> Result<(), CliError> {
    let mut spec = GridSpec::new(&args.family, args.grid)?;
    if let Some(axes) = &args.axes {
        let (a, b) = axes.split_once(',').ok_or_else(|| CliError::Config("--axes expects two names".into()))?;
        spec.axes = (a.trim().to_string(), b.trim().to_string());
    }
    spec.fixed = parse_fixed(args.fixed.as_deref())?;
    spec.steps = FdSteps::default();
    let table = if curvature { curvature_table(&spec)? } else { connection_table(&spec)? };
    table.write(args.format.into(), open_output(args.out.as_ref())?)
}

fn run(cli: Cli) -> Result<bool, CliError> {
    match cli.command {
        Command::Phase(a) => {
            let cfg = build_config(&a)?;
            let records = run_experiment_with(&cfg, RunOptions { timing: a.timing })?;
            write_records(&records, cfg.output.format, open_output(cfg.output.path.as_ref())?)?;
        }
        Command::Sweep { experiment, coord, values, linspace } => {
            let cfg = build_config(&experiment)?;
            let values = parse_values(values.as_deref(), linspace.as_deref())?;
            let records = sweep_with(&cfg, &coord, &values, RunOptions { timing: experiment.timing })?;
            write_records(&records, cfg.output.format, open_output(cfg.output.path.as_ref())?)?;
        }
        Command::Connection(a) => grid(&a, false)?,
        Command::Curvature(a) => grid(&a, true)?,
        Command::Validate { seed } => {
            let checks = run_suite(seed)?;
            let mut out = io::stdout().lock();
            for c in &checks {
                writeln!(out, "{c}").map_err(|e| CliError::Output(e.to_string()))?;
            }
            let failed = checks.iter().filter(|c| !c.passed).count();
            writeln!(out, "{} passed, {failed} failed (seed {seed})", checks.len() - failed)
                .map_err(|e| CliError::Output(e.to_string()))?;
            return Ok(failed == 0);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
