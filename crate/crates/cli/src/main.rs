use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use foguel_core::experiment::{emit_report, run_experiment, ExperimentConfig, OutputFormat, RunError};
use foguel_core::experiment::{ConfigError, Experiment};
use serde::Deserialize;

const EXIT_PASS: u8 = 0;
const EXIT_PROPERTY: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_INTERNAL: u8 = 3;

/// Seeded numerical checks for Foguel operators.
#[derive(Parser, Debug)]
#[command(name = "foguel", version)]
struct Args {
    /// One of verify-spectrum, verify-norm, verify-resolvent, verify-inverses,
    /// verify-dilation, verify-polynomial, verify-power, verify-schur,
    /// shift-convergence.
    #[arg(value_parser = parse_experiment)]
    experiment: Experiment,

    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Threshold on the headline deviation; each experiment has its own default.
    #[arg(long)]
    tol: Option<f64>,
    /// json-lines or csv
    #[arg(long, value_parser = parse_format)]
    format: Option<OutputFormat>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    power_max: Option<usize>,
    #[arg(long)]
    poly_degree: Option<usize>,
    #[arg(long)]
    neumann_order: Option<usize>,
    /// Comma-separated, e.g. 16,64,256
    #[arg(long, value_delimiter = ',')]
    shift_dims: Option<Vec<usize>>,
    /// Use V = A = I, T = I instead of random inputs.
    #[arg(long)]
    unit_fixture: bool,
    /// Include wall time in the aggregate record.
    #[arg(long)]
    timings: bool,
    /// TOML file with the same keys as the long flags.
    #[arg(long)]
    config: Option<PathBuf>,
}

/// Values read from `--config`; every key is optional.
#[derive(Debug, Default, Deserialize, PartialEq)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
struct FileConfig {
    dim: Option<usize>,
    trials: Option<u64>,
    seed: Option<u64>,
    tol: Option<f64>,
    format: Option<OutputFormat>,
    out: Option<PathBuf>,
    power_max: Option<usize>,
    poly_degree: Option<usize>,
    neumann_order: Option<usize>,
    shift_dims: Option<Vec<usize>>,
    unit_fixture: Option<bool>,
    timings: Option<bool>,
}

fn parse_experiment(s: &str) -> Result<Experiment, String> {
    s.parse().map_err(|e: ConfigError| e.message)
}

fn parse_format(s: &str) -> Result<OutputFormat, String> {
    s.parse().map_err(|e: ConfigError| e.message)
}

fn read_file_config(path: &Path) -> Result<FileConfig, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    toml::from_str(&text).map_err(|e| format!("cannot parse {}: {e}", path.display()))
}

/// Flags override file values, which override the built-in defaults.
fn resolve(args: &Args, file: FileConfig) -> (ExperimentConfig, Option<PathBuf>) {
    let mut cfg = ExperimentConfig::new(args.experiment);
    cfg.dim = args.dim.or(file.dim).unwrap_or(cfg.dim);
    cfg.trials = args.trials.or(file.trials).unwrap_or(cfg.trials);
    cfg.seed = args.seed.or(file.seed).unwrap_or(cfg.seed);
    cfg.tol = args.tol.or(file.tol);
    cfg.format = args.format.or(file.format).unwrap_or(cfg.format);
    cfg.power_max = args.power_max.or(file.power_max).unwrap_or(cfg.power_max);
    cfg.poly_degree = args.poly_degree.or(file.poly_degree).unwrap_or(cfg.poly_degree);
    cfg.neumann_order = args.neumann_order.or(file.neumann_order).unwrap_or(cfg.neumann_order);
    cfg.shift_dims = args.shift_dims.clone().or(file.shift_dims).unwrap_or(cfg.shift_dims);
    cfg.unit_fixture = args.unit_fixture || file.unit_fixture.unwrap_or(false);
    cfg.timings = args.timings || file.timings.unwrap_or(false);
    (cfg, args.out.clone().or(file.out))
}

fn write_report(report: &foguel_core::experiment::ExperimentReport, out: Option<&Path>) -> io::Result<()> {
    let format = report.config.format;
    match out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            emit_report(report, format, &mut w)?;
            w.flush()
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            emit_report(report, format, &mut w)?;
            w.flush()
        }
    }
}

fn run(args: Args) -> u8 {
    let file = match &args.config {
        Some(path) => match read_file_config(path) {
            Ok(f) => f,
            Err(e) => {
                eprintln!("error: {e}");
                return EXIT_USAGE;
            }
        },
        None => FileConfig::default(),
    };
    let (cfg, out) = resolve(&args, file);
    let report = match run_experiment(&cfg) {
        Ok(r) => r,
        Err(RunError::Usage(e)) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
        Err(e @ RunError::Internal { .. }) => {
            eprintln!("internal consistency error: {e}");
            return EXIT_INTERNAL;
        }
    };
    if let Err(e) = write_report(&report, out.as_deref()) {
        if e.kind() == io::ErrorKind::BrokenPipe {
            return if report.aggregate.pass {
                EXIT_PASS
            } else {
                EXIT_PROPERTY
            };
        }
        eprintln!("error: cannot write report: {e}");
        return EXIT_USAGE;
    }
    if report.aggregate.pass {
        EXIT_PASS
    } else {
        eprintln!(
            "{}: {} of {} trials failed",
            cfg.experiment,
            report.aggregate.trials - report.aggregate.pass_count,
            report.aggregate.trials
        );
        EXIT_PROPERTY
    }
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    ExitCode::from(run(args))
}
