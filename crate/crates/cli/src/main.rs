use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, ValueEnum};

use rodfiter_cli::csv::{write_records, write_sweep, write_windows};
use rodfiter_cli::{run, Algorithm, CliError, Report, RunSpec, Subcommand};
use rodfiter_core::SampleKind;

#[derive(Parser)]
#[command(name = "rodfiter", version, about = "Coning-motion experiments for functional-iteration attitude algorithms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Subcommand)]
enum Command {
    /// Error curves of one method on clean samples.
    Reconstruct(Flags),
    /// RodFIter, RotFIter-T3, RotFIter-T2 and the two-sample baseline side by side.
    Compare(Flags),
    /// The chosen method and the baseline on corrupted samples, with error bounds.
    NoiseRun(Flags),
    /// Divergence boundary in sup|omega| for N = 2..10.
    SweepConvergence(Flags),
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Velocity,
    Increment,
}

#[derive(Args)]
struct Flags {
    /// Coning half-angle in degrees.
    #[arg(long, default_value_t = 10.0)]
    alpha_deg: f64,
    /// Coning frequency in multiples of pi rad/s.
    #[arg(long, default_value_t = 0.74)]
    coning_freq_pi: f64,
    /// Gyro sample rate in Hz.
    #[arg(long, default_value_t = 100.0)]
    rate_hz: f64,
    /// Samples per reconstruction window.
    #[arg(long, default_value_t = 8)]
    samples: usize,
    /// Chebyshev fit order, defaults to samples - 1.
    #[arg(long)]
    order: Option<usize>,
    #[arg(long, default_value_t = 7)]
    iterations: usize,
    #[arg(long, default_value = "rodfiter", value_parser = parse_algorithm)]
    method: Algorithm,
    /// Defaults to increment, or velocity for sweep-convergence.
    #[arg(long, value_enum)]
    sample_kind: Option<Kind>,
    #[arg(long, default_value_t = 2.0)]
    horizon_s: f64,
    /// Gyro bias per axis in deg/h, as x,y,z.
    #[arg(long, default_value = "0,0,0", value_parser = parse_triple)]
    bias_deg_h: [f64; 3],
    /// Angle random walk in deg/sqrt(h).
    #[arg(long, default_value_t = 0.0)]
    arw_deg_sqrt_h: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    truncate_degree: Option<usize>,
    /// Output CSV; window diagnostics go to FILE.windows.csv. Stdout if absent.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

fn parse_algorithm(s: &str) -> Result<Algorithm, String> {
    s.parse()
}

fn parse_triple(s: &str) -> Result<[f64; 3], String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("'{p}': {e}")))
        .collect::<Result<_, _>>()?;
    parts.try_into().map_err(|v: Vec<f64>| format!("expected 3 comma-separated values, got {}", v.len()))
}

fn to_spec(command: Subcommand, f: &Flags) -> RunSpec {
    RunSpec {
        command,
        alpha_deg: f.alpha_deg,
        coning_freq_pi: f.coning_freq_pi,
        rate_hz: f.rate_hz,
        samples: f.samples,
        order: f.order,
        iterations: f.iterations,
        method: f.method,
        sample_kind: f.sample_kind.map(|k| match k {
            Kind::Velocity => SampleKind::Velocity,
            Kind::Increment => SampleKind::Increment,
        }),
        horizon_s: f.horizon_s,
        bias_deg_h: f.bias_deg_h,
        arw_deg_sqrt_h: f.arw_deg_sqrt_h,
        seed: f.seed,
        truncate_degree: f.truncate_degree,
        ..RunSpec::default()
    }
}

fn windows_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".windows.csv");
    PathBuf::from(name)
}

fn execute(command: Subcommand, flags: &Flags) -> Result<(), CliError> {
    let spec = to_spec(command, flags);
    let report = run(&spec)?;
    let sink: Box<dyn Write> = match &flags.out {
        Some(p) => Box::new(File::create(p)?),
        None => Box::new(io::stdout().lock()),
    };
    let mut sink = BufWriter::new(sink);
    match report {
        Report::Errors(out) => {
            write_records(&mut sink, &out.records)?;
            if let Some(p) = &flags.out {
                write_windows(BufWriter::new(File::create(windows_path(p))?), &out.windows)?;
            }
            for d in out.windows.iter().filter(|d| d.precondition_exceeded()) {
                eprintln!(
                    "warning: {} window {} has t*sup|omega| = {} >= 2, convergence not guaranteed",
                    d.method, d.window, d.precondition
                );
            }
        }
        Report::Sweep(rows) => {
            write_sweep(&mut sink, &rows)?;
            for r in rows.iter().filter(|r| r.practical.is_none()) {
                eprintln!("warning: no divergence boundary bracketed for N = {}", r.samples);
            }
        }
    }
    sink.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, flags) = match &cli.command {
        Command::Reconstruct(f) => (Subcommand::Reconstruct, f),
        Command::Compare(f) => (Subcommand::Compare, f),
        Command::NoiseRun(f) => (Subcommand::NoiseRun, f),
        Command::SweepConvergence(f) => (Subcommand::SweepConvergence, f),
    };
    match execute(command, flags) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
