use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qubit_align::channels::{parse_channel, ChannelTemplate};
use qubit_align::qstate::BlochVector;
use qubit_align::sweep::{
    channel_info, pair_report, parse_state, run_suite, run_sweep, write_csv, PairFormat, ParamRange, Reference,
    StateFamily, Suite, SweepSpec,
};
use qubit_align::Error;

/// Purification overlap, entropic distance and misalignment angle for qubit states.
#[derive(Parser)]
#[command(name = "qubit-align", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Metrics, optimal rotation and SU(2) lift for one pair of Bloch vectors.
    Pair {
        /// First Bloch vector, `x,y,z`.
        #[arg(long, allow_hyphen_values = true)]
        r: String,
        /// Second Bloch vector, `x,y,z`.
        #[arg(long, allow_hyphen_values = true)]
        s: String,
        /// kv, json or csv.
        #[arg(long, default_value = "kv")]
        format: String,
    },
    /// Sweep a channel parameter over a family of input states and write a CSV table.
    Sweep {
        /// Channel spec, e.g. `bf`, `ad:g=0.5`, `not:da=0.1`; the swept parameter may be omitted.
        #[arg(long)]
        channel: String,
        /// `name:start:stop:count`.
        #[arg(long)]
        param: String,
        /// `phi=..,theta=..,r=..` in radians; repeatable. Overrides --preset.
        #[arg(long)]
        state: Vec<String>,
        /// radii or angles.
        #[arg(long, default_value = "radii")]
        preset: String,
        /// input or ideal-not.
        #[arg(long, default_value = "input")]
        reference: String,
        /// Output file; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Accepted for interface uniformity; sweeps are deterministic.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run a verification suite (or `all`) with a deterministic seed.
    Verify {
        #[arg(default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Describe a channel spec: M, c, unitality, z-axis fixed points, ball check.
    ChannelInfo { spec: String },
}

enum Failure {
    Usage(String),
    Invalid(String),
    Verification,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidInput(_) => Failure::Usage(e.to_string()),
            _ => Failure::Invalid(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(format!("i/o error: {e}"))
    }
}

fn parse_vector(s: &str) -> Result<BlochVector, Failure> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| Failure::Usage(format!("expected three comma-separated reals, got '{s}'")))?;
    match parts[..] {
        [x, y, z] => Ok(BlochVector::new(x, y, z)?),
        _ => Err(Failure::Usage(format!("expected three comma-separated reals, got '{s}'"))),
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let stdout = io::stdout();
    match cli.command {
        Command::Pair { r, s, format } => {
            let format: PairFormat = format.parse()?;
            let text = pair_report(&parse_vector(&r)?, &parse_vector(&s)?, format)?;
            write!(stdout.lock(), "{text}")?;
            if format == PairFormat::Json {
                writeln!(stdout.lock())?;
            }
        }
        Command::Sweep { channel, param, state, preset, reference, out, seed: _ } => {
            let family = if state.is_empty() {
                StateFamily::preset(&preset)?
            } else {
                StateFamily::Explicit(state.iter().map(|s| parse_state(s)).collect::<Result<_, _>>()?)
            };
            let spec = SweepSpec {
                channel: ChannelTemplate::parse(&channel)?,
                param: param.parse::<ParamRange>()?,
                family,
                reference: reference.parse::<Reference>()?,
            };
            let rows = run_sweep(&spec)?;
            match out {
                Some(path) => write_csv(&rows, BufWriter::new(File::create(path)?))?,
                None => write_csv(&rows, stdout.lock())?,
            }
        }
        Command::Verify { suite, samples, seed } => {
            let mut ok = true;
            for s in Suite::parse_list(&suite)? {
                let rep = run_suite(s, samples, seed)?;
                print!("{}", rep.summary());
                ok &= rep.passed();
            }
            if !ok {
                return Err(Failure::Verification);
            }
        }
        Command::ChannelInfo { spec } => {
            print!("{}", channel_info(&parse_channel(&spec)?));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Invalid(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Verification) => {
            eprintln!("verification failed");
            ExitCode::from(3)
        }
    }
}
