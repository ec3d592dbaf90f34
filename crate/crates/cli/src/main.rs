use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use brokenstick::runner::{
    run, Command, Format, Params, Report, RunConfig, DEFAULT_SAMPLES, DEFAULT_SEED, QUANTITIES, SEED_ENV,
};
use brokenstick::square::{write_dump, Model};
use brokenstick::{Error, Seed};
use clap::{Args, Parser, Subcommand, ValueEnum};

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(
    name = "brokenstick",
    version,
    about = "Broken-stick probabilities: exact values, estimates, and checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate a closed form, bound, or quadrature.
    Exact {
        quantity: String,
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Monte Carlo estimate, gated against a reference when one exists.
    Estimate {
        quantity: String,
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        output: OutputArgs,
        /// Also write the first samples' geometry (center-lines and chords only).
        #[arg(long, value_name = "PATH")]
        dump: Option<PathBuf>,
        /// Samples to include in the geometry dump.
        #[arg(long, default_value_t = 10)]
        dump_count: u64,
    },
    /// Run the full acceptance matrix.
    Verify {
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Build pieces with exactly m k-gons among n pieces.
    Witness {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// List the quantity registry.
    Quantities,
}

#[derive(Args)]
struct ParamArgs {
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<u64>,
    #[arg(long)]
    a0: Option<f64>,
    /// Comma-separated side lengths.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    sides: Option<Vec<f64>>,
}

impl From<ParamArgs> for Params {
    fn from(p: ParamArgs) -> Self {
        Params {
            k: p.k,
            n: p.n,
            m: p.m,
            a0: p.a0,
            sides: p.sides,
        }
    }
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    samples: u64,
    #[arg(long, env = SEED_ENV, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Worker threads, 0 for one per core. Results do not depend on it.
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
    /// Output file; standard output when omitted.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

fn apply_output(config: &mut RunConfig, o: OutputArgs) {
    config.format = match o.format {
        FormatArg::Json => Format::Json,
        FormatArg::Csv => Format::Csv,
    };
    config.out = o.out;
}

fn apply_run(config: &mut RunConfig, r: RunArgs) {
    config.samples = r.samples;
    config.seed = Seed(r.seed);
    config.workers = r.workers;
}

fn write_report(report: &Report, config: &RunConfig) -> io::Result<()> {
    let mut sink: Box<dyn Write> = match &config.out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    match config.format {
        Format::Json => sink.write_all(report.to_json().as_bytes())?,
        Format::Csv => report.write_csv(&mut sink)?,
    }
    sink.flush()
}

fn is_usage(e: &Error) -> bool {
    matches!(
        e,
        Error::InvalidParameter { .. } | Error::UnknownQuantity(_) | Error::Infeasible { .. }
    )
}

fn print_quantities() {
    println!(
        "{:<20} {:<10} {:<6} {:<9} description",
        "quantity", "params", "exact", "estimate"
    );
    for q in QUANTITIES {
        let yes = |b: bool| if b { "yes" } else { "-" };
        println!(
            "{:<20} {:<10} {:<6} {:<9} {}",
            q.id,
            q.params,
            yes(q.exact),
            yes(q.estimate),
            q.summary
        );
    }
}

fn dump_geometry(path: &PathBuf, quantity: &str, config: &RunConfig, count: u64) -> Result<(), String> {
    let model = match quantity {
        "center-lines" => Model::CenterLine,
        "chords" => Model::Chord,
        other => return Err(format!("--dump applies to center-lines and chords, not {other}")),
    };
    let n = config.params.n.ok_or("--dump needs --n")?;
    let file = File::create(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let mut w = BufWriter::new(file);
    write_dump(&mut w, model, n, config.seed, count.min(config.samples))
        .and_then(|_| w.flush())
        .map_err(|e| format!("{}: {e}", path.display()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut dump = None;
    let config = match cli.command {
        Cmd::Quantities => {
            print_quantities();
            return ExitCode::SUCCESS;
        }
        Cmd::Exact {
            quantity,
            params,
            output,
        } => {
            let mut c = RunConfig::new(Command::Exact);
            c.quantity = Some(quantity);
            c.params = params.into();
            apply_output(&mut c, output);
            c
        }
        Cmd::Estimate {
            quantity,
            params,
            run,
            output,
            dump: dump_path,
            dump_count,
        } => {
            let mut c = RunConfig::new(Command::Estimate);
            c.quantity = Some(quantity);
            c.params = params.into();
            apply_run(&mut c, run);
            apply_output(&mut c, output);
            dump = dump_path.map(|p| (p, dump_count));
            c
        }
        Cmd::Verify { run, output } => {
            let mut c = RunConfig::new(Command::Verify);
            apply_run(&mut c, run);
            apply_output(&mut c, output);
            c
        }
        Cmd::Witness { params, output } => {
            let mut c = RunConfig::new(Command::Witness);
            c.params = params.into();
            apply_output(&mut c, output);
            c
        }
    };

    let report = match run(&config) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(if is_usage(&e) { EXIT_USAGE } else { EXIT_FAIL });
        }
    };
    if let Some((path, count)) = dump {
        let quantity = config.quantity.as_deref().unwrap_or_default();
        if let Err(e) = dump_geometry(&path, quantity, &config, count) {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    if let Err(e) = write_report(&report, &config) {
        eprintln!("error: writing report: {e}");
        return ExitCode::from(EXIT_FAIL);
    }
    let failures: Vec<_> = report.failures().collect();
    for f in &failures {
        eprintln!(
            "FAIL {} [{}] value {} reference {}",
            f.quantity,
            f.params,
            f.value,
            f.reference.map_or("-".to_string(), |r| r.to_string())
        );
    }
    if failures.is_empty() {
        ExitCode::SUCCESS
    } else {
        eprintln!("{} of {} rows failed", failures.len(), report.records.len());
        ExitCode::from(EXIT_FAIL)
    }
}
