mod commands;
mod schema;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use serde_json::json;
use stabkit::error::Error;

use crate::commands::{run, run_partial, Command, Failure, Job, Method};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
enum Format {
    Json,
    Table,
}

/// Exact computations for homological stability: free E_k algebras, cdga
/// homology, Cotor, spectral sequences, Smith-Toda quotients, vanishing lines
/// and localizations on finite boxes of bidegrees.
#[derive(Parser, Debug)]
#[command(name = "stabkit", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// Presentation file (JSON).
    #[arg(long)]
    input: Option<PathBuf>,
    /// Degree box, e.g. `n=8` or `n=6,nmin=-6,dmin=-1,dmax=0,f=-9..0`.
    #[arg(long = "box")]
    bounds: Option<String>,
    #[arg(long, value_enum, default_value = "table")]
    output: Format,
    /// Last spectral sequence page to compute.
    #[arg(long)]
    page: Option<usize>,
    /// Comma-separated elements to kill, act by or trace.
    #[arg(long, value_delimiter = ',')]
    elements: Vec<String>,
    /// Comma-separated generators of the ideal to localize at.
    #[arg(long, value_delimiter = ',')]
    ideal: Vec<String>,
    /// Seed for the randomized quantization check of `bounds`.
    #[arg(long)]
    seed: Option<u64>,
    /// Largest chain group allowed before a resource error.
    #[arg(long, default_value_t = stabkit::chain::DEFAULT_MAX_SPOT_DIM)]
    max_dim: usize,
    /// Arity k of the free E_k algebra (`inf` for E_infinity).
    #[arg(long)]
    arity: Option<String>,
    /// Largest p-power exponent tried by the survival criterion.
    #[arg(long, default_value_t = 2)]
    max_power: u32,
    /// Largest k of the candidate slopes k/(k+1).
    #[arg(long, default_value_t = 10)]
    candidates: u64,
    #[arg(long, value_enum)]
    method: Option<Method>,
    /// Include the tau-module structure in `ss` output.
    #[arg(long)]
    tau: bool,
}

fn init_threads() {
    let Ok(v) = std::env::var("STABKIT_THREADS") else { return };
    match v.trim().parse::<usize>() {
        Ok(n) if n > 0 => {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
        _ => eprintln!("warning: ignoring STABKIT_THREADS={v}"),
    }
}

fn emit(format: Format, out: &commands::Output) {
    let mut stdout = std::io::stdout().lock();
    let _ = match format {
        Format::Json => writeln!(stdout, "{}", serde_json::to_string_pretty(&out.json).expect("plain data")),
        Format::Table => write!(stdout, "{}", out.text),
    };
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    init_threads();
    let job = Job {
        command: cli.command,
        input: cli.input,
        bounds: cli.bounds,
        page: cli.page,
        elements: cli.elements,
        ideal: cli.ideal,
        seed: cli.seed,
        max_dim: cli.max_dim,
        arity: cli.arity,
        max_power: cli.max_power,
        candidates: cli.candidates,
        method: cli.method,
        tau: cli.tau,
    };
    match run(&job) {
        Ok(out) => {
            emit(cli.output, &out);
            ExitCode::SUCCESS
        }
        Err(Failure::Input(diags)) => {
            if cli.output == Format::Json {
                emit(cli.output, &commands::Output { json: json!({"status": "invalid", "diagnostics": diags}), text: String::new() });
            }
            for d in &diags {
                eprintln!("error: {}: {}", if d.path.is_empty() { "/" } else { &d.path }, d.message);
            }
            ExitCode::from(1)
        }
        Err(Failure::Compute(Error::Resource { message, completed })) => {
            eprintln!("resource limit: {message}");
            if let Some(partial) = completed.and_then(|b| run_partial(&job, b).map(|o| (b, o))) {
                let (b, mut out) = partial;
                eprintln!("partial result on the completed sub-box {b}");
                out.json["partial"] = json!({"completed": b, "reason": message});
                out.text.insert_str(0, &format!("partial result on {b}\n"));
                emit(cli.output, &out);
            }
            ExitCode::from(2)
        }
        Err(Failure::Compute(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
