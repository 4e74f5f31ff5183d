use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use equidist_core::lab::{run_experiment, write_csv, ExperimentConfig};

/// Compare Galois-orbit measures of torsion points with Haar measure and
/// write the comparison as CSV.
#[derive(Parser, Debug)]
#[command(name = "equidist", version)]
struct Args {
    /// `key = value` file; flags given here override it
    #[arg(long)]
    config: Option<PathBuf>,
    /// Characteristic
    #[arg(long)]
    p: Option<String>,
    /// Extension degree; only 1 is accepted here
    #[arg(long)]
    e: Option<String>,
    #[arg(long)]
    rank: Option<String>,
    /// Exceptional primes and level, e.g. "P=t,t+1;m=2"
    #[arg(long)]
    model: Option<String>,
    /// minimal | full
    #[arg(long)]
    mode: Option<String>,
    /// tpowers:<max> | irred:<max> | list:<p1;p2;..> | random:<count>:<maxdeg>:<seed>
    #[arg(long)]
    orders: Option<String>,
    /// sum<=<N>
    #[arg(long)]
    balls: Option<String>,
    /// Base numerators, e.g. "(1,0)"
    #[arg(long)]
    base: Option<String>,
    #[arg(long)]
    precision: Option<String>,
    /// Output file; stdout when absent
    #[arg(long)]
    out: Option<String>,
    #[arg(long)]
    workers: Option<String>,
}

fn build_config(args: &Args) -> Result<ExperimentConfig, String> {
    let mut cfg = ExperimentConfig::default();
    if let Some(path) = &args.config {
        cfg.apply_file(path)
            .map_err(|e| format!("{}: {e}", path.display()))?;
    }
    let flags = [
        ("p", &args.p),
        ("e", &args.e),
        ("rank", &args.rank),
        ("model", &args.model),
        ("mode", &args.mode),
        ("orders", &args.orders),
        ("balls", &args.balls),
        ("base", &args.base),
        ("precision", &args.precision),
        ("out", &args.out),
        ("workers", &args.workers),
    ];
    for (key, value) in flags {
        if let Some(v) = value {
            cfg.set(key, v).map_err(|e| format!("--{key}: {e}"))?;
        }
    }
    if cfg.e != 1 {
        return Err(format!(
            "--e: only prime fields are supported here, got e = {}",
            cfg.e
        ));
    }
    Ok(cfg)
}

fn run(args: &Args) -> Result<(), String> {
    let cfg = build_config(args)?;
    let rows = run_experiment(&cfg).map_err(|e| e.to_string())?;
    let sink: Box<dyn Write> = match &cfg.out {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).map_err(|e| format!("{}: {e}", path.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    write_csv(&cfg, &rows, sink).map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(msg) => {
            eprintln!("equidist: {msg}");
            ExitCode::FAILURE
        }
    }
}
