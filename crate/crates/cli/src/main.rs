mod commands;
mod output;

use clap::{Parser, Subcommand};
use commands::{CliError, CliResult, Output};
use output::{companion_csv, csv_document, json_document, write_atomic, Meta};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const THREADS_ENV: &str = "SOLITONIC_THREADS";

/// Finite-truncation numerics for solitonic representations.
#[derive(Parser)]
#[command(name = "solitonic", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Clone)]
struct Common {
    /// JSON configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for randomized checks; overrides a "seed" key in the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; defaults to $SOLITONIC_THREADS, then to all cores.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Decay table of λ_{m,n}(γ) (JSON report plus CSV grid).
    LambdaDecay(Common),
    /// Hilbert-Schmidt norms of the antilinear part over growing cutoffs.
    HsSweep(Common),
    /// Gram determinants over a (c, h) grid (CSV).
    Kac(Common),
    /// Residual of the smeared Virasoro commutation relations.
    Commutator(Common),
    /// Energy-inequality check on random exact-block states.
    Qei(Common),
    /// Equivalence classes and properness of solitons (CSV).
    SolitonClassify(Common),
    /// Weyl relations and second-quantization covariance on a truncated Fock space.
    WeylCheck(Common),
}

fn threads(flag: Option<usize>) -> CliResult<Option<usize>> {
    if let Some(n) = flag {
        return Ok(Some(n));
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| CliError::Input(format!("{THREADS_ENV} must be a positive integer, got {v:?}"))),
        Err(_) => Ok(None),
    }
}

fn load_config(path: &Path) -> CliResult<(serde_json::Value, Option<u64>)> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Input(format!("{}: malformed JSON: {e}", path.display())))?;
    let mut body = value.clone();
    let seed = match body.as_object_mut() {
        Some(map) => match map.remove("seed") {
            None => None,
            Some(s) => Some(
                s.as_u64().ok_or_else(|| CliError::Input("config seed must be a non-negative integer".into()))?,
            ),
        },
        None => return Err(CliError::Input("config must be a JSON object".into())),
    };
    Ok((body, seed))
}

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(p) => write_atomic(p, text).map_err(|e| CliError::Input(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    let (name, common) = match &cli.command {
        Command::LambdaDecay(c) => ("lambda-decay", c),
        Command::HsSweep(c) => ("hs-sweep", c),
        Command::Kac(c) => ("kac", c),
        Command::Commutator(c) => ("commutator", c),
        Command::Qei(c) => ("qei", c),
        Command::SolitonClassify(c) => ("soliton-classify", c),
        Command::WeylCheck(c) => ("weyl-check", c),
    };
    if let Some(n) = threads(common.threads)? {
        if n == 0 {
            return Err(CliError::Input("thread count must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Numeric(format!("thread pool: {e}")))?;
    }
    let (body, config_seed) = load_config(&common.config)?;
    let seed = common.seed.or(config_seed).unwrap_or(0);
    let meta = Meta::new(name, &body, seed);
    let result = match &cli.command {
        Command::LambdaDecay(_) => commands::lambda_decay(commands::parse(&body)?),
        Command::HsSweep(_) => commands::hs_sweep(commands::parse(&body)?),
        Command::Kac(_) => commands::kac(commands::parse(&body)?),
        Command::Commutator(_) => commands::commutator(commands::parse(&body)?),
        Command::Qei(_) => commands::qei(commands::parse(&body)?, seed),
        Command::SolitonClassify(_) => commands::soliton_classify(commands::parse(&body)?),
        Command::WeylCheck(_) => commands::weyl(commands::parse(&body)?, seed),
    }?;
    let out = common.out.as_deref();
    match result {
        Output::Json(v) => emit(out, &json_document(&meta, &v)),
        Output::Csv(body) => emit(out, &csv_document(&meta, &body)),
        Output::JsonWithCsv(v, body) => {
            emit(out, &json_document(&meta, &v))?;
            match out {
                Some(p) => emit(Some(&companion_csv(p)), &csv_document(&meta, &body)),
                None => Ok(()),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("solitonic: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
