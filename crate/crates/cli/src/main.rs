//! `ideal-angles`: staged pipelines over prime ideals, their angles, and the
//! function-field counts. Every stage writes CSV plus a manifest.

mod commands;
mod io;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

#[derive(Parser)]
#[command(name = "ideal-angles", version, about = "Generalized angles of prime ideals")]
struct Cli {
    /// Worker threads; outputs do not depend on it.
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,

    #[command(subcommand)]
    command: Command,
}

/// Counts such as `1e6` or `1000000`.
pub fn parse_count(s: &str) -> Result<u64, String> {
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    let f: f64 = s.parse().map_err(|_| format!("{s:?} is not a number"))?;
    if f < 0.0 || f.fract() != 0.0 || f > 1e18 {
        return Err(format!("{s:?} is not a non-negative integer"));
    }
    Ok(f as u64)
}

fn parse_i64_list(s: &str) -> Result<Vec<i64>, String> {
    s.split(',')
        .map(|t| t.trim().parse::<i64>().map_err(|e| format!("{t:?}: {e}")))
        .collect()
}

#[derive(Args, Serialize, Clone)]
pub struct FieldArgs {
    /// Field JSON file, or a bundled name: cubic23, gaussian, sqrt2.
    #[arg(long)]
    pub field: String,
}

#[derive(Args, Serialize, Clone)]
pub struct StreamArgs {
    /// Angles CSV from the `angles` stage.
    #[arg(long)]
    pub angles: Option<String>,
    /// Field used when angles are computed in place.
    #[arg(long)]
    pub field: Option<String>,
    #[arg(long, value_parser = parse_count)]
    pub max_norm: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Prime ideals of norm at most X.
    Primes(PrimesArgs),
    /// Canonical generators of prime ideals.
    Generators(GeneratorsArgs),
    /// Torus coordinates of prime ideals.
    Angles(AnglesArgs),
    /// Weyl sums of a character at checkpoints.
    Weyl(WeylArgs),
    /// Box counts against Haar measure.
    Boxes(BoxesArgs),
    /// Count in a multiplicative window (x, (1+δ)x].
    Window(WindowArgs),
    /// Ratio-set witness pairs.
    Ratioset(RatiosetArgs),
    /// Sample the product measure and check the T-map of a witness.
    CocycleSim(CocycleArgs),
    /// Irreducible counts by residue class over F_q.
    Ffcount(FfcountArgs),
    /// Check the torus constants of x^3 - x - 1 against closed forms.
    VerifyGolden(GoldenArgs),
}

#[derive(Args, Serialize)]
pub struct PrimesArgs {
    #[command(flatten)]
    pub field: FieldArgs,
    #[arg(long, value_parser = parse_count)]
    pub max_norm: u64,
    #[arg(long, default_value = "-")]
    pub out: String,
}

#[derive(Args, Serialize)]
pub struct GeneratorsArgs {
    #[command(flatten)]
    pub field: FieldArgs,
    /// Primes CSV; otherwise enumerate up to --max-norm.
    #[arg(long)]
    pub primes: Option<String>,
    #[arg(long, value_parser = parse_count)]
    pub max_norm: Option<u64>,
    #[arg(long, default_value = "-")]
    pub out: String,
}

#[derive(Args, Serialize)]
pub struct AnglesArgs {
    #[command(flatten)]
    pub field: FieldArgs,
    /// Generators CSV; otherwise enumerate up to --max-norm.
    #[arg(long)]
    pub generators: Option<String>,
    #[arg(long, value_parser = parse_count)]
    pub max_norm: Option<u64>,
    #[arg(long, default_value = "-")]
    pub out: String,
}

#[derive(Args, Serialize)]
pub struct WeylArgs {
    #[command(flatten)]
    pub stream: StreamArgs,
    /// Character index, repeatable: --k 1,0 --k 0,1.
    #[arg(long, value_parser = parse_i64_list, required = true)]
    pub k: Vec<Vec<i64>>,
    #[arg(long, value_parser = parse_count, value_delimiter = ',')]
    pub checkpoints: Option<Vec<u64>>,
    #[arg(long, default_value = "-")]
    pub out: String,
}

#[derive(Args, Serialize)]
pub struct BoxesArgs {
    #[command(flatten)]
    pub stream: StreamArgs,
    /// Uniform grid with this many cells per axis.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Box `lo1,lo2:hi1,hi2`, repeatable.
    #[arg(long = "box")]
    pub boxes: Vec<String>,
    #[arg(long, value_parser = parse_count, value_delimiter = ',')]
    pub checkpoints: Option<Vec<u64>>,
    #[arg(long, default_value = "-")]
    pub out: String,
}

#[derive(Args, Serialize)]
pub struct WindowArgs {
    #[command(flatten)]
    pub stream: StreamArgs,
    #[arg(long = "box")]
    pub bx: Option<String>,
    #[arg(long)]
    pub delta: f64,
    #[arg(long, value_parser = parse_count)]
    pub x: u64,
    #[arg(long, default_value = "-")]
    pub out: String,
}

#[derive(Args, Serialize)]
pub struct RatiosetArgs {
    #[command(flatten)]
    pub stream: StreamArgs,
    #[arg(long)]
    pub x0: f64,
    #[arg(long, value_delimiter = ',', required = true)]
    pub y0: Vec<f64>,
    #[arg(long)]
    pub eps: f64,
    #[arg(long)]
    pub delta: f64,
    #[arg(long = "box")]
    pub bx: String,
    #[arg(long, default_value = "-")]
    pub out: String,
}

#[derive(Args, Serialize)]
pub struct CocycleArgs {
    /// Accepted for symmetry with the other stages; the pairs CSV is
    /// self-contained.
    #[arg(long)]
    pub field: Option<String>,
    #[arg(long)]
    pub pairs: String,
    #[arg(long, value_delimiter = ',', required = true)]
    pub y0: Vec<f64>,
    #[arg(long = "box")]
    pub bx: String,
    #[arg(long, value_parser = parse_count, default_value = "100000")]
    pub samples: u64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = ideal_angles::cocycle::DEFAULT_LEVEL)]
    pub level: u32,
    #[arg(long, default_value = "-")]
    pub out: String,
}

#[derive(Args, Serialize)]
pub struct FfcountArgs {
    #[arg(long)]
    pub q: usize,
    /// Modulus coefficients, constant term first.
    #[arg(long, default_value = "1")]
    pub modulus: String,
    #[arg(long)]
    pub max_deg: u32,
    /// Degree of a constant field extension; switches to Frobenius cells.
    #[arg(long)]
    pub m_const: Option<u32>,
    #[arg(long, default_value = "-")]
    pub out: String,
}

#[derive(Args, Serialize)]
pub struct GoldenArgs {
    #[command(flatten)]
    pub field: FieldArgs,
    /// Optional CSV of the compared vectors.
    #[arg(long)]
    pub out: Option<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.workers > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.workers)
            .build_global()
        {
            eprintln!("cannot configure worker pool: {e}");
            return ExitCode::from(2);
        }
    }
    let (name, result) = match &cli.command {
        Command::Primes(a) => ("primes", commands::primes(a)),
        Command::Generators(a) => ("generators", commands::generators(a)),
        Command::Angles(a) => ("angles", commands::angles(a)),
        Command::Weyl(a) => ("weyl", commands::weyl(a)),
        Command::Boxes(a) => ("boxes", commands::boxes(a)),
        Command::Window(a) => ("window", commands::window(a)),
        Command::Ratioset(a) => ("ratioset", commands::ratioset(a)),
        Command::CocycleSim(a) => ("cocycle-sim", commands::cocycle_sim(a)),
        Command::Ffcount(a) => ("ffcount", commands::ffcount(a)),
        Command::VerifyGolden(a) => ("verify-golden", commands::verify_golden(a)),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let report = json!({
                "code": e.code(),
                "message": e.to_string(),
                "context": { "subcommand": name },
            });
            eprintln!("{report}");
            ExitCode::from(1)
        }
    }
}
