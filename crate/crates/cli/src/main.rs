mod input;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use bellbasis::ecc::{run_demo, ErrorDistribution};
use bellbasis::harness::{
    run_sample_stats, run_slice_scan, run_verify, scan_counts, write_scan_csv, AlphaMode, ExperimentConfig, ScanWindow,
};
use bellbasis::rng::substream;
use bellbasis::weyl::{gen_bell_basis, PhaseMatrixFile};
use bellbasis::{BellIndex, Dimension, PhaseMatrix, SamplingRegion};

use input::StateFile;

#[derive(Parser)]
#[command(name = "bellbasis", version, about = "Bell-diagonal qudit experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the algebraic invariants and print a JSON report.
    Verify {
        #[arg(long, value_delimiter = ',', default_value = "2,3,4,5")]
        dims: Vec<usize>,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Classification statistics over random Bell bases sharing one sample set.
    SampleStats(StatsArgs),
    /// Classify a grid over the two-parameter qutrit slice and write CSV.
    SliceScan(ScanArgs),
    /// Classify one state read from a JSON file.
    Classify {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Run the Bell-error identification and correction circuit.
    EccDemo(EccArgs),
}

#[derive(Args)]
struct StatsArgs {
    #[arg(long, default_value_t = 3)]
    dim: usize,
    #[arg(long, default_value_t = 10_000)]
    states: usize,
    #[arg(long, default_value_t = 200)]
    systems: usize,
    #[arg(long, default_value = "full")]
    alpha_mode: AlphaMode,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Where coefficient vectors are drawn: `enclosure` (all c ≤ 1/d) or `simplex`.
    #[arg(long, default_value = "enclosure", value_parser = parse_region)]
    region: SamplingRegion,
    /// Worker threads (0: all cores).
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// 1000 systems × 10⁴ states.
    #[arg(long)]
    paper_scale: bool,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ScanArgs {
    #[arg(long, default_value = "standard")]
    alpha_mode: AlphaMode,
    /// Phase matrix JSON `{"d": 3, "phases": [[...]]}`; overrides --alpha-mode.
    #[arg(long)]
    alpha_file: Option<PathBuf>,
    #[arg(long, default_value = "-1:3", allow_hyphen_values = true, value_parser = parse_range)]
    a_range: (f64, f64),
    #[arg(long, default_value = "-1:3", allow_hyphen_values = true, value_parser = parse_range)]
    b_range: (f64, f64),
    #[arg(long, default_value = "201x201", value_parser = parse_grid)]
    grid: (usize, usize),
    /// Seeds the random phase matrix (system 0 of this seed).
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EccArgs {
    #[arg(long)]
    dim: usize,
    /// Phase index of a single known error.
    #[arg(long, requires = "l", conflicts_with = "rounds")]
    k: Option<i64>,
    /// Shift index of a single known error.
    #[arg(long, requires = "k")]
    l: Option<i64>,
    /// Rounds with errors drawn uniformly from all d² Bell indices.
    #[arg(long, default_value_t = 1000)]
    rounds: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn parse_range(s: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = s.split_once(':').ok_or("expected LO:HI")?;
    let lo: f64 = lo.trim().parse().map_err(|e| format!("bad LO: {e}"))?;
    let hi: f64 = hi.trim().parse().map_err(|e| format!("bad HI: {e}"))?;
    Ok((lo, hi))
}

fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    let (nx, ny) = s.split_once(['x', 'X']).ok_or("expected NXxNY")?;
    let nx = nx.trim().parse().map_err(|e| format!("bad NX: {e}"))?;
    let ny = ny.trim().parse().map_err(|e| format!("bad NY: {e}"))?;
    Ok((nx, ny))
}

fn parse_region(s: &str) -> Result<SamplingRegion, String> {
    match s {
        "enclosure" => Ok(SamplingRegion::Enclosure),
        "simplex" => Ok(SamplingRegion::Simplex),
        _ => Err(format!("unknown region '{s}', expected enclosure or simplex")),
    }
}

#[derive(Debug)]
struct Failure {
    kind: &'static str,
    message: String,
}

impl From<bellbasis::Error> for Failure {
    fn from(e: bellbasis::Error) -> Self {
        Failure {
            kind: "invalid",
            message: e.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure {
            kind: "io",
            message: e.to_string(),
        }
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure {
            kind: "json",
            message: e.to_string(),
        }
    }
}

fn open_out(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn print_json<T: Serialize>(value: &T) -> Result<(), Failure> {
    let mut out = io::stdout().lock();
    serde_json::to_writer(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn verify(dims: &[usize], trials: usize, seed: u64) -> Result<(), Failure> {
    let dims = dims.iter().map(|&d| Dimension::new(d)).collect::<Result<Vec<_>, _>>()?;
    let report = run_verify(&dims, trials, seed);
    print_json(&report)?;
    if report.passed {
        Ok(())
    } else {
        let failed: Vec<String> = report
            .checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| format!("{} (d={})", c.name, c.d))
            .collect();
        Err(Failure {
            kind: "verification",
            message: format!("failed checks: {}", failed.join(", ")),
        })
    }
}

fn sample_stats(args: StatsArgs) -> Result<(), Failure> {
    let (states, systems) = if args.paper_scale {
        (10_000, 1000)
    } else {
        (args.states, args.systems)
    };
    let mut cfg = ExperimentConfig::new(Dimension::new(args.dim)?, states, systems, args.alpha_mode, args.seed);
    cfg.parallelism = args.threads;
    cfg.region = args.region;
    cfg.output_path = args.out.as_ref().map(|p| p.display().to_string());
    let report = run_sample_stats(&cfg)?;
    let mut out = open_out(args.out.as_deref())?;
    serde_json::to_writer_pretty(&mut out, &report)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

fn slice_scan(args: ScanArgs) -> Result<(), Failure> {
    let d = Dimension::new(3)?;
    let basis = match &args.alpha_file {
        Some(path) => {
            let file: PhaseMatrixFile = serde_json::from_reader(File::open(path)?)?;
            gen_bell_basis(&PhaseMatrix::from_file(&file)?)?
        }
        None => args.alpha_mode.basis(d, args.seed, 0)?,
    };
    let window = ScanWindow {
        a_range: args.a_range,
        b_range: args.b_range,
        nx: args.grid.0,
        ny: args.grid.1,
    };
    let cells = run_slice_scan(&basis, &window)?;
    let mut out = open_out(args.out.as_deref())?;
    write_scan_csv(&cells, &mut out)?;
    out.flush()?;
    if args.out.is_some() {
        print_json(&scan_counts(&cells))?;
    }
    Ok(())
}

fn classify(path: &Path) -> Result<(), Failure> {
    let state: StateFile = serde_json::from_reader(File::open(path)?)?;
    print_json(&state.classify()?)
}

fn ecc_demo(args: EccArgs) -> Result<(), Failure> {
    let d = Dimension::new(args.dim)?;
    let mut rng = substream(args.seed, "ecc", 0);
    let report = match (args.k, args.l) {
        (Some(k), Some(l)) => run_demo(&ErrorDistribution::point(d, BellIndex::new(d, k, l)), 1, &mut rng)?,
        _ => run_demo(&ErrorDistribution::uniform(d), args.rounds, &mut rng)?,
    };
    print_json(&report)
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Verify { dims, trials, seed } => verify(&dims, trials, seed),
        Command::SampleStats(args) => sample_stats(args),
        Command::SliceScan(args) => slice_scan(args),
        Command::Classify { input } => classify(&input),
        Command::EccDemo(args) => ecc_demo(args),
    }
}

fn fail(kind: &str, message: &str, code: u8) -> ExitCode {
    let body = serde_json::json!({ "error": { "kind": kind, "message": message.trim() } });
    eprintln!("{body}");
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail("usage", &e.to_string(), 2),
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => fail(f.kind, &f.message, 1),
    }
}
