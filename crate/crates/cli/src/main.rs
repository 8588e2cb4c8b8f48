mod config;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use polarfc::bounds::{dt_bound, mc_bound, ml_bound_sim};
use polarfc::fc::{dump_table, global_q};
use polarfc::map_oracle::toy_compare;
use polarfc::sim::{emit_results, parse_grid, parse_p_grid, results_csv, run_point};
use polarfc::{de_run, CodeSpec, ConstraintCache, CrcKind, DeDecoder, ReliabilityProfile};

use config::{SimArgs, DEFAULT_K, DEFAULT_N};

#[derive(Parser)]
#[command(
    name = "polarfc",
    version,
    about = "FC-aided SC decoding of polar codes over the BEC"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte-Carlo block error rate of one decoder over a grid of erasure
    /// probabilities
    Simulate(SimArgs),
    /// Density-evolution prediction of the block error rate
    De(DeArgs),
    /// DT achievability and meta-converse bounds
    Bounds(BoundsArgs),
    /// Simulated ML lower estimate from SC failures
    Mlbound(SimArgs),
    /// SC, bitwise-MAP-SC and blockwise MAP on the (8,3) toy code over AWGN
    ToyCompare(ToyArgs),
    /// Print the sets, hash and minimum row weights of a code
    BuildCode(CodeArgs),
    /// Print the future constraints of one position and their FCCNs
    DumpFc(DumpFcArgs),
    /// Print code matrices as 0/1 text
    DumpMatrices(DumpMatricesArgs),
}

#[derive(Args, Clone)]
struct CodeArgs {
    #[arg(long, default_value_t = DEFAULT_N)]
    n: u32,
    #[arg(long, default_value_t = DEFAULT_K)]
    k: usize,
    #[arg(long, default_value = "nr11")]
    crc: String,
    /// Use the (8,3) toy code instead of an NR construction
    #[arg(long)]
    example1: bool,
}

impl CodeArgs {
    fn build(&self) -> Result<CodeSpec> {
        if self.example1 {
            return Ok(CodeSpec::example1());
        }
        let outer = CrcKind::parse(&self.crc)?.outer_code();
        Ok(CodeSpec::nr(
            self.n,
            self.k,
            &ReliabilityProfile::nr(),
            outer,
        )?)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum DeKind {
    Sc,
    Scc,
    Bpscc1,
}

#[derive(Args)]
struct DeArgs {
    #[command(flatten)]
    code: CodeArgs,
    #[arg(long, value_enum, default_value = "bpscc1")]
    decoder: DeKind,
    #[arg(long, default_value = "0.3:0.6:0.05")]
    p_grid: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long, default_value_t = DEFAULT_N)]
    n: u32,
    #[arg(long, default_value_t = DEFAULT_K)]
    k: usize,
    #[arg(long, default_value = "0.3:0.6:0.05")]
    p_grid: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ToyArgs {
    /// Es/N0 values in dB as start:stop:step
    #[arg(long, default_value = "-2:4:2")]
    esn0_grid: String,
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DumpFcArgs {
    #[command(flatten)]
    code: CodeArgs,
    /// Decoding position
    #[arg(long)]
    i: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MatrixKind {
    T,
    H,
    G,
    Tg,
    Q,
    All,
}

#[derive(Args)]
struct DumpMatricesArgs {
    #[command(flatten)]
    code: CodeArgs,
    #[arg(long, value_enum, default_value = "all")]
    dump: MatrixKind,
}

fn write_output(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn simulate(args: &SimArgs) -> Result<()> {
    let config = args.resolve()?;
    let spec = config.build_code()?;
    let cache = ConstraintCache::new(&spec);
    let mut summaries = Vec::new();
    for &p in &config.p_grid {
        let s = run_point(&spec, &cache, &config, p)?;
        eprintln!(
            "{} p={p}: bler {:.3e} ± {:.1e} ({} / {} trials), visits {:.1}",
            config.decoder.name(),
            s.bler,
            s.stderr,
            s.errors,
            s.trials,
            s.avg_visits
        );
        summaries.push(s);
    }
    match &config.out {
        Some(path) => emit_results(&summaries, &config, &spec, path)?,
        None => print!("{}", results_csv(&summaries)?),
    }
    Ok(())
}

fn density_evolution(args: &DeArgs) -> Result<()> {
    let spec = args.code.build()?;
    let cache = ConstraintCache::new(&spec);
    let decoder = match args.decoder {
        DeKind::Sc => DeDecoder::Sc,
        DeKind::Scc => DeDecoder::Scc,
        DeKind::Bpscc1 => DeDecoder::BpScc1,
    };
    let mut text = String::from("p,bler");
    for i in spec.info_set() {
        write!(text, ",pb_{i}")?;
    }
    text.push('\n');
    for p in parse_p_grid(&args.p_grid)? {
        let res = de_run(&spec, &cache, decoder, p)?;
        write!(text, "{p},{}", res.bler)?;
        for (_, pb) in &res.per_bit {
            write!(text, ",{pb}")?;
        }
        text.push('\n');
    }
    write_output(args.out.as_deref(), &text)
}

fn bounds(args: &BoundsArgs) -> Result<()> {
    let n = 1usize << args.n;
    if args.k > n {
        bail!("K = {} exceeds N = {n}", args.k);
    }
    let mut text = String::from("p,dt,mc\n");
    for p in parse_p_grid(&args.p_grid)? {
        writeln!(
            text,
            "{p},{},{}",
            dt_bound(n, args.k, p)?,
            mc_bound(n, args.k, p)?
        )?;
    }
    write_output(args.out.as_deref(), &text)
}

fn ml_bound(args: &SimArgs) -> Result<()> {
    let config = args.resolve()?;
    let spec = config.build_code()?;
    let mut text = String::from("p,ml,stderr,trials,events\n");
    for &p in &config.p_grid {
        let est = ml_bound_sim(&spec, p, config.trials, config.seed)?;
        writeln!(
            text,
            "{p},{},{},{},{}",
            est.ratio, est.stderr, est.trials, est.events
        )?;
    }
    write_output(config.out.as_deref(), &text)
}

fn toy(args: &ToyArgs) -> Result<()> {
    let grid = parse_grid(&args.esn0_grid)?;
    let points = toy_compare(&CodeSpec::example1(), &grid, args.trials, args.seed)?;
    let mut text = String::from(
        "esn0_db,sc,bitwise_map_sc,blockwise_map,trials,block_lost_vs_sc,block_won_vs_sc\n",
    );
    for pt in &points {
        writeln!(
            text,
            "{},{},{},{},{},{},{}",
            pt.esn0_db,
            pt.bler(pt.sc_errors),
            pt.bler(pt.bitwise_errors),
            pt.bler(pt.blockwise_errors),
            pt.trials,
            pt.block_lost_vs_sc,
            pt.block_won_vs_sc
        )?;
    }
    write_output(args.out.as_deref(), &text)
}

fn fmt_set(set: &[usize]) -> String {
    let items: Vec<String> = set.iter().map(usize::to_string).collect();
    format!("{{{}}}", items.join(","))
}

fn build_code(args: &CodeArgs) -> Result<()> {
    let spec = args.build()?;
    let tg = spec.precoder().mat_mul(&spec.generator())?;
    let mut rows: Vec<usize> = spec
        .info_set()
        .iter()
        .chain(spec.parity_set())
        .copied()
        .collect();
    rows.sort_unstable();
    let g_prime = spec.generator().select_rows(&rows)?;
    println!("N = {}, K = {}", spec.len(), spec.dimension());
    println!("info   {}", fmt_set(spec.info_set()));
    println!("parity {}", fmt_set(spec.parity_set()));
    println!("frozen {}", fmt_set(spec.frozen_set()));
    println!("w_min(G') = {}", g_prime.min_nonzero_row_weight());
    println!("w_min(TG) = {}", tg.min_nonzero_row_weight());
    println!("hash {}", spec.hash());
    Ok(())
}

fn dump_matrices(args: &DumpMatricesArgs) -> Result<()> {
    let spec = args.code.build()?;
    let wanted = |kind| args.dump == MatrixKind::All || args.dump == kind;
    let mut sections = Vec::new();
    if wanted(MatrixKind::T) {
        sections.push(("T", spec.precoder().clone()));
    }
    if wanted(MatrixKind::H) {
        sections.push(("H", spec.parity_check().clone()));
    }
    if wanted(MatrixKind::G) {
        sections.push(("G", spec.generator()));
    }
    if wanted(MatrixKind::Tg) {
        sections.push(("TG", spec.precoder().mat_mul(&spec.generator())?));
    }
    if wanted(MatrixKind::Q) {
        sections.push(("Q", global_q(&spec)));
    }
    for (name, m) in sections {
        println!("# {name}");
        print!("{}", m.to_text());
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate(args) => simulate(&args),
        Command::De(args) => density_evolution(&args),
        Command::Bounds(args) => bounds(&args),
        Command::Mlbound(args) => ml_bound(&args),
        Command::ToyCompare(args) => toy(&args),
        Command::BuildCode(args) => build_code(&args),
        Command::DumpFc(args) => {
            print!("{}", dump_table(&args.code.build()?, args.i)?);
            Ok(())
        }
        Command::DumpMatrices(args) => dump_matrices(&args),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
