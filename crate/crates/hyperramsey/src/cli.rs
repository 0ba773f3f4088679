//! Command line front end.
//!
//! Exit codes: 0 success, 2 usage or precondition error, 3 extraction or search failure
//! (a report is still written), 4 verification failure.

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hyperramsey_core::almost_mono::{almost_mono_subset, AlmostMonoError, AlmostMonoOptions};
use hyperramsey_core::engine::{extract_multipartite, EngineError, EngineErrorKind, ExtractionRequest, Mode};
use hyperramsey_core::experiment::discrepancy;
use hyperramsey_core::gen::GeneratorSpec;
use hyperramsey_core::math::scheduled_part_size;
use hyperramsey_core::model::{ColorId, TripleColoring};
use hyperramsey_core::oracle::{
    brute_max_almost_mono, brute_max_almost_mono_gray, r2_exact_small, r2_upper_bound, Clock, OracleBudget,
    OracleError, R2Table,
};
use serde_json::{json, Value};

use crate::format::{parse_r2_table, r2_table_to_string, write_coloring, FormatError, Layout};
use crate::report::{check_witness, peak_memory_bytes, to_json, ColoringSource, Outcome, RunReport, Witness};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_FAILED: i32 = 3;
pub const EXIT_INVALID: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "hyperramsey", version, about = "Find monochromatic structure in colorings of triples")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a generated coloring to a tc3 file.
    Gen(GenArgs),
    /// Extract a monochromatic complete d-partite triple system K_d(n).
    Extract(ExtractArgs),
    /// Find a subset where one color covers at least a (1 - epsilon) fraction of the triples.
    AlmostMono(AlmostMonoArgs),
    /// Re-check a witness (or the witness inside a report) against a coloring.
    Verify(VerifyArgs),
    /// Exhaustive ground truth for small instances.
    #[command(subcommand)]
    Oracle(OracleCommand),
    /// Statistical experiments on random colorings.
    #[command(subcommand)]
    Experiment(ExperimentCommand),
}

#[derive(Subcommand, Debug)]
enum OracleCommand {
    /// Largest almost-monochromatic subset by enumerating every subset.
    MaxAlmostMono(OracleMaxArgs),
    /// Exact graph Ramsey number r_2(k; l) by enumerating every coloring.
    R2(OracleR2Args),
}

#[derive(Subcommand, Debug)]
enum ExperimentCommand {
    /// Color-fraction deviation from 1/l over random k-subsets of a uniform coloring.
    Discrepancy(DiscrepancyArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum GenName {
    Uniform,
    Constant,
    Blockmix,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Strict,
    Adaptive,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Strict => Mode::Strict,
            ModeArg::Adaptive => Mode::Adaptive,
        }
    }
}

#[derive(Args, Debug)]
struct GeneratorArgs {
    /// Generator name.
    #[arg(long = "gen", value_enum)]
    gen: Option<GenName>,
    #[arg(long)]
    n_vertices: Option<u32>,
    #[arg(long)]
    colors: Option<u32>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Color of every triple (constant generator).
    #[arg(long)]
    color: Option<u8>,
    /// Number of blocks m (blockmix generator).
    #[arg(long)]
    blocks: Option<u32>,
}

#[derive(Args, Debug)]
struct InputArgs {
    /// Read the coloring from a tc3 file.
    #[arg(long = "in", value_name = "FILE", conflicts_with = "gen")]
    input: Option<PathBuf>,
    #[command(flatten)]
    generator: GeneratorArgs,
}

#[derive(Args, Debug)]
struct OutputArgs {
    /// Write the JSON report here instead of stdout.
    #[arg(long, value_name = "FILE")]
    report: Option<PathBuf>,
    /// Also write the witness as a standalone file.
    #[arg(long, value_name = "FILE")]
    witness: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct GenArgs {
    #[command(flatten)]
    generator: GeneratorArgs,
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
    /// Store one digit per triple instead of the generator spec.
    #[arg(long)]
    explicit: bool,
}

#[derive(Args, Debug)]
struct ExtractArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Number of parts.
    #[arg(long)]
    d: usize,
    /// Part size n (strict default: floor(l^-r sqrt(log2 N)); adaptive default: 1).
    #[arg(long)]
    part_size: Option<usize>,
    #[arg(long, value_enum, default_value_t = ModeArg::Adaptive)]
    mode: ModeArg,
    /// Strict: number of rounds r (default: upper bound on r_2(d-1; l)). Adaptive: round cap.
    #[arg(long)]
    rounds: Option<usize>,
    /// Adaptive: size of each new part before refinement.
    #[arg(long)]
    initial_part_size: Option<usize>,
    #[arg(long)]
    reservoir_cap: Option<usize>,
    #[arg(long, default_value_t = 0)]
    search_seed: u64,
    /// Re-check the round invariant by enumeration after every round.
    #[arg(long)]
    check_invariants: bool,
    /// r2 table file with exact Ramsey values (default: computed on the fly).
    #[arg(long, value_name = "FILE")]
    r2_table: Option<PathBuf>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct AlmostMonoArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    epsilon: f64,
    #[arg(long, value_enum, default_value_t = ModeArg::Adaptive)]
    mode: ModeArg,
    /// Adaptive: largest part size tried.
    #[arg(long, default_value_t = hyperramsey_core::almost_mono::DEFAULT_MAX_PART_SIZE)]
    max_part_size: usize,
    #[arg(long, default_value_t = 0)]
    search_seed: u64,
    #[arg(long)]
    check_invariants: bool,
    #[arg(long, value_name = "FILE")]
    r2_table: Option<PathBuf>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Coloring to check against (default: the one named in the witness).
    #[arg(long = "in", value_name = "FILE")]
    input: Option<PathBuf>,
    /// Witness file or run report.
    #[arg(long, value_name = "FILE")]
    witness: PathBuf,
}

#[derive(Args, Debug)]
struct BudgetArgs {
    #[arg(long, default_value_t = OracleBudget::default().max_subsets)]
    max_subsets: u64,
    /// Seconds.
    #[arg(long)]
    time_limit: Option<f64>,
}

impl BudgetArgs {
    fn budget(&self) -> OracleBudget {
        OracleBudget { max_subsets: self.max_subsets, time_limit_secs: self.time_limit }
    }
}

#[derive(Args, Debug)]
struct OracleMaxArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, default_value_t = 0.0)]
    epsilon: f64,
    #[command(flatten)]
    budget: BudgetArgs,
    /// Repeat the search with the independent Gray-code enumeration and compare.
    #[arg(long)]
    cross_check: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct OracleR2Args {
    #[arg(long)]
    k: u32,
    #[arg(long)]
    colors: u32,
    #[command(flatten)]
    budget: BudgetArgs,
    /// Append the established value to this r2 table file.
    #[arg(long, value_name = "FILE")]
    table_out: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    report: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct DiscrepancyArgs {
    #[arg(long)]
    n_vertices: u32,
    #[arg(long)]
    colors: u32,
    #[arg(long)]
    subset_size: usize,
    #[arg(long)]
    samples: u64,
    #[arg(long)]
    seed: u64,
    #[arg(long, value_name = "FILE")]
    report: Option<PathBuf>,
}

/// A run that stops with an exit code and a message for stderr.
#[derive(Debug)]
pub struct Exit {
    pub code: i32,
    pub message: String,
}

fn usage(message: impl Into<String>) -> Exit {
    Exit { code: EXIT_USAGE, message: message.into() }
}

impl From<FormatError> for Exit {
    fn from(e: FormatError) -> Self {
        usage(e.to_string())
    }
}

struct WallClock(Instant);

impl Clock for WallClock {
    fn elapsed_secs(&self) -> f64 {
        self.0.elapsed().as_secs_f64()
    }
}

/// Parses `argv` (program name first), runs the command and returns the exit code.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let command: Vec<String> = argv.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    match dispatch(cli.command, command) {
        Ok(()) => EXIT_OK,
        Err(exit) => {
            if !exit.message.is_empty() {
                eprintln!("error: {}", exit.message);
            }
            exit.code
        }
    }
}

fn dispatch(command: Command, argv: Vec<String>) -> Result<(), Exit> {
    match command {
        Command::Gen(args) => gen(args),
        Command::Extract(args) => extract(args, argv),
        Command::AlmostMono(args) => almost_mono(args, argv),
        Command::Verify(args) => verify(args),
        Command::Oracle(OracleCommand::MaxAlmostMono(args)) => oracle_max(args, argv),
        Command::Oracle(OracleCommand::R2(args)) => oracle_r2(args, argv),
        Command::Experiment(ExperimentCommand::Discrepancy(args)) => experiment(args, argv),
    }
}

fn generator_source(g: &GeneratorArgs) -> Result<ColoringSource, Exit> {
    let name = g.gen.ok_or_else(|| usage("pass --in FILE or --gen NAME"))?;
    let n_vertices = g.n_vertices.ok_or_else(|| usage("--gen needs --n-vertices"))?;
    let colors = g.colors.ok_or_else(|| usage("--gen needs --colors"))?;
    let spec = match name {
        GenName::Uniform => {
            if g.color.is_some() || g.blocks.is_some() {
                return Err(usage("--gen uniform takes neither --color nor --blocks"));
            }
            GeneratorSpec::uniform(g.seed)
        }
        GenName::Constant => {
            if g.blocks.is_some() {
                return Err(usage("--gen constant does not take --blocks"));
            }
            GeneratorSpec::constant(ColorId(g.color.unwrap_or(0)))
        }
        GenName::Blockmix => {
            if g.color.is_some() {
                return Err(usage("--gen blockmix does not take --color"));
            }
            GeneratorSpec::blockmix(g.seed, g.blocks.ok_or_else(|| usage("--gen blockmix needs --blocks"))?)
        }
    };
    Ok(ColoringSource::Generator { n_vertices, colors, spec })
}

fn input_source(input: &InputArgs) -> Result<ColoringSource, Exit> {
    let g = &input.generator;
    match &input.input {
        Some(path) => {
            if g.n_vertices.is_some() || g.colors.is_some() || g.color.is_some() || g.blocks.is_some() {
                return Err(usage("--in conflicts with generator flags"));
            }
            Ok(ColoringSource::File { path: path.clone() })
        }
        None => generator_source(g),
    }
}

fn load(source: &ColoringSource) -> Result<TripleColoring, Exit> {
    source.load().map_err(|e| match source {
        ColoringSource::File { path } => usage(format!("{}: {e}", path.display())),
        ColoringSource::Generator { .. } => usage(e.to_string()),
    })
}

fn r2_table(path: Option<&PathBuf>) -> Result<R2Table, Exit> {
    match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| usage(format!("{}: {e}", p.display())))?;
            Ok(parse_r2_table(&text)?)
        }
        None => R2Table::computed(OracleBudget::default(), &WallClock(Instant::now()))
            .map_err(|e| usage(format!("computing the r2 table: {e}"))),
    }
}

fn emit(report: &mut RunReport, start: Instant, path: Option<&PathBuf>, summary: &str) -> Result<(), Exit> {
    report.wall_time_secs = start.elapsed().as_secs_f64();
    report.peak_memory_bytes = peak_memory_bytes();
    let json = to_json(report);
    match path {
        Some(p) => {
            std::fs::write(p, json).map_err(|e| usage(format!("{}: {e}", p.display())))?;
            println!("{summary}");
        }
        None => print!("{json}"),
    }
    Ok(())
}

fn write_witness(witness: &Witness, path: Option<&PathBuf>) -> Result<(), Exit> {
    if let Some(p) = path {
        witness.write(p).map_err(|e| usage(format!("{}: {e}", p.display())))?;
    }
    Ok(())
}

fn engine_kind(kind: &EngineErrorKind) -> &'static str {
    match kind {
        EngineErrorKind::InvalidRequest(_) => "invalid_request",
        EngineErrorKind::InvalidState(_) => "invalid_state",
        EngineErrorKind::StrictSizeUnderflow { .. } => "strict_size_underflow",
        EngineErrorKind::NotEnoughVertices { .. } => "not_enough_vertices",
        EngineErrorKind::ReservoirExhausted { .. } => "reservoir_exhausted",
        EngineErrorKind::CliqueNotFound { .. } => "clique_not_found",
        EngineErrorKind::StrictBoundMissed { .. } => "strict_bound_missed",
        EngineErrorKind::Lemma(_) => "lemma",
        EngineErrorKind::Internal(_) => "internal",
    }
}

/// Records an engine failure in the report; configuration problems exit 2, the rest 3.
fn engine_failure(report: &mut RunReport, e: EngineError) -> i32 {
    report.outcome = Outcome::Failure { kind: engine_kind(&e.kind).into(), message: e.kind.to_string() };
    report.trace = e.trace.map(|t| *t);
    match e.kind {
        EngineErrorKind::InvalidRequest(_) => EXIT_USAGE,
        _ => EXIT_FAILED,
    }
}

fn gen(args: GenArgs) -> Result<(), Exit> {
    let source = generator_source(&args.generator)?;
    let coloring = load(&source)?;
    let layout = if args.explicit { Layout::Explicit } else { Layout::Native };
    write_coloring(&coloring, layout, &args.out)?;
    println!(
        "wrote {} ({} vertices, {} colors)",
        args.out.display(),
        coloring.n_vertices(),
        coloring.n_colors()
    );
    Ok(())
}

fn extract(args: ExtractArgs, argv: Vec<String>) -> Result<(), Exit> {
    let start = Instant::now();
    let source = input_source(&args.input)?;
    let coloring = load(&source)?;
    let colors = coloring.n_colors();
    let mut req = match args.mode {
        ModeArg::Adaptive => {
            let mut req = ExtractionRequest::adaptive(args.d, args.part_size.unwrap_or(1));
            if let Some(r) = args.rounds {
                req.r_cap = r;
            }
            req.initial_part_size = args.initial_part_size;
            req
        }
        ModeArg::Strict => {
            if args.initial_part_size.is_some() {
                return Err(usage("--initial-part-size applies to adaptive mode only"));
            }
            let rounds = match args.rounds {
                Some(r) => r,
                None => {
                    let table = r2_table(args.r2_table.as_ref())?;
                    let bound = r2_upper_bound(&table, args.d.saturating_sub(1) as u32, colors);
                    if bound.saturated || bound.value > u32::MAX as u64 {
                        return Err(usage("r_2(d-1; l) bound overflows; pass --rounds"));
                    }
                    bound.value as usize
                }
            };
            let n = args.part_size.unwrap_or_else(|| {
                scheduled_part_size(coloring.n_vertices() as u64, colors, rounds as u32) as usize
            });
            ExtractionRequest::strict(args.d, n, rounds)
        }
    };
    if let Some(cap) = args.reservoir_cap {
        req.reservoir_cap = cap;
    }
    req.search_seed = args.search_seed;
    req.check_invariants = args.check_invariants;

    let config = json!({
        "coloring": &source,
        "n_vertices": coloring.n_vertices(),
        "colors": colors,
        "request": &req,
    });
    let mut report = RunReport::new(argv, config);
    if req.n == 0 {
        let e = EngineError::from(EngineErrorKind::StrictSizeUnderflow { quantity: "part size l^-r sqrt(log2 N)" });
        let code = engine_failure(&mut report, e);
        emit(&mut report, start, args.output.report.as_ref(), "extraction failed")?;
        return Err(Exit { code, message: "strict part size floors to zero".into() });
    }
    match extract_multipartite(&coloring, &req) {
        Ok((emb, trace)) => {
            let witness = Witness::multipartite(source, &emb);
            let census = hyperramsey_core::color_census(&coloring, &emb.vertices()).expect("vertices in range");
            report.result = Some(json!({
                "d": emb.parts.len(),
                "n": req.n,
                "color": emb.color,
                "rounds": trace.achieved_rounds,
                "achieved_c": trace.achieved_c,
                "peak_graph_bytes": trace.peak_graph_bytes,
            }));
            report.census = Some(census);
            report.trace = Some(trace);
            report.witness = Some(witness.clone());
            write_witness(&witness, args.output.witness.as_ref())?;
            let summary = format!("found monochromatic K_{}({}) in color {}", emb.parts.len(), req.n, emb.color.0);
            emit(&mut report, start, args.output.report.as_ref(), &summary)
        }
        Err(e) => {
            let message = e.kind.to_string();
            let code = engine_failure(&mut report, e);
            emit(&mut report, start, args.output.report.as_ref(), "extraction failed")?;
            Err(Exit { code, message })
        }
    }
}

fn almost_mono(args: AlmostMonoArgs, argv: Vec<String>) -> Result<(), Exit> {
    let start = Instant::now();
    if !(args.epsilon > 0.0) {
        return Err(usage(format!("--epsilon must be positive, got {}", args.epsilon)));
    }
    let source = input_source(&args.input)?;
    let coloring = load(&source)?;
    let mode: Mode = args.mode.into();
    let options = AlmostMonoOptions {
        max_part_size: args.max_part_size,
        r2_table: if mode == Mode::Strict { r2_table(args.r2_table.as_ref())? } else { R2Table::new() },
        search_seed: args.search_seed,
        check_invariants: args.check_invariants,
    };
    let config = json!({
        "coloring": &source,
        "n_vertices": coloring.n_vertices(),
        "colors": coloring.n_colors(),
        "epsilon": args.epsilon,
        "mode": mode,
        "max_part_size": args.max_part_size,
        "search_seed": args.search_seed,
    });
    let mut report = RunReport::new(argv, config);
    match almost_mono_subset(&coloring, args.epsilon, mode, &options) {
        Ok(r) => {
            let witness = Witness::AlmostMono {
                coloring: source,
                epsilon: r.epsilon,
                subset: r.subset.as_slice().to_vec(),
                majority_color: r.majority_color,
                majority_count: r.census.counts[r.majority_color.index()],
                parts: Some(r.embedding.parts.iter().map(|p| p.as_slice().to_vec()).collect()),
            };
            report.result = Some(json!({
                "size": r.subset.len(),
                "d": r.d,
                "n": r.n,
                "majority_color": r.majority_color,
                "achieved_density": r.achieved_density,
                "achieved_c": r.achieved_c,
                "route": r.route,
            }));
            report.census = Some(r.census.clone());
            report.trace = Some(r.trace);
            report.witness = Some(witness.clone());
            write_witness(&witness, args.output.witness.as_ref())?;
            let summary = format!(
                "subset of {} vertices, color {} density {:.4}",
                r.subset.len(),
                r.majority_color.0,
                r.achieved_density
            );
            emit(&mut report, start, args.output.report.as_ref(), &summary)
        }
        Err(AlmostMonoError::Engine(e)) => {
            let message = e.kind.to_string();
            let code = engine_failure(&mut report, e);
            emit(&mut report, start, args.output.report.as_ref(), "pipeline failed")?;
            Err(Exit { code, message })
        }
        Err(e) => Err(usage(e.to_string())),
    }
}

fn verify(args: VerifyArgs) -> Result<(), Exit> {
    let witness = Witness::read(&args.witness).map_err(usage)?;
    let source = match &args.input {
        Some(path) => ColoringSource::File { path: path.clone() },
        None => witness.coloring().clone(),
    };
    let coloring = load(&source)?;
    let check = check_witness(&witness, &coloring);
    if check.valid {
        println!("valid: {} triples checked", check.triples_checked);
        return Ok(());
    }
    let problem = check.problem.unwrap_or_default();
    match check.triple {
        Some([a, b, c]) => println!("INVALID: offending triple ({a}, {b}, {c}): {problem}"),
        None => println!("INVALID: {problem}"),
    }
    Err(Exit { code: EXIT_INVALID, message: String::new() })
}

fn oracle_failure(report: &mut RunReport, e: &OracleError) -> i32 {
    let (kind, code) = match e {
        OracleError::BudgetExceeded { .. } => ("budget_exceeded", EXIT_FAILED),
        OracleError::TimeExceeded { .. } => ("time_exceeded", EXIT_FAILED),
        OracleError::TooLarge { .. } => ("too_large", EXIT_USAGE),
        OracleError::InvalidArgument(_) => ("invalid_argument", EXIT_USAGE),
    };
    report.outcome = Outcome::Failure { kind: kind.into(), message: e.to_string() };
    code
}

fn oracle_max(args: OracleMaxArgs, argv: Vec<String>) -> Result<(), Exit> {
    let start = Instant::now();
    let source = input_source(&args.input)?;
    let coloring = load(&source)?;
    let budget = args.budget.budget();
    let config = json!({
        "coloring": &source,
        "n_vertices": coloring.n_vertices(),
        "colors": coloring.n_colors(),
        "epsilon": args.epsilon,
        "budget": budget,
        "cross_check": args.cross_check,
    });
    let mut report = RunReport::new(argv, config);
    let clock = WallClock(start);
    let found = brute_max_almost_mono(&coloring, args.epsilon, budget, &clock).and_then(|w| {
        if !args.cross_check {
            return Ok((w, None));
        }
        let other = brute_max_almost_mono_gray(&coloring, args.epsilon, budget, &clock)?;
        let agree = (w.size, &w.subset, &w.census) == (other.size, &other.subset, &other.census);
        Ok((w, Some(agree)))
    });
    match found {
        Ok((w, agreement)) => {
            let (majority_color, majority_count) = w.census.majority();
            let witness = Witness::AlmostMono {
                coloring: source,
                epsilon: args.epsilon,
                subset: w.subset.as_slice().to_vec(),
                majority_color,
                majority_count,
                parts: None,
            };
            report.result = Some(json!({
                "size": w.size,
                "subset": &w.subset,
                "majority_color": majority_color,
                "subsets_examined": w.examined,
                "paths_agree": agreement,
            }));
            report.census = Some(w.census.clone());
            report.witness = Some(witness.clone());
            write_witness(&witness, args.output.witness.as_ref())?;
            emit(&mut report, start, args.output.report.as_ref(), &format!("maximum size {}", w.size))?;
            if agreement == Some(false) {
                return Err(Exit { code: EXIT_INVALID, message: "the two enumerations disagree".into() });
            }
            Ok(())
        }
        Err(e) => {
            let code = oracle_failure(&mut report, &e);
            emit(&mut report, start, args.output.report.as_ref(), "oracle failed")?;
            Err(Exit { code, message: e.to_string() })
        }
    }
}

fn oracle_r2(args: OracleR2Args, argv: Vec<String>) -> Result<(), Exit> {
    let start = Instant::now();
    let budget = args.budget.budget();
    let config = json!({ "k": args.k, "colors": args.colors, "budget": budget });
    let mut report = RunReport::new(argv, config);
    match r2_exact_small(args.k, args.colors, budget, &WallClock(start)) {
        Ok(exact) => {
            let w = &exact.witness;
            let witness_pairs: Vec<Value> = (2..=w.order())
                .flat_map(|b| (1..b).map(move |a| (a, b)))
                .map(|(a, b)| json!([a, b, w.get(a, b)]))
                .collect();
            report.result = Some(json!({
                "value": exact.value,
                "colorings_checked": exact.colorings_checked,
                "witness_order": w.order(),
                "witness_pairs": witness_pairs,
            }));
            if let Some(p) = &args.table_out {
                let mut table = match std::fs::read_to_string(p) {
                    Ok(text) => parse_r2_table(&text)?,
                    Err(_) => R2Table::new(),
                };
                table.insert(args.k, args.colors, exact.value);
                std::fs::write(p, r2_table_to_string(&table)).map_err(|e| usage(format!("{}: {e}", p.display())))?;
            }
            let summary = format!("r2({}; {}) = {}", args.k, args.colors, exact.value);
            emit(&mut report, start, args.report.as_ref(), &summary)
        }
        Err(e) => {
            let code = oracle_failure(&mut report, &e);
            emit(&mut report, start, args.report.as_ref(), "oracle failed")?;
            Err(Exit { code, message: e.to_string() })
        }
    }
}

fn experiment(args: DiscrepancyArgs, argv: Vec<String>) -> Result<(), Exit> {
    let start = Instant::now();
    let source = ColoringSource::Generator {
        n_vertices: args.n_vertices,
        colors: args.colors,
        spec: GeneratorSpec::uniform(args.seed),
    };
    let coloring = load(&source)?;
    let config = json!({
        "coloring": &source,
        "subset_size": args.subset_size,
        "samples": args.samples,
        "seed": args.seed,
    });
    let mut report = RunReport::new(argv, config);
    let r = discrepancy(&coloring, args.subset_size, args.samples, args.seed).map_err(|e| usage(e.to_string()))?;
    report.result = Some(serde_json::to_value(&r).expect("report serializes"));
    let summary = format!("max deviation {:.4} over {} samples", r.max_deviation, r.samples);
    emit(&mut report, start, args.report.as_ref(), &summary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn conflicting_inputs_exit_2() {
        let code = run_cli(["hyperramsey", "extract", "--in", "x.tc3", "--gen", "uniform", "--d", "3"]);
        assert_eq!(code, EXIT_USAGE);
        let code = run_cli(["hyperramsey", "extract", "--d", "3"]);
        assert_eq!(code, EXIT_USAGE);
        let code = run_cli(["hyperramsey", "extract", "--gen", "uniform", "--n-vertices", "9", "--colors", "2", "--d", "3", "--bogus"]);
        assert_eq!(code, EXIT_USAGE);
    }
}
