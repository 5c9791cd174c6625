//! `tmlab`: classify programs, sample and enumerate them, and run density
//! and random-walk experiments with replayable reports.
//!
//! Exit status is 0 on success and 2 on any usage or domain error.

mod report;

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use tmlab::decider::{self, conservative_halting};
use tmlab::density::{self, EventId, ExperimentSpec};
use tmlab::machine::{Program, ProgramJson, TapeGeometry};
use tmlab::sampler::{self, parse_seed, SeedSpec};
use tmlab::walk::{self, WalkSpec};

use report::{render, ExactRow, Format, WalkRow};

#[derive(Parser)]
#[command(
    name = "tmlab",
    version,
    about = "Generic-case halting experiments on random Turing machines"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a program file and report its halting verdicts as JSON.
    Classify(ClassifyArgs),
    /// Print a uniformly sampled program.
    Sample(SampleArgs),
    /// Exact density of an event over every n-state program.
    Enumerate(EnumerateArgs),
    /// Monte Carlo density of an event over a grid of state counts.
    Density(DensityArgs),
    /// Fall-off probabilities of random walks, exact and simulated.
    Walk(WalkArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelArg {
    #[value(name = "one-way", alias = "oneway")]
    OneWay,
    #[value(name = "two-way", alias = "twoway")]
    TwoWay,
}

impl ModelArg {
    fn geometry(self) -> TapeGeometry {
        match self {
            ModelArg::OneWay => TapeGeometry::OneWayFallOff,
            ModelArg::TwoWay => TapeGeometry::TwoWayInfinite,
        }
    }

    fn name(self) -> &'static str {
        self.geometry().label()
    }
}

#[derive(Args)]
struct Output {
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Write the report here instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Worker threads; the report does not depend on this.
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

#[derive(Args)]
struct ClassifyArgs {
    /// Program in the `tm n=.. a=..` text format, or its JSON equivalent.
    file: PathBuf,
    /// Tape model for the budgeted halting verdict.
    #[arg(long, value_enum, default_value = "one-way")]
    model: ModelArg,
    /// Step budget for the budgeted halting verdict [default: 10n].
    #[arg(long)]
    budget: Option<u64>,
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long)]
    n: u32,
    #[arg(long, default_value_t = 2)]
    a: u32,
    #[arg(long, default_value = "0", value_parser = seed)]
    seed: u64,
    /// Trial index within the master seed.
    #[arg(long, default_value_t = 0)]
    index: u64,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct EnumerateArgs {
    #[arg(long)]
    n: u32,
    #[arg(long, default_value_t = 2)]
    a: u32,
    #[arg(long, default_value = "in-b", value_parser = event)]
    event: EventId,
    #[arg(long, default_value_t = sampler::DEFAULT_GUARD)]
    guard: u64,
    #[command(flatten)]
    out: Output,
}

#[derive(Args)]
struct DensityArgs {
    #[arg(long, value_parser = event)]
    event: EventId,
    /// Comma-separated, strictly increasing state counts.
    #[arg(long, value_delimiter = ',', required = true)]
    n: Vec<u32>,
    #[arg(long, default_value_t = 2)]
    a: u32,
    #[arg(long, value_enum, default_value = "one-way")]
    model: ModelArg,
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    #[arg(long, default_value = "0", value_parser = seed)]
    seed: u64,
    #[command(flatten)]
    out: Output,
}

#[derive(Args)]
struct WalkArgs {
    #[arg(long, default_value_t = 1)]
    dim: u32,
    /// Comma-separated horizons.
    #[arg(long, value_delimiter = ',', required = true)]
    k: Vec<u64>,
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    #[arg(long, default_value = "0", value_parser = seed)]
    seed: u64,
    #[command(flatten)]
    out: Output,
}

fn seed(s: &str) -> Result<u64, String> {
    parse_seed(s).map_err(|e| format!("bad seed `{s}`: {e}"))
}

fn event(s: &str) -> Result<EventId, String> {
    s.parse().map_err(|e: density::UnknownEvent| e.to_string())
}

fn join<T: ToString>(items: &[T]) -> String {
    items.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

fn emit(out: &Output, text: String) -> Result<(), String> {
    match &out.output {
        Some(path) => fs::write(path, text).map_err(|e| format!("{}: {e}", path.display())),
        None => write_stdout(&text),
    }
}

fn write_stdout(text: &str) -> Result<(), String> {
    let mut stdout = std::io::stdout().lock();
    stdout
        .write_all(text.as_bytes())
        .and_then(|()| stdout.flush())
        .map_err(|e| format!("standard output: {e}"))
}

fn with_workers<T: Send>(workers: usize, job: impl FnOnce() -> T + Send) -> Result<T, String> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| e.to_string())?;
    Ok(pool.install(job))
}

fn read_program(path: &PathBuf) -> Result<Program, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let parsed = if text.trim_start().starts_with('{') {
        let json: ProgramJson = serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        Program::try_from(json).map_err(|e| format!("{}: table entry {}: {}", path.display(), e.line, e.kind))
    } else {
        Program::parse(&text).map_err(|e| format!("{}: {e}", path.display()))
    };
    parsed
}

fn classify(args: ClassifyArgs) -> Result<(), String> {
    let program = read_program(&args.file)?;
    let budget = args.budget.unwrap_or(10 * u64::from(program.states()));
    let classification = decider::classify(&program, 0);
    let report = json!({
        "schema_version": report::SCHEMA_VERSION,
        "n": program.states(),
        "a": program.alphabet(),
        "classification": classification,
        "in_b": classification.in_b(),
        "halting_on_b": decider::decide_halting_on_b(&program),
        "has_halt_transition": decider::has_halt_transition(&program),
        "budgeted": {
            "model": args.model.name(),
            "budget": budget,
            "verdict": conservative_halting(&program, args.model.geometry(), budget),
        },
    });
    let text = serde_json::to_string_pretty(&report).map_err(|e| e.to_string())?;
    write_stdout(&format!("{text}\n"))
}

fn sample(args: SampleArgs) -> Result<(), String> {
    let mut stream = SeedSpec::new(args.seed, args.index).stream();
    let program = sampler::sample_program(args.n, args.a, &mut stream).map_err(|e| e.to_string())?;
    if args.json {
        let text = serde_json::to_string_pretty(&program.to_json()).map_err(|e| e.to_string())?;
        write_stdout(&format!("{text}\n"))
    } else {
        write_stdout(&program.to_text())
    }
}

fn enumerate(args: EnumerateArgs) -> Result<(), String> {
    let exact = with_workers(args.out.workers, || {
        density::exact_density_with_guard(args.event, args.n, args.a, args.guard)
    })?
    .map_err(|e| e.to_string())?;
    let replay = format!(
        "tmlab enumerate --n {} --a {} --event {} --guard {} --format {}",
        args.n,
        args.a,
        args.event,
        args.guard,
        args.out.format.name()
    );
    let text = render("enumerate", &replay, args.out.format, &[ExactRow::from(&exact)])?;
    emit(&args.out, text)
}

fn density(args: DensityArgs) -> Result<(), String> {
    let spec = ExperimentSpec {
        event: args.event,
        model: args.model.geometry(),
        a: args.a,
        n_grid: args.n.clone(),
        trials: args.trials,
        master_seed: args.seed,
    };
    let rows = with_workers(args.out.workers, || density::convergence_table(&spec))?.map_err(|e| e.to_string())?;
    let replay = format!(
        "tmlab density --event {} --n {} --a {} --model {} --trials {} --seed {} --format {}",
        args.event,
        join(&args.n),
        args.a,
        args.model.name(),
        args.trials,
        args.seed,
        args.out.format.name()
    );
    let text = report::density_report(&replay, args.out.format, &rows)?;
    emit(&args.out, text)
}

fn walk(args: WalkArgs) -> Result<(), String> {
    let specs = args
        .k
        .iter()
        .enumerate()
        .map(|(i, &k)| {
            WalkSpec::new(
                args.dim,
                k,
                args.trials,
                sampler::derive_trial_seed(args.seed, i as u64),
            )
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    let rows = with_workers(args.out.workers, || {
        specs
            .iter()
            .map(|&spec| {
                let estimate = walk::walk_mc(spec)?;
                let exact = (spec.dimension == 1).then(|| walk::falloff_cdf_exact(spec.steps).value);
                let (ci_lo, ci_hi) = estimate.interval();
                Ok(WalkRow {
                    k: spec.steps,
                    exact_cdf: exact,
                    mc_estimate: estimate.p_hat(),
                    ci_lo,
                    ci_hi,
                })
            })
            .collect::<Result<Vec<_>, walk::WalkError>>()
    })?
    .map_err(|e| e.to_string())?;
    let replay = format!(
        "tmlab walk --dim {} --k {} --trials {} --seed {} --format {}",
        args.dim,
        join(&args.k),
        args.trials,
        args.seed,
        args.out.format.name()
    );
    let text = render("walk", &replay, args.out.format, &rows)?;
    emit(&args.out, text)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Classify(args) => classify(args),
        Command::Sample(args) => sample(args),
        Command::Enumerate(args) => enumerate(args),
        Command::Density(args) => density(args),
        Command::Walk(args) => walk(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(message) => {
            eprintln!("tmlab: {message}");
            ExitCode::from(2)
        }
    }
}
