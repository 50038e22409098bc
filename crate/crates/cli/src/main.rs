mod config;

use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dynexplore::algorithms::ScriptAlgorithm;
use dynexplore::runtime::{ConfigError, Radius};
use dynexplore::sim::{
    parse_schedule, replay_trace, run, AdversaryKind, AlgorithmKind, IdMode, NullSink, Placement, RunError, RunSpec,
    RunSummary, ScheduleSink, TextSink,
};
use dynexplore::trace::{render, TraceError};
use dynexplore::verification::Verdict;
use rayon::prelude::*;

const TRACE_DIR_VAR: &str = "DYNEXPLORE_TRACE_DIR";

#[derive(Parser)]
#[command(name = "dynexplore", version, about = "Mobile agent exploration on time-varying graphs")]
#[command(args_override_self = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one simulation and print its summary.
    Run(RunArgs),
    /// Re-run the monitors over a recorded trace.
    Replay { trace: PathBuf },
    /// Replay a trace and re-simulate it from its header.
    Verify { trace: PathBuf },
    /// Emit only the snapshot schedule of a run.
    Adversary(RunArgs),
    /// Run a parameter grid and write one CSV row per run.
    Sweep(SweepArgs),
}

#[derive(Args, Clone)]
struct Shared {
    /// Node count of the path layout used by the interval adversary.
    #[arg(long)]
    p: Option<usize>,
    #[arg(long)]
    agents: Option<usize>,
    /// C0, C0-prime, dispersed, packed, or a comma-separated count per node.
    #[arg(long)]
    placement: Option<Placement>,
    #[arg(long, default_value = "random-ct")]
    adversary: AdversaryKind,
    #[arg(long, default_value = "exp-algo")]
    algorithm: AlgorithmKind,
    /// Visibility radius in hops, or `global`.
    #[arg(long = "ell_v")]
    ell_v: Option<Radius>,
    /// Communication radius in hops, or `global`.
    #[arg(long = "ell_c")]
    ell_c: Option<Radius>,
    #[arg(long, default_value_t = 1000)]
    rounds: u64,
    #[arg(long, default_value_t = 1.0)]
    c0: f64,
    #[arg(long, default_value = "sequential")]
    ids: IdMode,
    /// Continue after a monitor failure.
    #[arg(long)]
    keep_going: bool,
    /// Stop this many rounds after full coverage.
    #[arg(long)]
    settle: Option<u64>,
    /// Decision script for `--algorithm script`.
    #[arg(long)]
    script: Option<PathBuf>,
    /// Schedule trace for `--adversary replay-file`.
    #[arg(long)]
    schedule: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    n: usize,
    #[arg(long = "T", default_value_t = 3)]
    window: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Trace output. Defaults to a file under $DYNEXPLORE_TRACE_DIR if set.
    #[arg(long)]
    trace: Option<PathBuf>,
    #[command(flatten)]
    shared: Shared,
}

#[derive(Args)]
struct SweepArgs {
    /// Comma-separated node counts.
    #[arg(long, value_delimiter = ',', required = true)]
    n: Vec<usize>,
    #[arg(long = "T", value_delimiter = ',', default_value = "3")]
    window: Vec<usize>,
    /// Comma-separated seeds, or a range `a..b`.
    #[arg(long, default_value = "0")]
    seeds: String,
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// CSV output, stdout if omitted.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Write one trace per run here. Defaults to $DYNEXPLORE_TRACE_DIR.
    #[arg(long)]
    trace_dir: Option<PathBuf>,
    #[command(flatten)]
    shared: Shared,
}

/// An error with its exit code.
struct Failure(i32, String);

impl From<RunError> for Failure {
    fn from(e: RunError) -> Self {
        Failure(e.exit_code(), e.to_string())
    }
}

impl From<TraceError> for Failure {
    fn from(e: TraceError) -> Self {
        Failure(2, format!("trace: {e}"))
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure(2, format!("configuration error: {e}"))
    }
}

fn io_failure(path: &Path) -> impl FnOnce(io::Error) -> Failure + '_ {
    move |e| Failure(2, format!("{}: {e}", path.display()))
}

fn build_spec(n: usize, window: usize, seed: u64, sh: &Shared) -> Result<RunSpec, Failure> {
    let mut s = RunSpec::new(n, sh.adversary, sh.algorithm);
    s.window = window;
    s.seed = seed;
    s.p = sh.p;
    s.agents = sh.agents;
    s.placement = sh.placement.clone();
    s.ell_v = sh.ell_v;
    s.ell_c = sh.ell_c;
    s.rounds = sh.rounds;
    s.c0 = sh.c0;
    s.ids = sh.ids;
    s.keep_going = sh.keep_going;
    s.settle = sh.settle;
    load_inputs(&mut s, sh.script.as_deref(), sh.schedule.as_deref())?;
    Ok(s)
}

/// Reads the script and schedule files named by a spec.
fn load_inputs(s: &mut RunSpec, script: Option<&Path>, schedule: Option<&Path>) -> Result<(), Failure> {
    if let Some(path) = script {
        let text = fs::read_to_string(path).map_err(io_failure(path))?;
        let parsed = ScriptAlgorithm::parse(&text).map_err(|e| Failure(2, format!("{}: {e}", path.display())))?;
        s.script = Some(parsed);
        s.script_path = Some(path.display().to_string());
    }
    if let Some(path) = schedule {
        let text = fs::read_to_string(path).map_err(io_failure(path))?;
        let (n, snaps) = parse_schedule(&text)?;
        if n != s.n {
            return Err(Failure(2, format!("schedule is for n={n}, run has n={}", s.n)));
        }
        s.schedule = Some(snaps);
        s.schedule_path = Some(path.display().to_string());
    }
    Ok(())
}

fn default_trace_name(s: &RunSpec) -> String {
    format!("{}-{}-n{}-T{}-s{}.trace", s.adversary, s.algorithm, s.n, s.window, s.seed)
}

fn env_trace_dir() -> Option<PathBuf> {
    std::env::var_os(TRACE_DIR_VAR).filter(|v| !v.is_empty()).map(PathBuf::from)
}

/// Runs a spec, writing its trace to `path` if given.
fn run_to(spec: &RunSpec, path: Option<&Path>, schedule_only: bool) -> Result<RunSummary, Failure> {
    let Some(path) = path else {
        return Ok(run(spec, &mut NullSink)?);
    };
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io_failure(dir))?;
    }
    let file = File::create(path).map_err(io_failure(path))?;
    let mut text = TextSink(BufWriter::new(file));
    let summary = if schedule_only { run(spec, &mut ScheduleSink(&mut text)) } else { run(spec, &mut text) }?;
    text.0.flush().map_err(io_failure(path))?;
    Ok(summary)
}

fn opt(v: Option<u64>) -> String {
    v.map_or("-".into(), |x| x.to_string())
}

fn summary_table(spec: &RunSpec, s: &RunSummary) -> String {
    let mut out = String::new();
    let comm = spec.comm();
    let rows = [
        ("run", format!("{} vs {} n={} T={} seed={}", spec.adversary, spec.algorithm, spec.n, spec.window, spec.seed)),
        ("radii", format!("ell_v={} ell_c={}", comm.ell_v, comm.ell_c)),
        ("rounds run", s.rounds_run.to_string()),
        ("converged at", opt(s.converged_at)),
        ("covered at", opt(s.covered_at)),
        ("unvisited", s.unvisited.iter().map(|v| v.0.to_string()).collect::<Vec<_>>().join(",")),
        ("target visited", s.target_visited.to_string()),
        ("final holes", s.final_holes.to_string()),
        ("hole milestones", s.hole_milestones.iter().map(|(r, h)| format!("{r}:{h}")).collect::<Vec<_>>().join(" ")),
        ("max diameter", s.max_diameter.to_string()),
        (
            "adversary",
            format!(
                "flips={} conceded={} defeated={} precomputations={} symmetry={}/{}",
                s.adversary.flips,
                s.adversary.conceded,
                s.adversary.defeated,
                s.adversary.precomputations,
                s.adversary.symmetry_checks - s.adversary.symmetry_failures,
                s.adversary.symmetry_checks
            ),
        ),
    ];
    for (k, v) in rows {
        let _ = writeln!(out, "{k:<16} {v}");
    }
    out.push('\n');
    out.push_str(&verdict_table(&s.verdicts));
    out
}

fn verdict_table(verdicts: &[Verdict]) -> String {
    let mut out = format!("{:<14} {:<6} detail\n", "monitor", "result");
    for v in verdicts {
        let _ = writeln!(out, "{:<14} {:<6} {}", v.monitor, if v.pass { "pass" } else { "FAIL" }, v.detail);
    }
    out
}

fn cmd_run(a: &RunArgs, schedule_only: bool) -> Result<i32, Failure> {
    let spec = build_spec(a.n, a.window, a.seed, &a.shared)?;
    let path = a.trace.clone().or_else(|| env_trace_dir().map(|d| d.join(default_trace_name(&spec))));
    let summary = run_to(&spec, path.as_deref(), schedule_only)?;
    let table = summary_table(&spec, &summary);
    if schedule_only {
        eprint!("{table}");
    } else {
        print!("{table}");
    }
    if let Some(p) = path {
        eprintln!("trace written to {}", p.display());
    }
    Ok(summary.exit_code())
}

fn cmd_replay(path: &Path) -> Result<i32, Failure> {
    let text = fs::read_to_string(path).map_err(io_failure(path))?;
    let report = replay_trace(&text)?;
    let last_round = report.verdicts.iter().map(|v| v.round).max().unwrap_or(0);
    let summary: Vec<Verdict> = report.verdicts.iter().filter(|v| v.round == last_round).cloned().collect();
    println!("rounds replayed  {}", report.rounds);
    println!("verdicts         {} recomputed, {} recorded", report.verdicts.len(), report.recorded.len());
    println!("failures         {}", report.failures);
    println!("divergences      {}", report.divergences.len());
    for d in report.divergences.iter().take(20) {
        println!("  {d}");
    }
    for v in report.verdicts.iter().filter(|v| !v.pass && v.round != last_round).take(20) {
        println!("  round {} {}: {}", v.round, v.monitor, v.detail);
    }
    println!();
    print!("{}", verdict_table(&summary));
    Ok(report.exit_code())
}

fn cmd_verify(path: &Path) -> Result<i32, Failure> {
    let code = cmd_replay(path)?;
    let text = fs::read_to_string(path).map_err(io_failure(path))?;
    let trace = dynexplore::trace::Trace::parse(&text)?;
    let mut spec = RunSpec::from_header(&trace.header)?;
    let script = spec.script_path.clone().map(PathBuf::from);
    let schedule = spec.schedule_path.clone().map(PathBuf::from);
    load_inputs(&mut spec, script.as_deref(), schedule.as_deref())?;
    let mut records = Vec::new();
    run(&spec, &mut records)?;
    let fresh = render(&records);
    let mismatch = fresh.lines().zip(text.lines()).position(|(a, b)| a != b).or_else(|| {
        let (a, b) = (fresh.lines().count(), text.lines().count());
        (a != b).then_some(a.min(b))
    });
    match mismatch {
        None => {
            println!("re-simulation    identical ({} lines)", text.lines().count());
            Ok(code)
        }
        Some(i) => {
            println!("re-simulation    differs at line {}", i + 1);
            println!("  recorded: {}", text.lines().nth(i).unwrap_or("<end>"));
            println!("  fresh:    {}", fresh.lines().nth(i).unwrap_or("<end>"));
            Ok(1)
        }
    }
}

fn parse_seeds(text: &str) -> Result<Vec<u64>, Failure> {
    let bad = || Failure(2, format!("bad --seeds `{text}` (expected a,b,c or a..b)"));
    if let Some((a, b)) = text.split_once("..") {
        let (a, b): (u64, u64) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
        return Ok((a..b).collect());
    }
    text.split(',').map(|s| s.trim().parse().map_err(|_| bad())).collect()
}

fn sweep_row(spec: &RunSpec, result: &Result<RunSummary, Failure>) -> String {
    let head = format!("{},{},{},{},{}", spec.n, spec.window, spec.seed, spec.adversary, spec.algorithm);
    match result {
        Ok(s) => format!(
            "{head},{},{},{},{},{},{},{},{},",
            s.rounds_run,
            opt(s.converged_at),
            opt(s.covered_at),
            s.unvisited.len(),
            s.final_holes,
            s.max_diameter,
            s.failures,
            s.exit_code()
        ),
        Err(Failure(code, msg)) => format!("{head},,,,,,,,{code},\"{}\"", msg.replace('"', "'")),
    }
}

fn cmd_sweep(a: &SweepArgs) -> Result<i32, Failure> {
    let seeds = parse_seeds(&a.seeds)?;
    let mut specs = Vec::new();
    for &n in &a.n {
        for &t in &a.window {
            for &seed in &seeds {
                specs.push(build_spec(n, t, seed, &a.shared)?);
            }
        }
    }
    let dir = a.trace_dir.clone().or_else(env_trace_dir);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(a.jobs)
        .build()
        .map_err(|e| Failure(2, format!("thread pool: {e}")))?;
    let results: Vec<Result<RunSummary, Failure>> = pool.install(|| {
        specs
            .par_iter()
            .map(|s| run_to(s, dir.as_ref().map(|d| d.join(default_trace_name(s))).as_deref(), false))
            .collect()
    });
    let mut csv = String::from("n,T,seed,adversary,algorithm,rounds,converged_at,covered_at,unvisited,final_holes,max_diameter,failed_monitors,exit,error\n");
    for (s, r) in specs.iter().zip(&results) {
        csv.push_str(&sweep_row(s, r));
        csv.push('\n');
    }
    match &a.csv {
        Some(p) => fs::write(p, &csv).map_err(io_failure(p))?,
        None => print!("{csv}"),
    }
    let worst = results.iter().map(|r| r.as_ref().map_or_else(|Failure(c, _)| *c, RunSummary::exit_code)).max();
    let failed = results.iter().filter(|r| !matches!(r, Ok(s) if s.exit_code() == 0)).count();
    eprintln!("{} runs, {failed} not clean", results.len());
    Ok(worst.unwrap_or(0))
}

fn main() -> ExitCode {
    let args = match config::expand(std::env::args_os().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let cli = Cli::parse_from(args);
    let result = match &cli.command {
        Command::Run(a) => cmd_run(a, false),
        Command::Adversary(a) => cmd_run(a, true),
        Command::Replay { trace } => cmd_replay(trace),
        Command::Verify { trace } => cmd_verify(trace),
        Command::Sweep(a) => cmd_sweep(a),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code as u8)
        }
    }
}
