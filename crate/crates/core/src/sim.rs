//! Run configuration, the run loop, and offline re-verification of traces.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::adversaries::{
    c0_counts, c0_prime_counts, Adversary, AdversaryError, AdversaryStats, CtImpossibility, CtPortFlip, IntervalFlip,
    RandomCt, ReplaySchedule,
};
use crate::algorithms::{
    FullVisibilityGreedy, GreedyZeroHop, LocalFill, PortShifter, RotorZeroHop, ScriptAlgorithm, Stay,
};
use crate::exploration::ExpAlgo;
use crate::runtime::{
    random_ids, sequential_ids, step_round, AgentId, Algorithm, CommSpec, ConfigError, Configuration, Memories, Radius,
};
use crate::trace::{encode, Header, Record, Trace, TraceError};
use crate::tvg::{NodeId, Snapshot};
use crate::verification::{MonitorPlan, MonitorSuite, RoundRecord, Verdict, WindowCheck};

macro_rules! named_enum {
    ($name:ident { $($variant:ident => $text:literal),+ $(,)? }) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
        pub enum $name { $($variant),+ }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(match self { $($name::$variant => $text),+ })
            }
        }

        impl FromStr for $name {
            type Err = String;
            fn from_str(s: &str) -> Result<Self, String> {
                match s {
                    $($text => Ok($name::$variant),)+
                    _ => Err(format!(
                        "unknown {} `{s}` (expected one of: {})",
                        stringify!($name).to_lowercase(),
                        [$($text),+].join(", ")
                    )),
                }
            }
        }
    };
}

named_enum!(AdversaryKind {
    IntervalFlip => "interval-flip",
    CtImpossibility => "ct-impossibility",
    CtPortFlip => "ct-portflip",
    RandomCt => "random-ct",
    Replay => "replay-file",
});

named_enum!(AlgorithmKind {
    ExpAlgo => "exp-algo",
    Stay => "stay",
    Greedy0Hop => "greedy-0hop",
    Rotor0Hop => "rotor-0hop",
    PortShifter => "port-shifter",
    LocalFill => "local-fill",
    FullGreedy => "full-greedy",
    Script => "script",
});

named_enum!(IdMode {
    Sequential => "sequential",
    Random => "random",
});

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Placement {
    C0,
    C0Prime,
    /// One agent on each of the first `agents` nodes.
    Dispersed,
    /// Two agents on node 0 and one on each following node until all are placed.
    Packed,
    Custom(Vec<usize>),
}

impl fmt::Display for Placement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Placement::C0 => f.write_str("C0"),
            Placement::C0Prime => f.write_str("C0-prime"),
            Placement::Dispersed => f.write_str("dispersed"),
            Placement::Packed => f.write_str("packed"),
            Placement::Custom(c) => f.write_str(&c.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")),
        }
    }
}

impl FromStr for Placement {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "C0" | "c0" => Ok(Placement::C0),
            "C0-prime" | "C0'" | "c0-prime" => Ok(Placement::C0Prime),
            "dispersed" => Ok(Placement::Dispersed),
            "packed" => Ok(Placement::Packed),
            list => list
                .split(',')
                .map(|x| x.trim().parse::<usize>())
                .collect::<Result<Vec<_>, _>>()
                .map(Placement::Custom)
                .map_err(|_| format!("bad placement `{s}` (C0, C0-prime, dispersed, packed or a count list)")),
        }
    }
}

/// All inputs of a run. Optional fields fall back to per-adversary defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub n: usize,
    pub window: usize,
    pub p: Option<usize>,
    pub agents: Option<usize>,
    pub placement: Option<Placement>,
    pub adversary: AdversaryKind,
    pub algorithm: AlgorithmKind,
    pub ell_v: Option<Radius>,
    pub ell_c: Option<Radius>,
    pub rounds: u64,
    pub seed: u64,
    pub c0: f64,
    pub ids: IdMode,
    /// Keep going after a monitor failure.
    pub keep_going: bool,
    /// Stop this many rounds after coverage is reached, if coverage is monitored.
    pub settle: Option<u64>,
    /// Where the script and schedule came from, echoed into the header.
    pub script_path: Option<String>,
    pub schedule_path: Option<String>,
    pub script: Option<ScriptAlgorithm>,
    pub schedule: Option<Vec<Snapshot>>,
}

impl RunSpec {
    pub fn new(n: usize, adversary: AdversaryKind, algorithm: AlgorithmKind) -> Self {
        Self {
            n,
            window: 3,
            p: None,
            agents: None,
            placement: None,
            adversary,
            algorithm,
            ell_v: None,
            ell_c: None,
            rounds: 1000,
            seed: 0,
            c0: 1.0,
            ids: IdMode::Sequential,
            keep_going: false,
            settle: None,
            script_path: None,
            schedule_path: None,
            script: None,
            schedule: None,
        }
    }

    pub fn comm(&self) -> CommSpec {
        let ell_v = self.ell_v.unwrap_or(match self.algorithm {
            AlgorithmKind::ExpAlgo | AlgorithmKind::LocalFill => Radius::Hops(1),
            AlgorithmKind::FullGreedy => Radius::Unbounded,
            _ => Radius::Hops(0),
        });
        CommSpec::new(ell_v, self.ell_c.unwrap_or(Radius::Unbounded))
    }

    pub fn p(&self) -> usize {
        self.p.unwrap_or(self.n.saturating_sub(1))
    }

    pub fn placement(&self) -> Placement {
        self.placement.clone().unwrap_or(match self.adversary {
            AdversaryKind::CtImpossibility => Placement::C0,
            AdversaryKind::CtPortFlip | AdversaryKind::RandomCt | AdversaryKind::Replay => Placement::C0Prime,
            AdversaryKind::IntervalFlip => Placement::Packed,
        })
    }

    /// Agents per node.
    pub fn counts(&self) -> Result<Vec<usize>, ConfigError> {
        let n = self.n;
        let bad = |m: String| ConfigError::Invalid(m);
        let counts = match self.placement() {
            Placement::C0 => c0_counts(n),
            Placement::C0Prime => c0_prime_counts(n),
            Placement::Dispersed => {
                let k = self.agents.unwrap_or(n);
                if k > n {
                    return Err(bad(format!("cannot disperse {k} agents on {n} nodes")));
                }
                (0..n).map(|v| usize::from(v < k)).collect()
            }
            Placement::Packed => {
                let k = self.agents.unwrap_or(n - 1);
                if k < 2 || k > n + 1 {
                    return Err(bad(format!("packed placement needs 2..={} agents, got {k}", n + 1)));
                }
                (0..n).map(|v| if v == 0 { 2 } else { usize::from(v + 1 < k) }).collect()
            }
            Placement::Custom(c) => {
                if c.len() != n {
                    return Err(bad(format!("placement lists {} nodes, n is {n}", c.len())));
                }
                c
            }
        };
        if let Some(k) = self.agents {
            let total: usize = counts.iter().sum();
            if total != k {
                return Err(bad(format!("placement holds {total} agents, --agents says {k}")));
            }
        }
        Ok(counts)
    }

    pub fn initial(&self) -> Result<Configuration, ConfigError> {
        let counts = self.counts()?;
        let total = counts.iter().sum();
        let ids: Vec<AgentId> = match self.ids {
            IdMode::Sequential => sequential_ids(total),
            IdMode::Random => {
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ 0x1d5);
                random_ids(total, self.n, &mut rng)?
            }
        };
        Configuration::from_counts(&counts, &ids)
    }

    pub fn plan(&self) -> MonitorPlan {
        let mut plan = MonitorPlan::basic(self.n);
        let exp = self.algorithm == AlgorithmKind::ExpAlgo && self.comm().ell_c == Radius::Unbounded;
        let target = Some(NodeId(self.n.saturating_sub(1)));
        match self.adversary {
            AdversaryKind::CtImpossibility => {
                plan.connectivity = Some(WindowCheck::Time(self.window));
                plan.target = target;
                plan.movement = true;
                plan.far_load = true;
            }
            AdversaryKind::CtPortFlip => {
                plan.connectivity = Some(WindowCheck::Time(self.window));
                plan.target = target;
                plan.tail_load = true;
            }
            AdversaryKind::IntervalFlip => {
                plan.connectivity = Some(WindowCheck::Interval(1));
                plan.diameter = Some(self.p());
                plan.target = target;
                plan.undispersed = true;
            }
            AdversaryKind::RandomCt | AdversaryKind::Replay => {
                plan.connectivity = Some(WindowCheck::Time(self.window));
                if exp {
                    plan.coverage = Some((self.window, self.c0));
                }
            }
        }
        plan.hole_dynamics = exp;
        plan
    }

    pub fn header(&self) -> Header {
        let mut h = Header::default();
        h.push("n", self.n);
        h.push("T", self.window);
        if let Some(p) = self.p {
            h.push("p", p);
        }
        if let Some(a) = self.agents {
            h.push("agents", a);
        }
        h.push("placement", self.placement());
        h.push("adversary", self.adversary);
        h.push("algorithm", self.algorithm);
        let comm = self.comm();
        h.push("ell_v", comm.ell_v);
        h.push("ell_c", comm.ell_c);
        h.push("rounds", self.rounds);
        h.push("seed", self.seed);
        h.push("c0", self.c0);
        h.push("ids", self.ids);
        h.push("keep_going", self.keep_going);
        if let Some(s) = self.settle {
            h.push("settle", s);
        }
        if let Some(p) = &self.script_path {
            h.push("script", p);
        }
        if let Some(p) = &self.schedule_path {
            h.push("schedule", p);
        }
        h
    }

    /// Rebuilds the run spec from a trace header. Script and schedule contents
    /// are not restored, only their paths.
    pub fn from_header(h: &Header) -> Result<Self, TraceError> {
        let mut s = RunSpec::new(h.require("n")?, h.require("adversary")?, h.require("algorithm")?);
        s.window = h.require("T")?;
        s.p = h.get("p").map(|_| h.require("p")).transpose()?;
        s.agents = h.get("agents").map(|_| h.require("agents")).transpose()?;
        s.placement = Some(h.require("placement")?);
        s.ell_v = Some(h.require("ell_v")?);
        s.ell_c = Some(h.require("ell_c")?);
        s.rounds = h.require("rounds")?;
        s.seed = h.require("seed")?;
        s.c0 = h.require("c0")?;
        s.ids = h.require("ids")?;
        s.keep_going = h.require("keep_going")?;
        s.settle = h.get("settle").map(|_| h.require("settle")).transpose()?;
        s.script_path = h.get("script").map(String::from);
        s.schedule_path = h.get("schedule").map(String::from);
        Ok(s)
    }
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error("configuration error: {0}")]
    Config(#[from] ConfigError),
    #[error("adversary failed: {0}")]
    Adversary(AdversaryError),
    #[error("{0}")]
    Step(#[from] crate::runtime::StepError),
    #[error("trace: {0}")]
    Trace(#[from] TraceError),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl From<AdversaryError> for RunError {
    fn from(e: AdversaryError) -> Self {
        match e {
            AdversaryError::Config(c) => RunError::Config(c),
            other => RunError::Adversary(other),
        }
    }
}

impl RunError {
    /// 2 for anything wrong with the inputs, 1 for failures during the run.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) | RunError::Trace(_) | RunError::Io(_) => 2,
            RunError::Adversary(_) | RunError::Step(_) => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub rounds_run: u64,
    /// One summary verdict per monitor.
    pub verdicts: Vec<Verdict>,
    /// Monitors that failed.
    pub failures: u64,
    pub converged_at: Option<u64>,
    pub covered_at: Option<u64>,
    pub unvisited: Vec<NodeId>,
    /// `(round, holes)` each time the hole count reaches a new low.
    pub hole_milestones: Vec<(u64, usize)>,
    pub final_holes: usize,
    pub max_diameter: usize,
    pub adversary: AdversaryStats,
    pub target_visited: bool,
}

impl RunSummary {
    pub fn exit_code(&self) -> i32 {
        i32::from(self.failures > 0)
    }
}

/// Receives trace records as they are produced.
pub trait TraceSink {
    fn record(&mut self, r: &Record) -> std::io::Result<()>;
}

impl TraceSink for Vec<Record> {
    fn record(&mut self, r: &Record) -> std::io::Result<()> {
        self.push(r.clone());
        Ok(())
    }
}

impl<T: TraceSink + ?Sized> TraceSink for &mut T {
    fn record(&mut self, r: &Record) -> std::io::Result<()> {
        (**self).record(r)
    }
}

/// Writes records as text lines.
pub struct TextSink<W: std::io::Write>(pub W);

impl<W: std::io::Write> TraceSink for TextSink<W> {
    fn record(&mut self, r: &Record) -> std::io::Result<()> {
        writeln!(self.0, "{}", encode(r))
    }
}

/// Discards everything.
pub struct NullSink;

impl TraceSink for NullSink {
    fn record(&mut self, _: &Record) -> std::io::Result<()> {
        Ok(())
    }
}

/// Keeps only the header and snapshots.
pub struct ScheduleSink<S: TraceSink>(pub S);

impl<S: TraceSink> TraceSink for ScheduleSink<S> {
    fn record(&mut self, r: &Record) -> std::io::Result<()> {
        match r {
            Record::Header(_) | Record::Snap(..) => self.0.record(r),
            _ => Ok(()),
        }
    }
}

/// Checks adversary and algorithm pairing before anything runs.
pub fn check_compatibility(spec: &RunSpec) -> Result<(), ConfigError> {
    let comm = spec.comm();
    let bad = |m: String| Err(ConfigError::Invalid(m));
    if spec.n < 2 {
        return bad(format!("n must be at least 2, got {}", spec.n));
    }
    match spec.adversary {
        AdversaryKind::CtPortFlip if comm.ell_v != Radius::Hops(0) => {
            return bad(format!("ct-portflip requires ell_v = 0, got {}", comm.ell_v));
        }
        AdversaryKind::IntervalFlip if spec.counts()?.iter().sum::<usize>() >= spec.n => {
            return bad("interval-flip needs fewer agents than nodes".into());
        }
        AdversaryKind::Replay if spec.schedule.is_none() => return bad("replay-file needs --schedule".into()),
        AdversaryKind::CtImpossibility | AdversaryKind::CtPortFlip | AdversaryKind::RandomCt if spec.window < 1 => {
            return bad("T must be at least 1".into());
        }
        _ => {}
    }
    if spec.algorithm == AlgorithmKind::Script && spec.script.is_none() {
        return bad("script algorithm needs --script".into());
    }
    Ok(())
}

/// Runs a spec, streaming its trace into `sink`.
pub fn run(spec: &RunSpec, sink: &mut dyn TraceSink) -> Result<RunSummary, RunError> {
    check_compatibility(spec)?;
    match spec.algorithm {
        AlgorithmKind::ExpAlgo => with_adversary(spec, &ExpAlgo, sink),
        AlgorithmKind::Stay => with_adversary(spec, &Stay, sink),
        AlgorithmKind::Greedy0Hop => with_adversary(spec, &GreedyZeroHop, sink),
        AlgorithmKind::Rotor0Hop => with_adversary(spec, &RotorZeroHop, sink),
        AlgorithmKind::PortShifter => with_adversary(spec, &PortShifter, sink),
        AlgorithmKind::LocalFill => with_adversary(spec, &LocalFill, sink),
        AlgorithmKind::FullGreedy => with_adversary(spec, &FullVisibilityGreedy, sink),
        AlgorithmKind::Script => {
            let script = spec.script.clone().expect("checked above");
            with_adversary(spec, &script, sink)
        }
    }
}

fn with_adversary<A: Algorithm>(spec: &RunSpec, alg: &A, sink: &mut dyn TraceSink) -> Result<RunSummary, RunError> {
    alg.accepts(&spec.comm())?;
    let n = spec.n;
    match spec.adversary {
        AdversaryKind::IntervalFlip => run_loop(spec, alg, IntervalFlip::new(n, spec.p())?, sink),
        AdversaryKind::CtImpossibility => run_loop(spec, alg, CtImpossibility::new(n, spec.window)?, sink),
        AdversaryKind::CtPortFlip => run_loop(spec, alg, CtPortFlip::new(n, spec.window)?, sink),
        AdversaryKind::RandomCt => run_loop(spec, alg, RandomCt::new(n, spec.window, spec.seed)?, sink),
        AdversaryKind::Replay => {
            let snaps = spec.schedule.clone().expect("checked above");
            if let Some(s) = snaps.iter().find(|s| s.n() != n) {
                return Err(ConfigError::Invalid(format!("schedule has {} nodes, n is {n}", s.n())).into());
            }
            run_loop(spec, alg, ReplaySchedule::new(snaps), sink)
        }
    }
}

fn run_loop<A: Algorithm, D: Adversary>(
    spec: &RunSpec,
    alg: &A,
    mut adversary: D,
    sink: &mut dyn TraceSink,
) -> Result<RunSummary, RunError> {
    let comm = spec.comm();
    let mut config = spec.initial()?;
    let mut memories: Memories<A::Memory> = Memories::new();
    let mut suite = MonitorSuite::new(spec.plan());
    let mut milestones = vec![(0, config.hole_count())];
    let mut target_visited = false;
    let target = NodeId(spec.n - 1);
    let mut covered_stop: Option<u64> = None;
    let mut visited = vec![false; spec.n];
    let mut covered_at = None;
    let mut converged_at = None;
    let mut note_visits = |round: u64, c: &Configuration| {
        for (v, x) in c.occupancies().into_iter().enumerate() {
            visited[v] |= x > 0;
        }
        if covered_at.is_none() && visited.iter().all(|&v| v) {
            covered_at = Some(round);
        }
        if converged_at.is_none() && c.hole_count() <= 1 {
            converged_at = Some(round);
        }
    };
    sink.record(&Record::Header(spec.header()))?;
    let mut round = 0;
    while round < spec.rounds {
        sink.record(&Record::Conf(round, config.clone()))?;
        note_visits(round, &config);
        let s = adversary.next_snapshot(round, &config, alg, &memories, &comm)?;
        let order = adversary.order();
        let out = step_round(round, &s, &config, &memories, alg, &comm)?;
        sink.record(&Record::Snap(round, s.clone()))?;
        if let Some(o) = &order {
            sink.record(&Record::Order(round, o.clone()))?;
        }
        for m in &out.moves {
            sink.record(&Record::Move(round, *m))?;
        }
        let check = suite.observe(&RoundRecord {
            round,
            snapshot: &s,
            before: &config,
            moves: &out.moves,
            after: &out.next,
            order: order.as_ref(),
        });
        if let Some(e) = suite.level_events() {
            if !e.is_empty() {
                sink.record(&Record::Event(round, e.clone()))?;
            }
        }
        for v in check.verdicts {
            sink.record(&Record::Verdict(v))?;
        }
        target_visited |= config.occupancy(target) > 0 || out.next.occupancy(target) > 0;
        config = out.next;
        memories = out.memories;
        round += 1;
        let holes = config.hole_count();
        if holes < milestones.last().expect("starts non-empty").1 {
            milestones.push((round, holes));
        }
        if check.failed && !spec.keep_going {
            break;
        }
        if let (Some(settle), Some(c)) = (spec.settle, suite.coverage()) {
            if let (Some(_), Some(cov)) = (c.converged_at(), c.covered_at()) {
                let stop = *covered_stop.get_or_insert(cov.max(c.converged_at().unwrap_or(0)) + settle);
                if round >= stop {
                    break;
                }
            }
        }
    }
    sink.record(&Record::Conf(round, config.clone()))?;
    note_visits(round, &config);
    let verdicts = suite.finish(&config);
    for v in &verdicts {
        sink.record(&Record::Verdict(v.clone()))?;
    }
    let failures = verdicts.iter().filter(|v| !v.pass).count() as u64;
    let unvisited = (0..spec.n).filter(|&v| !visited[v]).map(NodeId).collect();
    Ok(RunSummary {
        rounds_run: round,
        failures,
        verdicts,
        converged_at,
        covered_at,
        unvisited,
        hole_milestones: milestones,
        final_holes: config.hole_count(),
        max_diameter: suite.max_diameter(),
        adversary: adversary.stats(),
        target_visited,
    })
}

/// Result of re-checking a recorded trace.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplayReport {
    pub rounds: u64,
    pub verdicts: Vec<Verdict>,
    pub recorded: Vec<Verdict>,
    pub divergences: Vec<String>,
    pub failures: u64,
}

impl ReplayReport {
    pub fn exit_code(&self) -> i32 {
        i32::from(self.failures > 0 || !self.divergences.is_empty())
    }
}

/// Re-runs every monitor over the rounds recorded in `text` and compares
/// the verdicts with the recorded ones.
pub fn replay_trace(text: &str) -> Result<ReplayReport, TraceError> {
    let trace = Trace::parse(text)?;
    let spec = RunSpec::from_header(&trace.header)?;
    let (rounds, last) = trace.rounds()?;
    let mut suite = MonitorSuite::new(spec.plan());
    let mut verdicts = Vec::new();
    for r in &rounds {
        let check = suite.observe(&RoundRecord {
            round: r.round,
            snapshot: &r.snapshot,
            before: &r.before,
            moves: &r.moves,
            after: &r.after,
            order: r.order.as_ref(),
        });
        verdicts.extend(check.verdicts);
    }
    verdicts.extend(suite.finish(&last));
    let recorded = trace.verdicts();
    let mut divergences = Vec::new();
    for i in 0..verdicts.len().max(recorded.len()) {
        let (a, b) = (verdicts.get(i), recorded.get(i));
        if a != b {
            let show = |v: Option<&Verdict>| v.map_or("<none>".to_string(), |v| format!("{}|{v}", v.round));
            divergences.push(format!("verdict {i}: recomputed {} recorded {}", show(a), show(b)));
        }
    }
    let failures = verdicts.iter().filter(|v| !v.pass).count() as u64;
    Ok(ReplayReport { rounds: rounds.len() as u64, verdicts, recorded, divergences, failures })
}

/// Snapshots of a schedule file, in round order.
pub fn parse_schedule(text: &str) -> Result<(usize, Vec<Snapshot>), TraceError> {
    let trace = Trace::parse(text)?;
    let n = trace.header.require("n")?;
    let mut snaps: Vec<(u64, Snapshot)> = trace
        .records
        .into_iter()
        .filter_map(|r| match r {
            Record::Snap(k, s) => Some((k, s)),
            _ => None,
        })
        .collect();
    snaps.sort_by_key(|(k, _)| *k);
    for (i, (k, _)) in snaps.iter().enumerate() {
        if *k != i as u64 {
            return Err(TraceError::Incomplete(i as u64, "schedule round missing".into()));
        }
    }
    Ok((n, snaps.into_iter().map(|(_, s)| s).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trace::render;

    #[test]
    fn names_roundtrip() {
        for k in AdversaryKind::ALL {
            assert_eq!(k.to_string().parse::<AdversaryKind>().unwrap(), *k);
        }
        for k in AlgorithmKind::ALL {
            assert_eq!(k.to_string().parse::<AlgorithmKind>().unwrap(), *k);
        }
        for p in [
            Placement::C0,
            Placement::C0Prime,
            Placement::Dispersed,
            Placement::Packed,
            Placement::Custom(vec![1, 0, 2]),
        ] {
            assert_eq!(p.to_string().parse::<Placement>().unwrap(), p);
        }
    }

    #[test]
    fn header_roundtrip() {
        let mut s = RunSpec::new(9, AdversaryKind::IntervalFlip, AlgorithmKind::LocalFill);
        s.p = Some(6);
        s.settle = Some(4);
        let back = RunSpec::from_header(&s.header()).unwrap();
        assert_eq!(back.header(), s.header());
    }

    #[test]
    fn packed_counts() {
        let s = RunSpec::new(9, AdversaryKind::IntervalFlip, AlgorithmKind::LocalFill);
        assert_eq!(s.counts().unwrap(), vec![2, 1, 1, 1, 1, 1, 1, 0, 0]);
    }

    #[test]
    fn incompatible_pairings() {
        let mut s = RunSpec::new(6, AdversaryKind::CtPortFlip, AlgorithmKind::ExpAlgo);
        assert!(matches!(run(&s, &mut NullSink), Err(RunError::Config(_))));
        s.algorithm = AlgorithmKind::Stay;
        s.ell_v = Some(Radius::Hops(0));
        s.rounds = 10;
        assert!(run(&s, &mut NullSink).is_ok());
        let s = RunSpec::new(6, AdversaryKind::RandomCt, AlgorithmKind::FullGreedy);
        let mut s2 = s.clone();
        s2.ell_v = Some(Radius::Hops(2));
        assert_eq!(run(&s2, &mut NullSink).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn replay_matches_run() {
        let mut s = RunSpec::new(6, AdversaryKind::RandomCt, AlgorithmKind::ExpAlgo);
        s.seed = 3;
        s.rounds = 300;
        let mut recs = Vec::new();
        let summary = run(&s, &mut recs).unwrap();
        assert_eq!(summary.exit_code(), 0, "{:?}", summary.verdicts);
        let report = replay_trace(&render(&recs)).unwrap();
        assert!(report.divergences.is_empty(), "{:?}", report.divergences);
        assert_eq!(report.verdicts, report.recorded);
        assert!(report.verdicts.ends_with(&summary.verdicts));
    }
}
