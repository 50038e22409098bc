//! Monitors that check a run round by round. They only read the recorded
//! state, so the same suite runs inline and over a replayed trace.

mod coverage;
mod monitors;
mod sets;

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

pub use coverage::{coverage_ceiling, CoverageIssue, CoverageStatus, CoverageTracker, LevelEvents};
pub use monitors::{
    check_conservation, check_movement_inequality, far_load_holds, monitor_hole_dynamics, movement_violation,
    tail_load_holds, HoleViolation,
};
pub use sets::{check_agent_bound, check_gap_condition, exploration_agents, SSetPartition};

use crate::adversaries::{order_nodes_by_occupancy, Family, Notation, OrderInfo};
use crate::runtime::{Configuration, MoveRecord};
use crate::tvg::{check_connectivity_time, check_interval_connectivity, NodeId, Snapshot};

/// Failures kept per monitor in the verdict stream; later ones are only counted.
pub const VERDICT_CAP: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WindowCheck {
    /// Edge intersection over every window of `T` rounds is connected.
    Interval(usize),
    /// Edge union over every window of `T` rounds is connected.
    Time(usize),
}

/// Which monitors a run enables.
#[derive(Debug, Clone, PartialEq)]
pub struct MonitorPlan {
    pub n: usize,
    pub connectivity: Option<WindowCheck>,
    /// Every snapshot's largest component diameter.
    pub diameter: Option<usize>,
    /// A node that must never hold an agent.
    pub target: Option<NodeId>,
    pub undispersed: bool,
    pub movement: bool,
    pub far_load: bool,
    pub tail_load: bool,
    pub hole_dynamics: bool,
    /// `(T, c0)` for the convergence and coverage ceiling.
    pub coverage: Option<(usize, f64)>,
}

impl MonitorPlan {
    pub fn basic(n: usize) -> Self {
        Self {
            n,
            connectivity: None,
            diameter: None,
            target: None,
            undispersed: false,
            movement: false,
            far_load: false,
            tail_load: false,
            hole_dynamics: false,
            coverage: None,
        }
    }

    /// Monitor names in report order.
    pub fn monitors(&self) -> Vec<&'static str> {
        let mut out = vec!["snapshot", "conservation"];
        let flags = [
            (self.connectivity.is_some(), "connectivity"),
            (self.diameter.is_some(), "diameter"),
            (self.target.is_some(), "target"),
            (self.undispersed, "undispersed"),
            (self.movement, "movement"),
            (self.far_load, "far-load"),
            (self.tail_load, "tail-load"),
            (self.hole_dynamics, "holes"),
            (self.coverage.is_some(), "coverage"),
        ];
        out.extend(flags.iter().filter(|(on, _)| *on).map(|(_, name)| *name));
        out
    }
}

/// Everything recorded about one round.
#[derive(Debug, Clone, Copy)]
pub struct RoundRecord<'a> {
    pub round: u64,
    pub snapshot: &'a Snapshot,
    pub before: &'a Configuration,
    pub moves: &'a [MoveRecord],
    pub after: &'a Configuration,
    pub order: Option<&'a OrderInfo>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub round: u64,
    pub monitor: String,
    pub pass: bool,
    pub detail: String,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.pass { "pass" } else { "fail" };
        write!(f, "{}|{}|{}", self.monitor, status, self.detail)
    }
}

#[derive(Debug, Clone, Default)]
struct Tally {
    checks: u64,
    failures: u64,
    first_failure: Option<u64>,
}

pub struct MonitorSuite {
    plan: MonitorPlan,
    tallies: BTreeMap<&'static str, Tally>,
    window: VecDeque<Snapshot>,
    coverage: Option<CoverageTracker>,
    max_diameter: usize,
    last_round: Option<u64>,
}

/// Result of checking one round.
#[derive(Debug, Clone, Default)]
pub struct RoundCheck {
    /// Failures to append to the verdict stream, capped per monitor.
    pub verdicts: Vec<Verdict>,
    pub failed: bool,
}

impl MonitorSuite {
    pub fn new(plan: MonitorPlan) -> Self {
        let coverage = plan.coverage.map(|(t, c0)| CoverageTracker::new(plan.n, t, c0));
        let tallies = plan.monitors().into_iter().map(|m| (m, Tally::default())).collect();
        Self { plan, tallies, window: VecDeque::new(), coverage, max_diameter: 0, last_round: None }
    }

    pub fn plan(&self) -> &MonitorPlan {
        &self.plan
    }

    pub fn coverage(&self) -> Option<&CoverageTracker> {
        self.coverage.as_ref()
    }

    pub fn max_diameter(&self) -> usize {
        self.max_diameter
    }

    pub fn failures(&self, monitor: &str) -> u64 {
        self.tallies.get(monitor).map_or(0, |t| t.failures)
    }

    pub fn checks(&self, monitor: &str) -> u64 {
        self.tallies.get(monitor).map_or(0, |t| t.checks)
    }

    pub fn total_failures(&self) -> u64 {
        self.tallies.values().map(|t| t.failures).sum()
    }

    fn record(&mut self, out: &mut RoundCheck, round: u64, monitor: &'static str, result: Result<(), String>) {
        let tally = self.tallies.get_mut(monitor).expect("monitor is enabled");
        tally.checks += 1;
        if let Err(detail) = result {
            tally.failures += 1;
            tally.first_failure.get_or_insert(round);
            out.failed = true;
            if tally.failures <= VERDICT_CAP as u64 {
                out.verdicts.push(Verdict { round, monitor: monitor.into(), pass: false, detail });
            }
        }
    }

    pub fn observe(&mut self, rec: &RoundRecord<'_>) -> RoundCheck {
        let mut out = RoundCheck::default();
        let n = self.plan.n;
        let r = rec.round;
        self.last_round = Some(r);
        let s = rec.snapshot;

        let valid = if s.n() != n {
            Err(format!("snapshot has {} nodes, expected {n}", s.n()))
        } else {
            s.validate().map_err(|e| e.to_string())
        };
        self.record(&mut out, r, "snapshot", valid);
        let conserved = check_conservation(s, rec.before, rec.moves, rec.after);
        self.record(&mut out, r, "conservation", conserved);

        if let Some(check) = self.plan.connectivity {
            let t = match check {
                WindowCheck::Interval(t) | WindowCheck::Time(t) => t,
            };
            self.window.push_back(s.clone());
            while self.window.len() > t {
                self.window.pop_front();
            }
            if self.window.len() == t {
                let w = self.window.make_contiguous();
                let ok = match check {
                    WindowCheck::Interval(_) => check_interval_connectivity(w, t),
                    WindowCheck::Time(_) => check_connectivity_time(w, t),
                };
                let ok = ok.map_err(|e| e.to_string()).and_then(|ok| {
                    if ok {
                        Ok(())
                    } else {
                        Err(format!("window ending at round {r} is not connected"))
                    }
                });
                self.record(&mut out, r, "connectivity", ok);
            }
        }

        let d = s.connected_components().max_diameter();
        self.max_diameter = self.max_diameter.max(d);
        if let Some(p) = self.plan.diameter {
            let ok = if d == p && s.is_connected() { Ok(()) } else { Err(format!("diameter {d}, expected {p}")) };
            self.record(&mut out, r, "diameter", ok);
        }

        if let Some(target) = self.plan.target {
            let mut seen = rec.after.occupancy(target);
            if r == 0 {
                seen += rec.before.occupancy(target);
            }
            let ok = if seen == 0 { Ok(()) } else { Err(format!("node {target} visited")) };
            self.record(&mut out, r, "target", ok);
        }

        if self.plan.undispersed {
            let dispersed = rec.after.is_dispersed() || (r == 0 && rec.before.is_dispersed());
            let ok = if dispersed { Err("configuration dispersed".into()) } else { Ok(()) };
            self.record(&mut out, r, "undispersed", ok);
        }

        if let Some(order) = rec.order {
            self.check_order(&mut out, rec, order);
        }

        if self.plan.hole_dynamics {
            let v = monitor_hole_dynamics(s, rec.before, rec.after);
            let ok = if v.is_empty() {
                Ok(())
            } else {
                Err(v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))
            };
            self.record(&mut out, r, "holes", ok);
        }

        self.observe_coverage(&mut out, r, rec.before);
        out
    }

    fn check_order(&mut self, out: &mut RoundCheck, rec: &RoundRecord<'_>, order: &OrderInfo) {
        let r = rec.round;
        let n = self.plan.n;
        let Some(notation) = order.notation else { return };
        if order.labels.len() != n {
            return;
        }
        if self.plan.movement {
            let family: Family = order.family.parse().unwrap_or(Family::Standard);
            let ok = order_nodes_by_occupancy(&order.labels, &rec.before.occupancies(), notation, family)
                .map_err(|e| e.to_string())
                .and_then(|w| match movement_violation(rec.before, &w, n) {
                    None => Ok(()),
                    Some(l) => Err(format!("prefix {l} below the start placement")),
                });
            self.record(out, r, "movement", ok);
        }
        let odd_switch = order.boundary && notation == Notation::N2;
        if odd_switch && self.plan.far_load {
            let far = order.labels[n - 3];
            let ok = if far_load_holds(rec.before, &order.labels) {
                Ok(())
            } else {
                Err(format!("w_(n-2) = node {far} holds {}", rec.before.occupancy(far)))
            };
            self.record(out, r, "far-load", ok);
        }
        if odd_switch && self.plan.tail_load {
            let ok = if tail_load_holds(rec.before, &order.labels) {
                Ok(())
            } else {
                let held: usize = order.labels[n - 3..].iter().map(|&v| rec.before.occupancy(v)).sum();
                Err(format!("tail holds {held} agents"))
            };
            self.record(out, r, "tail-load", ok);
        }
    }

    fn observe_coverage(&mut self, out: &mut RoundCheck, round: u64, config: &Configuration) {
        let Some(tracker) = self.coverage.as_mut() else { return };
        let issues = tracker.observe(round, config);
        let results: Vec<Result<(), String>> = if issues.is_empty() {
            vec![Ok(())]
        } else {
            issues
                .iter()
                .map(|i| {
                    Err(match i {
                        CoverageIssue::Regressed { holes } => format!("{holes} holes after convergence"),
                        CoverageIssue::Gap { node, empty_rounds } => {
                            format!("node {node} empty for {empty_rounds} rounds")
                        }
                    })
                })
                .collect()
        };
        for res in results {
            self.record(out, round, "coverage", res);
        }
    }

    /// Join and leave counts of the last observed round, if coverage is tracked.
    pub fn level_events(&self) -> Option<&LevelEvents> {
        self.coverage.as_ref().map(|c| &c.last_events)
    }

    /// Observes the final configuration and returns one summary verdict per monitor.
    pub fn finish(&mut self, final_config: &Configuration) -> Vec<Verdict> {
        let end = self.last_round.map_or(0, |r| r + 1);
        let mut out = RoundCheck::default();
        self.observe_coverage(&mut out, end, final_config);
        let mut verdicts = out.verdicts;
        let ceiling_result = self.coverage.as_ref().map(|c| c.status());
        for name in self.plan.monitors() {
            let t = self.tallies[name].clone();
            let mut detail = format!("checks={} failures={}", t.checks, t.failures);
            if let Some(r) = t.first_failure {
                detail.push_str(&format!(" first={r}"));
            }
            let mut pass = t.failures == 0;
            if name == "coverage" {
                let tracker = self.coverage.as_ref().expect("coverage is enabled");
                match ceiling_result.clone().expect("coverage is enabled") {
                    CoverageStatus::Reached { converged, covered, ceiling } => {
                        detail.push_str(&format!(" converged={converged} covered={covered} ceiling={ceiling}"))
                    }
                    CoverageStatus::Open { rounds, ceiling } => {
                        detail.push_str(&format!(" open rounds={rounds} ceiling={ceiling}"));
                        if let Some(c) = tracker.converged_at() {
                            detail.push_str(&format!(" converged={c}"));
                        }
                    }
                    CoverageStatus::Exceeded { rounds, ceiling } => {
                        pass = false;
                        detail.push_str(&format!(" exceeded rounds={rounds} ceiling={ceiling}"));
                    }
                }
                detail.push_str(&format!(" max_gap={} joins={}", tracker.max_gap, tracker.joins));
            }
            if name == "diameter" {
                detail.push_str(&format!(" max={}", self.max_diameter));
            }
            verdicts.push(Verdict { round: end, monitor: name.into(), pass, detail });
        }
        verdicts
    }
}
