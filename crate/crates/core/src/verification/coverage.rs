use std::collections::BTreeMap;

use crate::runtime::Configuration;

/// Join and leave counts of one round, keyed by occupancy level.
pub type LevelEvents = BTreeMap<usize, (u32, u32)>;

/// Visits, hole count and level membership over a run. Feed it the
/// configuration at the start of every round, then the final one.
#[derive(Debug, Clone)]
pub struct CoverageTracker {
    window: usize,
    ceiling: u64,
    first_visit: Vec<Option<u64>>,
    last_visit: Vec<Option<u64>>,
    prev: Option<Vec<usize>>,
    converged_at: Option<u64>,
    /// Consecutive empty rounds since convergence, per node.
    empty_run: Vec<u64>,
    rounds_seen: u64,
    pub joins: u64,
    pub leaves: u64,
    pub regressions: u64,
    pub gap_violations: u64,
    pub max_gap: u64,
    pub last_events: LevelEvents,
}

/// Problems found by one observation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoverageIssue {
    Regressed { holes: usize },
    Gap { node: usize, empty_rounds: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoverageStatus {
    Reached {
        converged: u64,
        covered: u64,
        ceiling: u64,
    },
    /// Not reached within the rounds run, which stay below the ceiling.
    Open {
        rounds: u64,
        ceiling: u64,
    },
    Exceeded {
        rounds: u64,
        ceiling: u64,
    },
}

/// `c0 * n^4 * T`, rounded down.
pub fn coverage_ceiling(n: usize, window: usize, c0: f64) -> u64 {
    (c0 * (n as f64).powi(4) * window as f64).floor() as u64
}

impl CoverageTracker {
    pub fn new(n: usize, window: usize, c0: f64) -> Self {
        Self {
            window,
            ceiling: coverage_ceiling(n, window, c0),
            first_visit: vec![None; n],
            last_visit: vec![None; n],
            prev: None,
            converged_at: None,
            empty_run: vec![0; n],
            rounds_seen: 0,
            joins: 0,
            leaves: 0,
            regressions: 0,
            gap_violations: 0,
            max_gap: 0,
            last_events: LevelEvents::new(),
        }
    }

    pub fn ceiling(&self) -> u64 {
        self.ceiling
    }

    pub fn converged_at(&self) -> Option<u64> {
        self.converged_at
    }

    /// Round by which every node had been visited.
    pub fn covered_at(&self) -> Option<u64> {
        self.first_visit.iter().try_fold(0, |acc, v| v.map(|r| acc.max(r)))
    }

    pub fn first_visit(&self) -> &[Option<u64>] {
        &self.first_visit
    }

    pub fn last_visit(&self) -> &[Option<u64>] {
        &self.last_visit
    }

    pub fn observe(&mut self, round: u64, config: &Configuration) -> Vec<CoverageIssue> {
        let occ = config.occupancies();
        let mut issues = Vec::new();
        self.rounds_seen = self.rounds_seen.max(round + 1);
        for (v, &c) in occ.iter().enumerate() {
            if c > 0 {
                self.first_visit[v].get_or_insert(round);
                self.last_visit[v] = Some(round);
            }
        }
        self.last_events.clear();
        if let Some(prev) = &self.prev {
            for (&was, &now) in prev.iter().zip(&occ) {
                if was != now {
                    self.last_events.entry(was).or_default().1 += 1;
                    self.last_events.entry(now).or_default().0 += 1;
                    self.joins += 1;
                    self.leaves += 1;
                }
            }
        }
        let holes = occ.iter().filter(|&&c| c == 0).count();
        match self.converged_at {
            None if holes <= 1 => self.converged_at = Some(round),
            Some(_) if holes > 1 => {
                self.regressions += 1;
                issues.push(CoverageIssue::Regressed { holes });
            }
            _ => {}
        }
        if self.converged_at.is_some() {
            for (v, &c) in occ.iter().enumerate() {
                if c > 0 {
                    self.empty_run[v] = 0;
                } else {
                    self.empty_run[v] += 1;
                    self.max_gap = self.max_gap.max(self.empty_run[v]);
                    if self.empty_run[v] == self.window as u64 + 1 {
                        self.gap_violations += 1;
                        issues.push(CoverageIssue::Gap { node: v, empty_rounds: self.empty_run[v] });
                    }
                }
            }
        }
        self.prev = Some(occ);
        issues
    }

    pub fn status(&self) -> CoverageStatus {
        match (self.converged_at, self.covered_at()) {
            (Some(c), Some(v)) if c <= self.ceiling && v <= self.ceiling => {
                CoverageStatus::Reached { converged: c, covered: v, ceiling: self.ceiling }
            }
            (Some(c), Some(v)) => CoverageStatus::Exceeded { rounds: c.max(v), ceiling: self.ceiling },
            _ if self.rounds_seen > self.ceiling => {
                CoverageStatus::Exceeded { rounds: self.rounds_seen, ceiling: self.ceiling }
            }
            _ => CoverageStatus::Open { rounds: self.rounds_seen, ceiling: self.ceiling },
        }
    }
}
