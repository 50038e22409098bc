//! Connectivity time against zero-hop visibility with any communication,
//! by agent counts. Starts from `n - i - 1` agents on `v_i` and keeps `v_n`
//! unvisited forever.

use crate::runtime::{Algorithm, CommSpec, ConfigError, Configuration, Memories};
use crate::tvg::Snapshot;

use super::ordering::{Family, Notation};
use super::paths::{c0_counts, PathLayout, PhaseClock};
use super::{Adversary, AdversaryError, AdversaryStats, OrderInfo};

#[derive(Debug, Clone)]
pub struct CtImpossibility {
    window: usize,
    clock: PhaseClock,
    layout: PathLayout,
    stats: AdversaryStats,
    last: Option<OrderInfo>,
    tail_agents: usize,
}

impl CtImpossibility {
    pub fn new(n: usize, window: usize) -> Result<Self, ConfigError> {
        if n < 4 || !n.is_multiple_of(2) {
            return Err(ConfigError::Invalid(format!("ct-impossibility needs an even n >= 4, got {n}")));
        }
        if window < 2 {
            return Err(ConfigError::Invalid(format!("ct-impossibility needs T >= 2, got {window}")));
        }
        Ok(Self {
            window,
            clock: PhaseClock::new(window),
            layout: PathLayout::new(n, Family::Standard),
            stats: AdversaryStats::default(),
            last: None,
            tail_agents: 0,
        })
    }

    pub fn window(&self) -> usize {
        self.window
    }

    fn tail_count(&self, occ: &[usize]) -> usize {
        occ[self.layout.far().0] + occ[self.layout.mid().0] + occ[self.layout.target().0]
    }
}

impl Adversary for CtImpossibility {
    fn name(&self) -> String {
        "ct-impossibility".into()
    }

    fn next_snapshot<A: Algorithm>(
        &mut self,
        round: u64,
        config: &Configuration,
        _algorithm: &A,
        _memories: &Memories<A::Memory>,
        _spec: &CommSpec,
    ) -> Result<Snapshot, AdversaryError> {
        let n = self.layout.n;
        if config.n() != n {
            return Err(ConfigError::Invalid(format!("configuration has {} nodes, adversary {n}", config.n())).into());
        }
        if round == 0 && !self.layout.matches_start(config, &c0_counts(n)) {
            return Err(ConfigError::Invalid("ct-impossibility must start from C0".into()).into());
        }
        let occ = config.occupancies();
        let phase = self.clock.phase(round);
        let boundary = self.clock.is_boundary(round);
        if boundary {
            if phase % 2 == 1 {
                self.layout.switch_to_n2(&occ);
                self.tail_agents = self.tail_count(&occ);
            } else {
                self.layout.switch_to_n1(&occ);
            }
        } else if self.layout.notation == Notation::N2 {
            let now = self.tail_count(&occ);
            if now != self.tail_agents {
                return Err(AdversaryError::Invariant {
                    round,
                    detail: format!("tail held {} agents at the phase start, {now} now", self.tail_agents),
                });
            }
            let (far, mid) = (occ[self.layout.far().0], occ[self.layout.mid().0]);
            if mid > 0 && far == 0 {
                self.layout.swap_tail();
                self.stats.flips += 1;
            } else if mid > 0 {
                self.stats.conceded += 1;
            }
        }
        self.last = Some(OrderInfo {
            family: Family::Standard.to_string(),
            notation: Some(self.layout.notation),
            phase,
            boundary,
            labels: self.layout.labels.clone(),
        });
        Ok(self.layout.snapshot())
    }

    fn order(&self) -> Option<OrderInfo> {
        self.last.clone()
    }

    fn stats(&self) -> AdversaryStats {
        self.stats.clone()
    }
}
