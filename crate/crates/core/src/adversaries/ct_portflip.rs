//! Connectivity time against zero-hop visibility, by port flipping. Starts
//! from the agent-count start plus one agent on `v_{n-1}`; whenever the
//! middle tail node is occupied the adversary pre-computes the round and
//! swaps that node's ports if an agent would otherwise step onto `v_n`.

use crate::runtime::{Algorithm, CommSpec, ConfigError, Configuration, Memories, Radius};
use crate::tvg::Snapshot;

use super::ordering::{Family, Notation};
use super::paths::{c0_prime_counts, PathLayout, PhaseClock};
use super::{what_if, Adversary, AdversaryError, AdversaryStats, OrderInfo};

#[derive(Debug, Clone)]
pub struct CtPortFlip {
    clock: PhaseClock,
    layout: PathLayout,
    stats: AdversaryStats,
    last: Option<OrderInfo>,
}

impl CtPortFlip {
    pub fn new(n: usize, window: usize) -> Result<Self, ConfigError> {
        if n < 4 || !n.is_multiple_of(2) {
            return Err(ConfigError::Invalid(format!("ct-portflip needs an even n >= 4, got {n}")));
        }
        if window < 2 {
            return Err(ConfigError::Invalid(format!("ct-portflip needs T >= 2, got {window}")));
        }
        Ok(Self {
            clock: PhaseClock::new(window),
            layout: PathLayout::new(n, Family::PortFlip),
            stats: AdversaryStats::default(),
            last: None,
        })
    }

    fn reaches_target<A: Algorithm>(
        &self,
        round: u64,
        s: &Snapshot,
        config: &Configuration,
        algorithm: &A,
        memories: &Memories<A::Memory>,
        spec: &CommSpec,
    ) -> Result<bool, AdversaryError> {
        let out = what_if(round, s, config, memories, algorithm, spec)?;
        Ok(out.next.occupancy(self.layout.target()) > 0)
    }
}

impl Adversary for CtPortFlip {
    fn name(&self) -> String {
        "ct-portflip".into()
    }

    fn next_snapshot<A: Algorithm>(
        &mut self,
        round: u64,
        config: &Configuration,
        algorithm: &A,
        memories: &Memories<A::Memory>,
        spec: &CommSpec,
    ) -> Result<Snapshot, AdversaryError> {
        let n = self.layout.n;
        if config.n() != n {
            return Err(ConfigError::Invalid(format!("configuration has {} nodes, adversary {n}", config.n())).into());
        }
        if round == 0 {
            if spec.ell_v != Radius::Hops(0) {
                return Err(ConfigError::Unsupported {
                    algorithm: algorithm.name(),
                    spec: *spec,
                    reason: "the port-flip construction only covers ell_v = 0".into(),
                }
                .into());
            }
            if !self.layout.matches_start(config, &c0_prime_counts(n)) {
                return Err(ConfigError::Invalid("ct-portflip must start from C0'".into()).into());
            }
        }
        let occ = config.occupancies();
        let phase = self.clock.phase(round);
        let boundary = self.clock.is_boundary(round);
        if boundary {
            if phase % 2 == 1 {
                self.layout.switch_to_n2(&occ);
            } else {
                self.layout.switch_to_n1(&occ);
            }
        } else if self.layout.notation == Notation::N2 {
            self.layout.flipped = false;
            if occ[self.layout.far().0] < occ[self.layout.mid().0] {
                self.layout.swap_tail();
            }
        }
        if self.layout.notation == Notation::N2 && occ[self.layout.mid().0] > 0 {
            self.stats.precomputations += 1;
            let s = self.layout.snapshot();
            if self.reaches_target(round, &s, config, algorithm, memories, spec)? {
                self.layout.flipped = true;
                self.stats.flips += 1;
                let s = self.layout.snapshot();
                self.stats.precomputations += 1;
                if self.reaches_target(round, &s, config, algorithm, memories, spec)? {
                    self.stats.defeated += 1;
                }
            }
        }
        self.last = Some(OrderInfo {
            family: Family::PortFlip.to_string(),
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
