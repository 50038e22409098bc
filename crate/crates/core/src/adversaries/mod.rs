//! Adaptive schedule generators. Each one fixes round `r`'s snapshot after
//! seeing the round-start configuration, and may pre-compute the agents'
//! reaction by running the deterministic algorithm on a copy of the state.

mod ct_impossibility;
mod ct_portflip;
mod interval_flip;
mod ordering;
mod paths;
mod random_ct;
mod replay;

use thiserror::Error;

pub use ct_impossibility::CtImpossibility;
pub use ct_portflip::CtPortFlip;
pub use interval_flip::{build_g1, build_g2, IntervalFlip};
pub use ordering::{order_for_interval, order_nodes_by_occupancy, pairs, Family, Notation, OrderingError};
pub use paths::{c0_counts, c0_prime_counts, PhaseClock};
pub use random_ct::RandomCt;
pub use replay::ReplaySchedule;

use crate::runtime::{step_round, Algorithm, CommSpec, ConfigError, Configuration, Memories, RoundOutcome, StepError};
use crate::tvg::{NodeId, Snapshot};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AdversaryError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Ordering(#[from] OrderingError),
    #[error("pre-computation failed: {0}")]
    WhatIf(#[from] StepError),
    #[error("recorded schedule ends before round {0}")]
    Exhausted(u64),
    #[error("round {round}: {detail}")]
    Invariant { round: u64, detail: String },
}

/// Counters reported at the end of a run.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AdversaryStats {
    /// Rounds in which the construction's precondition no longer held.
    pub conceded: u64,
    /// Rounds in which no candidate snapshot prevented the outcome it guards against.
    pub defeated: u64,
    /// Rounds in which the adversary deviated from its default snapshot.
    pub flips: u64,
    pub precomputations: u64,
    pub symmetry_checks: u64,
    pub symmetry_failures: u64,
}

/// Labels and family behind the current snapshot, for monitors and traces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderInfo {
    pub family: String,
    /// Path family in use; `None` for constructions without one.
    pub notation: Option<Notation>,
    /// Phase index, or for the interval construction 1 or 2 naming the graph emitted.
    pub phase: u64,
    pub boundary: bool,
    /// `w_1..w_n`
    pub labels: Vec<NodeId>,
}

/// A per-round snapshot source.
pub trait Adversary {
    fn name(&self) -> String;

    fn next_snapshot<A: Algorithm>(
        &mut self,
        round: u64,
        config: &Configuration,
        algorithm: &A,
        memories: &Memories<A::Memory>,
        spec: &CommSpec,
    ) -> Result<Snapshot, AdversaryError>;

    /// Labelling of the most recently emitted snapshot, if the construction has one.
    fn order(&self) -> Option<OrderInfo> {
        None
    }

    fn stats(&self) -> AdversaryStats;
}

/// Runs one round on a copy of the state. The copy is discarded.
pub fn what_if<A: Algorithm>(
    round: u64,
    s: &Snapshot,
    config: &Configuration,
    memories: &Memories<A::Memory>,
    algorithm: &A,
    spec: &CommSpec,
) -> Result<RoundOutcome<A::Memory>, StepError> {
    step_round(round, s, config, memories, algorithm, spec)
}
