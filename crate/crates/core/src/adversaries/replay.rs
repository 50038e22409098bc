use crate::runtime::{Algorithm, CommSpec, Configuration, Memories};
use crate::tvg::Snapshot;

use super::{Adversary, AdversaryError, AdversaryStats};

/// Plays back a recorded schedule, ignoring the agents.
#[derive(Debug, Clone)]
pub struct ReplaySchedule {
    snapshots: Vec<Snapshot>,
}

impl ReplaySchedule {
    pub fn new(snapshots: Vec<Snapshot>) -> Self {
        Self { snapshots }
    }

    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }
}

impl Adversary for ReplaySchedule {
    fn name(&self) -> String {
        "replay".into()
    }

    fn next_snapshot<A: Algorithm>(
        &mut self,
        round: u64,
        _config: &Configuration,
        _algorithm: &A,
        _memories: &Memories<A::Memory>,
        _spec: &CommSpec,
    ) -> Result<Snapshot, AdversaryError> {
        self.snapshots.get(round as usize).cloned().ok_or(AdversaryError::Exhausted(round))
    }

    fn stats(&self) -> AdversaryStats {
        AdversaryStats::default()
    }
}
