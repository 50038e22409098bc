//! Synchronous Communicate-Compute-Move engine.
//!
//! Every decision of a round is computed against the frozen round-start
//! state; all moves are then applied together.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::Rng;
use thiserror::Error;

use crate::tvg::{NodeId, Port, Snapshot};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AgentId(pub u64);

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Ids `1..=count`.
pub fn sequential_ids(count: usize) -> Vec<AgentId> {
    (1..=count as u64).map(AgentId).collect()
}

/// `count` distinct ids drawn uniformly from `[1, n^2]`, in ascending order.
pub fn random_ids<R: Rng + ?Sized>(count: usize, n: usize, rng: &mut R) -> Result<Vec<AgentId>, ConfigError> {
    let range = n * n;
    if count > range {
        return Err(ConfigError::Invalid(format!("cannot draw {count} distinct ids from [1, {range}]")));
    }
    let mut ids: Vec<AgentId> = sample(rng, range, count).iter().map(|i| AgentId(i as u64 + 1)).collect();
    ids.sort();
    Ok(ids)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("agent {0} placed twice")]
    DuplicateAgent(AgentId),
    #[error("{algorithm} does not support {spec}: {reason}")]
    Unsupported { algorithm: String, spec: CommSpec, reason: String },
    #[error("{0}")]
    Invalid(String),
}

/// Per-node sorted multiset of agents. Node `v` holds `placement[v]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Configuration {
    placement: Vec<Vec<AgentId>>,
}

impl Configuration {
    pub fn new(mut placement: Vec<Vec<AgentId>>) -> Result<Self, ConfigError> {
        let mut seen = BTreeSet::new();
        for ids in &mut placement {
            ids.sort();
            for &a in ids.iter() {
                if !seen.insert(a) {
                    return Err(ConfigError::DuplicateAgent(a));
                }
            }
        }
        Ok(Self { placement })
    }

    /// Hands out `ids` in order: node 0 gets the first `counts[0]`, and so on.
    pub fn from_counts(counts: &[usize], ids: &[AgentId]) -> Result<Self, ConfigError> {
        let total: usize = counts.iter().sum();
        if total != ids.len() {
            return Err(ConfigError::Invalid(format!(
                "placement holds {total} agents but {} ids were given",
                ids.len()
            )));
        }
        let mut rest = ids;
        let mut placement = Vec::with_capacity(counts.len());
        for &c in counts {
            let (here, tail) = rest.split_at(c);
            placement.push(here.to_vec());
            rest = tail;
        }
        Self::new(placement)
    }

    pub fn from_counts_sequential(counts: &[usize]) -> Self {
        let ids = sequential_ids(counts.iter().sum());
        Self::from_counts(counts, &ids).expect("sequential ids are distinct")
    }

    pub fn n(&self) -> usize {
        self.placement.len()
    }

    pub fn agents_at(&self, v: NodeId) -> &[AgentId] {
        &self.placement[v.0]
    }

    pub fn occupancy(&self, v: NodeId) -> usize {
        self.placement[v.0].len()
    }

    pub fn occupancies(&self) -> Vec<usize> {
        self.placement.iter().map(Vec::len).collect()
    }

    pub fn min_id_at(&self, v: NodeId) -> Option<AgentId> {
        self.placement[v.0].first().copied()
    }

    pub fn total(&self) -> usize {
        self.placement.iter().map(Vec::len).sum()
    }

    pub fn is_dispersed(&self) -> bool {
        self.placement.iter().all(|ids| ids.len() <= 1)
    }

    pub fn holes(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.n()).map(NodeId).filter(|&v| self.placement[v.0].is_empty())
    }

    pub fn hole_count(&self) -> usize {
        self.placement.iter().filter(|ids| ids.is_empty()).count()
    }

    /// `(agent, node)` pairs sorted by agent id.
    pub fn agents(&self) -> Vec<(AgentId, NodeId)> {
        let mut out: Vec<_> =
            self.placement.iter().enumerate().flat_map(|(v, ids)| ids.iter().map(move |&a| (a, NodeId(v)))).collect();
        out.sort();
        out
    }

    pub fn placement(&self) -> &[Vec<AgentId>] {
        &self.placement
    }

    /// Applies recorded moves. Fails if a mover is not at its stated source.
    pub fn apply_moves(&self, moves: &[MoveRecord]) -> Result<Self, String> {
        let mut placement = self.placement.clone();
        for m in moves {
            if m.from.0 >= placement.len() || m.to.0 >= placement.len() {
                return Err(format!("agent {} moves outside the node set", m.agent));
            }
            let Some(i) = placement[m.from.0].iter().position(|&a| a == m.agent) else {
                return Err(format!("agent {} is not at node {}", m.agent, m.from));
            };
            placement[m.from.0].remove(i);
        }
        for m in moves {
            placement[m.to.0].push(m.agent);
        }
        Self::new(placement).map_err(|e| e.to_string())
    }
}

/// A hop radius; `Unbounded` covers the agent's whole current component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Radius {
    Hops(usize),
    Unbounded,
}

impl Radius {
    pub fn covers(self, distance: usize) -> bool {
        match self {
            Radius::Hops(h) => distance <= h,
            Radius::Unbounded => true,
        }
    }
}

impl fmt::Display for Radius {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Radius::Hops(h) => write!(f, "{h}"),
            Radius::Unbounded => f.write_str("global"),
        }
    }
}

impl FromStr for Radius {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "global" | "full" | "inf" => Ok(Radius::Unbounded),
            other => other.parse().map(Radius::Hops).map_err(|_| format!("bad radius `{s}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CommSpec {
    pub ell_c: Radius,
    pub ell_v: Radius,
}

impl CommSpec {
    pub fn new(ell_v: Radius, ell_c: Radius) -> Self {
        Self { ell_c, ell_v }
    }
}

impl fmt::Display for CommSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ell_v={} ell_c={}", self.ell_v, self.ell_c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MoveDecision {
    Stay,
    Port(Port),
}

/// Where a port of a visible node leads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PortTarget {
    /// Another node of the region, by local index.
    Inside(usize),
    /// A node beyond the visibility radius.
    Outside,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RegionNode {
    pub distance: usize,
    pub agents: Vec<AgentId>,
    /// Indexed by port number.
    pub ports: Vec<PortTarget>,
}

/// What an agent sees. Node 0 is the agent's own node; the other local
/// indices come from a BFS that scans ports in increasing order, so the
/// region carries no global node identity.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VisibilityRegion {
    pub nodes: Vec<RegionNode>,
}

impl VisibilityRegion {
    pub fn own(&self) -> &RegionNode {
        &self.nodes[0]
    }

    pub fn degree(&self) -> usize {
        self.nodes[0].ports.len()
    }

    pub fn occupancy(&self) -> usize {
        self.nodes[0].agents.len()
    }
}

/// BFS ball of radius `ell_v` around `node` within its component.
pub fn visibility_region(s: &Snapshot, config: &Configuration, node: NodeId, ell_v: Radius) -> VisibilityRegion {
    let mut local: BTreeMap<NodeId, usize> = BTreeMap::new();
    let mut order = vec![(node, 0usize)];
    local.insert(node, 0);
    let mut i = 0;
    while i < order.len() {
        let (x, d) = order[i];
        i += 1;
        if !ell_v.covers(d + 1) {
            continue;
        }
        for &(_, y) in s.ports(x) {
            if let std::collections::btree_map::Entry::Vacant(e) = local.entry(y) {
                e.insert(order.len());
                order.push((y, d + 1));
            }
        }
    }
    let nodes = order
        .iter()
        .map(|&(x, distance)| RegionNode {
            distance,
            agents: config.agents_at(x).to_vec(),
            ports: s
                .ports(x)
                .iter()
                .map(|(_, y)| local.get(y).map_or(PortTarget::Outside, |&j| PortTarget::Inside(j)))
                .collect(),
        })
        .collect();
    VisibilityRegion { nodes }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Envelope<M> {
    pub sender: AgentId,
    pub message: M,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{0}")]
pub struct AlgorithmError(pub String);

/// A deterministic agent algorithm. `communicate` produces the agent's
/// outgoing message from its round-start view; `compute` then sees the
/// delivered inbox and returns the move and the agent's next memory.
pub trait Algorithm {
    type Memory: Clone + Default + fmt::Debug;
    type Message: Clone + fmt::Debug + PartialEq;

    fn name(&self) -> String;

    fn accepts(&self, _spec: &CommSpec) -> Result<(), ConfigError> {
        Ok(())
    }

    fn communicate(&self, agent: AgentId, memory: &Self::Memory, region: &VisibilityRegion) -> Option<Self::Message>;

    fn compute(
        &self,
        agent: AgentId,
        memory: &Self::Memory,
        region: &VisibilityRegion,
        inbox: &[Envelope<Self::Message>],
    ) -> Result<(MoveDecision, Self::Memory), AlgorithmError>;
}

pub type Memories<M> = BTreeMap<AgentId, M>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MoveRecord {
    pub agent: AgentId,
    pub from: NodeId,
    pub port: Port,
    pub to: NodeId,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StepError {
    #[error("round {round}: agent {agent} chose port {port} at a node of degree {degree}")]
    InvalidPort { round: u64, agent: AgentId, port: Port, degree: usize },
    #[error("round {round}: agent {agent}: {source}")]
    Algorithm { round: u64, agent: AgentId, source: AlgorithmError },
}

#[derive(Debug, Clone)]
pub struct RoundOutcome<M> {
    pub next: Configuration,
    pub memories: Memories<M>,
    /// Sorted by agent id.
    pub moves: Vec<MoveRecord>,
}

/// For every node, the nodes whose agents' messages reach it.
fn reach_sets(s: &Snapshot, config: &Configuration, ell_c: Radius) -> Vec<Vec<NodeId>> {
    let occupied: Vec<NodeId> = (0..s.n()).map(NodeId).filter(|&v| config.occupancy(v) > 0).collect();
    let mut out = vec![Vec::new(); s.n()];
    for &v in &occupied {
        let dist = s.distances_from(v);
        out[v.0] = occupied.iter().copied().filter(|u| dist[u.0].is_some_and(|d| ell_c.covers(d))).collect();
    }
    out
}

/// Routes each agent's outgoing message to every agent within `ell_c` hops
/// in the same component. The sender is not included; inboxes are sorted by
/// sender id.
pub fn deliver_messages<M: Clone>(
    s: &Snapshot,
    config: &Configuration,
    outboxes: &BTreeMap<AgentId, M>,
    ell_c: Radius,
) -> BTreeMap<AgentId, Vec<Envelope<M>>> {
    let reach = reach_sets(s, config, ell_c);
    let mut inboxes = BTreeMap::new();
    for (agent, node) in config.agents() {
        let mut inbox: Vec<Envelope<M>> = reach[node.0]
            .iter()
            .flat_map(|&u| config.agents_at(u).iter())
            .filter(|&&sender| sender != agent)
            .filter_map(|&sender| outboxes.get(&sender).map(|m| Envelope { sender, message: m.clone() }))
            .collect();
        inbox.sort_by_key(|e| e.sender);
        inboxes.insert(agent, inbox);
    }
    inboxes
}

/// Regions and inboxes of every agent, as seen in the Compute step.
pub struct Observations<M> {
    pub regions: BTreeMap<NodeId, VisibilityRegion>,
    pub inboxes: BTreeMap<AgentId, Vec<Envelope<M>>>,
}

/// Runs the Communicate step only.
pub fn observe<A: Algorithm>(
    s: &Snapshot,
    config: &Configuration,
    memories: &Memories<A::Memory>,
    algorithm: &A,
    spec: &CommSpec,
) -> Observations<A::Message> {
    let mut regions = BTreeMap::new();
    for v in (0..s.n()).map(NodeId).filter(|&v| config.occupancy(v) > 0) {
        regions.insert(v, visibility_region(s, config, v, spec.ell_v));
    }
    let default = A::Memory::default();
    let mut outboxes = BTreeMap::new();
    for (agent, node) in config.agents() {
        let memory = memories.get(&agent).unwrap_or(&default);
        if let Some(m) = algorithm.communicate(agent, memory, &regions[&node]) {
            outboxes.insert(agent, m);
        }
    }
    let inboxes = deliver_messages(s, config, &outboxes, spec.ell_c);
    Observations { regions, inboxes }
}

/// One synchronous CCM round.
pub fn step_round<A: Algorithm>(
    round: u64,
    s: &Snapshot,
    config: &Configuration,
    memories: &Memories<A::Memory>,
    algorithm: &A,
    spec: &CommSpec,
) -> Result<RoundOutcome<A::Memory>, StepError> {
    let obs = observe(s, config, memories, algorithm, spec);
    let default = A::Memory::default();
    let mut next_memories = BTreeMap::new();
    let mut moves = Vec::new();
    for (agent, node) in config.agents() {
        let memory = memories.get(&agent).unwrap_or(&default);
        let (decision, memory) = algorithm
            .compute(agent, memory, &obs.regions[&node], &obs.inboxes[&agent])
            .map_err(|source| StepError::Algorithm { round, agent, source })?;
        next_memories.insert(agent, memory);
        if let MoveDecision::Port(port) = decision {
            let to =
                s.neighbor(node, port).ok_or(StepError::InvalidPort { round, agent, port, degree: s.degree(node) })?;
            moves.push(MoveRecord { agent, from: node, port, to });
        }
    }
    let next = config.apply_moves(&moves).expect("moves were derived from this configuration");
    Ok(RoundOutcome { next, memories: next_memories, moves })
}
