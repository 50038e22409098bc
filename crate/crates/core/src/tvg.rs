//! Static node universe, per-round port-labelled snapshots, and the
//! connectivity properties of snapshot sequences.
//!
//! A [`Snapshot`] is stored as a list of [`PortEdge`]s so that malformed
//! labellings (as read back from a trace) can be represented and reported by
//! [`Snapshot::validate`] instead of being impossible to construct.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

/// Local port number at a node.
pub type Port = usize;

/// Index of a node in the static node set `0..n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub usize);

impl NodeId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// An undirected edge together with the port it occupies at each endpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PortEdge {
    pub u: NodeId,
    pub pu: Port,
    pub v: NodeId,
    pub pv: Port,
}

impl PortEdge {
    pub fn new(u: usize, pu: Port, v: usize, pv: Port) -> Self {
        Self { u: NodeId(u), pu, v: NodeId(v), pv }
    }

    /// Same edge with the smaller endpoint first.
    pub fn normalized(self) -> Self {
        if self.u <= self.v {
            self
        } else {
            Self { u: self.v, pu: self.pv, v: self.u, pv: self.pu }
        }
    }

    pub fn pair(self) -> (NodeId, NodeId) {
        let e = self.normalized();
        (e.u, e.v)
    }
}

impl fmt::Display for PortEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}:{},{}", self.u, self.v, self.pu, self.pv)
    }
}

/// First broken invariant found in a snapshot.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SnapshotViolation {
    #[error("node {node} is outside the node set of size {n}")]
    NodeOutOfRange { node: usize, n: usize },
    #[error("self-loop at node {node}")]
    SelfLoop { node: usize },
    #[error("parallel edges between {u} and {v}")]
    ParallelEdge { u: usize, v: usize },
    #[error("port {port} used twice at node {node}")]
    DuplicatePort { node: usize, port: Port },
    #[error("port {port} at node {node} is outside [0, {degree})")]
    PortOutOfRange { node: usize, port: Port, degree: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SnapshotParseError {
    #[error("malformed edge token `{0}`")]
    BadEdge(String),
}

/// One round's port-labelled undirected graph over the node set `0..n`.
///
/// Equality is structural: two snapshots are equal only when they have the
/// same edges *and* the same port labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Snapshot {
    n: usize,
    edges: Vec<PortEdge>,
    // (port, neighbour) pairs per node, sorted by port
    adjacency: Vec<Vec<(Port, NodeId)>>,
}

impl Snapshot {
    /// Builds a snapshot without checking any invariant.
    pub fn from_raw(n: usize, edges: impl IntoIterator<Item = PortEdge>) -> Self {
        let mut edges: Vec<PortEdge> = edges.into_iter().map(PortEdge::normalized).collect();
        edges.sort();
        let mut adjacency = vec![Vec::new(); n];
        for e in &edges {
            if e.u.0 < n {
                adjacency[e.u.0].push((e.pu, e.v));
            }
            if e.v.0 < n && e.v != e.u {
                adjacency[e.v.0].push((e.pv, e.u));
            }
        }
        for ports in &mut adjacency {
            ports.sort();
        }
        Self { n, edges, adjacency }
    }

    /// Builds and validates a snapshot.
    pub fn new(n: usize, edges: impl IntoIterator<Item = PortEdge>) -> Result<Self, SnapshotViolation> {
        let s = Self::from_raw(n, edges);
        s.validate()?;
        Ok(s)
    }

    pub fn empty(n: usize) -> Self {
        Self::from_raw(n, [])
    }

    /// Assigns ports at every node in the order its edges appear in `pairs`.
    pub fn from_pairs(n: usize, pairs: &[(usize, usize)]) -> Result<Self, SnapshotViolation> {
        let mut next = vec![0usize; n];
        let mut edges = Vec::with_capacity(pairs.len());
        for &(u, v) in pairs {
            for x in [u, v] {
                if x >= n {
                    return Err(SnapshotViolation::NodeOutOfRange { node: x, n });
                }
            }
            let (pu, pv) = (next[u], next[v]);
            next[u] += 1;
            next[v] += 1;
            edges.push(PortEdge::new(u, pu, v, pv));
        }
        Self::new(n, edges)
    }

    /// Assigns a uniformly random port permutation at every node,
    /// independently at the two endpoints of each edge.
    pub fn with_random_ports<R: Rng + ?Sized>(
        n: usize,
        pairs: &[(usize, usize)],
        rng: &mut R,
    ) -> Result<Self, SnapshotViolation> {
        let mut incident: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (i, &(u, v)) in pairs.iter().enumerate() {
            for x in [u, v] {
                if x >= n {
                    return Err(SnapshotViolation::NodeOutOfRange { node: x, n });
                }
            }
            incident[u].push(i);
            incident[v].push(i);
        }
        let mut port_at: BTreeMap<(usize, usize), Port> = BTreeMap::new();
        for (node, list) in incident.iter_mut().enumerate() {
            list.shuffle(rng);
            for (port, &edge) in list.iter().enumerate() {
                port_at.insert((edge, node), port);
            }
        }
        let edges =
            pairs.iter().enumerate().map(|(i, &(u, v))| PortEdge::new(u, port_at[&(i, u)], v, port_at[&(i, v)]));
        Self::new(n, edges)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Edges with the smaller endpoint first, sorted.
    pub fn edges(&self) -> &[PortEdge] {
        &self.edges
    }

    pub fn degree(&self, v: NodeId) -> usize {
        self.adjacency[v.0].len()
    }

    /// `(port, neighbour)` pairs at `v`, sorted by port.
    pub fn ports(&self, v: NodeId) -> &[(Port, NodeId)] {
        &self.adjacency[v.0]
    }

    pub fn neighbor(&self, v: NodeId, port: Port) -> Option<NodeId> {
        let ports = self.adjacency.get(v.0)?;
        match ports.get(port) {
            Some(&(p, u)) if p == port => Some(u),
            _ => ports.iter().find(|&&(p, _)| p == port).map(|&(_, u)| u),
        }
    }

    pub fn port_to(&self, v: NodeId, u: NodeId) -> Option<Port> {
        self.adjacency[v.0].iter().find(|&&(_, w)| w == u).map(|&(p, _)| p)
    }

    pub fn neighbors(&self, v: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.adjacency[v.0].iter().map(|&(_, u)| u)
    }

    /// Checks every snapshot invariant and reports the first one broken.
    pub fn validate(&self) -> Result<(), SnapshotViolation> {
        let n = self.n;
        let mut seen_pairs = BTreeSet::new();
        for e in &self.edges {
            for x in [e.u.0, e.v.0] {
                if x >= n {
                    return Err(SnapshotViolation::NodeOutOfRange { node: x, n });
                }
            }
            if e.u == e.v {
                return Err(SnapshotViolation::SelfLoop { node: e.u.0 });
            }
            if !seen_pairs.insert(e.pair()) {
                return Err(SnapshotViolation::ParallelEdge { u: e.u.0, v: e.v.0 });
            }
        }
        for (node, ports) in self.adjacency.iter().enumerate() {
            let degree = ports.len();
            for (i, &(port, _)) in ports.iter().enumerate() {
                if i > 0 && ports[i - 1].0 == port {
                    return Err(SnapshotViolation::DuplicatePort { node, port });
                }
                if port >= degree {
                    return Err(SnapshotViolation::PortOutOfRange { node, port, degree });
                }
            }
        }
        Ok(())
    }

    /// Unordered node pairs, without port labels.
    pub fn edge_pairs(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.edges.iter().map(|e| e.pair())
    }

    /// BFS hop distances from `src`; `None` for nodes in other components.
    pub fn distances_from(&self, src: NodeId) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n];
        let mut queue = VecDeque::new();
        dist[src.0] = Some(0);
        queue.push_back(src);
        while let Some(x) = queue.pop_front() {
            let d = dist[x.0].unwrap_or(0);
            for &(_, y) in &self.adjacency[x.0] {
                if dist[y.0].is_none() {
                    dist[y.0] = Some(d + 1);
                    queue.push_back(y);
                }
            }
        }
        dist
    }

    pub fn connected_components(&self) -> ComponentDecomposition {
        let mut component_of = vec![usize::MAX; self.n];
        let mut components = Vec::new();
        for start in 0..self.n {
            if component_of[start] != usize::MAX {
                continue;
            }
            let id = components.len();
            let mut nodes = vec![NodeId(start)];
            component_of[start] = id;
            let mut i = 0;
            while i < nodes.len() {
                let x = nodes[i];
                i += 1;
                for &(_, y) in &self.adjacency[x.0] {
                    if component_of[y.0] == usize::MAX {
                        component_of[y.0] = id;
                        nodes.push(y);
                    }
                }
            }
            nodes.sort();
            let diameter = nodes
                .iter()
                .map(|&x| self.distances_from(x).into_iter().flatten().max().unwrap_or(0))
                .max()
                .unwrap_or(0);
            components.push(Component { nodes, edges: Vec::new(), diameter });
        }
        for e in &self.edges {
            components[component_of[e.u.0]].edges.push(*e);
        }
        ComponentDecomposition { components, component_of }
    }

    pub fn is_connected(&self) -> bool {
        union_is_connected(self.n, self.edge_pairs())
    }

    /// Space-separated `u-v:pu,pv` tokens.
    pub fn encode_edges(&self) -> String {
        self.edges.iter().map(PortEdge::to_string).collect::<Vec<_>>().join(" ")
    }

    /// Parses [`Snapshot::encode_edges`] output. The result is not validated.
    pub fn decode_edges(n: usize, text: &str) -> Result<Self, SnapshotParseError> {
        let mut edges = Vec::new();
        for token in text.split_whitespace() {
            edges.push(parse_edge(token).ok_or_else(|| SnapshotParseError::BadEdge(token.into()))?);
        }
        Ok(Self::from_raw(n, edges))
    }
}

fn parse_edge(token: &str) -> Option<PortEdge> {
    let (nodes, ports) = token.split_once(':')?;
    let (u, v) = nodes.split_once('-')?;
    let (pu, pv) = ports.split_once(',')?;
    Some(PortEdge::new(u.parse().ok()?, pu.parse().ok()?, v.parse().ok()?, pv.parse().ok()?))
}

/// One maximal connected node set of a snapshot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    pub nodes: Vec<NodeId>,
    pub edges: Vec<PortEdge>,
    pub diameter: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentDecomposition {
    pub components: Vec<Component>,
    /// Component index of every node.
    pub component_of: Vec<usize>,
}

impl ComponentDecomposition {
    /// Largest component diameter. A disconnected snapshot is never infinite.
    pub fn max_diameter(&self) -> usize {
        self.components.iter().map(|c| c.diameter).max().unwrap_or(0)
    }

    pub fn component(&self, v: NodeId) -> &Component {
        &self.components[self.component_of[v.0]]
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Whether the graph `(0..n, pairs)` is connected.
pub fn union_is_connected(n: usize, pairs: impl IntoIterator<Item = (NodeId, NodeId)>) -> bool {
    if n <= 1 {
        return true;
    }
    let mut parent: Vec<usize> = (0..n).collect();
    let mut groups = n;
    for (a, b) in pairs {
        let (ra, rb) = (find(&mut parent, a.0), find(&mut parent, b.0));
        if ra != rb {
            parent[ra] = rb;
            groups -= 1;
        }
    }
    groups == 1
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WindowError {
    #[error("window must span at least one round")]
    Empty,
    #[error("window of {window} rounds is longer than the {history}-round history")]
    TooLong { window: usize, history: usize },
}

fn window_starts(history: &[Snapshot], window: usize) -> Result<usize, WindowError> {
    if window == 0 {
        return Err(WindowError::Empty);
    }
    if window > history.len() {
        return Err(WindowError::TooLong { window, history: history.len() });
    }
    Ok(history.len() - window + 1)
}

/// T-interval connectivity: every window of `window` rounds shares a
/// connected spanning subgraph.
pub fn check_interval_connectivity(history: &[Snapshot], window: usize) -> Result<bool, WindowError> {
    let starts = window_starts(history, window)?;
    let n = history[0].n();
    Ok((0..starts).all(|r| {
        let mut common: BTreeSet<(NodeId, NodeId)> = history[r].edge_pairs().collect();
        for s in &history[r + 1..r + window] {
            let here: BTreeSet<_> = s.edge_pairs().collect();
            common.retain(|e| here.contains(e));
        }
        union_is_connected(n, common)
    }))
}

/// First window start whose edge union is disconnected.
pub fn first_disconnected_union(history: &[Snapshot], window: usize) -> Result<Option<usize>, WindowError> {
    let starts = window_starts(history, window)?;
    let n = history[0].n();
    Ok((0..starts).find(|&r| !union_is_connected(n, history[r..r + window].iter().flat_map(|s| s.edge_pairs()))))
}

/// Connectivity Time property: the edge union of every window of `window`
/// consecutive rounds is connected.
pub fn check_connectivity_time(history: &[Snapshot], window: usize) -> Result<bool, WindowError> {
    first_disconnected_union(history, window).map(|r| r.is_none())
}

/// Largest per-round diameter over the history.
pub fn dynamic_diameter(history: &[Snapshot]) -> usize {
    history.iter().map(|s| s.connected_components().max_diameter()).max().unwrap_or(0)
}

/// A recorded snapshot sequence together with its connectivity window.
#[derive(Debug, Clone, Default)]
pub struct Schedule {
    pub window: usize,
    pub history: Vec<Snapshot>,
}

impl Schedule {
    pub fn new(window: usize) -> Self {
        Self { window, history: Vec::new() }
    }

    pub fn push(&mut self, s: Snapshot) {
        self.history.push(s);
    }

    pub fn interval_connected(&self) -> Result<bool, WindowError> {
        check_interval_connectivity(&self.history, self.window)
    }

    pub fn connectivity_time(&self) -> Result<bool, WindowError> {
        check_connectivity_time(&self.history, self.window)
    }

    pub fn dynamic_diameter(&self) -> usize {
        dynamic_diameter(&self.history)
    }
}

/// A connected set of occupied nodes after all holes are deleted from a
/// component, plus the ports of its nodes that lead to holes.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct OccupiedSubgraph {
    pub nodes: BTreeSet<NodeId>,
    pub edges: BTreeSet<PortEdge>,
    pub hole_ports: BTreeSet<(NodeId, Port)>,
}

/// The occupied subgraphs of one snapshot component.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentCc {
    pub component: usize,
    pub subgraphs: Vec<OccupiedSubgraph>,
    pub holes: Vec<NodeId>,
}

/// Deletes holes (and their incident edges) from every component and returns
/// the remaining connected pieces, each with its hole-port marks.
pub fn cc_without_holes(s: &Snapshot, occupancy: &[usize]) -> Vec<ComponentCc> {
    let decomposition = s.connected_components();
    let occupied = |v: NodeId| occupancy[v.0] > 0;
    let mut out = Vec::with_capacity(decomposition.components.len());
    for (ci, component) in decomposition.components.iter().enumerate() {
        let mut assigned: BTreeMap<NodeId, usize> = BTreeMap::new();
        let mut subgraphs: Vec<OccupiedSubgraph> = Vec::new();
        for &start in component.nodes.iter().filter(|&&v| occupied(v)) {
            if assigned.contains_key(&start) {
                continue;
            }
            let idx = subgraphs.len();
            let mut sub = OccupiedSubgraph::default();
            let mut stack = vec![start];
            assigned.insert(start, idx);
            while let Some(x) = stack.pop() {
                sub.nodes.insert(x);
                for &(port, y) in s.ports(x) {
                    if !occupied(y) {
                        sub.hole_ports.insert((x, port));
                    } else if let std::collections::btree_map::Entry::Vacant(slot) = assigned.entry(y) {
                        slot.insert(idx);
                        stack.push(y);
                    }
                }
            }
            subgraphs.push(sub);
        }
        for e in &component.edges {
            if occupied(e.u) && occupied(e.v) {
                subgraphs[assigned[&e.u]].edges.insert(*e);
            }
        }
        let holes = component.nodes.iter().copied().filter(|&v| !occupied(v)).collect();
        out.push(ComponentCc { component: ci, subgraphs, holes });
    }
    out
}
