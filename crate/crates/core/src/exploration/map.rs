//! Map reconstruction from 1-hop views: each occupied node's min-id agent
//! describes its ports, and any agent holding all views of a component
//! rebuilds that component with its holes deleted.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::runtime::{visibility_region, AgentId, Configuration, PortTarget, Radius, VisibilityRegion};
use crate::tvg::{NodeId, Port, Snapshot};

/// One port of an occupied node: `(occupancy, owner, port, neighbour owner)`.
/// `neighbor_id` is `None` when the port leads to a hole.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ViewRecord {
    pub occupancy: usize,
    pub owner_id: AgentId,
    pub port: Port,
    pub neighbor_id: Option<AgentId>,
}

/// The records of one node together with its owner and occupancy, so an
/// isolated node still announces itself.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NodeView {
    pub owner: AgentId,
    pub occupancy: usize,
    pub records: Vec<ViewRecord>,
}

/// Builds the view of the observer's node from a region of radius at least 1.
/// Returns `None` when the node is empty.
pub fn view_from_region(region: &VisibilityRegion) -> Option<NodeView> {
    let own = region.own();
    let owner = *own.agents.first()?;
    let occupancy = own.agents.len();
    let records = own
        .ports
        .iter()
        .enumerate()
        .map(|(port, target)| ViewRecord {
            occupancy,
            owner_id: owner,
            port,
            neighbor_id: match target {
                PortTarget::Inside(j) => region.nodes[*j].agents.first().copied(),
                PortTarget::Outside => None,
            },
        })
        .collect();
    Some(NodeView { owner, occupancy, records })
}

/// Phase 1 at `node`: one record per port. Empty for an isolated node.
pub fn map_phase1(s: &Snapshot, config: &Configuration, node: NodeId) -> Vec<ViewRecord> {
    node_view(s, config, node).map(|v| v.records).unwrap_or_default()
}

pub fn node_view(s: &Snapshot, config: &Configuration, node: NodeId) -> Option<NodeView> {
    view_from_region(&visibility_region(s, config, node, Radius::Hops(1)))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MapError {
    #[error("two different views claim owner {0}")]
    ConflictingViews(AgentId),
    #[error("record of {owner} port {port} names {neighbor}, whose view is missing")]
    Dangling { owner: AgentId, port: Port, neighbor: AgentId },
    #[error("record of {owner} port {port} names {neighbor}, which never points back")]
    OneSided { owner: AgentId, port: Port, neighbor: AgentId },
    #[error("no path from {0} to {1}")]
    Unreachable(AgentId, AgentId),
    #[error("{0} is not a node of the map")]
    UnknownNode(AgentId),
}

/// An edge between two owners, smaller id first, with both port labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MapEdge {
    pub a: AgentId,
    pub pa: Port,
    pub b: AgentId,
    pub pb: Port,
}

impl MapEdge {
    pub fn new(x: AgentId, px: Port, y: AgentId, py: Port) -> Self {
        if x <= y {
            Self { a: x, pa: px, b: y, pb: py }
        } else {
            Self { a: y, pa: py, b: x, pb: px }
        }
    }
}

/// Occupied nodes (named by owner id) with their occupancies, the edges
/// between them, and the ports that lead to holes.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ReconstructedMap {
    pub nodes: BTreeMap<AgentId, usize>,
    pub edges: BTreeSet<MapEdge>,
    pub hole_ports: BTreeSet<(AgentId, Port)>,
}

impl ReconstructedMap {
    /// `(port, neighbour)` lists per node, sorted by port.
    pub fn adjacency(&self) -> BTreeMap<AgentId, Vec<(Port, AgentId)>> {
        let mut adj: BTreeMap<AgentId, Vec<(Port, AgentId)>> = self.nodes.keys().map(|&k| (k, Vec::new())).collect();
        for e in &self.edges {
            adj.entry(e.a).or_default().push((e.pa, e.b));
            adj.entry(e.b).or_default().push((e.pb, e.a));
        }
        for list in adj.values_mut() {
            list.sort();
        }
        adj
    }

    /// Nodes connected to `start` within the map.
    pub fn component_of(&self, start: AgentId) -> BTreeSet<AgentId> {
        let adj = self.adjacency();
        let mut seen = BTreeSet::from([start]);
        let mut stack = vec![start];
        while let Some(x) = stack.pop() {
            for &(_, y) in adj.get(&x).map(Vec::as_slice).unwrap_or(&[]) {
                if seen.insert(y) {
                    stack.push(y);
                }
            }
        }
        seen
    }

    /// The sub-map induced on `keep`.
    pub fn restrict(&self, keep: &BTreeSet<AgentId>) -> Self {
        Self {
            nodes: self.nodes.iter().filter(|(k, _)| keep.contains(k)).map(|(&k, &v)| (k, v)).collect(),
            edges: self.edges.iter().filter(|e| keep.contains(&e.a) && keep.contains(&e.b)).copied().collect(),
            hole_ports: self.hole_ports.iter().filter(|(k, _)| keep.contains(k)).copied().collect(),
        }
    }

    pub fn has_multinode(&self) -> bool {
        self.nodes.values().any(|&c| c >= 2)
    }

    pub fn min_hole_port(&self, node: AgentId) -> Option<Port> {
        self.hole_ports.range((node, 0)..=(node, Port::MAX)).next().map(|&(_, p)| p)
    }

    /// Owners of nodes with at least one hole port, ascending.
    pub fn hole_adjacent(&self) -> BTreeSet<AgentId> {
        self.hole_ports.iter().map(|&(k, _)| k).collect()
    }

    pub fn port_towards(&self, from: AgentId, to: AgentId) -> Option<Port> {
        self.edges.iter().find_map(|e| {
            if e.a == from && e.b == to {
                Some(e.pa)
            } else if e.b == from && e.a == to {
                Some(e.pb)
            } else {
                None
            }
        })
    }
}

/// Phase 2: rebuilds the hole-free pieces of one component from the views
/// of all its occupied nodes.
pub fn map_phase2<'a>(views: impl IntoIterator<Item = &'a NodeView>) -> Result<ReconstructedMap, MapError> {
    let mut by_owner: BTreeMap<AgentId, &NodeView> = BTreeMap::new();
    for view in views {
        if let Some(prev) = by_owner.insert(view.owner, view) {
            if prev != view {
                return Err(MapError::ConflictingViews(view.owner));
            }
        }
    }
    let mut map =
        ReconstructedMap { nodes: by_owner.iter().map(|(&k, v)| (k, v.occupancy)).collect(), ..Default::default() };
    for view in by_owner.values() {
        for r in &view.records {
            let Some(neighbor) = r.neighbor_id else {
                map.hole_ports.insert((r.owner_id, r.port));
                continue;
            };
            let Some(other) = by_owner.get(&neighbor) else {
                return Err(MapError::Dangling { owner: r.owner_id, port: r.port, neighbor });
            };
            let back = other.records.iter().find(|q| q.neighbor_id == Some(r.owner_id));
            let Some(back) = back else {
                return Err(MapError::OneSided { owner: r.owner_id, port: r.port, neighbor });
            };
            map.edges.insert(MapEdge::new(r.owner_id, r.port, neighbor, back.port));
        }
    }
    Ok(map)
}
