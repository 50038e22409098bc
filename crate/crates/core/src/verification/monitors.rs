use std::collections::BTreeSet;
use std::fmt;

use crate::runtime::{Configuration, MoveRecord};
use crate::tvg::{NodeId, Snapshot};

/// Prefix sums of `ordering`'s occupancies dominate those of the start
/// placement `n - i - 1`, for every prefix length in `[1, n-2]`.
pub fn check_movement_inequality(config: &Configuration, ordering: &[NodeId], n: usize) -> bool {
    movement_violation(config, ordering, n).is_none()
}

/// First prefix length at which the inequality fails.
pub fn movement_violation(config: &Configuration, ordering: &[NodeId], n: usize) -> Option<usize> {
    let (mut have, mut need) = (0usize, 0usize);
    for l in 1..=n.saturating_sub(2) {
        have += config.occupancy(ordering[l - 1]);
        need += n - l - 1;
        if have < need {
            return Some(l);
        }
    }
    None
}

/// At most one agent on `w_{n-2}` when the one-length family is switched out.
pub fn far_load_holds(config: &Configuration, labels: &[NodeId]) -> bool {
    config.occupancy(labels[labels.len() - 3]) <= 1
}

/// At most two agents on the tail `w_{n-2} ~ w_{n-1} ~ w_n`.
pub fn tail_load_holds(config: &Configuration, labels: &[NodeId]) -> bool {
    let n = labels.len();
    labels[n - 3..].iter().map(|&v| config.occupancy(v)).sum::<usize>() <= 2
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HoleViolation {
    /// A component with a hole and a multinode did not lose a hole.
    NoFill { component: Vec<NodeId>, before: usize, after: usize },
    /// An unbalanced hole-free component did not move exactly one unit from a max node to a min node.
    NoTransfer { component: Vec<NodeId> },
    /// A balanced hole-free component changed.
    Unsettled { component: Vec<NodeId> },
    /// A node emptied outside the allowed case.
    NewHole { node: NodeId, occupancy: usize },
}

impl fmt::Display for HoleViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |c: &[NodeId]| c.iter().map(|v| v.0.to_string()).collect::<Vec<_>>().join(",");
        match self {
            HoleViolation::NoFill { component, before, after } => {
                write!(f, "component {{{}}} holes {before} -> {after}", list(component))
            }
            HoleViolation::NoTransfer { component } => {
                write!(f, "component {{{}}} missed its transfer", list(component))
            }
            HoleViolation::Unsettled { component } => write!(f, "balanced component {{{}}} changed", list(component)),
            HoleViolation::NewHole { node, occupancy } => write!(f, "node {node} emptied from {occupancy} agents"),
        }
    }
}

/// Checks one round transition against the per-component hole rules of the
/// exploration algorithm: fills where a hole meets a multinode, one max-to-min
/// transfer where no hole exists, and holes only created by singletons
/// stepping out in multinode-free components.
pub fn monitor_hole_dynamics(s: &Snapshot, before: &Configuration, after: &Configuration) -> Vec<HoleViolation> {
    let (b, a) = (before.occupancies(), after.occupancies());
    let mut out = Vec::new();
    let parts = s.connected_components();
    for comp in &parts.components {
        let nodes = &comp.nodes;
        let holes_before = nodes.iter().filter(|v| b[v.0] == 0).count();
        let holes_after = nodes.iter().filter(|v| a[v.0] == 0).count();
        let multinode = nodes.iter().any(|v| b[v.0] >= 2);
        if holes_before > 0 && multinode {
            if holes_after >= holes_before {
                out.push(HoleViolation::NoFill { component: nodes.clone(), before: holes_before, after: holes_after });
            }
        } else if holes_before == 0 {
            let hi = nodes.iter().map(|v| b[v.0]).max().unwrap_or(0);
            let lo = nodes.iter().map(|v| b[v.0]).min().unwrap_or(0);
            let diff: Vec<i64> = nodes.iter().map(|v| a[v.0] as i64 - b[v.0] as i64).collect();
            if hi >= lo + 2 {
                let losers: Vec<usize> = (0..nodes.len()).filter(|&i| diff[i] < 0).collect();
                let gainers: Vec<usize> = (0..nodes.len()).filter(|&i| diff[i] > 0).collect();
                let ok = losers.len() == 1
                    && gainers.len() == 1
                    && diff[losers[0]] == -1
                    && diff[gainers[0]] == 1
                    && b[nodes[losers[0]].0] == hi
                    && b[nodes[gainers[0]].0] == lo;
                if !ok {
                    out.push(HoleViolation::NoTransfer { component: nodes.clone() });
                }
            } else if diff.iter().any(|&d| d != 0) {
                out.push(HoleViolation::Unsettled { component: nodes.clone() });
            }
        }
        for &v in nodes {
            if b[v.0] > 0 && a[v.0] == 0 && !(b[v.0] == 1 && holes_before > 0 && !multinode) {
                out.push(HoleViolation::NewHole { node: v, occupancy: b[v.0] });
            }
        }
    }
    out
}

/// Moves agree with the snapshot and turn `before` into `after`.
pub fn check_conservation(
    s: &Snapshot,
    before: &Configuration,
    moves: &[MoveRecord],
    after: &Configuration,
) -> Result<(), String> {
    if before.total() != after.total() {
        return Err(format!("agent count {} -> {}", before.total(), after.total()));
    }
    let mut seen = BTreeSet::new();
    for m in moves {
        if !seen.insert(m.agent) {
            return Err(format!("agent {} moved twice", m.agent));
        }
        if !before.agents_at(m.from).contains(&m.agent) {
            return Err(format!("agent {} is not on node {}", m.agent, m.from));
        }
        if s.neighbor(m.from, m.port) != Some(m.to) {
            return Err(format!("port {} of node {} does not lead to {}", m.port, m.from, m.to));
        }
    }
    match before.apply_moves(moves) {
        Ok(expected) if &expected == after => Ok(()),
        Ok(_) => Err("recorded configuration differs from the moves".into()),
        Err(e) => Err(e),
    }
}
