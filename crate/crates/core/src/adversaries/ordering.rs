use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::tvg::NodeId;

/// Which path family is currently laid out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Notation {
    /// One-length paths `w_{2j-1} ~ w_{2j}`.
    N1,
    /// `w_1` alone, pairs `w_{2j-2} ~ w_{2j-1}`, and the tail `w_{n-2} ~ w_{n-1} ~ w_n`.
    N2,
}

/// The agent-count construction, or the port-flip variant where `w_{n-1}`
/// and `w_n` are singletons in the one-length family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Standard,
    PortFlip,
}

impl fmt::Display for Notation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Notation::N1 => "N1",
            Notation::N2 => "N2",
        })
    }
}

impl FromStr for Notation {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "N1" => Ok(Notation::N1),
            "N2" => Ok(Notation::N2),
            _ => Err(format!("unknown notation `{s}`")),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Standard => "agents",
            Family::PortFlip => "portflip",
        })
    }
}

impl FromStr for Family {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "agents" => Ok(Family::Standard),
            "portflip" => Ok(Family::PortFlip),
            _ => Err(format!("unknown family `{s}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrderingError {
    #[error("path families need an even node count of at least 4, got {0}")]
    BadNodeCount(usize),
    #[error("{labels} labels for {occupancy} occupancy values")]
    LengthMismatch { labels: usize, occupancy: usize },
    #[error("labels are not a permutation of the node set")]
    NotPermutation,
}

/// Label positions (0-based) of the swappable pairs in a family.
pub fn pairs(n: usize, notation: Notation, family: Family) -> Vec<(usize, usize)> {
    let k = n / 2;
    match (notation, family) {
        (Notation::N1, Family::Standard) => (0..k).map(|j| (2 * j, 2 * j + 1)).collect(),
        (Notation::N1, Family::PortFlip) => (0..k - 1).map(|j| (2 * j, 2 * j + 1)).collect(),
        (Notation::N2, fam) => {
            let mut out: Vec<_> = (2..k).map(|j| (2 * j - 3, 2 * j - 2)).collect();
            if fam == Family::PortFlip {
                out.push((n - 3, n - 2));
            }
            out
        }
    }
}

/// Orders the labelled nodes `w_1..w_n` so that in each pair the node with
/// more agents comes first. A tie keeps label order; unpaired positions stay.
pub fn order_nodes_by_occupancy(
    labels: &[NodeId],
    occupancy: &[usize],
    notation: Notation,
    family: Family,
) -> Result<Vec<NodeId>, OrderingError> {
    let n = labels.len();
    if n < 4 || !n.is_multiple_of(2) {
        return Err(OrderingError::BadNodeCount(n));
    }
    if occupancy.len() != n {
        return Err(OrderingError::LengthMismatch { labels: n, occupancy: occupancy.len() });
    }
    let mut seen = vec![false; n];
    for v in labels {
        if v.0 >= n || std::mem::replace(&mut seen[v.0], true) {
            return Err(OrderingError::NotPermutation);
        }
    }
    let mut out = labels.to_vec();
    for (a, b) in pairs(n, notation, family) {
        if occupancy[out[a].0] < occupancy[out[b].0] {
            out.swap(a, b);
        }
    }
    Ok(out)
}

/// Non-increasing occupancy with ties by node index, and `target` last.
pub fn order_for_interval(occupancy: &[usize], target: NodeId) -> Vec<NodeId> {
    let mut out: Vec<NodeId> = (0..occupancy.len()).map(NodeId).filter(|&v| v != target).collect();
    out.sort_by_key(|v| (std::cmp::Reverse(occupancy[v.0]), v.0));
    out.push(target);
    out
}
