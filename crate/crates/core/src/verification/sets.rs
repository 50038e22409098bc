use crate::tvg::NodeId;

/// Agent count the exploration result is stated for: `(n-2)(n-1)/2 + 1`.
pub fn exploration_agents(n: usize) -> usize {
    (n.saturating_sub(2)) * (n.saturating_sub(1)) / 2 + 1
}

/// Nodes grouped by occupancy: `sets[i]` holds every node with `i` agents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SSetPartition {
    pub l: usize,
    pub sets: Vec<Vec<NodeId>>,
}

impl SSetPartition {
    pub fn new(occupancy: &[usize]) -> Self {
        let l = exploration_agents(occupancy.len());
        let top = occupancy.iter().copied().max().unwrap_or(0).max(l);
        let mut sets = vec![Vec::new(); top + 1];
        for (v, &c) in occupancy.iter().enumerate() {
            sets[c].push(NodeId(v));
        }
        Self { l, sets }
    }

    pub fn size(&self, i: usize) -> usize {
        self.sets.get(i).map_or(0, Vec::len)
    }

    /// Largest non-empty index.
    pub fn max_level(&self) -> usize {
        self.sets.iter().rposition(|s| !s.is_empty()).unwrap_or(0)
    }

    pub fn node_count(&self) -> usize {
        self.sets.iter().map(Vec::len).sum()
    }

    pub fn agent_count(&self) -> usize {
        self.sets.iter().enumerate().map(|(i, s)| i * s.len()).sum()
    }
}

/// With at least two holes, two consecutive non-empty levels `i < j` with
/// `j >= i + 2`. Returns the lowest such pair.
pub fn check_gap_condition(p: &SSetPartition) -> Option<(usize, usize)> {
    if p.size(0) < 2 {
        return None;
    }
    let levels: Vec<usize> = (0..p.sets.len()).filter(|&i| p.size(i) > 0).collect();
    levels.windows(2).find(|w| w[1] >= w[0] + 2).map(|w| (w[0], w[1]))
}

/// Most agents a placement can hold when its levels `1..=L` are packed
/// without gaps next to two holes: `L(2n-L-3)/2`.
pub fn check_agent_bound(level: usize, n: usize) -> usize {
    assert!(level >= 1 && level + 2 <= n, "level {level} outside [1, n-2] for n={n}");
    let x = level * (2 * n - level - 3) / 2;
    assert!(x <= (n - 2) * (n - 1) / 2, "bound {x} exceeds (n-2)(n-1)/2 for n={n}");
    x
}
