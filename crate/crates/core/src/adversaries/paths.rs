//! The path families shared by the two connectivity-time constructions.
//!
//! Nodes are tracked through labels `w_1..w_n` (stored 0-based); `w_n` is
//! always the node the agents must never reach. In the one-length family
//! (N1) consecutive labels are paired; at a switch to N2 every pair's
//! smaller node is joined to the next pair's larger node, and the last
//! smaller node heads the tail `w_{n-2} ~ w_{n-1} ~ w_n`.

use crate::runtime::Configuration;
use crate::tvg::{NodeId, PortEdge, Snapshot};

use super::ordering::{Family, Notation};

/// `n - i - 1` agents on `v_i` for `i <= n-2`, none on the last two nodes.
pub fn c0_counts(n: usize) -> Vec<usize> {
    (0..n).map(|x| if x + 2 < n { n - x - 2 } else { 0 }).collect()
}

/// Like [`c0_counts`] with one extra agent on `v_{n-1}`.
pub fn c0_prime_counts(n: usize) -> Vec<usize> {
    let mut c = c0_counts(n);
    c[n - 2] = 1;
    c
}

/// Round-to-phase map. Phase `i` covers rounds `[i(T-1), (i+1)(T-1) - 1]`,
/// so every window of `T` rounds holds a switch together with the round
/// before it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PhaseClock {
    period: u64,
}

impl PhaseClock {
    pub fn new(window: usize) -> Self {
        assert!(window >= 2, "phases need a window of at least two rounds");
        Self { period: window as u64 - 1 }
    }

    pub fn phase(&self, round: u64) -> u64 {
        round / self.period
    }

    /// First round of a phase other than phase 0.
    pub fn is_boundary(&self, round: u64) -> bool {
        round >= self.period && round.is_multiple_of(self.period)
    }
}

#[derive(Debug, Clone)]
pub(crate) struct PathLayout {
    pub n: usize,
    pub labels: Vec<NodeId>,
    pub notation: Notation,
    pub family: Family,
    /// Whether the middle tail node's ports are swapped so port 0 leads to `w_n`.
    pub flipped: bool,
}

fn larger_first(occ: &[usize], a: NodeId, b: NodeId) -> (NodeId, NodeId) {
    if occ[a.0] >= occ[b.0] {
        (a, b)
    } else {
        (b, a)
    }
}

impl PathLayout {
    pub fn new(n: usize, family: Family) -> Self {
        Self { n, labels: (0..n).map(NodeId).collect(), notation: Notation::N1, family, flipped: false }
    }

    pub fn far(&self) -> NodeId {
        self.labels[self.n - 3]
    }

    pub fn mid(&self) -> NodeId {
        self.labels[self.n - 2]
    }

    pub fn target(&self) -> NodeId {
        self.labels[self.n - 1]
    }

    pub fn swap_tail(&mut self) {
        self.labels.swap(self.n - 3, self.n - 2);
    }

    /// N1 to N2, from the end-of-round counts of the last N1 round.
    pub fn switch_to_n2(&mut self, occ: &[usize]) {
        debug_assert_eq!(self.notation, Notation::N1);
        let (n, k) = (self.n, self.n / 2);
        let pair = |j: usize| larger_first(occ, self.labels[2 * j - 2], self.labels[2 * j - 1]);
        let mut next = Vec::with_capacity(n);
        let (large1, mut carry) = pair(1);
        next.push(large1);
        for j in 2..k {
            let (large, small) = pair(j);
            next.push(carry);
            next.push(large);
            carry = small;
        }
        next.push(carry);
        next.push(self.labels[n - 2]);
        next.push(self.labels[n - 1]);
        self.labels = next;
        self.notation = Notation::N2;
        self.flipped = false;
    }

    /// N2 to N1. The tail node holding more agents (the far one on a tie)
    /// joins the last pair.
    pub fn switch_to_n1(&mut self, occ: &[usize]) {
        debug_assert_eq!(self.notation, Notation::N2);
        let (n, k) = (self.n, self.n / 2);
        let (x, y) = larger_first(occ, self.far(), self.mid());
        let mut next = Vec::with_capacity(n);
        let mut small = self.labels[0];
        for j in 2..k {
            let (large, s) = larger_first(occ, self.labels[2 * j - 3], self.labels[2 * j - 2]);
            next.push(small);
            next.push(large);
            small = s;
        }
        next.push(small);
        next.push(x);
        next.push(y);
        next.push(self.labels[n - 1]);
        self.labels = next;
        self.notation = Notation::N1;
        self.flipped = false;
    }

    pub fn snapshot(&self) -> Snapshot {
        let (n, k) = (self.n, self.n / 2);
        let w = &self.labels;
        let link = |a: NodeId, pa: usize, b: NodeId, pb: usize| PortEdge { u: a, pu: pa, v: b, pv: pb };
        let mut edges = Vec::with_capacity(n);
        match self.notation {
            Notation::N1 => {
                let count = if self.family == Family::Standard { k } else { k - 1 };
                for j in 0..count {
                    edges.push(link(w[2 * j], 0, w[2 * j + 1], 0));
                }
            }
            Notation::N2 => {
                for j in 2..k {
                    edges.push(link(w[2 * j - 3], 0, w[2 * j - 2], 0));
                }
                let (to_far, to_target) = if self.flipped { (1, 0) } else { (0, 1) };
                edges.push(link(self.far(), 0, self.mid(), to_far));
                edges.push(link(self.mid(), to_target, self.target(), 0));
            }
        }
        Snapshot::new(n, edges).expect("path layouts are valid snapshots")
    }

    pub fn matches_start(&self, config: &Configuration, expected: &[usize]) -> bool {
        config.occupancies() == expected
    }
}
