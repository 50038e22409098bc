//! 1-interval connectivity with dynamic diameter `p` against visibility
//! radius below `ceil(p/2) - 1`. Nodes are ordered by occupancy with `v_n`
//! last; the adversary emits `G1` unless the agents would disperse on it,
//! in which case it emits `G2`. Both graphs look the same around the middle
//! of the spine, so agents there cannot tell them apart.

use crate::runtime::{observe, Algorithm, CommSpec, ConfigError, Configuration, Memories, Radius};
use crate::tvg::{NodeId, PortEdge, Snapshot};

use super::ordering::order_for_interval;
use super::{what_if, Adversary, AdversaryError, AdversaryStats, OrderInfo};

fn check_shape(n: usize, p: usize) -> Result<(), ConfigError> {
    if n < 7 {
        return Err(ConfigError::Invalid(format!("interval-flip needs n >= 7, got {n}")));
    }
    if p < 6 || p > n - 1 {
        return Err(ConfigError::Invalid(format!("interval-flip needs 6 <= p <= n-1, got p={p} for n={n}")));
    }
    Ok(())
}

/// Hub `w_{n-p+1}` carries `w_1` on port 0, the spine on port 1 and each
/// `w_i`, `2 <= i <= n-p`, on port `i`. The spine runs to `w_n`.
pub fn build_g1(order: &[NodeId], p: usize) -> Snapshot {
    let n = order.len();
    let w = |i: usize| order[i - 1];
    let hub = n - p + 1;
    let mut edges = vec![PortEdge { u: w(1), pu: 0, v: w(hub), pv: 0 }];
    for i in 2..hub {
        edges.push(PortEdge { u: w(hub), pu: i, v: w(i), pv: 0 });
    }
    for i in hub..n {
        edges.push(PortEdge { u: w(i), pu: 1, v: w(i + 1), pv: 0 });
    }
    Snapshot::new(n, edges).expect("G1 is a valid snapshot")
}

/// Same hub and star as [`build_g1`]; the spine now ends at `w_{n-2}`,
/// which links back to `w_1`, and the hub's port 0 leads to `w_{n-1} ~ w_n`.
pub fn build_g2(order: &[NodeId], p: usize) -> Snapshot {
    let n = order.len();
    let w = |i: usize| order[i - 1];
    let hub = n - p + 1;
    let mut edges = vec![
        PortEdge { u: w(1), pu: 0, v: w(n - 2), pv: 1 },
        PortEdge { u: w(hub), pu: 0, v: w(n - 1), pv: 0 },
        PortEdge { u: w(n - 1), pu: 1, v: w(n), pv: 0 },
    ];
    for i in 2..hub {
        edges.push(PortEdge { u: w(hub), pu: i, v: w(i), pv: 0 });
    }
    for i in hub..n - 2 {
        edges.push(PortEdge { u: w(i), pu: 1, v: w(i + 1), pv: 0 });
    }
    Snapshot::new(n, edges).expect("G2 is a valid snapshot")
}

#[derive(Debug, Clone)]
pub struct IntervalFlip {
    n: usize,
    p: usize,
    target: NodeId,
    stats: AdversaryStats,
    last: Option<OrderInfo>,
}

impl IntervalFlip {
    pub fn new(n: usize, p: usize) -> Result<Self, ConfigError> {
        check_shape(n, p)?;
        Ok(Self { n, p, target: NodeId(n - 1), stats: AdversaryStats::default(), last: None })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    /// Position (1-based) of the spine node whose surroundings are shared.
    pub fn symmetry_position(&self) -> usize {
        self.n - self.p + self.p / 2
    }

    fn region_bound(&self) -> usize {
        self.p.div_ceil(2).saturating_sub(2)
    }

    fn regions_must_match(&self, spec: &CommSpec) -> bool {
        match spec.ell_v {
            Radius::Hops(h) => h == 0 || h <= self.region_bound(),
            Radius::Unbounded => false,
        }
    }

    fn inboxes_must_match(&self, spec: &CommSpec) -> bool {
        match (spec.ell_v, spec.ell_c) {
            (Radius::Hops(0), Radius::Unbounded) => true,
            (Radius::Hops(v), Radius::Hops(c)) => v + c <= self.region_bound(),
            _ => false,
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn check_symmetry<A: Algorithm>(
        &mut self,
        order: &[NodeId],
        g1: &Snapshot,
        g2: &Snapshot,
        config: &Configuration,
        algorithm: &A,
        memories: &Memories<A::Memory>,
        spec: &CommSpec,
    ) {
        let node = order[self.symmetry_position() - 1];
        if config.occupancy(node) == 0 {
            return;
        }
        let (regions, inboxes) = (self.regions_must_match(spec), self.inboxes_must_match(spec));
        if !regions && !inboxes {
            return;
        }
        let a = observe(g1, config, memories, algorithm, spec);
        let b = observe(g2, config, memories, algorithm, spec);
        self.stats.symmetry_checks += 1;
        let mut same = !regions || a.regions[&node] == b.regions[&node];
        if inboxes {
            same &= config.agents_at(node).iter().all(|id| a.inboxes[id] == b.inboxes[id]);
        }
        if !same {
            self.stats.symmetry_failures += 1;
        }
    }
}

impl Adversary for IntervalFlip {
    fn name(&self) -> String {
        "interval-flip".into()
    }

    fn next_snapshot<A: Algorithm>(
        &mut self,
        round: u64,
        config: &Configuration,
        algorithm: &A,
        memories: &Memories<A::Memory>,
        spec: &CommSpec,
    ) -> Result<Snapshot, AdversaryError> {
        if config.n() != self.n {
            return Err(
                ConfigError::Invalid(format!("configuration has {} nodes, adversary {}", config.n(), self.n)).into()
            );
        }
        if round == 0 && config.total() >= self.n {
            return Err(ConfigError::Invalid(format!("interval-flip needs fewer than {} agents", self.n)).into());
        }
        let order = order_for_interval(&config.occupancies(), self.target);
        let g1 = build_g1(&order, self.p);
        let g2 = build_g2(&order, self.p);
        let mut graph = 1;
        if config.is_dispersed() {
            self.stats.conceded += 1;
        } else {
            self.check_symmetry(&order, &g1, &g2, config, algorithm, memories, spec);
            self.stats.precomputations += 1;
            if what_if(round, &g1, config, memories, algorithm, spec)?.next.is_dispersed() {
                graph = 2;
                self.stats.flips += 1;
                self.stats.precomputations += 1;
                if what_if(round, &g2, config, memories, algorithm, spec)?.next.is_dispersed() {
                    self.stats.defeated += 1;
                }
            }
        }
        self.last =
            Some(OrderInfo { family: "interval".into(), notation: None, phase: graph, boundary: false, labels: order });
        Ok(if graph == 1 { g1 } else { g2 })
    }

    fn order(&self) -> Option<OrderInfo> {
        self.last.clone()
    }

    fn stats(&self) -> AdversaryStats {
        self.stats.clone()
    }
}
