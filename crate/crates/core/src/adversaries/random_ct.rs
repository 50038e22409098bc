use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::runtime::{Algorithm, CommSpec, ConfigError, Configuration, Memories};
use crate::tvg::Snapshot;

use super::{Adversary, AdversaryError, AdversaryStats};

/// Oblivious random schedule with connectivity time `T`. Each round draws
/// every pair with probability `1/n`, then adds random bridges until the
/// union with the previous `T-1` rounds is connected. Ports are shuffled.
#[derive(Debug, Clone)]
pub struct RandomCt {
    n: usize,
    window: usize,
    edge_probability: f64,
    rng: ChaCha8Rng,
    recent: VecDeque<Vec<(usize, usize)>>,
    bridges: u64,
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

impl RandomCt {
    pub fn new(n: usize, window: usize, seed: u64) -> Result<Self, ConfigError> {
        if n < 2 {
            return Err(ConfigError::Invalid(format!("random-ct needs n >= 2, got {n}")));
        }
        if window < 1 {
            return Err(ConfigError::Invalid("random-ct needs T >= 1".into()));
        }
        Ok(Self {
            n,
            window,
            edge_probability: 1.0 / n as f64,
            rng: ChaCha8Rng::seed_from_u64(seed),
            recent: VecDeque::new(),
            bridges: 0,
        })
    }

    pub fn with_edge_probability(mut self, p: f64) -> Self {
        self.edge_probability = p.clamp(0.0, 1.0);
        self
    }

    /// Edges added only to restore window connectivity.
    pub fn bridges(&self) -> u64 {
        self.bridges
    }

    fn draw(&mut self) -> Snapshot {
        let n = self.n;
        let mut pairs = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if self.rng.gen_bool(self.edge_probability) {
                    pairs.push((u, v));
                }
            }
        }
        let mut parent: Vec<usize> = (0..n).collect();
        for &(u, v) in self.recent.iter().flatten().chain(pairs.iter()) {
            let (a, b) = (find(&mut parent, u), find(&mut parent, v));
            parent[a] = b;
        }
        let mut groups = (0..n).filter(|&x| find(&mut parent, x) == x).count();
        let mut nodes: Vec<usize> = (0..n).collect();
        while groups > 1 {
            nodes.shuffle(&mut self.rng);
            let u = nodes[0];
            let Some(&v) = nodes[1..].iter().find(|&&v| find(&mut parent, v) != find(&mut parent, u)) else {
                unreachable!("more than one group left");
            };
            let (a, b) = (find(&mut parent, u), find(&mut parent, v));
            parent[a] = b;
            groups -= 1;
            pairs.push((u.min(v), u.max(v)));
            self.bridges += 1;
        }
        let s = Snapshot::with_random_ports(n, &pairs, &mut self.rng).expect("random pairs are simple");
        if self.window > 1 {
            self.recent.push_back(pairs);
            while self.recent.len() > self.window - 1 {
                self.recent.pop_front();
            }
        }
        s
    }
}

impl Adversary for RandomCt {
    fn name(&self) -> String {
        "random-ct".into()
    }

    fn next_snapshot<A: Algorithm>(
        &mut self,
        _round: u64,
        config: &Configuration,
        _algorithm: &A,
        _memories: &Memories<A::Memory>,
        _spec: &CommSpec,
    ) -> Result<Snapshot, AdversaryError> {
        if config.n() != self.n {
            return Err(
                ConfigError::Invalid(format!("configuration has {} nodes, schedule {}", config.n(), self.n)).into()
            );
        }
        Ok(self.draw())
    }

    fn stats(&self) -> AdversaryStats {
        AdversaryStats::default()
    }
}
