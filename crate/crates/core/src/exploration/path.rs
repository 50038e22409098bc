use std::collections::{BTreeMap, VecDeque};

use super::map::{MapError, ReconstructedMap};
use crate::runtime::AgentId;

/// Among all shortest `src`-`dst` paths of the map, the one whose id
/// sequence is lexicographically smallest.
///
/// Distances to `dst` are computed first; walking from `src`, the smallest
/// neighbour one step closer is always the right choice, since every prefix
/// that stays on the distance layers extends to a shortest path.
pub fn lex_shortest_path(map: &ReconstructedMap, src: AgentId, dst: AgentId) -> Result<Vec<AgentId>, MapError> {
    for x in [src, dst] {
        if !map.nodes.contains_key(&x) {
            return Err(MapError::UnknownNode(x));
        }
    }
    let adj = map.adjacency();
    let mut dist: BTreeMap<AgentId, usize> = BTreeMap::from([(dst, 0)]);
    let mut queue = VecDeque::from([dst]);
    while let Some(x) = queue.pop_front() {
        let d = dist[&x];
        for &(_, y) in &adj[&x] {
            if let std::collections::btree_map::Entry::Vacant(e) = dist.entry(y) {
                e.insert(d + 1);
                queue.push_back(y);
            }
        }
    }
    let Some(&len) = dist.get(&src) else {
        return Err(MapError::Unreachable(src, dst));
    };
    let mut path = Vec::with_capacity(len + 1);
    let mut cur = src;
    path.push(cur);
    while cur != dst {
        let want = dist[&cur] - 1;
        cur = adj[&cur]
            .iter()
            .map(|&(_, y)| y)
            .filter(|y| dist.get(y) == Some(&want))
            .min()
            .expect("a node at distance d > 0 has a neighbour at d - 1");
        path.push(cur);
    }
    Ok(path)
}
