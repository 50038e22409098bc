use std::collections::BTreeSet;

use super::map::{map_phase2, view_from_region, MapError, NodeView, ReconstructedMap};
use super::path::lex_shortest_path;
use crate::runtime::{
    AgentId, Algorithm, AlgorithmError, CommSpec, ConfigError, Envelope, MoveDecision, Radius, VisibilityRegion,
};

/// Which branch of the decision rule applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Case {
    /// No multinode and no hole port: stay.
    Settled,
    /// Hole ports but no multinode: one node steps into a hole.
    StepIntoHole,
    /// Multinode and hole ports: pipeline toward a hole.
    FillHole,
    /// Multinode, no hole ports: move one unit from a fullest to an emptiest node.
    Rebalance,
}

/// Decision of the owner `own` of a node, given the map of its component.
pub fn decide(own: AgentId, map: &ReconstructedMap) -> Result<(Case, MoveDecision), MapError> {
    let multinode = map.has_multinode();
    let holes = !map.hole_ports.is_empty();
    match (multinode, holes) {
        (false, false) => Ok((Case::Settled, MoveDecision::Stay)),
        (false, true) => {
            let first = *map.hole_adjacent().iter().next().expect("hole ports exist");
            let d = if first == own { exit_via_hole(map, own) } else { MoveDecision::Stay };
            Ok((Case::StepIntoHole, d))
        }
        (true, true) => {
            let u1 = map.nodes.iter().filter(|(_, &c)| c >= 2).map(|(&k, _)| k).next().expect("multinode exists");
            let piece = map.component_of(own);
            if !piece.contains(&u1) {
                return Ok((Case::FillHole, MoveDecision::Stay));
            }
            let Some(target) = map.hole_adjacent().into_iter().find(|k| piece.contains(k)) else {
                return Ok((Case::FillHole, MoveDecision::Stay));
            };
            let path = lex_shortest_path(map, u1, target)?;
            let d = match path.iter().position(|&x| x == own) {
                Some(j) if j + 1 < path.len() => step(map, own, path[j + 1]),
                Some(_) => exit_via_hole(map, own),
                None => MoveDecision::Stay,
            };
            Ok((Case::FillHole, d))
        }
        (true, false) => {
            let piece = map.component_of(own);
            let occ = |k: &AgentId| map.nodes[k];
            let hi = piece.iter().map(occ).max().expect("own node is in the map");
            let lo = piece.iter().map(occ).min().expect("own node is in the map");
            if hi < lo + 2 {
                return Ok((Case::Rebalance, MoveDecision::Stay));
            }
            let v1 = *piece.iter().find(|k| occ(k) == hi).expect("max is attained");
            let w1 = *piece.iter().find(|k| occ(k) == lo).expect("min is attained");
            let path = lex_shortest_path(map, v1, w1)?;
            let d = match path.iter().position(|&x| x == own) {
                Some(j) if j + 1 < path.len() => step(map, own, path[j + 1]),
                _ => MoveDecision::Stay,
            };
            Ok((Case::Rebalance, d))
        }
    }
}

fn exit_via_hole(map: &ReconstructedMap, own: AgentId) -> MoveDecision {
    map.min_hole_port(own).map_or(MoveDecision::Stay, MoveDecision::Port)
}

fn step(map: &ReconstructedMap, from: AgentId, to: AgentId) -> MoveDecision {
    MoveDecision::Port(map.port_towards(from, to).expect("consecutive path nodes share an edge"))
}

/// The perpetual-exploration algorithm for 1-hop visibility and global
/// communication. Memoryless: everything is recomputed each round.
/// Drops records pointing at occupied nodes whose view never arrived. With
/// global communication every owner in the component is heard, so nothing
/// is dropped; with a bounded radius the map covers the views received.
fn known_views<'a>(views: impl Iterator<Item = &'a NodeView>) -> Vec<NodeView> {
    let mut views: Vec<NodeView> = views.cloned().collect();
    let owners: BTreeSet<AgentId> = views.iter().map(|v| v.owner).collect();
    for v in &mut views {
        v.records.retain(|r| r.neighbor_id.is_none_or(|id| owners.contains(&id)));
    }
    views
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ExpAlgo;

impl Algorithm for ExpAlgo {
    type Memory = ();
    type Message = NodeView;

    fn name(&self) -> String {
        "exp-algo".into()
    }

    fn accepts(&self, spec: &CommSpec) -> Result<(), ConfigError> {
        if spec.ell_v == Radius::Hops(1) {
            Ok(())
        } else {
            Err(ConfigError::Unsupported { algorithm: self.name(), spec: *spec, reason: "requires ell_v=1".into() })
        }
    }

    fn communicate(&self, agent: AgentId, _: &(), region: &VisibilityRegion) -> Option<NodeView> {
        (region.own().agents.first() == Some(&agent)).then(|| view_from_region(region)).flatten()
    }

    fn compute(
        &self,
        agent: AgentId,
        _: &(),
        region: &VisibilityRegion,
        inbox: &[Envelope<NodeView>],
    ) -> Result<(MoveDecision, ()), AlgorithmError> {
        if region.own().agents.first() != Some(&agent) {
            return Ok((MoveDecision::Stay, ()));
        }
        let own = view_from_region(region).expect("owner's node is occupied");
        let views = known_views(inbox.iter().map(|e| &e.message).chain(std::iter::once(&own)));
        let map = map_phase2(&views).map_err(|e| AlgorithmError(e.to_string()))?;
        let (_, d) = decide(agent, &map).map_err(|e| AlgorithmError(e.to_string()))?;
        Ok((d, ()))
    }
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::runtime::{step_round, Configuration};
    use crate::tvg::Snapshot;

    fn spec() -> CommSpec {
        CommSpec::new(Radius::Hops(1), Radius::Unbounded)
    }

    fn run(s: &Snapshot, counts: &[usize]) -> Vec<usize> {
        let c = Configuration::from_counts_sequential(counts);
        step_round(0, s, &c, &BTreeMap::new(), &ExpAlgo, &spec()).unwrap().next.occupancies()
    }

    fn path(n: usize) -> Snapshot {
        let pairs: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
        Snapshot::from_pairs(n, &pairs).unwrap()
    }

    #[test]
    fn rejects_other_models() {
        assert!(ExpAlgo.accepts(&CommSpec::new(Radius::Hops(0), Radius::Unbounded)).is_err());
        assert!(ExpAlgo.accepts(&CommSpec::new(Radius::Hops(2), Radius::Unbounded)).is_err());
        assert!(ExpAlgo.accepts(&CommSpec::new(Radius::Hops(1), Radius::Hops(0))).is_ok());
        assert!(ExpAlgo.accepts(&spec()).is_ok());
    }

    #[test]
    fn local_communication_uses_partial_map() {
        // owners hear nobody, so each sees only its own node
        let c = Configuration::from_counts_sequential(&[2, 1, 0]);
        let spec = CommSpec::new(Radius::Hops(1), Radius::Hops(0));
        let out = step_round(0, &path(3), &c, &BTreeMap::new(), &ExpAlgo, &spec).unwrap();
        assert_eq!(out.next.occupancies(), vec![2, 0, 1]);
    }

    #[test]
    fn dispersed_without_holes_stays() {
        assert_eq!(run(&path(4), &[1, 1, 1, 1]), vec![1, 1, 1, 1]);
    }

    #[test]
    fn pipeline_fills_hole_two_hops_away() {
        assert_eq!(run(&path(3), &[2, 1, 0]), vec![1, 1, 1]);
    }

    #[test]
    fn pipeline_of_three_along_path() {
        assert_eq!(run(&path(4), &[2, 1, 1, 0]), vec![1, 1, 1, 1]);
    }

    #[test]
    fn rebalance_on_single_edge() {
        assert_eq!(run(&path(2), &[3, 1]), vec![2, 2]);
    }

    #[test]
    fn balanced_enough_stays() {
        assert_eq!(run(&path(2), &[2, 1]), vec![2, 1]);
    }

    #[test]
    fn single_step_into_hole_without_multinode() {
        // holes at both ends of a 4-path; exactly one agent steps out
        assert_eq!(run(&path(4), &[0, 1, 1, 0]), vec![1, 0, 1, 0]);
    }

    #[test]
    fn multinode_outside_piece_does_not_act() {
        // 0(2) - 1(hole) - 2(1) - 3(hole): only the piece with the multinode acts
        assert_eq!(run(&path(4), &[2, 0, 1, 0]), vec![1, 1, 1, 0]);
    }

    #[test]
    fn multinode_adjacent_to_hole_exits_itself() {
        assert_eq!(run(&path(2), &[3, 0]), vec![2, 1]);
    }
}
