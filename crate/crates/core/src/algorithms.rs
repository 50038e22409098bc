//! Baseline algorithms used as adversary targets and for comparison.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use crate::runtime::{
    AgentId, Algorithm, AlgorithmError, CommSpec, ConfigError, Envelope, MoveDecision, PortTarget, Radius,
    VisibilityRegion,
};

fn is_min(agent: AgentId, region: &VisibilityRegion) -> bool {
    region.own().agents.first() == Some(&agent)
}

fn is_max(agent: AgentId, region: &VisibilityRegion) -> bool {
    region.own().agents.last() == Some(&agent)
}

fn require(name: &str, spec: &CommSpec, ok: bool, reason: &str) -> Result<(), ConfigError> {
    if ok {
        Ok(())
    } else {
        Err(ConfigError::Unsupported { algorithm: name.into(), spec: *spec, reason: reason.into() })
    }
}

/// Never moves.
#[derive(Debug, Clone, Copy, Default)]
pub struct Stay;

impl Algorithm for Stay {
    type Memory = ();
    type Message = ();

    fn name(&self) -> String {
        "stay".into()
    }

    fn communicate(&self, _: AgentId, _: &(), _: &VisibilityRegion) -> Option<()> {
        None
    }

    fn compute(
        &self,
        _: AgentId,
        _: &(),
        _: &VisibilityRegion,
        _: &[Envelope<()>],
    ) -> Result<(MoveDecision, ()), AlgorithmError> {
        Ok((MoveDecision::Stay, ()))
    }
}

/// The min-id agent of every multinode leaves through port 0.
#[derive(Debug, Clone, Copy, Default)]
pub struct GreedyZeroHop;

impl Algorithm for GreedyZeroHop {
    type Memory = ();
    type Message = ();

    fn name(&self) -> String {
        "greedy-0hop".into()
    }

    fn communicate(&self, _: AgentId, _: &(), _: &VisibilityRegion) -> Option<()> {
        None
    }

    fn compute(
        &self,
        agent: AgentId,
        _: &(),
        r: &VisibilityRegion,
        _: &[Envelope<()>],
    ) -> Result<(MoveDecision, ()), AlgorithmError> {
        let d = if r.occupancy() >= 2 && is_min(agent, r) && r.degree() > 0 {
            MoveDecision::Port(0)
        } else {
            MoveDecision::Stay
        };
        Ok((d, ()))
    }
}

/// The max-id agent of every multinode leaves through port `round mod deg`.
/// Memory is the round counter.
#[derive(Debug, Clone, Copy, Default)]
pub struct RotorZeroHop;

impl Algorithm for RotorZeroHop {
    type Memory = u64;
    type Message = ();

    fn name(&self) -> String {
        "rotor-0hop".into()
    }

    fn communicate(&self, _: AgentId, _: &u64, _: &VisibilityRegion) -> Option<()> {
        None
    }

    fn compute(
        &self,
        agent: AgentId,
        round: &u64,
        r: &VisibilityRegion,
        _: &[Envelope<()>],
    ) -> Result<(MoveDecision, u64), AlgorithmError> {
        let d = if r.occupancy() >= 2 && is_max(agent, r) && r.degree() > 0 {
            MoveDecision::Port((*round % r.degree() as u64) as usize)
        } else {
            MoveDecision::Stay
        };
        Ok((d, round + 1))
    }
}

/// Multinodes send their min-id agent out through port 0, and lone agents on
/// nodes of degree at least two shift forward through port 1. Every agent
/// broadcasts what it sees (occupancy and degree).
#[derive(Debug, Clone, Copy, Default)]
pub struct PortShifter;

impl Algorithm for PortShifter {
    type Memory = ();
    type Message = (usize, usize);

    fn name(&self) -> String {
        "port-shifter".into()
    }

    fn communicate(&self, _: AgentId, _: &(), r: &VisibilityRegion) -> Option<(usize, usize)> {
        Some((r.occupancy(), r.degree()))
    }

    fn compute(
        &self,
        agent: AgentId,
        _: &(),
        r: &VisibilityRegion,
        _: &[Envelope<(usize, usize)>],
    ) -> Result<(MoveDecision, ()), AlgorithmError> {
        let d = match r.occupancy() {
            1 if r.degree() >= 2 => MoveDecision::Port(1),
            k if k >= 2 && is_min(agent, r) && r.degree() > 0 => MoveDecision::Port(0),
            _ => MoveDecision::Stay,
        };
        Ok((d, ()))
    }
}

/// 1-hop hole filler without communication. The min-id agent of a multinode
/// steps into the lowest-port neighbouring hole, or through port 0 if there
/// is none; a lone agent whose port-0 neighbour is occupied moves on through
/// port 1.
#[derive(Debug, Clone, Copy, Default)]
pub struct LocalFill;

impl Algorithm for LocalFill {
    type Memory = ();
    type Message = ();

    fn name(&self) -> String {
        "local-fill".into()
    }

    fn accepts(&self, spec: &CommSpec) -> Result<(), ConfigError> {
        require(&self.name(), spec, spec.ell_v != Radius::Hops(0), "requires ell_v >= 1")
    }

    fn communicate(&self, _: AgentId, _: &(), _: &VisibilityRegion) -> Option<()> {
        None
    }

    fn compute(
        &self,
        agent: AgentId,
        _: &(),
        r: &VisibilityRegion,
        _: &[Envelope<()>],
    ) -> Result<(MoveDecision, ()), AlgorithmError> {
        let empty = |t: &PortTarget| matches!(t, PortTarget::Inside(j) if r.nodes[*j].agents.is_empty());
        let own = r.own();
        let d = if own.agents.len() >= 2 && is_min(agent, r) && r.degree() > 0 {
            MoveDecision::Port(own.ports.iter().position(empty).unwrap_or(0))
        } else if own.agents.len() == 1 && r.degree() >= 2 && !empty(&own.ports[0]) {
            MoveDecision::Port(1)
        } else {
            MoveDecision::Stay
        };
        Ok((d, ()))
    }
}

/// With the whole component in view, the min-id agent of each multinode
/// takes the first step of a shortest path to the nearest hole.
#[derive(Debug, Clone, Copy, Default)]
pub struct FullVisibilityGreedy;

impl Algorithm for FullVisibilityGreedy {
    type Memory = ();
    type Message = ();

    fn name(&self) -> String {
        "full-greedy".into()
    }

    fn accepts(&self, spec: &CommSpec) -> Result<(), ConfigError> {
        require(&self.name(), spec, spec.ell_v == Radius::Unbounded, "requires full visibility")
    }

    fn communicate(&self, _: AgentId, _: &(), _: &VisibilityRegion) -> Option<()> {
        None
    }

    fn compute(
        &self,
        agent: AgentId,
        _: &(),
        r: &VisibilityRegion,
        _: &[Envelope<()>],
    ) -> Result<(MoveDecision, ()), AlgorithmError> {
        if r.occupancy() < 2 || !is_min(agent, r) {
            return Ok((MoveDecision::Stay, ()));
        }
        // first port used to reach each node
        let mut first: Vec<Option<usize>> = vec![None; r.nodes.len()];
        let mut seen = vec![false; r.nodes.len()];
        seen[0] = true;
        let mut queue = VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            if r.nodes[x].agents.is_empty() {
                return Ok((first[x].map_or(MoveDecision::Stay, MoveDecision::Port), ()));
            }
            for (port, t) in r.nodes[x].ports.iter().enumerate() {
                if let PortTarget::Inside(y) = *t {
                    if !seen[y] {
                        seen[y] = true;
                        first[y] = Some(first[x].unwrap_or(port));
                        queue.push_back(y);
                    }
                }
            }
        }
        Ok((MoveDecision::Stay, ()))
    }
}

/// Replays recorded decisions. Missing entries mean stay.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ScriptAlgorithm {
    pub decisions: BTreeMap<(u64, AgentId), MoveDecision>,
}

impl ScriptAlgorithm {
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut decisions = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = || format!("line {}: expected `round agent port|stay`, got `{line}`", i + 1);
            let parts: Vec<&str> = line.split_whitespace().collect();
            let [round, agent, action] = parts.as_slice() else {
                return Err(bad());
            };
            let round: u64 = round.parse().map_err(|_| bad())?;
            let agent = AgentId(agent.parse().map_err(|_| bad())?);
            let action = match *action {
                "stay" => MoveDecision::Stay,
                p => MoveDecision::Port(p.parse().map_err(|_| bad())?),
            };
            decisions.insert((round, agent), action);
        }
        Ok(Self { decisions })
    }
}

impl fmt::Display for ScriptAlgorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for ((round, agent), d) in &self.decisions {
            match d {
                MoveDecision::Stay => writeln!(f, "{round} {agent} stay")?,
                MoveDecision::Port(p) => writeln!(f, "{round} {agent} {p}")?,
            }
        }
        Ok(())
    }
}

impl FromStr for ScriptAlgorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s)
    }
}

impl Algorithm for ScriptAlgorithm {
    type Memory = u64;
    type Message = ();

    fn name(&self) -> String {
        "script".into()
    }

    fn communicate(&self, _: AgentId, _: &u64, _: &VisibilityRegion) -> Option<()> {
        None
    }

    fn compute(
        &self,
        agent: AgentId,
        round: &u64,
        _: &VisibilityRegion,
        _: &[Envelope<()>],
    ) -> Result<(MoveDecision, u64), AlgorithmError> {
        let d = self.decisions.get(&(*round, agent)).copied().unwrap_or(MoveDecision::Stay);
        Ok((d, round + 1))
    }
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::runtime::{step_round, Configuration};
    use crate::tvg::Snapshot;

    fn star() -> Snapshot {
        Snapshot::from_pairs(4, &[(0, 1), (0, 2), (0, 3)]).unwrap()
    }

    fn zero_hop() -> CommSpec {
        CommSpec::new(Radius::Hops(0), Radius::Hops(0))
    }

    #[test]
    fn greedy_moves_one_agent_through_port_zero() {
        let c = Configuration::from_counts_sequential(&[3, 0, 0, 0]);
        let out = step_round(0, &star(), &c, &BTreeMap::new(), &GreedyZeroHop, &zero_hop()).unwrap();
        assert_eq!(out.next.occupancies(), vec![2, 1, 0, 0]);
        assert_eq!(out.moves[0].agent, AgentId(1));
    }

    #[test]
    fn rotor_cycles_ports() {
        let c = Configuration::from_counts_sequential(&[2, 0, 0, 0]);
        let mut mem = BTreeMap::new();
        mem.insert(AgentId(2), 2u64);
        let out = step_round(0, &star(), &c, &mem, &RotorZeroHop, &zero_hop()).unwrap();
        assert_eq!(out.next.occupancies(), vec![1, 0, 0, 1]);
        assert_eq!(out.memories[&AgentId(2)], 3);
    }

    #[test]
    fn local_fill_prefers_hole() {
        // node 1 occupied, node 2 hole: min agent goes through port 1
        let c = Configuration::from_counts_sequential(&[2, 1, 0, 1]);
        let spec = CommSpec::new(Radius::Hops(1), Radius::Hops(0));
        let out = step_round(0, &star(), &c, &BTreeMap::new(), &LocalFill, &spec).unwrap();
        assert_eq!(out.next.occupancies(), vec![1, 1, 1, 1]);
        assert!(LocalFill.accepts(&zero_hop()).is_err());
    }

    #[test]
    fn full_greedy_heads_for_nearest_hole() {
        let s = Snapshot::from_pairs(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let c = Configuration::from_counts_sequential(&[2, 1, 1, 0]);
        let spec = CommSpec::new(Radius::Unbounded, Radius::Unbounded);
        let out = step_round(0, &s, &c, &BTreeMap::new(), &FullVisibilityGreedy, &spec).unwrap();
        assert_eq!(out.next.occupancies(), vec![1, 2, 1, 0]);
    }

    #[test]
    fn script_round_trips_and_replays() {
        let text = "0 1 0\n# comment\n1 1 stay\n";
        let script = ScriptAlgorithm::parse(text).unwrap();
        assert_eq!(script.to_string(), "0 1 0\n1 1 stay\n");
        let c = Configuration::from_counts_sequential(&[1, 0, 0, 0]);
        let out = step_round(0, &star(), &c, &BTreeMap::new(), &script, &zero_hop()).unwrap();
        assert_eq!(out.next.occupancies(), vec![0, 1, 0, 0]);
        assert!(ScriptAlgorithm::parse("0 1").is_err());
    }
}
