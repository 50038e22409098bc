//! Line-oriented run traces. Every line is `KIND|round|payload`:
//!
//! ```text
//! HEADER|0|key=value;key=value
//! CONF|r|ids on node 0;ids on node 1;...      (comma-separated ids)
//! SNAP|r|u-v:pu,pv u-v:pu,pv ...
//! ORDER|r|family;notation;phase;boundary;w_1,...,w_n
//! MOVE|r|agent,from,port,to
//! EVENT|r|level:joins:leaves,...
//! VERDICT|r|monitor|pass or fail|detail
//! ```
//!
//! `CONF r` is the configuration at the start of round `r`; the final one
//! follows the last round.

use std::fmt::Write as _;

use thiserror::Error;

use crate::adversaries::{Notation, OrderInfo};
use crate::runtime::{AgentId, Configuration, MoveRecord};
use crate::tvg::{NodeId, Snapshot};
use crate::verification::{LevelEvents, Verdict};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TraceError {
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("trace has no header")]
    MissingHeader,
    #[error("header key `{0}` missing or invalid")]
    BadHeader(String),
    #[error("round {0}: {1}")]
    Incomplete(u64, String),
}

/// Ordered key/value pairs. Values may not contain `;` or `|`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Header {
    pub entries: Vec<(String, String)>,
}

impl Header {
    pub fn push(&mut self, key: &str, value: impl ToString) {
        self.entries.push((key.into(), value.to_string()));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn require<T: std::str::FromStr>(&self, key: &str) -> Result<T, TraceError> {
        self.get(key).and_then(|v| v.parse().ok()).ok_or_else(|| TraceError::BadHeader(key.into()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Record {
    Header(Header),
    Conf(u64, Configuration),
    Snap(u64, Snapshot),
    Order(u64, OrderInfo),
    Move(u64, MoveRecord),
    Event(u64, LevelEvents),
    Verdict(Verdict),
}

fn join<T: ToString>(items: impl IntoIterator<Item = T>, sep: &str) -> String {
    items.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(sep)
}

pub fn encode(record: &Record) -> String {
    match record {
        Record::Header(h) => format!("HEADER|0|{}", join(h.entries.iter().map(|(k, v)| format!("{k}={v}")), ";")),
        Record::Conf(r, c) => format!("CONF|{r}|{}", join(c.placement().iter().map(|ids| join(ids, ",")), ";")),
        Record::Snap(r, s) => format!("SNAP|{r}|{}", s.encode_edges()),
        Record::Order(r, o) => format!(
            "ORDER|{r}|{};{};{};{};{}",
            o.family,
            o.notation.map_or("-".to_string(), |n| n.to_string()),
            o.phase,
            u8::from(o.boundary),
            join(o.labels.iter(), ",")
        ),
        Record::Move(r, m) => format!("MOVE|{r}|{},{},{},{}", m.agent, m.from, m.port, m.to),
        Record::Event(r, e) => {
            format!("EVENT|{r}|{}", join(e.iter().map(|(p, (j, l))| format!("{p}:{j}:{l}")), ","))
        }
        Record::Verdict(v) => format!("VERDICT|{}|{v}", v.round),
    }
}

fn parse_list<T: std::str::FromStr>(text: &str, sep: char) -> Option<Vec<T>> {
    if text.is_empty() {
        return Some(Vec::new());
    }
    text.split(sep).map(|x| x.parse().ok()).collect()
}

fn parse_header(payload: &str) -> Option<Header> {
    let mut h = Header::default();
    if payload.is_empty() {
        return Some(h);
    }
    for kv in payload.split(';') {
        let (k, v) = kv.split_once('=')?;
        h.push(k, v);
    }
    Some(h)
}

fn check_node(v: usize, n: usize) -> Result<NodeId, String> {
    if v < n {
        Ok(NodeId(v))
    } else {
        Err(format!("node {v} out of range for n={n}"))
    }
}

/// Parses one non-header line against a trace of `n` nodes.
pub fn parse_line(text: &str, n: usize) -> Result<Record, String> {
    let mut parts = text.splitn(3, '|');
    let kind = parts.next().unwrap_or_default();
    let round: u64 = parts.next().and_then(|r| r.parse().ok()).ok_or("bad round")?;
    let payload = parts.next().ok_or("missing payload")?;
    match kind {
        "HEADER" => parse_header(payload).map(Record::Header).ok_or_else(|| "bad header".into()),
        "CONF" => {
            let nodes: Vec<&str> = payload.split(';').collect();
            if nodes.len() != n {
                return Err(format!("{} nodes in configuration, expected {n}", nodes.len()));
            }
            let placement = nodes
                .iter()
                .map(|ids| parse_list::<u64>(ids, ',').map(|v| v.into_iter().map(AgentId).collect()))
                .collect::<Option<Vec<Vec<AgentId>>>>()
                .ok_or("bad agent id")?;
            Configuration::new(placement).map(|c| Record::Conf(round, c)).map_err(|e| e.to_string())
        }
        "SNAP" => {
            let s = Snapshot::decode_edges(n, payload).map_err(|e| e.to_string())?;
            for e in s.edges() {
                check_node(e.u.0, n)?;
                check_node(e.v.0, n)?;
            }
            Ok(Record::Snap(round, s))
        }
        "ORDER" => {
            let f: Vec<&str> = payload.split(';').collect();
            let [family, notation, phase, boundary, labels] = f[..] else {
                return Err("ORDER needs five fields".into());
            };
            let notation = match notation {
                "-" => None,
                other => Some(other.parse::<Notation>()?),
            };
            let labels = parse_list::<usize>(labels, ',')
                .ok_or("bad label")?
                .into_iter()
                .map(|v| check_node(v, n))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Record::Order(
                round,
                OrderInfo {
                    family: family.into(),
                    notation,
                    phase: phase.parse().map_err(|_| "bad phase")?,
                    boundary: boundary == "1",
                    labels,
                },
            ))
        }
        "MOVE" => {
            let v = parse_list::<u64>(payload, ',').ok_or("bad move")?;
            let [agent, from, port, to] = v[..] else {
                return Err("MOVE needs four fields".into());
            };
            Ok(Record::Move(
                round,
                MoveRecord {
                    agent: AgentId(agent),
                    from: check_node(from as usize, n)?,
                    port: port as usize,
                    to: check_node(to as usize, n)?,
                },
            ))
        }
        "EVENT" => {
            let mut e = LevelEvents::new();
            for item in payload.split(',').filter(|s| !s.is_empty()) {
                let v = parse_list::<u64>(item, ':').ok_or("bad event")?;
                let [p, j, l] = v[..] else {
                    return Err("EVENT entries need three fields".into());
                };
                e.insert(p as usize, (j as u32, l as u32));
            }
            Ok(Record::Event(round, e))
        }
        "VERDICT" => {
            let mut f = payload.splitn(3, '|');
            let monitor = f.next().unwrap_or_default().to_string();
            let pass = match f.next() {
                Some("pass") => true,
                Some("fail") => false,
                _ => return Err("verdict status must be pass or fail".into()),
            };
            let detail = f.next().unwrap_or_default().to_string();
            Ok(Record::Verdict(Verdict { round, monitor, pass, detail }))
        }
        other => Err(format!("unknown record kind `{other}`")),
    }
}

/// A parsed trace.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub header: Header,
    pub records: Vec<Record>,
}

/// One round rebuilt from a trace.
#[derive(Debug, Clone, PartialEq)]
pub struct RecordedRound {
    pub round: u64,
    pub snapshot: Snapshot,
    pub order: Option<OrderInfo>,
    pub before: Configuration,
    pub moves: Vec<MoveRecord>,
    pub after: Configuration,
}

impl Trace {
    pub fn parse(text: &str) -> Result<Self, TraceError> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, first) = lines.next().ok_or(TraceError::MissingHeader)?;
        let header = match first.strip_prefix("HEADER|0|").and_then(parse_header) {
            Some(h) => h,
            None => return Err(TraceError::MissingHeader),
        };
        let n: usize = header.require("n")?;
        let mut records = Vec::new();
        for (i, line) in lines {
            let rec = parse_line(line, n).map_err(|reason| TraceError::Malformed { line: i + 1, reason })?;
            if matches!(rec, Record::Header(_)) {
                return Err(TraceError::Malformed { line: i + 1, reason: "second header".into() });
            }
            records.push(rec);
        }
        Ok(Self { header, records })
    }

    pub fn verdicts(&self) -> Vec<Verdict> {
        self.records
            .iter()
            .filter_map(|r| match r {
                Record::Verdict(v) => Some(v.clone()),
                _ => None,
            })
            .collect()
    }

    /// Rounds in order, plus the final configuration.
    pub fn rounds(&self) -> Result<(Vec<RecordedRound>, Configuration), TraceError> {
        let mut confs = std::collections::BTreeMap::new();
        let mut snaps = std::collections::BTreeMap::new();
        let mut orders = std::collections::BTreeMap::new();
        let mut moves: std::collections::BTreeMap<u64, Vec<MoveRecord>> = Default::default();
        for r in &self.records {
            match r {
                Record::Conf(k, c) => {
                    confs.insert(*k, c.clone());
                }
                Record::Snap(k, s) => {
                    snaps.insert(*k, s.clone());
                }
                Record::Order(k, o) => {
                    orders.insert(*k, o.clone());
                }
                Record::Move(k, m) => moves.entry(*k).or_default().push(*m),
                _ => {}
            }
        }
        let mut out = Vec::new();
        for (&round, snapshot) in &snaps {
            let before = confs.get(&round).ok_or_else(|| TraceError::Incomplete(round, "no CONF".into()))?;
            let after =
                confs.get(&(round + 1)).ok_or_else(|| TraceError::Incomplete(round, "no following CONF".into()))?;
            out.push(RecordedRound {
                round,
                snapshot: snapshot.clone(),
                order: orders.get(&round).cloned(),
                before: before.clone(),
                moves: moves.remove(&round).unwrap_or_default(),
                after: after.clone(),
            });
        }
        for (i, r) in out.iter().enumerate() {
            if r.round != i as u64 {
                return Err(TraceError::Incomplete(i as u64, "round missing".into()));
            }
        }
        let last = confs
            .get(&(out.len() as u64))
            .cloned()
            .ok_or_else(|| TraceError::Incomplete(out.len() as u64, "no final CONF".into()))?;
        Ok((out, last))
    }
}

/// Renders records as trace text, one per line.
pub fn render(records: &[Record]) -> String {
    let mut out = String::new();
    for r in records {
        let _ = writeln!(out, "{}", encode(r));
    }
    out
}

/// The verdict lines of a trace text, in order.
pub fn verdict_lines(text: &str) -> Vec<&str> {
    text.lines().filter(|l| l.starts_with("VERDICT|")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn roundtrip(r: Record, n: usize) {
        let line = encode(&r);
        assert_eq!(parse_line(&line, n).unwrap(), r, "{line}");
    }

    #[test]
    fn records_roundtrip() {
        let mut h = Header::default();
        h.push("n", 4);
        h.push("adversary", "random-ct");
        roundtrip(Record::Header(h), 4);
        let c = Configuration::new(vec![vec![AgentId(3), AgentId(1)], vec![], vec![AgentId(2)], vec![]]).unwrap();
        roundtrip(Record::Conf(5, c), 4);
        roundtrip(Record::Snap(2, Snapshot::from_pairs(4, &[(0, 1), (2, 1)]).unwrap()), 4);
        roundtrip(Record::Snap(3, Snapshot::empty(4)), 4);
        let o = OrderInfo {
            family: "agents".into(),
            notation: Some(Notation::N2),
            phase: 3,
            boundary: true,
            labels: vec![NodeId(1), NodeId(0), NodeId(2), NodeId(3)],
        };
        roundtrip(Record::Order(4, o.clone()), 4);
        roundtrip(Record::Order(4, OrderInfo { notation: None, ..o }), 4);
        roundtrip(Record::Move(1, MoveRecord { agent: AgentId(9), from: NodeId(0), port: 2, to: NodeId(3) }), 4);
        let mut e = LevelEvents::new();
        e.insert(0, (1, 0));
        e.insert(2, (0, 1));
        roundtrip(Record::Event(7, e), 4);
        roundtrip(Record::Event(7, LevelEvents::new()), 4);
        let v = Verdict { round: 8, monitor: "holes".into(), pass: false, detail: "x | y".into() };
        roundtrip(Record::Verdict(v), 4);
    }

    #[test]
    fn malformed_lines() {
        assert!(parse_line("SNAP|1|0-9:0,0", 4).is_err());
        assert!(parse_line("CONF|0|1;2", 4).is_err());
        assert!(parse_line("NOPE|0|", 4).is_err());
        assert!(parse_line("MOVE|x|1,2,3,4", 4).is_err());
        assert!(matches!(Trace::parse("CONF|0|;;;"), Err(TraceError::MissingHeader)));
    }

    #[test]
    fn rounds_are_rebuilt() {
        let c0 = Configuration::from_counts_sequential(&[1, 0]);
        let m = MoveRecord { agent: AgentId(1), from: NodeId(0), port: 0, to: NodeId(1) };
        let c1 = c0.apply_moves(&[m]).unwrap();
        let mut h = Header::default();
        h.push("n", 2);
        let text = render(&[
            Record::Header(h),
            Record::Conf(0, c0.clone()),
            Record::Snap(0, Snapshot::from_pairs(2, &[(0, 1)]).unwrap()),
            Record::Move(0, m),
            Record::Conf(1, c1.clone()),
        ]);
        let t = Trace::parse(&text).unwrap();
        let (rounds, last) = t.rounds().unwrap();
        assert_eq!(rounds.len(), 1);
        assert_eq!(rounds[0].moves, vec![m]);
        assert_eq!(rounds[0].before, c0);
        assert_eq!(last, c1);
    }
}
