//! Mobile-agent exploration on time-varying graphs: a synchronous
//! simulator, an exploration algorithm for 1-hop visibility and global
//! communication, adaptive adversaries that defeat weaker agents, and
//! runtime monitors for the claims behind them.

pub mod adversaries;
pub mod algorithms;
pub mod exploration;
pub mod runtime;
pub mod sim;
pub mod trace;
pub mod tvg;
pub mod verification;

pub use runtime::{AgentId, Algorithm, CommSpec, Configuration, MoveDecision, Radius};
pub use tvg::{NodeId, Port, PortEdge, Snapshot};
