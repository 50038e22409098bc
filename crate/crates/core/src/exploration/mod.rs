//! Map reconstruction and the exploration decision rule.

mod algo;
mod map;
mod path;

pub use algo::{decide, Case, ExpAlgo};
pub use map::{
    map_phase1, map_phase2, node_view, view_from_region, MapEdge, MapError, NodeView, ReconstructedMap, ViewRecord,
};
pub use path::lex_shortest_path;
