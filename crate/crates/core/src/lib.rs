//! Generation, filtering, classification and statistical survey of
//! Kochen-Specker sets written as MMP hypergraphs.

pub mod canon;
pub mod coloring;
pub mod geometry;
pub mod loops;
pub mod mmp;
pub mod stats;
pub mod strip;
pub mod survey;

pub use mmp::{
    is_connected, parse_mmp, renormalize, serialize_mmp, validate_mmp, Edge, Hypergraph, MmpError,
    ParseOptions, VertexId,
};
