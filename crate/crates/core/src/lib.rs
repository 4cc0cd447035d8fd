//! Palette sparsification for (Δ+1) vertex coloring.
//!
//! Every vertex samples a short list of colors; the graph restricted to edges
//! whose endpoints share a color is small, and a list coloring of it is a
//! proper coloring of the input. The crate provides the offline pipeline plus
//! simulators for dynamic streams, the adjacency query model and MPC.

pub mod coloring;
pub mod decomposition;
pub mod error;
pub mod graph;
pub mod harness;
pub mod hashing;
pub mod mpc;
pub mod palette;
pub mod query_runner;
pub mod sketch;
pub mod stream_runner;

pub use error::{Error, Result};
pub use graph::{Color, Edge, Graph, Vertex};

/// Version tag written into every JSON artifact.
pub const SCHEMA_VERSION: u32 = 1;
