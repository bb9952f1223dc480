//! Delineation of curvilinear network topology from probability rasters.
//!
//! The crate is organized around one pipeline:
//!
//! 1. [`synth`] generates seeded ground-truth networks and corrupts rendered
//!    probability maps (blur, noise, gaps, clutter) for controlled experiments.
//! 2. [`raster`] holds the grid primitives: probability maps, binary masks,
//!    topology-preserving thinning, Gaussian peak heatmaps, and line drawing.
//! 3. [`graph`] converts between rasters and polyline network graphs and
//!    decomposes graphs into junction-to-junction segments.
//! 4. [`oracle`] answers patch-level connectivity queries: given a patch
//!    center, which border pixels does the structure through the center exit
//!    at? Backends exist for ground-truth skeletons and probability maps.
//! 5. [`delineate`] walks an oracle over a probability map, maintaining an
//!    exploration bag and a visited set, and links successive patch centers
//!    with shortest paths over the map to grow a network graph.
//! 6. [`metrics`] scores a predicted graph against ground truth with
//!    boundary precision/recall and a per-segment connectivity measure.
//!
//! Everything is deterministic: identical inputs (including seeds) produce
//! byte-identical outputs. Ties are broken in row-major order throughout.

pub mod delineate;
mod error;
pub mod graph;
pub mod metrics;
pub mod oracle;
pub mod pgm;
pub mod raster;
pub mod synth;
mod util;

pub use error::{Error, Result};
pub use graph::NetworkGraph;
pub use oracle::{ConnectivityOracle, OracleConfig};
pub use raster::{BinaryMask, BorderDetection, PixelCoord, ProbabilityMap};
