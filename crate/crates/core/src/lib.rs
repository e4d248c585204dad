//! Decompositions of highly edge-connected bipartite multigraphs into
//! homomorphic copies of a fixed tree, with checkable certificates.

pub mod app;
pub mod graph;
pub mod rng;
pub mod splitter;
pub mod transform;
pub mod orientation;
pub mod treedecomp;
