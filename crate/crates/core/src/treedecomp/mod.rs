//! Tree-specific machinery: patterns, equitable colorings, copy extraction,
//! conflict repair, the specialized routes and the bounds calculator.

pub mod bistar;
pub mod bounds;
pub mod coloring;
pub mod extract;
pub mod p5;
pub mod pattern;
pub mod pipeline;
pub mod repair;
pub mod trees;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{EdgeId, GraphError, Girth, Vertex};
use crate::orientation::OrientError;
use crate::splitter::SplitError;
use crate::transform::TransformError;

pub use coloring::{color_parts, is_t_equitable, konig_color, t_equitable_coloring, EdgeColoring};
pub use extract::extract_copies;
pub use pattern::{build_pattern, build_pattern_with_root, TreePattern};
pub use pipeline::{decompose, DecomposeOptions, DecomposeReport, Route};
pub use repair::{count_conflicts, repair_conflicts, RepairStats};

#[derive(Debug, Error)]
pub enum DecompError {
    #[error("pattern input is not a tree with at least one edge")]
    NotATree,
    #[error("graph is not bipartite")]
    NotBipartite,
    #[error("vertex {vertex} has degree {degree}, not divisible by {modulus}")]
    NotDivisible {
        vertex: Vertex,
        degree: usize,
        modulus: usize,
    },
    #[error("edge count {edges} is not divisible by {modulus}")]
    SizeNotDivisible { edges: usize, modulus: usize },
    #[error("vertex {vertex} has degree {degree}, more than the {colors} available colors")]
    DegreeTooLarge {
        vertex: Vertex,
        degree: usize,
        colors: usize,
    },
    #[error("coloring is not equitable at vertex {vertex} for color {color}")]
    EquationsViolated { vertex: Vertex, color: usize },
    #[error("girth {girth} is too small for a tree of diameter {diam}")]
    GirthTooSmall { girth: Girth, diam: usize },
    #[error("conflict repair stalled with {conflicts} conflicts left")]
    RepairStalled { conflicts: usize },
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("certificate failed verification: {0}")]
    VerificationFailed(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Split(#[from] SplitError),
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error(transparent)]
    Orient(#[from] OrientError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    #[default]
    #[serde(alias = "hom")]
    Homomorphic,
    #[serde(alias = "iso")]
    Isomorphic,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kind::Homomorphic => write!(f, "homomorphic"),
            Kind::Isomorphic => write!(f, "isomorphic"),
        }
    }
}

impl FromStr for Kind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "homomorphic" | "hom" => Ok(Kind::Homomorphic),
            "isomorphic" | "iso" => Ok(Kind::Isomorphic),
            other => Err(format!("unknown decomposition kind `{other}`")),
        }
    }
}

/// One homomorphic copy: tree edge id to graph edge id, tree vertex to
/// graph vertex.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TreeCopy {
    pub edge_map: BTreeMap<EdgeId, EdgeId>,
    pub vertex_image: BTreeMap<Vertex, Vertex>,
}

impl TreeCopy {
    pub fn graph_edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.edge_map.values().copied()
    }

    pub fn is_injective(&self) -> bool {
        let image: BTreeSet<Vertex> = self.vertex_image.values().copied().collect();
        image.len() == self.vertex_image.len()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Decomposition {
    pub kind: Kind,
    pub copies: Vec<TreeCopy>,
}

impl Decomposition {
    /// Isomorphic when every copy is injective.
    pub fn strongest_kind(&self) -> Kind {
        if self.copies.iter().all(TreeCopy::is_injective) {
            Kind::Isomorphic
        } else {
            Kind::Homomorphic
        }
    }
}
