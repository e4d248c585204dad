//! Decompositions into bistars `S(k, l)` through a single halving step.

use super::coloring::color_parts;
use super::extract::extract_copies;
use super::pattern::{build_pattern_with_root, TreePattern};
use super::trees::bistar;
use super::{DecompError, Decomposition};
use crate::graph::{Bipartition, MultiGraph};
use crate::rng::mix;
use crate::splitter::{bistar_split, SplitConfig};

/// `(k, l)` for a bistar pattern whose degree-`k` center lies in `T_A`.
pub fn bistar_params(tp: &TreePattern) -> Option<(usize, usize)> {
    match (&tp.non_leaves_a[..], &tp.non_leaves_b[..]) {
        ([ca], [cb]) => Some((tp.tree.degree(*ca), tp.tree.degree(*cb))),
        _ => None,
    }
}

/// Splits off `G1` holding `(k-1)/m` of every class-A degree, so that the
/// rest `G2` has class-B degrees divisible by `l`. `G2` is colored with the
/// `l` colors at the `T_B` center and `G1` with the `k-1` leaf colors, which
/// is equitable for the pattern; extraction finishes.
pub fn bistar_route(
    g: &MultiGraph,
    bip: &Bipartition,
    tp: &TreePattern,
    cfg: &SplitConfig,
) -> Result<Decomposition, DecompError> {
    let (k, l) = bistar_params(tp)
        .filter(|&(k, l)| 1 < k && k <= l)
        .ok_or_else(|| DecompError::PreconditionViolated("pattern is not a bistar S(k, l) with 1 < k <= l".into()))?;
    let (g1, g2) = bistar_split(g, bip, k, l, cfg)?;
    let coloring = color_parts(g, bip, &[g2, g1], tp.b_classes(), mix(cfg.seed, 21))?;
    extract_copies(g, bip, tp, &coloring, mix(cfg.seed, 22))
}

/// [`bistar_route`] for the standard bistar on vertices `0..=m`, center `0`
/// of degree `k` mapped into class A.
pub fn decompose_bistar(
    g: &MultiGraph,
    bip: &Bipartition,
    k: usize,
    l: usize,
    cfg: &SplitConfig,
) -> Result<Decomposition, DecompError> {
    let tp = build_pattern_with_root(&bistar(k, l), false, 0)?;
    bistar_route(g, bip, &tp, cfg)
}
