//! Decompositions into paths with four edges, for graphs whose class-A
//! degrees are merely even.
//!
//! Lifting class A turns every edge pair at an A-vertex into one edge on
//! class B. An orientation of the lifted graph with all outdegrees even
//! makes each lifted edge a directed 2-path `u -> a -> w` in `G`: its first
//! edge is red, its second blue. Red edges are paired at class-B vertices
//! into the middles of the paths, and each A-vertex hands its blue edges to
//! the red path ends sitting there.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;

use super::pattern::{build_pattern, TreePattern};
use super::repair::{repair_conflicts, RepairStats};
use super::trees::path;
use super::{DecompError, Decomposition, Kind, TreeCopy};
use crate::graph::{is_k_edge_connected, Bipartition, EdgeId, MultiGraph, Side, Vertex};
use crate::orientation::{orient_mod, pull_back, ResidueTarget};
use crate::rng::{mix, seeded};
use crate::splitter::SplitConfig;
use crate::transform::{lift_side, LiftOptions};

/// The pattern used for the copies: path `0-1-2-3-4` with blue end edges
/// `0` and `3`, red middle edges `1` and `2`.
pub fn p5_pattern() -> TreePattern {
    build_pattern(&path(4), true).expect("P5 is a tree")
}

fn check(g: &MultiGraph, bip: &Bipartition, kind: Kind) -> Result<(), DecompError> {
    let fail = |s: &str| Err(DecompError::PreconditionViolated(s.into()));
    if !bip.is_valid_for(g) {
        return Err(DecompError::NotBipartite);
    }
    if !g.is_simple() {
        return fail("graph must be simple");
    }
    if g.edge_count() % 4 != 0 {
        return fail("edge count must be divisible by 4");
    }
    if bip.class_a.iter().any(|&a| g.degree(a) % 2 != 0) {
        return fail("class-A degrees must be even");
    }
    if !is_k_edge_connected(g, 2) {
        return fail("graph must be 2-edge-connected");
    }
    if kind == Kind::Isomorphic && bip.class_a.iter().any(|&a| g.degree(a) < 4) {
        return fail("isomorphic mode needs class-A minimum degree 4");
    }
    Ok(())
}

/// Matchings tried in isomorphic mode before a stalled repair is reported.
const RESTARTS: u64 = 32;

/// Homomorphic P5-decomposition of a simple 2-edge-connected bipartite graph
/// with `4 | e(G)` and even class-A degrees. With `Kind::Isomorphic` (and
/// class-A minimum degree 4) conflicts are then switched away; when the
/// switching stalls, a fresh red/blue matching is drawn.
pub fn decompose_p5(
    g: &MultiGraph,
    bip: &Bipartition,
    kind: Kind,
    cfg: &SplitConfig,
) -> Result<(Decomposition, Option<RepairStats>), DecompError> {
    check(g, bip, kind)?;
    if kind == Kind::Homomorphic {
        let d = matched_paths(g, bip, cfg.seed)?;
        let kind = d.strongest_kind();
        return Ok((Decomposition { kind, ..d }, None));
    }
    let mut last = None;
    for r in 0..RESTARTS {
        let seed = if r == 0 { cfg.seed } else { mix(cfg.seed, 0x9e00 + r) };
        let d = matched_paths(g, bip, seed)?;
        match repair_conflicts(g, bip, &p5_pattern(), &d, None, &SplitConfig { seed, ..*cfg }) {
            Ok((fixed, stats)) => return Ok((fixed, Some(stats))),
            Err(e @ DecompError::RepairStalled { .. }) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.expect("at least one restart"))
}

fn matched_paths(g: &MultiGraph, bip: &Bipartition, seed: u64) -> Result<Decomposition, DecompError> {
    let opts = LiftOptions {
        target: Some(2),
        allow_loops: false,
        best_effort: true,
        seed,
    };
    let (lifted, back) = lift_side(g, bip, Side::A, &opts)?;
    let o = orient_mod(&lifted, &ResidueTarget::zero(2), mix(seed, 1))?;
    let full = pull_back(g, &o, &back)?;

    let mut red_at: BTreeMap<Vertex, Vec<EdgeId>> = BTreeMap::new();
    let mut blue_at: BTreeMap<Vertex, Vec<EdgeId>> = BTreeMap::new();
    for id in g.edge_ids() {
        let tail = full.tail(id).expect("orientation is total");
        if bip.side(tail) == Some(Side::B) {
            red_at.entry(tail).or_default().push(id);
        } else {
            blue_at.entry(tail).or_default().push(id);
        }
    }

    let mut rng = seeded(mix(seed, 2));
    // red paths (a1, red1, u, red2, a2)
    let mut middles: Vec<(Vertex, EdgeId, Vertex, EdgeId, Vertex)> = Vec::new();
    for (&u, reds) in &mut red_at {
        assert!(reds.len() % 2 == 0, "odd red degree at {u}");
        reds.shuffle(&mut rng);
        for pair in reds.chunks(2) {
            let a1 = g.edge(pair[0]).unwrap().other(u);
            let a2 = g.edge(pair[1]).unwrap().other(u);
            middles.push((a1, pair[0], u, pair[1], a2));
        }
    }
    let mut ends_at: BTreeMap<Vertex, Vec<(usize, bool)>> = BTreeMap::new();
    for (i, &(a1, _, _, _, a2)) in middles.iter().enumerate() {
        ends_at.entry(a1).or_default().push((i, false));
        ends_at.entry(a2).or_default().push((i, true));
    }
    let mut blue_for: BTreeMap<(usize, bool), EdgeId> = BTreeMap::new();
    for (a, ends) in &ends_at {
        let mut blues = blue_at.remove(a).unwrap_or_default();
        assert_eq!(blues.len(), ends.len(), "red and blue degrees differ at {a}");
        blues.shuffle(&mut rng);
        for (&end, b) in ends.iter().zip(blues) {
            blue_for.insert(end, b);
        }
    }
    assert!(blue_at.values().all(Vec::is_empty));

    let copies: Vec<TreeCopy> = middles
        .iter()
        .enumerate()
        .map(|(i, &(a1, r1, u, r2, a2))| {
            let (b1, b2) = (blue_for[&(i, false)], blue_for[&(i, true)]);
            TreeCopy {
                edge_map: BTreeMap::from([(0, b1), (1, r1), (2, r2), (3, b2)]),
                vertex_image: BTreeMap::from([
                    (0, g.edge(b1).unwrap().other(a1)),
                    (1, a1),
                    (2, u),
                    (3, a2),
                    (4, g.edge(b2).unwrap().other(a2)),
                ]),
            }
        })
        .collect();
    Ok(Decomposition {
        kind: Kind::Homomorphic,
        copies,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::bipartition;

    fn kab(na: u64, nb: u64) -> MultiGraph {
        let mut pairs = Vec::new();
        for a in 0..na {
            for b in 0..nb {
                pairs.push((a, na + b));
            }
        }
        MultiGraph::from_pairs(pairs).unwrap()
    }

    #[test]
    fn c4_is_one_homomorphic_copy() {
        let c4 = MultiGraph::from_pairs([(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let bip = bipartition(&c4).unwrap();
        let (d, _) = decompose_p5(&c4, &bip, Kind::Homomorphic, &SplitConfig::default()).unwrap();
        assert_eq!(d.copies.len(), 1);
        assert_eq!(d.kind, Kind::Homomorphic);
        assert!(matches!(
            decompose_p5(&c4, &bip, Kind::Isomorphic, &SplitConfig::default()),
            Err(DecompError::PreconditionViolated(_))
        ));
    }

    #[test]
    fn k44_gives_four_paths() {
        let g = kab(4, 4);
        let bip = bipartition(&g).unwrap();
        for seed in 0..10 {
            let (d, stats) = decompose_p5(&g, &bip, Kind::Isomorphic, &SplitConfig::attempt(seed)).unwrap();
            assert_eq!(d.copies.len(), 4);
            assert_eq!(d.kind, Kind::Isomorphic);
            assert_eq!(stats.unwrap().conflicts_after, 0);
        }
    }

    #[test]
    fn c8_splits_into_two_copies() {
        let pairs: Vec<(u64, u64)> = (0..8).map(|i| (i, (i + 1) % 8)).collect();
        let g = MultiGraph::from_pairs(pairs).unwrap();
        let bip = bipartition(&g).unwrap();
        let (d, _) = decompose_p5(&g, &bip, Kind::Homomorphic, &SplitConfig::default()).unwrap();
        assert_eq!(d.copies.len(), 2);
        assert!(decompose_p5(&g, &bip, Kind::Isomorphic, &SplitConfig::default()).is_err());
    }
}
