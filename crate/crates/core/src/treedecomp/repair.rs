//! Turning a homomorphic decomposition into an isomorphic one by swapping
//! leaf edges between copies.
//!
//! Blue tree edges are those ending in a leaf of `T_B`; every other edge is
//! red and is never touched. A conflict at `x` is a pair of blue edges of
//! one copy meeting at `x`. In the switching digraph `D(x)` there is an arc
//! `C1 -> C2` whenever `C1` has a blue edge `ax`, `C2` has a blue edge `ab`
//! and `b` is not a vertex of `C1`; swapping the two edges moves one
//! occurrence of `x` from `C1` to `C2` without creating conflicts
//! elsewhere. A directed path from a conflicted copy to a copy with fewer
//! blue edges at `x` lowers the conflict count.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use rand::seq::SliceRandom;

use super::pattern::TreePattern;
use super::trees::longest_path_ends;
use super::{DecompError, Decomposition, Kind, TreeCopy};
use crate::graph::{girth, Bipartition, EdgeId, MultiGraph, Side, Vertex};
use crate::rng::{mix, seeded};
use crate::splitter::{SplitConfig, Strictness};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RepairStats {
    pub conflicts_before: usize,
    pub conflicts_after: usize,
    pub switches: usize,
    /// Conflict count before the first round and after each round.
    pub history: Vec<usize>,
}

/// `(blue tree edge, its T_A end, its T_B leaf)`.
fn blue_slots(tp: &TreePattern) -> Vec<(EdgeId, Vertex, Vertex)> {
    tp.blue_edges()
        .into_iter()
        .map(|te| {
            let e = tp.tree.edge(te).unwrap();
            if tp.is_leaf(e.v) && tp.side(e.v) == Side::B {
                (te, e.u, e.v)
            } else {
                (te, e.v, e.u)
            }
        })
        .collect()
}

fn leaf_counts(copy: &TreeCopy, slots: &[(EdgeId, Vertex, Vertex)]) -> BTreeMap<Vertex, usize> {
    let mut n = BTreeMap::new();
    for &(_, _, leaf) in slots {
        *n.entry(copy.vertex_image[&leaf]).or_insert(0) += 1;
    }
    n
}

fn copy_conflicts(copy: &TreeCopy, slots: &[(EdgeId, Vertex, Vertex)]) -> usize {
    leaf_counts(copy, slots).values().map(|&k| k * k.saturating_sub(1) / 2).sum()
}

/// Pairs of blue edges of one copy sharing their leaf image.
pub fn count_conflicts(tp: &TreePattern, d: &Decomposition) -> usize {
    let slots = blue_slots(tp);
    d.copies.iter().map(|c| copy_conflicts(c, &slots)).sum()
}

fn check_preconditions(
    g: &MultiGraph,
    bip: &Bipartition,
    tp: &TreePattern,
    d: &Decomposition,
    lambda: Option<usize>,
    cfg: &SplitConfig,
) -> Result<(), DecompError> {
    if tp.diam % 2 != 0 {
        return Err(DecompError::PreconditionViolated("repair needs a tree of even diameter".into()));
    }
    if !longest_path_ends(&tp.tree).is_subset(&tp.side_b) {
        return Err(DecompError::PreconditionViolated(
            "pattern must put the ends of all longest paths in T_B".into(),
        ));
    }
    let gi = girth(g);
    if !gi.at_least(tp.diam) {
        return Err(DecompError::GirthTooSmall {
            girth: gi,
            diam: tp.diam,
        });
    }
    if let (Some(l), Strictness::Strict) = (lambda, cfg.strictness) {
        if l < 2 * tp.m {
            return Err(DecompError::PreconditionViolated(format!("need lambda >= {}", 2 * tp.m)));
        }
        let blue = blue_degrees(tp, d);
        if let Some(&a) = bip.class_a.iter().find(|a| blue.get(a).copied().unwrap_or(0) < l) {
            return Err(DecompError::PreconditionViolated(format!(
                "vertex {a} has fewer than {l} blue edges"
            )));
        }
    }
    Ok(())
}

/// Removes all conflicts by switching blue edges along paths of `D(x)`,
/// always serving the lowest conflicted vertex and then the lowest copy.
/// Each round strictly lowers the conflict count; a round that finds no
/// improving path ends with `RepairStalled`.
pub fn repair_conflicts(
    g: &MultiGraph,
    bip: &Bipartition,
    tp: &TreePattern,
    d: &Decomposition,
    lambda: Option<usize>,
    cfg: &SplitConfig,
) -> Result<(Decomposition, RepairStats), DecompError> {
    check_preconditions(g, bip, tp, d, lambda, cfg)?;
    let slots = blue_slots(tp);
    let slot_of: BTreeMap<EdgeId, (Vertex, Vertex)> = slots.iter().map(|&(te, p, l)| (te, (p, l))).collect();
    let mut copies = d.copies.clone();

    // the A-end of every blue slot never changes
    let mut blue_at: BTreeMap<Vertex, Vec<(usize, EdgeId)>> = BTreeMap::new();
    for (i, c) in copies.iter().enumerate() {
        for &(te, p, _) in &slots {
            blue_at.entry(c.vertex_image[&p]).or_default().push((i, te));
        }
    }
    let image_set = |c: &TreeCopy| -> BTreeSet<Vertex> { c.vertex_image.values().copied().collect() };

    let mut total = count_conflicts(tp, d);
    let mut stats = RepairStats {
        conflicts_before: total,
        history: vec![total],
        ..RepairStats::default()
    };
    let guard = total * copies.len().max(1);
    let mut rng = seeded(mix(cfg.seed, 0x5e));

    while total > 0 {
        let mut pick: Option<(Vertex, usize)> = None;
        for (i, c) in copies.iter().enumerate() {
            for (&x, &k) in &leaf_counts(c, &slots) {
                if k >= 2 && pick.is_none_or(|(px, _)| x < px) {
                    pick = Some((x, i));
                }
            }
        }
        let (x, start) = pick.expect("a conflicted copy exists");
        let count_x = |c: &TreeCopy| slots.iter().filter(|&&(_, _, l)| c.vertex_image[&l] == x).count();
        let need = count_x(&copies[start]);

        let mut pred: HashMap<usize, (usize, EdgeId, EdgeId)> = HashMap::new();
        let mut visited = BTreeSet::from([start]);
        let mut queue = VecDeque::from([start]);
        let mut target = None;
        'bfs: while let Some(c) = queue.pop_front() {
            let here = image_set(&copies[c]);
            for &(te, p, l) in &slots {
                if copies[c].vertex_image[&l] != x {
                    continue;
                }
                let a = copies[c].vertex_image[&p];
                let mut cand = blue_at[&a].clone();
                cand.shuffle(&mut rng);
                for (c2, te2) in cand {
                    if visited.contains(&c2) {
                        continue;
                    }
                    let b = copies[c2].vertex_image[&slot_of[&te2].1];
                    if here.contains(&b) {
                        continue;
                    }
                    visited.insert(c2);
                    pred.insert(c2, (c, te, te2));
                    if count_x(&copies[c2]) + 1 < need {
                        target = Some(c2);
                        break 'bfs;
                    }
                    queue.push_back(c2);
                }
            }
        }
        let Some(mut end) = target else {
            return Err(DecompError::RepairStalled { conflicts: total });
        };

        let mut arcs = Vec::new();
        while let Some(&(prev, te, te2)) = pred.get(&end) {
            arcs.push((prev, te, end, te2));
            end = prev;
        }
        let captured: Vec<_> = arcs
            .iter()
            .map(|&(c1, te, c2, te2)| {
                let b = copies[c2].vertex_image[&slot_of[&te2].1];
                (c1, te, copies[c1].edge_map[&te], c2, te2, copies[c2].edge_map[&te2], b)
            })
            .collect();
        for (c1, te, e_ax, c2, te2, e_ab, b) in captured {
            copies[c1].edge_map.insert(te, e_ab);
            copies[c1].vertex_image.insert(slot_of[&te].1, b);
            copies[c2].edge_map.insert(te2, e_ax);
            copies[c2].vertex_image.insert(slot_of[&te2].1, x);
        }
        stats.switches += arcs.len();

        let now: usize = copies.iter().map(|c| copy_conflicts(c, &slots)).sum();
        assert!(now < total, "switch sequence did not lower the conflict count");
        total = now;
        stats.history.push(total);
        if stats.switches > guard {
            return Err(DecompError::RepairStalled { conflicts: total });
        }
    }
    stats.conflicts_after = total;
    let out = Decomposition {
        kind: Kind::Homomorphic,
        copies,
    };
    let kind = out.strongest_kind();
    Ok((Decomposition { kind, ..out }, stats))
}

/// Blue edges at each class-A vertex.
fn blue_degrees(tp: &TreePattern, d: &Decomposition) -> BTreeMap<Vertex, usize> {
    let slots = blue_slots(tp);
    let mut out = BTreeMap::new();
    for c in &d.copies {
        for &(_, p, _) in &slots {
            *out.entry(c.vertex_image[&p]).or_insert(0) += 1;
        }
    }
    out
}

/// Copies whose image is not injective.
pub fn non_injective_copies(d: &Decomposition) -> usize {
    d.copies.iter().filter(|c| !c.is_injective()).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::bipartition;
    use crate::treedecomp::pattern::build_pattern;
    use crate::treedecomp::trees::path;

    /// C4 as one P5 copy whose two ends meet.
    fn c4_copy() -> (MultiGraph, Bipartition, TreePattern, Decomposition) {
        let g = MultiGraph::from_pairs([(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let bip = bipartition(&g).unwrap();
        let tp = build_pattern(&path(4), true).unwrap();
        // tree path 0-1-2-3-4 with 1,3 in T_A; graph class A = {0, 2}
        let copy = TreeCopy {
            edge_map: BTreeMap::from([(0, 0), (1, 3), (2, 2), (3, 1)]),
            vertex_image: BTreeMap::from([(0, 1), (1, 0), (2, 3), (3, 2), (4, 1)]),
        };
        (g, bip, tp, Decomposition { kind: Kind::Homomorphic, copies: vec![copy] })
    }

    #[test]
    fn c4_stalls() {
        let (g, bip, tp, d) = c4_copy();
        assert_eq!(count_conflicts(&tp, &d), 1);
        assert!(matches!(
            repair_conflicts(&g, &bip, &tp, &d, None, &SplitConfig::default()),
            Err(DecompError::RepairStalled { conflicts: 1 })
        ));
    }

    #[test]
    fn conflict_free_input_is_unchanged() {
        let (g, bip, tp, mut d) = c4_copy();
        d.copies.clear();
        let (out, stats) = repair_conflicts(&g, &bip, &tp, &d, None, &SplitConfig::default()).unwrap();
        assert_eq!(out.copies, d.copies);
        assert_eq!(stats.switches, 0);
    }

    #[test]
    fn odd_diameter_is_refused() {
        let (g, bip, _, d) = c4_copy();
        let tp = build_pattern(&path(3), true).unwrap();
        assert!(repair_conflicts(&g, &bip, &tp, &d, None, &SplitConfig::default()).is_err());
    }
}
