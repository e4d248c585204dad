//! Turning an equitable coloring into homomorphic copies.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;

use super::coloring::EdgeColoring;
use super::pattern::TreePattern;
use super::{TreeCopy, DecompError, Decomposition, Kind};
use crate::graph::{Bipartition, EdgeId, MultiGraph, Side, Vertex};
use crate::rng::seeded;

/// Grows all copies at once, attaching tree edges breadth-first from the
/// root. When edge `xy` is attached, the copies whose image of `x` is `v`
/// take the edges of color `c(xy)` at `v` one each; the equations at `x`
/// make both counts equal. `T_A` always maps into class A.
pub fn extract_copies(
    g: &MultiGraph,
    bip: &Bipartition,
    tp: &TreePattern,
    coloring: &EdgeColoring,
    seed: u64,
) -> Result<Decomposition, DecompError> {
    let mut rng = seeded(seed);
    let mut by_color: BTreeMap<usize, Vec<EdgeId>> = BTreeMap::new();
    for id in g.edge_ids() {
        let c = coloring
            .color(id)
            .ok_or_else(|| DecompError::PreconditionViolated(format!("edge {id} has no color")))?;
        by_color.entry(c).or_default().push(id);
    }
    let end_on = |side: Side, id: EdgeId| {
        let e = g.edge(id).unwrap();
        match side {
            Side::A => bip.a_end(e),
            Side::B => bip.b_end(e),
        }
    };

    let order = tp.attachment_order();
    let (first, root, leaf) = order[0];
    let mut copies: Vec<TreeCopy> = by_color
        .get(&tp.color_of(first))
        .map(Vec::as_slice)
        .unwrap_or_default()
        .iter()
        .map(|&id| TreeCopy {
            edge_map: BTreeMap::from([(first, id)]),
            vertex_image: BTreeMap::from([
                (root, end_on(tp.side(root), id)),
                (leaf, end_on(tp.side(leaf), id)),
            ]),
        })
        .collect();

    for &(te, x, y) in &order[1..] {
        let c = tp.color_of(te);
        let mut waiting: BTreeMap<Vertex, Vec<usize>> = BTreeMap::new();
        for (i, copy) in copies.iter().enumerate() {
            waiting.entry(copy.vertex_image[&x]).or_default().push(i);
        }
        let mut offered: BTreeMap<Vertex, Vec<EdgeId>> = BTreeMap::new();
        for &id in by_color.get(&c).map(Vec::as_slice).unwrap_or_default() {
            offered.entry(end_on(tp.side(x), id)).or_default().push(id);
        }
        for (v, idxs) in &waiting {
            let mut edges = offered.remove(v).unwrap_or_default();
            if edges.len() != idxs.len() {
                return Err(DecompError::EquationsViolated { vertex: *v, color: c });
            }
            edges.shuffle(&mut rng);
            for (&i, id) in idxs.iter().zip(edges) {
                copies[i].edge_map.insert(te, id);
                copies[i].vertex_image.insert(y, end_on(tp.side(y), id));
            }
        }
        if let Some((&v, _)) = offered.iter().next() {
            return Err(DecompError::EquationsViolated { vertex: v, color: c });
        }
    }

    let d = Decomposition {
        kind: Kind::Homomorphic,
        copies,
    };
    assert_eq!(d.copies.len() * tp.m, g.edge_count());
    Ok(d)
}
