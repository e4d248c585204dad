//! Small trees: named shapes, canonical forms and enumeration up to
//! isomorphism. Trees use vertices `0..=m` and edge ids `0..m`.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::graph::{MultiGraph, Vertex};

fn from_edges(pairs: &[(Vertex, Vertex)]) -> MultiGraph {
    let mut t = MultiGraph::from_pairs(pairs.iter().copied()).expect("tree edges are loopless");
    if pairs.is_empty() {
        t.add_vertex(0);
    }
    t
}

/// Path with `m` edges.
pub fn path(m: usize) -> MultiGraph {
    let pairs: Vec<_> = (0..m as u64).map(|i| (i, i + 1)).collect();
    from_edges(&pairs)
}

/// Star with `m` edges, center 0.
pub fn star(m: usize) -> MultiGraph {
    let pairs: Vec<_> = (1..=m as u64).map(|i| (0, i)).collect();
    from_edges(&pairs)
}

/// Bistar `S(k, l)`: adjacent centers 0 (degree `k`) and 1 (degree `l`).
pub fn bistar(k: usize, l: usize) -> MultiGraph {
    assert!(k >= 1 && l >= 1);
    let mut pairs = vec![(0, 1)];
    let mut next = 2;
    for _ in 1..k {
        pairs.push((0, next));
        next += 1;
    }
    for _ in 1..l {
        pairs.push((1, next));
        next += 1;
    }
    from_edges(&pairs)
}

/// BFS distances from `s` in a tree.
fn distances(t: &MultiGraph, s: Vertex) -> BTreeMap<Vertex, usize> {
    let inc = t.incidence();
    let mut dist = BTreeMap::from([(s, 0)]);
    let mut queue = VecDeque::from([s]);
    while let Some(x) = queue.pop_front() {
        for &id in &inc[&x] {
            let y = t.edge(id).unwrap().other(x);
            if !dist.contains_key(&y) {
                dist.insert(y, dist[&x] + 1);
                queue.push_back(y);
            }
        }
    }
    dist
}

/// Longest distance between two vertices.
pub fn diameter(t: &MultiGraph) -> usize {
    let Some(s) = t.vertices().next() else { return 0 };
    let d0 = distances(t, s);
    let far = *d0.iter().max_by_key(|(&v, &d)| (d, std::cmp::Reverse(v))).unwrap().0;
    *distances(t, far).values().max().unwrap()
}

/// Vertices that are an end of some longest path.
pub fn longest_path_ends(t: &MultiGraph) -> BTreeSet<Vertex> {
    let diam = diameter(t);
    let mut ends = BTreeSet::new();
    for v in t.vertices() {
        if distances(t, v).values().any(|&d| d == diam) {
            ends.insert(v);
        }
    }
    ends
}

/// One or two central vertices (minimum eccentricity).
pub fn centers(t: &MultiGraph) -> Vec<Vertex> {
    let ecc: BTreeMap<Vertex, usize> = t
        .vertices()
        .map(|v| (v, *distances(t, v).values().max().unwrap()))
        .collect();
    let best = *ecc.values().min().unwrap();
    ecc.into_iter().filter(|&(_, e)| e == best).map(|(v, _)| v).collect()
}

fn rooted_code(t: &MultiGraph, inc: &BTreeMap<Vertex, Vec<u64>>, x: Vertex, parent: Option<Vertex>) -> String {
    let mut kids: Vec<String> = inc[&x]
        .iter()
        .map(|&id| t.edge(id).unwrap().other(x))
        .filter(|&y| Some(y) != parent)
        .map(|y| rooted_code(t, inc, y, Some(x)))
        .collect();
    kids.sort();
    format!("({})", kids.concat())
}

/// Isomorphism invariant: the smallest parenthesis encoding over the roots
/// at the centers.
pub fn canonical_form(t: &MultiGraph) -> String {
    let inc = t.incidence();
    centers(t)
        .into_iter()
        .map(|c| rooted_code(t, &inc, c, None))
        .min()
        .unwrap_or_default()
}

pub fn is_isomorphic(s: &MultiGraph, t: &MultiGraph) -> bool {
    s.edge_count() == t.edge_count() && canonical_form(s) == canonical_form(t)
}

/// Every tree with `m` edges up to isomorphism, in a fixed order.
pub fn all_trees(m: usize) -> Vec<MultiGraph> {
    let mut level: BTreeMap<String, MultiGraph> = BTreeMap::new();
    let single = path(0);
    level.insert(canonical_form(&single), single);
    for _ in 0..m {
        let mut next = BTreeMap::new();
        for t in level.values() {
            let fresh = t.next_vertex_id();
            for v in t.vertices() {
                let mut grown = t.clone();
                grown.push_edge(v, fresh).unwrap();
                next.entry(canonical_form(&grown)).or_insert(grown);
            }
        }
        level = next;
    }
    level.into_values().collect()
}

/// `(k, l)` with `k <= l` when `t` is a bistar with two non-leaf centers.
pub fn bistar_shape(t: &MultiGraph) -> Option<(usize, usize)> {
    if !t.is_tree() || diameter(t) != 3 {
        return None;
    }
    let mut inner: Vec<usize> = t.vertices().map(|v| t.degree(v)).filter(|&d| d > 1).collect();
    inner.sort();
    match inner[..] {
        [k, l] => Some((k, l)),
        _ => None,
    }
}
