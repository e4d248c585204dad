//! Graph surgeries with back-maps: liftings, vertex splittings and
//! identifications.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use thiserror::Error;

use crate::graph::{
    connectivity_avoiding, edge_connectivity, Bipartition, EdgeId, MultiGraph, Side, Vertex,
};
use crate::rng::{mix, seeded};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransformError {
    #[error("vertex {0} has odd degree")]
    OddDegree(Vertex),
    #[error("vertex {0} is incident with a cut-edge")]
    CutEdgeAtVertex(Vertex),
    #[error("no connectivity-preserving pairing found at vertex {0}")]
    NoGoodPairing(Vertex),
    #[error("vertex {0} is not in the graph")]
    UnknownVertex(Vertex),
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("identifying the ends of edge {0} creates a loop")]
    LoopCreated(EdgeId),
}

/// A lifted edge `u-w` stands for the path `u -first- via -second- w`,
/// where `u` and `w` are the ends stored for the lifted edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LiftedPath {
    pub first: EdgeId,
    pub via: Vertex,
    pub second: EdgeId,
}

/// Two parallel edges `at-via` paired into a loop; the loop is dropped
/// from the lifted graph and only recorded here.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LoopPath {
    pub at: Vertex,
    pub via: Vertex,
    pub first: EdgeId,
    pub second: EdgeId,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LiftBackMap {
    pub paths: BTreeMap<EdgeId, LiftedPath>,
    pub loops: Vec<LoopPath>,
}

impl LiftBackMap {
    pub fn is_empty(&self) -> bool {
        self.paths.is_empty() && self.loops.is_empty()
    }

    pub fn lifted_vertices(&self) -> BTreeSet<Vertex> {
        self.paths
            .values()
            .map(|p| p.via)
            .chain(self.loops.iter().map(|l| l.via))
            .collect()
    }

    /// Number of loops recorded at each surviving vertex.
    pub fn loops_at(&self) -> BTreeMap<Vertex, usize> {
        let mut out = BTreeMap::new();
        for l in &self.loops {
            *out.entry(l.at).or_insert(0) += 1;
        }
        out
    }

    /// Original edge ids consumed by the lifting, each listed once.
    pub fn original_edges(&self) -> Vec<EdgeId> {
        self.paths
            .values()
            .flat_map(|p| [p.first, p.second])
            .chain(self.loops.iter().flat_map(|l| [l.first, l.second]))
            .collect()
    }

    fn absorb(&mut self, other: LiftBackMap) {
        self.paths.extend(other.paths);
        self.loops.extend(other.loops);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LiftOptions {
    /// Connectivity to keep; `None` keeps the input's edge-connectivity.
    pub target: Option<usize>,
    /// Pair parallel edges into loops when unavoidable or when the search
    /// needs it. Loops are recorded in the back-map, never in the graph.
    pub allow_loops: bool,
    /// Lower the target step by step instead of failing.
    pub best_effort: bool,
    pub seed: u64,
}

impl Default for LiftOptions {
    fn default() -> Self {
        LiftOptions {
            target: None,
            allow_loops: false,
            best_effort: false,
            seed: 0,
        }
    }
}

const RANDOM_PAIRINGS: u64 = 6;

struct Pairing {
    pairs: Vec<(EdgeId, EdgeId)>,
}

/// Deletes `v` and pairs its incident edges into lifted edges, keeping the
/// edge-connectivity among the remaining vertices.
pub fn lift_vertex(g: &MultiGraph, v: Vertex) -> Result<(MultiGraph, LiftBackMap), TransformError> {
    lift_vertex_with(g, v, &LiftOptions::default())
}

pub fn lift_vertex_with(
    g: &MultiGraph,
    v: Vertex,
    opts: &LiftOptions,
) -> Result<(MultiGraph, LiftBackMap), TransformError> {
    if !g.has_vertex(v) {
        return Err(TransformError::UnknownVertex(v));
    }
    let inc = g.incident_edges(v);
    if inc.len() % 2 == 1 {
        return Err(TransformError::OddDegree(v));
    }
    let full = edge_connectivity(g);
    let mut target = opts.target.map_or(full, |t| t.min(full));
    loop {
        if let Some(p) = find_pairing(g, v, &inc, target as u64, opts) {
            return Ok(apply_pairing(g, v, &p));
        }
        if opts.best_effort && target > 0 {
            log::warn!("lifting at {v}: lowering kept connectivity to {}", target - 1);
            target -= 1;
            continue;
        }
        if has_cut_edge_at(g, v) {
            return Err(TransformError::CutEdgeAtVertex(v));
        }
        return Err(TransformError::NoGoodPairing(v));
    }
}

fn has_cut_edge_at(g: &MultiGraph, v: Vertex) -> bool {
    let before = g.components().len();
    g.incident_edges(v)
        .into_iter()
        .any(|e| g.without_edges(&[e]).components().len() > before)
}

fn other_end(g: &MultiGraph, e: EdgeId, v: Vertex) -> Vertex {
    g.edge(e).expect("incident edge").other(v)
}

fn find_pairing(
    g: &MultiGraph,
    v: Vertex,
    inc: &[EdgeId],
    target: u64,
    opts: &LiftOptions,
) -> Option<Pairing> {
    if inc.is_empty() {
        return Some(Pairing { pairs: Vec::new() });
    }
    let half = inc.len() / 2;
    let mut by_nbr: BTreeMap<Vertex, Vec<EdgeId>> = BTreeMap::new();
    for &e in inc {
        by_nbr.entry(other_end(g, e, v)).or_default().push(e);
    }
    let max_mult = by_nbr.values().map(Vec::len).max().unwrap_or(0);
    if max_mult > half && !opts.allow_loops {
        return None;
    }

    // Grouping edges by neighbor and pairing position i with i + d/2 avoids
    // loops whenever no neighbor holds more than half of the edges.
    for attempt in 0..RANDOM_PAIRINGS {
        let mut rng = seeded(mix(opts.seed ^ v, attempt));
        let mut groups: Vec<Vec<EdgeId>> = by_nbr.values().cloned().collect();
        groups.shuffle(&mut rng);
        for grp in &mut groups {
            grp.shuffle(&mut rng);
        }
        let flat: Vec<EdgeId> = groups.into_iter().flatten().collect();
        let pairs: Vec<(EdgeId, EdgeId)> = (0..half).map(|i| (flat[i], flat[i + half])).collect();
        let p = Pairing { pairs };
        let (lifted, _) = apply_pairing(g, v, &p);
        if connectivity_avoiding(&lifted, v, target) >= target {
            return Some(p);
        }
    }

    let mut budget = 8 * inc.len() * inc.len() + 64;
    let mut rng = seeded(mix(opts.seed ^ v, 0xBAC));
    let mut pairs = Vec::new();
    let remaining: Vec<EdgeId> = inc.to_vec();
    if backtrack(g, v, remaining, &mut pairs, target, opts, &mut budget, &mut rng) {
        Some(Pairing { pairs })
    } else {
        None
    }
}

#[allow(clippy::too_many_arguments)]
fn backtrack(
    g: &MultiGraph,
    v: Vertex,
    remaining: Vec<EdgeId>,
    pairs: &mut Vec<(EdgeId, EdgeId)>,
    target: u64,
    opts: &LiftOptions,
    budget: &mut usize,
    rng: &mut crate::rng::Rng,
) -> bool {
    if remaining.is_empty() {
        return true;
    }
    let e = remaining[0];
    let x = other_end(g, e, v);
    let mut partners: Vec<EdgeId> = Vec::new();
    let mut tried_nbrs = BTreeSet::new();
    let mut rest: Vec<EdgeId> = remaining[1..].to_vec();
    rest.shuffle(rng);
    // loops last; one representative per neighbor since parallel partners
    // give isomorphic results
    rest.sort_by_key(|&f| other_end(g, f, v) == x);
    for &f in &rest {
        let y = other_end(g, f, v);
        if (y == x && !opts.allow_loops) || !tried_nbrs.insert(y) {
            continue;
        }
        partners.push(f);
    }
    for f in partners {
        if *budget == 0 {
            return false;
        }
        *budget -= 1;
        pairs.push((e, f));
        let partial = split_off(g, v, pairs);
        if connectivity_avoiding(&partial, v, target) >= target {
            let next: Vec<EdgeId> = remaining[1..].iter().copied().filter(|&h| h != f).collect();
            if backtrack(g, v, next, pairs, target, opts, budget, rng) {
                return true;
            }
        }
        pairs.pop();
    }
    false
}

/// `g` with the given pairs at `v` split off; `v` keeps its other edges.
fn split_off(g: &MultiGraph, v: Vertex, pairs: &[(EdgeId, EdgeId)]) -> MultiGraph {
    let mut h = g.clone();
    for &(e, f) in pairs {
        let x = other_end(g, e, v);
        let y = other_end(g, f, v);
        h.remove_edge(e);
        h.remove_edge(f);
        if x != y {
            h.push_edge(x, y).expect("fresh id");
        }
    }
    h
}

fn apply_pairing(g: &MultiGraph, v: Vertex, p: &Pairing) -> (MultiGraph, LiftBackMap) {
    let mut h = g.clone();
    let mut back = LiftBackMap::default();
    for &(e, f) in &p.pairs {
        let x = other_end(g, e, v);
        let y = other_end(g, f, v);
        if x == y {
            back.loops.push(LoopPath {
                at: x,
                via: v,
                first: e,
                second: f,
            });
        } else {
            let id = h.push_edge(x, y).expect("fresh id");
            back.paths.insert(
                id,
                LiftedPath {
                    first: e,
                    via: v,
                    second: f,
                },
            );
        }
    }
    h.remove_vertex(v);
    (h, back)
}

/// Lifts every vertex of one class in ascending id order. The class is
/// independent, so no lifted edge is ever lifted again and the back-map
/// refers to input edges only.
pub fn lift_side(
    g: &MultiGraph,
    bip: &Bipartition,
    side: Side,
    opts: &LiftOptions,
) -> Result<(MultiGraph, LiftBackMap), TransformError> {
    let mut h = g.clone();
    let mut back = LiftBackMap::default();
    for (i, &v) in bip.class(side).iter().enumerate() {
        if !h.has_vertex(v) {
            continue;
        }
        let step = LiftOptions {
            seed: mix(opts.seed, i as u64),
            ..*opts
        };
        let (next, b) = lift_vertex_with(&h, v, &step)?;
        h = next;
        back.absorb(b);
    }
    Ok((h, back))
}

/// New vertices created by splitting, mapped to the vertex they came from.
/// Vertices not listed map to themselves.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SplitBackMap {
    pub origin: BTreeMap<Vertex, Vertex>,
}

impl SplitBackMap {
    pub fn original(&self, v: Vertex) -> Vertex {
        self.origin.get(&v).copied().unwrap_or(v)
    }

    /// Contracts every fiber back into its original vertex.
    pub fn identify(&self, g: &MultiGraph) -> MultiGraph {
        let mut h = MultiGraph::new();
        for v in g.vertices() {
            h.add_vertex(self.original(v));
        }
        for (id, e) in g.edges() {
            h.add_edge(id, self.original(e.u), self.original(e.v))
                .expect("splitting never separates the ends of an edge");
        }
        for (&v, &s) in g.sides() {
            h.set_side(self.original(v), s);
        }
        h
    }
}

/// Replaces `v` by one vertex per group; the first group keeps the id `v`,
/// later groups get fresh ids. Side tags are inherited.
pub fn split_vertex(
    g: &MultiGraph,
    v: Vertex,
    groups: &[Vec<EdgeId>],
) -> Result<(MultiGraph, SplitBackMap), TransformError> {
    let mut plan = BTreeMap::new();
    plan.insert(v, groups.to_vec());
    split_vertices(g, &plan)
}

/// Splits several vertices at once.
pub fn split_vertices(
    g: &MultiGraph,
    plan: &BTreeMap<Vertex, Vec<Vec<EdgeId>>>,
) -> Result<(MultiGraph, SplitBackMap), TransformError> {
    let mut h = g.clone();
    let mut back = SplitBackMap::default();
    let mut fresh = g.next_vertex_id();
    for (&v, groups) in plan {
        if !g.has_vertex(v) {
            return Err(TransformError::UnknownVertex(v));
        }
        let inc: BTreeSet<EdgeId> = g.incident_edges(v).into_iter().collect();
        let listed: Vec<EdgeId> = groups.iter().flatten().copied().collect();
        let set: BTreeSet<EdgeId> = listed.iter().copied().collect();
        if set.len() != listed.len() || set != inc || (groups.iter().any(Vec::is_empty) && !inc.is_empty()) {
            return Err(TransformError::InvalidPartition(format!(
                "groups at vertex {v} do not partition its edges"
            )));
        }
        let side = g.side(v);
        for grp in groups.iter().skip(1) {
            let w = fresh;
            fresh += 1;
            back.origin.insert(w, v);
            match side {
                Some(s) => h.set_side(w, s),
                None => h.add_vertex(w),
            }
            for &id in grp {
                let e = h.remove_edge(id).expect("edge present");
                let (a, b) = if e.u == v { (w, e.v) } else { (e.u, w) };
                h.add_edge(id, a, b).expect("same id");
            }
        }
    }
    Ok((h, back))
}

/// Identifies each class of `classes` into a single vertex (the smallest id
/// in the class), keeping every edge.
pub fn homomorphic_image(t: &MultiGraph, classes: &[BTreeSet<Vertex>]) -> Result<MultiGraph, TransformError> {
    let mut rep = BTreeMap::new();
    for class in classes {
        let Some(&r) = class.iter().next() else {
            return Err(TransformError::InvalidPartition("empty class".into()));
        };
        for &x in class {
            if rep.insert(x, r).is_some() {
                return Err(TransformError::InvalidPartition(format!("vertex {x} in two classes")));
            }
        }
    }
    if rep.len() != t.vertex_count() || t.vertices().any(|x| !rep.contains_key(&x)) {
        return Err(TransformError::InvalidPartition("classes do not cover the vertex set".into()));
    }
    let mut h = MultiGraph::new();
    for class in classes {
        h.add_vertex(*class.iter().next().unwrap());
    }
    for (id, e) in t.edges() {
        let (a, b) = (rep[&e.u], rep[&e.v]);
        if a == b {
            return Err(TransformError::LoopCreated(id));
        }
        h.add_edge(id, a, b).expect("ids copied");
    }
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{bipartition, is_k_edge_connected};

    fn c4() -> MultiGraph {
        MultiGraph::from_pairs([(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap()
    }

    #[test]
    fn suppression_on_a_path() {
        let p = MultiGraph::from_pairs([(0, 1), (1, 2)]).unwrap();
        let (h, back) = lift_vertex(&p, 1).unwrap();
        assert_eq!(h.edge_count(), 1);
        assert_eq!(h.vertex_count(), 2);
        let (&id, path) = back.paths.iter().next().unwrap();
        let e = h.edge(id).unwrap();
        assert!(e.joins(0, 2));
        assert_eq!(path.via, 1);
    }

    #[test]
    fn c4_lift_gives_triangle() {
        let (h, _) = lift_vertex(&c4(), 0).unwrap();
        assert_eq!(h.vertex_count(), 3);
        assert_eq!(h.edge_count(), 3);
        assert!(is_k_edge_connected(&h, 2));
    }

    #[test]
    fn bundle_lift_needs_loops() {
        let g = MultiGraph::from_pairs((0..4).map(|_| (0, 1))).unwrap();
        assert!(matches!(lift_vertex(&g, 0), Err(TransformError::NoGoodPairing(0))));
        let opts = LiftOptions {
            allow_loops: true,
            ..LiftOptions::default()
        };
        let (h, back) = lift_vertex_with(&g, 0, &opts).unwrap();
        assert_eq!(h.edge_count(), 0);
        assert_eq!(back.loops.len(), 2);
        assert_eq!(back.loops_at()[&1], 2);
    }

    #[test]
    fn odd_degree_is_rejected() {
        let star = MultiGraph::from_pairs([(0, 1), (0, 2), (0, 3)]).unwrap();
        assert_eq!(lift_vertex(&star, 0), Err(TransformError::OddDegree(0)));
    }

    #[test]
    fn lift_side_of_c4() {
        let g = c4();
        let bip = bipartition(&g).unwrap();
        let (h, back) = lift_side(&g, &bip, Side::A, &LiftOptions::default()).unwrap();
        assert_eq!(h.vertex_set(), &bip.class_b);
        assert_eq!(h.edge_count(), 2);
        assert_eq!(h.multiplicity(1, 3), 2);
        let mut covered = back.original_edges();
        covered.sort_unstable();
        assert_eq!(covered, vec![0, 1, 2, 3]);
    }

    #[test]
    fn lift_side_of_k24_keeps_connectivity() {
        let mut pairs = Vec::new();
        for a in 0..2 {
            for b in 2..6 {
                pairs.push((a, b));
            }
        }
        let g = MultiGraph::from_pairs(pairs).unwrap();
        let bip = bipartition(&g).unwrap();
        let (h, back) = lift_side(&g, &bip, Side::A, &LiftOptions::default()).unwrap();
        assert_eq!(h.edge_count(), 4);
        assert!(is_k_edge_connected(&h, 2));
        assert_eq!(back.paths.len(), 4);
    }

    #[test]
    fn lift_star_center() {
        let g = MultiGraph::from_pairs([(0, 1), (0, 2)]).unwrap();
        let bip = bipartition(&g).unwrap();
        assert!(bip.class_a.contains(&0));
        let (h, _) = lift_side(&g, &bip, Side::A, &LiftOptions::default()).unwrap();
        assert_eq!(h.multiplicity(1, 2), 1);
    }

    #[test]
    fn split_and_identify_round_trip() {
        let star = MultiGraph::from_pairs((1..=6).map(|l| (0, l))).unwrap();
        let groups = vec![vec![0, 1], vec![2, 3], vec![4, 5]];
        let (h, back) = split_vertex(&star, 0, &groups).unwrap();
        assert_eq!(h.components().len(), 3);
        assert!(h.degrees().values().all(|&d| d <= 2));
        assert_eq!(back.identify(&h), star);
    }

    #[test]
    fn split_rejects_bad_groups() {
        let star = MultiGraph::from_pairs((1..=3).map(|l| (0, l))).unwrap();
        assert!(split_vertex(&star, 0, &[vec![0, 1]]).is_err());
        assert!(split_vertex(&star, 0, &[vec![0, 1], vec![1, 2]]).is_err());
        let (h, _) = split_vertex(&star, 0, &[vec![0, 1, 2]]).unwrap();
        assert_eq!(h, star);
    }

    #[test]
    fn p5_ends_identified_give_c4() {
        let p5 = MultiGraph::from_pairs([(0, 1), (1, 2), (2, 3), (3, 4)]).unwrap();
        let classes: Vec<BTreeSet<Vertex>> =
            vec![[0, 4].into(), [1].into(), [2].into(), [3].into()];
        let h = homomorphic_image(&p5, &classes).unwrap();
        assert_eq!(h.vertex_count(), 4);
        assert!(h.degrees().values().all(|&d| d == 2));
        assert!(h.is_connected());
    }

    #[test]
    fn two_class_image_is_a_bundle() {
        let t = MultiGraph::from_pairs([(0, 1), (1, 2), (1, 3), (3, 4)]).unwrap();
        let bip = bipartition(&t).unwrap();
        let h = homomorphic_image(&t, &[bip.class_a.clone(), bip.class_b.clone()]).unwrap();
        assert_eq!(h.vertex_count(), 2);
        assert_eq!(h.edge_count(), 4);
        let bad = homomorphic_image(&t, &[[0, 1].into(), [2, 3, 4].into()]);
        assert_eq!(bad, Err(TransformError::LoopCreated(0)));
    }
}
