//! Independent certificate checking.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use crate::graph::{girth, EdgeId, Girth, MultiGraph, Vertex};
use crate::treedecomp::trees::diameter;
use crate::treedecomp::{Decomposition, Kind, TreeCopy};

/// Outcome of searching for an edge-bijective homomorphism `T -> H`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CopyVerdict {
    pub homomorphic: bool,
    pub isomorphic: bool,
    /// Tree vertex to host vertex, when a homomorphism exists.
    pub witness: Option<BTreeMap<Vertex, Vertex>>,
}

type PairCounts = BTreeMap<(Vertex, Vertex), usize>;

fn key(a: Vertex, b: Vertex) -> (Vertex, Vertex) {
    (a.min(b), a.max(b))
}

struct Search<'a> {
    order: &'a [(Vertex, Vertex)],
    nbrs: &'a BTreeMap<Vertex, BTreeSet<Vertex>>,
    left: PairCounts,
    image: BTreeMap<Vertex, Vertex>,
    used: BTreeSet<Vertex>,
    injective: bool,
}

impl Search<'_> {
    fn go(&mut self, i: usize) -> bool {
        let Some(&(child, parent)) = self.order.get(i) else {
            return true;
        };
        let p = self.image[&parent];
        let candidates: Vec<Vertex> = self.nbrs[&p].iter().copied().collect();
        for w in candidates {
            if self.injective && self.used.contains(&w) {
                continue;
            }
            let slot = self.left.get_mut(&key(p, w)).unwrap();
            if *slot == 0 {
                continue;
            }
            *slot -= 1;
            self.image.insert(child, w);
            let fresh = self.used.insert(w);
            if self.go(i + 1) {
                return true;
            }
            if fresh {
                self.used.remove(&w);
            }
            self.image.remove(&child);
            *self.left.get_mut(&key(p, w)).unwrap() += 1;
        }
        false
    }
}

/// Decides whether `H` is a homomorphic copy of the tree `T` by
/// backtracking over vertex images; parallel edges of `H` are handled as
/// multiplicities. Injective maps are tried first.
pub fn verify_copy(h: &MultiGraph, t: &MultiGraph) -> CopyVerdict {
    let no = CopyVerdict {
        homomorphic: false,
        isomorphic: false,
        witness: None,
    };
    if !t.is_tree() || h.edge_count() != t.edge_count() {
        return no;
    }
    let Some(root) = t.vertices().next() else { return no };
    if t.edge_count() == 0 {
        let Some(w) = h.vertices().next() else { return no };
        return CopyVerdict {
            homomorphic: true,
            isomorphic: true,
            witness: Some(BTreeMap::from([(root, w)])),
        };
    }
    let host = h.edge_subgraph(h.edge_ids());
    if !host.is_connected() {
        return no;
    }
    let inc = t.incidence();
    let mut order = Vec::new();
    let mut seen = BTreeSet::from([root]);
    let mut queue = VecDeque::from([root]);
    while let Some(x) = queue.pop_front() {
        for &id in &inc[&x] {
            let y = t.edge(id).unwrap().other(x);
            if seen.insert(y) {
                order.push((y, x));
                queue.push_back(y);
            }
        }
    }
    let mut counts = PairCounts::new();
    let mut nbrs: BTreeMap<Vertex, BTreeSet<Vertex>> = BTreeMap::new();
    for (_, e) in host.edges() {
        *counts.entry(key(e.u, e.v)).or_insert(0) += 1;
        nbrs.entry(e.u).or_default().insert(e.v);
        nbrs.entry(e.v).or_default().insert(e.u);
    }
    for injective in [true, false] {
        for r in host.vertices() {
            let mut s = Search {
                order: &order,
                nbrs: &nbrs,
                left: counts.clone(),
                image: BTreeMap::from([(root, r)]),
                used: BTreeSet::from([r]),
                injective,
            };
            if s.go(0) {
                return CopyVerdict {
                    homomorphic: true,
                    isomorphic: injective,
                    witness: Some(s.image),
                };
            }
        }
    }
    no
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FailureClass {
    DuplicateEdge,
    MissingEdge,
    UnknownEdge,
    NotHomomorphic,
    KindNotAttained,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Failure {
    DuplicateEdge { edge: EdgeId, copies: Vec<usize> },
    MissingEdge(EdgeId),
    UnknownEdge { copy: usize, edge: EdgeId },
    NotHomomorphic { copy: usize, reason: String },
    KindNotAttained { copy: usize },
}

impl Failure {
    pub fn class(&self) -> FailureClass {
        match self {
            Failure::DuplicateEdge { .. } => FailureClass::DuplicateEdge,
            Failure::MissingEdge(_) => FailureClass::MissingEdge,
            Failure::UnknownEdge { .. } => FailureClass::UnknownEdge,
            Failure::NotHomomorphic { .. } => FailureClass::NotHomomorphic,
            Failure::KindNotAttained { .. } => FailureClass::KindNotAttained,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::DuplicateEdge { edge, copies } => write!(f, "edge {edge} is used by copies {copies:?}"),
            Failure::MissingEdge(e) => write!(f, "edge {e} is in no copy"),
            Failure::UnknownEdge { copy, edge } => write!(f, "copy {copy} uses unknown edge {edge}"),
            Failure::NotHomomorphic { copy, reason } => write!(f, "copy {copy} is not a homomorphic copy: {reason}"),
            Failure::KindNotAttained { copy } => write!(f, "copy {copy} is not injective"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CopyCheck {
    pub copy: usize,
    pub homomorphic: bool,
    pub isomorphic: bool,
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    pub partition_ok: bool,
    pub per_copy: Vec<CopyCheck>,
    pub girth: Girth,
    pub tree_diameter: usize,
    /// Girth above the tree's diameter: every homomorphic copy is isomorphic.
    pub girth_forces_isomorphic: bool,
    pub required: Kind,
    /// Strongest kind attained, when the certificate is a valid decomposition.
    pub kind: Option<Kind>,
    pub failures: Vec<Failure>,
}

impl VerificationReport {
    pub fn accepted(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn failure_classes(&self) -> BTreeSet<FailureClass> {
        self.failures.iter().map(Failure::class).collect()
    }

    pub fn describe_failures(&self) -> String {
        self.failures.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
    }
}

/// Checks a copy's claimed maps against `g` and `t`.
fn check_claim(g: &MultiGraph, t: &MultiGraph, i: usize, c: &TreeCopy, failures: &mut Vec<Failure>) -> CopyCheck {
    let fail = |reason: String, failures: &mut Vec<Failure>| {
        failures.push(Failure::NotHomomorphic { copy: i, reason: reason.clone() });
        CopyCheck {
            copy: i,
            homomorphic: false,
            isomorphic: false,
            detail: Some(reason),
        }
    };
    let tree_edges: BTreeSet<EdgeId> = t.edge_ids().collect();
    if c.edge_map.keys().copied().collect::<BTreeSet<_>>() != tree_edges {
        return fail("edge map does not cover the tree edges".into(), failures);
    }
    if c.vertex_image.keys().copied().collect::<BTreeSet<_>>() != *t.vertex_set() {
        return fail("vertex image does not cover the tree vertices".into(), failures);
    }
    let mut unknown = false;
    for &ge in c.edge_map.values() {
        if !g.has_edge(ge) {
            failures.push(Failure::UnknownEdge { copy: i, edge: ge });
            unknown = true;
        }
    }
    if unknown {
        return CopyCheck {
            copy: i,
            homomorphic: false,
            isomorphic: false,
            detail: Some("unknown edge".into()),
        };
    }
    let distinct: BTreeSet<EdgeId> = c.edge_map.values().copied().collect();
    if distinct.len() != c.edge_map.len() {
        return fail("two tree edges share a graph edge".into(), failures);
    }
    for (te, ge) in &c.edge_map {
        let e = t.edge(*te).unwrap();
        let (x, y) = (c.vertex_image[&e.u], c.vertex_image[&e.v]);
        if !g.edge(*ge).unwrap().joins(x, y) {
            return fail(format!("tree edge {te} maps to edge {ge}, which does not join {x} and {y}"), failures);
        }
    }
    CopyCheck {
        copy: i,
        homomorphic: true,
        isomorphic: c.is_injective(),
        detail: None,
    }
}

/// Checks that the copies partition `E(g)`, that every claimed map is a
/// homomorphism that is bijective on edges, and that `required` is met.
/// The reported kind is the strongest one attained, whatever the
/// certificate claims.
pub fn verify_decomposition(g: &MultiGraph, t: &MultiGraph, d: &Decomposition, required: Kind) -> VerificationReport {
    let mut failures = Vec::new();
    let mut owners: BTreeMap<EdgeId, Vec<usize>> = BTreeMap::new();
    for (i, c) in d.copies.iter().enumerate() {
        for ge in c.graph_edges() {
            owners.entry(ge).or_default().push(i);
        }
    }
    for (&edge, copies) in &owners {
        if copies.len() > 1 {
            failures.push(Failure::DuplicateEdge {
                edge,
                copies: copies.clone(),
            });
        }
    }
    for id in g.edge_ids() {
        if !owners.contains_key(&id) {
            failures.push(Failure::MissingEdge(id));
        }
    }
    let partition_ok = failures.is_empty() && owners.keys().all(|&e| g.has_edge(e));

    let per_copy: Vec<CopyCheck> = d
        .copies
        .iter()
        .enumerate()
        .map(|(i, c)| check_claim(g, t, i, c, &mut failures))
        .collect();
    let all_hom = per_copy.iter().all(|c| c.homomorphic);
    let all_iso = per_copy.iter().all(|c| c.isomorphic);
    let gi = girth(g);
    let diam = if t.is_tree() { diameter(t) } else { 0 };
    let forces = gi.exceeds(diam);
    if required == Kind::Isomorphic {
        for c in per_copy.iter().filter(|c| c.homomorphic && !c.isomorphic) {
            failures.push(Failure::KindNotAttained { copy: c.copy });
        }
    }
    let kind = (partition_ok && all_hom).then_some(if all_iso { Kind::Isomorphic } else { Kind::Homomorphic });
    debug_assert!(!(forces && all_hom && !all_iso), "girth above the diameter forces injective copies");
    VerificationReport {
        partition_ok,
        per_copy,
        girth: gi,
        tree_diameter: diam,
        girth_forces_isomorphic: forces,
        required,
        kind,
        failures,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::treedecomp::trees::{all_trees, path};

    /// Every vertex map `V(T) -> V(H)`, checked directly.
    fn brute(h: &MultiGraph, t: &MultiGraph) -> (bool, bool) {
        let tv: Vec<Vertex> = t.vertices().collect();
        let hv: Vec<Vertex> = h.vertices().collect();
        let mut want: PairCounts = BTreeMap::new();
        for (_, e) in h.edges() {
            *want.entry(key(e.u, e.v)).or_insert(0) += 1;
        }
        let (mut hom, mut iso) = (false, false);
        let total = hv.len().pow(tv.len() as u32);
        for code in 0..total {
            let mut c = code;
            let mut img = BTreeMap::new();
            for &x in &tv {
                img.insert(x, hv[c % hv.len()]);
                c /= hv.len();
            }
            let mut got: PairCounts = BTreeMap::new();
            let mut ok = true;
            for (_, e) in t.edges() {
                let (a, b) = (img[&e.u], img[&e.v]);
                if a == b {
                    ok = false;
                    break;
                }
                *got.entry(key(a, b)).or_insert(0) += 1;
            }
            if ok && got == want {
                hom = true;
                let distinct: BTreeSet<_> = img.values().collect();
                iso |= distinct.len() == tv.len();
            }
        }
        (hom, iso)
    }

    fn hosts() -> Vec<MultiGraph> {
        let mut out = Vec::new();
        let pairs: Vec<(Vertex, Vertex)> = vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3), (3, 4), (4, 5)];
        // every edge multiset of size 1..=5 drawn from a few pairs, as small hosts
        for mask in 1u32..(1 << pairs.len()) {
            if mask.count_ones() > 5 {
                continue;
            }
            let chosen: Vec<_> = (0..pairs.len()).filter(|i| mask >> i & 1 == 1).map(|i| pairs[i]).collect();
            out.push(MultiGraph::from_pairs(chosen.clone()).unwrap());
            let mut doubled = chosen.clone();
            doubled.push(chosen[0]);
            if doubled.len() <= 5 {
                out.push(MultiGraph::from_pairs(doubled).unwrap());
            }
        }
        out
    }

    #[test]
    fn agrees_with_exhaustive_maps() {
        let hosts = hosts();
        for m in 1..=5 {
            for t in all_trees(m) {
                for h in hosts.iter().filter(|h| h.edge_count() == m) {
                    let v = verify_copy(h, &t);
                    assert_eq!((v.homomorphic, v.isomorphic), brute(h, &t), "host {h:?} tree {t:?}");
                }
            }
        }
    }

    #[test]
    fn c4_is_a_non_injective_p5_image() {
        let c4 = MultiGraph::from_pairs([(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let v = verify_copy(&c4, &path(4));
        assert!(v.homomorphic && !v.isomorphic);
    }

    #[test]
    fn bundle_hosts_any_tree() {
        let g = MultiGraph::from_pairs((0..4).map(|_| (0, 1))).unwrap();
        for t in all_trees(4) {
            assert!(verify_copy(&g, &t).homomorphic);
        }
    }

    #[test]
    fn disconnected_host_is_rejected() {
        let g = MultiGraph::from_pairs([(0, 1), (2, 3)]).unwrap();
        assert!(!verify_copy(&g, &path(2)).homomorphic);
    }

    #[test]
    fn duplicate_edges_break_the_partition() {
        let g = MultiGraph::from_pairs([(0, 1), (1, 2)]).unwrap();
        let t = path(1);
        let copy = |ge: EdgeId, u, v| TreeCopy {
            edge_map: BTreeMap::from([(0, ge)]),
            vertex_image: BTreeMap::from([(0, u), (1, v)]),
        };
        let good = Decomposition {
            kind: Kind::Homomorphic,
            copies: vec![copy(0, 0, 1), copy(1, 1, 2)],
        };
        let r = verify_decomposition(&g, &t, &good, Kind::Homomorphic);
        assert!(r.accepted());
        assert_eq!(r.kind, Some(Kind::Isomorphic));
        let bad = Decomposition {
            kind: Kind::Homomorphic,
            copies: vec![copy(0, 0, 1), copy(0, 0, 1)],
        };
        let r = verify_decomposition(&g, &t, &bad, Kind::Homomorphic);
        assert!(!r.partition_ok);
        assert!(r.failure_classes().contains(&FailureClass::DuplicateEdge));
        assert!(r.failure_classes().contains(&FailureClass::MissingEdge));
    }
}
