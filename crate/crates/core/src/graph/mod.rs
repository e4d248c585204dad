//! Loopless multigraphs with stable edge identities, plus the connectivity
//! primitives (edge connectivity, girth, tree packing, low-degree trees).

mod flow;
mod girth;
mod lowdeg;
mod packing;

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use thiserror::Error;

pub use flow::{edge_connectivity, is_k_edge_connected, local_edge_connectivity, MaxFlow};
pub(crate) use flow::connectivity_avoiding;
pub use girth::{girth, Girth};
pub use lowdeg::{
    bounded_degree_spanning_tree, connected_low_degree_subgraph, low_degree_skeleton,
    low_degree_spanning_tree, DegreeCaps,
};
pub(crate) use lowdeg::strict_cap;
pub use packing::{forest_packing, spanning_tree_packing};

pub type Vertex = u64;
pub type EdgeId = u64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("edge {0} is a loop")]
    Loop(EdgeId),
    #[error("duplicate edge id {0}")]
    DuplicateEdge(EdgeId),
    #[error("unknown edge id {0}")]
    UnknownEdge(EdgeId),
    #[error("unknown vertex {0}")]
    UnknownVertex(Vertex),
    #[error("graph is not connected")]
    NotConnected,
    #[error("no packing of {requested} edge-disjoint spanning trees (found forests covering {found} of {needed} edges)")]
    NoPacking {
        requested: usize,
        found: usize,
        needed: usize,
    },
    #[error("low-degree tree search could not meet the degree bound at vertex {vertex}")]
    BoundNotMet { vertex: Vertex },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    A,
    B,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::A => Side::B,
            Side::B => Side::A,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::A => write!(f, "A"),
            Side::B => write!(f, "B"),
        }
    }
}

/// Endpoints of an edge, in the order they were given.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Edge {
    pub u: Vertex,
    pub v: Vertex,
}

impl Edge {
    pub fn other(&self, x: Vertex) -> Vertex {
        if x == self.u {
            self.v
        } else {
            self.u
        }
    }

    pub fn touches(&self, x: Vertex) -> bool {
        self.u == x || self.v == x
    }

    pub fn joins(&self, x: Vertex, y: Vertex) -> bool {
        (self.u == x && self.v == y) || (self.u == y && self.v == x)
    }
}

/// Finite loopless multigraph. Parallel edges are allowed; each edge carries
/// its own id, and subgraphs keep the parent's ids.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MultiGraph {
    vertices: BTreeSet<Vertex>,
    edges: BTreeMap<EdgeId, Edge>,
    sides: BTreeMap<Vertex, Side>,
}

impl MultiGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a graph from `(u, v)` pairs, numbering edges from 0.
    pub fn from_pairs<I: IntoIterator<Item = (Vertex, Vertex)>>(pairs: I) -> Result<Self, GraphError> {
        let mut g = MultiGraph::new();
        for (i, (u, v)) in pairs.into_iter().enumerate() {
            g.add_edge(i as EdgeId, u, v)?;
        }
        Ok(g)
    }

    pub fn add_vertex(&mut self, v: Vertex) {
        self.vertices.insert(v);
    }

    pub fn add_edge(&mut self, id: EdgeId, u: Vertex, v: Vertex) -> Result<(), GraphError> {
        if u == v {
            return Err(GraphError::Loop(id));
        }
        if self.edges.contains_key(&id) {
            return Err(GraphError::DuplicateEdge(id));
        }
        self.vertices.insert(u);
        self.vertices.insert(v);
        self.edges.insert(id, Edge { u, v });
        Ok(())
    }

    /// Adds an edge under the next unused id and returns that id.
    pub fn push_edge(&mut self, u: Vertex, v: Vertex) -> Result<EdgeId, GraphError> {
        let id = self.next_edge_id();
        self.add_edge(id, u, v)?;
        Ok(id)
    }

    pub fn remove_edge(&mut self, id: EdgeId) -> Option<Edge> {
        self.edges.remove(&id)
    }

    /// Removes a vertex together with its incident edges.
    pub fn remove_vertex(&mut self, v: Vertex) {
        self.vertices.remove(&v);
        self.sides.remove(&v);
        self.edges.retain(|_, e| !e.touches(v));
    }

    pub fn set_side(&mut self, v: Vertex, side: Side) {
        self.vertices.insert(v);
        self.sides.insert(v, side);
    }

    pub fn side(&self, v: Vertex) -> Option<Side> {
        self.sides.get(&v).copied()
    }

    pub fn sides(&self) -> &BTreeMap<Vertex, Side> {
        &self.sides
    }

    pub fn clear_sides(&mut self) {
        self.sides.clear();
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.vertices.iter().copied()
    }

    pub fn vertex_set(&self) -> &BTreeSet<Vertex> {
        &self.vertices
    }

    pub fn has_vertex(&self, v: Vertex) -> bool {
        self.vertices.contains(&v)
    }

    pub fn edges(&self) -> impl Iterator<Item = (EdgeId, Edge)> + '_ {
        self.edges.iter().map(|(&id, &e)| (id, e))
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.edges.keys().copied()
    }

    pub fn edge(&self, id: EdgeId) -> Option<Edge> {
        self.edges.get(&id).copied()
    }

    pub fn has_edge(&self, id: EdgeId) -> bool {
        self.edges.contains_key(&id)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn next_edge_id(&self) -> EdgeId {
        self.edges.keys().next_back().map_or(0, |&id| id + 1)
    }

    pub fn next_vertex_id(&self) -> Vertex {
        self.vertices.iter().next_back().map_or(0, |&v| v + 1)
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.edges.values().filter(|e| e.touches(v)).count()
    }

    pub fn degrees(&self) -> BTreeMap<Vertex, usize> {
        let mut deg: BTreeMap<Vertex, usize> = self.vertices.iter().map(|&v| (v, 0)).collect();
        for e in self.edges.values() {
            *deg.get_mut(&e.u).unwrap() += 1;
            *deg.get_mut(&e.v).unwrap() += 1;
        }
        deg
    }

    /// Incident edge ids per vertex, ascending.
    pub fn incidence(&self) -> BTreeMap<Vertex, Vec<EdgeId>> {
        let mut inc: BTreeMap<Vertex, Vec<EdgeId>> =
            self.vertices.iter().map(|&v| (v, Vec::new())).collect();
        for (&id, e) in &self.edges {
            inc.get_mut(&e.u).unwrap().push(id);
            inc.get_mut(&e.v).unwrap().push(id);
        }
        inc
    }

    pub fn incident_edges(&self, v: Vertex) -> Vec<EdgeId> {
        self.edges
            .iter()
            .filter(|(_, e)| e.touches(v))
            .map(|(&id, _)| id)
            .collect()
    }

    /// Spanning subgraph on the same vertex set keeping only `ids`.
    pub fn spanning_subgraph<I: IntoIterator<Item = EdgeId>>(&self, ids: I) -> MultiGraph {
        let mut g = MultiGraph {
            vertices: self.vertices.clone(),
            edges: BTreeMap::new(),
            sides: self.sides.clone(),
        };
        for id in ids {
            if let Some(&e) = self.edges.get(&id) {
                g.edges.insert(id, e);
            }
        }
        g
    }

    /// Subgraph induced by the given edges: only their endpoints are kept.
    pub fn edge_subgraph<I: IntoIterator<Item = EdgeId>>(&self, ids: I) -> MultiGraph {
        let mut g = MultiGraph::new();
        for id in ids {
            if let Some(&e) = self.edges.get(&id) {
                g.vertices.insert(e.u);
                g.vertices.insert(e.v);
                g.edges.insert(id, e);
            }
        }
        for v in g.vertices.clone() {
            if let Some(&s) = self.sides.get(&v) {
                g.sides.insert(v, s);
            }
        }
        g
    }

    /// Same graph without the listed edges.
    pub fn without_edges<'a, I: IntoIterator<Item = &'a EdgeId>>(&self, ids: I) -> MultiGraph {
        let mut g = self.clone();
        for id in ids {
            g.edges.remove(id);
        }
        g
    }

    /// Multiplicity of the vertex pair `{u, v}`.
    pub fn multiplicity(&self, u: Vertex, v: Vertex) -> usize {
        self.edges.values().filter(|e| e.joins(u, v)).count()
    }

    pub fn is_simple(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.edges
            .values()
            .all(|e| seen.insert((e.u.min(e.v), e.u.max(e.v))))
    }

    pub fn components(&self) -> Vec<BTreeSet<Vertex>> {
        let ix = Indexed::new(self);
        let mut comp = vec![usize::MAX; ix.n()];
        let mut out = Vec::new();
        for s in 0..ix.n() {
            if comp[s] != usize::MAX {
                continue;
            }
            let c = out.len();
            let mut set = BTreeSet::new();
            let mut queue = VecDeque::from([s]);
            comp[s] = c;
            while let Some(x) = queue.pop_front() {
                set.insert(ix.vertex(x));
                for &(y, _) in &ix.adj[x] {
                    if comp[y] == usize::MAX {
                        comp[y] = c;
                        queue.push_back(y);
                    }
                }
            }
            out.push(set);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.vertex_count() <= 1 || self.components().len() == 1
    }

    /// Connected and acyclic.
    pub fn is_tree(&self) -> bool {
        self.vertex_count() >= 1
            && self.edge_count() + 1 == self.vertex_count()
            && self.is_connected()
    }
}

/// Partition of the vertex set into two classes with every edge crossing.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Bipartition {
    pub class_a: BTreeSet<Vertex>,
    pub class_b: BTreeSet<Vertex>,
}

impl Bipartition {
    pub fn side(&self, v: Vertex) -> Option<Side> {
        if self.class_a.contains(&v) {
            Some(Side::A)
        } else if self.class_b.contains(&v) {
            Some(Side::B)
        } else {
            None
        }
    }

    pub fn class(&self, side: Side) -> &BTreeSet<Vertex> {
        match side {
            Side::A => &self.class_a,
            Side::B => &self.class_b,
        }
    }

    pub fn swapped(&self) -> Bipartition {
        Bipartition {
            class_a: self.class_b.clone(),
            class_b: self.class_a.clone(),
        }
    }

    /// Endpoint of `e` lying in class A.
    pub fn a_end(&self, e: Edge) -> Vertex {
        if self.class_a.contains(&e.u) {
            e.u
        } else {
            e.v
        }
    }

    pub fn b_end(&self, e: Edge) -> Vertex {
        if self.class_a.contains(&e.u) {
            e.v
        } else {
            e.u
        }
    }

    /// Checks that the classes partition `V(g)` and every edge crosses.
    pub fn is_valid_for(&self, g: &MultiGraph) -> bool {
        self.class_a.is_disjoint(&self.class_b)
            && g.vertices().all(|v| self.side(v).is_some())
            && self.class_a.len() + self.class_b.len() == g.vertex_count()
            && g
                .edges()
                .all(|(_, e)| self.side(e.u).is_some() && self.side(e.u) != self.side(e.v))
    }

    /// Restriction to the vertices of `g`.
    pub fn restrict(&self, g: &MultiGraph) -> Bipartition {
        Bipartition {
            class_a: self.class_a.iter().copied().filter(|v| g.has_vertex(*v)).collect(),
            class_b: self.class_b.iter().copied().filter(|v| g.has_vertex(*v)).collect(),
        }
    }

    /// Copies the classes onto the side tags of `g`.
    pub fn tag(&self, g: &mut MultiGraph) {
        for &v in &self.class_a {
            if g.has_vertex(v) {
                g.set_side(v, Side::A);
            }
        }
        for &v in &self.class_b {
            if g.has_vertex(v) {
                g.set_side(v, Side::B);
            }
        }
    }
}

/// Two-colors `g`, honoring existing side tags. Untagged components put
/// their lowest vertex id in class A. Returns `None` on an odd cycle or on
/// inconsistent tags.
pub fn bipartition(g: &MultiGraph) -> Option<Bipartition> {
    let ix = Indexed::new(g);
    let n = ix.n();
    let mut color: Vec<Option<Side>> = vec![None; n];
    for comp in g.components() {
        let members: Vec<usize> = comp.iter().map(|v| ix.index(*v)).collect();
        let start = members
            .iter()
            .copied()
            .find(|&x| g.side(ix.vertex(x)).is_some())
            .unwrap_or(members[0]);
        color[start] = Some(g.side(ix.vertex(start)).unwrap_or(Side::A));
        let mut queue = VecDeque::from([start]);
        while let Some(x) = queue.pop_front() {
            let cx = color[x].unwrap();
            for &(y, _) in &ix.adj[x] {
                match color[y] {
                    None => {
                        color[y] = Some(cx.other());
                        queue.push_back(y);
                    }
                    Some(cy) if cy == cx => return None,
                    Some(_) => {}
                }
            }
        }
        for &x in &members {
            if let Some(tag) = g.side(ix.vertex(x)) {
                if color[x] != Some(tag) {
                    return None;
                }
            }
        }
    }
    let mut bip = Bipartition::default();
    for x in 0..n {
        match color[x] {
            Some(Side::A) => bip.class_a.insert(ix.vertex(x)),
            _ => bip.class_b.insert(ix.vertex(x)),
        };
    }
    Some(bip)
}

/// Dense view of a multigraph: vertices numbered `0..n`, edges `0..m`.
#[derive(Debug, Clone)]
pub(crate) struct Indexed {
    pub verts: Vec<Vertex>,
    pub pos: HashMap<Vertex, usize>,
    pub ids: Vec<EdgeId>,
    pub ends: Vec<(usize, usize)>,
    /// `(neighbor, edge index)` per vertex.
    pub adj: Vec<Vec<(usize, usize)>>,
}

impl Indexed {
    pub fn new(g: &MultiGraph) -> Self {
        let verts: Vec<Vertex> = g.vertices().collect();
        let pos: HashMap<Vertex, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut ids = Vec::with_capacity(g.edge_count());
        let mut ends = Vec::with_capacity(g.edge_count());
        let mut adj = vec![Vec::new(); verts.len()];
        for (k, (id, e)) in g.edges().enumerate() {
            let (a, b) = (pos[&e.u], pos[&e.v]);
            ids.push(id);
            ends.push((a, b));
            adj[a].push((b, k));
            adj[b].push((a, k));
        }
        Indexed {
            verts,
            pos,
            ids,
            ends,
            adj,
        }
    }

    pub fn n(&self) -> usize {
        self.verts.len()
    }

    pub fn m(&self) -> usize {
        self.ids.len()
    }

    pub fn vertex(&self, i: usize) -> Vertex {
        self.verts[i]
    }

    pub fn index(&self, v: Vertex) -> usize {
        self.pos[&v]
    }
}

/// Plain union-find over `0..n`.
#[derive(Debug, Clone)]
pub(crate) struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }
}

/// Checks that `ids` form a spanning tree of `g`.
pub fn is_spanning_tree(g: &MultiGraph, ids: &[EdgeId]) -> bool {
    if g.vertex_count() == 0 || ids.len() + 1 != g.vertex_count() {
        return false;
    }
    let ix = Indexed::new(g);
    let mut uf = UnionFind::new(ix.n());
    ids.iter().all(|id| match g.edge(*id) {
        Some(e) => uf.union(ix.index(e.u), ix.index(e.v)),
        None => false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn cycle(n: u64) -> MultiGraph {
        MultiGraph::from_pairs((0..n).map(|i| (i, (i + 1) % n))).unwrap()
    }

    #[test]
    fn loops_are_rejected() {
        let mut g = MultiGraph::new();
        assert_eq!(g.add_edge(0, 1, 1), Err(GraphError::Loop(0)));
        g.add_edge(0, 1, 2).unwrap();
        assert_eq!(g.add_edge(0, 2, 3), Err(GraphError::DuplicateEdge(0)));
    }

    #[test]
    fn subgraph_keeps_parent_ids() {
        let g = cycle(5);
        let h = g.edge_subgraph([1, 3]);
        assert_eq!(h.edge_ids().collect::<Vec<_>>(), vec![1, 3]);
        assert_eq!(h.edge(3), g.edge(3));
    }

    #[test]
    fn bipartition_of_c4_alternates() {
        let bip = bipartition(&cycle(4)).unwrap();
        assert_eq!(bip.class_a, BTreeSet::from([0, 2]));
        assert_eq!(bip.class_b, BTreeSet::from([1, 3]));
        assert!(bip.is_valid_for(&cycle(4)));
    }

    #[test]
    fn triangle_has_no_bipartition() {
        assert!(bipartition(&cycle(3)).is_none());
    }

    #[test]
    fn inconsistent_tags_are_rejected() {
        let mut g = MultiGraph::from_pairs([(0, 1)]).unwrap();
        g.set_side(0, Side::A);
        g.set_side(1, Side::A);
        assert!(bipartition(&g).is_none());
    }

    #[test]
    fn tags_are_honored() {
        let mut g = cycle(4);
        g.set_side(1, Side::A);
        let bip = bipartition(&g).unwrap();
        assert_eq!(bip.class_a, BTreeSet::from([1, 3]));
    }

    #[test]
    fn tree_recognition() {
        assert!(MultiGraph::from_pairs([(0, 1), (1, 2)]).unwrap().is_tree());
        assert!(!cycle(3).is_tree());
        assert!(!MultiGraph::from_pairs([(0, 1), (2, 3)]).unwrap().is_tree());
    }
}
