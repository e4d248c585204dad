//! Orientations with prescribed outdegrees modulo `k`.

use std::collections::{BTreeMap, VecDeque};

use rand::seq::SliceRandom;
use rand::Rng as _;
use thiserror::Error;

use crate::graph::{is_k_edge_connected, EdgeId, MultiGraph, Vertex};
use crate::rng::{mix, seeded};
use crate::transform::LiftBackMap;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrientError {
    #[error("targets sum to {sum} but the graph has {edges} edges (mod {modulus})")]
    SumConditionViolated { sum: u64, edges: u64, modulus: u64 },
    #[error("no orientation found")]
    NotFound,
    #[error("back-map does not match the orientation: {0}")]
    MapMismatch(String),
}

/// Tail vertex per edge id.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Orientation {
    tails: BTreeMap<EdgeId, Vertex>,
}

impl Orientation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, edge: EdgeId, tail: Vertex) {
        self.tails.insert(edge, tail);
    }

    pub fn tail(&self, edge: EdgeId) -> Option<Vertex> {
        self.tails.get(&edge).copied()
    }

    pub fn head(&self, g: &MultiGraph, edge: EdgeId) -> Option<Vertex> {
        Some(g.edge(edge)?.other(self.tail(edge)?))
    }

    pub fn tails(&self) -> &BTreeMap<EdgeId, Vertex> {
        &self.tails
    }

    pub fn len(&self) -> usize {
        self.tails.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tails.is_empty()
    }

    /// Orients exactly the edges of `g`, each out of one of its ends.
    pub fn is_total_for(&self, g: &MultiGraph) -> bool {
        self.tails.len() == g.edge_count()
            && g.edges().all(|(id, e)| self.tail(id).is_some_and(|t| e.touches(t)))
    }

    pub fn out_degrees(&self, g: &MultiGraph) -> BTreeMap<Vertex, usize> {
        let mut out: BTreeMap<Vertex, usize> = g.vertices().map(|v| (v, 0)).collect();
        for (id, _) in g.edges() {
            if let Some(t) = self.tail(id) {
                *out.entry(t).or_insert(0) += 1;
            }
        }
        out
    }

    pub fn in_degrees(&self, g: &MultiGraph) -> BTreeMap<Vertex, usize> {
        let mut inn: BTreeMap<Vertex, usize> = g.vertices().map(|v| (v, 0)).collect();
        for (id, e) in g.edges() {
            if let Some(t) = self.tail(id) {
                *inn.entry(e.other(t)).or_insert(0) += 1;
            }
        }
        inn
    }
}

/// Outdegree residues modulo `modulus`; vertices without an entry want 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidueTarget {
    pub modulus: u64,
    p: BTreeMap<Vertex, u64>,
}

impl ResidueTarget {
    pub fn new(modulus: u64, p: BTreeMap<Vertex, u64>) -> Self {
        assert!(modulus >= 1, "modulus must be positive");
        let p = p.into_iter().map(|(v, r)| (v, r % modulus)).collect();
        ResidueTarget { modulus, p }
    }

    pub fn zero(modulus: u64) -> Self {
        Self::new(modulus, BTreeMap::new())
    }

    /// Residue from a signed value, reduced into `0..modulus`.
    pub fn set_signed(&mut self, v: Vertex, value: i64) {
        self.p.insert(v, value.rem_euclid(self.modulus as i64) as u64);
    }

    pub fn residue(&self, v: Vertex) -> u64 {
        self.p.get(&v).copied().unwrap_or(0)
    }

    pub fn residues(&self) -> &BTreeMap<Vertex, u64> {
        &self.p
    }

    pub fn sum_over<I: IntoIterator<Item = Vertex>>(&self, vs: I) -> u64 {
        vs.into_iter().map(|v| self.residue(v)).sum::<u64>() % self.modulus
    }

    pub fn sum_condition_holds(&self, g: &MultiGraph) -> bool {
        self.sum_over(g.vertices()) == g.edge_count() as u64 % self.modulus
    }

    pub fn satisfied_by(&self, g: &MultiGraph, o: &Orientation) -> bool {
        o.is_total_for(g)
            && o.out_degrees(g)
                .into_iter()
                .all(|(v, d)| d as u64 % self.modulus == self.residue(v))
    }
}

/// Index view of the graph for the search routines.
struct Net {
    verts: Vec<Vertex>,
    ids: Vec<EdgeId>,
    ends: Vec<(usize, usize)>,
    inc: Vec<Vec<usize>>,
}

impl Net {
    fn new(g: &MultiGraph) -> Self {
        let verts: Vec<Vertex> = g.vertices().collect();
        let pos: BTreeMap<Vertex, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut ids = Vec::new();
        let mut ends = Vec::new();
        let mut inc = vec![Vec::new(); verts.len()];
        for (k, (id, e)) in g.edges().enumerate() {
            ids.push(id);
            ends.push((pos[&e.u], pos[&e.v]));
            inc[pos[&e.u]].push(k);
            inc[pos[&e.v]].push(k);
        }
        Net {
            verts,
            ids,
            ends,
            inc,
        }
    }

    /// `fwd[e]`: edge `e` points from its first stored end to its second.
    fn tail(&self, fwd: &[bool], e: usize) -> usize {
        if fwd[e] {
            self.ends[e].0
        } else {
            self.ends[e].1
        }
    }

    fn head(&self, fwd: &[bool], e: usize) -> usize {
        if fwd[e] {
            self.ends[e].1
        } else {
            self.ends[e].0
        }
    }

    fn outdeg(&self, fwd: &[bool]) -> Vec<u64> {
        let mut d = vec![0; self.verts.len()];
        for e in 0..self.ids.len() {
            d[self.tail(fwd, e)] += 1;
        }
        d
    }

    fn components(&self) -> Vec<usize> {
        let n = self.verts.len();
        let mut comp = vec![usize::MAX; n];
        let mut c = 0;
        for s in 0..n {
            if comp[s] != usize::MAX {
                continue;
            }
            comp[s] = c;
            let mut queue = VecDeque::from([s]);
            while let Some(x) = queue.pop_front() {
                for &e in &self.inc[x] {
                    let (a, b) = self.ends[e];
                    let y = if a == x { b } else { a };
                    if comp[y] == usize::MAX {
                        comp[y] = c;
                        queue.push_back(y);
                    }
                }
            }
            c += 1;
        }
        comp
    }

    fn orientation(&self, fwd: &[bool]) -> Orientation {
        let mut o = Orientation::new();
        for e in 0..self.ids.len() {
            o.set(self.ids[e], self.verts[self.tail(fwd, e)]);
        }
        o
    }
}

const RESTARTS: u64 = 12;
const EXHAUSTIVE_FIRST: usize = 12;
const EXHAUSTIVE_LIMIT: usize = 20;

/// Orientation with `d+(v) ≡ p(v) (mod k)` at every vertex.
///
/// `k = 2` is solved exactly per component with a spanning forest. Other
/// moduli use path reversal: flipping a directed path `u ⇝ w` moves one unit
/// of outdegree from `u` to `w`, and the search greedily lowers the total
/// residue distance, with sideways moves and seeded restarts. Graphs with at
/// most 20 edges fall back to exhaustive search, so `NotFound` is exact there.
pub fn orient_mod(g: &MultiGraph, t: &ResidueTarget, seed: u64) -> Result<Orientation, OrientError> {
    let k = t.modulus;
    if !t.sum_condition_holds(g) {
        return Err(OrientError::SumConditionViolated {
            sum: t.sum_over(g.vertices()),
            edges: g.edge_count() as u64 % k,
            modulus: k,
        });
    }
    let net = Net::new(g);
    let p: Vec<u64> = net.verts.iter().map(|&v| t.residue(v)).collect();
    if k == 1 {
        return Ok(net.orientation(&vec![true; net.ids.len()]));
    }

    // every component must satisfy the sum condition on its own
    let comp = net.components();
    let ncomp = comp.iter().copied().max().map_or(0, |c| c + 1);
    let mut csum = vec![0u64; ncomp];
    let mut cedges = vec![0u64; ncomp];
    for (x, &c) in comp.iter().enumerate() {
        csum[c] += p[x];
    }
    for &(a, _) in &net.ends {
        cedges[comp[a]] += 1;
    }
    if (0..ncomp).any(|c| csum[c] % k != cedges[c] % k) {
        return Err(OrientError::NotFound);
    }

    if k == 2 {
        return Ok(net.orientation(&parity_orientation(&net, &p)));
    }
    let m = net.ids.len();
    if m <= EXHAUSTIVE_FIRST {
        return exhaustive(&net, &p, k)
            .map(|fwd| net.orientation(&fwd))
            .ok_or(OrientError::NotFound);
    }
    if let Some(fwd) = path_reversal(&net, &p, k, seed) {
        return Ok(net.orientation(&fwd));
    }
    if m <= EXHAUSTIVE_LIMIT {
        if let Some(fwd) = exhaustive(&net, &p, k) {
            return Ok(net.orientation(&fwd));
        }
        return Err(OrientError::NotFound);
    }
    if is_k_edge_connected(g, (3 * k - 2) as usize) {
        log::error!("mod-{k} orientation search failed on a {}-edge-connected graph", 3 * k - 2);
    }
    Err(OrientError::NotFound)
}

/// All outdegrees even. Exists for every graph whose components have an
/// even number of edges.
pub fn orient_even_outdegrees(g: &MultiGraph) -> Result<Orientation, OrientError> {
    orient_mod(g, &ResidueTarget::zero(2), 0)
}

/// Non-tree edges go arbitrarily; tree edges are then fixed from the leaves
/// up so that each non-root vertex gets the right parity. The root follows
/// from the sum condition.
fn parity_orientation(net: &Net, p: &[u64]) -> Vec<bool> {
    let n = net.verts.len();
    let m = net.ids.len();
    let mut fwd = vec![true; m];
    let mut parent_edge = vec![usize::MAX; n];
    let mut seen = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut is_tree = vec![false; m];
    for s in 0..n {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            order.push(x);
            for &e in &net.inc[x] {
                let (a, b) = net.ends[e];
                let y = if a == x { b } else { a };
                if !seen[y] {
                    seen[y] = true;
                    parent_edge[y] = e;
                    is_tree[e] = true;
                    queue.push_back(y);
                }
            }
        }
    }
    let mut out = vec![0u64; n];
    for e in 0..m {
        if !is_tree[e] {
            out[net.tail(&fwd, e)] += 1;
        }
    }
    for &x in order.iter().rev() {
        let e = parent_edge[x];
        if e == usize::MAX {
            continue;
        }
        let (a, _) = net.ends[e];
        let keep_out = out[x] % 2 != p[x] % 2;
        // orient e out of x iff x still needs one more outgoing edge
        fwd[e] = (a == x) == keep_out;
        out[net.tail(&fwd, e)] += 1;
    }
    fwd
}

fn residue_cost(d: u64, k: u64) -> u64 {
    d.min(k - d)
}

fn path_reversal(net: &Net, p: &[u64], k: u64, seed: u64) -> Option<Vec<bool>> {
    let n = net.verts.len();
    let m = net.ids.len();
    for attempt in 0..RESTARTS {
        let mut rng = seeded(mix(seed, attempt));
        let mut fwd: Vec<bool> = (0..m).map(|_| rng.gen()).collect();
        let mut out = net.outdeg(&fwd);
        let delta = |out: &[u64], x: usize| (p[x] + k - out[x] % k) % k;
        let mut sideways = 4 * n + 16;
        let cap = 50 * n * k as usize + 200;
        for _ in 0..cap {
            let mut bad: Vec<usize> = (0..n).filter(|&x| delta(&out, x) != 0).collect();
            if bad.is_empty() {
                return Some(fwd);
            }
            bad.shuffle(&mut rng);
            let mut best: Option<(i64, Vec<usize>)> = None;
            for &w in &bad {
                // raise w: search backwards for a source u with u ⇝ w;
                // lower w: search forwards for a sink x with w ⇝ x
                for backwards in [true, false] {
                    let (dist_pred, reach) = directed_bfs(net, &fwd, w, backwards);
                    for &z in &reach {
                        let (u, v) = if backwards { (z, w) } else { (w, z) };
                        let before = residue_cost(delta(&out, u), k) + residue_cost(delta(&out, v), k);
                        let du = (delta(&out, u) + 1) % k;
                        let dv = (delta(&out, v) + k - 1) % k;
                        let gain = before as i64 - (residue_cost(du, k) + residue_cost(dv, k)) as i64;
                        if best.as_ref().is_none_or(|(g, _)| gain > *g) {
                            best = Some((gain, trace(net, &fwd, &dist_pred, z, backwards)));
                        }
                    }
                }
                if best.as_ref().is_some_and(|(g, _)| *g > 0) {
                    break;
                }
            }
            match best {
                Some((gain, path)) if gain > 0 || (gain == 0 && sideways > 0) => {
                    if gain == 0 {
                        sideways -= 1;
                    }
                    for e in path {
                        out[net.tail(&fwd, e)] -= 1;
                        fwd[e] = !fwd[e];
                        out[net.tail(&fwd, e)] += 1;
                    }
                }
                _ => break,
            }
        }
        if (0..n).all(|x| delta(&out, x) == 0) {
            return Some(fwd);
        }
    }
    None
}

/// BFS along arcs (against them when `backwards`); returns predecessor
/// edges and the reached vertices other than the start.
fn directed_bfs(net: &Net, fwd: &[bool], s: usize, backwards: bool) -> (Vec<usize>, Vec<usize>) {
    let n = net.verts.len();
    let mut pred = vec![usize::MAX; n];
    let mut seen = vec![false; n];
    seen[s] = true;
    let mut reach = Vec::new();
    let mut queue = VecDeque::from([s]);
    while let Some(x) = queue.pop_front() {
        for &e in &net.inc[x] {
            let (from, to) = (net.tail(fwd, e), net.head(fwd, e));
            let y = if backwards {
                if to != x {
                    continue;
                }
                from
            } else {
                if from != x {
                    continue;
                }
                to
            };
            if !seen[y] {
                seen[y] = true;
                pred[y] = e;
                reach.push(y);
                queue.push_back(y);
            }
        }
    }
    (pred, reach)
}

fn trace(net: &Net, fwd: &[bool], pred: &[usize], mut z: usize, backwards: bool) -> Vec<usize> {
    let mut path = Vec::new();
    while pred[z] != usize::MAX {
        let e = pred[z];
        path.push(e);
        z = if backwards { net.head(fwd, e) } else { net.tail(fwd, e) };
    }
    path
}

/// Depth-first search over edge directions. A vertex stays viable while its
/// undecided edges can still close the gap to its residue.
fn exhaustive(net: &Net, p: &[u64], k: u64) -> Option<Vec<bool>> {
    let n = net.verts.len();
    let m = net.ids.len();
    // edges sorted so that vertices get completed early
    let mut rank = vec![usize::MAX; n];
    let mut next = 0;
    for s in 0..n {
        if rank[s] != usize::MAX {
            continue;
        }
        rank[s] = next;
        next += 1;
        let mut queue = VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            for &e in &net.inc[x] {
                let (a, b) = net.ends[e];
                let y = if a == x { b } else { a };
                if rank[y] == usize::MAX {
                    rank[y] = next;
                    next += 1;
                    queue.push_back(y);
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by_key(|&e| {
        let (a, b) = net.ends[e];
        (rank[a].max(rank[b]), rank[a].min(rank[b]))
    });
    let mut left: Vec<u64> = (0..n).map(|x| net.inc[x].len() as u64).collect();
    let mut out = vec![0u64; n];
    let mut fwd = vec![true; m];

    fn viable(out: u64, left: u64, p: u64, k: u64) -> bool {
        (p + k - out % k) % k <= left
    }

    #[allow(clippy::too_many_arguments)]
    fn go(
        i: usize,
        order: &[usize],
        net: &Net,
        p: &[u64],
        k: u64,
        left: &mut [u64],
        out: &mut [u64],
        fwd: &mut [bool],
    ) -> bool {
        if i == order.len() {
            return true;
        }
        let e = order[i];
        let (a, b) = net.ends[e];
        left[a] -= 1;
        left[b] -= 1;
        for dir in [true, false] {
            let t = if dir { a } else { b };
            out[t] += 1;
            fwd[e] = dir;
            if viable(out[a], left[a], p[a], k)
                && viable(out[b], left[b], p[b], k)
                && go(i + 1, order, net, p, k, left, out, fwd)
            {
                return true;
            }
            out[t] -= 1;
        }
        left[a] += 1;
        left[b] += 1;
        false
    }

    if go(0, &order, net, p, k, &mut left, &mut out, &mut fwd) {
        Some(fwd)
    } else {
        None
    }
}

/// Realizes each lifted edge as a directed 2-path through the lifted vertex
/// and each recorded loop as an out-and-back pair; other edges keep their
/// direction. Lifted vertices end up with equal in- and outdegree.
pub fn pull_back(
    original: &MultiGraph,
    lifted: &Orientation,
    back: &LiftBackMap,
) -> Result<Orientation, OrientError> {
    let mut o = Orientation::new();
    for (&id, &tail) in lifted.tails() {
        if let Some(path) = back.paths.get(&id) {
            let first = original
                .edge(path.first)
                .ok_or_else(|| OrientError::MapMismatch(format!("edge {} missing", path.first)))?;
            if !original.has_edge(path.second) {
                return Err(OrientError::MapMismatch(format!("edge {} missing", path.second)));
            }
            if first.touches(tail) {
                o.set(path.first, tail);
                o.set(path.second, path.via);
            } else {
                o.set(path.second, tail);
                o.set(path.first, path.via);
            }
        } else if original.edge(id).is_some_and(|e| e.touches(tail)) {
            o.set(id, tail);
        } else {
            return Err(OrientError::MapMismatch(format!("edge {id} is neither lifted nor original")));
        }
    }
    for l in &back.loops {
        o.set(l.first, l.at);
        o.set(l.second, l.via);
    }
    if !o.is_total_for(original) {
        return Err(OrientError::MapMismatch("pulled-back orientation is not total".into()));
    }
    Ok(o)
}
