use std::collections::{HashMap, VecDeque};

use super::{Indexed, MultiGraph, Vertex};

/// Dinic max-flow over an undirected capacity network. Parallel edges are
/// merged into a single arc pair carrying their multiplicity.
#[derive(Debug, Clone)]
pub struct MaxFlow {
    n: usize,
    head: Vec<Vec<usize>>,
    to: Vec<usize>,
    cap: Vec<u64>,
    base: Vec<u64>,
    level: Vec<i64>,
    it: Vec<usize>,
}

impl MaxFlow {
    pub fn new(n: usize) -> Self {
        MaxFlow {
            n,
            head: vec![Vec::new(); n],
            to: Vec::new(),
            cap: Vec::new(),
            base: Vec::new(),
            level: vec![0; n],
            it: vec![0; n],
        }
    }

    /// Undirected edge of capacity `c` in both directions.
    pub fn add_undirected(&mut self, u: usize, v: usize, c: u64) {
        let k = self.to.len();
        self.to.push(v);
        self.cap.push(c);
        self.base.push(c);
        self.head[u].push(k);
        self.to.push(u);
        self.cap.push(c);
        self.base.push(c);
        self.head[v].push(k + 1);
    }

    fn reset(&mut self) {
        self.cap.copy_from_slice(&self.base);
    }

    fn bfs(&mut self, s: usize, t: usize) -> bool {
        self.level.iter_mut().for_each(|l| *l = -1);
        self.level[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            for &k in &self.head[x] {
                let y = self.to[k];
                if self.cap[k] > 0 && self.level[y] < 0 {
                    self.level[y] = self.level[x] + 1;
                    queue.push_back(y);
                }
            }
        }
        self.level[t] >= 0
    }

    fn dfs(&mut self, x: usize, t: usize, pushed: u64) -> u64 {
        if x == t {
            return pushed;
        }
        while self.it[x] < self.head[x].len() {
            let k = self.head[x][self.it[x]];
            let y = self.to[k];
            if self.cap[k] > 0 && self.level[y] == self.level[x] + 1 {
                let got = self.dfs(y, t, pushed.min(self.cap[k]));
                if got > 0 {
                    self.cap[k] -= got;
                    self.cap[k ^ 1] += got;
                    return got;
                }
            }
            self.it[x] += 1;
        }
        0
    }

    /// Maximum `s`-`t` flow, stopping early once `limit` is reached.
    pub fn run(&mut self, s: usize, t: usize, limit: u64) -> u64 {
        assert!(s < self.n && t < self.n && s != t);
        self.reset();
        let mut flow = 0;
        while flow < limit && self.bfs(s, t) {
            self.it.iter_mut().for_each(|i| *i = 0);
            loop {
                let f = self.dfs(s, t, limit - flow);
                if f == 0 {
                    break;
                }
                flow += f;
                if flow >= limit {
                    break;
                }
            }
        }
        flow
    }

    /// Vertices reachable from `s` in the residual network of the last run.
    pub fn source_side(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.n];
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            for &k in &self.head[x] {
                let y = self.to[k];
                if self.cap[k] > 0 && !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        seen
    }
}

pub(crate) fn network(ix: &Indexed) -> MaxFlow {
    let mut mult: HashMap<(usize, usize), u64> = HashMap::new();
    for &(a, b) in &ix.ends {
        *mult.entry((a.min(b), a.max(b))).or_default() += 1;
    }
    let mut pairs: Vec<_> = mult.into_iter().collect();
    pairs.sort_unstable();
    let mut net = MaxFlow::new(ix.n());
    for ((a, b), c) in pairs {
        net.add_undirected(a, b, c);
    }
    net
}

/// Global minimum edge cut, via max-flow from the lowest vertex to every
/// other vertex. Zero for disconnected graphs and graphs with < 2 vertices.
pub fn edge_connectivity(g: &MultiGraph) -> usize {
    connectivity_capped(g, u64::MAX) as usize
}

/// True when every cut has at least `k` edges. Vacuous for `k == 0`.
pub fn is_k_edge_connected(g: &MultiGraph, k: usize) -> bool {
    k == 0 || connectivity_capped(g, k as u64) >= k as u64
}

fn connectivity_capped(g: &MultiGraph, limit: u64) -> u64 {
    if g.vertex_count() < 2 || !g.is_connected() {
        return 0;
    }
    let ix = Indexed::new(g);
    let mut net = network(&ix);
    let mut best = limit;
    for t in 1..ix.n() {
        best = best.min(net.run(0, t, best));
        if best == 0 {
            break;
        }
    }
    best
}

/// Smallest cut separating two vertices other than `skip`, capped at `limit`.
/// Cuts that only isolate `skip` are ignored, which is the measure a partial
/// lifting at `skip` has to keep intact.
pub(crate) fn connectivity_avoiding(g: &MultiGraph, skip: Vertex, limit: u64) -> u64 {
    let ix = Indexed::new(g);
    let others: Vec<usize> = (0..ix.n()).filter(|&i| ix.vertex(i) != skip).collect();
    if others.len() < 2 || limit == 0 {
        return limit;
    }
    let mut net = network(&ix);
    let mut best = limit;
    for &t in &others[1..] {
        best = best.min(net.run(others[0], t, best));
        if best == 0 {
            break;
        }
    }
    best
}

/// Maximum number of edge-disjoint `s`-`t` paths.
pub fn local_edge_connectivity(g: &MultiGraph, s: Vertex, t: Vertex) -> usize {
    if s == t || !g.has_vertex(s) || !g.has_vertex(t) {
        return 0;
    }
    let ix = Indexed::new(g);
    let mut net = network(&ix);
    net.run(ix.index(s), ix.index(t), u64::MAX) as usize
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::MultiGraph;

    fn nk2(n: usize) -> MultiGraph {
        MultiGraph::from_pairs((0..n).map(|_| (0, 1))).unwrap()
    }

    /// Exhaustive cut enumeration; the lowest vertex is fixed on one side.
    pub(crate) fn brute_connectivity(g: &MultiGraph) -> usize {
        let vs: Vec<_> = g.vertices().collect();
        if vs.len() < 2 {
            return 0;
        }
        let n = vs.len();
        let mut best = usize::MAX;
        for mask in 0u32..(1 << (n - 1)) {
            // vertex 0 always outside `mask`; non-empty other side
            if mask == 0 {
                continue;
            }
            let inside = |v: u64| {
                let i = vs.iter().position(|&x| x == v).unwrap();
                i > 0 && mask & (1 << (i - 1)) != 0
            };
            let cut = g.edges().filter(|(_, e)| inside(e.u) != inside(e.v)).count();
            best = best.min(cut);
        }
        best
    }

    #[test]
    fn parallel_edges_count_as_capacity() {
        assert_eq!(edge_connectivity(&nk2(5)), 5);
    }

    #[test]
    fn trees_have_connectivity_one() {
        let star = MultiGraph::from_pairs([(0, 1), (0, 2), (0, 3), (3, 4)]).unwrap();
        assert_eq!(edge_connectivity(&star), 1);
    }

    #[test]
    fn cycle_has_connectivity_two() {
        let c4 = MultiGraph::from_pairs([(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        assert_eq!(edge_connectivity(&c4), 2);
        assert!(is_k_edge_connected(&c4, 2));
        assert!(!is_k_edge_connected(&c4, 3));
    }

    #[test]
    fn degenerate_graphs() {
        let mut g = MultiGraph::new();
        assert_eq!(edge_connectivity(&g), 0);
        g.add_vertex(3);
        assert_eq!(edge_connectivity(&g), 0);
        g.add_vertex(5);
        assert_eq!(edge_connectivity(&g), 0);
    }

    #[test]
    fn local_connectivity_in_k4() {
        let k4 = MultiGraph::from_pairs([(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        assert_eq!(local_edge_connectivity(&k4, 0, 3), 3);
    }

    #[test]
    fn matches_cut_enumeration_on_fixed_graphs() {
        let graphs = [
            MultiGraph::from_pairs([(0, 1), (0, 1), (1, 2), (2, 0), (2, 3), (3, 0), (3, 1)]).unwrap(),
            MultiGraph::from_pairs([(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 2)]).unwrap(),
        ];
        for g in &graphs {
            assert_eq!(edge_connectivity(g), brute_connectivity(g));
        }
    }
}
