use std::collections::{BTreeMap, VecDeque};

use num_rational::Ratio;
use rand::seq::SliceRandom;

use super::{is_k_edge_connected, spanning_tree_packing, EdgeId, GraphError, Indexed, MultiGraph, UnionFind, Vertex};
use crate::rng::{mix, seeded};

/// Per-vertex maximum tree degree; vertices without an entry are unbounded.
pub type DegreeCaps = BTreeMap<Vertex, usize>;

const RESTARTS: u64 = 6;

struct Rooted {
    parent: Vec<usize>,
    parent_edge: Vec<usize>,
    depth: Vec<usize>,
}

fn root_tree(ix: &Indexed, in_tree: &[bool]) -> Rooted {
    let n = ix.n();
    let mut r = Rooted {
        parent: vec![usize::MAX; n],
        parent_edge: vec![usize::MAX; n],
        depth: vec![usize::MAX; n],
    };
    r.depth[0] = 0;
    let mut queue = VecDeque::from([0]);
    while let Some(x) = queue.pop_front() {
        for &(y, e) in &ix.adj[x] {
            if in_tree[e] && r.depth[y] == usize::MAX {
                r.depth[y] = r.depth[x] + 1;
                r.parent[y] = x;
                r.parent_edge[y] = e;
                queue.push_back(y);
            }
        }
    }
    r
}

fn tree_path(r: &Rooted, mut a: usize, mut b: usize) -> Vec<usize> {
    let mut out = Vec::new();
    while r.depth[a] > r.depth[b] {
        out.push(r.parent_edge[a]);
        a = r.parent[a];
    }
    while r.depth[b] > r.depth[a] {
        out.push(r.parent_edge[b]);
        b = r.parent[b];
    }
    while a != b {
        out.push(r.parent_edge[a]);
        out.push(r.parent_edge[b]);
        a = r.parent[a];
        b = r.parent[b];
    }
    out
}

fn excess(deg: &[usize], cap: &[usize]) -> usize {
    deg.iter().zip(cap).map(|(&d, &c)| d.saturating_sub(c)).sum()
}

/// Spanning tree with `d(v, T) <= caps[v]`, found by edge-exchange local
/// search: a non-tree edge between two vertices with spare capacity replaces
/// a tree edge at an overloaded vertex on the cycle it closes. Sideways
/// moves that shift overload onto another vertex are allowed up to a budget,
/// and the search restarts from fresh random trees before giving up.
pub fn bounded_degree_spanning_tree(
    g: &MultiGraph,
    caps: &DegreeCaps,
    seed: u64,
) -> Result<Vec<EdgeId>, GraphError> {
    if !g.is_connected() {
        return Err(GraphError::NotConnected);
    }
    let ix = Indexed::new(g);
    let n = ix.n();
    if n <= 1 {
        return Ok(Vec::new());
    }
    let cap: Vec<usize> = ix
        .verts
        .iter()
        .map(|v| caps.get(v).copied().unwrap_or(usize::MAX))
        .collect();
    if let Some(x) = (0..n).find(|&x| cap[x] == 0) {
        return Err(GraphError::BoundNotMet { vertex: ix.vertex(x) });
    }

    let mut worst = 0;
    for attempt in 0..RESTARTS {
        let mut rng = seeded(mix(seed, attempt));
        let mut order: Vec<usize> = (0..ix.m()).collect();
        order.shuffle(&mut rng);

        let mut in_tree = vec![false; ix.m()];
        let mut deg = vec![0usize; n];
        let mut uf = UnionFind::new(n);
        for pass in 0..2 {
            for &e in &order {
                let (a, b) = ix.ends[e];
                let fits = deg[a] < cap[a] && deg[b] < cap[b];
                if (pass == 1 || fits) && uf.union(a, b) {
                    in_tree[e] = true;
                    deg[a] += 1;
                    deg[b] += 1;
                }
            }
        }

        let budget = (n * n * n).max(1000);
        let mut sideways = n * n;
        for _ in 0..budget {
            if excess(&deg, &cap) == 0 {
                return Ok((0..ix.m()).filter(|&e| in_tree[e]).map(|e| ix.ids[e]).collect());
            }
            let rooted = root_tree(&ix, &in_tree);
            order.shuffle(&mut rng);
            let mut improving: Option<(usize, usize)> = None;
            let mut lateral: Option<(usize, usize)> = None;
            for &e in &order {
                if in_tree[e] {
                    continue;
                }
                let (x, y) = ix.ends[e];
                let slack_x = deg[x] < cap[x];
                let slack_y = deg[y] < cap[y];
                if !slack_x && !slack_y {
                    continue;
                }
                let path = tree_path(&rooted, x, y);
                let best = path
                    .iter()
                    .copied()
                    .filter(|&f| {
                        let (p, q) = ix.ends[f];
                        deg[p] > cap[p] || deg[q] > cap[q]
                    })
                    .max_by_key(|&f| {
                        let (p, q) = ix.ends[f];
                        deg[p].saturating_sub(cap[p]) + deg[q].saturating_sub(cap[q])
                    });
                let Some(f) = best else { continue };
                if slack_x && slack_y {
                    improving = Some((e, f));
                    break;
                }
                if lateral.is_none() {
                    let (p, q) = ix.ends[f];
                    // the overloaded endpoint must not be the one receiving
                    let receiver = if slack_x { y } else { x };
                    if receiver != p && receiver != q {
                        lateral = Some((e, f));
                    }
                }
            }
            let (add, drop) = match (improving, lateral) {
                (Some(mv), _) => mv,
                (None, Some(mv)) if sideways > 0 => {
                    sideways -= 1;
                    mv
                }
                _ => break,
            };
            in_tree[add] = true;
            in_tree[drop] = false;
            let (x, y) = ix.ends[add];
            let (p, q) = ix.ends[drop];
            deg[x] += 1;
            deg[y] += 1;
            deg[p] -= 1;
            deg[q] -= 1;
        }
        let over = (0..n).max_by_key(|&x| deg[x].saturating_sub(cap[x])).unwrap();
        worst = over;
        if excess(&deg, &cap) == 0 {
            return Ok((0..ix.m()).filter(|&e| in_tree[e]).map(|e| ix.ids[e]).collect());
        }
    }
    Err(GraphError::BoundNotMet { vertex: ix.vertex(worst) })
}

/// Largest integer strictly below `eps * d`.
pub(crate) fn strict_cap(eps: Ratio<u64>, d: usize) -> usize {
    let scaled = *eps.numer() * d as u64;
    if scaled == 0 {
        0
    } else {
        ((scaled - 1) / *eps.denom()) as usize
    }
}

/// Spanning tree with `d(v, T) < eps * d(v, G)` for every vertex.
pub fn low_degree_spanning_tree(
    g: &MultiGraph,
    eps: Ratio<u64>,
    seed: u64,
) -> Result<Vec<EdgeId>, GraphError> {
    assert!(
        *eps.numer() > 0 && eps < Ratio::from_integer(1),
        "eps must lie strictly between 0 and 1"
    );
    let caps: DegreeCaps = g
        .degrees()
        .into_iter()
        .map(|(v, d)| (v, strict_cap(eps, d)))
        .collect();
    let result = bounded_degree_spanning_tree(g, &caps, seed);
    if result.is_err() {
        let threshold = (4 * *eps.denom()).div_ceil(*eps.numer()) as usize;
        if is_k_edge_connected(g, threshold) {
            log::warn!("low-degree tree search failed on a {threshold}-edge-connected graph");
        }
    }
    result
}

/// Union of `q` low-degree trees, each drawn from its own group of
/// `ceil(4 / eps)` packed spanning trees: a spanning `q`-edge-connected
/// subgraph with `d(v, H) < eps * d(v, G)`.
pub fn low_degree_skeleton(
    g: &MultiGraph,
    eps: Ratio<u64>,
    q: usize,
    seed: u64,
) -> Result<MultiGraph, GraphError> {
    let group = (4 * *eps.denom()).div_ceil(*eps.numer()) as usize;
    let trees = spanning_tree_packing(g, group * q)?;
    let mut keep = Vec::new();
    for (i, chunk) in trees.chunks(group).enumerate() {
        let part = g.spanning_subgraph(chunk.iter().flatten().copied());
        keep.extend(low_degree_spanning_tree(&part, eps, mix(seed, i as u64))?);
    }
    Ok(g.spanning_subgraph(keep))
}

/// Spanning `q`-edge-connected subgraph with `d(v, H) < d(v, G) / k`, built
/// from `4kq` packed trees.
pub fn connected_low_degree_subgraph(
    g: &MultiGraph,
    k: usize,
    q: usize,
    seed: u64,
) -> Result<MultiGraph, GraphError> {
    assert!(k >= 1);
    if k == 1 {
        // eps = 1 is outside the tree search's range; four packed trees
        // still give d(v, T) <= d(v, G_i) - 3 < d(v, G_i)
        let trees = spanning_tree_packing(g, 4 * q)?;
        let keep: Vec<EdgeId> = trees.chunks(4).flat_map(|c| c[0].clone()).collect();
        return Ok(g.spanning_subgraph(keep));
    }
    low_degree_skeleton(g, Ratio::new(1, k as u64), q, seed)
}
