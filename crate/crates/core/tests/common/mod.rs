//! Shared instance builders and brute-force oracles for the integration
//! tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng as _;
use tstar::graph::{MultiGraph, Vertex};
use tstar::orientation::ResidueTarget;
use tstar::rng::seeded;

/// Sorted edge list after relabeling by `perm`.
fn relabeled(edges: &[(usize, usize)], perm: &[usize]) -> Vec<(usize, usize)> {
    let mut out: Vec<(usize, usize)> = edges
        .iter()
        .map(|&(u, v)| {
            let (a, b) = (perm[u], perm[v]);
            (a.min(b), a.max(b))
        })
        .collect();
    out.sort();
    out
}

fn permutations_within(groups: &[Vec<usize>]) -> Vec<Vec<usize>> {
    fn perms(items: &[usize]) -> Vec<Vec<usize>> {
        if items.len() <= 1 {
            return vec![items.to_vec()];
        }
        let mut out = Vec::new();
        for i in 0..items.len() {
            let mut rest = items.to_vec();
            let x = rest.remove(i);
            for mut p in perms(&rest) {
                p.insert(0, x);
                out.push(p);
            }
        }
        out
    }
    let mut acc: Vec<Vec<usize>> = vec![Vec::new()];
    for g in groups {
        let ps = perms(g);
        acc = acc
            .into_iter()
            .flat_map(|pre| {
                ps.iter().map(move |p| {
                    let mut q = pre.clone();
                    q.extend(p);
                    q
                })
            })
            .collect();
    }
    acc
}

/// Exact canonical form: the least sorted edge list over all relabelings
/// that list vertices by non-decreasing degree.
fn canonical(n: usize, edges: &[(usize, usize)]) -> Vec<(usize, usize)> {
    let mut deg = vec![0; n];
    for &(u, v) in edges {
        deg[u] += 1;
        deg[v] += 1;
    }
    let mut by_deg: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for v in 0..n {
        by_deg.entry(deg[v]).or_default().push(v);
    }
    let groups: Vec<Vec<usize>> = by_deg.into_values().collect();
    permutations_within(&groups)
        .into_iter()
        .map(|order| {
            // order[i] is the vertex placed at position i
            let mut perm = vec![0; n];
            for (pos, &v) in order.iter().enumerate() {
                perm[v] = pos;
            }
            relabeled(edges, &perm)
        })
        .min()
        .unwrap()
}

/// Every connected loopless multigraph with `1..=max_edges` edges, one per
/// isomorphism class.
pub fn connected_multigraphs(max_edges: usize) -> Vec<MultiGraph> {
    let mut layer: BTreeSet<(usize, Vec<(usize, usize)>)> = BTreeSet::from([(2, vec![(0, 1)])]);
    let mut all = Vec::new();
    for e in 1..=max_edges {
        for (_, edges) in &layer {
            all.push(MultiGraph::from_pairs(edges.iter().map(|&(u, v)| (u as Vertex, v as Vertex))).unwrap());
        }
        if e == max_edges {
            break;
        }
        let mut next = BTreeSet::new();
        for (n, edges) in &layer {
            let n = *n;
            for u in 0..n {
                for v in u + 1..=n {
                    let mut grown = edges.clone();
                    grown.push((u, v));
                    let size = if v == n { n + 1 } else { n };
                    next.insert((size, canonical(size, &grown)));
                }
            }
        }
        layer = next;
    }
    all
}

/// Whether some orientation of `g` meets `t`, by trying all `2^e`.
pub fn orientable(g: &MultiGraph, t: &ResidueTarget) -> bool {
    let edges: Vec<_> = g.edges().map(|(_, e)| e).collect();
    let k = t.modulus;
    (0u64..1 << edges.len()).any(|mask| {
        let mut out: BTreeMap<Vertex, u64> = g.vertices().map(|v| (v, 0)).collect();
        for (i, e) in edges.iter().enumerate() {
            let tail = if mask >> i & 1 == 1 { e.u } else { e.v };
            *out.get_mut(&tail).unwrap() += 1;
        }
        out.iter().all(|(v, d)| d % k == t.residue(*v))
    })
}

/// Every residue assignment mod `k` on the vertices of `g`.
pub fn all_targets(g: &MultiGraph, k: u64) -> Vec<ResidueTarget> {
    let vs: Vec<Vertex> = g.vertices().collect();
    (0..k.pow(vs.len() as u32))
        .map(|code| {
            let mut c = code;
            let mut p = BTreeMap::new();
            for &v in &vs {
                p.insert(v, c % k);
                c /= k;
            }
            ResidueTarget::new(k, p)
        })
        .collect()
}

/// Union of `trees` random spanning trees of `K_n` plus `noise` random
/// edges; edge connectivity is at least `trees`.
pub fn random_multigraph(n: usize, trees: usize, noise: usize, seed: u64) -> MultiGraph {
    let mut rng = seeded(seed);
    let mut g = MultiGraph::new();
    for v in 0..n as Vertex {
        g.add_vertex(v);
    }
    for _ in 0..trees {
        // random attachment order gives a random spanning tree
        let mut order: Vec<Vertex> = (0..n as Vertex).collect();
        for i in (1..n).rev() {
            order.swap(i, rng.gen_range(0..=i));
        }
        for i in 1..n {
            let parent = order[rng.gen_range(0..i)];
            g.push_edge(order[i], parent).unwrap();
        }
    }
    for _ in 0..noise {
        let u = rng.gen_range(0..n) as Vertex;
        let mut v = rng.gen_range(0..n) as Vertex;
        while v == u {
            v = rng.gen_range(0..n) as Vertex;
        }
        g.push_edge(u, v).unwrap();
    }
    g
}
