use std::collections::VecDeque;

use super::{EdgeId, GraphError, Indexed, MultiGraph};

/// Rooted view of one forest, rebuilt after every augmentation.
struct ForestShape {
    comp: Vec<usize>,
    parent: Vec<usize>,
    parent_edge: Vec<usize>,
    depth: Vec<usize>,
}

impl ForestShape {
    fn build(ix: &Indexed, members: &[bool]) -> Self {
        let n = ix.n();
        let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
        for (e, &(a, b)) in ix.ends.iter().enumerate() {
            if members[e] {
                adj[a].push((b, e));
                adj[b].push((a, e));
            }
        }
        let mut shape = ForestShape {
            comp: vec![usize::MAX; n],
            parent: vec![usize::MAX; n],
            parent_edge: vec![usize::MAX; n],
            depth: vec![0; n],
        };
        for root in 0..n {
            if shape.comp[root] != usize::MAX {
                continue;
            }
            shape.comp[root] = root;
            let mut queue = VecDeque::from([root]);
            while let Some(x) = queue.pop_front() {
                for &(y, e) in &adj[x] {
                    if shape.comp[y] == usize::MAX {
                        shape.comp[y] = root;
                        shape.parent[y] = x;
                        shape.parent_edge[y] = e;
                        shape.depth[y] = shape.depth[x] + 1;
                        queue.push_back(y);
                    }
                }
            }
        }
        shape
    }

    /// Edges on the forest path between `a` and `b` (same component).
    fn path(&self, mut a: usize, mut b: usize) -> Vec<usize> {
        let mut out = Vec::new();
        while self.depth[a] > self.depth[b] {
            out.push(self.parent_edge[a]);
            a = self.parent[a];
        }
        while self.depth[b] > self.depth[a] {
            out.push(self.parent_edge[b]);
            b = self.parent[b];
        }
        while a != b {
            out.push(self.parent_edge[a]);
            out.push(self.parent_edge[b]);
            a = self.parent[a];
            b = self.parent[b];
        }
        out
    }
}

/// Partitions as many edges as possible into `k` forests (matroid union with
/// shortest augmenting paths). Edges are offered in ascending id order. The
/// returned forests have maximum total size.
pub fn forest_packing(g: &MultiGraph, k: usize) -> Vec<Vec<EdgeId>> {
    let ix = Indexed::new(g);
    let m = ix.m();
    let target = k * ix.n().saturating_sub(1);
    let mut owner: Vec<Option<usize>> = vec![None; m];
    let mut members: Vec<Vec<bool>> = vec![vec![false; m]; k];
    let mut shapes: Vec<ForestShape> = (0..k).map(|i| ForestShape::build(&ix, &members[i])).collect();
    let mut placed = 0;

    for start in 0..m {
        if placed == target {
            break;
        }
        let mut pred: Vec<Option<(usize, usize)>> = vec![None; m];
        let mut seen = vec![false; m];
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        let mut sink: Option<(usize, usize)> = None;
        'bfs: while let Some(x) = queue.pop_front() {
            let (a, b) = ix.ends[x];
            for i in 0..k {
                if owner[x] == Some(i) {
                    continue;
                }
                let shape = &shapes[i];
                if shape.comp[a] != shape.comp[b] {
                    sink = Some((x, i));
                    break 'bfs;
                }
                for y in shape.path(a, b) {
                    if !seen[y] {
                        seen[y] = true;
                        pred[y] = Some((x, i));
                        queue.push_back(y);
                    }
                }
            }
        }
        let Some((mut x, mut forest)) = sink else {
            continue;
        };
        let mut touched = vec![false; k];
        loop {
            let old = owner[x];
            if let Some(old) = old {
                members[old][x] = false;
                touched[old] = true;
            }
            owner[x] = Some(forest);
            members[forest][x] = true;
            touched[forest] = true;
            match pred[x] {
                Some((prev, i)) => {
                    // `prev` takes over the slot `x` vacated in forest `i`
                    debug_assert_eq!(old, Some(i));
                    x = prev;
                    forest = i;
                }
                None => break,
            }
        }
        placed += 1;
        for i in 0..k {
            if touched[i] {
                shapes[i] = ForestShape::build(&ix, &members[i]);
            }
        }
    }

    (0..k)
        .map(|i| (0..m).filter(|&e| members[i][e]).map(|e| ix.ids[e]).collect())
        .collect()
}

/// `k` pairwise edge-disjoint spanning trees, or `NoPacking` when none
/// exist. Exact: failure means no such packing exists.
pub fn spanning_tree_packing(g: &MultiGraph, k: usize) -> Result<Vec<Vec<EdgeId>>, GraphError> {
    let n = g.vertex_count();
    let needed = k * n.saturating_sub(1);
    if !g.is_connected() || g.edge_count() < needed {
        return Err(GraphError::NoPacking {
            requested: k,
            found: 0,
            needed,
        });
    }
    let forests = forest_packing(g, k);
    let found: usize = forests.iter().map(Vec::len).sum();
    if found == needed {
        Ok(forests)
    } else {
        if super::is_k_edge_connected(g, 2 * k) {
            log::error!("no packing of {k} trees in a {}-edge-connected graph", 2 * k);
        }
        Err(GraphError::NoPacking {
            requested: k,
            found,
            needed,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::is_spanning_tree;
    use std::collections::BTreeSet;

    fn assert_packing(g: &MultiGraph, trees: &[Vec<EdgeId>]) {
        let mut seen = BTreeSet::new();
        for t in trees {
            assert!(is_spanning_tree(g, t));
            for &e in t {
                assert!(seen.insert(e), "edge {e} used twice");
            }
        }
    }

    #[test]
    fn parallel_bundle_packs_single_edges() {
        let g = MultiGraph::from_pairs((0..6).map(|_| (0, 1))).unwrap();
        let trees = spanning_tree_packing(&g, 3).unwrap();
        assert_eq!(trees.len(), 3);
        assert!(trees.iter().all(|t| t.len() == 1));
        assert_packing(&g, &trees);
    }

    #[test]
    fn k4_holds_two_trees() {
        let k4 = MultiGraph::from_pairs([(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        let trees = spanning_tree_packing(&k4, 2).unwrap();
        assert_packing(&k4, &trees);
        assert!(spanning_tree_packing(&k4, 3).is_err());
    }

    #[test]
    fn c4_cannot_hold_two_trees() {
        let c4 = MultiGraph::from_pairs([(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        assert!(matches!(
            spanning_tree_packing(&c4, 2),
            Err(GraphError::NoPacking { needed: 6, .. })
        ));
    }

    #[test]
    fn k5_fills_two_forests() {
        let g = MultiGraph::from_pairs([
            (0, 1), (1, 2), (2, 0), (0, 3), (3, 4), (4, 0),
            (1, 3), (2, 4), (1, 4), (2, 3),
        ])
        .unwrap();
        let forests = forest_packing(&g, 2);
        let total: usize = forests.iter().map(Vec::len).sum();
        assert_eq!(total, 8);
    }
}
