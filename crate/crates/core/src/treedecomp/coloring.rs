//! Proper edge colorings of bipartite multigraphs and the equitable
//! colorings built from them.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;

use super::pattern::TreePattern;
use super::DecompError;
use crate::graph::{bipartition, Bipartition, EdgeId, Indexed, MultiGraph, Side, Vertex};
use crate::rng::{mix, seeded};
use crate::splitter::{grouped_split, SplitConfig};
use crate::transform::split_vertices;

/// Color per edge id, colors `1..=m`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EdgeColoring {
    pub colors: BTreeMap<EdgeId, usize>,
}

impl EdgeColoring {
    pub fn color(&self, e: EdgeId) -> Option<usize> {
        self.colors.get(&e).copied()
    }

    pub fn is_total_for(&self, g: &MultiGraph) -> bool {
        self.colors.len() == g.edge_count() && g.edge_ids().all(|e| self.colors.contains_key(&e))
    }

    /// `d_c(v)` for colors `1..=m`, indexed by `c - 1`.
    pub fn color_degrees(&self, g: &MultiGraph, m: usize) -> BTreeMap<Vertex, Vec<usize>> {
        let mut out: BTreeMap<Vertex, Vec<usize>> = g.vertices().map(|v| (v, vec![0; m])).collect();
        for (id, e) in g.edges() {
            let c = self.colors[&id] - 1;
            out.get_mut(&e.u).unwrap()[c] += 1;
            out.get_mut(&e.v).unwrap()[c] += 1;
        }
        out
    }
}

/// Proper edge coloring with colors `0..k` of a bipartite multigraph of
/// maximum degree at most `k`, by alternating-path recoloring.
pub fn konig_color(g: &MultiGraph, k: usize) -> Result<BTreeMap<EdgeId, usize>, DecompError> {
    bipartition(g).ok_or(DecompError::NotBipartite)?;
    for (v, d) in g.degrees() {
        if d > k {
            return Err(DecompError::DegreeTooLarge {
                vertex: v,
                degree: d,
                colors: k,
            });
        }
    }
    let ix = Indexed::new(g);
    let mut at: Vec<Vec<Option<usize>>> = vec![vec![None; k]; ix.n()];
    let mut color: Vec<usize> = vec![usize::MAX; ix.m()];
    let other = |e: usize, x: usize| {
        let (a, b) = ix.ends[e];
        if a == x {
            b
        } else {
            a
        }
    };
    for e in 0..ix.m() {
        let (u, v) = ix.ends[e];
        let alpha = (0..k).find(|&c| at[u][c].is_none()).expect("free color at u");
        let beta = (0..k).find(|&c| at[v][c].is_none()).expect("free color at v");
        if at[v][alpha].is_some() {
            // swap alpha and beta along the alternating path leaving v
            let mut path = Vec::new();
            let (mut x, mut c) = (v, alpha);
            while let Some(f) = at[x][c] {
                path.push(f);
                x = other(f, x);
                c = if c == alpha { beta } else { alpha };
            }
            debug_assert!(x != u, "alternating path reached u in a bipartite graph");
            for &f in &path {
                let (a, b) = ix.ends[f];
                at[a][color[f]] = None;
                at[b][color[f]] = None;
            }
            for &f in &path {
                color[f] = if color[f] == alpha { beta } else { alpha };
                let (a, b) = ix.ends[f];
                at[a][color[f]] = Some(f);
                at[b][color[f]] = Some(f);
            }
        }
        assert!(at[u][alpha].is_none() && at[v][alpha].is_none());
        color[e] = alpha;
        at[u][alpha] = Some(e);
        at[v][alpha] = Some(e);
    }
    Ok((0..ix.m()).map(|e| (ix.ids[e], color[e])).collect())
}

/// Colors each part with its own color class: every vertex of a part is
/// split into chunks of `|class|` edges (at most one shorter chunk per
/// vertex) and the split graph is properly colored. Class-A vertices must
/// have part degrees divisible by the class size.
pub fn color_parts(
    g: &MultiGraph,
    bip: &Bipartition,
    parts: &[MultiGraph],
    classes: &[BTreeSet<usize>],
    seed: u64,
) -> Result<EdgeColoring, DecompError> {
    assert_eq!(parts.len(), classes.len());
    let mut coloring = EdgeColoring::default();
    for (i, (part, class)) in parts.iter().zip(classes).enumerate() {
        let size = class.len();
        let palette: Vec<usize> = class.iter().copied().collect();
        let mut rng = seeded(mix(seed, i as u64));
        let mut plan = BTreeMap::new();
        for (v, mut edges) in part.incidence() {
            if bip.side(v) == Some(Side::A) && edges.len() % size != 0 {
                return Err(DecompError::NotDivisible {
                    vertex: v,
                    degree: edges.len(),
                    modulus: size,
                });
            }
            edges.shuffle(&mut rng);
            plan.insert(v, edges.chunks(size).map(<[EdgeId]>::to_vec).collect::<Vec<_>>());
        }
        let (split, _) = split_vertices(part, &plan)?;
        for (id, c) in konig_color(&split, size)? {
            coloring.colors.insert(id, palette[c]);
        }
    }
    assert!(coloring.is_total_for(g), "parts do not cover the graph");
    Ok(coloring)
}

/// Grouped split with the class sizes of the pattern, then [`color_parts`].
/// On class A every color gets `d(v)/m` edges.
pub fn t_equitable_coloring(
    g: &MultiGraph,
    bip: &Bipartition,
    tp: &TreePattern,
    lambda: usize,
    cfg: &SplitConfig,
) -> Result<EdgeColoring, DecompError> {
    for &a in &bip.class_a {
        if g.degree(a) % tp.m != 0 {
            return Err(DecompError::NotDivisible {
                vertex: a,
                degree: g.degree(a),
                modulus: tp.m,
            });
        }
    }
    let parts = grouped_split(g, bip, &tp.group_sizes(), lambda, cfg)?;
    let coloring = color_parts(g, bip, &parts, tp.b_classes(), mix(cfg.seed, 11))?;
    debug_assert!(is_t_equitable(g, bip, tp, &coloring));
    Ok(coloring)
}

/// The degree equations: colors of `T(i)` equal at class-A vertices for
/// `i <= a`, at class-B vertices for `a < i <= a+b`.
pub fn is_t_equitable(g: &MultiGraph, bip: &Bipartition, tp: &TreePattern, coloring: &EdgeColoring) -> bool {
    if !coloring.is_total_for(g) || coloring.colors.values().any(|&c| c == 0 || c > tp.m) {
        return false;
    }
    let degs = coloring.color_degrees(g, tp.m);
    let equal = |v: Vertex, class: &BTreeSet<usize>| {
        let mut it = class.iter().map(|&c| degs[&v][c - 1]);
        let first = it.next();
        it.all(|d| Some(d) == first)
    };
    let (a, b) = (tp.a(), tp.b());
    bip.class_a.iter().all(|&v| tp.color_classes[..a].iter().all(|cl| equal(v, cl)))
        && bip.class_b.iter().all(|&v| tp.color_classes[a..a + b].iter().all(|cl| equal(v, cl)))
}
