//! End-to-end decomposition with route selection and final verification.

use std::collections::BTreeMap;

use super::bistar::bistar_route;
use super::coloring::t_equitable_coloring;
use super::extract::extract_copies;
use super::p5::decompose_p5;
use super::pattern::{build_pattern, build_pattern_with_root, TreePattern};
use super::repair::{repair_conflicts, RepairStats};
use super::trees::{bistar_shape, diameter};
use super::{DecompError, Decomposition, Kind, TreeCopy};
use crate::app::verify::verify_decomposition;
use crate::graph::{bipartition, girth, Bipartition, EdgeId, MultiGraph, Vertex};
use crate::rng::mix;
use crate::splitter::{split_divisible, SplitConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Route {
    SingleEdge,
    P5,
    Bistar,
    General,
}

#[derive(Debug, Clone)]
pub struct DecomposeOptions {
    pub mode: Kind,
    pub config: SplitConfig,
    /// Connectivity asked of the split parts; defaults to 1, or `2m` when
    /// conflicts must be repaired.
    pub lambda: Option<usize>,
    /// Seeds tried per part before giving up (attempt mode only).
    pub attempts: usize,
}

impl Default for DecomposeOptions {
    fn default() -> Self {
        DecomposeOptions {
            mode: Kind::Homomorphic,
            config: SplitConfig::default(),
            lambda: None,
            attempts: 3,
        }
    }
}

#[derive(Debug, Clone)]
pub struct DecomposeReport {
    pub decomposition: Decomposition,
    /// Route taken for each decomposed part.
    pub routes: Vec<Route>,
    pub repair: Option<RepairStats>,
    /// Tree side `T_A` was mapped into the second color class of `G`.
    pub sides_swapped: bool,
    /// `G` was first split into an A-divisible and a B-divisible part.
    pub divisible_split: bool,
}

fn merge_stats(total: &mut Option<RepairStats>, s: RepairStats) {
    let t = total.get_or_insert_with(RepairStats::default);
    t.conflicts_before += s.conflicts_before;
    t.conflicts_after += s.conflicts_after;
    t.switches += s.switches;
    t.history.extend(s.history);
}

/// Vertices and edges of a path tree from its lowest-id end.
fn path_order(t: &MultiGraph) -> (Vec<Vertex>, Vec<EdgeId>) {
    let start = t.vertices().find(|&v| t.degree(v) == 1).expect("a path has ends");
    let inc = t.incidence();
    let (mut verts, mut edges) = (vec![start], Vec::new());
    while edges.len() < t.edge_count() {
        let x = *verts.last().unwrap();
        let &id = inc[&x].iter().find(|id| !edges.contains(*id)).unwrap();
        edges.push(id);
        verts.push(t.edge(id).unwrap().other(x));
    }
    (verts, edges)
}

/// Renames copies of the standard path `0-1-2-3-4` to the vertices and
/// edges of `t`.
fn relabel_path_copies(d: Decomposition, t: &MultiGraph) -> Decomposition {
    let (verts, edges) = path_order(t);
    let copies = d
        .copies
        .into_iter()
        .map(|c| TreeCopy {
            edge_map: c.edge_map.iter().map(|(&te, &ge)| (edges[te as usize], ge)).collect(),
            vertex_image: c.vertex_image.iter().map(|(&tv, &gv)| (verts[tv as usize], gv)).collect(),
        })
        .collect();
    Decomposition { copies, ..d }
}

struct Plan<'a> {
    t: &'a MultiGraph,
    tp: &'a TreePattern,
    repair: bool,
    lambda: usize,
}

fn route_once(
    g: &MultiGraph,
    bip: &Bipartition,
    plan: &Plan,
    cfg: &SplitConfig,
) -> Result<(Decomposition, Route, Option<RepairStats>), DecompError> {
    let (t, tp) = (plan.t, plan.tp);
    if g.edge_count() == 0 {
        return Ok((Decomposition::default(), Route::General, None));
    }
    if tp.m == 4 && tp.diam == 4 {
        let kind = if plan.repair { Kind::Isomorphic } else { Kind::Homomorphic };
        match decompose_p5(g, bip, kind, cfg) {
            Ok((d, stats)) => return Ok((relabel_path_copies(d, t), Route::P5, stats)),
            Err(e) => log::debug!("path route declined: {e}"),
        }
    }
    if let Some((k, _)) = bistar_shape(t).filter(|&(k, _)| k > 1) {
        let center = t.vertices().find(|&v| t.degree(v) == k).unwrap();
        let btp = build_pattern_with_root(t, false, center)?;
        match bistar_route(g, bip, &btp, cfg) {
            Ok(d) => return Ok((d, Route::Bistar, None)),
            Err(e) => log::debug!("bistar route declined: {e}"),
        }
    }
    let coloring = t_equitable_coloring(g, bip, tp, plan.lambda, cfg)?;
    let d = extract_copies(g, bip, tp, &coloring, mix(cfg.seed, 31))?;
    if plan.repair {
        let (d, stats) = repair_conflicts(g, bip, tp, &d, Some(plan.lambda), cfg)?;
        return Ok((d, Route::General, Some(stats)));
    }
    Ok((d, Route::General, None))
}

/// Decomposes `g` into homomorphic copies of `t` (isomorphic copies in
/// `Kind::Isomorphic` mode). `g` must be bipartite with every degree on one
/// side divisible by `m`, or at least `m | e(g)`, in which case it is first
/// split into two such parts. Isomorphic mode needs girth above the tree's
/// diameter, or equal to an even diameter (then conflicts are repaired).
/// The result is always checked by the verifier.
pub fn decompose(g: &MultiGraph, t: &MultiGraph, opts: &DecomposeOptions) -> Result<DecomposeReport, DecompError> {
    if t.edge_count() == 0 || !t.is_tree() {
        return Err(DecompError::NotATree);
    }
    let m = t.edge_count();
    if m == 1 {
        let (tid, e) = t.edges().next().unwrap();
        let copies = g
            .edges()
            .map(|(id, ge)| TreeCopy {
                edge_map: BTreeMap::from([(tid, id)]),
                vertex_image: BTreeMap::from([(e.u, ge.u), (e.v, ge.v)]),
            })
            .collect();
        let d = Decomposition {
            kind: Kind::Isomorphic,
            copies,
        };
        return finish(g, t, opts, d, vec![Route::SingleEdge], None, false, false);
    }

    let bip = bipartition(g).ok_or(DecompError::NotBipartite)?;
    let diam = diameter(t);
    let repair = match opts.mode {
        Kind::Homomorphic => false,
        Kind::Isomorphic => {
            let gi = girth(g);
            if gi.exceeds(diam) {
                false
            } else if gi.at_least(diam) && diam % 2 == 0 {
                true
            } else {
                return Err(DecompError::GirthTooSmall { girth: gi, diam });
            }
        }
    };
    let tp = build_pattern(t, repair)?;
    let lambda = opts.lambda.unwrap_or(if repair { 2 * m } else { 1 });
    let plan = Plan {
        t,
        tp: &tp,
        repair,
        lambda,
    };

    let divisible = |b: &Bipartition| b.class_a.iter().all(|&a| g.degree(a) % m == 0);
    let (parts, swapped, split) = if divisible(&bip) {
        (vec![(g.clone(), bip.clone())], false, false)
    } else if divisible(&bip.swapped()) {
        (vec![(g.clone(), bip.swapped())], true, false)
    } else if g.edge_count() % m == 0 {
        let (g1, g2) = split_divisible(g, &bip, m, lambda, &opts.config)?;
        (vec![(g1, bip.clone()), (g2, bip.swapped())], false, true)
    } else {
        return Err(DecompError::SizeNotDivisible {
            edges: g.edge_count(),
            modulus: m,
        });
    };

    let tries = if opts.config.is_strict() { 1 } else { opts.attempts.max(1) };
    let mut copies = Vec::new();
    let mut routes = Vec::new();
    let mut stats = None;
    for (p, (part, pbip)) in parts.iter().enumerate() {
        let mut last = None;
        for attempt in 0..tries {
            let cfg = SplitConfig {
                seed: mix(opts.config.seed, (p as u64) << 32 | attempt as u64),
                ..opts.config
            };
            match route_once(part, pbip, &plan, &cfg) {
                Ok((d, route, s)) => {
                    copies.extend(d.copies);
                    routes.push(route);
                    if let Some(s) = s {
                        merge_stats(&mut stats, s);
                    }
                    last = None;
                    break;
                }
                Err(e) => {
                    log::debug!("attempt {attempt} on part {p} failed: {e}");
                    last = Some(e);
                }
            }
        }
        if let Some(e) = last {
            return Err(e);
        }
    }
    let d = Decomposition {
        kind: opts.mode,
        copies,
    };
    finish(g, t, opts, d, routes, stats, swapped, split)
}

#[allow(clippy::too_many_arguments)]
fn finish(
    g: &MultiGraph,
    t: &MultiGraph,
    opts: &DecomposeOptions,
    d: Decomposition,
    routes: Vec<Route>,
    repair: Option<RepairStats>,
    sides_swapped: bool,
    divisible_split: bool,
) -> Result<DecomposeReport, DecompError> {
    let report = verify_decomposition(g, t, &d, opts.mode);
    if !report.accepted() {
        return Err(DecompError::VerificationFailed(report.describe_failures()));
    }
    let kind = report.kind.expect("accepted reports carry a kind");
    Ok(DecomposeReport {
        decomposition: Decomposition { kind, ..d },
        routes,
        repair,
        sides_swapped,
        divisible_split,
    })
}
