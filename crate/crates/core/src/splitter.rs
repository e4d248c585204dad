//! Degree-prescribed decompositions of bipartite multigraphs: spanning parts
//! with exact fractional degrees on class A and prescribed residues (or
//! divisibility) on class B, keeping edge-connectivity.
//!
//! Every routine runs in one of two modes. `Strict` checks the connectivity
//! and packing thresholds of the underlying existence arguments and refuses
//! when they fail. `Attempt` runs the same constructions below those
//! thresholds, building the low-degree skeletons from capped spanning trees;
//! degree and residue posts are still enforced on the output, while missing
//! connectivity in the parts is only logged.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;
use num_rational::Ratio;
use rand::seq::SliceRandom;
use thiserror::Error;

use crate::graph::{
    bounded_degree_spanning_tree, connected_low_degree_subgraph, edge_connectivity,
    is_k_edge_connected, low_degree_skeleton, spanning_tree_packing, strict_cap, Bipartition,
    DegreeCaps, EdgeId, GraphError, MultiGraph, Side, Vertex,
};
use crate::orientation::{orient_mod, pull_back, OrientError, ResidueTarget};
use crate::rng::{mix, seeded};
use crate::transform::{lift_side, LiftOptions, TransformError};
use crate::treedecomp::bounds;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strictness {
    Strict,
    #[default]
    Attempt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SplitConfig {
    pub strictness: Strictness,
    pub seed: u64,
}

impl SplitConfig {
    pub fn attempt(seed: u64) -> Self {
        SplitConfig {
            strictness: Strictness::Attempt,
            seed,
        }
    }

    pub fn strict(seed: u64) -> Self {
        SplitConfig {
            strictness: Strictness::Strict,
            seed,
        }
    }

    pub fn is_strict(&self) -> bool {
        self.strictness == Strictness::Strict
    }

    fn salted(&self, salt: u64) -> Self {
        SplitConfig {
            seed: mix(self.seed, salt),
            ..*self
        }
    }
}

#[derive(Debug, Error)]
pub enum SplitError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error(transparent)]
    Orient(#[from] OrientError),
    #[error("bipartition does not match the graph")]
    InvalidBipartition,
    #[error("vertex {vertex} has degree {degree}, not divisible by {modulus}")]
    NotDivisible {
        vertex: Vertex,
        degree: usize,
        modulus: usize,
    },
    #[error("edge count {edges} is not divisible by {modulus}")]
    SizeNotDivisible { edges: usize, modulus: usize },
    #[error("residue targets violate the sum condition")]
    InfeasibleTarget,
    #[error("graph is {have}-edge-connected, below the required {needed}")]
    BelowThreshold { needed: BigUint, have: usize },
    #[error("part {part} is not {lambda}-edge-connected")]
    WeakPart { part: usize, lambda: usize },
    #[error("not enough free edges at vertex {0} to reach its degree target")]
    PaddingExhausted(Vertex),
    #[error("invalid request: {0}")]
    InvalidRequest(String),
}

fn check_bip(g: &MultiGraph, bip: &Bipartition) -> Result<(), SplitError> {
    if bip.is_valid_for(g) {
        Ok(())
    } else {
        Err(SplitError::InvalidBipartition)
    }
}

fn require_divisible(g: &MultiGraph, bip: &Bipartition, m: usize) -> Result<(), SplitError> {
    for &a in &bip.class_a {
        let d = g.degree(a);
        if d % m != 0 {
            return Err(SplitError::NotDivisible {
                vertex: a,
                degree: d,
                modulus: m,
            });
        }
    }
    Ok(())
}

fn require_sum(g: &MultiGraph, bip: &Bipartition, p: &ResidueTarget, m: usize) -> Result<(), SplitError> {
    let share = (g.edge_count() / m) as u64 % p.modulus;
    if p.sum_over(bip.class_b.iter().copied()) == share {
        Ok(())
    } else {
        Err(SplitError::InfeasibleTarget)
    }
}

/// Strict mode refuses below `needed`; attempt mode only notes it.
fn require_connectivity(g: &MultiGraph, needed: BigUint, cfg: &SplitConfig) -> Result<(), SplitError> {
    let ok = usize::try_from(&needed).is_ok_and(|n| is_k_edge_connected(g, n));
    if ok {
        return Ok(());
    }
    if cfg.is_strict() {
        return Err(SplitError::BelowThreshold {
            needed,
            have: edge_connectivity(g),
        });
    }
    log::debug!("running below the connectivity threshold {needed}");
    Ok(())
}

fn check_parts_connected(parts: &[&MultiGraph], lambda: usize, cfg: &SplitConfig) -> Result<(), SplitError> {
    for (i, part) in parts.iter().enumerate() {
        if lambda > 0 && !is_k_edge_connected(part, lambda) {
            if cfg.is_strict() {
                return Err(SplitError::WeakPart { part: i, lambda });
            }
            log::warn!("part {i} is not {lambda}-edge-connected");
        }
    }
    Ok(())
}

/// Asserts that `parts` partition the edges of `g`.
fn assert_partition(g: &MultiGraph, parts: &[&MultiGraph]) {
    let mut seen = BTreeSet::new();
    for part in parts {
        for id in part.edge_ids() {
            assert!(seen.insert(id), "edge {id} lies in two parts");
            assert_eq!(part.edge(id), g.edge(id), "edge {id} changed");
        }
    }
    assert_eq!(seen.len(), g.edge_count(), "parts do not cover the graph");
}

fn degree_in(g: &MultiGraph, ids: &BTreeSet<EdgeId>) -> BTreeMap<Vertex, usize> {
    let mut deg: BTreeMap<Vertex, usize> = g.vertices().map(|v| (v, 0)).collect();
    for &id in ids {
        let e = g.edge(id).expect("edge of g");
        *deg.get_mut(&e.u).unwrap() += 1;
        *deg.get_mut(&e.v).unwrap() += 1;
    }
    deg
}

/// Up to `count` edge-disjoint spanning trees built one after another, the
/// union respecting `caps`. Stops early when the next tree does not exist.
fn capped_tree_union(g: &MultiGraph, count: usize, caps: &DegreeCaps, seed: u64) -> BTreeSet<EdgeId> {
    let mut used = BTreeSet::new();
    let mut left = caps.clone();
    for i in 0..count {
        let rest = g.without_edges(&used);
        match bounded_degree_spanning_tree(&rest, &left, mix(seed, i as u64)) {
            Ok(tree) => {
                for &id in &tree {
                    let e = g.edge(id).unwrap();
                    for x in [e.u, e.v] {
                        if let Some(c) = left.get_mut(&x) {
                            *c -= 1;
                        }
                    }
                }
                used.extend(tree);
            }
            Err(_) => {
                log::debug!("capped skeleton stopped after {i} of {count} trees");
                break;
            }
        }
    }
    used
}

fn a_caps(g: &MultiGraph, bip: &Bipartition, cap: impl Fn(usize) -> usize) -> DegreeCaps {
    bip.class_a.iter().map(|&a| (a, cap(g.degree(a)))).collect()
}

/// Adds edges from `pool` (in order) to `base` until every class-A vertex
/// reaches `want`.
fn pad(
    g: &MultiGraph,
    bip: &Bipartition,
    base: &BTreeSet<EdgeId>,
    pool: &[EdgeId],
    want: &BTreeMap<Vertex, usize>,
) -> Result<BTreeSet<EdgeId>, SplitError> {
    let mut out = base.clone();
    let mut have = degree_in(g, base);
    for &id in pool {
        if out.contains(&id) {
            continue;
        }
        let a = bip.a_end(g.edge(id).unwrap());
        if have[&a] < want[&a] {
            *have.get_mut(&a).unwrap() += 1;
            out.insert(id);
        }
    }
    for (&a, &w) in want {
        if have[&a] != w {
            return Err(SplitError::PaddingExhausted(a));
        }
    }
    Ok(out)
}

fn shuffled_complement(g: &MultiGraph, taken: &BTreeSet<EdgeId>, seed: u64) -> Vec<EdgeId> {
    let mut pool: Vec<EdgeId> = g.edge_ids().filter(|id| !taken.contains(id)).collect();
    pool.shuffle(&mut seeded(seed));
    pool
}

/// Half of every class-A degree, residues `p` on class B: lift class A,
/// orient the lifted graph, pull back and keep the edges directed B to A.
pub fn half_split(
    g: &MultiGraph,
    bip: &Bipartition,
    p: &ResidueTarget,
    cfg: &SplitConfig,
) -> Result<MultiGraph, SplitError> {
    check_bip(g, bip)?;
    require_divisible(g, bip, 2)?;
    require_sum(g, bip, p, 2)?;
    let k = p.modulus;
    require_connectivity(g, BigUint::from(3 * k - 2), cfg)?;

    let attempts = if cfg.is_strict() { 1 } else { 4 };
    let mut last = None;
    for attempt in 0..attempts {
        let step = cfg.salted(attempt);
        let opts = LiftOptions {
            target: Some((3 * k - 2) as usize),
            allow_loops: true,
            best_effort: !cfg.is_strict(),
            seed: step.seed,
        };
        let (lifted, back) = lift_side(g, bip, Side::A, &opts)?;
        let loops = back.loops_at();
        // a loop at x always adds one to the outdegree of x
        let mut target = ResidueTarget::zero(k);
        for &b in &bip.class_b {
            let l = loops.get(&b).copied().unwrap_or(0) as i64;
            target.set_signed(b, p.residue(b) as i64 - l);
        }
        let o = match orient_mod(&lifted, &target, step.seed) {
            Ok(o) => o,
            Err(e) => {
                last = Some(e);
                continue;
            }
        };
        let full = pull_back(g, &o, &back)?;
        let keep: Vec<EdgeId> = g
            .edge_ids()
            .filter(|&id| bip.side(full.tail(id).unwrap()) == Some(Side::B))
            .collect();
        let h = g.spanning_subgraph(keep);
        for &a in &bip.class_a {
            assert_eq!(2 * h.degree(a), g.degree(a));
        }
        for &b in &bip.class_b {
            assert_eq!(h.degree(b) as u64 % k, p.residue(b));
        }
        return Ok(h);
    }
    Err(last.expect("at least one attempt").into())
}

/// Subgraph with `d(v, H) = d(v, G)/m` on class A and `d(v, H) ≡ p(v)` on
/// class B. For `m ≥ 3` a 3k-edge-connected low-degree skeleton is padded
/// to `2d(v, G)/m` at each class-A vertex and halved.
pub fn fractional_split(
    g: &MultiGraph,
    bip: &Bipartition,
    m: usize,
    p: &ResidueTarget,
    cfg: &SplitConfig,
) -> Result<MultiGraph, SplitError> {
    if m < 2 {
        return Err(SplitError::InvalidRequest("m must be at least 2".into()));
    }
    check_bip(g, bip)?;
    require_divisible(g, bip, m)?;
    require_sum(g, bip, p, m)?;
    if m == 2 {
        return half_split(g, bip, p, cfg);
    }
    let k = p.modulus as usize;
    let skeleton: BTreeSet<EdgeId> = if cfg.is_strict() {
        connected_low_degree_subgraph(g, m, 3 * k, cfg.seed)?.edge_ids().collect()
    } else {
        let caps = a_caps(g, bip, |d| strict_cap(Ratio::new(1, m as u64), d));
        capped_tree_union(g, 3 * k, &caps, cfg.seed)
    };
    let want: BTreeMap<Vertex, usize> = bip.class_a.iter().map(|&a| (a, 2 * g.degree(a) / m)).collect();
    let pool = shuffled_complement(g, &skeleton, mix(cfg.seed, 1));
    let padded = pad(g, bip, &skeleton, &pool, &want)?;
    let h = half_split(&g.spanning_subgraph(padded), bip, p, &cfg.salted(2))?;
    Ok(h)
}

/// Two λ-edge-connected parts `(G1, G2)` covering `G` with
/// `d(v, G1) = d(v, G)/m` on class A and `d(v, G1) ≡ p(v)` on class B.
pub fn connected_fractional_split(
    g: &MultiGraph,
    bip: &Bipartition,
    m: usize,
    lambda: usize,
    p: &ResidueTarget,
    cfg: &SplitConfig,
) -> Result<(MultiGraph, MultiGraph), SplitError> {
    if m < 2 {
        return Err(SplitError::InvalidRequest("m must be at least 2".into()));
    }
    check_bip(g, bip)?;
    require_divisible(g, bip, m)?;
    require_sum(g, bip, p, m)?;
    let k = p.modulus as usize;
    // twice the number of trees packed below
    require_connectivity(g, BigUint::from(16 * lambda * m * m + 24 * k * m), cfg)?;

    let (h1, h2, h3): (BTreeSet<EdgeId>, BTreeSet<EdgeId>, BTreeSet<EdgeId>) = if cfg.is_strict() {
        let each = 4 * lambda * m * m;
        let trees = spanning_tree_packing(g, 2 * each + 12 * k * m)?;
        let group1: BTreeSet<EdgeId> = trees[..each].iter().flatten().copied().collect();
        let group2: BTreeSet<EdgeId> = trees[each..2 * each].iter().flatten().copied().collect();
        let rest: Vec<EdgeId> = g
            .edge_ids()
            .filter(|id| !group1.contains(id) && !group2.contains(id))
            .collect();
        let sub = |ids: &BTreeSet<EdgeId>, salt| -> Result<BTreeSet<EdgeId>, SplitError> {
            if lambda == 0 {
                return Ok(BTreeSet::new());
            }
            let part = g.spanning_subgraph(ids.iter().copied());
            Ok(connected_low_degree_subgraph(&part, m * m, lambda, mix(cfg.seed, salt))?
                .edge_ids()
                .collect())
        };
        let h1 = sub(&group1, 1)?;
        let h2 = sub(&group2, 2)?;
        let h3 = connected_low_degree_subgraph(&g.spanning_subgraph(rest), m, 3 * k, mix(cfg.seed, 3))?
            .edge_ids()
            .collect();
        (h1, h2, h3)
    } else {
        // any caps with m·t ≤ d/2 leave room for the halving step below
        let caps12 = a_caps(g, bip, |d| d / (2 * m));
        let h1 = capped_tree_union(g, lambda, &caps12, mix(cfg.seed, 1));
        let h2 = capped_tree_union(&g.without_edges(&h1), lambda, &caps12, mix(cfg.seed, 2));
        let caps3 = a_caps(g, bip, |d| strict_cap(Ratio::new(1, m as u64), d));
        let taken: BTreeSet<EdgeId> = h1.union(&h2).copied().collect();
        let h3 = capped_tree_union(&g.without_edges(&taken), 3 * k, &caps3, mix(cfg.seed, 3));
        (h1, h2, h3)
    };

    // precolor: the fewest extra class-A edges giving (m-1)·d1 = d2
    let d1 = degree_in(g, &h1);
    let d2 = degree_in(g, &h2);
    let mut color1 = h1.clone();
    let mut color2 = h2.clone();
    let reserved: BTreeSet<EdgeId> = h1.iter().chain(&h2).chain(&h3).copied().collect();
    let free = shuffled_complement(g, &reserved, mix(cfg.seed, 4));
    let mut need1: BTreeMap<Vertex, usize> = BTreeMap::new();
    let mut need2: BTreeMap<Vertex, usize> = BTreeMap::new();
    for &a in &bip.class_a {
        let t = d1[&a].max(d2[&a].div_ceil(m - 1));
        need1.insert(a, t - d1[&a]);
        need2.insert(a, (m - 1) * t - d2[&a]);
    }
    for &id in &free {
        let a = bip.a_end(g.edge(id).unwrap());
        if need1[&a] > 0 {
            *need1.get_mut(&a).unwrap() -= 1;
            color1.insert(id);
        } else if need2[&a] > 0 {
            *need2.get_mut(&a).unwrap() -= 1;
            color2.insert(id);
        }
    }
    if let Some((&a, _)) = need1.iter().chain(need2.iter()).find(|(_, &n)| n > 0) {
        return Err(SplitError::PaddingExhausted(a));
    }

    let colored: BTreeSet<EdgeId> = color1.union(&color2).copied().collect();
    let rest_ids: Vec<EdgeId> = g.edge_ids().filter(|id| !colored.contains(id)).collect();
    let rest = g.spanning_subgraph(rest_ids);
    let want: BTreeMap<Vertex, usize> = bip
        .class_a
        .iter()
        .map(|&a| (a, 2 * rest.degree(a) / m))
        .collect();
    let pool = shuffled_complement(&rest, &h3, mix(cfg.seed, 5));
    let core = pad(&rest, bip, &h3, &pool, &want)?;

    let c1 = degree_in(g, &color1);
    let mut shifted = ResidueTarget::zero(p.modulus);
    for &b in &bip.class_b {
        shifted.set_signed(b, p.residue(b) as i64 - c1[&b] as i64);
    }
    let h = half_split(&rest.spanning_subgraph(core), bip, &shifted, &cfg.salted(6))?;

    let g1_ids: BTreeSet<EdgeId> = color1.iter().copied().chain(h.edge_ids()).collect();
    let g1 = g.spanning_subgraph(g1_ids.iter().copied());
    let g2 = g.spanning_subgraph(g.edge_ids().filter(|id| !g1_ids.contains(id)));
    assert_partition(g, &[&g1, &g2]);
    for &a in &bip.class_a {
        assert_eq!(m * g1.degree(a), g.degree(a));
    }
    for &b in &bip.class_b {
        assert_eq!(g1.degree(b) as u64 % p.modulus, p.residue(b));
    }
    check_parts_connected(&[&g1, &g2], lambda, cfg)?;
    Ok((g1, g2))
}

/// Parts of a multiway split plus the recursion trace: the value of `m` at
/// each peeling level, outermost first.
#[derive(Debug, Clone)]
pub struct MultiwaySplit {
    pub parts: Vec<MultiGraph>,
    pub trace: Vec<usize>,
}

/// `m` spanning parts, each with `d(v, G)/m` at class-A vertices, where part
/// `i < m` meets `targets[i]` on class B. Part `m-1` is peeled first, then
/// the remainder is split into `m-1` parts recursively.
pub fn multiway_split(
    g: &MultiGraph,
    bip: &Bipartition,
    m: usize,
    lambda: usize,
    targets: &[ResidueTarget],
    cfg: &SplitConfig,
) -> Result<MultiwaySplit, SplitError> {
    if m == 0 || targets.len() + 1 != m {
        return Err(SplitError::InvalidRequest(format!(
            "{m} parts need {} residue targets, got {}",
            m.saturating_sub(1),
            targets.len()
        )));
    }
    check_bip(g, bip)?;
    if m == 1 {
        return Ok(MultiwaySplit {
            parts: vec![g.clone()],
            trace: Vec::new(),
        });
    }
    require_divisible(g, bip, m)?;
    for t in targets {
        require_sum(g, bip, t, m)?;
    }
    let k = targets.iter().map(|t| t.modulus).max().unwrap();
    if cfg.is_strict() {
        require_connectivity(g, bounds::f_k(k, m as u64, lambda as u64), cfg)?;
    }
    if m == 2 {
        let (g1, g2) = connected_fractional_split(g, bip, 2, lambda, &targets[0], cfg)?;
        return Ok(MultiwaySplit {
            parts: vec![g1, g2],
            trace: vec![2],
        });
    }
    let inner_lambda = if cfg.is_strict() {
        usize::try_from(bounds::f_k(k, (m - 1) as u64, lambda as u64)).map_err(|_| {
            SplitError::InvalidRequest("recursive connectivity exceeds machine range".into())
        })?
    } else {
        lambda
    };
    let (peeled, rest) = connected_fractional_split(g, bip, m, inner_lambda, &targets[m - 2], &cfg.salted(m as u64))?;
    let sub = multiway_split(&rest, bip, m - 1, lambda, &targets[..m - 2], &cfg.salted(100 + m as u64))?;
    let mut parts = sub.parts;
    let last = parts.pop().expect("m-1 parts");
    parts.push(peeled);
    parts.push(last);
    let mut trace = vec![m];
    trace.extend(sub.trace);
    Ok(MultiwaySplit { parts, trace })
}

/// Parts `G_1..G_{b+1}` with `d(v, G_i) = (m_i/m) d(v, G)` on class A and
/// `m_i | d(v, G_i)` on class B for `i ≤ b`. Nothing is promised for the
/// class-B degrees of the last part.
pub fn grouped_split(
    g: &MultiGraph,
    bip: &Bipartition,
    sizes: &[usize],
    lambda: usize,
    cfg: &SplitConfig,
) -> Result<Vec<MultiGraph>, SplitError> {
    if sizes.is_empty() || sizes.contains(&0) {
        return Err(SplitError::InvalidRequest("sizes must be positive".into()));
    }
    check_bip(g, bip)?;
    let m: usize = sizes.iter().sum();
    if sizes.len() == 1 {
        return Ok(vec![g.clone()]);
    }
    require_divisible(g, bip, m)?;
    let k: u64 = sizes.iter().map(|&s| s as u64).product();
    if cfg.is_strict() {
        require_connectivity(g, bounds::f_k(k, m as u64, lambda as u64), cfg)?;
    }
    let share = (g.edge_count() / m) as u64;
    let anchor = bip.class_b.iter().next().copied();
    let target_for = |modulus: u64| {
        let mut q = ResidueTarget::zero(modulus);
        if let Some(b) = anchor {
            q.set_signed(b, (share % modulus) as i64);
        }
        q
    };
    let uniform = vec![target_for(k); m - 1];
    let split = match multiway_split(g, bip, m, lambda, &uniform, cfg) {
        Ok(s) => s,
        Err(e) if !cfg.is_strict() => {
            // per-part moduli: m_i for the parts of group i ≤ b, none for the last group
            log::debug!("uniform mod-{k} split failed ({e}); retrying with per-part moduli");
            let mut owner = Vec::with_capacity(m);
            for (i, &s) in sizes.iter().enumerate() {
                owner.extend(std::iter::repeat_n(i, s));
            }
            let targets: Vec<ResidueTarget> = (0..m - 1)
                .map(|j| {
                    let grp = owner[j];
                    target_for(if grp + 1 < sizes.len() { sizes[grp] as u64 } else { 1 })
                })
                .collect();
            multiway_split(g, bip, m, lambda, &targets, &cfg.salted(7))?
        }
        Err(e) => return Err(e),
    };

    let mut parts = Vec::with_capacity(sizes.len());
    let mut it = split.parts.into_iter();
    for &s in sizes {
        let ids: Vec<EdgeId> = it.by_ref().take(s).flat_map(|h| h.edge_ids().collect::<Vec<_>>()).collect();
        parts.push(g.spanning_subgraph(ids));
    }
    let refs: Vec<&MultiGraph> = parts.iter().collect();
    assert_partition(g, &refs);
    for (i, part) in parts.iter().enumerate() {
        for &a in &bip.class_a {
            assert_eq!(m * part.degree(a), sizes[i] * g.degree(a));
        }
        if i + 1 < sizes.len() {
            for &b in &bip.class_b {
                assert_eq!(part.degree(b) % sizes[i], 0, "part {i} at {b}");
            }
        }
    }
    check_parts_connected(&refs, lambda, cfg)?;
    Ok(parts)
}

/// `(G1, G2)` with `m | d(v, G1)` on class A and `m | d(v, G2)` on class B,
/// both spanning and `l`-edge-connected. Needs `m | e(G)`.
pub fn split_divisible(
    g: &MultiGraph,
    bip: &Bipartition,
    m: usize,
    l: usize,
    cfg: &SplitConfig,
) -> Result<(MultiGraph, MultiGraph), SplitError> {
    check_bip(g, bip)?;
    if m == 0 || g.edge_count() % m != 0 {
        return Err(SplitError::SizeNotDivisible {
            edges: g.edge_count(),
            modulus: m,
        });
    }
    let trees = if cfg.is_strict() {
        spanning_tree_packing(g, 3 * m - 2 + 2 * l)?
    } else {
        (0..=l)
            .rev()
            .find_map(|j| spanning_tree_packing(g, 2 * j).ok())
            .unwrap_or_default()
    };
    let half = trees.len().min(2 * l) / 2;
    let h1: BTreeSet<EdgeId> = trees[..half].iter().flatten().copied().collect();
    let h2: BTreeSet<EdgeId> = trees[half..2 * half].iter().flatten().copied().collect();
    let taken: BTreeSet<EdgeId> = h1.union(&h2).copied().collect();
    let rest = g.without_edges(&taken);
    let deg1 = degree_in(g, &h1);
    let deg2 = degree_in(g, &h2);
    let mut p = ResidueTarget::zero(m as u64);
    for &a in &bip.class_a {
        p.set_signed(a, m as i64 - deg1[&a] as i64);
    }
    for &b in &bip.class_b {
        p.set_signed(b, m as i64 - deg2[&b] as i64);
    }
    let o = orient_mod(&rest, &p, cfg.seed)?;
    let mut g1_ids = h1;
    let mut g2_ids = h2;
    for id in rest.edge_ids() {
        if bip.side(o.tail(id).unwrap()) == Some(Side::A) {
            g1_ids.insert(id);
        } else {
            g2_ids.insert(id);
        }
    }
    let g1 = g.spanning_subgraph(g1_ids);
    let g2 = g.spanning_subgraph(g2_ids);
    assert_partition(g, &[&g1, &g2]);
    for &a in &bip.class_a {
        assert_eq!(g1.degree(a) % m, 0);
    }
    for &b in &bip.class_b {
        assert_eq!(g2.degree(b) % m, 0);
    }
    check_parts_connected(&[&g1, &g2], l, cfg)?;
    Ok((g1, g2))
}

/// Split for the bistar `S(k, l)`, `m = k + l - 1`: `G1` holds `(k-1)/m` of
/// every class-A degree and `G2 = G - G1` has class-B degrees divisible by `l`.
pub fn bistar_split(
    g: &MultiGraph,
    bip: &Bipartition,
    k: usize,
    l: usize,
    cfg: &SplitConfig,
) -> Result<(MultiGraph, MultiGraph), SplitError> {
    if !(1 < k && k <= l) {
        return Err(SplitError::InvalidRequest("need 1 < k <= l".into()));
    }
    check_bip(g, bip)?;
    let m = k + l - 1;
    require_divisible(g, bip, m)?;
    require_connectivity(g, bounds::bistar_split(k as u64, l as u64), cfg)?;
    let eps = Ratio::new(2 * (k as u64 - 1), m as u64);
    let skeleton: BTreeSet<EdgeId> = if cfg.is_strict() {
        low_degree_skeleton(g, eps, 3 * l, cfg.seed)?.edge_ids().collect()
    } else {
        capped_tree_union(g, 3 * l, &a_caps(g, bip, |d| strict_cap(eps, d)), cfg.seed)
    };
    let want: BTreeMap<Vertex, usize> = bip
        .class_a
        .iter()
        .map(|&a| (a, 2 * (k - 1) * g.degree(a) / m))
        .collect();
    let pool = shuffled_complement(g, &skeleton, mix(cfg.seed, 1));
    let padded = pad(g, bip, &skeleton, &pool, &want)?;
    let mut p = ResidueTarget::zero(l as u64);
    for &b in &bip.class_b {
        p.set_signed(b, g.degree(b) as i64);
    }
    let g1 = half_split(&g.spanning_subgraph(padded), bip, &p, &cfg.salted(2))?;
    let g2 = g.spanning_subgraph(g.edge_ids().filter(|&id| !g1.has_edge(id)));
    assert_partition(g, &[&g1, &g2]);
    for &a in &bip.class_a {
        assert_eq!(m * g1.degree(a), (k - 1) * g.degree(a));
    }
    for &b in &bip.class_b {
        assert_eq!(g2.degree(b) % l, 0);
    }
    Ok((g1, g2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::bipartition;

    fn bundle(n: usize) -> (MultiGraph, Bipartition) {
        let g = MultiGraph::from_pairs((0..n).map(|_| (0, 1))).unwrap();
        let bip = bipartition(&g).unwrap();
        (g, bip)
    }

    /// Complete bipartite multigraph with every pair repeated `mult` times.
    fn kab(na: u64, nb: u64, mult: usize) -> (MultiGraph, Bipartition) {
        let mut pairs = Vec::new();
        for a in 0..na {
            for b in 0..nb {
                for _ in 0..mult {
                    pairs.push((a, na + b));
                }
            }
        }
        let g = MultiGraph::from_pairs(pairs).unwrap();
        let bip = bipartition(&g).unwrap();
        (g, bip)
    }

    #[test]
    fn half_split_of_c4_is_a_matching() {
        let g = MultiGraph::from_pairs([(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let bip = bipartition(&g).unwrap();
        let h = half_split(&g, &bip, &ResidueTarget::zero(1), &SplitConfig::default()).unwrap();
        assert_eq!(h.edge_count(), 2);
        assert!(bip.class_a.iter().all(|&a| h.degree(a) == 1));
    }

    #[test]
    fn fractional_split_of_a_bundle() {
        let (g, bip) = bundle(6);
        let h = fractional_split(&g, &bip, 3, &ResidueTarget::zero(2), &SplitConfig::default()).unwrap();
        assert_eq!(h.edge_count(), 2);
    }

    #[test]
    fn fractional_split_of_k24() {
        let (g, bip) = kab(2, 4, 1);
        let h = fractional_split(&g, &bip, 2, &ResidueTarget::zero(1), &SplitConfig::default()).unwrap();
        assert!(bip.class_a.iter().all(|&a| h.degree(a) == 2));
    }

    #[test]
    fn infeasible_sum_is_rejected() {
        let (g, bip) = bundle(6);
        let p = ResidueTarget::new(2, [(1, 1)].into());
        assert!(matches!(
            fractional_split(&g, &bip, 3, &p, &SplitConfig::default()),
            Err(SplitError::InfeasibleTarget)
        ));
    }

    #[test]
    fn connected_fractional_split_on_bundle_by_multiplicity() {
        let (m, lambda) = (2usize, 1usize);
        let (g, bip) = bundle(2 * m * (8 * lambda * m * m + 12 * m));
        let (g1, g2) =
            connected_fractional_split(&g, &bip, m, lambda, &ResidueTarget::zero(1), &SplitConfig::strict(3))
                .unwrap();
        assert_eq!(g1.edge_count() * m, g.edge_count());
        assert!(g1.edge_count() >= lambda && g2.edge_count() >= lambda);
    }

    #[test]
    fn multiway_split_thirds_of_a_bundle() {
        let (g, bip) = bundle(60);
        let targets = vec![ResidueTarget::zero(1); 2];
        let s = multiway_split(&g, &bip, 3, 2, &targets, &SplitConfig::default()).unwrap();
        assert_eq!(s.trace.len(), 2);
        assert!(s.parts.iter().all(|h| h.edge_count() == 20));
    }

    #[test]
    fn grouped_split_two_one() {
        let (g, bip) = kab(3, 3, 4);
        let parts = grouped_split(&g, &bip, &[2, 1], 1, &SplitConfig::attempt(5)).unwrap();
        assert_eq!(parts.len(), 2);
        for &b in &bip.class_b {
            assert_eq!(parts[0].degree(b) % 2, 0);
        }
        for &a in &bip.class_a {
            assert_eq!(parts[0].degree(a), 8);
            assert_eq!(parts[1].degree(a), 4);
        }
    }

    #[test]
    fn grouped_split_single_group_is_identity() {
        let (g, bip) = kab(2, 2, 3);
        let parts = grouped_split(&g, &bip, &[3], 1, &SplitConfig::default()).unwrap();
        assert_eq!(parts, vec![g]);
    }

    #[test]
    fn split_divisible_on_a_bundle() {
        let (g, bip) = bundle(10);
        let (g1, g2) = split_divisible(&g, &bip, 2, 1, &SplitConfig::strict(1)).unwrap();
        assert_eq!(g1.degree(0) % 2, 0);
        assert_eq!(g2.degree(1) % 2, 0);
        assert_eq!(g1.edge_count() + g2.edge_count(), 10);
    }

    #[test]
    fn strict_mode_refuses_below_threshold() {
        let (g, bip) = kab(2, 2, 2);
        let err = grouped_split(&g, &bip, &[1, 1], 1, &SplitConfig::strict(0)).unwrap_err();
        assert!(matches!(err, SplitError::BelowThreshold { .. }));
    }

    #[test]
    fn strict_connected_split_checks_connectivity_first() {
        let (g, bip) = bundle(8);
        let p = ResidueTarget::new(2, BTreeMap::from([(1, 0)]));
        let err = connected_fractional_split(&g, &bip, 2, 1, &p, &SplitConfig::strict(0)).unwrap_err();
        assert!(matches!(err, SplitError::BelowThreshold { .. }), "{err:?}");
    }

    #[test]
    fn bistar_split_on_a_bundle() {
        let (k, l) = (2, 3);
        let m = k + l - 1;
        let (g, bip) = bundle(4 * m);
        let (g1, g2) = bistar_split(&g, &bip, k, l, &SplitConfig::default()).unwrap();
        assert_eq!(g1.degree(0), (k - 1) * 4);
        assert_eq!(g2.degree(1) % l, 0);
    }
}
