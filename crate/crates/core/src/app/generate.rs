//! Seeded random instances and small named fixtures. Bipartite outputs
//! carry side tags: class A is `0..a`, class B is `a..a+b`.

use std::collections::BTreeSet;
use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{bipartition, edge_connectivity, is_k_edge_connected, MultiGraph, Side, Vertex};
use crate::rng::{seeded, Rng};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("unsatisfiable generator parameters: {0}")]
    Unsatisfiable(String),
    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),
    #[error("no instance found after {0} tries")]
    Exhausted(usize),
}

/// Generator parameters, as read from experiment configs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GenSpec {
    /// Union of `connectivity` random spanning trees of `K_{a,b}` plus
    /// `noise` random edges; with `divisible_by`, edges are added until
    /// every class-A degree is a multiple of it.
    Bipartite {
        a: usize,
        b: usize,
        connectivity: usize,
        #[serde(default)]
        noise: usize,
        #[serde(default)]
        divisible_by: Option<usize>,
    },
    /// Simple `k`-regular bipartite graph with `n` vertices per side.
    Regular { n: usize, k: usize },
    /// Simple 2-edge-connected bipartite graph with even class-A degrees of
    /// at least `min_degree` and a multiple of 4 edges.
    EvenSimple { a: usize, b: usize, min_degree: usize },
    /// `n` parallel edges.
    Bundle { n: usize },
    Fixture { name: String },
}

impl fmt::Display for GenSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GenSpec::Bipartite {
                a,
                b,
                connectivity,
                noise,
                divisible_by,
            } => {
                write!(f, "bipartite a={a} b={b} c={connectivity} noise={noise}")?;
                if let Some(m) = divisible_by {
                    write!(f, " div={m}")?;
                }
                Ok(())
            }
            GenSpec::Regular { n, k } => write!(f, "regular n={n} k={k}"),
            GenSpec::EvenSimple { a, b, min_degree } => write!(f, "even-simple a={a} b={b} min={min_degree}"),
            GenSpec::Bundle { n } => write!(f, "bundle n={n}"),
            GenSpec::Fixture { name } => write!(f, "fixture {name}"),
        }
    }
}

const TRIES: usize = 200;

pub fn generate(spec: &GenSpec, seed: u64) -> Result<MultiGraph, GenError> {
    match spec {
        GenSpec::Bipartite {
            a,
            b,
            connectivity,
            noise,
            divisible_by,
        } => random_bipartite(*a, *b, *connectivity, *noise, *divisible_by, seed),
        GenSpec::Regular { n, k } => regular_bipartite(*n, *k, seed),
        GenSpec::EvenSimple { a, b, min_degree } => even_simple(*a, *b, *min_degree, seed),
        GenSpec::Bundle { n } => Ok(bundle(*n)),
        GenSpec::Fixture { name } => fixture(name),
    }
}

fn tag(g: &mut MultiGraph, a: usize, b: usize) {
    for v in 0..(a + b) as Vertex {
        g.add_vertex(v);
        g.set_side(v, if v < a as Vertex { Side::A } else { Side::B });
    }
}

/// Random spanning tree of `K_{a,b}` by a random walk (Aldous-Broder).
fn random_spanning_tree(a: usize, b: usize, rng: &mut Rng) -> Vec<(Vertex, Vertex)> {
    let n = a + b;
    let mut seen = BTreeSet::new();
    let mut x = rng.gen_range(0..n) as Vertex;
    seen.insert(x);
    let mut out = Vec::new();
    while seen.len() < n {
        let y = if x < a as Vertex {
            (a + rng.gen_range(0..b)) as Vertex
        } else {
            rng.gen_range(0..a) as Vertex
        };
        if seen.insert(y) {
            out.push((x, y));
        }
        x = y;
    }
    out
}

fn random_cross_pair(a: usize, b: usize, rng: &mut Rng) -> (Vertex, Vertex) {
    (rng.gen_range(0..a) as Vertex, (a + rng.gen_range(0..b)) as Vertex)
}

/// Random bipartite multigraph with edge connectivity at least
/// `connectivity`.
pub fn random_bipartite(
    a: usize,
    b: usize,
    connectivity: usize,
    noise: usize,
    divisible_by: Option<usize>,
    seed: u64,
) -> Result<MultiGraph, GenError> {
    if a == 0 || b == 0 {
        return Err(GenError::Unsatisfiable("both sides need a vertex".into()));
    }
    if divisible_by == Some(0) {
        return Err(GenError::Unsatisfiable("degrees cannot be divisible by 0".into()));
    }
    let mut rng = seeded(seed);
    for _ in 0..TRIES {
        let mut g = MultiGraph::new();
        tag(&mut g, a, b);
        for _ in 0..connectivity {
            for (u, v) in random_spanning_tree(a, b, &mut rng) {
                g.push_edge(u, v).unwrap();
            }
        }
        for _ in 0..noise {
            let (u, v) = random_cross_pair(a, b, &mut rng);
            g.push_edge(u, v).unwrap();
        }
        if let Some(m) = divisible_by {
            for u in 0..a as Vertex {
                while g.degree(u) % m != 0 {
                    let v = (a + rng.gen_range(0..b)) as Vertex;
                    g.push_edge(u, v).unwrap();
                }
            }
        }
        if edge_connectivity(&g) >= connectivity {
            return Ok(g);
        }
    }
    Err(GenError::Exhausted(TRIES))
}

/// Simple `k`-regular bipartite graph: a circulant, randomized by
/// degree-preserving double-edge swaps that keep it simple.
pub fn regular_bipartite(n: usize, k: usize, seed: u64) -> Result<MultiGraph, GenError> {
    if k > n {
        return Err(GenError::Unsatisfiable(format!("{k}-regular needs at least {k} vertices per side")));
    }
    let mut rng = seeded(seed);
    let mut pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..k).map(move |j| (i, (i + j) % n))).collect();
    let mut present: BTreeSet<(usize, usize)> = pairs.iter().copied().collect();
    if pairs.len() >= 2 {
        for _ in 0..10 * pairs.len() {
            let (i, j) = (rng.gen_range(0..pairs.len()), rng.gen_range(0..pairs.len()));
            let ((a1, b1), (a2, b2)) = (pairs[i], pairs[j]);
            if a1 == a2 || b1 == b2 || present.contains(&(a1, b2)) || present.contains(&(a2, b1)) {
                continue;
            }
            present.remove(&(a1, b1));
            present.remove(&(a2, b2));
            present.insert((a1, b2));
            present.insert((a2, b1));
            pairs[i] = (a1, b2);
            pairs[j] = (a2, b1);
        }
    }
    let mut g = MultiGraph::new();
    tag(&mut g, n, n);
    for (u, v) in pairs {
        g.push_edge(u as Vertex, (n + v) as Vertex).unwrap();
    }
    Ok(g)
}

fn even_simple(a: usize, b: usize, min_degree: usize, seed: u64) -> Result<MultiGraph, GenError> {
    let low = min_degree.max(2).next_multiple_of(2);
    if a == 0 || low > b {
        return Err(GenError::Unsatisfiable(format!(
            "class-A degree {low} needs at least {low} class-B vertices"
        )));
    }
    let mut rng = seeded(seed);
    let top = (b - b % 2).min(low + 2);
    for _ in 0..TRIES {
        let mut degrees: Vec<usize> = (0..a).map(|_| if rng.gen_bool(0.5) { top } else { low }).collect();
        if degrees.iter().sum::<usize>() % 4 != 0 {
            match degrees.iter().position(|&d| d + 2 <= b - b % 2) {
                Some(i) => degrees[i] += 2,
                None => match degrees.iter().position(|&d| d > low) {
                    Some(i) => degrees[i] -= 2,
                    None => {
                        return Err(GenError::Unsatisfiable(
                            "edge count cannot be made a multiple of 4".into(),
                        ))
                    }
                },
            }
        }
        let mut g = MultiGraph::new();
        tag(&mut g, a, b);
        let class_b: Vec<Vertex> = (a..a + b).map(|v| v as Vertex).collect();
        for (u, &d) in degrees.iter().enumerate() {
            for &v in class_b.choose_multiple(&mut rng, d) {
                g.push_edge(u as Vertex, v).unwrap();
            }
        }
        if g.vertices().all(|v| g.degree(v) > 0) && is_k_edge_connected(&g, 2) {
            return Ok(g);
        }
    }
    Err(GenError::Exhausted(TRIES))
}

/// `nK2`: two vertices joined by `n` parallel edges.
pub fn bundle(n: usize) -> MultiGraph {
    let mut g = MultiGraph::new();
    tag(&mut g, 1, 1);
    for _ in 0..n {
        g.push_edge(0, 1).unwrap();
    }
    g
}

fn complete_bipartite(a: usize, b: usize) -> MultiGraph {
    let mut g = MultiGraph::new();
    tag(&mut g, a, b);
    for u in 0..a {
        for v in a..a + b {
            g.push_edge(u as Vertex, v as Vertex).unwrap();
        }
    }
    g
}

fn cycle(n: usize) -> MultiGraph {
    let mut g = MultiGraph::from_pairs((0..n as Vertex).map(|i| (i, (i + 1) % n as Vertex))).unwrap();
    if let Some(bip) = bipartition(&g) {
        bip.tag(&mut g);
    }
    g
}

/// `c4`, `c8`, `k4`, `k33`, `k44`.
pub fn fixture(name: &str) -> Result<MultiGraph, GenError> {
    Ok(match name {
        "c4" => cycle(4),
        "c8" => cycle(8),
        "k4" => {
            let pairs = (0..4).flat_map(|u| (u + 1..4).map(move |v| (u, v)));
            MultiGraph::from_pairs(pairs).unwrap()
        }
        "k33" => complete_bipartite(3, 3),
        "k44" => complete_bipartite(4, 4),
        other => return Err(GenError::UnknownFixture(other.to_string())),
    })
}
