//! The labeled tree model used by colorings and extraction.

use std::collections::{BTreeMap, BTreeSet};

use super::trees::{diameter, longest_path_ends};
use super::DecompError;
use crate::graph::{bipartition, EdgeId, MultiGraph, Side, Vertex};

/// A tree with a fixed proper 2-coloring `T_A`/`T_B` and edge colors
/// `1..=m`. `color_classes[i]` holds the colors at the non-leaf
/// `non_leaves_a ++ non_leaves_b` number `i`; the last class holds the
/// colors of edges ending in a leaf of `T_B`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreePattern {
    pub tree: MultiGraph,
    pub side_a: BTreeSet<Vertex>,
    pub side_b: BTreeSet<Vertex>,
    pub non_leaves_a: Vec<Vertex>,
    pub non_leaves_b: Vec<Vertex>,
    pub edge_colors: BTreeMap<EdgeId, usize>,
    pub color_classes: Vec<BTreeSet<usize>>,
    pub m: usize,
    pub diam: usize,
    /// Start of the coloring DFS, a vertex of `T_A`.
    pub root: Vertex,
}

impl TreePattern {
    /// Assembles a pattern from a tree, its `T_A` side, edge colors and the
    /// root, deriving everything else. Used when patterns are read back.
    pub fn from_parts(
        t: &MultiGraph,
        side_a: BTreeSet<Vertex>,
        edge_colors: BTreeMap<EdgeId, usize>,
        root: Vertex,
    ) -> Result<TreePattern, DecompError> {
        let bad = |s: &str| Err(DecompError::PreconditionViolated(s.into()));
        if t.edge_count() == 0 || !t.is_tree() {
            return Err(DecompError::NotATree);
        }
        let bip = bipartition(t).ok_or(DecompError::NotATree)?;
        if side_a != bip.class_a && side_a != bip.class_b {
            return bad("T_A must be a color class of the tree");
        }
        let side_b: BTreeSet<Vertex> = t.vertex_set().difference(&side_a).copied().collect();
        if !side_b.iter().any(|&x| t.degree(x) == 1) {
            return bad("T_B must contain a leaf");
        }
        if !side_a.contains(&root) {
            return bad("root must lie in T_A");
        }
        let m = t.edge_count();
        let colors: BTreeSet<usize> = edge_colors.values().copied().collect();
        if edge_colors.keys().ne(t.edge_ids().collect::<Vec<_>>().iter())
            || colors != (1..=m).collect::<BTreeSet<_>>()
        {
            return bad("edge colors must be a bijection onto 1..=m");
        }
        let non_leaves_a: Vec<Vertex> = side_a.iter().copied().filter(|&x| t.degree(x) > 1).collect();
        let non_leaves_b: Vec<Vertex> = side_b.iter().copied().filter(|&x| t.degree(x) > 1).collect();
        let inc = t.incidence();
        let colors_at = |x: Vertex| -> BTreeSet<usize> { inc[&x].iter().map(|id| edge_colors[id]).collect() };
        let mut color_classes: Vec<BTreeSet<usize>> =
            non_leaves_a.iter().chain(&non_leaves_b).map(|&x| colors_at(x)).collect();
        let covered: BTreeSet<usize> = non_leaves_b.iter().flat_map(|&x| colors_at(x)).collect();
        color_classes.push((1..=m).filter(|c| !covered.contains(c)).collect());
        Ok(TreePattern {
            tree: t.clone(),
            side_a,
            side_b,
            non_leaves_a,
            non_leaves_b,
            edge_colors,
            color_classes,
            m,
            diam: diameter(t),
            root,
        })
    }

    pub fn a(&self) -> usize {
        self.non_leaves_a.len()
    }

    pub fn b(&self) -> usize {
        self.non_leaves_b.len()
    }

    pub fn side(&self, x: Vertex) -> Side {
        if self.side_a.contains(&x) {
            Side::A
        } else {
            Side::B
        }
    }

    pub fn is_leaf(&self, x: Vertex) -> bool {
        self.tree.degree(x) == 1
    }

    /// The classes for `T_B` non-leaves followed by the leaf class.
    pub fn b_classes(&self) -> &[BTreeSet<usize>] {
        &self.color_classes[self.a()..]
    }

    /// Sizes `|T(a+1)|, ..., |T(a+b+1)|`; they sum to `m`.
    pub fn group_sizes(&self) -> Vec<usize> {
        self.b_classes().iter().map(BTreeSet::len).collect()
    }

    pub fn color_of(&self, e: EdgeId) -> usize {
        self.edge_colors[&e]
    }

    pub fn edge_of_color(&self, c: usize) -> EdgeId {
        *self.edge_colors.iter().find(|(_, &col)| col == c).expect("color in range").0
    }

    /// Tree edges ending in a leaf of `T_B`.
    pub fn blue_edges(&self) -> BTreeSet<EdgeId> {
        self.tree
            .edges()
            .filter(|(_, e)| [e.u, e.v].iter().any(|&x| self.side(x) == Side::B && self.is_leaf(x)))
            .map(|(id, _)| id)
            .collect()
    }

    /// Order in which extraction attaches edges: breadth-first from the
    /// root, each edge as `(edge, attached end, new end)`.
    pub fn attachment_order(&self) -> Vec<(EdgeId, Vertex, Vertex)> {
        let inc = self.tree.incidence();
        let mut seen = BTreeSet::from([self.root]);
        let mut order = Vec::new();
        let mut queue = std::collections::VecDeque::from([self.root]);
        while let Some(x) = queue.pop_front() {
            let mut out: Vec<(Vertex, EdgeId)> = inc[&x]
                .iter()
                .map(|&id| (self.tree.edge(id).unwrap().other(x), id))
                .filter(|(y, _)| !seen.contains(y))
                .collect();
            out.sort();
            for (y, id) in out {
                seen.insert(y);
                order.push((id, x, y));
                queue.push_back(y);
            }
        }
        order
    }
}

/// `Π |T(a+i)|` for a candidate `T_B`: degrees of its non-leaves times the
/// number of edges at its leaves.
fn class_product(t: &MultiGraph, side_b: &BTreeSet<Vertex>) -> u64 {
    let mut product = 1u64;
    let mut leaf_edges = 0u64;
    for &x in side_b {
        match t.degree(x) {
            1 => leaf_edges += 1,
            d => product *= d as u64,
        }
    }
    product * leaf_edges
}

/// Builds the pattern. `T_B` always contains a leaf; with
/// `longest_path_convention` and even diameter it contains the ends of all
/// longest paths. Otherwise the side with the smaller product of class
/// sizes is `T_B`, ties broken towards putting the lowest vertex in `T_A`.
pub fn build_pattern(t: &MultiGraph, longest_path_convention: bool) -> Result<TreePattern, DecompError> {
    build(t, longest_path_convention, None)
}

/// As [`build_pattern`], with `root` forced into `T_A`.
pub fn build_pattern_with_root(
    t: &MultiGraph,
    longest_path_convention: bool,
    root: Vertex,
) -> Result<TreePattern, DecompError> {
    build(t, longest_path_convention, Some(root))
}

fn build(t: &MultiGraph, convention: bool, forced: Option<Vertex>) -> Result<TreePattern, DecompError> {
    if t.edge_count() == 0 || !t.is_tree() {
        return Err(DecompError::NotATree);
    }
    let bip = bipartition(t).ok_or(DecompError::NotATree)?;
    let diam = diameter(t);
    let has_leaf = |s: &BTreeSet<Vertex>| s.iter().any(|&x| t.degree(x) == 1);

    let mut options: Vec<(BTreeSet<Vertex>, BTreeSet<Vertex>)> = vec![
        (bip.class_a.clone(), bip.class_b.clone()),
        (bip.class_b.clone(), bip.class_a.clone()),
    ];
    options.retain(|(_, b)| has_leaf(b));
    if convention && diam % 2 == 0 {
        let ends = longest_path_ends(t);
        options.retain(|(_, b)| ends.is_subset(b));
    }
    if let Some(r) = forced {
        if !t.has_vertex(r) {
            return Err(DecompError::PreconditionViolated(format!("root {r} is not a tree vertex")));
        }
        options.retain(|(a, _)| a.contains(&r));
    }
    // stable sort keeps the lowest-vertex-in-A option first on ties
    options.sort_by_key(|(_, b)| class_product(t, b));
    let (side_a, _) = options.into_iter().next().ok_or_else(|| {
        DecompError::PreconditionViolated("no side assignment satisfies the constraints".into())
    })?;

    let root = forced.unwrap_or_else(|| {
        side_a.iter().copied().find(|&x| t.degree(x) > 1).unwrap_or(*side_a.first().unwrap())
    });

    let inc = t.incidence();
    let mut edge_colors = BTreeMap::new();
    let mut stack = vec![(root, None::<Vertex>)];
    while let Some((x, parent)) = stack.pop() {
        let mut kids: Vec<(Vertex, EdgeId)> = inc[&x]
            .iter()
            .map(|&id| (t.edge(id).unwrap().other(x), id))
            .filter(|&(y, _)| Some(y) != parent)
            .collect();
        kids.sort();
        for &(_, id) in &kids {
            let next = edge_colors.len() + 1;
            edge_colors.insert(id, next);
        }
        for &(y, _) in kids.iter().rev() {
            stack.push((y, Some(x)));
        }
    }

    TreePattern::from_parts(t, side_a, edge_colors, root)
}
