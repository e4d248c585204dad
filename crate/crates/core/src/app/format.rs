//! Line-oriented text formats for graphs, tree patterns, residue targets
//! and decomposition certificates. `#` starts a comment; output is always
//! in ascending id order so files diff cleanly.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::str::FromStr;

use thiserror::Error;

use crate::graph::{EdgeId, MultiGraph, Side, Vertex};
use crate::orientation::{Orientation, ResidueTarget};
use crate::treedecomp::{Decomposition, Kind, TreeCopy, TreePattern};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct FormatError {
    pub line: usize,
    pub message: String,
}

fn err<T>(line: usize, message: impl Into<String>) -> Result<T, FormatError> {
    Err(FormatError {
        line,
        message: message.into(),
    })
}

/// Non-empty lines with comments stripped, as `(line number, tokens)`.
fn records(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let body = l.split('#').next().unwrap_or("");
        let toks: Vec<&str> = body.split_whitespace().collect();
        (!toks.is_empty()).then_some((i + 1, toks))
    })
}

fn num<T: FromStr>(line: usize, tok: &str) -> Result<T, FormatError> {
    tok.parse().or_else(|_| err(line, format!("expected a number, found `{tok}`")))
}

fn arity(line: usize, toks: &[&str], n: usize) -> Result<(), FormatError> {
    if toks.len() != n {
        return err(line, format!("`{}` takes {} argument(s)", toks[0], n - 1));
    }
    Ok(())
}

fn side_of(line: usize, tok: &str) -> Result<Side, FormatError> {
    match tok {
        "A" | "a" => Ok(Side::A),
        "B" | "b" => Ok(Side::B),
        _ => err(line, format!("side must be A or B, found `{tok}`")),
    }
}

fn side_name(s: Side) -> &'static str {
    match s {
        Side::A => "A",
        Side::B => "B",
    }
}

/// Handles `vertex`, `side` and `edge`; returns false for other keywords.
fn graph_record(g: &mut MultiGraph, line: usize, toks: &[&str]) -> Result<bool, FormatError> {
    match toks[0] {
        "vertex" => {
            arity(line, toks, 2)?;
            g.add_vertex(num(line, toks[1])?);
        }
        "side" => {
            arity(line, toks, 3)?;
            let v = num(line, toks[1])?;
            g.add_vertex(v);
            g.set_side(v, side_of(line, toks[2])?);
        }
        "edge" => {
            arity(line, toks, 4)?;
            let (id, u, v) = (num(line, toks[1])?, num(line, toks[2])?, num(line, toks[3])?);
            if let Err(e) = g.add_edge(id, u, v) {
                return err(line, e.to_string());
            }
        }
        _ => return Ok(false),
    }
    Ok(true)
}

pub fn parse_graph(text: &str) -> Result<MultiGraph, FormatError> {
    let mut g = MultiGraph::new();
    for (line, toks) in records(text) {
        if !graph_record(&mut g, line, &toks)? {
            return err(line, format!("unknown keyword `{}`", toks[0]));
        }
    }
    Ok(g)
}

pub fn write_graph(g: &MultiGraph) -> String {
    let mut out = String::new();
    for v in g.vertices().filter(|&v| g.degree(v) == 0) {
        writeln!(out, "vertex {v}").unwrap();
    }
    for (v, s) in g.sides() {
        writeln!(out, "side {v} {}", side_name(*s)).unwrap();
    }
    for (id, e) in g.edges() {
        writeln!(out, "edge {id} {} {}", e.u, e.v).unwrap();
    }
    out
}

/// A tree in graph format with `side` lines for `T_A`/`T_B`, a `root` line
/// and one `color <edge> <c>` line per edge.
pub fn write_pattern(tp: &TreePattern) -> String {
    let mut t = tp.tree.clone();
    t.clear_sides();
    let mut out = String::new();
    for v in t.vertices() {
        writeln!(out, "side {v} {}", side_name(tp.side(v))).unwrap();
    }
    for (id, e) in t.edges() {
        writeln!(out, "edge {id} {} {}", e.u, e.v).unwrap();
    }
    writeln!(out, "root {}", tp.root).unwrap();
    for (e, c) in &tp.edge_colors {
        writeln!(out, "color {e} {c}").unwrap();
    }
    out
}

/// Reads a pattern; the `side` lines become `T_A`/`T_B` and are not kept
/// as tags on the tree.
pub fn parse_pattern(text: &str) -> Result<TreePattern, FormatError> {
    let mut t = MultiGraph::new();
    let mut root = None;
    let mut colors = BTreeMap::new();
    let mut last = 0;
    for (line, toks) in records(text) {
        last = line;
        if graph_record(&mut t, line, &toks)? {
            continue;
        }
        match toks[0] {
            "root" => {
                arity(line, &toks, 2)?;
                root = Some(num(line, toks[1])?);
            }
            "color" => {
                arity(line, &toks, 3)?;
                colors.insert(num::<EdgeId>(line, toks[1])?, num(line, toks[2])?);
            }
            k => return err(line, format!("unknown keyword `{k}`")),
        }
    }
    let side_a: BTreeSet<Vertex> = t.sides().iter().filter(|(_, &s)| s == Side::A).map(|(&v, _)| v).collect();
    t.clear_sides();
    let Some(root) = root else {
        return err(last, "missing `root` line");
    };
    TreePattern::from_parts(&t, side_a, colors, root).or_else(|e| err(last, e.to_string()))
}

/// `target <vertex> <residue>` lines; negative residues are reduced mod `k`.
/// Vertices without a line get residue 0.
pub fn parse_targets(text: &str, modulus: u64) -> Result<ResidueTarget, FormatError> {
    let mut t = ResidueTarget::zero(modulus);
    for (line, toks) in records(text) {
        if toks[0] != "target" {
            return err(line, format!("unknown keyword `{}`", toks[0]));
        }
        arity(line, &toks, 3)?;
        t.set_signed(num(line, toks[1])?, num(line, toks[2])?);
    }
    Ok(t)
}

pub fn write_targets(t: &ResidueTarget) -> String {
    t.residues().iter().map(|(v, p)| format!("target {v} {p}\n")).collect()
}

/// `arc <edge> <tail> <head>` lines.
pub fn write_orientation(g: &MultiGraph, o: &Orientation) -> String {
    let mut out = String::new();
    for (&id, &tail) in o.tails() {
        let head = o.head(g, id).expect("orientation edges belong to the graph");
        writeln!(out, "arc {id} {tail} {head}").unwrap();
    }
    out
}

pub fn write_certificate(d: &Decomposition, tree_edges: usize) -> String {
    let mut out = format!("decomposition {} tree={tree_edges}\n", d.kind);
    for (i, c) in d.copies.iter().enumerate() {
        writeln!(out, "copy {i}").unwrap();
        for (te, ge) in &c.edge_map {
            writeln!(out, "map {te} {ge}").unwrap();
        }
        for (tv, gv) in &c.vertex_image {
            writeln!(out, "image {tv} {gv}").unwrap();
        }
    }
    out
}

/// Returns the decomposition and the tree size from the header.
pub fn parse_certificate(text: &str) -> Result<(Decomposition, usize), FormatError> {
    let mut lines = records(text);
    let Some((line, head)) = lines.next() else {
        return err(0, "empty certificate");
    };
    if head[0] != "decomposition" || head.len() != 3 {
        return err(line, "expected `decomposition <kind> tree=<m>`");
    }
    let kind = Kind::from_str(head[1]).or_else(|e| err(line, e))?;
    let Some(m) = head[2].strip_prefix("tree=") else {
        return err(line, "expected `tree=<m>`");
    };
    let m = num(line, m)?;
    let mut copies: Vec<TreeCopy> = Vec::new();
    for (line, toks) in lines {
        match toks[0] {
            "copy" => {
                arity(line, &toks, 2)?;
                if num::<usize>(line, toks[1])? != copies.len() {
                    return err(line, format!("copies must be numbered from 0 in order, expected {}", copies.len()));
                }
                copies.push(TreeCopy::default());
            }
            "map" | "image" => {
                arity(line, &toks, 3)?;
                let Some(c) = copies.last_mut() else {
                    return err(line, format!("`{}` before any `copy`", toks[0]));
                };
                let (k, v) = (num(line, toks[1])?, num(line, toks[2])?);
                let slot = if toks[0] == "map" { &mut c.edge_map } else { &mut c.vertex_image };
                if slot.insert(k, v).is_some() {
                    return err(line, format!("duplicate `{}` for {k}", toks[0]));
                }
            }
            k => return err(line, format!("unknown keyword `{k}`")),
        }
    }
    Ok((Decomposition { kind, copies }, m))
}
