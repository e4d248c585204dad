//! Acceptance suite: one PASS/FAIL line per criterion, then a single
//! assertion over all of them.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use num_bigint::BigUint;
use rand::Rng as _;

use tstar::app::generate::{bundle, generate, random_bipartite, regular_bipartite, GenSpec};
use tstar::app::verify::{verify_decomposition, FailureClass};
use tstar::graph::{
    bipartition, edge_connectivity, girth, is_spanning_tree, spanning_tree_packing, EdgeId,
    MultiGraph, Side, Vertex,
};
use tstar::orientation::orient_mod;
use tstar::rng::{mix, seeded};
use tstar::splitter::SplitConfig;
use tstar::treedecomp::bounds::bound_by_name;
use tstar::treedecomp::p5::{decompose_p5, p5_pattern};
use tstar::treedecomp::trees::{all_trees, diameter};
use tstar::treedecomp::{
    count_conflicts, decompose, repair_conflicts, DecomposeOptions, Decomposition, Kind, TreeCopy, TreePattern,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn bound(name: &str, params: &[u64]) -> BigUint {
    bound_by_name(name, params).unwrap()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let big = BigUint::from;
    let mut bad = Vec::new();
    let mut check = |what: String, got: BigUint, want: BigUint| {
        if got != want {
            bad.push(format!("{what}: {got} != {want}"));
        }
    };
    for k in 1..=6u64 {
        for l in 1..=20u64 {
            check(format!("fk({k},2,{l})"), bound("fk", &[k, 2, l]), big(64 * l + 48 * k));
        }
    }
    check("f_1(2,1)".into(), bound("fk", &[1, 2, 1]), big(112u64));
    check("f_1(3,1)".into(), bound("fk", &[1, 3, 1]), big(16200u64));
    for m in 1..=8u64 {
        for l in 0..=10u64 {
            check(format!("trees({m},{l})"), bound("divisible-trees", &[m, l]), big(3 * m - 2 + 2 * l));
        }
        for k in 1..=5u64 {
            let want = big(4 * k) + big(8u64) * big(m).pow((2 * m + 3) as u32);
            check(format!("reduction({k},{m})"), bound("bipartite-reduction", &[k, m]), want);
            check(
                format!("diam3-reduction({k},{m})"),
                bound("diam3-reduction", &[k, m]),
                big(4 * k + 16 * m * (m + 1)),
            );
        }
        check(format!("diam3({m})"), bound("diam3", &[m]), big(112 * m * m));
        for kh in 0..=5u64 {
            check(format!("infinite({kh},{m})"), bound("infinite", &[kh, m]), big(kh + m * m - m));
        }
    }
    for k in 2..=6u64 {
        for l in k..=8u64 {
            let m = k + l - 1;
            let want = 12 * l * (2 * m).div_ceil(k - 1) + 6 * m - 4;
            check(format!("bistar({k},{l})"), bound("bistar", &[k, l]), big(want));
        }
        check(format!("bistar-simple({k})"), bound("bistar-simple", &[k]), big(72 * k + 236));
    }
    check("bistar(2,3)".into(), bound("bistar", &[2, 3]), big(308u64));
    check("bistar-simple(2)".into(), bound("bistar-simple", &[2]), big(380u64));
    check("p4".into(), bound("p4", &[]), big(63u64));
    check("p5".into(), bound("p5", &[]), big(107u64));
    check("p4-prior".into(), bound("p4-prior", &[]), big(171u64));
    let ms = start.elapsed().as_millis();
    let pass = bad.is_empty() && ms < 1000;
    outcome(pass, format!("{} mismatches, {ms} ms {}", bad.len(), bad.join("; ")))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let graphs = common::connected_multigraphs(7);
    let (mut checked, mut feasible, mut bad) = (0usize, 0usize, Vec::new());
    for (gi, g) in graphs.iter().enumerate() {
        for k in [2u64, 3] {
            for (ti, t) in common::all_targets(g, k).into_iter().enumerate() {
                if !t.sum_condition_holds(g) {
                    continue;
                }
                checked += 1;
                let oracle = common::orientable(g, &t);
                feasible += oracle as usize;
                match orient_mod(g, &t, mix(gi as u64, ti as u64)) {
                    Ok(o) if !t.satisfied_by(g, &o) => bad.push(format!("graph {gi} k={k}: wrong orientation")),
                    Ok(_) if !oracle => bad.push(format!("graph {gi} k={k}: oracle disagrees")),
                    Err(_) if oracle => bad.push(format!("graph {gi} k={k}: missed a solution")),
                    _ => {}
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = bad.is_empty() && secs < 60.0;
    outcome(
        pass,
        format!(
            "{} graphs, {checked} targets ({feasible} feasible), {} disagreements, {secs:.1} s {}",
            graphs.len(),
            bad.len(),
            bad.iter().take(3).cloned().collect::<Vec<_>>().join("; ")
        ),
    )
}

fn criterion_3() -> Outcome {
    let mut rng = seeded(3);
    let mut failures = Vec::new();
    for i in 0..200u64 {
        let n = rng.gen_range(2..=12);
        let k = rng.gen_range(1..=4);
        let g = common::random_multigraph(n, 2 * k, rng.gen_range(0..10), mix(3, i));
        assert!(edge_connectivity(&g) >= 2 * k);
        match spanning_tree_packing(&g, k) {
            Ok(trees) => {
                let used: Vec<EdgeId> = trees.iter().flatten().copied().collect();
                let distinct: BTreeSet<EdgeId> = used.iter().copied().collect();
                let ok = trees.len() == k
                    && distinct.len() == used.len()
                    && trees.iter().all(|t| is_spanning_tree(&g, t));
                if !ok {
                    failures.push(format!("instance {i}: invalid packing"));
                }
            }
            Err(e) => failures.push(format!("instance {i}: {e}")),
        }
    }
    outcome(failures.is_empty(), format!("200 instances, {} failures {}", failures.len(), failures.join("; ")))
}

fn criterion_4() -> Outcome {
    let mut invalid = 0;
    let mut not_iso = Vec::new();
    for i in 0..100u64 {
        let spec = GenSpec::EvenSimple {
            a: 4 + (i % 5) as usize,
            b: 6 + (i % 4) as usize,
            min_degree: 4,
        };
        let g = generate(&spec, i).unwrap();
        let bip = bipartition(&g).unwrap();
        match decompose_p5(&g, &bip, Kind::Isomorphic, &SplitConfig::attempt(i)) {
            Ok((d, _)) => {
                let r = verify_decomposition(&g, &tstar::treedecomp::trees::path(4), &d, Kind::Isomorphic);
                if !r.accepted() {
                    invalid += 1;
                } else if r.kind != Some(Kind::Isomorphic) {
                    not_iso.push(i);
                }
            }
            Err(e) => {
                println!("  instance {i} failed: {e}");
                not_iso.push(i);
            }
        }
    }
    let c4 = tstar::app::generate::fixture("c4").unwrap();
    let bip = bipartition(&c4).unwrap();
    let hom = decompose_p5(&c4, &bip, Kind::Homomorphic, &SplitConfig::default())
        .map(|(d, _)| verify_decomposition(&c4, &tstar::treedecomp::trees::path(4), &d, Kind::Homomorphic).accepted())
        .unwrap_or(false);
    let refused = decompose_p5(&c4, &bip, Kind::Isomorphic, &SplitConfig::default()).is_err();
    let pass = invalid == 0 && not_iso.is_empty() && hom && refused;
    outcome(
        pass,
        format!(
            "100 instances, {} isomorphic, {invalid} invalid; C4 homomorphic {hom}, isomorphic refused {refused}",
            100 - not_iso.len()
        ),
    )
}

fn criterion_5() -> Outcome {
    let (mut runs, mut successes, mut unsound, mut iso_missed) = (0, 0, 0, 0);
    let mut lines = Vec::new();
    for m in 1..=5usize {
        for (ti, t) in all_trees(m).iter().enumerate() {
            let (mut r, mut s) = (0, 0);
            let mut instances: Vec<MultiGraph> = (0..3u64)
                .map(|seed| random_bipartite(4, 4, 30, 8, Some(m), mix(m as u64 * 100 + ti as u64, seed)).unwrap())
                .collect();
            let diam = diameter(t);
            if diam < 4 && 30 % m == 0 {
                instances.push(regular_bipartite(32, 30, m as u64).unwrap());
            }
            for (i, g) in instances.iter().enumerate() {
                if edge_connectivity(g) < 30 {
                    continue;
                }
                r += 1;
                let opts = DecomposeOptions {
                    config: SplitConfig::attempt(mix(i as u64, 5)),
                    ..DecomposeOptions::default()
                };
                if let Ok(rep) = decompose(g, t, &opts) {
                    let v = verify_decomposition(g, t, &rep.decomposition, Kind::Homomorphic);
                    if !v.accepted() {
                        unsound += 1;
                        continue;
                    }
                    s += 1;
                    if girth(g).exceeds(diam) && v.kind != Some(Kind::Isomorphic) {
                        iso_missed += 1;
                    }
                }
            }
            runs += r;
            successes += s;
            lines.push(format!("m={m}#{ti}:{s}/{r}"));
        }
    }
    let pass = unsound == 0 && iso_missed == 0;
    outcome(
        pass,
        format!(
            "success {successes}/{runs} ({:.0}%), unsound {unsound}, high-girth non-isomorphic {iso_missed} [{}]",
            100.0 * successes as f64 / runs.max(1) as f64,
            lines.join(" ")
        ),
    )
}

/// Swaps blue edges between copies to create conflicts: copy `c1` gets the
/// blue edge `a x` of another copy, where `x` is already a leaf image of `c1`
/// at its other blue edge.
fn plant_conflicts(g: &MultiGraph, tp: &TreePattern, d: &mut Decomposition, want: usize, seed: u64) {
    let mut rng = seeded(seed);
    let slots: Vec<(EdgeId, Vertex, Vertex)> = tp
        .blue_edges()
        .into_iter()
        .map(|te| {
            let e = tp.tree.edge(te).unwrap();
            if tp.is_leaf(e.v) && tp.side(e.v) == Side::B {
                (te, e.u, e.v)
            } else {
                (te, e.v, e.u)
            }
        })
        .collect();
    for _ in 0..50 * want {
        if count_conflicts(tp, d) >= want {
            return;
        }
        let c1 = rng.gen_range(0..d.copies.len());
        let (s0, s1) = (slots[0], slots[1]);
        let x = d.copies[c1].vertex_image[&s0.2];
        let a = d.copies[c1].vertex_image[&s1.1];
        if d.copies[c1].vertex_image[&s1.2] == x {
            continue;
        }
        let found = d.copies.iter().enumerate().find_map(|(c2, c)| {
            slots.iter().find_map(|&(te, p, l)| {
                (c2 != c1 && c.vertex_image[&p] == a && c.vertex_image[&l] == x).then_some((c2, te, l))
            })
        });
        let Some((c2, te2, l2)) = found else { continue };
        let mine = d.copies[c1].edge_map[&s1.0];
        let theirs = d.copies[c2].edge_map[&te2];
        let my_leaf = d.copies[c1].vertex_image[&s1.2];
        d.copies[c1].edge_map.insert(s1.0, theirs);
        d.copies[c1].vertex_image.insert(s1.2, x);
        d.copies[c2].edge_map.insert(te2, mine);
        d.copies[c2].vertex_image.insert(l2, my_leaf);
        debug_assert!(g.edge(theirs).unwrap().joins(a, x));
    }
}

fn red_part(tp: &TreePattern, c: &TreeCopy) -> (BTreeMap<EdgeId, EdgeId>, BTreeMap<Vertex, Vertex>) {
    let blue = tp.blue_edges();
    let blue_leaves: BTreeSet<Vertex> = blue
        .iter()
        .flat_map(|&te| {
            let e = tp.tree.edge(te).unwrap();
            [e.u, e.v]
        })
        .filter(|&v| tp.is_leaf(v) && tp.side(v) == Side::B)
        .collect();
    (
        c.edge_map.iter().filter(|(te, _)| !blue.contains(te)).map(|(&a, &b)| (a, b)).collect(),
        c.vertex_image
            .iter()
            .filter(|(tv, _)| !blue_leaves.contains(tv))
            .map(|(&a, &b)| (a, b))
            .collect(),
    )
}

fn criterion_6() -> Outcome {
    let tp = p5_pattern();
    let lambda = 2 * tp.m;
    let (mut fixed, mut planted_total, mut issues) = (0, 0, Vec::new());
    for i in 0..50u64 {
        let n = 16 + 2 * (i % 5) as usize;
        let g = regular_bipartite(n, 16, i).unwrap();
        let bip = bipartition(&g).unwrap();
        let (mut d, _) = decompose_p5(&g, &bip, Kind::Homomorphic, &SplitConfig::attempt(i)).unwrap();
        plant_conflicts(&g, &tp, &mut d, 3 + (i % 4) as usize, mix(i, 6));
        let before = count_conflicts(&tp, &d);
        planted_total += before;
        if before == 0 {
            issues.push(format!("instance {i}: no conflict planted"));
            continue;
        }
        match repair_conflicts(&g, &bip, &tp, &d, Some(lambda), &SplitConfig::strict(i)) {
            Ok((out, stats)) => {
                let monotone = stats.history.windows(2).all(|w| w[1] < w[0]);
                let red_same = d.copies.iter().zip(&out.copies).all(|(a, b)| red_part(&tp, a) == red_part(&tp, b));
                let v = verify_decomposition(&g, &tstar::treedecomp::trees::path(4), &out, Kind::Isomorphic);
                if stats.conflicts_after == 0 && count_conflicts(&tp, &out) == 0 && monotone && red_same && v.accepted()
                {
                    fixed += 1;
                } else {
                    issues.push(format!(
                        "instance {i}: after {} monotone {monotone} red unchanged {red_same} accepted {}",
                        stats.conflicts_after,
                        v.accepted()
                    ));
                }
            }
            Err(e) => issues.push(format!("instance {i}: {e}")),
        }
    }
    outcome(
        fixed == 50,
        format!("{fixed}/50 repaired, {planted_total} planted conflicts {}", issues.join("; ")),
    )
}

#[derive(Clone, Copy, Debug)]
enum Mutation {
    MoveEdge,
    CorruptImage,
    DropCopy,
    DuplicateEdge,
}

fn mutate(d: &Decomposition, how: Mutation, seed: u64) -> (Decomposition, FailureClass) {
    let mut rng = seeded(seed);
    let mut out = d.clone();
    let n = out.copies.len();
    let i = rng.gen_range(0..n);
    let j = (i + 1 + rng.gen_range(0..n - 1)) % n;
    match how {
        Mutation::MoveEdge => {
            let te = *out.copies[i].edge_map.keys().next().unwrap();
            let other = out.copies[j].edge_map[&te];
            out.copies[i].edge_map.insert(te, other);
            (out, FailureClass::DuplicateEdge)
        }
        Mutation::CorruptImage => {
            let tv = *out.copies[i].vertex_image.keys().next().unwrap();
            let old = out.copies[i].vertex_image[&tv];
            out.copies[i].vertex_image.insert(tv, old + 1_000_000);
            (out, FailureClass::NotHomomorphic)
        }
        Mutation::DropCopy => {
            out.copies.remove(i);
            (out, FailureClass::MissingEdge)
        }
        Mutation::DuplicateEdge => {
            let c = out.copies[j].clone();
            out.copies.push(c);
            (out, FailureClass::DuplicateEdge)
        }
    }
}

fn criterion_7() -> Outcome {
    let (mut originals_ok, mut rejected_ok, mut problems) = (0, 0, Vec::new());
    let kinds = [
        Mutation::MoveEdge,
        Mutation::CorruptImage,
        Mutation::DropCopy,
        Mutation::DuplicateEdge,
    ];
    let mut seed = 0u64;
    let mut done = 0;
    while done < 100 {
        seed += 1;
        let m = 2 + (seed % 3) as usize;
        let trees = all_trees(m);
        let t = &trees[(seed as usize / 3) % trees.len()];
        let g = random_bipartite(3, 4, 4, 3, Some(m), seed).unwrap();
        let Ok(rep) = decompose(&g, t, &DecomposeOptions::default()) else { continue };
        let d = rep.decomposition;
        if d.copies.len() < 2 {
            continue;
        }
        if verify_decomposition(&g, t, &d, Kind::Homomorphic).accepted() {
            originals_ok += 1;
        } else {
            problems.push(format!("original {done} rejected"));
        }
        let how = kinds[done % 4];
        let (bad, class) = mutate(&d, how, seed);
        let r = verify_decomposition(&g, t, &bad, Kind::Homomorphic);
        if !r.accepted() && r.failure_classes().contains(&class) {
            rejected_ok += 1;
        } else {
            problems.push(format!("{how:?} on certificate {done}: classes {:?}", r.failure_classes()));
        }
        done += 1;
    }
    outcome(
        originals_ok == 100 && rejected_ok == 100,
        format!("{originals_ok}/100 originals accepted, {rejected_ok}/100 mutants rejected with the right class {}", problems.join("; ")),
    )
}

fn criterion_8() -> Outcome {
    let (mut cases, mut good, mut problems) = (0, 0, Vec::new());
    for n in 2..=8usize {
        let g = bundle(n);
        for m in (1..=n).filter(|m| n % m == 0) {
            for (ti, t) in all_trees(m).iter().enumerate() {
                cases += 1;
                match decompose(&g, t, &DecomposeOptions::default()) {
                    Ok(r) => {
                        let v = verify_decomposition(&g, t, &r.decomposition, Kind::Homomorphic);
                        if v.accepted() && r.decomposition.copies.len() == n / m {
                            good += 1;
                        } else {
                            problems.push(format!("n={n} tree {m}#{ti}: {} copies", r.decomposition.copies.len()));
                        }
                    }
                    Err(e) => problems.push(format!("n={n} tree {m}#{ti}: {e}")),
                }
            }
        }
    }
    outcome(good == cases, format!("{good}/{cases} cases {}", problems.join("; ")))
}

#[test]
fn acceptance_criteria() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("bounds calculator constants", criterion_1),
        ("orientation oracle equivalence", criterion_2),
        ("spanning tree packing", criterion_3),
        ("path-of-length-4 pipeline", criterion_4),
        ("end-to-end decomposition", criterion_5),
        ("conflict repair", criterion_6),
        ("verifier adversarial suite", criterion_7),
        ("parallel-edge bundles", criterion_8),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {} {verdict}: {name} ({})", i + 1, o.detail.trim());
        if !o.pass {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
