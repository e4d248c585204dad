//! Exact connectivity thresholds, in arbitrary precision.

use num_bigint::BigUint;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoundError {
    #[error("unknown bound kind `{0}`")]
    UnknownBoundKind(String),
    #[error("`{kind}` expects {expected} parameter(s), got {got}")]
    Arity { kind: String, expected: usize, got: usize },
    #[error("invalid parameters for `{kind}`: {reason}")]
    InvalidParams { kind: String, reason: String },
}

fn big(x: u64) -> BigUint {
    BigUint::from(x)
}

/// `f_k(m, λ)`: `64λ + 48k` for `m = 2`, then `16 f_k(m-1, λ) m² + 24km`.
/// For `m = 1` nothing needs splitting and the value is `λ`.
pub fn f_k(k: u64, m: u64, lambda: u64) -> BigUint {
    match m {
        0 | 1 => big(lambda),
        2 => big(64 * lambda + 48 * k),
        _ => f_k(k, m - 1, lambda) * big(16 * m * m) + big(24 * k * m),
    }
}

/// All partitions of `m` into positive parts, parts non-increasing.
pub fn partitions(m: u64) -> Vec<Vec<u64>> {
    fn go(rest: u64, max: u64, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if rest == 0 {
            out.push(cur.clone());
            return;
        }
        for part in (1..=rest.min(max)).rev() {
            cur.push(part);
            go(rest - part, part, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(m, m, &mut Vec::new(), &mut out);
    out
}

/// `f(m, λ)`: the maximum of `f_{Π P}(m, λ)` over all partitions `P` of `m`.
pub fn f(m: u64, lambda: u64) -> BigUint {
    partitions(m)
        .into_iter()
        .map(|p| f_k(p.iter().product(), m, lambda))
        .max()
        .unwrap_or_else(|| big(lambda))
}

/// Spanning trees needed to make one side's degrees divisible by `m` with
/// both parts `l`-edge-connected: `3m - 2 + 2l`, or `3m - 3 + 2l` for odd `m`.
pub fn divisible_split_trees(m: u64, l: u64, odd_refinement: bool) -> BigUint {
    if odd_refinement && m % 2 == 1 {
        big(3 * m - 3 + 2 * l)
    } else {
        big(3 * m - 2 + 2 * l)
    }
}

/// Reduction of an arbitrary graph to a `k`-edge-connected bipartite one:
/// `4k + 8m^(2m+3)`.
pub fn bipartite_reduction(k: u64, m: u64) -> BigUint {
    big(4 * k) + big(8) * big(m).pow((2 * m + 3) as u32)
}

fn bistar_ceiling(k: u64, l: u64) -> u64 {
    let m = k + l - 1;
    (2 * m).div_ceil(k - 1)
}

/// Connectivity for the two-part bistar split: `3l ⌈2m/(k-1)⌉`.
pub fn bistar_split(k: u64, l: u64) -> BigUint {
    big(3 * l * bistar_ceiling(k, l))
}

/// Bipartite `S(k, l)` threshold: `12l ⌈2m/(k-1)⌉ + 6m - 4`.
pub fn bistar_bipartite(k: u64, l: u64) -> BigUint {
    let m = k + l - 1;
    big(12 * l * bistar_ceiling(k, l) + 6 * m - 4)
}

/// Uniform bound for `S(k, k+1)` on bipartite simple graphs: `72k + 236`.
pub fn bistar_simple(k: u64) -> BigUint {
    big(72 * k + 236)
}

/// Bipartite reduction for diameter-3 trees: `4k + 16m(m+1)`.
pub fn diam3_reduction(k: u64, m: u64) -> BigUint {
    big(4 * k + 16 * m * (m + 1))
}

/// Any bistar on `m` edges: `112m²`.
pub fn diam3(m: u64) -> BigUint {
    big(112 * m * m)
}

pub const P4_SIMPLE: u64 = 63;
pub const P5_ANY: u64 = 107;
pub const P4_PRIOR: u64 = 171;

/// Infinite-graph offset: `k_h + m² - m`.
pub fn infinite_offset(k_h: u64, m: u64) -> BigUint {
    big(k_h + m * m - m)
}

/// Evaluates a bound by name; the CLI and experiments go through here.
pub fn bound_by_name(name: &str, params: &[u64]) -> Result<BigUint, BoundError> {
    let arity = |n: usize| {
        if params.len() == n {
            Ok(())
        } else {
            Err(BoundError::Arity {
                kind: name.to_string(),
                expected: n,
                got: params.len(),
            })
        }
    };
    let invalid = |reason: &str| BoundError::InvalidParams {
        kind: name.to_string(),
        reason: reason.to_string(),
    };
    let p = params;
    Ok(match name {
        "fk" => {
            arity(3)?;
            f_k(p[0], p[1], p[2])
        }
        "f" => {
            arity(2)?;
            f(p[0], p[1])
        }
        "equitable" => {
            arity(2)?;
            f(p[0], p[0] * p[1])
        }
        "girth-repair" => {
            arity(1)?;
            f(p[0], 2 * p[0])
        }
        "divisible-trees" => {
            arity(2)?;
            divisible_split_trees(p[0], p[1], false)
        }
        "divisible-trees-odd" => {
            arity(2)?;
            if p[0] % 2 == 0 {
                return Err(invalid("m must be odd"));
            }
            divisible_split_trees(p[0], p[1], true)
        }
        "bipartite-reduction" => {
            arity(2)?;
            bipartite_reduction(p[0], p[1])
        }
        "bistar-split" | "bistar" => {
            arity(2)?;
            if !(1 < p[0] && p[0] <= p[1]) {
                return Err(invalid("need 1 < k <= l"));
            }
            if name == "bistar" {
                bistar_bipartite(p[0], p[1])
            } else {
                bistar_split(p[0], p[1])
            }
        }
        "bistar-simple" => {
            arity(1)?;
            bistar_simple(p[0])
        }
        "diam3-reduction" => {
            arity(2)?;
            diam3_reduction(p[0], p[1])
        }
        "diam3" => {
            arity(1)?;
            diam3(p[0])
        }
        "p4" => {
            arity(0)?;
            big(P4_SIMPLE)
        }
        "p5" => {
            arity(0)?;
            big(P5_ANY)
        }
        "p4-prior" => {
            arity(0)?;
            big(P4_PRIOR)
        }
        "infinite" => {
            arity(2)?;
            infinite_offset(p[0], p[1])
        }
        "half-split" => {
            arity(1)?;
            if p[0] == 0 {
                return Err(invalid("k must be positive"));
            }
            big(3 * p[0] - 2)
        }
        "fractional" => {
            arity(2)?;
            big(12 * p[0] * p[1])
        }
        "connected-fractional" => {
            arity(3)?;
            big(8 * p[2] * p[1] * p[1] + 12 * p[0] * p[1])
        }
        "skeleton" => {
            arity(2)?;
            big(4 * p[0] * p[1])
        }
        "packing" => {
            arity(1)?;
            big(2 * p[0])
        }
        "eps-trees" => {
            arity(2)?;
            if p[0] == 0 || p[0] >= p[1] {
                return Err(invalid("eps = num/den must lie in (0, 1)"));
            }
            big((4 * p[1]).div_ceil(p[0]))
        }
        _ => return Err(BoundError::UnknownBoundKind(name.to_string())),
    })
}

/// Names accepted by [`bound_by_name`] with their parameter lists.
pub const BOUND_KINDS: &[(&str, &str)] = &[
    ("fk", "k m lambda"),
    ("f", "m lambda"),
    ("equitable", "m d"),
    ("girth-repair", "m"),
    ("divisible-trees", "m l"),
    ("divisible-trees-odd", "m l"),
    ("bipartite-reduction", "k m"),
    ("bistar-split", "k l"),
    ("bistar", "k l"),
    ("bistar-simple", "k"),
    ("diam3-reduction", "k m"),
    ("diam3", "m"),
    ("p4", ""),
    ("p5", ""),
    ("p4-prior", ""),
    ("infinite", "k_h m"),
    ("half-split", "k"),
    ("fractional", "k m"),
    ("connected-fractional", "k m lambda"),
    ("skeleton", "k q"),
    ("packing", "k"),
    ("eps-trees", "num den"),
];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recursion_values() {
        assert_eq!(f_k(1, 2, 1), big(112));
        assert_eq!(f_k(1, 3, 1), big(16200));
        assert_eq!(f_k(2, 2, 3), big(64 * 3 + 96));
    }

    #[test]
    fn partition_counts() {
        let counts: Vec<usize> = (1..=8).map(|m| partitions(m).len()).collect();
        assert_eq!(counts, vec![1, 2, 3, 5, 7, 11, 15, 22]);
    }

    #[test]
    fn f_takes_the_largest_product() {
        // partitions of 4: products 4, 3, 4, 2, 1
        assert_eq!(f(4, 1), f_k(4, 4, 1));
        assert_eq!(f(2, 1), big(160));
    }

    #[test]
    fn bistar_values() {
        assert_eq!(bistar_bipartite(2, 3), big(308));
        assert_eq!(bistar_simple(2), big(380));
        assert_eq!(bistar_split(2, 2), big(3 * 2 * 6));
    }

    #[test]
    fn uniform_bistar_bound_dominates() {
        for k in 2..200 {
            assert!(bistar_bipartite(k, k + 1) <= bistar_simple(k), "k = {k}");
        }
    }

    #[test]
    fn reduction_needs_big_integers() {
        let v = bipartite_reduction(1, 5);
        assert_eq!(v, big(4) + big(8) * big(5).pow(13));
        assert!(bipartite_reduction(1, 9) > big(u64::MAX));
    }

    #[test]
    fn literals_and_offsets() {
        assert_eq!(bound_by_name("p4", &[]).unwrap(), big(63));
        assert_eq!(bound_by_name("p5", &[]).unwrap(), big(107));
        assert_eq!(bound_by_name("p4-prior", &[]).unwrap(), big(171));
        assert_eq!(infinite_offset(10, 4), big(22));
        assert_eq!(diam3(3), big(1008));
        assert_eq!(diam3_reduction(1, 3), big(196));
        assert_eq!(divisible_split_trees(3, 2, true), big(10));
        assert_eq!(divisible_split_trees(4, 5, false), big(20));
    }

    #[test]
    fn names_are_checked() {
        assert!(matches!(bound_by_name("nope", &[]), Err(BoundError::UnknownBoundKind(_))));
        assert!(matches!(bound_by_name("fk", &[1]), Err(BoundError::Arity { .. })));
        for (name, params) in BOUND_KINDS {
            let n = params.split_whitespace().count();
            let args: Vec<u64> = match *name {
                "divisible-trees-odd" => vec![3, 1],
                "eps-trees" => vec![1, 3],
                _ => vec![2; n],
            };
            let args = if name.starts_with("bistar") && n == 2 { vec![2, 3] } else { args };
            assert!(bound_by_name(name, &args).is_ok(), "{name}");
        }
    }
}
