use std::collections::VecDeque;
use std::fmt;

use super::{Indexed, MultiGraph};

/// Length of a shortest cycle; forests have infinite girth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Girth {
    Finite(usize),
    Infinite,
}

impl Girth {
    pub fn exceeds(self, d: usize) -> bool {
        match self {
            Girth::Finite(g) => g > d,
            Girth::Infinite => true,
        }
    }

    pub fn at_least(self, d: usize) -> bool {
        match self {
            Girth::Finite(g) => g >= d,
            Girth::Infinite => true,
        }
    }

    pub fn finite(self) -> Option<usize> {
        match self {
            Girth::Finite(g) => Some(g),
            Girth::Infinite => None,
        }
    }
}

impl fmt::Display for Girth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Girth::Finite(g) => write!(f, "{g}"),
            Girth::Infinite => write!(f, "inf"),
        }
    }
}

/// BFS from every vertex; a non-tree edge `xy` closes a cycle of length at
/// most `dist(x) + dist(y) + 1`, and the minimum over all roots is exact.
/// Two parallel edges form a cycle of length 2.
pub fn girth(g: &MultiGraph) -> Girth {
    let ix = Indexed::new(g);
    let n = ix.n();
    let mut best = usize::MAX;
    let mut dist = vec![usize::MAX; n];
    let mut via = vec![usize::MAX; n];
    for root in 0..n {
        dist.iter_mut().for_each(|d| *d = usize::MAX);
        dist[root] = 0;
        via[root] = usize::MAX;
        let mut queue = VecDeque::from([root]);
        while let Some(x) = queue.pop_front() {
            if 2 * dist[x] >= best {
                break;
            }
            for &(y, e) in &ix.adj[x] {
                if e == via[x] {
                    continue;
                }
                if dist[y] == usize::MAX {
                    dist[y] = dist[x] + 1;
                    via[y] = e;
                    queue.push_back(y);
                } else {
                    best = best.min(dist[x] + dist[y] + 1);
                }
            }
        }
    }
    if best == usize::MAX {
        Girth::Infinite
    } else {
        Girth::Finite(best)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycle_girth() {
        let c4 = MultiGraph::from_pairs([(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        assert_eq!(girth(&c4), Girth::Finite(4));
    }

    #[test]
    fn tree_girth_is_infinite() {
        let t = MultiGraph::from_pairs([(0, 1), (1, 2), (1, 3)]).unwrap();
        assert_eq!(girth(&t), Girth::Infinite);
    }

    #[test]
    fn parallel_pair_is_a_two_cycle() {
        let g = MultiGraph::from_pairs([(0, 1), (0, 1)]).unwrap();
        assert_eq!(girth(&g), Girth::Finite(2));
    }

    #[test]
    fn ordering_treats_infinity_as_largest() {
        assert!(Girth::Infinite > Girth::Finite(1000));
        assert!(Girth::Infinite.exceeds(7));
        assert!(!Girth::Finite(4).exceeds(4));
        assert!(Girth::Finite(4).at_least(4));
    }
}
