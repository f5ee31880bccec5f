//! Classical graph conditions for injectively labeled graphs, computed on
//! the bare edge list. Used as a differential oracle against the
//! labeled-space predicates, so nothing here touches atoms or ranges.

use std::collections::VecDeque;

use crate::error::{AnalysisError, Result};
use crate::graph::LabeledGraph;

/// Adjacency lists with labels dropped; parallel edges are kept.
#[derive(Clone, Debug)]
pub struct PlainGraph {
    out: Vec<Vec<usize>>,
}

impl PlainGraph {
    pub fn from_labeled(g: &LabeledGraph) -> Result<PlainGraph> {
        let mut seen = std::collections::HashSet::new();
        for e in g.edges() {
            if !seen.insert(e.label) {
                return Err(AnalysisError::OracleInapplicable(format!(
                    "label `{}` is used by more than one edge",
                    g.letter_name(e.label)
                )));
            }
        }
        let mut out = vec![Vec::new(); g.vertex_count()];
        for e in g.edges() {
            out[e.src].push(e.dst);
        }
        Ok(PlainGraph { out })
    }

    pub fn vertex_count(&self) -> usize {
        self.out.len()
    }

    /// Vertices reachable from `v` in one or more steps, optionally not
    /// walking through `avoid` in between.
    fn reach(&self, v: usize, avoid: Option<usize>) -> Vec<bool> {
        let mut seen = vec![false; self.out.len()];
        let mut queue: VecDeque<usize> = self.out[v].iter().copied().collect();
        while let Some(x) = queue.pop_front() {
            if seen[x] {
                continue;
            }
            seen[x] = true;
            if Some(x) == avoid {
                continue;
            }
            queue.extend(self.out[x].iter().copied());
        }
        seen
    }

    pub fn on_cycle(&self, v: usize) -> bool {
        self.reach(v, None)[v]
    }

    /// Every cycle has an exit: no cycle consists of out-degree-one vertices.
    pub fn condition_l(&self) -> bool {
        (0..self.out.len()).all(|v| {
            let mut x = v;
            for _ in 0..self.out.len() {
                if self.out[x].len() != 1 {
                    return true;
                }
                x = self.out[x][0];
                if x == v {
                    return false;
                }
            }
            true
        })
    }

    /// Number of first-return paths at `v`, saturating at 2.
    fn first_returns(&self, v: usize) -> usize {
        // Vertices a first return can visit: reachable from v and able to
        // reach v, both without passing through v.
        let from_v = self.reach(v, Some(v));
        let n = self.out.len();
        let mut to_v = vec![false; n];
        to_v[v] = true;
        let mut changed = true;
        while changed {
            changed = false;
            for x in 0..n {
                if x != v && !to_v[x] && self.out[x].iter().any(|&y| to_v[y]) {
                    to_v[x] = true;
                    changed = true;
                }
            }
        }
        let inside = |x: usize| x == v || (from_v[x] && to_v[x]);
        if !inside(v) || !from_v[v] {
            return 0;
        }
        let branching = (0..n)
            .filter(|&x| inside(x))
            .any(|x| self.out[x].iter().filter(|&&y| inside(y)).count() >= 2);
        if branching {
            2
        } else {
            1
        }
    }

    /// Every vertex on a cycle has at least two distinct first-return paths.
    pub fn condition_k(&self) -> bool {
        (0..self.out.len()).all(|v| !self.on_cycle(v) || self.first_returns(v) >= 2)
    }

    /// Every vertex reaches a vertex on a cycle (possibly itself).
    pub fn connects_to_loop(&self) -> bool {
        let cyc: Vec<bool> = (0..self.out.len()).map(|v| self.on_cycle(v)).collect();
        (0..self.out.len()).all(|v| cyc[v] || self.reach(v, None).iter().zip(&cyc).any(|(r, c)| *r && *c))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleReport {
    pub l: bool,
    pub k: bool,
    pub connects: bool,
}

pub fn oracle(g: &LabeledGraph) -> Result<OracleReport> {
    let p = PlainGraph::from_labeled(g)?;
    Ok(OracleReport {
        l: p.condition_l(),
        k: p.condition_k(),
        connects: p.connects_to_loop(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{parse, Limits};

    fn run(text: &str) -> Result<OracleReport> {
        oracle(&parse(text, Limits::default()).unwrap().graph)
    }

    #[test]
    fn fixture_conditions() {
        let r = |l, k, connects| OracleReport { l, k, connects };
        assert_eq!(run("vertex v\nedge v v : a\n").unwrap(), r(false, false, true));
        assert_eq!(
            run("vertex v\nedge v v : a\nedge v v : b\n").unwrap(),
            r(true, true, true)
        );
        assert_eq!(
            run("vertex v1 v2\nedge v1 v2 : a1\nedge v2 v1 : a2\nedge v1 v1 : b\n").unwrap(),
            r(true, true, true)
        );
    }

    #[test]
    fn non_injective_is_rejected() {
        assert!(matches!(
            run("vertex u v\nedge u v : a\nedge v u : a\n"),
            Err(AnalysisError::OracleInapplicable(_))
        ));
    }

    #[test]
    fn joined_cycles() {
        let r = run("vertex x y\nedge x x : a\nedge x y : b\nedge y y : c\nedge y x : d\n").unwrap();
        assert!(r.l && r.k);
        // the self-loop at z has no exit
        let r = run("vertex x y z\nedge x y : a\nedge y x : b\nedge x z : c\nedge z z : d\n").unwrap();
        assert!(!r.l && !r.k);
        // y returns only through x, but x branches
        let r = run("vertex x y\nedge x x : a\nedge x y : b\nedge y x : c\n").unwrap();
        assert!(r.l && r.k);
    }

    #[test]
    fn l_holds_k_fails() {
        // A 2-cycle with an exit into a self-loop: every cycle has an exit,
        // but x and y each have exactly one first return.
        let r = run("vertex x y z\nedge x y : a\nedge y x : b\nedge y z : c\nedge z z : d\nedge z z : e\n").unwrap();
        assert!(r.l);
        assert!(!r.k);
    }
}
