//! Brute-force reference implementations used by the integration tests.
//!
//! Everything here works from the raw edge list and plain `u64` masks. None
//! of it calls the library's range, refinement, closure or chain code, so the
//! tests compare two independent computations.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashSet};

use labelana::graph::{LabeledGraph, Limits};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use labelana::fuzz::{random_graph, Shape};

pub const FIXTURES: [&str; 5] = ["F1", "F2", "F3", "F4", "F5"];

pub fn fixture_path(name: &str) -> String {
    format!("{}/fixtures/{name}.lgr", env!("CARGO_MANIFEST_DIR"))
}

pub fn fixture(name: &str) -> LabeledGraph {
    let text = std::fs::read_to_string(fixture_path(name)).unwrap();
    labelana::graph::parse(&text, Limits::default()).unwrap().graph
}

pub fn from_text(text: &str) -> LabeledGraph {
    labelana::graph::parse(text, Limits::default()).unwrap().graph
}

/// Seeded random corpus with the same generator the `fuzz` command uses.
pub fn corpus(n: usize, shape: Shape, seed: u64) -> Vec<LabeledGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| random_graph(&mut rng, shape)).collect()
}

/// Edge list as `(src, dst, letter)` with letters as indices.
pub struct Raw {
    pub n: usize,
    pub letters: usize,
    pub edges: Vec<(usize, usize, usize)>,
}

impl Raw {
    pub fn of(g: &LabeledGraph) -> Raw {
        Raw {
            n: g.vertex_count(),
            letters: g.letter_count(),
            edges: g.edges().iter().map(|e| (e.src, e.dst, e.label.index())).collect(),
        }
    }

    pub fn all(&self) -> u64 {
        if self.n == 64 {
            u64::MAX
        } else {
            (1u64 << self.n) - 1
        }
    }

    pub fn omega0(&self) -> u64 {
        self.edges.iter().fold(0, |m, &(_, d, _)| m | 1 << d)
    }

    /// `r(A, a)`.
    pub fn step(&self, a: u64, letter: usize) -> u64 {
        self.edges
            .iter()
            .filter(|&&(s, _, l)| l == letter && a >> s & 1 == 1)
            .fold(0, |m, &(_, d, _)| m | 1 << d)
    }

    /// `r(A, w)`.
    pub fn range(&self, a: u64, w: &[usize]) -> u64 {
        w.iter().fold(a, |x, &l| self.step(x, l))
    }

    /// All successors of `A`, any label.
    pub fn succ(&self, a: u64) -> u64 {
        self.edges
            .iter()
            .filter(|&&(s, _, _)| a >> s & 1 == 1)
            .fold(0, |m, &(_, d, _)| m | 1 << d)
    }

    /// Labels on edges leaving `A`.
    pub fn out_labels(&self, a: u64) -> BTreeSet<usize> {
        self.edges
            .iter()
            .filter(|&&(s, _, _)| a >> s & 1 == 1)
            .map(|&(_, _, l)| l)
            .collect()
    }

    /// Every realized word of length `1..=max_len` with its range `r(w)`.
    pub fn words_upto(&self, max_len: usize) -> Vec<(Vec<usize>, u64)> {
        let mut out = Vec::new();
        let mut layer: Vec<(Vec<usize>, u64)> = vec![(Vec::new(), self.all())];
        for _ in 0..max_len {
            let mut next = Vec::new();
            for (w, x) in &layer {
                for l in 0..self.letters {
                    let y = self.step(*x, l);
                    if y != 0 {
                        let mut w2 = w.clone();
                        w2.push(l);
                        next.push((w2, y));
                    }
                }
            }
            out.extend(next.iter().cloned());
            layer = next;
        }
        out
    }

    /// Label words of length exactly `k` on paths starting in `A`, by walking
    /// edge paths one at a time. `None` when more than `cap` paths exist.
    pub fn path_labels(&self, a: u64, k: usize, cap: usize) -> Option<BTreeSet<Vec<usize>>> {
        let mut paths: Vec<(usize, Vec<usize>)> =
            (0..self.n).filter(|v| a >> v & 1 == 1).map(|v| (v, vec![])).collect();
        for _ in 0..k {
            let mut next = Vec::new();
            for (v, w) in &paths {
                for &(s, d, l) in &self.edges {
                    if s == *v {
                        let mut w2 = w.clone();
                        w2.push(l);
                        next.push((d, w2));
                        if next.len() > cap {
                            return None;
                        }
                    }
                }
            }
            paths = next;
        }
        Some(paths.into_iter().map(|(_, w)| w).collect())
    }

    /// The single word in `ℒ(A E^m)`, if there is only one. At every step the
    /// out-labels of the frontier must be one letter; since no vertex is a
    /// sink, every edge extends to a path of full length.
    pub fn forced_word(&self, a: u64, m: usize) -> Option<Vec<usize>> {
        let mut x = a;
        let mut w = Vec::with_capacity(m);
        for _ in 0..m {
            let ls = self.out_labels(x);
            if ls.len() != 1 {
                return None;
            }
            w.push(*ls.iter().next().unwrap());
            x = self.succ(x);
        }
        Some(w)
    }

    /// Partition of `Ω₀` by the set of label words of length `≤ l` ending at
    /// each vertex.
    pub fn level_partition(&self, l: usize) -> Vec<u64> {
        let words = self.words_upto(l);
        let omega0 = self.omega0();
        let mut classes: BTreeMap<Vec<bool>, u64> = BTreeMap::new();
        for v in 0..self.n {
            if omega0 >> v & 1 == 1 {
                let key: Vec<bool> = words.iter().map(|(_, r)| r >> v & 1 == 1).collect();
                *classes.entry(key).or_insert(0) |= 1 << v;
            }
        }
        sorted_by_min(classes.into_values().collect())
    }

    /// Smallest family containing every `r(w)` and closed under `∩`, `∪`,
    /// relative complement and one-letter relative ranges. `None` past `cap`.
    pub fn closure(&self, cap: usize) -> Option<HashSet<u64>> {
        let mut fam: HashSet<u64> = HashSet::new();
        let mut todo: Vec<u64> = (0..self.letters).map(|l| self.step(self.all(), l)).collect();
        while !todo.is_empty() {
            while let Some(x) = todo.pop() {
                if fam.insert(x) {
                    todo.extend((0..self.letters).map(|l| self.step(x, l)));
                }
            }
            if fam.len() > cap {
                return None;
            }
            for &x in &fam {
                for &y in &fam {
                    todo.extend([x & y, x | y, x & !y].into_iter().filter(|z| !fam.contains(z)));
                }
            }
        }
        Some(fam)
    }

    /// `r(A∩B, a) = r(A, a) ∩ r(B, a)` for all members of `fam` and letters.
    pub fn wlr(&self, fam: &HashSet<u64>) -> bool {
        fam.iter().all(|&x| {
            fam.iter()
                .all(|&y| (0..self.letters).all(|l| self.step(x & y, l) == self.step(x, l) & self.step(y, l)))
        })
    }
}

pub fn sorted_by_min(mut v: Vec<u64>) -> Vec<u64> {
    v.sort_by_key(|m| m.trailing_zeros());
    v
}

/// Nonempty members of `fam` contained in `a`.
fn subsets_in(fam: &HashSet<u64>, a: u64) -> Vec<u64> {
    fam.iter().copied().filter(|&b| b != 0 && b & !a == 0).collect()
}

fn is_periodic_with(w: &[usize], p: usize) -> bool {
    (0..w.len().saturating_sub(p)).all(|i| w[i] == w[i + p])
}

/// Agreeable sets by direct enumeration: `A ∈ ℰ` nonempty and `β` with
/// `|β| ≤ max_beta` such that `ℒ(A E^{|β|n}) = {βⁿ}` for every `n ≤ max_n`.
/// Returns the first `(A, β)` found.
pub fn brute_agreeable(raw: &Raw, fam: &HashSet<u64>, max_beta: usize, max_n: usize) -> Option<(u64, Vec<usize>)> {
    let mut sets: Vec<u64> = fam.iter().copied().filter(|&a| a != 0).collect();
    sets.sort_unstable();
    for a in sets {
        for b in 1..=max_beta {
            if let Some(w) = raw.forced_word(a, b * max_n) {
                if is_periodic_with(&w, b) {
                    return Some((a, w[..b].to_vec()));
                }
            }
        }
    }
    None
}

/// Bounds large enough that the enumeration above is exact: a purely
/// periodic forced label sequence has period at most the length of a graph
/// cycle, and the forced frontier sequence repeats within `2^|V|` steps.
pub fn exact_agreeable_bounds(raw: &Raw) -> (usize, usize) {
    (raw.omega0().count_ones().max(3) as usize, (1usize << raw.n.min(20)) + 1)
}

/// An exit-less cycle `(α, A)` by direct enumeration with `|α| ≤ max_len`:
/// `ℒ(A E^{|α|}) = {α}` and `r(B, α) = B` for every nonempty `ℰ`-subset `B ⊆ A`.
pub fn brute_exitless_cycle(raw: &Raw, fam: &HashSet<u64>, max_len: usize) -> Option<(u64, Vec<usize>)> {
    let mut sets: Vec<u64> = fam.iter().copied().filter(|&a| a != 0).collect();
    sets.sort_unstable();
    for a in sets {
        for m in 1..=max_len {
            let Some(w) = raw.forced_word(a, m) else { break };
            if cycle_on(raw, fam, a, &w) {
                return Some((a, w));
            }
        }
    }
    None
}

/// `r(B, α) = B` for every nonempty member `B ⊆ A`.
pub fn cycle_on(raw: &Raw, fam: &HashSet<u64>, a: u64, alpha: &[usize]) -> bool {
    subsets_in(fam, a).into_iter().all(|b| raw.range(b, alpha) == b)
}

pub fn exact_cycle_bound(raw: &Raw) -> usize {
    (1usize << raw.n.min(20)) + 1
}

/// Proptest strategy for small no-sink labeled graphs.
pub fn arb_graph(max_vertices: usize, max_extra: usize, letters: usize) -> impl Strategy<Value = LabeledGraph> {
    (1..=max_vertices).prop_flat_map(move |n| {
        (
            prop::collection::vec((0..n, 0..letters), n),
            prop::collection::vec((0..n, 0..n, 0..letters), 0..=max_extra),
        )
            .prop_map(move |(base, extra)| {
                let mut edges: Vec<(usize, usize, usize)> =
                    base.into_iter().enumerate().map(|(v, (d, l))| (v, d, l)).collect();
                for e in extra {
                    if !edges.contains(&e) {
                        edges.push(e);
                    }
                }
                build(n, &edges)
            })
    })
}

pub fn build(n: usize, edges: &[(usize, usize, usize)]) -> LabeledGraph {
    let names: Vec<String> = (0..n).map(|v| format!("v{v}")).collect();
    let triples: Vec<(String, String, String)> = edges
        .iter()
        .map(|&(s, d, l)| (names[s].clone(), names[d].clone(), format!("l{l}")))
        .collect();
    LabeledGraph::new("prop", &names, &triples, Limits::default())
        .unwrap()
        .graph
}
