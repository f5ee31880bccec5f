//! Generalized vertices, the smallest normal accommodating family and the
//! structural checks on it.
//!
//! Two vertices `v, w` are `~_l`-equivalent when they receive the same label
//! words of length `1..=l`. Since `α` labels a path into `v` exactly when
//! `v ∈ r(α)`, the level-`l` partition is the partition of the non-source
//! vertices by membership in the sets `{r(α) : 1 ≤ |α| ≤ l}`. Those sets are
//! the states reached at depth `≤ l` when iterating `letter_range` from the
//! whole vertex set, so the refinement runs as a breadth-first walk over
//! distinct ranges and stops once no new range appears.
//!
//! The family itself is represented intensionally as all unions of the
//! stabilized classes (atoms); [`Space::enumerate`] materializes it on demand.

use std::collections::{HashSet, VecDeque};

use crate::config::Config;
use crate::error::{AnalysisError, Result};
use crate::graph::{LabeledGraph, Letter, VertexSet};

/// Generalized vertices at every level up to stabilization.
#[derive(Clone, Debug)]
pub struct AtomPartition {
    /// Stabilized classes, ordered by smallest member.
    pub atoms: Vec<VertexSet>,
    /// Smallest `l` whose partition equals every later one.
    pub stabilization_depth: usize,
    /// `per_level[l-1]` is the partition `~_l`, for `l = 1..=stabilization_depth`.
    pub per_level: Vec<Vec<VertexSet>>,
}

/// Splits every class of `classes` along `by`.
fn split(classes: &[VertexSet], by: VertexSet) -> Vec<VertexSet> {
    let mut out = Vec::with_capacity(classes.len() + 1);
    for &c in classes {
        let (inside, outside) = (c & by, c - by);
        if inside.is_empty() || outside.is_empty() {
            out.push(c);
        } else {
            out.push(inside);
            out.push(outside);
        }
    }
    out.sort_by_key(|c| c.first_vertex());
    out
}

pub fn refine_partition(g: &LabeledGraph) -> Result<AtomPartition> {
    let omega0 = g.omega0();
    if omega0.is_empty() {
        return Err(AnalysisError::EmptyOmega0);
    }
    let mut seen: HashSet<VertexSet> = HashSet::new();
    let mut frontier: Vec<VertexSet> = Vec::new();
    for a in g.letters() {
        let r = g.range_of_letter(a);
        if seen.insert(r) {
            frontier.push(r);
        }
    }
    let mut classes = vec![omega0];
    let mut levels = Vec::new();
    while !frontier.is_empty() {
        for &s in &frontier {
            classes = split(&classes, s);
        }
        levels.push(classes.clone());
        let mut next = Vec::new();
        for &x in &frontier {
            for a in g.letters() {
                let y = g.letter_range(x, a);
                if !y.is_empty() && seen.insert(y) {
                    next.push(y);
                }
            }
        }
        frontier = next;
    }
    let atoms = classes;
    let depth = levels.iter().position(|p| *p == atoms).map_or(levels.len(), |i| i + 1);
    levels.truncate(depth);
    Ok(AtomPartition {
        atoms,
        stabilization_depth: depth,
        per_level: levels,
    })
}

/// Failure of weak left-resolution: two disjoint atoms whose `a`-ranges meet.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WlrCounterexample {
    pub first: VertexSet,
    pub second: VertexSet,
    pub letter: Letter,
}

/// Outcome of comparing the naive closure with the atom-union family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CrossCheck {
    Agrees {
        size: usize,
    },
    Differs {
        closure_size: usize,
        atom_union_size: usize,
        extra: Option<VertexSet>,
    },
    Skipped {
        reason: String,
    },
}

/// Condition (*) report.
#[derive(Clone, Debug)]
pub struct StarReport {
    pub holds: bool,
    /// Every nonempty set contains a minimal set (always true for atom unions).
    pub contains_minimal: bool,
    /// Every reachable range of an atom is a union of atoms.
    pub ranges_are_unions: bool,
    /// A reachable range that is not a union of atoms, with its base atom.
    pub violation: Option<(VertexSet, VertexSet)>,
}

/// A labeled graph together with its atoms and structural checks.
#[derive(Clone, Debug)]
pub struct Space {
    graph: LabeledGraph,
    partition: AtomPartition,
    atom_of: Vec<Option<usize>>,
    wlr: Option<WlrCounterexample>,
    star: StarReport,
    crosscheck: CrossCheck,
    pub warnings: Vec<String>,
}

impl Space {
    pub fn new(graph: LabeledGraph, config: &Config) -> Result<Space> {
        let partition = refine_partition(&graph)?;
        let mut atom_of = vec![None; graph.vertex_count()];
        for (i, a) in partition.atoms.iter().enumerate() {
            for v in a.iter() {
                atom_of[v] = Some(i);
            }
        }
        let mut space = Space {
            graph,
            partition,
            atom_of,
            wlr: None,
            star: StarReport {
                holds: true,
                contains_minimal: true,
                ranges_are_unions: true,
                violation: None,
            },
            crosscheck: CrossCheck::Skipped {
                reason: "not run".into(),
            },
            warnings: Vec::new(),
        };
        space.wlr = space.find_wlr_counterexample();
        space.star = condition_star(&space, VertexSet::EMPTY);
        space.crosscheck = if space.atom_count() > config.crosscheck_max_atoms {
            CrossCheck::Skipped {
                reason: format!(
                    "{} atoms exceed cross-check cap {}",
                    space.atom_count(),
                    config.crosscheck_max_atoms
                ),
            }
        } else {
            let closure = closure::accommodating_closure(&space.graph, 1 << (config.crosscheck_max_atoms + 2));
            match closure {
                Some(family) => compare_with_atom_unions(&space, &family),
                None => CrossCheck::Skipped {
                    reason: "closure exceeded its size cap".into(),
                },
            }
        };
        if space.wlr.is_some() {
            space
                .warnings
                .push("labeled space is not weakly left-resolving; implication-based verdicts are withheld".into());
        }
        Ok(space)
    }

    pub fn graph(&self) -> &LabeledGraph {
        &self.graph
    }

    pub fn partition(&self) -> &AtomPartition {
        &self.partition
    }

    pub fn atoms(&self) -> &[VertexSet] {
        &self.partition.atoms
    }

    pub fn atom_count(&self) -> usize {
        self.partition.atoms.len()
    }

    pub fn omega0(&self) -> VertexSet {
        self.graph.omega0()
    }

    pub fn atom_index_of(&self, v: usize) -> Option<usize> {
        self.atom_of[v]
    }

    /// Union of the atoms selected by `mask`.
    pub fn union_of_atoms(&self, mask: u64) -> VertexSet {
        VertexSet::from_bits(mask)
            .iter()
            .fold(VertexSet::EMPTY, |acc, i| acc | self.partition.atoms[i])
    }

    /// Mask of atoms meeting `set`.
    pub fn atom_mask(&self, set: VertexSet) -> u64 {
        set.iter().filter_map(|v| self.atom_of[v]).fold(0u64, |m, i| m | 1 << i)
    }

    /// Smallest union of atoms containing `set ∩ Ω₀`.
    pub fn atom_hull(&self, set: VertexSet) -> VertexSet {
        self.union_of_atoms(self.atom_mask(set))
    }

    /// Whether `set` belongs to the accommodating family.
    pub fn is_member(&self, set: VertexSet) -> bool {
        set.is_subset(self.omega0()) && self.atom_hull(set) == set
    }

    /// All members of the family, ordered by atom mask.
    pub fn enumerate(&self, max_atoms: usize) -> Result<Vec<VertexSet>> {
        let n = self.atom_count();
        if n > max_atoms || n >= 64 {
            return Err(AnalysisError::AtomBudgetExceeded {
                atoms: n,
                limit: max_atoms,
            });
        }
        Ok((0..1u64 << n).map(|m| self.union_of_atoms(m)).collect())
    }

    /// Size of the family without enumerating it.
    pub fn family_size(&self) -> Option<u128> {
        (self.atom_count() < 128).then(|| 1u128 << self.atom_count())
    }

    /// Minimal nonempty sets: exactly the atoms.
    pub fn minimal_sets(&self) -> &[VertexSet] {
        &self.partition.atoms
    }

    pub fn is_weakly_left_resolving(&self) -> bool {
        self.wlr.is_none()
    }

    pub fn wlr_counterexample(&self) -> Option<WlrCounterexample> {
        self.wlr
    }

    pub fn star(&self) -> &StarReport {
        &self.star
    }

    pub fn crosscheck(&self) -> &CrossCheck {
        &self.crosscheck
    }

    /// Ranges are union-homomorphic, so disjoint atom pairs suffice.
    fn find_wlr_counterexample(&self) -> Option<WlrCounterexample> {
        let atoms = self.atoms();
        for a in self.graph.letters() {
            let images: Vec<VertexSet> = atoms.iter().map(|&b| self.graph.letter_range(b, a)).collect();
            for i in 0..atoms.len() {
                for j in i + 1..atoms.len() {
                    if images[i].intersects(images[j]) {
                        return Some(WlrCounterexample {
                            first: atoms[i],
                            second: atoms[j],
                            letter: a,
                        });
                    }
                }
            }
        }
        None
    }
}

/// Evaluates condition (*) on the space obtained by removing `core`:
/// every reachable range of a remaining atom must be a union of remaining atoms.
pub fn condition_star(space: &Space, core: VertexSet) -> StarReport {
    let g = space.graph();
    let mut violation = None;
    'atoms: for &b in space.atoms().iter().filter(|b| !b.intersects(core)) {
        let mut seen = HashSet::from([b]);
        let mut queue = VecDeque::from([b]);
        while let Some(x) = queue.pop_front() {
            for a in g.letters() {
                let y = g.letter_range(x, a) - core;
                if y.is_empty() || !seen.insert(y) {
                    continue;
                }
                if space.atom_hull(y) != y {
                    violation = Some((b, y));
                    break 'atoms;
                }
                queue.push_back(y);
            }
        }
    }
    StarReport {
        holds: violation.is_none(),
        contains_minimal: true,
        ranges_are_unions: violation.is_none(),
        violation,
    }
}

fn compare_with_atom_unions(space: &Space, family: &HashSet<VertexSet>) -> CrossCheck {
    let atom_union_size = 1usize << space.atom_count();
    let extra = family.iter().copied().filter(|&s| !space.is_member(s)).min();
    if extra.is_none() && family.len() == atom_union_size {
        CrossCheck::Agrees { size: atom_union_size }
    } else {
        CrossCheck::Differs {
            closure_size: family.len(),
            atom_union_size,
            extra,
        }
    }
}

/// Naive construction of the smallest accommodating family closed under
/// relative complements, straight from the definition. Shares no code with
/// the refinement above beyond the graph's edge list.
pub mod closure {
    use std::collections::HashSet;

    use crate::graph::{LabeledGraph, VertexSet};

    fn edge_range(g: &LabeledGraph, set: VertexSet, label: u16) -> VertexSet {
        g.edges()
            .iter()
            .filter(|e| e.label.0 == label && set.contains(e.src))
            .map(|e| e.dst)
            .collect()
    }

    /// All `r(α)` for realized words, found by exhausting range sets from `E⁰`.
    pub fn word_ranges(g: &LabeledGraph) -> HashSet<VertexSet> {
        let mut found = HashSet::new();
        let mut stack = vec![g.all_vertices()];
        let mut expanded = HashSet::new();
        while let Some(x) = stack.pop() {
            if !expanded.insert(x) {
                continue;
            }
            for l in 0..g.letter_count() as u16 {
                let y = edge_range(g, x, l);
                if !y.is_empty() {
                    found.insert(y);
                    stack.push(y);
                }
            }
        }
        found
    }

    /// Returns `None` when the family grows past `cap`.
    pub fn accommodating_closure(g: &LabeledGraph, cap: usize) -> Option<HashSet<VertexSet>> {
        let mut family: HashSet<VertexSet> = HashSet::from([VertexSet::EMPTY]);
        let mut members: Vec<VertexSet> = vec![VertexSet::EMPTY];
        let mut pending: Vec<VertexSet> = word_ranges(g).into_iter().collect();
        pending.sort();
        let mut cursor = 0;
        loop {
            for s in pending.drain(..) {
                if family.insert(s) {
                    members.push(s);
                }
            }
            if family.len() > cap {
                return None;
            }
            if cursor == members.len() {
                return Some(family);
            }
            let x = members[cursor];
            cursor += 1;
            for l in 0..g.letter_count() as u16 {
                pending.push(edge_range(g, x, l));
            }
            for &y in &members[..cursor] {
                pending.extend([x & y, x | y, x - y, y - x]);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{parse, Limits};

    fn space(text: &str) -> Space {
        Space::new(parse(text, Limits::default()).unwrap().graph, &Config::default()).unwrap()
    }

    fn set(g: &LabeledGraph, names: &[&str]) -> VertexSet {
        names.iter().map(|n| g.vertex_index(n).unwrap()).collect()
    }

    const F3: &str = "vertex u v\nedge u v : a\nedge v u : a\n";
    const F4: &str = "vertex v1 v2\nedge v1 v2 : a\nedge v2 v1 : a\nedge v1 v1 : b\n";
    const F5: &str = "vertex v1 v2\nedge v1 v1 : a\nedge v1 v2 : b\nedge v2 v2 : c\n";

    #[test]
    fn branch_two_cycle_atoms() {
        let s = space(F4);
        let g = s.graph();
        assert_eq!(s.atoms(), &[set(g, &["v1"]), set(g, &["v2"])]);
        assert_eq!(s.partition().stabilization_depth, 1);
        assert!(s.is_weakly_left_resolving());
        assert_eq!(s.enumerate(16).unwrap().len(), 4);
        assert!(s.star().holds);
        assert_eq!(s.crosscheck(), &CrossCheck::Agrees { size: 4 });
    }

    #[test]
    fn collapsing_two_cycle_is_one_atom() {
        let s = space(F3);
        let g = s.graph();
        assert_eq!(s.atoms(), &[set(g, &["u", "v"])]);
        assert_eq!(s.partition().stabilization_depth, 1);
        assert!(!s.is_member(set(g, &["u"])));
        assert_eq!(s.enumerate(16).unwrap(), vec![VertexSet::EMPTY, set(g, &["u", "v"])]);
    }

    #[test]
    fn single_loop_family() {
        let s = space("vertex v\nedge v v : a\n");
        assert_eq!(
            s.enumerate(16).unwrap(),
            vec![VertexSet::EMPTY, VertexSet::singleton(0)]
        );
        assert_eq!(s.minimal_sets(), &[VertexSet::singleton(0)]);
    }

    #[test]
    fn loop_to_loop_minimal_sets() {
        let s = space(F5);
        let g = s.graph();
        assert_eq!(s.minimal_sets(), &[set(g, &["v1"]), set(g, &["v2"])]);
        assert!(s.star().holds);
    }

    #[test]
    fn sources_drop_out_of_omega0() {
        // u and v only emit; w is the only vertex that receives an edge.
        let s = space("vertex u v w\nedge u w : a\nedge v w : a\nedge w w : b\n");
        assert_eq!(s.omega0(), VertexSet::singleton(2));
        assert_eq!(s.atoms(), &[VertexSet::singleton(2)]);
        assert!(s.is_weakly_left_resolving());
    }

    #[test]
    fn refinement_can_need_several_levels() {
        // x and y both receive a and d; only x receives ba, only y receives ca.
        let s = space(
            "vertex z w x y\nedge z z : b\nedge w w : c\nedge z x : a\nedge w y : a\n\
             edge x x : d\nedge y y : d\n",
        );
        let p = s.partition();
        assert_eq!(p.stabilization_depth, 2);
        assert_eq!(p.atoms.len(), 4);
        for w in p.per_level.windows(2) {
            for fine in &w[1] {
                assert!(w[0].iter().any(|c| fine.is_subset(*c)));
            }
        }
    }

    #[test]
    fn non_wlr_space_is_detected() {
        // x and y are separate atoms whose a-ranges both contain w.
        let s = space(
            "vertex z q x y w w2\n\
             edge z z : d\nedge z x : c\nedge z y : c\nedge q q : f\nedge q y : e\n\
             edge x w : a\nedge y w : a\nedge y w2 : a\nedge w w : g\nedge w2 w2 : g\n",
        );
        assert!(!s.is_weakly_left_resolving());
        let cx = s.wlr_counterexample().unwrap();
        assert!(!cx.first.intersects(cx.second));
        // the naive closure separates w from w2, the atom family does not
        assert!(matches!(s.crosscheck(), CrossCheck::Differs { .. }));
    }
}
