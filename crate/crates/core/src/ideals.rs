//! Hereditary saturated cores, their lattice, and quotient spaces.
//!
//! A hereditary saturated subset `H ⊆ ℰ` is stored as its core `U = ∪H`,
//! an atom-union that is range-closed and saturated; `H` is then the
//! down-set of `U`. All routines take a [`Dynamics`] view so that cores of a
//! quotient can be enumerated relative to the quotient itself.

use crate::config::Config;
use crate::dynamics::{
    self, condition_l_e, connects_to_loop, is_disagreeable, shortest_loop, AgreeableWitness, Connects, Disagreeability,
    Dynamics, ExitlessCycle, LoopWitness, SubsetAutomaton,
};
use crate::error::{AnalysisError, Result};
use crate::graph::{Letter, VertexSet};
use crate::space::{condition_star, Space, StarReport};

/// Atom hull of `set` within the view: every view atom meeting it.
fn hull(d: &Dynamics<'_>, set: VertexSet) -> VertexSet {
    d.atoms()
        .into_iter()
        .filter(|a| a.intersects(set))
        .fold(VertexSet::EMPTY, |acc, a| acc | a)
}

pub fn is_range_closed(d: &Dynamics<'_>, u: VertexSet) -> bool {
    d.graph().letters().all(|a| d.step(u, a).is_subset(u))
}

/// Every view atom outside `u` has a letter whose range leaves `u`.
pub fn is_saturated(d: &Dynamics<'_>, u: VertexSet) -> bool {
    d.atoms()
        .into_iter()
        .filter(|b| !b.is_subset(u))
        .all(|b| d.graph().letters().any(|a| !d.step(b, a).is_subset(u)))
}

pub fn is_core(d: &Dynamics<'_>, u: VertexSet) -> bool {
    u.is_subset(d.universe()) && hull(d, u) == u && is_range_closed(d, u) && is_saturated(d, u)
}

/// Smallest core containing `seed`. The seed is first widened to its atom hull.
pub fn saturate(d: &Dynamics<'_>, seed: VertexSet) -> VertexSet {
    let mut u = hull(d, seed & d.universe());
    loop {
        let before = u;
        loop {
            let grown = d.graph().letters().fold(u, |acc, a| acc | hull(d, d.step(u, a)));
            if grown == u {
                break;
            }
            u = grown;
        }
        for b in d.atoms() {
            if !b.is_subset(u) && d.graph().letters().all(|a| d.step(b, a).is_subset(u)) {
                u = u | b;
            }
        }
        if u == before {
            return u;
        }
    }
}

/// Cores ordered by atom mask value, with the covering relation.
#[derive(Clone, Debug)]
pub struct CoreLattice {
    pub cores: Vec<VertexSet>,
    /// `(lower, upper)` index pairs of covering relations.
    pub hasse: Vec<(usize, usize)>,
}

impl CoreLattice {
    pub fn len(&self) -> usize {
        self.cores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cores.is_empty()
    }

    /// Whether the only cores are `∅` and the whole view.
    pub fn is_trivial(&self) -> bool {
        self.cores.len() <= 2
    }

    /// All cores except the whole view.
    pub fn proper<'s>(&'s self, universe: VertexSet) -> impl Iterator<Item = VertexSet> + 's {
        self.cores.iter().copied().filter(move |&c| c != universe)
    }
}

pub fn enumerate_cores(d: &Dynamics<'_>, max_atoms: usize) -> Result<CoreLattice> {
    let atoms = d.atoms();
    if atoms.len() > max_atoms || atoms.len() >= 64 {
        return Err(AnalysisError::AtomBudgetExceeded {
            atoms: atoms.len(),
            limit: max_atoms,
        });
    }
    // Saturation failing outside U depends only on U, so filter on both
    // conditions directly.
    let cores: Vec<VertexSet> = (0..1u64 << atoms.len())
        .map(|mask| {
            atoms
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .fold(VertexSet::EMPTY, |acc, (_, a)| acc | *a)
        })
        .filter(|&u| is_range_closed(d, u) && is_saturated(d, u))
        .collect();
    let mut hasse = Vec::new();
    for (i, &lo) in cores.iter().enumerate() {
        for (j, &hi) in cores.iter().enumerate() {
            if lo.is_proper_subset(hi) && !cores.iter().any(|&m| lo.is_proper_subset(m) && m.is_proper_subset(hi)) {
                hasse.push((i, j));
            }
        }
    }
    Ok(CoreLattice { cores, hasse })
}

/// The quotient of a space by a core.
#[derive(Clone, Copy)]
pub struct QuotientSpace<'a> {
    view: Dynamics<'a>,
}

impl<'a> QuotientSpace<'a> {
    pub fn core(&self) -> VertexSet {
        self.view.core()
    }

    pub fn dynamics(&self) -> Dynamics<'a> {
        self.view
    }

    pub fn atoms(&self) -> Vec<VertexSet> {
        self.view.atoms()
    }

    pub fn alphabet(&self) -> Vec<Letter> {
        self.view.alphabet()
    }

    /// The core is everything: the quotient has no nonzero sets.
    pub fn is_zero(&self) -> bool {
        self.view.universe().is_empty()
    }

    /// Distinct quotient atoms have disjoint ranges under every letter.
    pub fn is_weakly_left_resolving(&self) -> bool {
        let atoms = self.atoms();
        self.view.graph().letters().all(|a| {
            atoms.iter().enumerate().all(|(i, &b)| {
                atoms[i + 1..]
                    .iter()
                    .all(|&c| !self.view.step(b, a).intersects(self.view.step(c, a)))
            })
        })
    }
}

/// Builds the quotient by `core` and re-verifies the identities that make
/// it well defined.
pub fn quotient(space: &Space, core: VertexSet) -> Result<QuotientSpace<'_>> {
    let fail = |detail: String| AnalysisError::WellDefinednessFailure {
        core: space.graph().format_set(core),
        detail,
    };
    let base = Dynamics::new(space);
    if !is_core(&base, core) {
        return Err(fail("not a range-closed saturated atom-union".into()));
    }
    let view = Dynamics::quotient(space, core);
    let g = space.graph();
    let atoms = space.atoms();
    // [A] is represented by A \ U; the Boolean identities are recomputed on
    // pairs of atom unions, and ranges must not depend on the representative.
    for (i, &a) in atoms.iter().enumerate() {
        for &b in &atoms[i..] {
            for (x, y) in [(a, b), (a | b, b), (a, a | b)] {
                if (x - core) | (y - core) != (x | y) - core
                    || (x - core) & (y - core) != (x & y) - core
                    || (x - core) - (y - core) != (x - y) - core
                {
                    return Err(fail(format!("Boolean identity fails on {:?}, {:?}", x, y)));
                }
                for l in g.letters() {
                    if g.letter_range(x, l) - core != g.letter_range(x - core, l) - core {
                        return Err(fail(format!(
                            "range of {:?} under {} depends on the representative",
                            x,
                            g.letter_name(l)
                        )));
                    }
                }
            }
        }
    }
    let q = QuotientSpace { view };
    for b in q.atoms() {
        if view.live_letters(b).is_empty() {
            return Err(fail(format!("quotient atom {:?} is a sink", b)));
        }
    }
    Ok(q)
}

/// Dynamics predicates re-run on a quotient.
#[derive(Clone, Debug)]
pub struct QuotientPredicates {
    pub core: VertexSet,
    pub atoms: Vec<VertexSet>,
    pub alphabet: Vec<Letter>,
    pub weakly_left_resolving: bool,
    pub disagreeable: Disagreeability,
    pub connects: Connects,
    pub star: StarReport,
    pub exitless: Option<ExitlessCycle>,
    /// Shortest loop at every quotient atom that carries one.
    pub loops: Vec<LoopWitness>,
    pub automaton_states: usize,
}

pub fn quotient_predicates(q: &QuotientSpace<'_>, config: &Config) -> Result<QuotientPredicates> {
    let d = q.dynamics();
    let aut = SubsetAutomaton::build(&d, config.max_states)?;
    let loops = q
        .atoms()
        .into_iter()
        .filter_map(|b| shortest_loop(&d, b).map(|w| dynamics::classify_loop(&d, b, &w)))
        .collect();
    Ok(QuotientPredicates {
        core: q.core(),
        atoms: q.atoms(),
        alphabet: q.alphabet(),
        weakly_left_resolving: q.is_weakly_left_resolving(),
        disagreeable: is_disagreeable(&d),
        connects: connects_to_loop(&d, aut.len(), config),
        star: condition_star(d.space(), q.core()),
        exitless: condition_l_e(&d),
        loops,
        automaton_states: aut.len(),
    })
}

#[derive(Clone, Debug)]
pub struct StrongDisagreeability {
    pub holds: bool,
    pub failing_core: Option<VertexSet>,
    pub witness: Option<AgreeableWitness>,
}

/// Every quotient by a proper core is disagreeable.
pub fn strongly_disagreeable(space: &Space, lattice: &CoreLattice) -> StrongDisagreeability {
    for core in lattice.proper(space.omega0()) {
        let d = Dynamics::quotient(space, core);
        let dis = is_disagreeable(&d);
        if !dis.disagreeable {
            return StrongDisagreeability {
                holds: false,
                failing_core: Some(core),
                witness: dis.witness,
            };
        }
    }
    StrongDisagreeability {
        holds: true,
        failing_core: None,
        witness: None,
    }
}
