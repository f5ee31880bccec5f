//! Runs every stage on one graph and collects the results.

use crate::config::Config;
use crate::dynamics::{
    condition_l_e, connects_to_loop, find_cycle, find_loops, is_disagreeable, strongly_cofinal, two_nonpower_loops,
    Cofinality, Connects, Disagreeability, Dynamics, ExitlessCycle, LoopSearch, NonpowerLoops, SubsetAutomaton,
};
use crate::error::Result;
use crate::graph::{LabeledGraph, VertexSet, Word};
use crate::ideals::{
    enumerate_cores, quotient, quotient_predicates, strongly_disagreeable, CoreLattice, QuotientPredicates,
    StrongDisagreeability,
};
use crate::space::Space;
use crate::verdict::{decide, Question, Verdict};

pub struct Analysis {
    pub space: Space,
    pub config: Config,
    pub automaton: SubsetAutomaton,
    pub disagreeable: Disagreeability,
    /// An exit-less cycle at an atom, i.e. a failure of (L_E).
    pub exitless: Option<ExitlessCycle>,
    /// Loop listings at every atom carrying a loop.
    pub loops: Vec<LoopSearch>,
    pub connects: Connects,
    pub cofinality: Cofinality,
    pub cycle: Option<(Word, VertexSet)>,
    /// Two-loop search at every atom carrying a loop.
    pub nonpower: Vec<(VertexSet, NonpowerLoops)>,
    pub lattice: CoreLattice,
    /// Predicates of the quotient by each proper core, `∅` first.
    pub quotients: Vec<QuotientPredicates>,
    pub strong: StrongDisagreeability,
    pub verdicts: Vec<Verdict>,
    pub notes: Vec<String>,
    /// Broken internal consistency checks; empty on a correct build.
    pub violations: Vec<String>,
}

impl Analysis {
    pub fn verdict(&self, q: Question) -> &Verdict {
        self.verdicts
            .iter()
            .find(|v| v.question == q)
            .expect("every question is decided")
    }
}

pub fn analyze(graph: LabeledGraph, config: &Config) -> Result<Analysis> {
    let space = Space::new(graph, config)?;
    let d = Dynamics::new(&space);
    let automaton = SubsetAutomaton::build(&d, config.max_states)?;
    let lattice = enumerate_cores(&d, config.max_atoms)?;
    let disagreeable = is_disagreeable(&d);
    let exitless = condition_l_e(&d);
    let mut loops = Vec::new();
    let mut nonpower = Vec::new();
    for &b in space.atoms() {
        let ls = find_loops(&d, b, automaton.len(), config);
        if !ls.loops.is_empty() {
            loops.push(ls);
            if let Some(np) = two_nonpower_loops(&d, b) {
                nonpower.push((b, np));
            }
        }
    }
    let connects = connects_to_loop(&d, automaton.len(), config);
    let cofinality = strongly_cofinal(&d, &automaton);
    let cycle = find_cycle(&d);
    let mut quotients = Vec::new();
    for core in lattice.proper(space.omega0()) {
        let q = quotient(&space, core)?;
        quotients.push(quotient_predicates(&q, config)?);
    }
    let strong = strongly_disagreeable(&space, &lattice);
    let mut a = Analysis {
        space,
        config: config.clone(),
        automaton,
        disagreeable,
        exitless,
        loops,
        connects,
        cofinality,
        cycle,
        nonpower,
        lattice,
        quotients,
        strong,
        verdicts: Vec::new(),
        notes: Vec::new(),
        violations: Vec::new(),
    };
    let decisions = decide(&a);
    a.verdicts = decisions.verdicts;
    a.notes = decisions.notes;
    a.violations = decisions.violations;
    a.violations.extend(consistency_violations(&a));
    Ok(a)
}

/// Implications between predicates that must hold on every weakly
/// left-resolving input.
pub fn consistency_violations(a: &Analysis) -> Vec<String> {
    let mut out = Vec::new();
    if !a.space.is_weakly_left_resolving() {
        return out;
    }
    if a.disagreeable.disagreeable {
        for ls in &a.loops {
            for l in &ls.loops {
                if !l.has_exit() {
                    out.push(format!("disagreeable but loop at {:?} has no exit", l.base));
                }
            }
        }
        if a.exitless.is_some() {
            out.push("disagreeable but (L_E) fails".into());
        }
    }
    if let Some(w) = &a.disagreeable.witness {
        if !w.verified {
            out.push("agreeable witness does not re-verify".into());
        }
    }
    for q in &a.quotients {
        if !q.weakly_left_resolving {
            out.push(format!("quotient by {:?} is not weakly left-resolving", q.core));
        }
    }
    out
}
