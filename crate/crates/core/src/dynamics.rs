//! Path dynamics over the accommodating family: the subset automaton, loops
//! and exits, cycles, forced label chains, loop connection and strong
//! cofinality.
//!
//! Every routine works on a [`Dynamics`] view, which is either the space
//! itself or its quotient by a hereditary saturated core `U`. In a quotient,
//! sets are represented by their part outside `U` and the range of `X`
//! under `a` is `r(X, a) \ U`; letters whose range falls into `U` are dead.
//!
//! Several checks reduce to atoms. Under weak left-resolution every range of
//! an atom is a union of atoms, so an atom meeting a range lies inside it.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use crate::config::{Config, CoverMode};
use crate::error::{AnalysisError, Result};
use crate::graph::{LabeledGraph, Letter, VertexSet, Word};
use crate::space::Space;

/// The space, or its quotient by a core.
#[derive(Clone, Copy)]
pub struct Dynamics<'a> {
    space: &'a Space,
    core: VertexSet,
}

impl<'a> Dynamics<'a> {
    pub fn new(space: &'a Space) -> Self {
        Dynamics {
            space,
            core: VertexSet::EMPTY,
        }
    }

    pub fn quotient(space: &'a Space, core: VertexSet) -> Self {
        Dynamics { space, core }
    }

    pub fn space(&self) -> &'a Space {
        self.space
    }

    pub fn graph(&self) -> &'a LabeledGraph {
        self.space.graph()
    }

    pub fn core(&self) -> VertexSet {
        self.core
    }

    /// Vertices still visible in this view.
    pub fn universe(&self) -> VertexSet {
        self.space.omega0() - self.core
    }

    pub fn step(&self, x: VertexSet, a: Letter) -> VertexSet {
        self.graph().letter_range(x, a) - self.core
    }

    pub fn run(&self, x: VertexSet, w: &Word) -> VertexSet {
        w.letters().iter().fold(x, |acc, &a| self.step(acc, a))
    }

    /// Atoms outside the core.
    pub fn atoms(&self) -> Vec<VertexSet> {
        self.space
            .atoms()
            .iter()
            .copied()
            .filter(|a| !a.intersects(self.core))
            .collect()
    }

    /// Letters with a nonempty range from `x`, in alphabet order.
    pub fn live_letters(&self, x: VertexSet) -> Vec<(Letter, VertexSet)> {
        self.graph()
            .letters()
            .filter_map(|a| {
                let y = self.step(x, a);
                (!y.is_empty()).then_some((a, y))
            })
            .collect()
    }

    /// `{a : r(a) \ U ≠ ∅}`.
    pub fn alphabet(&self) -> Vec<Letter> {
        self.initial_frontier().into_iter().map(|(a, _)| a).collect()
    }

    /// `r(a) \ U` for every letter where it is nonempty.
    pub fn initial_frontier(&self) -> Vec<(Letter, VertexSet)> {
        let g = self.graph();
        g.letters()
            .filter_map(|a| {
                let y = g.range_of_letter(a) - self.core;
                (!y.is_empty()).then_some((a, y))
            })
            .collect()
    }

    /// Vertices reachable in one step with any label.
    pub fn step_any(&self, x: VertexSet) -> VertexSet {
        self.graph().successors(x) - self.core
    }

    /// Distinct sets `r(start, w)` over nonempty `w`, each with its
    /// shortlex-least word, in breadth-first order.
    pub fn reachable_states(&self, start: VertexSet) -> Vec<(VertexSet, Word)> {
        let mut out: Vec<(VertexSet, Word)> = Vec::new();
        let mut index: HashMap<VertexSet, usize> = HashMap::new();
        for (a, y) in self.live_letters(start) {
            if let std::collections::hash_map::Entry::Vacant(e) = index.entry(y) {
                e.insert(out.len());
                out.push((y, Word::single(a)));
            }
        }
        let mut i = 0;
        while i < out.len() {
            let (x, w) = out[i].clone();
            for (a, y) in self.live_letters(x) {
                if let std::collections::hash_map::Entry::Vacant(e) = index.entry(y) {
                    e.insert(out.len());
                    out.push((y, w.extended(a)));
                }
            }
            i += 1;
        }
        out
    }

    /// Whether some path of exactly `k` steps leaves `x` without dying.
    fn can_extend(&self, x: VertexSet, k: usize, memo: &mut HashMap<(VertexSet, usize), bool>) -> bool {
        if k == 0 {
            return !x.is_empty();
        }
        if let Some(&b) = memo.get(&(x, k)) {
            return b;
        }
        let ok = self
            .live_letters(x)
            .into_iter()
            .any(|(_, y)| self.can_extend(y, k - 1, memo));
        memo.insert((x, k), ok);
        ok
    }

    /// `ℒ(A E^k)`: all label words of length `k` with nonempty range from `a`.
    /// Returns `None` once more than `cap` words are found.
    pub fn labels_at(&self, a: VertexSet, k: usize, cap: usize) -> Option<BTreeSet<Word>> {
        fn go(
            d: &Dynamics<'_>,
            x: VertexSet,
            k: usize,
            prefix: &mut Vec<Letter>,
            out: &mut BTreeSet<Word>,
            cap: usize,
            memo: &mut HashMap<(VertexSet, usize), bool>,
        ) -> bool {
            if k == 0 {
                out.insert(Word::new(prefix.clone()).expect("k >= 1 at the root"));
                return out.len() <= cap;
            }
            for (a, y) in d.live_letters(x) {
                if !d.can_extend(y, k - 1, memo) {
                    continue;
                }
                prefix.push(a);
                let ok = go(d, y, k - 1, prefix, out, cap, memo);
                prefix.pop();
                if !ok {
                    return false;
                }
            }
            true
        }
        assert!(k >= 1);
        let mut out = BTreeSet::new();
        let mut memo = HashMap::new();
        go(self, a, k, &mut Vec::new(), &mut out, cap, &mut memo).then_some(out)
    }
}

/// Deterministic automaton on the reachable sets of a view.
#[derive(Clone, Debug)]
pub struct SubsetAutomaton {
    pub states: Vec<VertexSet>,
    /// `transitions[s][a]`: target state, `None` when the range is empty.
    pub transitions: Vec<Vec<Option<usize>>>,
    /// `(a, state of r(a))` for each live letter.
    pub initial_frontier: Vec<(Letter, usize)>,
    index: HashMap<VertexSet, usize>,
}

impl SubsetAutomaton {
    /// Explores from every `r(a)` and every atom of the view.
    pub fn build(d: &Dynamics<'_>, max_states: usize) -> Result<SubsetAutomaton> {
        let mut aut = SubsetAutomaton {
            states: Vec::new(),
            transitions: Vec::new(),
            initial_frontier: Vec::new(),
            index: HashMap::new(),
        };
        let add = |aut: &mut SubsetAutomaton, x: VertexSet| -> Result<usize> {
            if let Some(&i) = aut.index.get(&x) {
                return Ok(i);
            }
            if aut.states.len() >= max_states {
                return Err(AnalysisError::StateBudgetExceeded { limit: max_states });
            }
            aut.index.insert(x, aut.states.len());
            aut.states.push(x);
            Ok(aut.states.len() - 1)
        };
        for (a, y) in d.initial_frontier() {
            let i = add(&mut aut, y)?;
            aut.initial_frontier.push((a, i));
        }
        for b in d.atoms() {
            add(&mut aut, b)?;
        }
        let letters: Vec<Letter> = d.graph().letters().collect();
        let mut i = 0;
        while i < aut.states.len() {
            let x = aut.states[i];
            let mut row = Vec::with_capacity(letters.len());
            for &a in &letters {
                let y = d.step(x, a);
                row.push(if y.is_empty() { None } else { Some(add(&mut aut, y)?) });
            }
            aut.transitions.push(row);
            i += 1;
        }
        Ok(aut)
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state_of(&self, x: VertexSet) -> Option<usize> {
        self.index.get(&x).copied()
    }

    fn successors(&self, s: usize) -> impl Iterator<Item = (Letter, usize)> + '_ {
        self.transitions[s]
            .iter()
            .enumerate()
            .filter_map(|(a, t)| t.map(|t| (Letter(a as u16), t)))
    }
}

/// Word-combinatorial helpers.
pub mod words {
    use crate::graph::{Letter, Word};

    /// Shortest `δ` with `w = δ^k`.
    pub fn primitive_root(w: &Word) -> Word {
        let l = w.letters();
        let n = l.len();
        for p in 1..=n {
            if n.is_multiple_of(p) && (p..n).all(|i| l[i] == l[i - p]) {
                return Word::new(l[..p].to_vec()).expect("p >= 1");
            }
        }
        unreachable!("p = n always works")
    }

    /// The common primitive root of `α` and `β` when they commute, i.e. when
    /// both are powers of one word; `None` otherwise.
    pub fn word_common_root(alpha: &Word, beta: &Word) -> Option<Word> {
        let ab = alpha.concat(beta);
        let ba = beta.concat(alpha);
        (ab == ba).then(|| primitive_root(alpha))
    }

    /// Whether `w ∈ δ⁺`.
    pub fn is_power_of(w: &Word, delta: &Word) -> bool {
        let (l, d) = (w.letters(), delta.letters());
        l.len() % d.len() == 0 && l.iter().enumerate().all(|(i, c)| *c == d[i % d.len()])
    }

    pub fn letters_to_word(l: &[Letter]) -> Option<Word> {
        Word::new(l.to_vec())
    }
}

use words::primitive_root;

/// How a loop `(α, A)` has an exit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Exit {
    /// Another word of the same length with nonempty range from `A`.
    SameLength(Word),
    /// `A ⊊ r(A, α)`.
    Expanding,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LoopKind {
    Loop,
    /// `r(b, α) = b` for every atom `b ⊆ A`.
    Cycle,
}

#[derive(Clone, Debug)]
pub struct LoopWitness {
    pub base: VertexSet,
    pub word: Word,
    pub kind: LoopKind,
    pub exits: Vec<Exit>,
}

impl LoopWitness {
    pub fn has_exit(&self) -> bool {
        !self.exits.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct LoopSearch {
    /// Shortest loop first, then shortlex.
    pub loops: Vec<LoopWitness>,
    pub length_bound: usize,
    /// The listing stopped early (count or work budget), not at the bound.
    pub truncated: bool,
}

/// Shortlex-least nonempty `α` with `A ⊆ r(A, α)`.
pub fn shortest_loop(d: &Dynamics<'_>, a: VertexSet) -> Option<Word> {
    d.reachable_states(a)
        .into_iter()
        .find(|(x, _)| a.is_subset(*x))
        .map(|(_, w)| w)
}

/// Shortlex-least same-length alternative to `alpha` from `a`, if any.
pub fn same_length_exit(d: &Dynamics<'_>, a: VertexSet, alpha: &Word) -> Option<Word> {
    let mut memo = HashMap::new();
    let letters = alpha.letters();
    let n = letters.len();
    // Deviate at the earliest possible position with the smallest letter,
    // then continue with the shortlex-least live suffix.
    let mut x = a;
    for i in 0..n {
        let mut best: Option<Word> = None;
        for (c, y) in d.live_letters(x) {
            if c >= letters[i] {
                continue;
            }
            if let Some(tail) = least_live_suffix(d, y, n - i - 1, &mut memo) {
                let mut w = letters[..i].to_vec();
                w.push(c);
                w.extend(tail);
                best = Word::new(w);
                break;
            }
        }
        if best.is_some() {
            return best;
        }
        x = d.step(x, letters[i]);
        if x.is_empty() {
            break;
        }
    }
    // No smaller alternative; look for the least larger one, latest deviation first.
    let mut prefix_states = vec![a];
    for &l in letters {
        let last = *prefix_states.last().unwrap();
        prefix_states.push(d.step(last, l));
    }
    for i in (0..n).rev() {
        let x = prefix_states[i];
        if x.is_empty() {
            continue;
        }
        for (c, y) in d.live_letters(x) {
            if c <= letters[i] {
                continue;
            }
            if let Some(tail) = least_live_suffix(d, y, n - i - 1, &mut memo) {
                let mut w = letters[..i].to_vec();
                w.push(c);
                w.extend(tail);
                return Word::new(w);
            }
        }
    }
    None
}

fn least_live_suffix(
    d: &Dynamics<'_>,
    x: VertexSet,
    k: usize,
    memo: &mut HashMap<(VertexSet, usize), bool>,
) -> Option<Vec<Letter>> {
    if !d.can_extend(x, k, memo) {
        return None;
    }
    let mut out = Vec::with_capacity(k);
    let mut cur = x;
    for left in (0..k).rev() {
        let (a, y) = d
            .live_letters(cur)
            .into_iter()
            .find(|&(_, y)| d.can_extend(y, left, memo))
            .expect("can_extend guarantees a live continuation");
        out.push(a);
        cur = y;
    }
    Some(out)
}

/// Exits of the loop `(alpha, a)`; assumes `a ⊆ r(a, alpha)`.
pub fn loop_exits(d: &Dynamics<'_>, a: VertexSet, alpha: &Word) -> Vec<Exit> {
    let mut exits = Vec::new();
    if let Some(beta) = same_length_exit(d, a, alpha) {
        exits.push(Exit::SameLength(beta));
    }
    if a.is_proper_subset(d.run(a, alpha)) {
        exits.push(Exit::Expanding);
    }
    exits
}

pub fn classify_loop(d: &Dynamics<'_>, a: VertexSet, alpha: &Word) -> LoopWitness {
    let is_cycle = d
        .atoms()
        .into_iter()
        .filter(|b| b.is_subset(a))
        .all(|b| d.run(b, alpha) == b);
    LoopWitness {
        base: a,
        word: alpha.clone(),
        kind: if is_cycle { LoopKind::Cycle } else { LoopKind::Loop },
        exits: loop_exits(d, a, alpha),
    }
}

/// Lists loop words at `a` in shortlex order up to
/// `state_count × (|shortest| + 1) × multiplier`.
pub fn find_loops(d: &Dynamics<'_>, a: VertexSet, state_count: usize, config: &Config) -> LoopSearch {
    const WORD_BUDGET: usize = 20_000;
    let Some(shortest) = shortest_loop(d, a) else {
        return LoopSearch {
            loops: Vec::new(),
            length_bound: 0,
            truncated: false,
        };
    };
    let bound = state_count.max(1) * (shortest.len() + 1) * config.word_bound_multiplier.max(1);
    let mut loops = vec![classify_loop(d, a, &shortest)];
    let mut truncated = false;
    let mut queue: VecDeque<(VertexSet, Vec<Letter>)> = VecDeque::from([(a, Vec::new())]);
    let mut expanded = 0;
    'bfs: while let Some((x, w)) = queue.pop_front() {
        if w.len() >= bound {
            continue;
        }
        expanded += 1;
        if expanded > WORD_BUDGET {
            truncated = true;
            break;
        }
        for (c, y) in d.live_letters(x) {
            let mut w2 = w.clone();
            w2.push(c);
            if a.is_subset(y) {
                let word = Word::new(w2.clone()).expect("nonempty");
                if word != shortest {
                    if loops.len() >= config.max_loops.max(1) {
                        truncated = true;
                        break 'bfs;
                    }
                    loops.push(classify_loop(d, a, &word));
                }
            }
            queue.push_back((y, w2));
        }
    }
    LoopSearch {
        loops,
        length_bound: bound,
        truncated,
    }
}

/// Outcome of following the unique live letter from a start set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ChainEnd {
    /// At `index`, two or more letters have nonempty range.
    Branch { index: usize, letters: Vec<Letter> },
    /// `states[preperiod..]` repeats forever with the given period.
    Periodic { preperiod: usize, period: usize },
    /// The state at `index` has no live letter.
    Dies { index: usize },
}

#[derive(Clone, Debug)]
pub struct ForcedChain {
    pub start: VertexSet,
    pub states: Vec<VertexSet>,
    /// `letters[i]` leads from `states[i]` to `states[i + 1]` (wrapping into the period).
    pub letters: Vec<Letter>,
    pub end: ChainEnd,
}

impl ForcedChain {
    pub fn branches(&self) -> bool {
        matches!(self.end, ChainEnd::Branch { .. })
    }

    /// For an unbranched chain: the preperiod word and the period word of the
    /// forced label sequence.
    pub fn forced_word(&self) -> Option<(Vec<Letter>, Word)> {
        match self.end {
            ChainEnd::Periodic { preperiod, .. } => Some((
                self.letters[..preperiod].to_vec(),
                Word::new(self.letters[preperiod..].to_vec()).expect("period >= 1"),
            )),
            _ => None,
        }
    }

    /// Whether the forced label sequence is purely periodic.
    pub fn is_purely_periodic(&self) -> bool {
        match self.end {
            ChainEnd::Periodic { preperiod, period } => {
                (0..preperiod).all(|i| self.letters[i] == self.letter_at(i + period))
            }
            _ => false,
        }
    }

    /// `i`-th forced letter of an unbranched chain.
    pub fn letter_at(&self, i: usize) -> Letter {
        match self.end {
            ChainEnd::Periodic { preperiod, period } => {
                if i < self.letters.len() {
                    self.letters[i]
                } else {
                    self.letters[preperiod + (i - preperiod) % period]
                }
            }
            _ => self.letters[i],
        }
    }

    /// The chain returns to its start without branching.
    pub fn returns_to_start(&self) -> bool {
        matches!(self.end, ChainEnd::Periodic { preperiod: 0, .. })
    }
}

pub fn forced_chain(d: &Dynamics<'_>, start: VertexSet) -> ForcedChain {
    let mut states = Vec::new();
    let mut letters = Vec::new();
    let mut seen: HashMap<VertexSet, usize> = HashMap::new();
    let mut x = start;
    let end = loop {
        if let Some(&i) = seen.get(&x) {
            break ChainEnd::Periodic {
                preperiod: i,
                period: states.len() - i,
            };
        }
        seen.insert(x, states.len());
        states.push(x);
        let live = d.live_letters(x);
        match live.as_slice() {
            [] => {
                break ChainEnd::Dies {
                    index: states.len() - 1,
                }
            }
            [(a, y)] => {
                letters.push(*a);
                x = *y;
            }
            _ => {
                break ChainEnd::Branch {
                    index: states.len() - 1,
                    letters: live.iter().map(|(a, _)| *a).collect(),
                }
            }
        }
    };
    ForcedChain {
        start,
        states,
        letters,
        end,
    }
}

/// A set whose label words are exactly the prefixes of `β^∞`.
#[derive(Clone, Debug)]
pub struct AgreeableWitness {
    pub set: VertexSet,
    pub word: Word,
    /// Whether the base set is an atom.
    pub at_atom: bool,
    /// `ℒ(A E^{|β|n}) = {βⁿ}` re-checked by enumeration for `n ≤ 4`.
    pub verified: bool,
}

#[derive(Clone, Debug)]
pub struct Disagreeability {
    pub disagreeable: bool,
    pub chains: Vec<ForcedChain>,
    pub witness: Option<AgreeableWitness>,
}

/// The view is disagreeable iff no atom has an unbranched forced chain.
pub fn is_disagreeable(d: &Dynamics<'_>) -> Disagreeability {
    let chains: Vec<ForcedChain> = d.atoms().into_iter().map(|b| forced_chain(d, b)).collect();
    let periodic: Vec<&ForcedChain> = chains
        .iter()
        .filter(|c| matches!(c.end, ChainEnd::Periodic { .. }))
        .collect();
    let witness = periodic
        .iter()
        .find(|c| c.is_purely_periodic())
        .map(|c| {
            let period = match c.end {
                ChainEnd::Periodic { period, .. } => period,
                _ => unreachable!(),
            };
            let lead = Word::new((0..period).map(|i| c.letter_at(i)).collect()).expect("period >= 1");
            (c.start, primitive_root(&lead), true)
        })
        .or_else(|| {
            // Only reachable without weak left-resolution: anchor at the cycle entry.
            periodic.first().map(|c| {
                let (pre, per) = c.forced_word().expect("periodic");
                let _ = pre;
                let set = match c.end {
                    ChainEnd::Periodic { preperiod, .. } => c.states[preperiod],
                    _ => unreachable!(),
                };
                (set, primitive_root(&per), false)
            })
        })
        .map(|(set, word, at_atom)| {
            let verified = verify_agreeable(d, set, &word, 4);
            AgreeableWitness {
                set,
                word,
                at_atom,
                verified,
            }
        });
    Disagreeability {
        disagreeable: periodic.is_empty(),
        chains,
        witness,
    }
}

/// Checks `ℒ(A E^{|β|n}) = {βⁿ}` for `n = 1..=max_n` by enumeration.
pub fn verify_agreeable(d: &Dynamics<'_>, a: VertexSet, beta: &Word, max_n: usize) -> bool {
    (1..=max_n).all(|n| {
        d.labels_at(a, beta.len() * n, 1)
            .is_some_and(|ws| ws.len() == 1 && ws.contains(&beta.pow(n)))
    })
}

/// A cycle without exits at an atom: label word and atom.
#[derive(Clone, Debug)]
pub struct ExitlessCycle {
    pub word: Word,
    pub atom: VertexSet,
}

/// Condition (L_E): no cycle without exits. Checked at atoms via forced chains.
pub fn condition_l_e(d: &Dynamics<'_>) -> Option<ExitlessCycle> {
    d.atoms().into_iter().find_map(|b| {
        let chain = forced_chain(d, b);
        chain.returns_to_start().then(|| ExitlessCycle {
            word: Word::new(chain.letters.clone()).expect("period >= 1"),
            atom: b,
        })
    })
}

/// Any cycle `(α, b)` at an atom: `r(b, α) = b`.
pub fn find_cycle(d: &Dynamics<'_>) -> Option<(Word, VertexSet)> {
    d.atoms().into_iter().find_map(|b| {
        d.reachable_states(b)
            .into_iter()
            .find(|(x, _)| *x == b)
            .map(|(_, w)| (w, b))
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoverStage {
    SameLength,
    PrefixFree,
    Epsilon,
}

impl CoverStage {
    pub fn as_str(self) -> &'static str {
        match self {
            CoverStage::SameLength => "same-length",
            CoverStage::PrefixFree => "prefix-free",
            CoverStage::Epsilon => "epsilon",
        }
    }
}

#[derive(Clone, Debug)]
pub enum AtomConnection {
    Covered {
        atom: VertexSet,
        loop_base: VertexSet,
        loop_word: Word,
        cover: Vec<Word>,
        stage: CoverStage,
    },
    NotCovered {
        atom: VertexSet,
        /// No cover exists at any length, not merely within the bound.
        exhaustive: bool,
        bound: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Bounded {
    Holds,
    Fails,
    /// Not found within the search bound.
    FailsWithinBound,
}

impl Bounded {
    pub fn as_str(self) -> &'static str {
        match self {
            Bounded::Holds => "true",
            Bounded::Fails => "false",
            Bounded::FailsWithinBound => "false-within-bound",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Connects {
    pub status: Bounded,
    pub per_atom: Vec<AtomConnection>,
}

/// Every vertex connects to a loop: each atom `b` covers some loop base `A`
/// by ranges `r(b, δᵢ)` of a prefix-free word family.
///
/// Any loop base contains an atom carrying a loop, so loop atoms are the only
/// candidate bases needed.
pub fn connects_to_loop(d: &Dynamics<'_>, state_count: usize, config: &Config) -> Connects {
    let atoms = d.atoms();
    let loop_atoms: Vec<(VertexSet, Word)> = atoms
        .iter()
        .filter_map(|&c| shortest_loop(d, c).map(|w| (c, w)))
        .collect();
    let bound = state_count.max(1) * (atoms.len() + 1) * config.word_bound_multiplier.max(1);
    let mut per_atom = Vec::with_capacity(atoms.len());
    for &b in &atoms {
        let mut found = None;
        let mut exhaustive = false;
        if config.allow_epsilon_cover {
            if let Some((c, w)) = loop_atoms.iter().find(|(c, _)| c.is_subset(b)) {
                found = Some(AtomConnection::Covered {
                    atom: b,
                    loop_base: *c,
                    loop_word: w.clone(),
                    cover: Vec::new(),
                    stage: CoverStage::Epsilon,
                });
            }
        }
        if found.is_none() && config.cover_mode != CoverMode::PrefixFree {
            let (res, exh) = same_length_cover(d, b, &loop_atoms, bound);
            found = res;
            exhaustive = exh;
        }
        if found.is_none() && config.cover_mode != CoverMode::SameLength {
            let (res, exh) = prefix_free_cover(d, b, &loop_atoms, bound);
            found = res;
            exhaustive = exhaustive || exh;
        }
        per_atom.push(found.unwrap_or(AtomConnection::NotCovered {
            atom: b,
            exhaustive,
            bound,
        }));
    }
    let status = if per_atom.iter().all(|c| matches!(c, AtomConnection::Covered { .. })) {
        Bounded::Holds
    } else if per_atom
        .iter()
        .any(|c| matches!(c, AtomConnection::NotCovered { exhaustive: true, .. }))
    {
        Bounded::Fails
    } else {
        Bounded::FailsWithinBound
    };
    Connects { status, per_atom }
}

/// Looks for `k ≥ 1` such that some loop atom lies in `∪_{|δ|=k} r(b, δ)`.
/// The second value reports that the layer sequence became periodic without
/// success, so no cover exists at any length.
fn same_length_cover(
    d: &Dynamics<'_>,
    b: VertexSet,
    loop_atoms: &[(VertexSet, Word)],
    bound: usize,
) -> (Option<AtomConnection>, bool) {
    let mut layer: Vec<(VertexSet, Word)> = vec![];
    {
        let mut idx: HashMap<VertexSet, usize> = HashMap::new();
        for (a, y) in d.live_letters(b) {
            idx.entry(y).or_insert_with(|| {
                layer.push((y, Word::single(a)));
                layer.len() - 1
            });
        }
    }
    let mut seen_layers: HashSet<Vec<VertexSet>> = HashSet::new();
    for _k in 1..=bound {
        if layer.is_empty() {
            return (None, true);
        }
        let reach = layer.iter().fold(VertexSet::EMPTY, |acc, (x, _)| acc | *x);
        if let Some((c, w)) = loop_atoms.iter().find(|(c, _)| c.is_subset(reach)) {
            let cover: Vec<Word> = layer
                .iter()
                .filter(|(x, _)| x.intersects(*c))
                .map(|(_, w)| w.clone())
                .collect();
            return (
                Some(AtomConnection::Covered {
                    atom: b,
                    loop_base: *c,
                    loop_word: w.clone(),
                    cover,
                    stage: CoverStage::SameLength,
                }),
                false,
            );
        }
        let mut key: Vec<VertexSet> = layer.iter().map(|(x, _)| *x).collect();
        key.sort();
        if !seen_layers.insert(key) {
            return (None, true);
        }
        let mut next: Vec<(VertexSet, Word)> = Vec::new();
        let mut queued: HashSet<VertexSet> = HashSet::new();
        for (x, w) in &layer {
            for (a, y) in d.live_letters(*x) {
                if queued.insert(y) {
                    next.push((y, w.extended(a)));
                }
            }
        }
        layer = next;
    }
    (None, false)
}

#[derive(Clone, Debug)]
struct Achievable {
    union: VertexSet,
    family: Vec<Vec<Letter>>,
}

const ANTICHAIN_CAP: usize = 64;

/// Maximal unions `∪ r(x, δᵢ)` over prefix-free families with `|δᵢ| ≤ depth`.
/// The flag reports whether pruning to the cap lost candidates.
fn achievable(
    d: &Dynamics<'_>,
    x: VertexSet,
    depth: usize,
    memo: &mut HashMap<(VertexSet, usize), (Vec<Achievable>, bool)>,
) -> (Vec<Achievable>, bool) {
    if depth == 0 {
        return (Vec::new(), false);
    }
    if let Some(v) = memo.get(&(x, depth)) {
        return v.clone();
    }
    let mut acc: Vec<Achievable> = vec![Achievable {
        union: VertexSet::EMPTY,
        family: Vec::new(),
    }];
    let mut capped = false;
    for (a, y) in d.live_letters(x) {
        let mut options = vec![Achievable {
            union: y,
            family: vec![vec![a]],
        }];
        let (sub, c) = achievable(d, y, depth - 1, memo);
        capped |= c;
        for s in sub {
            options.push(Achievable {
                union: s.union,
                family: s
                    .family
                    .into_iter()
                    .map(|w| std::iter::once(a).chain(w).collect())
                    .collect(),
            });
        }
        let mut combined = acc.clone();
        for base in &acc {
            for o in &options {
                let mut family = base.family.clone();
                family.extend(o.family.iter().cloned());
                combined.push(Achievable {
                    union: base.union | o.union,
                    family,
                });
            }
        }
        let (pruned, c) = maximal(combined);
        capped |= c;
        acc = pruned;
    }
    acc.retain(|s| !s.union.is_empty());
    memo.insert((x, depth), (acc.clone(), capped));
    (acc, capped)
}

fn maximal(mut v: Vec<Achievable>) -> (Vec<Achievable>, bool) {
    v.sort_by(|p, q| {
        q.union
            .len()
            .cmp(&p.union.len())
            .then(p.family.len().cmp(&q.family.len()))
    });
    let mut out: Vec<Achievable> = Vec::new();
    for s in v {
        if !out.iter().any(|o| s.union.is_subset(o.union)) {
            out.push(s);
        }
    }
    let capped = out.len() > ANTICHAIN_CAP;
    out.truncate(ANTICHAIN_CAP);
    (out, capped)
}

fn prefix_free_cover(
    d: &Dynamics<'_>,
    b: VertexSet,
    loop_atoms: &[(VertexSet, Word)],
    bound: usize,
) -> (Option<AtomConnection>, bool) {
    // The search is exponential in the depth; deeper families only repeat
    // range sets already available at this depth.
    let depth = bound.min(16);
    let mut memo = HashMap::new();
    let (sets, capped) = achievable(d, b, depth, &mut memo);
    for s in &sets {
        if let Some((c, w)) = loop_atoms.iter().find(|(c, _)| c.is_subset(s.union)) {
            let mut cover: Vec<Word> = s
                .family
                .iter()
                .filter_map(|l| Word::new(l.clone()))
                .filter(|w| d.run(b, w).intersects(*c))
                .collect();
            cover.sort_by(|p, q| p.shortlex_cmp(q));
            return (
                Some(AtomConnection::Covered {
                    atom: b,
                    loop_base: *c,
                    loop_word: w.clone(),
                    cover,
                    stage: CoverStage::PrefixFree,
                }),
                false,
            );
        }
    }
    (None, !capped && loop_atoms.is_empty())
}

/// An infinite admissible label sequence `prefix · period^∞` whose ranges
/// never enter `Good(b)`.
#[derive(Clone, Debug)]
pub struct BadCycle {
    pub atom: VertexSet,
    pub good: VertexSet,
    pub prefix: Word,
    pub period: Word,
}

#[derive(Clone, Debug)]
pub struct Cofinality {
    pub strongly_cofinal: bool,
    pub witness: Option<BadCycle>,
}

/// Strong cofinality: for each atom `b`, every infinite run of the automaton
/// from the `r(a)` eventually lies inside `Good(b) = ∪_{|λ|≥1} r(b, λ)`.
pub fn strongly_cofinal(d: &Dynamics<'_>, aut: &SubsetAutomaton) -> Cofinality {
    for b in d.atoms() {
        let good = d
            .reachable_states(b)
            .iter()
            .fold(VertexSet::EMPTY, |acc, (x, _)| acc | *x);
        if let Some((prefix, period)) = bad_cycle(aut, good) {
            return Cofinality {
                strongly_cofinal: false,
                witness: Some(BadCycle {
                    atom: b,
                    good,
                    prefix,
                    period,
                }),
            };
        }
    }
    Cofinality {
        strongly_cofinal: true,
        witness: None,
    }
}

/// Reachable cycle within states not contained in `good`.
fn bad_cycle(aut: &SubsetAutomaton, good: VertexSet) -> Option<(Word, Word)> {
    let bad = |s: usize| !aut.states[s].is_subset(good);
    // Breadth-first over bad states from the initial frontier, remembering
    // the shortlex-least word reaching each.
    let mut word_to: HashMap<usize, Word> = HashMap::new();
    let mut order = Vec::new();
    for &(a, s) in &aut.initial_frontier {
        if bad(s) && !word_to.contains_key(&s) {
            word_to.insert(s, Word::single(a));
            order.push(s);
        }
    }
    let mut i = 0;
    while i < order.len() {
        let s = order[i];
        let w = word_to[&s].clone();
        for (a, t) in aut.successors(s) {
            if bad(t) && !word_to.contains_key(&t) {
                word_to.insert(t, w.extended(a));
                order.push(t);
            }
        }
        i += 1;
    }
    // First reachable bad state (in BFS order) lying on a bad cycle.
    for &s in &order {
        if let Some(period) = cycle_through(aut, s, &bad) {
            return Some((word_to[&s].clone(), period));
        }
    }
    None
}

fn cycle_through(aut: &SubsetAutomaton, s: usize, bad: &dyn Fn(usize) -> bool) -> Option<Word> {
    let mut parent: HashMap<usize, (usize, Letter)> = HashMap::new();
    let mut queue = VecDeque::from([s]);
    let mut visited = HashSet::from([s]);
    while let Some(x) = queue.pop_front() {
        for (a, t) in aut.successors(x) {
            if !bad(t) {
                continue;
            }
            if t == s {
                let mut letters = vec![a];
                let mut cur = x;
                while cur != s {
                    let (p, l) = parent[&cur];
                    letters.push(l);
                    cur = p;
                }
                letters.reverse();
                return Word::new(letters);
            }
            if visited.insert(t) {
                parent.insert(t, (x, a));
                queue.push_back(t);
            }
        }
    }
    None
}

#[derive(Clone, Debug)]
pub struct NonpowerLoops {
    pub shortest: Word,
    /// A loop word that is not a power of the shortest loop's root.
    pub other: Option<Word>,
    /// The search explored the whole product automaton.
    pub exhaustive: bool,
}

/// Two loops at `a` neither of which is a power of the other's root.
///
/// Searches the product of the automaton from `a` with the cyclic acceptor
/// of `δ⁺`, `δ` the root of the shortest loop; the product is finite, so a
/// negative answer is definitive.
pub fn two_nonpower_loops(d: &Dynamics<'_>, a: VertexSet) -> Option<NonpowerLoops> {
    let shortest = shortest_loop(d, a)?;
    let root = primitive_root(&shortest);
    let rl = root.letters().to_vec();
    // phase Some(p): the word so far is δ^k δ[..p]; None: it left δ^∞.
    type Node = (VertexSet, Option<usize>);
    let start: Node = (a, Some(0));
    let mut parent: HashMap<Node, (Node, Letter)> = HashMap::new();
    let mut visited: HashSet<Node> = HashSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some(node @ (x, phase)) = queue.pop_front() {
        for (c, y) in d.live_letters(x) {
            let next_phase = match phase {
                Some(p) if rl[p] == c => Some((p + 1) % rl.len()),
                _ => None,
            };
            if a.is_subset(y) && next_phase != Some(0) {
                let mut letters = vec![c];
                let mut cur = node;
                while cur != start {
                    let (p, l) = parent[&cur];
                    letters.push(l);
                    cur = p;
                }
                letters.reverse();
                return Some(NonpowerLoops {
                    shortest,
                    other: Word::new(letters),
                    exhaustive: true,
                });
            }
            let next = (y, next_phase);
            if visited.insert(next) {
                parent.insert(next, (node, c));
                queue.push_back(next);
            }
        }
    }
    Some(NonpowerLoops {
        shortest,
        other: None,
        exhaustive: true,
    })
}

#[cfg(test)]
mod tests {
    use super::words::*;
    use super::*;
    use crate::graph::{parse, Limits};

    fn space(text: &str) -> Space {
        Space::new(parse(text, Limits::default()).unwrap().graph, &Config::default()).unwrap()
    }

    fn w(g: &LabeledGraph, s: &str) -> Word {
        Word::new(s.chars().map(|c| g.letter_by_name(&c.to_string()).unwrap()).collect()).unwrap()
    }

    fn set(g: &LabeledGraph, names: &[&str]) -> VertexSet {
        names.iter().map(|n| g.vertex_index(n).unwrap()).collect()
    }

    const F1: &str = "vertex v\nedge v v : a\n";
    const F2: &str = "vertex v\nedge v v : a\nedge v v : b\n";
    const F3: &str = "vertex u v\nedge u v : a\nedge v u : a\n";
    const F4: &str = "vertex v1 v2\nedge v1 v2 : a\nedge v2 v1 : a\nedge v1 v1 : b\n";
    const F5: &str = "vertex v1 v2\nedge v1 v1 : a\nedge v1 v2 : b\nedge v2 v2 : c\n";

    #[test]
    fn common_root_examples() {
        let ab = Word::new(vec![Letter(0), Letter(1)]).unwrap();
        let ba = Word::new(vec![Letter(1), Letter(0)]).unwrap();
        assert_eq!(word_common_root(&ab, &ab.pow(2)), Some(ab.clone()));
        assert_eq!(word_common_root(&ab, &ba), None);
        let a = Word::single(Letter(0));
        assert_eq!(word_common_root(&a, &a), Some(a.clone()));
        assert_eq!(primitive_root(&ab.pow(3)), ab);
    }

    #[test]
    fn common_root_matches_power_equation() {
        // α^m = β^n for some small m, n  ⟺  a common root exists.
        let all: Vec<Word> = (1..=4)
            .flat_map(|len| {
                (0..1u32 << len)
                    .map(move |bits| Word::new((0..len).map(|i| Letter((bits >> i & 1) as u16)).collect()).unwrap())
            })
            .collect();
        for x in &all {
            for y in &all {
                let powers_meet = (1..=4).any(|m| (1..=4).any(|n| x.pow(m) == y.pow(n)));
                assert_eq!(powers_meet, word_common_root(x, y).is_some(), "{x:?} {y:?}");
            }
        }
    }

    #[test]
    fn single_loop_is_exitless_cycle() {
        let s = space(F1);
        let d = Dynamics::new(&s);
        let aut = SubsetAutomaton::build(&d, 1000).unwrap();
        let v = VertexSet::singleton(0);
        let ls = find_loops(&d, v, aut.len(), &Config::default());
        assert_eq!(ls.loops[0].word, w(s.graph(), "a"));
        assert_eq!(ls.loops[0].kind, LoopKind::Cycle);
        assert!(ls.loops.iter().all(|l| !l.has_exit()));
        let le = condition_l_e(&d).unwrap();
        assert_eq!((le.word, le.atom), (w(s.graph(), "a"), v));
        let dis = is_disagreeable(&d);
        assert!(!dis.disagreeable);
        let wit = dis.witness.unwrap();
        assert_eq!((wit.set, wit.word.clone()), (v, w(s.graph(), "a")));
        assert!(wit.verified);
        let np = two_nonpower_loops(&d, v).unwrap();
        assert!(np.other.is_none() && np.exhaustive);
    }

    #[test]
    fn two_loops_have_mutual_exits() {
        let s = space(F2);
        let g = s.graph();
        let d = Dynamics::new(&s);
        let v = VertexSet::singleton(0);
        let ls = find_loops(&d, v, 1, &Config::default());
        assert_eq!(ls.loops[0].word, w(g, "a"));
        assert_eq!(ls.loops[0].exits, vec![Exit::SameLength(w(g, "b"))]);
        assert_eq!(ls.loops[1].word, w(g, "b"));
        assert_eq!(ls.loops[1].exits, vec![Exit::SameLength(w(g, "a"))]);
        assert!(condition_l_e(&d).is_none());
        assert!(is_disagreeable(&d).disagreeable);
        let np = two_nonpower_loops(&d, v).unwrap();
        assert_eq!((np.shortest, np.other), (w(g, "a"), Some(w(g, "b"))));
    }

    #[test]
    fn branch_two_cycle_loops() {
        let s = space(F4);
        let g = s.graph();
        let d = Dynamics::new(&s);
        let v2 = set(g, &["v2"]);
        let ls = find_loops(&d, v2, 3, &Config::default());
        assert_eq!(ls.loops[0].word, w(g, "aa"));
        assert_eq!(ls.loops[0].exits[0], Exit::SameLength(w(g, "ab")));
        assert_eq!(d.run(v2, &w(g, "ab")), set(g, &["v1"]));
        let np = two_nonpower_loops(&d, set(g, &["v1"])).unwrap();
        assert_eq!((np.shortest, np.other), (w(g, "b"), Some(w(g, "aa"))));
        let dis = is_disagreeable(&d);
        assert!(dis.disagreeable);
        assert_eq!(
            dis.chains[0].end,
            ChainEnd::Branch {
                index: 0,
                letters: vec![Letter(0), Letter(1)]
            }
        );
        assert!(matches!(dis.chains[1].end, ChainEnd::Branch { index: 1, .. }));
    }

    #[test]
    fn collapsing_two_cycle_forced_chain() {
        let s = space(F3);
        let d = Dynamics::new(&s);
        let uv = VertexSet::first(2);
        let le = condition_l_e(&d).unwrap();
        assert_eq!((le.word.len(), le.atom), (1, uv));
        let wit = is_disagreeable(&d).witness.unwrap();
        assert_eq!(wit.set, uv);
        assert_eq!(wit.word, Word::single(Letter(0)));
    }

    #[test]
    fn connects_examples() {
        for (text, atom, base, cover) in [
            (F2, &["v"][..], &["v"][..], "a"),
            (F4, &["v2"][..], &["v1"][..], "a"),
            (F5, &["v2"][..], &["v2"][..], "c"),
        ] {
            let s = space(text);
            let g = s.graph();
            let d = Dynamics::new(&s);
            let aut = SubsetAutomaton::build(&d, 1000).unwrap();
            let c = connects_to_loop(&d, aut.len(), &Config::default());
            assert_eq!(c.status, Bounded::Holds);
            let hit = c.per_atom.iter().find_map(|e| match e {
                AtomConnection::Covered {
                    atom: a,
                    loop_base,
                    cover,
                    stage,
                    ..
                } if *a == set(g, atom) => Some((*loop_base, cover.clone(), *stage)),
                _ => None,
            });
            let (lb, cv, st) = hit.expect("atom covered");
            assert_eq!(st, CoverStage::SameLength);
            assert_eq!(cv, vec![w(g, cover)]);
            assert!(lb.is_subset(d.run(set(g, atom), &w(g, cover))));
            assert_eq!(lb, set(g, base));
        }
    }

    #[test]
    fn cofinality_examples() {
        for (text, expected) in [(F2, true), (F4, true), (F5, false)] {
            let s = space(text);
            let d = Dynamics::new(&s);
            let aut = SubsetAutomaton::build(&d, 1000).unwrap();
            let c = strongly_cofinal(&d, &aut);
            assert_eq!(c.strongly_cofinal, expected, "{text}");
            if let Some(bad) = c.witness {
                let g = s.graph();
                assert_eq!(bad.atom, set(g, &["v2"]));
                assert_eq!(bad.good, set(g, &["v2"]));
                assert_eq!(bad.prefix, w(g, "a"));
                assert_eq!(bad.period, w(g, "a"));
            }
        }
    }

    #[test]
    fn loop_to_loop_not_disagreeable_at_sink_loop() {
        let s = space(F5);
        let g = s.graph();
        let d = Dynamics::new(&s);
        let dis = is_disagreeable(&d);
        assert!(!dis.disagreeable);
        let wit = dis.witness.unwrap();
        assert_eq!((wit.set, wit.word), (set(g, &["v2"]), w(g, "c")));
        // quotient by {v2}: v1 is forced along a
        let q = Dynamics::quotient(&s, set(g, &["v2"]));
        assert_eq!(q.alphabet(), vec![g.letter_by_name("a").unwrap()]);
        let qd = is_disagreeable(&q);
        assert!(!qd.disagreeable);
        assert_eq!(qd.witness.unwrap().word, w(g, "a"));
    }

    #[test]
    fn labels_at_enumerates() {
        let s = space(F4);
        let g = s.graph();
        let d = Dynamics::new(&s);
        let l = d.labels_at(set(g, &["v2"]), 2, 100).unwrap();
        assert_eq!(l.into_iter().collect::<Vec<_>>(), vec![w(g, "aa"), w(g, "ab")]);
        assert!(d.labels_at(set(g, &["v1"]), 6, 3).is_none());
    }
}
