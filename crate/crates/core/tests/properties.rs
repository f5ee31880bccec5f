mod common;

use std::collections::{BTreeSet, HashSet};

use labelana::analysis::analyze;
use labelana::config::Config;
use labelana::dynamics::{find_loops, forced_chain, ChainEnd, Dynamics, Exit, LoopKind, SubsetAutomaton};
use labelana::graph::{parse, Letter, Limits, VertexSet, Word};
use labelana::ideals::{enumerate_cores, is_core, quotient, saturate};
use labelana::oracle::oracle;
use labelana::report::{analysis_json, render_json};
use labelana::space::Space;
use proptest::prelude::*;

use common::{arb_graph, brute_agreeable, brute_exitless_cycle, exact_agreeable_bounds, exact_cycle_bound, Raw};

fn space(g: &labelana::LabeledGraph) -> Space {
    Space::new(g.clone(), &Config::default()).unwrap()
}

fn word(w: &[usize]) -> Word {
    Word::new(w.iter().map(|&l| Letter(l as u16)).collect()).unwrap()
}

fn idx(w: &Word) -> Vec<usize> {
    w.letters().iter().map(|l| l.index()).collect()
}

fn bits(s: &[VertexSet]) -> BTreeSet<u64> {
    s.iter().map(|v| v.bits()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn letter_range_is_a_union_homomorphism(g in arb_graph(6, 8, 3), a in any::<u64>(), b in any::<u64>()) {
        let mask = g.all_vertices();
        let (a, b) = (VertexSet::from_bits(a) & mask, VertexSet::from_bits(b) & mask);
        for l in g.letters() {
            prop_assert_eq!(g.letter_range(a | b, l), g.letter_range(a, l) | g.letter_range(b, l));
            prop_assert!(g.letter_range(a & b, l).is_subset(g.letter_range(a, l)));
        }
    }

    #[test]
    fn word_range_matches_edge_paths(g in arb_graph(5, 6, 2), a in any::<u64>()) {
        let raw = Raw::of(&g);
        let a = a & raw.all();
        for (w, _) in raw.words_upto(6) {
            // Endpoints of every edge path from `a` spelling `w`.
            let mut ends = a;
            for &l in &w {
                let mut next = 0u64;
                for &(s, d, el) in &raw.edges {
                    if el == l && ends >> s & 1 == 1 {
                        next |= 1 << d;
                    }
                }
                ends = next;
            }
            prop_assert_eq!(g.word_range(VertexSet::from_bits(a), &word(&w)).bits(), ends);
        }
    }

    #[test]
    fn refinement_levels_match_word_sets(g in arb_graph(6, 8, 3)) {
        let raw = Raw::of(&g);
        let s = space(&g);
        let p = s.partition();
        prop_assert_eq!(p.per_level.len(), p.stabilization_depth);
        for (i, level) in p.per_level.iter().enumerate() {
            let brute: BTreeSet<u64> = raw.level_partition(i + 1).into_iter().collect();
            prop_assert_eq!(bits(level), brute, "level {}", i + 1);
        }
        // Stable well past the reported depth.
        let atoms = bits(&p.atoms);
        for extra in 1..=3 {
            let brute: BTreeSet<u64> = raw.level_partition(p.stabilization_depth + extra).into_iter().collect();
            prop_assert_eq!(&brute, &atoms);
        }
        prop_assert!(p.stabilization_depth <= (raw.omega0().count_ones() as usize).max(1));
    }

    #[test]
    fn closure_equals_atom_unions_when_wlr(g in arb_graph(6, 8, 3)) {
        let raw = Raw::of(&g);
        let s = space(&g);
        let fam = raw.closure(1 << 12).expect("small graph");
        let unions: HashSet<u64> = s.enumerate(64).unwrap().into_iter().map(|v| v.bits()).collect();
        prop_assert_eq!(raw.wlr(&unions), s.is_weakly_left_resolving());
        if s.is_weakly_left_resolving() {
            prop_assert_eq!(fam, unions);
        } else {
            prop_assert!(unions.is_subset(&fam));
        }
    }

    #[test]
    fn realized_ranges_are_members(g in arb_graph(6, 8, 3)) {
        let raw = Raw::of(&g);
        let s = space(&g);
        for (w, r) in raw.words_upto(6) {
            prop_assert!(s.is_member(VertexSet::from_bits(r)), "r({:?}) = {:#b}", w, r);
        }
        for &b in s.atoms() {
            for l in g.letters() {
                prop_assert!(!s.is_weakly_left_resolving() || s.is_member(g.letter_range(b, l)));
            }
        }
    }

    #[test]
    fn minimal_sets_are_the_minimal_members(g in arb_graph(6, 8, 3)) {
        let s = space(&g);
        let fam: Vec<VertexSet> = s.enumerate(64).unwrap().into_iter().filter(|v| !v.is_empty()).collect();
        let minimal: BTreeSet<u64> = fam
            .iter()
            .filter(|a| !fam.iter().any(|b| b.is_proper_subset(**a)))
            .map(|a| a.bits())
            .collect();
        prop_assert_eq!(bits(s.minimal_sets()), minimal);
    }

    #[test]
    fn forced_chains_follow_the_view(g in arb_graph(6, 8, 3)) {
        let s = space(&g);
        let raw = Raw::of(&g);
        let d = Dynamics::new(&s);
        for &b in s.atoms() {
            let c = forced_chain(&d, b);
            prop_assert_eq!(c.states.clone(), forced_chain(&d, b).states);
            let distinct: HashSet<VertexSet> = c.states.iter().copied().collect();
            prop_assert_eq!(distinct.len(), c.states.len());
            prop_assert!(c.states.len() <= (1usize << raw.n) + 1);
            for (i, &a) in c.letters.iter().enumerate() {
                let next = c.states.get(i + 1).copied().unwrap_or_else(|| match c.end {
                    ChainEnd::Periodic { preperiod, .. } => c.states[preperiod],
                    _ => unreachable!(),
                });
                prop_assert_eq!(d.step(c.states[i], a), next);
            }
            if let ChainEnd::Periodic { preperiod, period } = c.end {
                prop_assert_eq!(preperiod + period, c.states.len());
                let m = c.states.len() * 2;
                let forced = raw.forced_word(b.bits(), m).expect("unbranched chain forces every letter");
                for (i, &l) in forced.iter().enumerate() {
                    prop_assert_eq!(c.letter_at(i).index(), l);
                }
            } else {
                prop_assert!(raw.forced_word(b.bits(), c.states.len()).is_none());
            }
        }
    }

    #[test]
    fn loop_witnesses_recompute(g in arb_graph(5, 6, 3)) {
        let s = space(&g);
        let raw = Raw::of(&g);
        let d = Dynamics::new(&s);
        let aut = SubsetAutomaton::build(&d, 1 << 16).unwrap();
        let fam: HashSet<u64> = s.enumerate(64).unwrap().into_iter().map(|v| v.bits()).collect();
        for &b in s.atoms() {
            for l in find_loops(&d, b, aut.len(), &Config::default()).loops {
                let a = l.base.bits();
                let w = idx(&l.word);
                prop_assert_eq!(a & !raw.range(a, &w), 0, "not a loop");
                let several = raw.forced_word(a, w.len()).is_none();
                let expands = raw.range(a, &w) != a;
                prop_assert_eq!(l.has_exit(), several || expands);
                for e in &l.exits {
                    match e {
                        Exit::SameLength(beta) => {
                            prop_assert!(beta.len() == w.len() && idx(beta) != w);
                            prop_assert!(raw.range(a, &idx(beta)) != 0);
                        }
                        Exit::Expanding => prop_assert!(expands),
                    }
                }
                if l.kind == LoopKind::Cycle {
                    prop_assert!(fam.iter().all(|&x| x == 0 || x & !a != 0 || raw.range(x, &w) == x));
                }
            }
        }
    }

    #[test]
    fn disagreeability_matches_enumeration(g in arb_graph(5, 6, 3)) {
        let s = space(&g);
        prop_assume!(s.is_weakly_left_resolving());
        let a = analyze(g.clone(), &Config::default()).unwrap();
        let raw = Raw::of(&g);
        let fam: HashSet<u64> = s.enumerate(64).unwrap().into_iter().map(|v| v.bits()).collect();
        let (mb, mn) = exact_agreeable_bounds(&raw);
        let agreeable = brute_agreeable(&raw, &fam, mb, mn);
        prop_assert_eq!(a.disagreeable.disagreeable, agreeable.is_none(), "{:?}", agreeable);
        if let Some(w) = &a.disagreeable.witness {
            prop_assert!(w.verified && w.at_atom);
        }
        let exitless = brute_exitless_cycle(&raw, &fam, exact_cycle_bound(&raw));
        prop_assert_eq!(a.exitless.is_none(), exitless.is_none(), "{:?}", exitless);
        if a.disagreeable.disagreeable {
            prop_assert!(a.exitless.is_none());
            prop_assert!(a.loops.iter().flat_map(|ls| &ls.loops).all(|l| l.has_exit()));
        }
        prop_assert!(a.violations.is_empty(), "{:?}", a.violations);
    }

    #[test]
    fn cores_form_a_lattice_closed_under_saturation(g in arb_graph(6, 8, 3)) {
        let s = space(&g);
        let d = Dynamics::new(&s);
        let lattice = enumerate_cores(&d, 16).unwrap();
        let cores: HashSet<VertexSet> = lattice.cores.iter().copied().collect();
        prop_assert!(cores.contains(&VertexSet::EMPTY) && cores.contains(&s.omega0()));
        for &u in &lattice.cores {
            prop_assert!(is_core(&d, u));
            for &v in &lattice.cores {
                // Meets are intersections.
                prop_assert!(cores.contains(&(u & v)));
            }
            for l in g.letters() {
                prop_assert!(g.letter_range(u, l).is_subset(u));
            }
        }
        // Every core is the saturation of some union of atoms and nothing else is.
        for m in 0..1u64 << s.atom_count() {
            let seed = s.union_of_atoms(m);
            let t = saturate(&d, seed);
            prop_assert!(seed.is_subset(t) && cores.contains(&t));
            prop_assert_eq!(saturate(&d, t), t);
            prop_assert_eq!(cores.contains(&seed), t == seed);
            for &c in &lattice.cores {
                if seed.is_subset(c) {
                    prop_assert!(t.is_subset(c), "saturation is the least core above the seed");
                }
            }
        }
    }

    #[test]
    fn quotients_are_well_defined(g in arb_graph(6, 8, 3)) {
        let s = space(&g);
        let raw = Raw::of(&g);
        let d = Dynamics::new(&s);
        let lattice = enumerate_cores(&d, 16).unwrap();
        let fam: Vec<u64> = s.enumerate(64).unwrap().into_iter().map(|v| v.bits()).collect();
        for u in lattice.proper(s.omega0()).collect::<Vec<_>>() {
            let q = quotient(&s, u).unwrap();
            let qd = q.dynamics();
            for x in q.atoms() {
                prop_assert!(!qd.live_letters(x).is_empty(), "quotient sink at {:?}", x);
            }
            // Classes modulo the core map to classes.
            for &a in &fam {
                for &b in &fam {
                    if a & !u.bits() == b & !u.bits() {
                        for l in 0..raw.letters {
                            prop_assert_eq!(raw.step(a, l) & !u.bits(), raw.step(b, l) & !u.bits());
                        }
                    }
                }
            }
            // Cores of the quotient are the cores above `u`.
            let rel: BTreeSet<u64> = enumerate_cores(&qd, 16).unwrap().cores.iter().map(|c| (*c | u).bits()).collect();
            let above: BTreeSet<u64> = lattice.cores.iter().filter(|c| u.is_subset(**c)).map(|c| c.bits()).collect();
            prop_assert_eq!(rel, above);
        }
    }

    #[test]
    fn lgr_round_trips(g in arb_graph(6, 8, 3)) {
        let text = g.to_lgr();
        let back = parse(&text, Limits::default()).unwrap().graph;
        prop_assert_eq!(back.to_lgr(), text);
        prop_assert_eq!(back.edges(), g.edges());
    }

    #[test]
    fn reports_are_deterministic(g in arb_graph(6, 8, 3)) {
        let a = analyze(g.clone(), &Config::default()).unwrap();
        let b = analyze(g, &Config::default()).unwrap();
        prop_assert_eq!(render_json(&analysis_json(&a, &[])), render_json(&analysis_json(&b, &[])));
    }

    #[test]
    fn trivial_labeling_matches_the_oracle(g in arb_graph(7, 6, 2)) {
        let t = g.with_trivial_labeling();
        let a = analyze(t.clone(), &Config::default()).unwrap();
        let r = oracle(&t).unwrap();
        prop_assert!(a.space.is_weakly_left_resolving());
        prop_assert_eq!(a.disagreeable.disagreeable, r.l);
        prop_assert_eq!(a.strong.holds, r.k);
        prop_assert!(a.violations.is_empty(), "{:?}", a.violations);
    }
}
