//! JSON and text rendering. Object keys are sorted, so output is
//! byte-identical for identical input and configuration.

use std::fmt::Write as _;

use serde_json::{json, Value};

use crate::analysis::Analysis;
use crate::dynamics::{AtomConnection, ChainEnd, Exit, ForcedChain, LoopKind, LoopWitness};
use crate::error::AnalysisError;
use crate::graph::{LabeledGraph, VertexSet, Word};
use crate::ideals::QuotientPredicates;
use crate::oracle::OracleReport;
use crate::space::CrossCheck;
use crate::verdict::Verdict;

pub const SCHEMA: &str = "labelana/1";

pub fn set_json(g: &LabeledGraph, s: VertexSet) -> Value {
    json!(g.format_set(s))
}

pub fn word_json(g: &LabeledGraph, w: &Word) -> Value {
    json!(g.format_word(w))
}

pub fn exit_json(g: &LabeledGraph, e: &Exit) -> Value {
    match e {
        Exit::SameLength(w) => json!({"kind": "same-length", "word": word_json(g, w)}),
        Exit::Expanding => json!({"kind": "expanding"}),
    }
}

fn set_text(g: &LabeledGraph, s: VertexSet) -> String {
    format!("{{{}}}", g.format_set(s).join(","))
}

fn word_text(g: &LabeledGraph, w: &Word) -> String {
    g.format_word(w).join(" ")
}

pub fn loop_json(g: &LabeledGraph, l: &LoopWitness) -> Value {
    json!({
        "base": set_json(g, l.base),
        "word": word_json(g, &l.word),
        "kind": match l.kind { LoopKind::Loop => "loop", LoopKind::Cycle => "cycle" },
        "exits": l.exits.iter().map(|e| exit_json(g, e)).collect::<Vec<_>>(),
    })
}

fn chain_json(g: &LabeledGraph, c: &ForcedChain) -> Value {
    let end = match &c.end {
        ChainEnd::Branch { index, letters } => json!({
            "branch_at": index,
            "letters": letters.iter().map(|&a| g.letter_name(a)).collect::<Vec<_>>(),
        }),
        ChainEnd::Periodic { preperiod, period } => json!({"preperiod": preperiod, "period": period}),
        ChainEnd::Dies { index } => json!({"dies_at": index}),
    };
    json!({
        "start": set_json(g, c.start),
        "letters": c.letters.iter().map(|&a| g.letter_name(a)).collect::<Vec<_>>(),
        "end": end,
    })
}

fn connection_json(g: &LabeledGraph, c: &AtomConnection) -> Value {
    match c {
        AtomConnection::Covered {
            atom,
            loop_base,
            loop_word,
            cover,
            stage,
        } => json!({
            "atom": set_json(g, *atom),
            "covered": true,
            "loop_base": set_json(g, *loop_base),
            "loop": word_json(g, loop_word),
            "cover": cover.iter().map(|w| word_json(g, w)).collect::<Vec<_>>(),
            "stage": stage.as_str(),
        }),
        AtomConnection::NotCovered {
            atom,
            exhaustive,
            bound,
        } => json!({
            "atom": set_json(g, *atom),
            "covered": false,
            "exhaustive": exhaustive,
            "bound": bound,
        }),
    }
}

pub fn verdict_json(v: &Verdict) -> Value {
    json!({
        "question": v.question.as_str(),
        "status": v.status.as_str(),
        "rule": v.rule.tag(),
        "statement": v.rule.statement(),
        "routes": v.routes.iter().map(|r| r.tag()).collect::<Vec<_>>(),
        "certificate": v.certificate,
        "caveats": v.caveats,
    })
}

pub fn quotient_json(g: &LabeledGraph, q: &QuotientPredicates) -> Value {
    json!({
        "core": set_json(g, q.core),
        "atoms": q.atoms.iter().map(|a| set_json(g, *a)).collect::<Vec<_>>(),
        "alphabet": q.alphabet.iter().map(|&a| g.letter_name(a)).collect::<Vec<_>>(),
        "weakly_left_resolving": q.weakly_left_resolving,
        "disagreeable": q.disagreeable.disagreeable,
        "agreeable_witness": q.disagreeable.witness.as_ref().map(|w| json!({
            "set": set_json(g, w.set), "word": word_json(g, &w.word)
        })),
        "connects_to_loop": q.connects.status.as_str(),
        "star": q.star.holds,
        "l_e": q.exitless.is_none(),
        "loops": q.loops.iter().map(|l| loop_json(g, l)).collect::<Vec<_>>(),
    })
}

pub fn space_json(a: &Analysis) -> Value {
    let s = &a.space;
    let g = s.graph();
    let crosscheck = match s.crosscheck() {
        CrossCheck::Agrees { size } => json!({"result": "agrees", "size": size}),
        CrossCheck::Differs {
            closure_size,
            atom_union_size,
            extra,
        } => json!({
            "result": "differs",
            "closure_size": closure_size,
            "atom_union_size": atom_union_size,
            "extra": extra.map(|e| set_json(g, e)),
        }),
        CrossCheck::Skipped { reason } => json!({"result": "skipped", "reason": reason}),
    };
    json!({
        "atoms": s.atoms().iter().map(|a| set_json(g, *a)).collect::<Vec<_>>(),
        "stabilization_depth": s.partition().stabilization_depth,
        "family_size": s.family_size().map(|n| n.to_string()),
        "minimal_sets": s.minimal_sets().iter().map(|a| set_json(g, *a)).collect::<Vec<_>>(),
        "weakly_left_resolving": s.is_weakly_left_resolving(),
        "wlr_counterexample": s.wlr_counterexample().map(|c| json!({
            "first": set_json(g, c.first),
            "second": set_json(g, c.second),
            "letter": g.letter_name(c.letter),
        })),
        "star": s.star().holds,
        "closure_crosscheck": crosscheck,
        "automaton_states": a.automaton.len(),
    })
}

pub fn ideals_json(a: &Analysis) -> Value {
    let g = a.space.graph();
    json!({
        "cores": a.lattice.cores.iter().map(|c| set_json(g, *c)).collect::<Vec<_>>(),
        "hasse": a.lattice.hasse.iter().map(|(i, j)| json!([i, j])).collect::<Vec<_>>(),
        "quotients": a.quotients.iter().map(|q| quotient_json(g, q)).collect::<Vec<_>>(),
    })
}

pub fn predicates_json(a: &Analysis) -> Value {
    let g = a.space.graph();
    json!({
        "disagreeable": {
            "value": a.disagreeable.disagreeable,
            "witness": a.disagreeable.witness.as_ref().map(|w| json!({
                "set": set_json(g, w.set),
                "word": word_json(g, &w.word),
                "verified": w.verified,
            })),
            "chains": a.disagreeable.chains.iter().map(|c| chain_json(g, c)).collect::<Vec<_>>(),
        },
        "l_e": {
            "value": a.exitless.is_none(),
            "exitless_cycle": a.exitless.as_ref().map(|c| json!({
                "word": word_json(g, &c.word), "atom": set_json(g, c.atom)
            })),
        },
        "loops": a.loops.iter().map(|ls| json!({
            "length_bound": ls.length_bound,
            "truncated": ls.truncated,
            "loops": ls.loops.iter().map(|l| loop_json(g, l)).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
        "cycle": a.cycle.as_ref().map(|(w, b)| json!({"word": word_json(g, w), "atom": set_json(g, *b)})),
        "connects_to_loop": {
            "value": a.connects.status.as_str(),
            "per_atom": a.connects.per_atom.iter().map(|c| connection_json(g, c)).collect::<Vec<_>>(),
        },
        "strongly_cofinal": {
            "value": a.cofinality.strongly_cofinal,
            "witness": a.cofinality.witness.as_ref().map(|w| json!({
                "atom": set_json(g, w.atom),
                "good": set_json(g, w.good),
                "prefix": word_json(g, &w.prefix),
                "period": word_json(g, &w.period),
            })),
        },
        "two_nonpower_loops": a.nonpower.iter().map(|(b, np)| json!({
            "base": set_json(g, *b),
            "shortest": word_json(g, &np.shortest),
            "other": np.other.as_ref().map(|w| word_json(g, w)),
            "exhaustive": np.exhaustive,
        })).collect::<Vec<_>>(),
        "strongly_disagreeable": strong_json(a),
    })
}

pub fn strong_json(a: &Analysis) -> Value {
    let g = a.space.graph();
    json!({
        "value": a.strong.holds,
        "failing_core": a.strong.failing_core.map(|c| set_json(g, c)),
        "witness": a.strong.witness.as_ref().map(|w| json!({
            "set": set_json(g, w.set), "word": word_json(g, &w.word)
        })),
    })
}

pub fn analysis_json(a: &Analysis, warnings: &[String]) -> Value {
    let g = a.space.graph();
    let mut all_warnings: Vec<String> = warnings.to_vec();
    all_warnings.extend(a.space.warnings.iter().cloned());
    json!({
        "schema": SCHEMA,
        "graph": {
            "name": g.name(),
            "vertices": g.vertex_names(),
            "letters": g.letters().map(|l| g.letter_name(l)).collect::<Vec<_>>(),
            "edges": g.edges().len(),
            "sources": set_json(g, g.sources()),
        },
        "warnings": all_warnings,
        "config": {
            "max_atoms": a.config.max_atoms,
            "word_bound_multiplier": a.config.word_bound_multiplier,
            "cover_mode": a.config.cover_mode.as_str(),
            "allow_epsilon_cover": a.config.allow_epsilon_cover,
        },
        "space": space_json(a),
        "predicates": predicates_json(a),
        "ideals": ideals_json(a),
        "verdicts": a.verdicts.iter().map(verdict_json).collect::<Vec<_>>(),
        "infinite_projections": crate::verdict::infinite_projection_report(a),
        "notes": a.notes,
        "violations": a.violations,
    })
}

pub fn oracle_json(r: &OracleReport, agrees: bool) -> Value {
    json!({"schema": SCHEMA, "L": r.l, "K": r.k, "connects": r.connects, "agrees_with_labeled": agrees})
}

pub fn error_json(e: &AnalysisError) -> Value {
    json!({"schema": SCHEMA, "error": {"kind": e.kind().as_str(), "message": e.to_string()}})
}

/// Pretty JSON with a trailing newline.
pub fn render_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

pub fn analysis_text(a: &Analysis, warnings: &[String]) -> String {
    let s = &a.space;
    let g = s.graph();
    let yes = |b: bool| if b { "yes" } else { "no" };
    let mut out = String::new();
    let _ = writeln!(
        out,
        "graph {}: {} vertices, {} edges, letters {}",
        g.name(),
        g.vertex_count(),
        g.edges().len(),
        g.letters().map(|l| g.letter_name(l)).collect::<Vec<_>>().join(" ")
    );
    for w in warnings.iter().chain(&s.warnings) {
        let _ = writeln!(out, "warning: {w}");
    }
    let _ = writeln!(
        out,
        "atoms ({} at depth {}): {}",
        s.atom_count(),
        s.partition().stabilization_depth,
        s.atoms().iter().map(|a| set_text(g, *a)).collect::<Vec<_>>().join(" ")
    );
    let _ = writeln!(out, "weakly left-resolving: {}", yes(s.is_weakly_left_resolving()));
    out.push_str("\npredicates\n");
    let _ = write!(out, "  disagreeable          {}", yes(a.disagreeable.disagreeable));
    if let Some(w) = &a.disagreeable.witness {
        let _ = write!(out, "  (forced {} at {})", word_text(g, &w.word), set_text(g, w.set));
    }
    out.push('\n');
    let _ = write!(out, "  (L_E)                 {}", yes(a.exitless.is_none()));
    if let Some(c) = &a.exitless {
        let _ = write!(
            out,
            "  (exit-less cycle {} at {})",
            word_text(g, &c.word),
            set_text(g, c.atom)
        );
    }
    out.push('\n');
    let _ = writeln!(out, "  connects to a loop    {}", a.connects.status.as_str());
    let _ = writeln!(out, "  strongly cofinal      {}", yes(a.cofinality.strongly_cofinal));
    let _ = write!(out, "  strongly disagreeable {}", yes(a.strong.holds));
    if let Some(c) = a.strong.failing_core {
        let _ = write!(out, "  (fails modulo {})", set_text(g, c));
    }
    out.push('\n');
    let _ = writeln!(out, "  condition (*)         {}", yes(s.star().holds));
    out.push_str("\nhereditary saturated cores\n");
    for c in &a.lattice.cores {
        let _ = writeln!(out, "  {}", set_text(g, *c));
    }
    out.push_str("\nverdicts\n");
    for v in &a.verdicts {
        let _ = writeln!(
            out,
            "  {:<26}{:<10}{}",
            v.question.as_str(),
            v.status.as_str(),
            v.rule.tag()
        );
        let _ = writeln!(out, "      {}", v.rule.statement());
        for r in v.routes.iter().skip(1) {
            let _ = writeln!(out, "      also: {}", r.tag());
        }
        for c in &v.caveats {
            let _ = writeln!(out, "      caveat: {c}");
        }
    }
    for n in &a.notes {
        let _ = writeln!(out, "\nnote: {n}");
    }
    for v in &a.violations {
        let _ = writeln!(out, "\nVIOLATION: {v}");
    }
    out
}
