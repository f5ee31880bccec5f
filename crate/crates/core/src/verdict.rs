//! Turns computed predicates into tri-state conclusions about the algebra.
//!
//! Each conclusion names the implication it rests on. Several of the known
//! implications only go one way, so `Unknown` is an ordinary outcome.

use serde_json::{json, Value};

use crate::analysis::Analysis;
use crate::dynamics::{AtomConnection, Bounded};
use crate::report::{set_json, word_json};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Question {
    Simple,
    IH,
    PurelyInfinite,
    GaugeInvariantIdeals,
    InfiniteProjectionExists,
}

impl Question {
    pub const ALL: [Question; 5] = [
        Question::Simple,
        Question::IH,
        Question::PurelyInfinite,
        Question::GaugeInvariantIdeals,
        Question::InfiniteProjectionExists,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Question::Simple => "Simple",
            Question::IH => "IH",
            Question::PurelyInfinite => "PurelyInfinite",
            Question::GaugeInvariantIdeals => "GaugeInvariantIdeals",
            Question::InfiniteProjectionExists => "InfiniteProjectionExists",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Certified,
    Refuted,
    Unknown,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Certified => "Certified",
            Status::Refuted => "Refuted",
            Status::Unknown => "Unknown",
        }
    }
}

/// The implication a verdict rests on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rule {
    TrivialCoresAndLE,
    CofinalDisagreeable,
    CofinalCycle,
    DisagreeableConnects,
    StarConnectionNecessary,
    QuotientsConnect,
    ExitlessMinimalLoop,
    NonpowerLoopsNecessary,
    StrongDisagreeabilityNecessary,
    SimpleIhEquivalence,
    StrongDisagreeabilityGauge,
    LoopWithExit,
    StandingAssumption,
    Inconclusive,
}

impl Rule {
    pub fn tag(self) -> &'static str {
        match self {
            Rule::TrivialCoresAndLE => "simple-iff-trivial-cores-and-l-e",
            Rule::CofinalDisagreeable => "simple-from-cofinal-disagreeable",
            Rule::CofinalCycle => "cofinal-disagreeable-cycle",
            Rule::DisagreeableConnects => "ih-from-disagreeable-and-connection",
            Rule::StarConnectionNecessary => "ih-needs-connection-under-star",
            Rule::QuotientsConnect => "pi-from-quotients-connecting",
            Rule::ExitlessMinimalLoop => "pi-fails-at-exitless-minimal-loop",
            Rule::NonpowerLoopsNecessary => "pi-needs-nonpower-loops",
            Rule::StrongDisagreeabilityNecessary => "pi-needs-strong-disagreeability-under-star",
            Rule::SimpleIhEquivalence => "simple-pi-iff-ih",
            Rule::StrongDisagreeabilityGauge => "gauge-invariance-from-strong-disagreeability",
            Rule::LoopWithExit => "infinite-projection-from-loop-with-exit",
            Rule::StandingAssumption => "weak-left-resolution-required",
            Rule::Inconclusive => "none",
        }
    }

    pub fn statement(self) -> &'static str {
        match self {
            Rule::TrivialCoresAndLE => {
                "the algebra is simple exactly when (L_E) holds and the only hereditary saturated sets are the empty set and everything"
            }
            Rule::CofinalDisagreeable => "disagreeable and strongly cofinal implies simple",
            Rule::CofinalCycle => {
                "strongly cofinal, disagreeable and carrying a cycle implies simple and purely infinite"
            }
            Rule::DisagreeableConnects => {
                "disagreeable with every vertex connecting to a loop implies property (IH)"
            }
            Rule::StarConnectionNecessary => {
                "under (*), a disagreeable space with property (IH) has every vertex connecting to a loop"
            }
            Rule::QuotientsConnect => {
                "strongly disagreeable with every vertex connecting to a loop in every quotient implies purely infinite"
            }
            Rule::ExitlessMinimalLoop => {
                "an exit-less loop of length n at a minimal set gives a corner isomorphic to M_n(C(T)), so the algebra is not purely infinite"
            }
            Rule::NonpowerLoopsNecessary => {
                "if purely infinite, each minimal set with a loop carries a second loop sharing no power with it"
            }
            Rule::StrongDisagreeabilityNecessary => {
                "if (*) holds in every quotient, purely infinite implies strongly disagreeable"
            }
            Rule::SimpleIhEquivalence => "a simple algebra is purely infinite exactly when it has property (IH)",
            Rule::StrongDisagreeabilityGauge => "strongly disagreeable implies every ideal is gauge-invariant",
            Rule::LoopWithExit => "a loop with an exit at A makes the projection p_A infinite",
            Rule::StandingAssumption => "every implication used here presupposes weak left-resolution",
            Rule::Inconclusive => "no available implication decides the question",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Verdict {
    pub question: Question,
    pub status: Status,
    /// First route that decided the status.
    pub rule: Rule,
    /// Every route whose hypotheses held.
    pub routes: Vec<Rule>,
    pub certificate: Value,
    pub caveats: Vec<String>,
}

impl Verdict {
    fn unknown(question: Question, caveats: Vec<String>) -> Verdict {
        Verdict {
            question,
            status: Status::Unknown,
            rule: Rule::Inconclusive,
            routes: Vec::new(),
            certificate: Value::Null,
            caveats,
        }
    }

    pub fn fired(&self, rule: Rule) -> bool {
        self.routes.contains(&rule)
    }
}

/// Outcome of one route: its status and certificate.
type Route = (Rule, Status, Value);

/// Combines routes. Conflicting routes are an internal inconsistency: the
/// verdict becomes `Unknown` and the conflict is recorded.
fn combine(question: Question, routes: Vec<Route>, mut caveats: Vec<String>, violations: &mut Vec<String>) -> Verdict {
    let certified = routes.iter().any(|r| r.1 == Status::Certified);
    let refuted = routes.iter().any(|r| r.1 == Status::Refuted);
    let tags: Vec<Rule> = routes.iter().map(|r| r.0).collect();
    if certified && refuted {
        let msg = format!(
            "{}: certifying and refuting routes both fired: {}",
            question.as_str(),
            tags.iter().map(|r| r.tag()).collect::<Vec<_>>().join(", ")
        );
        violations.push(msg.clone());
        caveats.push(format!("consistency violation, {msg}"));
        return Verdict {
            question,
            status: Status::Unknown,
            rule: Rule::Inconclusive,
            routes: tags,
            certificate: Value::Null,
            caveats,
        };
    }
    let Some(first) = routes.first() else {
        return Verdict::unknown(question, caveats);
    };
    let mut certificate = serde_json::Map::new();
    for (rule, _, cert) in &routes {
        certificate.insert(rule.tag().to_string(), cert.clone());
    }
    Verdict {
        question,
        status: first.1,
        rule: first.0,
        routes: tags,
        certificate: Value::Object(certificate),
        caveats,
    }
}

pub struct Decisions {
    pub verdicts: Vec<Verdict>,
    pub notes: Vec<String>,
    pub violations: Vec<String>,
}

pub fn decide(a: &Analysis) -> Decisions {
    let g = a.space.graph();
    let mut violations = Vec::new();
    let mut notes = Vec::new();

    if !a.space.is_weakly_left_resolving() {
        let caveat = "weak left-resolution fails; the standing assumption of every rule is violated".to_string();
        let verdicts = Question::ALL
            .iter()
            .map(|&q| Verdict {
                rule: Rule::StandingAssumption,
                ..Verdict::unknown(q, vec![caveat.clone()])
            })
            .collect();
        return Decisions {
            verdicts,
            notes,
            violations,
        };
    }

    let disagreeable = a.disagreeable.disagreeable;
    let cofinal = a.cofinality.strongly_cofinal;
    let le_holds = a.exitless.is_none();
    let lattice_trivial = a.lattice.is_trivial();
    let omega0 = a.space.omega0();

    let cofinal_route: Option<Route> = match (&a.cycle, disagreeable && cofinal) {
        (Some((w, b)), true) => Some((
            Rule::CofinalCycle,
            Status::Certified,
            json!({"cycle": {"word": word_json(g, w), "atom": set_json(g, *b)}}),
        )),
        _ => None,
    };

    // Simple
    let simple = {
        let mut routes = Vec::new();
        if le_holds && lattice_trivial {
            routes.push((
                Rule::TrivialCoresAndLE,
                Status::Certified,
                json!({"cores": a.lattice.cores.iter().map(|c| set_json(g, *c)).collect::<Vec<_>>()}),
            ));
        } else {
            let mut cert = serde_json::Map::new();
            if let Some(c) = &a.exitless {
                cert.insert(
                    "exitless_cycle".into(),
                    json!({"word": word_json(g, &c.word), "atom": set_json(g, c.atom)}),
                );
            }
            if let Some(core) = a.lattice.cores.iter().find(|c| !c.is_empty() && **c != omega0) {
                cert.insert("nontrivial_core".into(), set_json(g, *core));
            }
            routes.push((Rule::TrivialCoresAndLE, Status::Refuted, Value::Object(cert)));
        }
        if disagreeable && cofinal {
            routes.push((Rule::CofinalDisagreeable, Status::Certified, json!({})));
        }
        if let Some(r) = &cofinal_route {
            routes.push(r.clone());
        }
        if disagreeable && cofinal && !(le_holds && lattice_trivial) {
            violations.push(
                "Simple: disagreeable and strongly cofinal, but the core-lattice criterion does not certify".into(),
            );
        }
        combine(Question::Simple, routes, Vec::new(), &mut violations)
    };

    // IH
    let ih = {
        let mut routes = Vec::new();
        let mut caveats = Vec::new();
        match (disagreeable, a.connects.status) {
            (true, Bounded::Holds) => {
                routes.push((Rule::DisagreeableConnects, Status::Certified, connects_certificate(a)))
            }
            (true, Bounded::Fails) if a.space.star().holds => {
                caveats.push("connection search exhausted every reachable range".to_string());
                routes.push((
                    Rule::StarConnectionNecessary,
                    Status::Refuted,
                    json!({"unconnected_atoms": unconnected(a)}),
                ));
            }
            (true, _) => caveats.push(format!(
                "bounded search: no loop connection found within word length {}",
                bound_of(a)
            )),
            (false, _) => caveats.push("not disagreeable; no available implication applies".to_string()),
        }
        combine(Question::IH, routes, caveats, &mut violations)
    };

    // Purely infinite
    let pi = {
        let mut routes = Vec::new();
        let mut caveats = Vec::new();
        let proper_connect = a.quotients.iter().all(|q| q.connects.status == Bounded::Holds);
        if a.strong.holds && proper_connect {
            routes.push((
                Rule::QuotientsConnect,
                Status::Certified,
                json!({"quotient_cores": a.quotients.iter().map(|q| set_json(g, q.core)).collect::<Vec<_>>()}),
            ));
        } else if a.strong.holds {
            caveats.push("some quotient has no loop connection within the search bound".to_string());
        }
        if let Some(r) = &cofinal_route {
            routes.push(r.clone());
        }
        if let Some(c) = &a.exitless {
            routes.push((
                Rule::ExitlessMinimalLoop,
                Status::Refuted,
                json!({
                    "minimal_set": set_json(g, c.atom),
                    "loop": word_json(g, &c.word),
                    "n": c.word.len(),
                    "corner": format!("M_{}(C(T))", c.word.len()),
                }),
            ));
        }
        if let Some((base, np)) = a.nonpower.iter().find(|(_, np)| np.other.is_none() && np.exhaustive) {
            routes.push((
                Rule::NonpowerLoopsNecessary,
                Status::Refuted,
                json!({
                    "minimal_set": set_json(g, *base),
                    "shortest_loop": word_json(g, &np.shortest),
                    "search": "every loop word is a power of the shortest loop's root (exhaustive)",
                }),
            ));
        }
        if !a.strong.holds && a.quotients.iter().all(|q| q.star.holds) {
            let core = a.strong.failing_core.unwrap_or_default();
            let mut cert = json!({"failing_core": set_json(g, core)});
            if let Some(w) = &a.strong.witness {
                cert["witness"] = json!({"set": set_json(g, w.set), "word": word_json(g, &w.word)});
            }
            routes.push((Rule::StrongDisagreeabilityNecessary, Status::Refuted, cert));
        }
        if simple.status == Status::Certified && ih.status == Status::Refuted {
            routes.push((Rule::SimpleIhEquivalence, Status::Refuted, json!({})));
        }
        combine(Question::PurelyInfinite, routes, caveats, &mut violations)
    };

    let gauge = if a.strong.holds {
        combine(
            Question::GaugeInvariantIdeals,
            vec![(
                Rule::StrongDisagreeabilityGauge,
                Status::Certified,
                json!({"cores": a.lattice.cores.iter().map(|c| set_json(g, *c)).collect::<Vec<_>>()}),
            )],
            Vec::new(),
            &mut violations,
        )
    } else {
        Verdict::unknown(
            Question::GaugeInvariantIdeals,
            vec!["not strongly disagreeable; only the forward implication is known".to_string()],
        )
    };

    let infinite_projection = {
        let bases = infinite_projection_report(a);
        if bases.is_empty() {
            let mut caveats = vec!["no loop with an exit found".to_string()];
            if let Some(c) = &a.exitless {
                caveats.push(format!(
                    "the corner at {} is M_{}(C(T)), which has no infinite projection",
                    g.format_set(c.atom).join(","),
                    c.word.len()
                ));
            }
            Verdict::unknown(Question::InfiniteProjectionExists, caveats)
        } else {
            combine(
                Question::InfiniteProjectionExists,
                vec![(Rule::LoopWithExit, Status::Certified, Value::Array(bases))],
                Vec::new(),
                &mut violations,
            )
        }
    };

    if pi.status == Status::Certified {
        if ih.status == Status::Refuted {
            violations.push("PurelyInfinite certified but IH refuted".into());
        }
        if a.nonpower.iter().any(|(_, np)| np.other.is_none()) {
            violations.push("PurelyInfinite certified but a minimal set lacks two non-power loops".into());
        }
        if !a.strong.holds {
            violations.push("PurelyInfinite certified without strong disagreeability".into());
        }
    }
    if a.strong.holds {
        notes.push(
            "strongly disagreeable: purely infinite holds exactly when every projection p_A is properly infinite, \
             and exactly when every quotient has property (IH)"
                .to_string(),
        );
    }

    Decisions {
        verdicts: vec![simple, ih, pi, gauge, infinite_projection],
        notes,
        violations,
    }
}

/// Every atom carrying a loop with an exit, as `{"set", "loop", "exit"}`.
pub fn infinite_projection_report(a: &Analysis) -> Vec<Value> {
    let g = a.space.graph();
    a.loops
        .iter()
        .filter_map(|ls| {
            ls.loops.iter().find(|l| l.has_exit()).map(|l| {
                json!({
                    "set": set_json(g, l.base),
                    "loop": word_json(g, &l.word),
                    "exit": crate::report::exit_json(g, &l.exits[0]),
                    "statement": "p_A infinite",
                })
            })
        })
        .collect()
}

fn connects_certificate(a: &Analysis) -> Value {
    let g = a.space.graph();
    Value::Array(
        a.connects
            .per_atom
            .iter()
            .filter_map(|c| match c {
                AtomConnection::Covered {
                    atom,
                    loop_base,
                    loop_word,
                    cover,
                    stage,
                } => Some(json!({
                    "atom": set_json(g, *atom),
                    "loop_base": set_json(g, *loop_base),
                    "loop": word_json(g, loop_word),
                    "cover": cover.iter().map(|w| word_json(g, w)).collect::<Vec<_>>(),
                    "stage": stage.as_str(),
                })),
                AtomConnection::NotCovered { .. } => None,
            })
            .collect(),
    )
}

fn unconnected(a: &Analysis) -> Vec<Value> {
    let g = a.space.graph();
    a.connects
        .per_atom
        .iter()
        .filter_map(|c| match c {
            AtomConnection::NotCovered { atom, .. } => Some(set_json(g, *atom)),
            _ => None,
        })
        .collect()
}

fn bound_of(a: &Analysis) -> usize {
    a.connects
        .per_atom
        .iter()
        .find_map(|c| match c {
            AtomConnection::NotCovered { bound, .. } => Some(*bound),
            _ => None,
        })
        .unwrap_or(0)
}
