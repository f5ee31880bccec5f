//! Random no-sink graphs and the differential checks run on them.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analysis::{analyze, Analysis};
use crate::config::Config;
use crate::graph::{LabeledGraph, Limits};
use crate::oracle::oracle;
use crate::verdict::{Question, Status};

#[derive(Clone, Copy, Debug)]
pub struct Shape {
    pub max_vertices: usize,
    pub max_edges: usize,
    pub letters: usize,
}

/// A graph with `1..=max_vertices` vertices, one guaranteed out-edge per
/// vertex, and extra random edges up to `max_edges` in total.
pub fn random_graph(rng: &mut impl RngExt, shape: Shape) -> LabeledGraph {
    let n = rng.random_range(1..=shape.max_vertices.max(1));
    let cap = shape.max_edges.max(n);
    let total = rng.random_range(n..=cap);
    let letters = shape.letters.max(1);
    let mut edges: Vec<(usize, usize, usize)> = Vec::with_capacity(total);
    for v in 0..n {
        edges.push((v, rng.random_range(0..n), rng.random_range(0..letters)));
    }
    // Bounded retries: small graphs may not have room for `total` distinct edges.
    for _ in 0..4 * total {
        if edges.len() >= total {
            break;
        }
        let e = (
            rng.random_range(0..n),
            rng.random_range(0..n),
            rng.random_range(0..letters),
        );
        if !edges.contains(&e) {
            edges.push(e);
        }
    }
    build(n, &edges, |_, l| format!("l{l}"))
}

/// Like [`random_graph`] but every edge carries its own label.
pub fn random_injective_graph(rng: &mut impl RngExt, max_vertices: usize, max_edges: usize) -> LabeledGraph {
    let g = random_graph(
        rng,
        Shape {
            max_vertices,
            max_edges,
            letters: 2,
        },
    );
    g.with_trivial_labeling()
}

fn build(n: usize, edges: &[(usize, usize, usize)], label: impl Fn(usize, usize) -> String) -> LabeledGraph {
    let names: Vec<String> = (0..n).map(|v| format!("v{v}")).collect();
    let triples: Vec<(String, String, String)> = edges
        .iter()
        .enumerate()
        .map(|(i, &(s, d, l))| (names[s].clone(), names[d].clone(), label(i, l)))
        .collect();
    LabeledGraph::new("random", &names, &triples, Limits::default())
        .expect("generated graphs are valid")
        .graph
}

/// Oracle and labeled predicates agree on an injectively labeled graph.
pub fn oracle_disagreement(a: &Analysis) -> Option<String> {
    let r = match oracle(a.space.graph()) {
        Ok(r) => r,
        Err(e) => return Some(e.to_string()),
    };
    let ih = a.verdict(Question::IH).status == Status::Certified;
    let mut out = Vec::new();
    if a.disagreeable.disagreeable != r.l {
        out.push(format!("disagreeable={} but L={}", a.disagreeable.disagreeable, r.l));
    }
    if a.strong.holds != r.k {
        out.push(format!("strongly disagreeable={} but K={}", a.strong.holds, r.k));
    }
    if ih != (r.l && r.connects) {
        out.push(format!("IH certified={} but L∧connects={}", ih, r.l && r.connects));
    }
    (!out.is_empty()).then(|| out.join("; "))
}

/// Soundness checks on one analysis: no contradictory verdicts and the
/// implications between predicates.
pub fn mesh_violations(a: &Analysis) -> Vec<String> {
    let mut out = a.violations.clone();
    if !a.space.is_weakly_left_resolving() {
        return out;
    }
    let pi = a.verdict(Question::PurelyInfinite);
    if pi.status == Status::Certified && a.nonpower.iter().any(|(_, np)| np.other.is_none()) {
        out.push("PurelyInfinite certified but two_nonpower_loops fails".into());
    }
    if a.disagreeable.disagreeable
        && a.cofinality.strongly_cofinal
        && a.verdict(Question::Simple).status != Status::Certified
    {
        out.push("disagreeable and strongly cofinal but Simple not certified".into());
    }
    out
}

#[derive(Clone, Debug)]
pub struct Failure {
    pub case: usize,
    pub graph: String,
    pub reason: String,
}

#[derive(Clone, Debug, Default)]
pub struct FuzzSummary {
    pub cases: usize,
    pub oracle_agreements: usize,
    pub mesh_violations: usize,
    pub failures: Vec<Failure>,
}

impl FuzzSummary {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Runs `n` cases. Each case draws a labeled graph with up to `size`
/// vertices and three letters for the soundness checks, and compares its
/// trivially relabeled copy against the oracle.
pub fn run_fuzz(n: usize, size: usize, seed: u64, config: &Config) -> FuzzSummary {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut summary = FuzzSummary::default();
    let shape = Shape {
        max_vertices: size,
        max_edges: size * 2,
        letters: 3,
    };
    for case in 0..n {
        summary.cases += 1;
        let g = random_graph(&mut rng, shape);
        let mut fail = |g: &LabeledGraph, reason: String| {
            summary.failures.push(Failure {
                case,
                graph: g.to_lgr(),
                reason,
            })
        };
        match analyze(g.clone(), config) {
            Ok(a) => {
                let v = mesh_violations(&a);
                if !v.is_empty() {
                    summary.mesh_violations += v.len();
                    fail(&g, v.join("; "));
                }
            }
            Err(e) => fail(&g, format!("analysis failed: {e}")),
        }
        let t = g.with_trivial_labeling();
        match analyze(t.clone(), config) {
            Ok(a) => match oracle_disagreement(&a) {
                None => summary.oracle_agreements += 1,
                Some(reason) => fail(&t, reason),
            },
            Err(e) => fail(&t, format!("analysis failed: {e}")),
        }
    }
    summary
}
