use std::io::Read as _;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use labelana::analysis::{analyze, Analysis};
use labelana::config::{Config, CoverMode, MAX_ATOMS_ENV};
use labelana::dynamics::Dynamics;
use labelana::error::AnalysisError;
use labelana::fuzz::{oracle_disagreement, run_fuzz};
use labelana::graph::{parse, Parsed, VertexSet};
use labelana::ideals::{quotient, quotient_predicates, saturate};
use labelana::report::{self, render_json, set_json, SCHEMA};
use labelana::space::Space;

#[derive(Parser)]
#[command(
    name = "labelana",
    version,
    about = "Analyze labeled graph spaces and their algebras"
)]
struct Cli {
    /// Output format
    #[arg(long, value_enum, default_value = "text", global = true)]
    format: Format,
    /// Largest atom count for family and core enumeration
    #[arg(long, env = MAX_ATOMS_ENV, default_value_t = 16, value_parser = clap::value_parser!(u64).range(1..64), global = true)]
    max_atoms: u64,
    /// Multiplier for every word-length search bound
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..), global = true)]
    word_bound_multiplier: u64,
    /// Loop-connection cover search
    #[arg(long, value_enum, default_value = "both", global = true)]
    cover_mode: CoverMode,
    /// Accept a loop base inside the atom itself as a cover
    #[arg(long, global = true)]
    epsilon_cover: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Property {
    Disagreeable,
    StronglyDisagreeable,
    StronglyCofinal,
    #[value(name = "l-e")]
    LE,
    Star,
    Connects,
    Wlr,
}

#[derive(Subcommand)]
enum Command {
    /// Full report: space, predicates, ideal lattice and verdicts
    Analyze { file: String },
    /// A single predicate with its certificate
    Check {
        file: String,
        #[arg(long, value_enum)]
        property: Property,
    },
    /// Lattice of hereditary saturated cores
    Ideals { file: String },
    /// Quotient by the smallest core containing the given vertices
    Quotient {
        file: String,
        /// Comma-separated vertex ids
        #[arg(long)]
        core: String,
    },
    /// Classical graph conditions for an injectively labeled graph
    Oracle { file: String },
    /// Random differential testing
    Fuzz {
        #[arg(long, default_value_t = 200)]
        n: usize,
        #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u64).range(1..=64))]
        size: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Graphviz rendering
    Dot { file: String },
}

fn config(cli: &Cli) -> Config {
    Config {
        max_atoms: cli.max_atoms as usize,
        word_bound_multiplier: cli.word_bound_multiplier as usize,
        cover_mode: cli.cover_mode,
        allow_epsilon_cover: cli.epsilon_cover,
        ..Config::default()
    }
}

fn load(file: &str, cfg: &Config) -> Result<Parsed, AnalysisError> {
    let text = if file == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| AnalysisError::Usage(format!("cannot read stdin: {e}")))?;
        s
    } else {
        std::fs::read_to_string(file).map_err(|e| AnalysisError::Usage(format!("cannot read {file}: {e}")))?
    };
    Ok(parse(&text, cfg.limits)?)
}

fn load_analysis(file: &str, cfg: &Config) -> Result<(Analysis, Vec<String>), AnalysisError> {
    let parsed = load(file, cfg)?;
    Ok((analyze(parsed.graph, cfg)?, parsed.warnings))
}

/// What a command prints on success and its exit code.
struct Output {
    body: String,
    code: u8,
}

fn emit(format: Format, value: serde_json::Value, text: impl FnOnce(&serde_json::Value) -> String) -> Output {
    let body = match format {
        Format::Json => render_json(&value),
        Format::Text => text(&value),
    };
    Output { body, code: 0 }
}

fn flat_text(v: &serde_json::Value) -> String {
    let mut out = String::new();
    if let serde_json::Value::Object(m) = v {
        for (k, val) in m {
            if k != "schema" {
                out.push_str(&format!("{k}: {val}\n"));
            }
        }
    }
    out
}

fn run(cli: &Cli) -> Result<Output, AnalysisError> {
    let cfg = config(cli);
    match &cli.command {
        Command::Analyze { file } => {
            let (a, warnings) = load_analysis(file, &cfg)?;
            Ok(match cli.format {
                Format::Json => Output {
                    body: render_json(&report::analysis_json(&a, &warnings)),
                    code: 0,
                },
                Format::Text => Output {
                    body: report::analysis_text(&a, &warnings),
                    code: 0,
                },
            })
        }
        Command::Check { file, property } => {
            let (a, _) = load_analysis(file, &cfg)?;
            let preds = report::predicates_json(&a);
            let space = report::space_json(&a);
            let (name, value, certificate) = match property {
                Property::Disagreeable => (
                    "disagreeable",
                    json!(a.disagreeable.disagreeable),
                    preds["disagreeable"]["witness"].clone(),
                ),
                Property::StronglyDisagreeable => {
                    let s = report::strong_json(&a);
                    (
                        "strongly-disagreeable",
                        s["value"].clone(),
                        json!({"failing_core": s["failing_core"], "witness": s["witness"]}),
                    )
                }
                Property::StronglyCofinal => (
                    "strongly-cofinal",
                    json!(a.cofinality.strongly_cofinal),
                    preds["strongly_cofinal"]["witness"].clone(),
                ),
                Property::LE => (
                    "l-e",
                    json!(a.exitless.is_none()),
                    preds["l_e"]["exitless_cycle"].clone(),
                ),
                Property::Star => {
                    let st = a.space.star();
                    let g = a.space.graph();
                    (
                        "star",
                        json!(st.holds),
                        json!({
                            "contains_minimal": st.contains_minimal,
                            "ranges_are_unions": st.ranges_are_unions,
                            "violation": st.violation.map(|(b, r)| json!({"atom": set_json(g, b), "range": set_json(g, r)})),
                        }),
                    )
                }
                Property::Connects => (
                    "connects",
                    preds["connects_to_loop"]["value"].clone(),
                    preds["connects_to_loop"]["per_atom"].clone(),
                ),
                Property::Wlr => (
                    "wlr",
                    space["weakly_left_resolving"].clone(),
                    space["wlr_counterexample"].clone(),
                ),
            };
            let v = json!({"schema": SCHEMA, "property": name, "value": value, "certificate": certificate});
            Ok(emit(cli.format, v, flat_text))
        }
        Command::Ideals { file } => {
            let (a, _) = load_analysis(file, &cfg)?;
            let mut v = report::ideals_json(&a);
            v["schema"] = json!(SCHEMA);
            v["strongly_disagreeable"] = report::strong_json(&a);
            Ok(emit(cli.format, v, |v| {
                let mut out = String::from("cores\n");
                for (i, c) in v["cores"].as_array().into_iter().flatten().enumerate() {
                    out.push_str(&format!("  [{i}] {c}\n"));
                }
                out.push_str(&format!("hasse {}\n", v["hasse"]));
                for q in v["quotients"].as_array().into_iter().flatten() {
                    out.push_str(&format!(
                        "quotient by {}: disagreeable {}, connects {}, star {}\n",
                        q["core"], q["disagreeable"], q["connects_to_loop"], q["star"]
                    ));
                }
                out
            }))
        }
        Command::Quotient { file, core } => {
            let parsed = load(file, &cfg)?;
            let space = Space::new(parsed.graph, &cfg)?;
            let g = space.graph();
            let mut notes = Vec::new();
            let mut seed = VertexSet::EMPTY;
            for id in core.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                let v = g
                    .vertex_index(id)
                    .ok_or_else(|| AnalysisError::Usage(format!("unknown vertex `{id}` in --core")))?;
                seed.insert(v);
            }
            if seed.intersects(g.sources()) {
                notes.push(format!(
                    "source vertices dropped from the core: {}",
                    g.format_set(seed & g.sources()).join(",")
                ));
                seed = seed & space.omega0();
            }
            let closed = saturate(&Dynamics::new(&space), seed);
            if closed != seed {
                notes.push(format!(
                    "closed to the smallest hereditary saturated core: {}",
                    g.format_set(closed).join(",")
                ));
            }
            let q = quotient(&space, closed)?;
            let v = if q.is_zero() {
                json!({"schema": SCHEMA, "core": set_json(g, closed), "zero": true, "notes": notes})
            } else {
                let mut v = report::quotient_json(g, &quotient_predicates(&q, &cfg)?);
                v["schema"] = json!(SCHEMA);
                v["zero"] = json!(false);
                v["notes"] = json!(notes);
                v
            };
            Ok(emit(cli.format, v, flat_text))
        }
        Command::Oracle { file } => {
            let parsed = load(file, &cfg)?;
            let r = labelana::oracle::oracle(&parsed.graph)?;
            let a = analyze(parsed.graph, &cfg)?;
            let v = report::oracle_json(&r, oracle_disagreement(&a).is_none());
            Ok(emit(cli.format, v, flat_text))
        }
        Command::Fuzz { n, size, seed } => {
            let s = run_fuzz(*n, *size as usize, *seed, &cfg);
            let first = s.failures.first();
            let v = json!({
                "schema": SCHEMA,
                "cases": s.cases,
                "oracle_agreements": s.oracle_agreements,
                "mesh_violations": s.mesh_violations,
                "counterexample": first.map(|f| json!({"case": f.case, "reason": f.reason, "graph": f.graph})),
            });
            let mut out = emit(cli.format, v, |_| {
                let mut t = format!("{}/{} oracle agreements\n", s.oracle_agreements, s.cases);
                t.push_str(&format!("{} mesh violations\n", s.mesh_violations));
                if let Some(f) = first {
                    t.push_str(&format!(
                        "first counterexample (case {}): {}\n{}",
                        f.case, f.reason, f.graph
                    ));
                }
                t
            });
            if !s.ok() {
                out.code = 1;
            }
            Ok(out)
        }
        Command::Dot { file } => {
            let (a, _) = load_analysis(file, &cfg)?;
            let body = labelana::dot::to_dot(&a.space, &a.lattice.cores);
            Ok(match cli.format {
                Format::Text => Output { body, code: 0 },
                Format::Json => Output {
                    body: render_json(&json!({"schema": SCHEMA, "dot": body})),
                    code: 0,
                },
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            print!("{}", out.body);
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprint!("{}", render_json(&report::error_json(&e)));
            ExitCode::from(e.kind().exit_code() as u8)
        }
    }
}
