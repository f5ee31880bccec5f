//! Finite labeled graphs: parsing, validation and edge-level range maps.
//!
//! Vertices are indexed in declaration order and that order fixes the bit
//! index used by [`VertexSet`] everywhere else in the crate. Letters are
//! indexed in order of first appearance on an edge.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::ops::{BitAnd, BitOr, Not, Sub};

use serde::Deserialize;

use crate::error::GraphError;

/// Hard ceiling imposed by the `u64` set representation.
pub const MAX_REPRESENTABLE_VERTICES: usize = 64;

/// A set of vertices stored as a bitmask over vertex indices.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct VertexSet(u64);

impl VertexSet {
    pub const EMPTY: VertexSet = VertexSet(0);

    pub const fn from_bits(bits: u64) -> Self {
        VertexSet(bits)
    }

    pub const fn bits(self) -> u64 {
        self.0
    }

    pub fn singleton(v: usize) -> Self {
        VertexSet(1u64 << v)
    }

    /// The set `{0, .., n-1}`.
    pub fn first(n: usize) -> Self {
        if n >= 64 {
            VertexSet(u64::MAX)
        } else {
            VertexSet((1u64 << n) - 1)
        }
    }

    pub fn contains(self, v: usize) -> bool {
        v < 64 && self.0 >> v & 1 == 1
    }

    pub fn insert(&mut self, v: usize) {
        self.0 |= 1u64 << v;
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_subset(self, other: VertexSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_proper_subset(self, other: VertexSet) -> bool {
        self.is_subset(other) && self != other
    }

    pub fn intersects(self, other: VertexSet) -> bool {
        self.0 & other.0 != 0
    }

    /// Smallest member, if any.
    pub fn first_vertex(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let v = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(v)
            }
        })
    }
}

impl BitOr for VertexSet {
    type Output = VertexSet;
    fn bitor(self, rhs: Self) -> Self {
        VertexSet(self.0 | rhs.0)
    }
}

impl BitAnd for VertexSet {
    type Output = VertexSet;
    fn bitand(self, rhs: Self) -> Self {
        VertexSet(self.0 & rhs.0)
    }
}

impl Sub for VertexSet {
    type Output = VertexSet;
    fn sub(self, rhs: Self) -> Self {
        VertexSet(self.0 & !rhs.0)
    }
}

impl Not for VertexSet {
    type Output = VertexSet;
    fn not(self) -> Self {
        VertexSet(!self.0)
    }
}

impl FromIterator<usize> for VertexSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut s = VertexSet::EMPTY;
        for v in iter {
            s.insert(v);
        }
        s
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Index of a letter in the graph's alphabet.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Letter(pub u16);

impl Letter {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A nonempty finite sequence of letters. The empty word is never a `Word`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn new(letters: Vec<Letter>) -> Option<Word> {
        (!letters.is_empty()).then_some(Word(letters))
    }

    pub fn single(a: Letter) -> Word {
        Word(vec![a])
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn first(&self) -> Letter {
        self.0[0]
    }

    pub fn push(&mut self, a: Letter) {
        self.0.push(a);
    }

    pub fn extended(&self, a: Letter) -> Word {
        let mut w = self.clone();
        w.push(a);
        w
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn pow(&self, k: usize) -> Word {
        assert!(k >= 1, "word power must be positive");
        Word(self.0.repeat(k))
    }

    /// Shortlex order: shorter first, then lexicographic by letter index.
    pub fn shortlex_cmp(&self, other: &Word) -> std::cmp::Ordering {
        self.len().cmp(&other.len()).then_with(|| self.0.cmp(&other.0))
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Edge {
    pub src: usize,
    pub dst: usize,
    pub label: Letter,
}

/// Size caps applied during validation.
#[derive(Clone, Copy, Debug)]
pub struct Limits {
    pub max_vertices: usize,
    pub max_edges: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_vertices: 64,
            max_edges: 10_000,
        }
    }
}

/// A validated finite labeled graph with no sinks.
///
/// Immutable after construction.
#[derive(Clone, Debug)]
pub struct LabeledGraph {
    name: String,
    vertices: Vec<String>,
    alphabet: Vec<String>,
    edges: Vec<Edge>,
    // succ[letter][vertex] = ranges of `letter`-edges leaving `vertex`
    succ: Vec<Vec<VertexSet>>,
    all_succ: Vec<VertexSet>,
    sources: VertexSet,
}

/// A graph together with the warnings raised while validating it.
#[derive(Clone, Debug)]
pub struct Parsed {
    pub graph: LabeledGraph,
    pub warnings: Vec<String>,
}

impl LabeledGraph {
    #[allow(clippy::new_ret_no_self)]
    /// Builds and validates a graph from named vertices and `(src, dst, label)` triples.
    pub fn new<S: AsRef<str>>(
        name: &str,
        vertices: &[S],
        edges: &[(S, S, S)],
        limits: Limits,
    ) -> Result<Parsed, GraphError> {
        let mut b = Builder::new(limits);
        b.name = name.to_string();
        for v in vertices {
            b.vertex(v.as_ref())?;
        }
        for (s, d, l) in edges {
            b.edge(s.as_ref(), d.as_ref(), l.as_ref(), None)?;
        }
        b.finish()
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertex_names(&self) -> &[String] {
        &self.vertices
    }

    pub fn vertex_name(&self, v: usize) -> &str {
        &self.vertices[v]
    }

    pub fn vertex_index(&self, id: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == id)
    }

    pub fn letter_count(&self) -> usize {
        self.alphabet.len()
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> + Clone {
        (0..self.alphabet.len() as u16).map(Letter)
    }

    pub fn letter_name(&self, a: Letter) -> &str {
        &self.alphabet[a.index()]
    }

    pub fn letter_by_name(&self, s: &str) -> Option<Letter> {
        self.alphabet.iter().position(|l| l == s).map(|i| Letter(i as u16))
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn all_vertices(&self) -> VertexSet {
        VertexSet::first(self.vertices.len())
    }

    /// Vertices that receive no edge.
    pub fn sources(&self) -> VertexSet {
        self.sources
    }

    /// Vertices that are not sources.
    pub fn omega0(&self) -> VertexSet {
        self.all_vertices() - self.sources
    }

    /// `{r(e) : s(e) ∈ A, label(e) = a}`.
    pub fn letter_range(&self, set: VertexSet, a: Letter) -> VertexSet {
        let row = &self.succ[a.index()];
        set.iter().fold(VertexSet::EMPTY, |acc, v| acc | row[v])
    }

    /// Left fold of [`letter_range`](Self::letter_range) along a word.
    pub fn word_range(&self, set: VertexSet, word: &Word) -> VertexSet {
        word.letters().iter().fold(set, |acc, &a| self.letter_range(acc, a))
    }

    /// `r(a)`: ranges of all `a`-labeled edges.
    pub fn range_of_letter(&self, a: Letter) -> VertexSet {
        self.letter_range(self.all_vertices(), a)
    }

    /// Vertices reachable in one step from `set`, ignoring labels.
    pub fn successors(&self, set: VertexSet) -> VertexSet {
        set.iter().fold(VertexSet::EMPTY, |acc, v| acc | self.all_succ[v])
    }

    pub fn format_set(&self, set: VertexSet) -> Vec<String> {
        set.iter().map(|v| self.vertices[v].clone()).collect()
    }

    pub fn format_word(&self, w: &Word) -> Vec<String> {
        w.letters().iter().map(|&a| self.alphabet[a.index()].clone()).collect()
    }

    /// Whether distinct edges carry distinct labels.
    pub fn is_injectively_labeled(&self) -> bool {
        self.alphabet.len() == self.edges.len()
    }

    /// Serializes to the `.lgr` text format.
    pub fn to_lgr(&self) -> String {
        let mut out = String::new();
        if !self.name.is_empty() {
            out.push_str(&format!("graph {}\n", self.name));
        }
        out.push_str("vertex");
        for v in &self.vertices {
            out.push(' ');
            out.push_str(v);
        }
        out.push('\n');
        for e in &self.edges {
            out.push_str(&format!(
                "edge {} {} : {}\n",
                self.vertices[e.src],
                self.vertices[e.dst],
                self.alphabet[e.label.index()]
            ));
        }
        out
    }

    /// A copy of this graph where every edge gets its own fresh label.
    pub fn with_trivial_labeling(&self) -> LabeledGraph {
        let edges: Vec<(String, String, String)> = self
            .edges
            .iter()
            .enumerate()
            .map(|(i, e)| {
                (
                    self.vertices[e.src].clone(),
                    self.vertices[e.dst].clone(),
                    format!("e{i}"),
                )
            })
            .collect();
        let limits = Limits {
            max_vertices: MAX_REPRESENTABLE_VERTICES,
            max_edges: usize::MAX,
        };
        LabeledGraph::new(&self.name, &self.vertices, &edges, limits)
            .expect("relabeling a valid graph stays valid")
            .graph
    }
}

struct Builder {
    limits: Limits,
    name: String,
    vertices: Vec<String>,
    index: HashMap<String, usize>,
    alphabet: Vec<String>,
    letter_index: HashMap<String, u16>,
    edges: Vec<Edge>,
    seen: BTreeSet<(usize, usize, u16)>,
}

impl Builder {
    fn new(limits: Limits) -> Self {
        Builder {
            limits,
            name: String::new(),
            vertices: Vec::new(),
            index: HashMap::new(),
            alphabet: Vec::new(),
            letter_index: HashMap::new(),
            edges: Vec::new(),
            seen: BTreeSet::new(),
        }
    }

    fn vertex(&mut self, id: &str) -> Result<(), GraphError> {
        check_token(id, None)?;
        if self.index.contains_key(id) {
            return Err(GraphError::DuplicateVertex(id.to_string()));
        }
        let cap = self.limits.max_vertices.min(MAX_REPRESENTABLE_VERTICES);
        if self.vertices.len() >= cap {
            return Err(GraphError::TooManyVertices { limit: cap });
        }
        self.index.insert(id.to_string(), self.vertices.len());
        self.vertices.push(id.to_string());
        Ok(())
    }

    fn edge(&mut self, src: &str, dst: &str, label: &str, line: Option<usize>) -> Result<(), GraphError> {
        check_token(label, line)?;
        let lookup = |id: &str| {
            self.index.get(id).copied().ok_or_else(|| GraphError::UnknownVertex {
                line,
                id: id.to_string(),
            })
        };
        let (s, d) = (lookup(src)?, lookup(dst)?);
        let next = self.alphabet.len() as u16;
        let l = *self.letter_index.entry(label.to_string()).or_insert(next);
        if l == next {
            self.alphabet.push(label.to_string());
        }
        if !self.seen.insert((s, d, l)) {
            return Err(GraphError::DuplicateEdge {
                src: src.to_string(),
                dst: dst.to_string(),
                label: label.to_string(),
            });
        }
        if self.edges.len() >= self.limits.max_edges {
            return Err(GraphError::TooManyEdges {
                limit: self.limits.max_edges,
            });
        }
        self.edges.push(Edge {
            src: s,
            dst: d,
            label: Letter(l),
        });
        Ok(())
    }

    fn finish(self) -> Result<Parsed, GraphError> {
        if self.vertices.is_empty() {
            return Err(GraphError::NoVertices);
        }
        let n = self.vertices.len();
        let mut succ = vec![vec![VertexSet::EMPTY; n]; self.alphabet.len()];
        let mut all_succ = vec![VertexSet::EMPTY; n];
        let mut received = VertexSet::EMPTY;
        for e in &self.edges {
            succ[e.label.index()][e.src].insert(e.dst);
            all_succ[e.src].insert(e.dst);
            received.insert(e.dst);
        }
        if let Some(v) = (0..n).find(|&v| all_succ[v].is_empty()) {
            return Err(GraphError::Sink(self.vertices[v].clone()));
        }
        let sources = VertexSet::first(n) - received;
        let mut warnings = Vec::new();
        if !sources.is_empty() {
            let names: Vec<&str> = sources.iter().map(|v| self.vertices[v].as_str()).collect();
            warnings.push(format!(
                "source vertices (receive no edge, excluded from every set): {}",
                names.join(" ")
            ));
        }
        Ok(Parsed {
            graph: LabeledGraph {
                name: self.name,
                vertices: self.vertices,
                alphabet: self.alphabet,
                edges: self.edges,
                succ,
                all_succ,
                sources,
            },
            warnings,
        })
    }
}

fn check_token(tok: &str, line: Option<usize>) -> Result<(), GraphError> {
    let ok = !tok.is_empty()
        && tok
            .chars()
            .all(|c| c.is_ascii() && !c.is_ascii_whitespace() && !c.is_ascii_control() && c != ':');
    if ok {
        Ok(())
    } else {
        Err(GraphError::Parse {
            line,
            message: format!("invalid identifier {tok:?}"),
        })
    }
}

#[derive(Deserialize)]
struct JsonGraph {
    #[serde(default)]
    name: String,
    vertices: Vec<String>,
    edges: Vec<JsonEdge>,
}

#[derive(Deserialize)]
struct JsonEdge {
    src: String,
    dst: String,
    label: String,
}

/// Parses either the `.lgr` line format or the JSON object format.
///
/// The JSON form is selected when the first non-blank character is `{`.
pub fn parse(text: &str, limits: Limits) -> Result<Parsed, GraphError> {
    if text.trim_start().starts_with('{') {
        parse_json(text, limits)
    } else {
        parse_lgr(text, limits)
    }
}

pub fn parse_json(text: &str, limits: Limits) -> Result<Parsed, GraphError> {
    let g: JsonGraph = serde_json::from_str(text).map_err(|e| GraphError::Parse {
        line: Some(e.line()),
        message: e.to_string(),
    })?;
    let mut b = Builder::new(limits);
    check_name(&g.name, None)?;
    b.name = g.name;
    for v in &g.vertices {
        b.vertex(v)?;
    }
    for e in &g.edges {
        b.edge(&e.src, &e.dst, &e.label, None)?;
    }
    b.finish()
}

pub fn parse_lgr(text: &str, limits: Limits) -> Result<Parsed, GraphError> {
    let mut b = Builder::new(limits);
    let mut named = false;
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        };
        let mut toks = line.split_whitespace();
        let Some(kw) = toks.next() else { continue };
        let err = |message: String| GraphError::Parse {
            line: Some(lineno),
            message,
        };
        match kw {
            "graph" => {
                if named {
                    return Err(err("duplicate `graph` line".into()));
                }
                let name = toks.next().ok_or_else(|| err("`graph` needs a name".into()))?;
                if toks.next().is_some() {
                    return Err(err("`graph` takes exactly one name".into()));
                }
                check_name(name, Some(lineno))?;
                b.name = name.to_string();
                named = true;
            }
            "vertex" => {
                let ids: Vec<&str> = toks.collect();
                if ids.is_empty() {
                    return Err(err("`vertex` needs at least one identifier".into()));
                }
                for id in ids {
                    check_token(id, Some(lineno))?;
                    b.vertex(id)?;
                }
            }
            "edge" => {
                // `edge SRC DST : LABEL`, tolerant of `DST:` / `:LABEL` spacing.
                let rest: Vec<&str> = toks.collect();
                let joined = rest.join(" ");
                let (lhs, label) = joined
                    .split_once(':')
                    .ok_or_else(|| err("expected `edge SRC DST : LABEL`".into()))?;
                let ends: Vec<&str> = lhs.split_whitespace().collect();
                let label = label.trim();
                if ends.len() != 2 || label.is_empty() || label.contains(char::is_whitespace) {
                    return Err(err("expected `edge SRC DST : LABEL`".into()));
                }
                b.edge(ends[0], ends[1], label, Some(lineno))?;
            }
            other => return Err(err(format!("unknown directive `{other}`"))),
        }
    }
    b.finish()
}

fn check_name(name: &str, line: Option<usize>) -> Result<(), GraphError> {
    if name.is_empty() {
        return Ok(());
    }
    check_token(name, line)
}
