//! Labeled digraphs whose edges carry elements of `F_X × F_Y`, and counts of
//! *flat* paths: paths whose label products are trivial in both factors.
//!
//! The crate ships one such automaton, `Γ` (see [`gamma`]), whose flat
//! accepting lengths are described exactly by [`length_formula`] and
//! [`b_closed_form`].
//!
//! # Text format
//!
//! One directive per line; `#` starts a comment; blank lines are ignored.
//!
//! ```text
//! vertex <name>
//! edge <source> <target> : <label>
//! source <name>
//! sink <name>
//! ```
//!
//! Vertices must be declared before they are used. The label is a pair word
//! in the token syntax of [`crate::words`] (`x y`, `1x^-1 0y`, ...); an empty
//! label after the colon is the identity. `source` and `sink` appear exactly
//! once each.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::reach::ProjectedReach;
use crate::words::{PairAlphabet, PairElement, WordError};
use crate::{BudgetExceeded, DEFAULT_BUDGET};

const GAMMA_TEXT: &str = include_str!("../fixtures/gamma.aut");

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AutomatonError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: {source}")]
    Label { line: usize, source: WordError },
    #[error("digit position {j} out of range for k = {k}")]
    DigitOutOfRange { k: u64, j: u32 },
    #[error("loop count must be at least 1")]
    ZeroLoopCount,
    #[error(transparent)]
    Budget(#[from] BudgetExceeded),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub source: usize,
    pub target: usize,
    pub label: PairElement,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledAutomaton {
    alphabet: PairAlphabet,
    vertices: Vec<String>,
    edges: Vec<Edge>,
    source: usize,
    sink: usize,
}

/// One accepting path together with the running label products.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathCertificate {
    /// Edge indices in traversal order.
    pub edges: Vec<usize>,
    /// `products[i]` is the product of the first `i + 1` labels.
    pub products: Vec<PairElement>,
}

impl PathCertificate {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

/// The automaton `Γ` over the standard alphabets.
pub fn gamma() -> LabeledAutomaton {
    LabeledAutomaton::parse(GAMMA_TEXT, PairAlphabet::standard()).expect("bundled automaton parses")
}

/// The bundled text of `Γ`.
pub fn gamma_text() -> &'static str {
    GAMMA_TEXT
}

fn parse_err(line: usize, message: impl Into<String>) -> AutomatonError {
    AutomatonError::Parse {
        line,
        message: message.into(),
    }
}

impl LabeledAutomaton {
    pub fn parse(text: &str, alphabet: PairAlphabet) -> Result<Self, AutomatonError> {
        let mut vertices: Vec<String> = Vec::new();
        let mut index: HashMap<String, usize> = HashMap::new();
        let mut edges = Vec::new();
        let mut source = None;
        let mut sink = None;
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut tokens = line.split_whitespace();
            let keyword = tokens.next().expect("nonempty line");
            let lookup = |name: Option<&str>| -> Result<usize, AutomatonError> {
                let name = name.ok_or_else(|| parse_err(line_no, "missing vertex name"))?;
                index
                    .get(name)
                    .copied()
                    .ok_or_else(|| parse_err(line_no, format!("unknown vertex {name:?}")))
            };
            match keyword {
                "vertex" => {
                    let name = tokens.next().ok_or_else(|| parse_err(line_no, "missing vertex name"))?;
                    if tokens.next().is_some() {
                        return Err(parse_err(line_no, "trailing tokens after vertex name"));
                    }
                    if index.contains_key(name) {
                        return Err(parse_err(line_no, format!("duplicate vertex {name:?}")));
                    }
                    index.insert(name.to_string(), vertices.len());
                    vertices.push(name.to_string());
                }
                "edge" => {
                    let (head, label) = line
                        .split_once(':')
                        .ok_or_else(|| parse_err(line_no, "edge needs ':' before its label"))?;
                    let mut head = head.split_whitespace().skip(1);
                    let s = lookup(head.next())?;
                    let t = lookup(head.next())?;
                    if head.next().is_some() {
                        return Err(parse_err(line_no, "edge takes exactly two vertices"));
                    }
                    let label = alphabet
                        .parse_pair(label)
                        .map_err(|source| AutomatonError::Label { line: line_no, source })?;
                    edges.push(Edge {
                        source: s,
                        target: t,
                        label,
                    });
                }
                "source" | "sink" => {
                    let v = lookup(tokens.next())?;
                    if tokens.next().is_some() {
                        return Err(parse_err(line_no, format!("trailing tokens after {keyword}")));
                    }
                    let slot = if keyword == "source" { &mut source } else { &mut sink };
                    if slot.replace(v).is_some() {
                        return Err(parse_err(line_no, format!("{keyword} given twice")));
                    }
                }
                other => return Err(parse_err(line_no, format!("unknown directive {other:?}"))),
            }
        }
        let last = text.lines().count();
        Ok(LabeledAutomaton {
            alphabet,
            vertices,
            edges,
            source: source.ok_or_else(|| parse_err(last, "no source declared"))?,
            sink: sink.ok_or_else(|| parse_err(last, "no sink declared"))?,
        })
    }

    /// Canonical text: vertices, edges, then source and sink, no comments.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for v in &self.vertices {
            out.push_str(&format!("vertex {v}\n"));
        }
        for e in &self.edges {
            let label = self.alphabet.format_pair(&e.label);
            let sep = if label.is_empty() { "" } else { " " };
            out.push_str(&format!(
                "edge {} {} :{sep}{label}\n",
                self.vertices[e.source], self.vertices[e.target]
            ));
        }
        out.push_str(&format!("source {}\n", self.vertices[self.source]));
        out.push_str(&format!("sink {}\n", self.vertices[self.sink]));
        out
    }

    /// Hex SHA-256 of [`LabeledAutomaton::to_text`].
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.to_text().as_bytes()))
    }

    pub fn alphabet(&self) -> &PairAlphabet {
        &self.alphabet
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn sink(&self) -> usize {
        self.sink
    }

    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == name)
    }

    /// Product of the labels along `edges`, or `None` if they are not adjacent.
    pub fn replay(&self, edges: &[usize]) -> Option<PairElement> {
        let mut at = self.source;
        let mut acc = PairElement::identity();
        for &i in edges {
            let e = self.edges.get(i)?;
            if e.source != at {
                return None;
            }
            acc = acc.mul(&e.label);
            at = e.target;
        }
        Some(acc)
    }

    /// Counts source-to-sink paths of length `n` with trivial label product.
    pub fn count_flat_paths(&self, n: usize) -> Result<BigInt, AutomatonError> {
        FlatSearch::new(self, DEFAULT_BUDGET).count(n)
    }

    pub fn count_flat_paths_budgeted(&self, n: usize, budget: usize) -> Result<BigInt, AutomatonError> {
        FlatSearch::new(self, budget).count(n)
    }

    /// Every accepting path of length `n`, in lexicographic order of edge indices.
    pub fn enumerate_flat_paths(&self, n: usize, budget: usize) -> Result<Vec<PathCertificate>, AutomatonError> {
        let mut search = FlatSearch::new(self, budget);
        search.prepare(n);
        let mut out = Vec::new();
        let mut path = Vec::new();
        let mut products = Vec::new();
        search.collect(self.source, PairElement::identity(), n, &mut path, &mut products, &mut out)?;
        Ok(out)
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct FlatKey {
    vertex: usize,
    partial: PairElement,
    remaining: usize,
}

/// Memoized DFS over `(vertex, ω_X, ω_Y, steps remaining)`.
///
/// A label contributes at most `lambda_x` letters to X and `lambda_y` to Y,
/// so a partial product that is longer than that many letters per remaining
/// step cannot return to the identity and is dropped. States from which the
/// sink is unreachable in the remaining number of steps are dropped too.
///
/// When every label has at most one letter per factor, each factor is also
/// checked on its own with [`ProjectedReach`]: the rest of the path must
/// spell `ω⁻¹` in that factor in exactly the remaining number of steps.
/// Without this filter the search drowns in partial products that can never
/// be cancelled.
pub struct FlatSearch<'a> {
    automaton: &'a LabeledAutomaton,
    out_edges: Vec<Vec<usize>>,
    /// Fewest edges from each vertex to the sink.
    to_sink: Vec<usize>,
    lambda_x: usize,
    lambda_y: usize,
    budget: usize,
    filters: Option<(ProjectedReach, ProjectedReach)>,
    memo: HashMap<FlatKey, BigInt>,
}

impl<'a> FlatSearch<'a> {
    pub fn new(automaton: &'a LabeledAutomaton, budget: usize) -> Self {
        let nv = automaton.vertices.len();
        let mut out_edges = vec![Vec::new(); nv];
        for (i, e) in automaton.edges.iter().enumerate() {
            out_edges[e.source].push(i);
        }
        let mut to_sink = vec![usize::MAX; nv];
        to_sink[automaton.sink] = 0;
        let mut changed = true;
        while changed {
            changed = false;
            for e in &automaton.edges {
                let via = to_sink[e.target].saturating_add(1);
                if via < to_sink[e.source] {
                    to_sink[e.source] = via;
                    changed = true;
                }
            }
        }
        let lambda_x = automaton.edges.iter().map(|e| e.label.x_part().len()).max().unwrap_or(0);
        let lambda_y = automaton.edges.iter().map(|e| e.label.y_part().len()).max().unwrap_or(0);
        FlatSearch {
            automaton,
            out_edges,
            to_sink,
            lambda_x,
            lambda_y,
            budget,
            filters: None,
            memo: HashMap::new(),
        }
    }

    /// Builds (or widens) the projection filters to cover lengths up to `n`.
    fn prepare(&mut self, n: usize) {
        if self.lambda_x > 1 || self.lambda_y > 1 {
            return;
        }
        if self.filters.as_ref().is_some_and(|(fx, _)| fx.max_len() >= n) {
            return;
        }
        let max_len = n.max(64);
        let nv = self.automaton.vertices.len();
        let project = |x: bool| -> Vec<(usize, usize, Option<crate::words::Generator>)> {
            self.automaton
                .edges
                .iter()
                .map(|e| {
                    let w = if x { e.label.x_part() } else { e.label.y_part() };
                    (e.source, e.target, w.first())
                })
                .collect()
        };
        let fx = ProjectedReach::new(nv, &project(true), max_len);
        let fy = ProjectedReach::new(nv, &project(false), max_len);
        self.filters = Some((fx, fy));
    }

    fn live(&self, vertex: usize, partial: &PairElement, remaining: usize) -> bool {
        let Some((fx, fy)) = &self.filters else {
            return true;
        };
        let sink = self.automaton.sink;
        fx.can_spell(vertex, partial.x_part().invert().letters(), sink, remaining)
            && fy.can_spell(vertex, partial.y_part().invert().letters(), sink, remaining)
    }

    pub fn memo_len(&self) -> usize {
        self.memo.len()
    }

    pub fn count(&mut self, n: usize) -> Result<BigInt, AutomatonError> {
        self.prepare(n);
        self.go(self.automaton.source, PairElement::identity(), n)
    }

    fn hopeless(&self, vertex: usize, partial: &PairElement, remaining: usize) -> bool {
        self.to_sink[vertex] > remaining
            || partial.x_part().len() > self.lambda_x * remaining
            || partial.y_part().len() > self.lambda_y * remaining
    }

    fn go(&mut self, vertex: usize, partial: PairElement, remaining: usize) -> Result<BigInt, AutomatonError> {
        if remaining == 0 {
            let hit = vertex == self.automaton.sink && partial.is_identity();
            return Ok(if hit { BigInt::one() } else { BigInt::zero() });
        }
        if self.hopeless(vertex, &partial, remaining) {
            return Ok(BigInt::zero());
        }
        let key = FlatKey {
            vertex,
            partial,
            remaining,
        };
        if let Some(v) = self.memo.get(&key) {
            return Ok(v.clone());
        }
        if !self.live(vertex, &key.partial, remaining) {
            self.memo.insert(key, BigInt::zero());
            return Ok(BigInt::zero());
        }
        let mut total = BigInt::zero();
        for idx in 0..self.out_edges[vertex].len() {
            let e = &self.automaton.edges[self.out_edges[vertex][idx]];
            let next = key.partial.mul(&e.label);
            total += self.go(e.target, next, remaining - 1)?;
        }
        self.memo.insert(key, total.clone());
        if self.memo.len() > self.budget {
            return Err(BudgetExceeded {
                what: "flat path memo",
                limit: self.budget,
            }
            .into());
        }
        Ok(total)
    }

    fn collect(
        &mut self,
        vertex: usize,
        partial: PairElement,
        remaining: usize,
        path: &mut Vec<usize>,
        products: &mut Vec<PairElement>,
        out: &mut Vec<PathCertificate>,
    ) -> Result<(), AutomatonError> {
        if remaining == 0 {
            if vertex == self.automaton.sink && partial.is_identity() {
                out.push(PathCertificate {
                    edges: path.clone(),
                    products: products.clone(),
                });
            }
            return Ok(());
        }
        if self.go(vertex, partial.clone(), remaining)?.is_zero() {
            return Ok(());
        }
        for idx in 0..self.out_edges[vertex].len() {
            let ei = self.out_edges[vertex][idx];
            let e = &self.automaton.edges[ei];
            let target = e.target;
            let next = partial.mul(&e.label);
            path.push(ei);
            products.push(next.clone());
            self.collect(target, next, remaining - 1, path, products, out)?;
            path.pop();
            products.pop();
        }
        Ok(())
    }
}

fn bit_length(k: u64) -> u32 {
    64 - k.leading_zeros()
}

/// `Σ_{i=1}^{k} ⌊log₂ i⌋`, in closed form: with `m = ⌊log₂ k⌋` the sum is
/// `(k + 1)·m − 2^{m+1} + 2`.
pub fn sum_floor_log2(k: u64) -> u64 {
    if k == 0 {
        return 0;
    }
    let m = u64::from(bit_length(k) - 1);
    (k + 1) * m + 2 - (1u64 << (m + 1))
}

/// `L(k, j) = j + 6k + 2·Σ_{i=1}^{k} ⌊log₂ i⌋`, the length of the flat
/// accepting path of `Γ` that loops `k` times at the source and leaves the
/// final counter at its `j`-th digit.
pub fn length_formula(k: u64, j: u32) -> Result<u64, AutomatonError> {
    if k == 0 {
        return Err(AutomatonError::ZeroLoopCount);
    }
    if j == 0 || j > bit_length(k) {
        return Err(AutomatonError::DigitOutOfRange { k, j });
    }
    Ok(u64::from(j) + 6 * k + 2 * sum_floor_log2(k))
}

/// `b_n` from the closed form: 1 iff `n = L(k, j)` where digit `j` of `k` is 1.
///
/// Digits are numbered from the most significant end: digit 1 is the leading
/// 1 of `k`. The flat-path count of `Γ` fixes this orientation, since the
/// final counter is erased from its units end and each digit left behind
/// costs an extra step.
pub fn b_closed_form(n: u64) -> u8 {
    if n < 7 {
        return 0;
    }
    // Largest k with L(k, 1) ≤ n; L(k, 1) ≥ 6k so k ≤ n / 6.
    let base = |k: u64| 1 + 6 * k + 2 * sum_floor_log2(k);
    let (mut lo, mut hi) = (1u64, n / 6 + 1);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if base(mid) <= n {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let k = lo;
    let j = n - base(k) + 1;
    if j > u64::from(bit_length(k)) {
        return 0;
    }
    digit(k, j as u32)
}

/// Digit `j` of `k`, counting from the most significant end.
fn digit(k: u64, j: u32) -> u8 {
    ((k >> (bit_length(k) - j)) & 1) as u8
}

/// `b_{L(k,1)} … b_{L(k, ⌊1 + log₂ k⌋)}`, which spells `k` in binary in the
/// usual order, most significant digit first.
pub fn digit_window(k: u64) -> Result<Vec<u8>, AutomatonError> {
    if k == 0 {
        return Err(AutomatonError::ZeroLoopCount);
    }
    (1..=bit_length(k))
        .map(|j| length_formula(k, j).map(b_closed_form))
        .collect()
}

/// `b_1 … b_len` as bits.
pub fn b_prefix(len: u64) -> Vec<u8> {
    (1..=len).map(b_closed_form).collect()
}
