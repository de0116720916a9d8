//! Exact-length reachability in one free-group projection of a labeled graph.
//!
//! Each edge carries at most one letter of a free group. [`ProjectedReach`]
//! answers: is there a walk from `u` to `v` of exactly `len` edges whose
//! letters multiply to a given reduced word? Any such walk reads
//! `B₀ p₁ B₁ p₂ ⋯ p_m B_m` where the `pᵢ` spell the word and each `Bᵢ`
//! freely reduces to the identity, so the question reduces to the length
//! sets of balanced walks between vertex pairs. Those are saturated once,
//! Dyck-style; queries then sweep the target word letter by letter.
//!
//! Used as a sound filter by the flat-path and chain searches: a state whose
//! X- or Y-projection cannot finish in the remaining steps is dead.

use std::collections::HashMap;

use crate::words::Generator;

/// Fixed-width set of lengths `0..=max`.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Lengths {
    words: Vec<u64>,
}

impl Lengths {
    fn empty(max: usize) -> Self {
        Lengths {
            words: vec![0; max / 64 + 1],
        }
    }

    fn max(&self) -> usize {
        self.words.len() * 64 - 1
    }

    fn insert(&mut self, i: usize) {
        if i <= self.max() {
            self.words[i / 64] |= 1 << (i % 64);
        }
    }

    fn contains(&self, i: usize) -> bool {
        i <= self.max() && self.words[i / 64] >> (i % 64) & 1 == 1
    }

    fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// `self |= other << shift`, truncated; returns whether anything changed.
    fn or_shifted(&mut self, other: &Lengths, shift: usize) -> bool {
        let (ws, bs) = (shift / 64, shift % 64);
        let mut changed = false;
        for i in (ws..self.words.len()).rev() {
            let src = i - ws;
            let mut v = other.words[src] << bs;
            if bs > 0 && src > 0 {
                v |= other.words[src - 1] >> (64 - bs);
            }
            let merged = self.words[i] | v;
            if merged != self.words[i] {
                self.words[i] = merged;
                changed = true;
            }
        }
        changed
    }

    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut bits = w;
            std::iter::from_fn(move || {
                if bits == 0 {
                    return None;
                }
                let b = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(wi * 64 + b)
            })
        })
    }

    /// `self |= a + b` (Minkowski sum), truncated; returns whether anything changed.
    fn or_sumset(&mut self, a: &Lengths, b: &Lengths) -> bool {
        let mut changed = false;
        for i in a.iter() {
            changed |= self.or_shifted(b, i);
        }
        changed
    }
}

/// Exact-length spelling oracle for a graph whose edges carry at most one
/// letter of one free group.
#[derive(Debug, Clone)]
pub struct ProjectedReach {
    vertices: usize,
    max_len: usize,
    /// `balanced[u * vertices + w]`: lengths of walks `u → w` reducing to 1.
    balanced: Vec<Lengths>,
    by_letter: HashMap<Generator, Vec<(usize, usize)>>,
}

impl ProjectedReach {
    /// `edges` are `(source, target, letter)`; lengths above `max_len` are
    /// not tracked, so queries must stay within it.
    pub fn new(vertices: usize, edges: &[(usize, usize, Option<Generator>)], max_len: usize) -> Self {
        let mut balanced = vec![Lengths::empty(max_len); vertices * vertices];
        let mut by_letter: HashMap<Generator, Vec<(usize, usize)>> = HashMap::new();
        for v in 0..vertices {
            balanced[v * vertices + v].insert(0);
        }
        for &(s, t, letter) in edges {
            match letter {
                None => balanced[s * vertices + t].insert(1),
                Some(g) => by_letter.entry(g).or_default().push((s, t)),
            }
        }
        let mut pairs: Vec<((usize, usize), (usize, usize))> = Vec::new();
        for (g, opens) in &by_letter {
            if let Some(closes) = by_letter.get(&g.inverse()) {
                for &o in opens {
                    for &c in closes {
                        pairs.push((o, c));
                    }
                }
            }
        }
        let idx = |a: usize, b: usize| a * vertices + b;
        loop {
            let mut changed = false;
            for &((u, u1), (w1, w)) in &pairs {
                let inner = balanced[idx(u1, w1)].clone();
                if !inner.is_empty() {
                    changed |= balanced[idx(u, w)].or_shifted(&inner, 2);
                }
            }
            for u in 0..vertices {
                for v in 0..vertices {
                    if balanced[idx(u, v)].is_empty() {
                        continue;
                    }
                    for w in 0..vertices {
                        if balanced[idx(v, w)].is_empty() {
                            continue;
                        }
                        let (a, b) = (balanced[idx(u, v)].clone(), balanced[idx(v, w)].clone());
                        changed |= balanced[idx(u, w)].or_sumset(&a, &b);
                    }
                }
            }
            if !changed {
                break;
            }
        }
        ProjectedReach {
            vertices,
            max_len: balanced.first().map_or(max_len, Lengths::max),
            balanced,
            by_letter,
        }
    }

    pub fn max_len(&self) -> usize {
        self.max_len
    }

    /// Whether some walk `from → to` with exactly `len` edges spells `word`.
    pub fn can_spell(&self, from: usize, word: &[Generator], to: usize, len: usize) -> bool {
        assert!(len <= self.max_len, "query length {len} above tracked maximum {}", self.max_len);
        if word.len() > len {
            return false;
        }
        let n = self.vertices;
        let mut cur: Vec<Lengths> = (0..n).map(|w| self.balanced[from * n + w].clone()).collect();
        for g in word {
            let mut stepped = vec![Lengths::empty(self.max_len); n];
            let mut any = false;
            if let Some(edges) = self.by_letter.get(g) {
                for &(a, b) in edges {
                    if !cur[a].is_empty() {
                        stepped[b].or_shifted(&cur[a], 1);
                        any = true;
                    }
                }
            }
            if !any {
                return false;
            }
            let mut next = vec![Lengths::empty(self.max_len); n];
            for (v, lens) in stepped.iter().enumerate() {
                if lens.is_empty() {
                    continue;
                }
                for (w, slot) in next.iter_mut().enumerate() {
                    slot.or_sumset(lens, &self.balanced[v * n + w]);
                }
            }
            cur = next;
        }
        cur[to].contains(len)
    }
}
