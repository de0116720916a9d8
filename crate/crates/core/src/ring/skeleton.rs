//! Structural certificates that let the pruned search follow chains instead
//! of arbitrary products.
//!
//! A generator set is *chain-shaped* when every X-word reads `a⁻¹ · m · b`
//! with `a`, `b` drawn from a set `Q` of "state letters" and `m` free of `Q`.
//! If in addition no nonempty product of the generators is trivial in the
//! X-factor, the reduced X-word of any product `g₁ ⋯ gₙ` splits into blocks
//! `a⁻¹ · w · b`, one per maximal run whose junctions satisfy `bᵢ = aᵢ₊₁`.
//! The number of `Q`-letters is then `2 + 2·(breaks)`, which is what the
//! search uses to discard whole families of sequences.

use std::collections::{BTreeSet, HashMap};

use crate::words::{Generator, ReducedWord, Sign};

/// `a⁻¹ · interior · b` decomposition of one X-word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct ChainShape {
    /// Index of `a`.
    pub enter: u16,
    pub interior: ReducedWord,
    /// Index of `b`.
    pub exit: u16,
}

/// Chain shapes for every word, using the smallest admissible state-letter
/// set, or `None` when some word does not fit.
pub(crate) fn chain_shapes(words: &[&ReducedWord]) -> Option<(BTreeSet<u16>, Vec<ChainShape>)> {
    let mut states = BTreeSet::new();
    for w in words {
        let first = w.first()?;
        let last = w.last()?;
        if w.len() < 2 || first.sign != Sign::Neg || last.sign != Sign::Pos {
            return None;
        }
        states.insert(first.index);
        states.insert(last.index);
    }
    let mut shapes = Vec::with_capacity(words.len());
    for w in words {
        let letters = w.letters();
        let inner = &letters[1..letters.len() - 1];
        if inner.iter().any(|g| states.contains(&g.index)) {
            return None;
        }
        let interior = ReducedWord::reduce(w.alphabet(), inner.iter().copied())
            .expect("letters of one word share an alphabet");
        shapes.push(ChainShape {
            enter: letters[0].index,
            interior,
            exit: letters[letters.len() - 1].index,
        });
    }
    Some((states, shapes))
}

/// Splits a target X-word into `(a, interior, b)` when it has exactly the
/// block form `a⁻¹ · m · b` relative to `states`.
pub(crate) fn split_block(w: &ReducedWord, states: &BTreeSet<u16>) -> Option<(u16, ReducedWord, u16)> {
    let letters = w.letters();
    if letters.len() < 2 {
        return None;
    }
    let (first, last) = (letters[0], letters[letters.len() - 1]);
    if first.sign != Sign::Neg || last.sign != Sign::Pos {
        return None;
    }
    if !states.contains(&first.index) || !states.contains(&last.index) {
        return None;
    }
    let inner = &letters[1..letters.len() - 1];
    if inner.iter().any(|g| states.contains(&g.index)) {
        return None;
    }
    let interior = ReducedWord::reduce(w.alphabet(), inner.iter().copied()).ok()?;
    Some((first.index, interior, last.index))
}

/// Number of letters of `w` whose generator lies in `states`.
pub(crate) fn state_letter_count(w: &ReducedWord, states: &BTreeSet<u16>) -> usize {
    w.letters().iter().filter(|g| states.contains(&g.index)).count()
}

/// Decides whether some nonempty product of the given words is trivial.
///
/// The words become loops through a hub vertex of a nondeterministic
/// automaton, one edge per letter. A product is trivial exactly when some
/// closed walk at the hub spells a word that freely reduces to the identity,
/// i.e. a Dyck-style balanced word. Balanced reachability is saturated with
/// the usual context-free closure rules (wrap a matched letter pair around a
/// balanced segment, concatenate balanced segments), tracking separately
/// whether at least one letter was consumed.
pub(crate) fn admits_trivial_product(words: &[&[Generator]]) -> bool {
    if words.iter().any(|w| w.is_empty()) {
        return true;
    }
    let mut edges: Vec<(usize, Generator, usize)> = Vec::new();
    let mut nodes = 1usize;
    for w in words {
        let mut prev = 0usize;
        for (i, g) in w.iter().enumerate() {
            let next = if i + 1 == w.len() {
                0
            } else {
                nodes += 1;
                nodes - 1
            };
            edges.push((prev, *g, next));
            prev = next;
        }
    }
    let n = nodes;
    let mut outgoing: Vec<Vec<(Generator, usize)>> = vec![Vec::new(); n];
    let mut by_letter: HashMap<(usize, Generator), Vec<usize>> = HashMap::new();
    for &(s, g, t) in &edges {
        outgoing[s].push((g, t));
        by_letter.entry((s, g)).or_default().push(t);
    }

    // any[s][t]: balanced walk, possibly empty; nonempty[s][t]: at least one letter.
    let mut any = vec![vec![false; n]; n];
    let mut nonempty = vec![vec![false; n]; n];
    for (s, row) in any.iter_mut().enumerate() {
        row[s] = true;
    }
    loop {
        let mut changed = false;
        for s in 0..n {
            for &(g, s1) in &outgoing[s] {
                for t1 in 0..n {
                    if !any[s1][t1] {
                        continue;
                    }
                    // closing edge t1 --g⁻¹--> t
                    if let Some(targets) = by_letter.get(&(t1, g.inverse())) {
                        for &t in targets {
                            if !nonempty[s][t] {
                                nonempty[s][t] = true;
                                any[s][t] = true;
                                changed = true;
                            }
                        }
                    }
                }
            }
        }
        for s in 0..n {
            for t in 0..n {
                if !any[s][t] {
                    continue;
                }
                for u in 0..n {
                    if !any[t][u] {
                        continue;
                    }
                    if !any[s][u] {
                        any[s][u] = true;
                        changed = true;
                    }
                    if (nonempty[s][t] || nonempty[t][u]) && !nonempty[s][u] {
                        nonempty[s][u] = true;
                        changed = true;
                    }
                }
            }
        }
        if nonempty[0][0] {
            return true;
        }
        if !changed {
            return false;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::{Alphabet, AlphabetId};

    fn alphabet() -> Alphabet {
        Alphabet::new(AlphabetId::X, ["p", "q", "r", "a", "b"])
    }

    fn words(ab: &Alphabet, texts: &[&str]) -> Vec<ReducedWord> {
        texts.iter().map(|t| ab.parse_word(t).unwrap()).collect()
    }

    fn trivial(ws: &[ReducedWord]) -> bool {
        let slices: Vec<&[Generator]> = ws.iter().map(|w| w.letters()).collect();
        admits_trivial_product(&slices)
    }

    #[test]
    fn inverse_pair_is_detected() {
        let ab = alphabet();
        assert!(trivial(&words(&ab, &["a b", "b^-1 a^-1"])));
        assert!(trivial(&words(&ab, &["a"  , "a^-1"])));
        assert!(!trivial(&words(&ab, &["a", "b"])));
    }

    #[test]
    fn longer_relations_are_detected() {
        let ab = alphabet();
        // (a b)(b^-1 q)(q^-1 a^-1) = 1 needs three factors
        assert!(trivial(&words(&ab, &["a b", "b^-1 q", "q^-1 a^-1"])));
        // a^2 and a^-3 combine as a^2 a^2 a^2 a^-3 a^-3
        assert!(trivial(&words(&ab, &["a a", "a^-1 a^-1 a^-1"])));
        assert!(!trivial(&words(&ab, &["a a", "b^-1 b^-1 b^-1"])));
    }

    #[test]
    fn commutator_style_sets() {
        let ab = alphabet();
        // every product of these is a nonempty positive word in a, b
        assert!(!trivial(&words(&ab, &["a b a", "b b"])));
        // the commutator of the generators uses all four
        assert!(trivial(&words(&ab, &["a", "b", "a^-1", "b^-1"])));
    }

    #[test]
    fn shapes_use_minimal_state_set() {
        let ab = alphabet();
        let ws = words(&ab, &["p^-1 a q", "q^-1 b^-1 r", "r^-1 p"]);
        let refs: Vec<&ReducedWord> = ws.iter().collect();
        let (states, shapes) = chain_shapes(&refs).unwrap();
        assert_eq!(states.into_iter().collect::<Vec<_>>(), vec![0, 1, 2]);
        assert_eq!(shapes[0].enter, 0);
        assert_eq!(shapes[0].exit, 1);
        assert_eq!(ab.format_word(&shapes[1].interior), "b^-1");
        assert!(shapes[2].interior.is_identity());
    }

    #[test]
    fn shapes_reject_state_letter_inside() {
        let ab = alphabet();
        let ws = words(&ab, &["p^-1 q a q", "q^-1 p"]);
        let refs: Vec<&ReducedWord> = ws.iter().collect();
        assert!(chain_shapes(&refs).is_none());
        let ws = words(&ab, &["p a q"]);
        let refs: Vec<&ReducedWord> = ws.iter().collect();
        assert!(chain_shapes(&refs).is_none());
    }

    #[test]
    fn block_split_and_count() {
        let ab = alphabet();
        let states: BTreeSet<u16> = [0, 1, 2].into_iter().collect();
        let w = ab.parse_word("p^-1 a b r").unwrap();
        let (a, m, b) = split_block(&w, &states).unwrap();
        assert_eq!((a, b), (0, 2));
        assert_eq!(ab.format_word(&m), "a b");
        assert_eq!(state_letter_count(&w, &states), 2);
        assert!(split_block(&ab.parse_word("p a r").unwrap(), &states).is_none());
        assert!(split_block(&ab.parse_word("p^-1 q r").unwrap(), &states).is_none());
    }
}
