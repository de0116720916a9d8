//! Memoized depth-first count of weighted products equal to a target.
//!
//! The baseline strategy explores reduced partial products and discards a
//! state once the distance to the target exceeds what the remaining steps
//! could possibly cancel. When the generator set carries a chain certificate
//! (see [`super::skeleton`]) the search instead walks along chains, where a
//! partial product is summarised by its interior word, its Y-word and the
//! state letter it currently ends in. Both strategies compute the same
//! number; tests confront them on small inputs.

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::skeleton::{admits_trivial_product, chain_shapes, split_block, state_letter_count, ChainShape};
use super::RingError;
use crate::reach::ProjectedReach;
use crate::words::{Generator, PairElement, ReducedWord};
use crate::{BudgetExceeded, DEFAULT_BUDGET};

/// Knobs for [`PrunedSearch`].
#[derive(Debug, Clone)]
pub struct SearchOptions {
    /// Reduce coefficients modulo this value (at least 2).
    pub modulus: Option<u64>,
    /// Maximum number of memo entries before giving up.
    pub budget: usize,
    /// Skip the chain certificate and use length pruning only.
    pub length_only: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            modulus: None,
            budget: DEFAULT_BUDGET,
            length_only: false,
        }
    }
}

/// Strategy picked for a query.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PruneMode {
    /// The certificate shows the count vanishes for every `n ≥ 1`.
    Vanishing,
    /// Products forming a single block `a⁻¹ · m · b` that must match the target.
    Chain,
    /// Identity target reached only by closed chains through one non-unit generator.
    Cyclic,
    /// Plain distance-to-target pruning.
    Length,
}

struct Gen {
    elem: PairElement,
    weight: BigInt,
    shape: Option<ChainShape>,
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct LengthKey {
    partial: PairElement,
    remaining: u32,
    ctx: u64,
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct ChainKey {
    start: u16,
    interior: ReducedWord,
    y: ReducedWord,
    last: u16,
    remaining: u32,
    ctx: u64,
}

/// A reusable pruned counter for one generator set and one target.
///
/// The memo survives between calls to [`PrunedSearch::count`], so sweeping
/// `n` upwards shares work.
pub struct PrunedSearch {
    gens: Vec<Gen>,
    target: PairElement,
    modulus: Option<u64>,
    budget: usize,
    mode: PruneMode,
    lambda_x: usize,
    lambda_y: usize,
    lambda_interior: usize,
    /// For `Chain`: the target's `(a, interior, b)`.
    block: Option<(u16, ReducedWord, u16)>,
    /// Generators grouped by entering state letter.
    by_enter: HashMap<u16, Vec<usize>>,
    /// Dense vertex number of each state letter, for the projection filters.
    vertex_of: HashMap<u16, usize>,
    /// Interior and Y projections of the chain graph, when labels are short.
    filters: Option<(ProjectedReach, ProjectedReach)>,
    length_memo: HashMap<LengthKey, BigInt>,
    chain_memo: HashMap<ChainKey, BigInt>,
}

impl PrunedSearch {
    pub fn new(
        gens: &[(PairElement, BigInt)],
        target: &PairElement,
        opts: &SearchOptions,
    ) -> Result<Self, RingError> {
        if let Some(m) = opts.modulus {
            if m < 2 {
                return Err(RingError::BadModulus(m));
            }
        }
        let mut merged: Vec<(PairElement, BigInt)> = Vec::new();
        for (g, w) in gens {
            match merged.iter_mut().find(|(h, _)| h == g) {
                Some(entry) => entry.1 += w,
                None => merged.push((g.clone(), w.clone())),
            }
        }
        let mut list: Vec<Gen> = merged
            .into_iter()
            .filter_map(|(elem, w)| {
                let weight = match opts.modulus {
                    Some(m) => w.mod_floor(&BigInt::from(m)),
                    None => w,
                };
                (!weight.is_zero()).then_some(Gen {
                    elem,
                    weight,
                    shape: None,
                })
            })
            .collect();
        list.sort_by(|a, b| a.elem.cmp(&b.elem));

        let lambda_x = list.iter().map(|g| g.elem.x_part().len()).max().unwrap_or(0);
        let lambda_y = list.iter().map(|g| g.elem.y_part().len()).max().unwrap_or(0);
        let mut search = PrunedSearch {
            gens: list,
            target: target.clone(),
            modulus: opts.modulus,
            budget: opts.budget,
            mode: PruneMode::Length,
            lambda_x,
            lambda_y,
            lambda_interior: 0,
            block: None,
            by_enter: HashMap::new(),
            vertex_of: HashMap::new(),
            filters: None,
            length_memo: HashMap::new(),
            chain_memo: HashMap::new(),
        };
        if !opts.length_only {
            search.certify();
        }
        Ok(search)
    }

    /// Tries to upgrade from length pruning to one of the chain strategies.
    fn certify(&mut self) {
        let x_words: Vec<&ReducedWord> = self.gens.iter().map(|g| g.elem.x_part()).collect();
        let Some((states, shapes)) = chain_shapes(&x_words) else {
            return;
        };
        let is_unit = |w: &BigInt| match self.modulus {
            None => true,
            Some(m) => w.gcd(&BigInt::from(m)).is_one(),
        };
        let units: Vec<usize> = (0..self.gens.len()).filter(|&i| is_unit(&self.gens[i].weight)).collect();
        let others: Vec<usize> = (0..self.gens.len()).filter(|&i| !is_unit(&self.gens[i].weight)).collect();
        let unit_words: Vec<&[Generator]> = units.iter().map(|&i| self.gens[i].elem.x_part().letters()).collect();
        if admits_trivial_product(&unit_words) {
            return;
        }

        let mode = if others.is_empty() {
            self.single_block_mode(&states)
        } else {
            // One non-unit use at most: products of two non-unit weights vanish.
            let m = BigInt::from(self.modulus.expect("non-units only exist modulo m"));
            let absorbing = others.iter().all(|&i| {
                others
                    .iter()
                    .all(|&j| (&self.gens[i].weight * &self.gens[j].weight).mod_floor(&m).is_zero())
            });
            if absorbing && self.target.is_identity() {
                Some(PruneMode::Cyclic)
            } else {
                None
            }
        };
        let Some(mode) = mode else {
            return;
        };
        self.mode = mode;
        if mode == PruneMode::Vanishing {
            return;
        }
        self.lambda_interior = shapes.iter().map(|s| s.interior.len()).max().unwrap_or(0);
        self.vertex_of = states.iter().enumerate().map(|(i, &q)| (q, i)).collect();
        for (i, shape) in shapes.into_iter().enumerate() {
            self.by_enter.entry(shape.enter).or_default().push(i);
            self.gens[i].shape = Some(shape);
        }
    }

    /// Every generator is certified; classify by the target's state letters.
    fn single_block_mode(&mut self, states: &BTreeSet<u16>) -> Option<PruneMode> {
        let q = state_letter_count(self.target.x_part(), states);
        if q % 2 == 1 || q == 0 {
            // Products always carry 2 + 2·breaks state letters.
            return Some(PruneMode::Vanishing);
        }
        if q > 2 {
            return None;
        }
        match split_block(self.target.x_part(), states) {
            Some(block) => {
                self.block = Some(block);
                Some(PruneMode::Chain)
            }
            None => Some(PruneMode::Vanishing),
        }
    }

    /// Builds (or widens) the projection filters of the chain graph.
    ///
    /// Chains are walks in a graph on the state letters with one edge per
    /// generator, labelled by its interior and Y-words. With at most one
    /// letter per label and factor, [`ProjectedReach`] decides per factor
    /// whether a state can still reach its goal in the remaining steps.
    fn prepare_filters(&mut self, n: usize) {
        if !matches!(self.mode, PruneMode::Chain | PruneMode::Cyclic)
            || self.lambda_interior > 1
            || self.lambda_y > 1
        {
            return;
        }
        if self.filters.as_ref().is_some_and(|(f, _)| f.max_len() >= n) {
            return;
        }
        let project = |interior: bool| -> Vec<(usize, usize, Option<Generator>)> {
            self.gens
                .iter()
                .map(|g| {
                    let shape = g.shape.as_ref().expect("certified generator");
                    let letter = if interior { shape.interior.first() } else { g.elem.y_part().first() };
                    (self.vertex_of[&shape.enter], self.vertex_of[&shape.exit], letter)
                })
                .collect()
        };
        let nv = self.vertex_of.len();
        let max_len = n.max(64);
        self.filters = Some((
            ProjectedReach::new(nv, &project(true), max_len),
            ProjectedReach::new(nv, &project(false), max_len),
        ));
    }

    fn live(&self, key: &ChainKey, interior_goal: &ReducedWord, y_goal: &ReducedWord, exit_goal: u16) -> bool {
        let Some((fi, fy)) = &self.filters else {
            return true;
        };
        let from = self.vertex_of[&key.last];
        let to = self.vertex_of[&exit_goal];
        let r = key.remaining as usize;
        let need_i = key.interior.invert().mul_same(interior_goal);
        let need_y = key.y.invert().mul_same(y_goal);
        fi.can_spell(from, need_i.letters(), to, r) && fy.can_spell(from, need_y.letters(), to, r)
    }

    pub fn mode(&self) -> PruneMode {
        self.mode
    }

    /// Entries currently held in the memo tables.
    pub fn memo_len(&self) -> usize {
        self.length_memo.len() + self.chain_memo.len()
    }

    fn ctx0(&self) -> u64 {
        self.modulus.unwrap_or(0)
    }

    fn reduce(value: BigInt, ctx: u64) -> BigInt {
        if ctx == 0 {
            value
        } else {
            value.mod_floor(&BigInt::from(ctx))
        }
    }

    /// Weight seen in context `ctx`, plus the context for the remainder.
    ///
    /// Modulo `m`, `w · N` only depends on `N` modulo `m / gcd(w, m)`.
    fn split_weight(weight: &BigInt, ctx: u64) -> Option<(BigInt, u64)> {
        if ctx == 0 {
            return Some((weight.clone(), 0));
        }
        let w = weight.mod_floor(&BigInt::from(ctx));
        if w.is_zero() {
            return None;
        }
        let g = w.gcd(&BigInt::from(ctx)).to_u64().expect("gcd divides a u64");
        Some((w, ctx / g))
    }

    fn check_budget(&self) -> Result<(), RingError> {
        if self.memo_len() > self.budget {
            return Err(BudgetExceeded {
                what: "pruned search memo",
                limit: self.budget,
            }
            .into());
        }
        Ok(())
    }

    /// Weighted number of length-`n` products equal to the target.
    pub fn count(&mut self, n: usize) -> Result<BigInt, RingError> {
        let ctx = self.ctx0();
        if n == 0 {
            let v = if self.target.is_identity() { BigInt::one() } else { BigInt::zero() };
            return Ok(Self::reduce(v, ctx));
        }
        let remaining = u32::try_from(n).expect("step count fits in u32");
        self.prepare_filters(n);
        match self.mode {
            PruneMode::Vanishing => Ok(BigInt::zero()),
            PruneMode::Length => self.length_count(PairElement::identity(), remaining, ctx),
            PruneMode::Chain => {
                let (enter, _, _) = self.block.clone().expect("chain mode has a target block");
                self.chain_root(Some(enter), remaining, ctx)
            }
            PruneMode::Cyclic => self.chain_root(None, remaining, ctx),
        }
    }

    fn length_count(&mut self, partial: PairElement, remaining: u32, ctx: u64) -> Result<BigInt, RingError> {
        if remaining == 0 {
            return Ok(if partial == self.target { BigInt::one() } else { BigInt::zero() });
        }
        let r = remaining as usize;
        if partial.x_part().distance(self.target.x_part()) > self.lambda_x * r
            || partial.y_part().distance(self.target.y_part()) > self.lambda_y * r
        {
            return Ok(BigInt::zero());
        }
        let key = LengthKey {
            partial,
            remaining,
            ctx,
        };
        if let Some(v) = self.length_memo.get(&key) {
            return Ok(v.clone());
        }
        let mut total = BigInt::zero();
        for i in 0..self.gens.len() {
            let Some((w, next_ctx)) = Self::split_weight(&self.gens[i].weight, ctx) else {
                continue;
            };
            let next = key.partial.mul(&self.gens[i].elem);
            let sub = self.length_count(next, remaining - 1, next_ctx)?;
            if !sub.is_zero() {
                total += w * sub;
            }
        }
        let total = Self::reduce(total, ctx);
        self.length_memo.insert(key, total.clone());
        self.check_budget()?;
        Ok(total)
    }

    /// First step of a chain walk. `enter` fixes the first state letter
    /// (single-block target); `None` lets every generator start a cycle.
    fn chain_root(&mut self, enter: Option<u16>, remaining: u32, ctx: u64) -> Result<BigInt, RingError> {
        let firsts: Vec<usize> = match enter {
            Some(a) => self.by_enter.get(&a).cloned().unwrap_or_default(),
            None => (0..self.gens.len()).collect(),
        };
        let mut total = BigInt::zero();
        for i in firsts {
            let Some((w, next_ctx)) = Self::split_weight(&self.gens[i].weight, ctx) else {
                continue;
            };
            let shape = self.gens[i].shape.clone().expect("certified generator");
            let key = ChainKey {
                start: shape.enter,
                interior: shape.interior,
                y: self.gens[i].elem.y_part().clone(),
                last: shape.exit,
                remaining: remaining - 1,
                ctx: next_ctx,
            };
            let sub = self.chain_count(key)?;
            if !sub.is_zero() {
                total += w * sub;
            }
        }
        Ok(Self::reduce(total, ctx))
    }

    fn chain_count(&mut self, key: ChainKey) -> Result<BigInt, RingError> {
        let r = key.remaining as usize;
        let (interior_goal, y_goal, exit_goal) = match &self.block {
            Some((_, interior, exit)) => (interior.clone(), self.target.y_part().clone(), *exit),
            None => (
                ReducedWord::identity(key.interior.alphabet()),
                ReducedWord::identity(key.y.alphabet()),
                key.start,
            ),
        };
        if r == 0 {
            let hit = key.interior == interior_goal && key.y == y_goal && key.last == exit_goal;
            return Ok(if hit { BigInt::one() } else { BigInt::zero() });
        }
        if key.interior.distance(&interior_goal) > self.lambda_interior * r
            || key.y.distance(&y_goal) > self.lambda_y * r
        {
            return Ok(BigInt::zero());
        }
        // The start letter only matters for closing a cycle.
        let key = if self.block.is_some() { ChainKey { start: 0, ..key } } else { key };
        if let Some(v) = self.chain_memo.get(&key) {
            return Ok(v.clone());
        }
        if !self.live(&key, &interior_goal, &y_goal, exit_goal) {
            self.chain_memo.insert(key, BigInt::zero());
            return Ok(BigInt::zero());
        }
        let nexts = self.by_enter.get(&key.last).cloned().unwrap_or_default();
        let mut total = BigInt::zero();
        for i in nexts {
            let Some((w, next_ctx)) = Self::split_weight(&self.gens[i].weight, key.ctx) else {
                continue;
            };
            let shape = self.gens[i].shape.as_ref().expect("certified generator");
            let next = ChainKey {
                start: key.start,
                interior: key.interior.mul_same(&shape.interior),
                y: key.y.mul_same(self.gens[i].elem.y_part()),
                last: shape.exit,
                remaining: key.remaining - 1,
                ctx: next_ctx,
            };
            let sub = self.chain_count(next)?;
            if !sub.is_zero() {
                total += w * sub;
            }
        }
        let total = Self::reduce(total, key.ctx);
        self.chain_memo.insert(key, total.clone());
        self.check_budget()?;
        Ok(total)
    }
}

/// One-shot weighted count of length-`n` products of `gens` equal to `target`.
pub fn pruned_identity_count(
    gens: &[(PairElement, BigInt)],
    n: usize,
    target: &PairElement,
    opts: &SearchOptions,
) -> Result<BigInt, RingError> {
    PrunedSearch::new(gens, target, opts)?.count(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::RingElement;
    use crate::words::PairAlphabet;

    fn gens(ab: &PairAlphabet, list: &[(&str, i64)]) -> Vec<(PairElement, BigInt)> {
        list.iter()
            .map(|(w, c)| (ab.parse_pair(w).unwrap(), BigInt::from(*c)))
            .collect()
    }

    /// Exhaustive enumeration of all `|gens|ⁿ` sequences.
    fn brute(gens: &[(PairElement, BigInt)], n: usize, target: &PairElement) -> BigInt {
        fn go(gens: &[(PairElement, BigInt)], n: usize, p: PairElement, t: &PairElement) -> BigInt {
            if n == 0 {
                return if &p == t { BigInt::one() } else { BigInt::zero() };
            }
            gens.iter()
                .map(|(g, w)| w * go(gens, n - 1, p.mul(g), t))
                .sum()
        }
        go(gens, n, PairElement::identity(), target)
    }

    #[test]
    fn rank_one_walk_counts() {
        let ab = PairAlphabet::free(1, 0);
        let g = gens(&ab, &[("a0", 1), ("a0^-1", 1)]);
        let id = PairElement::identity();
        let expect = [1, 0, 2, 0, 6, 0, 20];
        for (n, e) in expect.iter().enumerate() {
            let v = pruned_identity_count(&g, n, &id, &SearchOptions::default()).unwrap();
            assert_eq!(v, BigInt::from(*e), "n={n}");
        }
    }

    #[test]
    fn zero_steps_convention() {
        let ab = PairAlphabet::free(1, 1);
        let g = gens(&ab, &[("a0 b0", 3)]);
        let opts = SearchOptions::default();
        assert_eq!(pruned_identity_count(&g, 0, &PairElement::identity(), &opts).unwrap(), BigInt::one());
        let t = ab.parse_pair("a0").unwrap();
        assert_eq!(pruned_identity_count(&g, 0, &t, &opts).unwrap(), BigInt::zero());
    }

    #[test]
    fn matches_brute_force_on_mixed_weights() {
        let ab = PairAlphabet::free(2, 1);
        let g = gens(&ab, &[("a0 b0", 2), ("a0^-1", 1), ("a1 a0", -1), ("b0^-1", 3), ("a0^-1 a1^-1 b0^-1", 1)]);
        let targets = ["", "a0", "b0", "a1 a0 b0"];
        for t in targets {
            let t = ab.parse_pair(t).unwrap();
            for n in 0..=5 {
                let want = brute(&g, n, &t);
                let got = pruned_identity_count(&g, n, &t, &SearchOptions::default()).unwrap();
                assert_eq!(got, want, "n={n}");
                for m in [2u64, 4, 6] {
                    let opts = SearchOptions {
                        modulus: Some(m),
                        ..SearchOptions::default()
                    };
                    let got = pruned_identity_count(&g, n, &t, &opts).unwrap();
                    assert_eq!(got, want.mod_floor(&BigInt::from(m)), "n={n} m={m}");
                }
            }
        }
    }

    /// A toy chain-shaped set: states p, q, r with a loop p → p and a path
    /// p → q → r. Products never collapse in the X-factor.
    fn toy(ab: &PairAlphabet) -> Vec<(PairElement, BigInt)> {
        gens(
            ab,
            &[
                ("a0^-1 a3 a0 b0", 1),
                ("a0^-1 a1", 1),
                ("a1^-1 a3^-1 a1 b0^-1", 1),
                ("a1^-1 a2", 1),
                ("a2^-1 a3^-1 a2", 1),
            ],
        )
    }

    #[test]
    fn chain_mode_agrees_with_length_mode() {
        let ab = PairAlphabet::free(4, 1);
        let g = toy(&ab);
        let t = ab.parse_pair("a0^-1 a2").unwrap();
        let mut chain = PrunedSearch::new(&g, &t, &SearchOptions::default()).unwrap();
        assert_eq!(chain.mode(), PruneMode::Chain);
        let opts = SearchOptions {
            length_only: true,
            ..SearchOptions::default()
        };
        let mut plain = PrunedSearch::new(&g, &t, &opts).unwrap();
        assert_eq!(plain.mode(), PruneMode::Length);
        for n in 0..=9 {
            let a = chain.count(n).unwrap();
            assert_eq!(a, plain.count(n).unwrap(), "n={n}");
            if n <= 6 {
                assert_eq!(a, brute(&g, n, &t), "n={n}");
            }
        }
        // k loops at p, p -> q, k loops at q, q -> r: one product per even length
        assert_eq!(chain.count(2).unwrap(), BigInt::one());
        assert_eq!(chain.count(4).unwrap(), BigInt::one());
        assert_eq!(chain.count(5).unwrap(), BigInt::zero());
    }

    #[test]
    fn vanishing_certificate_for_identity() {
        let ab = PairAlphabet::free(4, 1);
        let g = toy(&ab);
        let mut s = PrunedSearch::new(&g, &PairElement::identity(), &SearchOptions::default()).unwrap();
        assert_eq!(s.mode(), PruneMode::Vanishing);
        for n in 1..=6 {
            assert!(s.count(n).unwrap().is_zero());
            assert!(brute(&g, n, &PairElement::identity()).is_zero());
        }
    }

    #[test]
    fn cyclic_mode_with_absorbing_weight() {
        let ab = PairAlphabet::free(4, 1);
        let mut g = toy(&ab);
        g.push((ab.parse_pair("a2^-1 a0").unwrap(), BigInt::from(2)));
        let id = PairElement::identity();
        let opts = SearchOptions {
            modulus: Some(4),
            ..SearchOptions::default()
        };
        let mut s = PrunedSearch::new(&g, &id, &opts).unwrap();
        assert_eq!(s.mode(), PruneMode::Cyclic);
        let length_opts = SearchOptions {
            length_only: true,
            ..opts.clone()
        };
        let mut plain = PrunedSearch::new(&g, &id, &length_opts).unwrap();
        for n in 0..=9 {
            let v = s.count(n).unwrap();
            assert_eq!(v, plain.count(n).unwrap(), "n={n}");
            if n <= 6 {
                assert_eq!(v, brute(&g, n, &id).mod_floor(&BigInt::from(4)), "n={n}");
            }
        }
        // five rotations of the unique length-5 cycle, each weighted 2
        assert_eq!(s.count(5).unwrap(), BigInt::from(10).mod_floor(&BigInt::from(4)));
        assert!(s.count(6).unwrap().is_zero());
    }

    #[test]
    fn agrees_with_ring_powers() {
        let ab = PairAlphabet::free(4, 1);
        let mut g = toy(&ab);
        g.push((ab.parse_pair("a2^-1 a0").unwrap(), BigInt::from(2)));
        let u = RingElement::from_terms(g.clone(), None).unwrap();
        for n in 0..=7 {
            let direct = u.coeff_at_identity_pow(n, 1 << 20).unwrap();
            let searched = pruned_identity_count(&g, n, &PairElement::identity(), &SearchOptions::default()).unwrap();
            assert_eq!(direct, searched, "n={n}");
        }
    }

    #[test]
    fn budget_is_enforced() {
        let ab = PairAlphabet::free(3, 0);
        let g = gens(&ab, &[("a0", 1), ("a1", 1), ("a2", 1), ("a0^-1", 1), ("a1^-1", 1), ("a2^-1", 1)]);
        let opts = SearchOptions {
            budget: 50,
            ..SearchOptions::default()
        };
        let err = pruned_identity_count(&g, 10, &PairElement::identity(), &opts).unwrap_err();
        assert!(matches!(err, RingError::Budget(_)));
    }
}
