//! The witness element `u ∈ ℤ[F₁₁ × F₃]` built from the edges of `Γ`, its
//! link with flat paths, matrix realizations inside `SL(2,ℤ)` and `SL(4,ℤ)`,
//! and the free-group return counts behind the two-generating-set example.

use num_bigint::BigInt;
use num_integer::{binomial, Integer};
use num_traits::{One, ToPrimitive, Zero};

use crate::automaton::{self, FlatSearch, LabeledAutomaton};
use crate::matrix::IntMatrix;
use crate::ring::{PrunedSearch, RingElement, RingError, SearchOptions};
use crate::words::{AlphabetId, Generator, PairAlphabet, PairElement, ReducedWord, Sign, WordError};
use crate::Error;

const WITNESS_TEXT: &str = include_str!("../fixtures/witness_s.txt");

/// `z₁ … z₁₉`, one per edge of `Γ`, as `s_i⁻¹ · label · s_j`.
pub const WITNESS_Z: [&str; 19] = [
    "s1^-1 x y s1",
    "s1^-1 s2",
    "s2^-1 1x^-1 0y s2",
    "s2^-1 0x^-1 1y s3",
    "s3^-1 1x^-1 1y s3",
    "s3^-1 0x^-1 0y s3",
    "s3^-1 x^-1 s4",
    "s2^-1 1y x^-1 s4",
    "s4^-1 1y^-1 1x s4",
    "s4^-1 0y^-1 0x s4",
    "s4^-1 y^-1 s5",
    "s5^-1 s2",
    "s5^-1 s6",
    "s6^-1 1x^-1 s6",
    "s6^-1 0x^-1 s6",
    "s6^-1 1x^-1 s8",
    "s7^-1 s8",
    "s8^-1 1x^-1 s7",
    "s8^-1 0x^-1 s7",
];

/// The generator set `S` together with the doubled closing term.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessSet {
    pub z: Vec<PairElement>,
    /// `s₈⁻¹ s₁`, which enters `u` with coefficient 2.
    pub special: PairElement,
    pub special_weight: BigInt,
}

impl WitnessSet {
    pub fn standard() -> Self {
        let ab = PairAlphabet::standard();
        WitnessSet {
            z: WITNESS_Z.iter().map(|t| ab.parse_pair(t).expect("valid witness word")).collect(),
            special: ab.parse_pair("s8^-1 s1").expect("valid word"),
            special_weight: BigInt::from(2),
        }
    }

    /// Parses the line-per-element fixture format (`#` comments allowed).
    pub fn parse_list(text: &str, ab: &PairAlphabet) -> Result<Vec<PairElement>, WordError> {
        text.lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty())
            .map(|l| ab.parse_pair(l))
            .collect()
    }

    /// The bundled fixture text.
    pub fn fixture_text() -> &'static str {
        WITNESS_TEXT
    }

    /// `s_i⁻¹ · r · s_j` for every edge `s_i → s_j` labelled `r`, where the
    /// vertex names are read as X generators.
    pub fn edge_elements(aut: &LabeledAutomaton) -> Result<Vec<PairElement>, WordError> {
        let ab = aut.alphabet();
        let state = |v: usize| -> Result<Generator, WordError> {
            let name = &aut.vertices()[v];
            ab.x.by_name(name)
                .ok_or_else(|| WordError::UnknownName(name.clone()))
        };
        aut.edges()
            .iter()
            .map(|e| {
                let enter = PairElement::from_letters([state(e.source)?.inverse()])?;
                let exit = PairElement::from_letters([state(e.target)?])?;
                Ok(enter.mul(&e.label).mul(&exit))
            })
            .collect()
    }

    /// `(z, 1)` for each `z ∈ S`.
    pub fn s_terms(&self) -> Vec<(PairElement, BigInt)> {
        self.z.iter().map(|z| (z.clone(), BigInt::one())).collect()
    }

    /// The 20 weighted terms of `u`.
    pub fn u_terms(&self) -> Vec<(PairElement, BigInt)> {
        let mut t = self.s_terms();
        t.push((self.special.clone(), self.special_weight.clone()));
        t
    }
}

/// `u = 2·s₈⁻¹s₁ + Σ zᵢ`.
pub fn witness_u() -> RingElement {
    RingElement::from_terms(WitnessSet::standard().u_terms(), None).expect("exact mode")
}

/// `s₁⁻¹ s₈`, the element counted by the correspondence with `Γ`.
pub fn correspondence_target() -> PairElement {
    PairAlphabet::standard().parse_pair("s1^-1 s8").expect("valid word")
}

/// `[1]u^{2n+1} mod 4` from the closed form: `2·(2n+1)·b_{2n}`.
pub fn a_odd_mod4(n: u64) -> u8 {
    let b = u64::from(automaton::b_closed_form(2 * n));
    ((2 * (2 * n + 1) * b) % 4) as u8
}

/// One line of the `S`-products versus flat-paths comparison.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorrespondenceRow {
    pub n: usize,
    /// Length-`n` products of `S` equal to `s₁⁻¹s₈`.
    pub products: BigInt,
    /// Flat accepting paths of `Γ` of length `n`.
    pub paths: BigInt,
}

impl CorrespondenceRow {
    pub fn agrees(&self) -> bool {
        self.products == self.paths
    }
}

/// Both counts for every `n ≤ max_n`, sharing memo tables across `n`.
pub fn correspondence_table(max_n: usize, budget: usize) -> Result<Vec<CorrespondenceRow>, Error> {
    let set = WitnessSet::standard();
    let opts = SearchOptions {
        budget,
        ..SearchOptions::default()
    };
    let mut search = PrunedSearch::new(&set.s_terms(), &correspondence_target(), &opts)?;
    let gamma = automaton::gamma();
    let mut flat = FlatSearch::new(&gamma, budget);
    (0..=max_n)
        .map(|n| {
            Ok(CorrespondenceRow {
                n,
                products: search.count(n)?,
                paths: flat.count(n)?,
            })
        })
        .collect()
}

pub fn verify_correspondence(n: usize, budget: usize) -> Result<bool, Error> {
    Ok(correspondence_table(n, budget)?.last().expect("row for n").agrees())
}

/// `[1]uⁿ mod 4` by pruned search over the 20 weighted terms of `u`.
pub fn brute_force_u_mod4(n: usize, budget: usize) -> Result<u8, RingError> {
    let opts = SearchOptions {
        modulus: Some(4),
        budget,
        length_only: false,
    };
    let v = crate::ring::pruned_identity_count(&WitnessSet::standard().u_terms(), n, &PairElement::identity(), &opts)?;
    Ok(v.to_u8().expect("residue below 4"))
}

// ---------------------------------------------------------------------------
// Matrix realizations

fn sanov_generator(index: u16, sign: Sign) -> IntMatrix {
    let rows: [[i64; 2]; 2] = match (index, sign) {
        (0, Sign::Pos) => [[1, 2], [0, 1]],
        (0, Sign::Neg) => [[1, -2], [0, 1]],
        (_, Sign::Pos) => [[1, 0], [2, 1]],
        (_, Sign::Neg) => [[1, 0], [-2, 1]],
    };
    IntMatrix::from_i64(&[&rows[0], &rows[1]]).expect("2x2")
}

/// Image of a word over `{a, b}` under `a ↦ [[1,2],[0,1]]`, `b ↦ [[1,0],[2,1]]`.
pub fn sanov_matrix(w: &ReducedWord) -> Result<IntMatrix, WordError> {
    let mut m = IntMatrix::identity(2);
    for g in w.letters() {
        if g.index >= 2 {
            return Err(WordError::IndexOutOfRange {
                index: usize::from(g.index),
                rank: 2,
            });
        }
        m = m.mul(&sanov_generator(g.index, g.sign));
    }
    Ok(m)
}

/// Rewrites a word of any rank into `F₂ = ⟨a, b⟩` via `gᵢ ↦ aⁱ b a⁻ⁱ`.
pub fn embed_in_f2(w: &ReducedWord) -> ReducedWord {
    let a = |sign| Generator {
        alphabet: w.alphabet(),
        index: 0,
        sign,
    };
    let b = |sign| Generator {
        alphabet: w.alphabet(),
        index: 1,
        sign,
    };
    let mut letters = Vec::new();
    for g in w.letters() {
        let i = usize::from(g.index);
        letters.extend(std::iter::repeat_n(a(Sign::Pos), i));
        letters.push(b(g.sign));
        letters.extend(std::iter::repeat_n(a(Sign::Neg), i));
    }
    ReducedWord::reduce(w.alphabet(), letters).expect("single alphabet")
}

/// `gᵢ^{±1}` mapped through `aⁱ b a⁻ⁱ` and Sanov:
/// `[[1+4i, −8i²], [2, 1−4i]]` and its inverse.
fn conjugate_image(index: u16, sign: Sign) -> [i128; 4] {
    let i = i128::from(index);
    match sign {
        Sign::Pos => [1 + 4 * i, -8 * i * i, 2, 1 - 4 * i],
        Sign::Neg => [1 - 4 * i, 8 * i * i, -2, 1 + 4 * i],
    }
}

fn factor_matrix(w: &ReducedWord) -> IntMatrix {
    let mut m = IntMatrix::identity(2);
    for g in w.letters() {
        let e = conjugate_image(g.index, g.sign);
        let rows = [[e[0] as i64, e[1] as i64], [e[2] as i64, e[3] as i64]];
        m = m.mul(&IntMatrix::from_i64(&[&rows[0], &rows[1]]).expect("2x2"));
    }
    m
}

/// Block-diagonal realization of `F_j × F_k` in `SL(4,ℤ)`.
pub fn sl4_realize(e: &PairElement) -> IntMatrix {
    factor_matrix(e.x_part()).direct_sum(&factor_matrix(e.y_part()))
}

/// Outcome of an exhaustive injectivity scan of one free factor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaithfulnessReport {
    pub rank: usize,
    pub max_len: usize,
    /// Reduced words examined, identity included.
    pub words: u64,
    /// Two distinct words with the same image, if any.
    pub collision: Option<(ReducedWord, ReducedWord)>,
}

impl FaithfulnessReport {
    pub fn injective(&self) -> bool {
        self.collision.is_none()
    }
}

fn mul2(a: &[i128; 4], b: &[i128; 4]) -> [i128; 4] {
    let f = |x: i128, y: i128, z: i128, w: i128| {
        x.checked_mul(y)
            .and_then(|p| z.checked_mul(w).and_then(|q| p.checked_add(q)))
            .expect("entry overflow; lower the word length")
    };
    [
        f(a[0], b[0], a[1], b[2]),
        f(a[0], b[1], a[1], b[3]),
        f(a[2], b[0], a[3], b[2]),
        f(a[2], b[1], a[3], b[3]),
    ]
}

fn fingerprint(m: &[i128; 4]) -> u64 {
    let mix = |mut z: u64| {
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    };
    m.iter().fold(0x9e37_79b9_7f4a_7c15u64, |h, &e| mix(h ^ (e as u64) ^ ((e >> 64) as u64).rotate_left(17)))
}

fn decode_word(code: u64, rank: usize) -> ReducedWord {
    let base = 2 * rank as u64 + 1;
    let mut digits = Vec::new();
    let mut c = code;
    while c > 0 {
        digits.push(c % base);
        c /= base;
    }
    let letters = digits.into_iter().rev().map(|d| {
        let d = d - 1;
        Generator {
            alphabet: AlphabetId::X,
            index: (d / 2) as u16,
            sign: if d % 2 == 0 { Sign::Pos } else { Sign::Neg },
        }
    });
    ReducedWord::reduce(AlphabetId::X, letters).expect("single alphabet")
}

/// Checks that the conjugate-basis Sanov map of `F_rank` sends all reduced
/// words of length ≤ `max_len` to pairwise distinct matrices.
///
/// Words are enumerated depth-first with exact `i128` products. Images are
/// bucketed by a 64-bit fingerprint over `passes` rounds to bound memory;
/// equal fingerprints are re-checked with arbitrary-precision matrices.
pub fn check_factor_injective(rank: usize, max_len: usize, passes: u64) -> FaithfulnessReport {
    assert!(rank >= 1 && passes >= 1);
    let base = 2 * rank as u64 + 1;
    assert!(
        (max_len as u32) < 64 && base.checked_pow(max_len as u32).is_some(),
        "word codes must fit in u64"
    );
    let letters: Vec<(u16, Sign, [i128; 4])> = (0..rank as u16)
        .flat_map(|i| [Sign::Pos, Sign::Neg].map(|s| (i, s, conjugate_image(i, s))))
        .collect();

    struct Walk<'a> {
        letters: &'a [(u16, Sign, [i128; 4])],
        base: u64,
        max_len: usize,
        passes: u64,
        pass: u64,
        out: Vec<(u64, u64)>,
        count: u64,
    }
    impl Walk<'_> {
        fn visit(&mut self, m: &[i128; 4], code: u64, last: Option<(u16, Sign)>, depth: usize) {
            self.count += 1;
            let fp = fingerprint(m);
            if fp % self.passes == self.pass {
                self.out.push((fp, code));
            }
            if depth == self.max_len {
                return;
            }
            for (li, &(idx, sign, ref g)) in self.letters.iter().enumerate() {
                if last == Some((idx, sign.flip())) {
                    continue;
                }
                let next = mul2(m, g);
                self.visit(&next, code * self.base + li as u64 + 1, Some((idx, sign)), depth + 1);
            }
        }
    }

    let mut words = 0;
    for pass in 0..passes {
        let mut walk = Walk {
            letters: &letters,
            base,
            max_len,
            passes,
            pass,
            out: Vec::new(),
            count: 0,
        };
        walk.visit(&[1, 0, 0, 1], 0, None, 0);
        words = walk.count;
        let mut out = walk.out;
        out.sort_unstable();
        for pair in out.windows(2) {
            if pair[0].0 != pair[1].0 {
                continue;
            }
            let (w1, w2) = (decode_word(pair[0].1, rank), decode_word(pair[1].1, rank));
            if w1 != w2 && factor_matrix(&w1) == factor_matrix(&w2) {
                return FaithfulnessReport {
                    rank,
                    max_len,
                    words,
                    collision: Some((w1, w2)),
                };
            }
        }
    }
    FaithfulnessReport {
        rank,
        max_len,
        words,
        collision: None,
    }
}

// ---------------------------------------------------------------------------
// Free-group return counts and the two generating sets

/// Closed walks of length `n` at the identity of the Cayley tree of `F_rank`
/// with respect to the `2·rank` letters `gᵢ^{±1}`.
///
/// Radial recursion on the distance `d` from the identity: from `d = 0`
/// all `2·rank` letters step out, otherwise one letter steps in and
/// `2·rank − 1` step out.
pub fn free_return_count(rank: usize, n: usize) -> BigInt {
    free_return_count_with(rank, n, true)
}

/// As [`free_return_count`]; with `symmetric = false` only the positive
/// letters are used, and no nonempty product is trivial.
pub fn free_return_count_with(rank: usize, n: usize, symmetric: bool) -> BigInt {
    if !symmetric || rank == 0 {
        return if n == 0 { BigInt::one() } else { BigInt::zero() };
    }
    let out0 = BigInt::from(2 * rank);
    let out = BigInt::from(2 * rank - 1);
    let mut dist = vec![BigInt::one()];
    for _ in 0..n {
        let mut next = vec![BigInt::zero(); dist.len() + 1];
        for (d, c) in dist.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if d == 0 {
                next[1] += c * &out0;
            } else {
                next[d - 1] += c;
                next[d + 1] += c * &out;
            }
        }
        dist = next;
    }
    dist.swap_remove(0)
}

/// Letters of `(X × 1) ∪ (1 × Y)` for free factors of the given ranks.
pub fn product_generators(rank_x: usize, rank_y: usize, symmetric: bool) -> Vec<PairElement> {
    let signs: &[Sign] = if symmetric { &[Sign::Pos, Sign::Neg] } else { &[Sign::Pos] };
    let mut out = Vec::new();
    for (alphabet, rank) in [(AlphabetId::X, rank_x), (AlphabetId::Y, rank_y)] {
        for i in 0..rank {
            for &sign in signs {
                let g = Generator {
                    alphabet,
                    index: i as u16,
                    sign,
                };
                out.push(PairElement::from_letters([g]).expect("single letter"));
            }
        }
    }
    out
}

/// Both sides of the exponential-generating-function identity at step `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EgfCheck {
    pub n: usize,
    /// `[1]u₁ⁿ` by group-ring powers.
    pub direct: BigInt,
    /// `Σᵢ C(n,i) · r₁(i) · r₂(n−i)` from tree return counts.
    pub convolution: BigInt,
}

impl EgfCheck {
    pub fn holds(&self) -> bool {
        self.direct == self.convolution
    }
}

pub fn egf_convolution_check(
    n: usize,
    rank_x: usize,
    rank_y: usize,
    symmetric: bool,
    cap: usize,
) -> Result<EgfCheck, RingError> {
    let u1 = RingElement::from_terms(
        product_generators(rank_x, rank_y, symmetric)
            .into_iter()
            .map(|g| (g, BigInt::one())),
        None,
    )?;
    let direct = u1.coeff_at_identity_pow(n, cap)?;
    let convolution = (0..=n)
        .map(|i| {
            binomial(BigInt::from(n), BigInt::from(i))
                * free_return_count_with(rank_x, i, symmetric)
                * free_return_count_with(rank_y, n - i, symmetric)
        })
        .sum();
    Ok(EgfCheck {
        n,
        direct,
        convolution,
    })
}

/// `u₂ = 2·Σ_{s ∈ S₁} s + Σ zᵢ` on the standard alphabets.
pub fn second_generating_element(symmetric: bool) -> RingElement {
    let doubled = product_generators(11, 3, symmetric)
        .into_iter()
        .map(|g| (g, BigInt::from(2)));
    let z = WitnessSet::standard().s_terms();
    RingElement::from_terms(doubled.chain(z), None).expect("exact mode")
}

/// `([1]u₂ⁿ, [1]uⁿ)`, which must agree modulo 2.
pub fn two_sets_parity(n: usize, cap: usize) -> Result<(BigInt, BigInt), RingError> {
    let u2 = second_generating_element(true).coeff_at_identity_pow(n, cap)?;
    let u = witness_u().coeff_at_identity_pow(n, cap)?;
    Ok((u2, u))
}

pub fn same_parity(a: &BigInt, b: &BigInt) -> bool {
    a.is_even() == b.is_even()
}
