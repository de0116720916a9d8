//! P-recursive sequences: exact evaluation, recurrence guessing, parity
//! words, the 2-adic forbidden-word construction and subword complexity.
//!
//! A recurrence of order `k` is stored as polynomials `q₀, …, q_k` with
//! `q₀(n)·a_n + q₁(n)·a_{n−1} + ⋯ + q_k(n)·a_{n−k} = 0`. Sequences and bit
//! words carry an explicit start index; the convention throughout is that
//! they start at 1.

use std::io::{Read, Write};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};
use thiserror::Error;

use crate::linalg;

/// Held-out terms used to validate a guessed recurrence.
pub const HELD_OUT: usize = 10;

/// Largest factor length accepted by [`subword_complexity`].
pub const MAX_FACTOR_LEN: usize = 24;

#[derive(Debug, Error)]
pub enum HoloError {
    #[error("invalid recurrence: {0}")]
    InvalidRecurrence(&'static str),
    #[error("leading coefficient q0 vanishes at n = {n}")]
    ZeroLeading { n: i64 },
    #[error("term at n = {n} is not an integer")]
    NonIntegral { n: i64 },
    #[error("need at least {needed} seed terms, got {got}")]
    TooFewSeeds { needed: usize, got: usize },
    #[error("need at least {needed} terms, got {got}")]
    TooFewTerms { needed: usize, got: usize },
    #[error("2-adic valuation of zero is undefined")]
    ZeroValuation,
    #[error("term at n = {index} is odd, cannot halve")]
    OddTerm { index: i64 },
    #[error("term at n = {index} is not an integer")]
    NotInteger { index: i64 },
    #[error("prefix of length {len} is shorter than factor length {n}")]
    PrefixTooShort { len: usize, n: usize },
    #[error("factor length {n} above the supported maximum {max}")]
    FactorTooLong { n: usize, max: usize },
    #[error("malformed input: {0}")]
    Format(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// `Σ_j c_j n^j` at an integer point.
fn eval_poly(coeffs: &[BigInt], n: &BigInt) -> BigInt {
    coeffs.iter().rev().fold(BigInt::zero(), |acc, c| acc * n + c)
}

fn trim(mut p: Vec<BigInt>) -> Vec<BigInt> {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Recurrence {
    /// `polys[i][j]` is the coefficient of `n^j` in `q_i`.
    polys: Vec<Vec<BigInt>>,
}

impl Recurrence {
    /// Validates and normalizes: trailing zero coefficients and trailing
    /// identically zero `q_k` are dropped.
    pub fn new(polys: Vec<Vec<BigInt>>) -> Result<Self, HoloError> {
        let mut polys: Vec<Vec<BigInt>> = polys.into_iter().map(trim).collect();
        while polys.len() > 1 && polys.last().is_some_and(Vec::is_empty) {
            polys.pop();
        }
        if polys.first().is_none_or(Vec::is_empty) {
            return Err(HoloError::InvalidRecurrence("q0 is identically zero"));
        }
        if polys.len() < 2 {
            return Err(HoloError::InvalidRecurrence("order must be at least 1"));
        }
        Ok(Recurrence { polys })
    }

    pub fn from_i64(polys: &[&[i64]]) -> Result<Self, HoloError> {
        Self::new(
            polys
                .iter()
                .map(|p| p.iter().map(|&c| BigInt::from(c)).collect())
                .collect(),
        )
    }

    pub fn order(&self) -> usize {
        self.polys.len() - 1
    }

    /// Largest degree among the `q_i`.
    pub fn degree(&self) -> usize {
        self.polys.iter().map(|p| p.len().saturating_sub(1)).max().unwrap_or(0)
    }

    pub fn polys(&self) -> &[Vec<BigInt>] {
        &self.polys
    }

    pub fn q(&self, i: usize, n: &BigInt) -> BigInt {
        eval_poly(&self.polys[i], n)
    }

    fn max_coeff(&self) -> BigInt {
        self.polys.iter().flatten().map(BigInt::abs).max().unwrap_or_default()
    }

    /// `Σ q_i(n)·a_{n−i}` for the term at position `pos` of `terms`.
    pub fn residual(&self, terms: &SequencePrefix, pos: usize) -> BigRational {
        let n = BigInt::from(terms.index_of(pos));
        (0..=self.order())
            .map(|i| BigRational::from_integer(self.q(i, &n)) * &terms.terms[pos - i])
            .sum()
    }

    /// Whether every term with a full window of predecessors satisfies the
    /// recurrence.
    pub fn annihilates(&self, terms: &SequencePrefix) -> bool {
        (self.order()..terms.len()).all(|p| self.residual(terms, p).is_zero())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "order": self.order(),
            "polys": self.polys.iter()
                .map(|p| p.iter().map(|c| Value::String(c.to_string())).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self, HoloError> {
        let bad = |m: &str| HoloError::Format(m.to_string());
        let polys = v
            .get("polys")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("missing \"polys\" array"))?;
        let mut out = Vec::with_capacity(polys.len());
        for p in polys {
            let p = p.as_array().ok_or_else(|| bad("polynomial must be an array"))?;
            let coeffs = p
                .iter()
                .map(|c| match c {
                    Value::String(s) => BigInt::from_str(s).map_err(|_| bad(&format!("bad coefficient {s:?}"))),
                    Value::Number(x) => x
                        .as_i64()
                        .map(BigInt::from)
                        .ok_or_else(|| bad(&format!("bad coefficient {x}"))),
                    other => Err(bad(&format!("bad coefficient {other}"))),
                })
                .collect::<Result<Vec<_>, _>>()?;
            out.push(coeffs);
        }
        let r = Self::new(out)?;
        if let Some(order) = v.get("order") {
            if order.as_u64() != Some(r.order() as u64) {
                return Err(bad("\"order\" does not match the polynomial list"));
            }
        }
        Ok(r)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequencePrefix {
    pub start: i64,
    pub terms: Vec<BigRational>,
}

impl SequencePrefix {
    pub fn new(start: i64, terms: Vec<BigRational>) -> Self {
        SequencePrefix { start, terms }
    }

    pub fn from_integers(start: i64, terms: impl IntoIterator<Item = BigInt>) -> Self {
        SequencePrefix {
            start,
            terms: terms.into_iter().map(BigRational::from_integer).collect(),
        }
    }

    pub fn from_i64(start: i64, terms: &[i64]) -> Self {
        Self::from_integers(start, terms.iter().map(|&t| BigInt::from(t)))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn index_of(&self, pos: usize) -> i64 {
        self.start + pos as i64
    }

    pub fn truncated(&self, len: usize) -> SequencePrefix {
        SequencePrefix {
            start: self.start,
            terms: self.terms[..len.min(self.len())].to_vec(),
        }
    }

    /// The terms as integers, if they all are.
    pub fn integers(&self) -> Result<Vec<BigInt>, HoloError> {
        self.terms
            .iter()
            .enumerate()
            .map(|(p, t)| {
                if t.is_integer() {
                    Ok(t.to_integer())
                } else {
                    Err(HoloError::NotInteger { index: self.index_of(p) })
                }
            })
            .collect()
    }

    /// Reads `index,value` rows; a header row is optional and values may be
    /// written `num/den`. Indices must be contiguous.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self, HoloError> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(reader);
        let mut start = None;
        let mut terms = Vec::new();
        for (row, rec) in rdr.records().enumerate() {
            let rec = rec?;
            if rec.len() != 2 {
                return Err(HoloError::Format(format!("row {} must have two fields", row + 1)));
            }
            let Ok(index) = rec[0].parse::<i64>() else {
                if row == 0 {
                    continue;
                }
                return Err(HoloError::Format(format!("bad index {:?}", &rec[0])));
            };
            let value = BigRational::from_str(&rec[1])
                .map_err(|_| HoloError::Format(format!("bad value {:?}", &rec[1])))?;
            let s = *start.get_or_insert(index);
            if index != s + terms.len() as i64 {
                return Err(HoloError::Format(format!("index {index} breaks contiguity")));
            }
            terms.push(value);
        }
        Ok(SequencePrefix {
            start: start.unwrap_or(1),
            terms,
        })
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), HoloError> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["index", "value"])?;
        for (p, t) in self.terms.iter().enumerate() {
            w.write_record([self.index_of(p).to_string(), t.to_string()])?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitWord {
    pub start: usize,
    pub bits: Vec<u8>,
}

impl BitWord {
    pub fn new(start: usize, bits: Vec<u8>) -> Self {
        debug_assert!(bits.iter().all(|&b| b <= 1));
        BitWord { start, bits }
    }

    /// Parses a string of `0`/`1` characters, starting at index 1.
    pub fn parse(s: &str) -> Result<Self, HoloError> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(HoloError::Format(format!("bad bit {other:?}"))),
            })
            .collect::<Result<Vec<u8>, _>>()?;
        Ok(BitWord { start: 1, bits })
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }
}

impl std::fmt::Display for BitWord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for &b in &self.bits {
            f.write_str(if b == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalMode {
    /// Errors if some term is not an integer.
    Integer,
    Rational,
}

/// Extends `seeds` to `count` terms using the recurrence.
pub fn eval_recurrence(
    r: &Recurrence,
    seeds: &SequencePrefix,
    count: usize,
    mode: EvalMode,
) -> Result<SequencePrefix, HoloError> {
    let k = r.order();
    if seeds.len() < k {
        return Err(HoloError::TooFewSeeds {
            needed: k,
            got: seeds.len(),
        });
    }
    if mode == EvalMode::Integer {
        seeds.integers()?;
    }
    let mut out = seeds.truncated(count);
    while out.len() < count {
        let pos = out.len();
        let n = out.index_of(pos);
        let nb = BigInt::from(n);
        let q0 = r.q(0, &nb);
        if q0.is_zero() {
            return Err(HoloError::ZeroLeading { n });
        }
        let s: BigRational = (1..=k)
            .map(|i| BigRational::from_integer(r.q(i, &nb)) * &out.terms[pos - i])
            .sum();
        let term = -s / BigRational::from_integer(q0);
        if mode == EvalMode::Integer && !term.is_integer() {
            return Err(HoloError::NonIntegral { n });
        }
        out.terms.push(term);
    }
    Ok(out)
}

/// `x mod 2^bits` as a nonnegative integer.
fn trunc(x: &BigInt, bits: u64) -> BigUint {
    let m = x.magnitude();
    let low = if m.bits() > bits {
        let mut digits = m.to_u64_digits();
        let words = bits.div_ceil(64) as usize;
        digits.truncate(words);
        if !bits.is_multiple_of(64) {
            if let Some(top) = digits.get_mut(words - 1) {
                *top &= (1u64 << (bits % 64)) - 1;
            }
        }
        digits_to_biguint(&digits)
    } else {
        m.clone()
    };
    if x.sign() == Sign::Minus && !low.is_zero() {
        (BigUint::one() << bits) - low
    } else {
        low
    }
}

fn inverse_u64(o: u64) -> u64 {
    let mut x = o;
    for _ in 0..5 {
        x = x.wrapping_mul(2u64.wrapping_sub(o.wrapping_mul(x)));
    }
    x
}

/// The `q` with `q·o ≡ y (mod 2^bits)` for odd `o`.
fn div_odd(y: &BigUint, o: &BigInt, bits: u64) -> BigUint {
    let o = o.magnitude();
    if let Some(small) = o.to_u64() {
        let inv = inverse_u64(small);
        let words = bits.div_ceil(64) as usize;
        let mut rem = y.to_u64_digits();
        rem.resize(words + 1, 0);
        let mut q = vec![0u64; words];
        for i in 0..words {
            let qi = rem[i].wrapping_mul(inv);
            q[i] = qi;
            let mut carry = u128::from(qi) * u128::from(small);
            let mut j = i;
            while carry != 0 && j < rem.len() {
                let (v, b) = rem[j].overflowing_sub(carry as u64);
                rem[j] = v;
                carry = (carry >> 64) + u128::from(b);
                j += 1;
            }
        }
        return trunc(&BigInt::from_biguint(Sign::Plus, digits_to_biguint(&q)), bits);
    }
    let modulus = BigUint::one() << bits;
    let mut inv = BigUint::one();
    let mut prec = 1u64;
    while prec < bits {
        prec = (prec * 2).min(bits);
        let m = BigUint::one() << prec;
        let t = (o * &inv) % &m;
        inv = (&inv * ((BigUint::from(2u8) + &m - t) % &m)) % &m;
    }
    (y * inv) % modulus
}

fn digits_to_biguint(d: &[u64]) -> BigUint {
    BigUint::from_slice(&d.iter().flat_map(|&x| [x as u32, (x >> 32) as u32]).collect::<Vec<_>>())
}

/// Parities of the integer solution with the given seeds, for `count`
/// terms, without computing the terms themselves.
///
/// Each term is carried modulo a power of two just large enough that the
/// divisions by `q₀(n)` still leave its parity determined at the end.
pub fn parity_prefix(r: &Recurrence, seeds: &SequencePrefix, count: usize) -> Result<BitWord, HoloError> {
    let k = r.order();
    let seed_ints = seeds.integers()?;
    if seed_ints.len() < k {
        return Err(HoloError::TooFewSeeds {
            needed: k,
            got: seed_ints.len(),
        });
    }
    let s = seed_ints.len().min(count);
    let mut shift = vec![0u64; count];
    for (p, slot) in shift.iter_mut().enumerate().skip(s) {
        let n = seeds.index_of(p);
        let q0 = r.q(0, &BigInt::from(n));
        *slot = q0.trailing_zeros().ok_or(HoloError::ZeroLeading { n })?;
    }
    let mut need = vec![1u64; count];
    for p in (0..count).rev() {
        for i in 1..=k {
            if p + i < count && p + i >= s {
                need[p] = need[p].max(need[p + i] + shift[p + i]);
            }
        }
    }
    let mut window: Vec<BigUint> = Vec::with_capacity(count);
    let mut bits = Vec::with_capacity(count);
    for p in 0..count {
        let value = if p < s {
            trunc(&seed_ints[p], need[p])
        } else {
            let n = seeds.index_of(p);
            let nb = BigInt::from(n);
            let prec = need[p] + shift[p];
            let mut acc = BigInt::zero();
            for i in 1..=k {
                acc -= r.q(i, &nb) * BigInt::from(window[p - i].clone());
            }
            let acc = trunc(&acc, prec);
            if acc.trailing_zeros().is_some_and(|z| z < shift[p]) {
                return Err(HoloError::NonIntegral { n });
            }
            let odd = r.q(0, &nb) >> shift[p];
            div_odd(&(acc >> shift[p]), &odd, need[p])
        };
        bits.push(u8::from(value.bit(0)));
        window.push(value);
        if p >= k {
            window[p - k] = BigUint::zero();
        }
    }
    Ok(BitWord {
        start: seeds.start.max(0) as usize,
        bits,
    })
}

/// Largest `r` with `2^r | n`.
pub fn eta(n: &BigInt) -> Result<u64, HoloError> {
    n.trailing_zeros().ok_or(HoloError::ZeroValuation)
}

/// The parity word `a_n mod 2`; with `halve`, `(a_n / 2) mod 2`.
pub fn parity_word(terms: &SequencePrefix, halve: bool) -> Result<BitWord, HoloError> {
    let ints = terms.integers()?;
    let mut bits = Vec::with_capacity(ints.len());
    for (p, a) in ints.iter().enumerate() {
        let v = if halve {
            if a.is_odd() {
                return Err(HoloError::OddTerm { index: terms.index_of(p) });
            }
            a / 2
        } else {
            a.clone()
        };
        bits.push(u8::from(v.is_odd()));
    }
    Ok(BitWord {
        start: terms.start.max(0) as usize,
        bits,
    })
}

/// First occurrence of `v` in `w`, as an index in `w`'s numbering.
pub fn contains_subword(w: &BitWord, v: &BitWord) -> Option<usize> {
    if v.is_empty() {
        return Some(w.start);
    }
    w.bits
        .windows(v.len())
        .position(|win| win == v.bits.as_slice())
        .map(|p| w.start + p)
}

/// The word `v` and the parameters chosen for it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForbiddenWord {
    pub l: u64,
    pub m: u32,
    pub d: usize,
    pub v: BitWord,
}

/// Builds `(0^{k−d} 1 0^k 1 0^{d−1})^{2^m}`, which never occurs in the
/// parity word of an integer solution of `r`.
///
/// `ℓ` is the least positive point where every `q_i` is nonzero, `m` the
/// least exponent with `2^m > k` and `m > η(q_i(ℓ))` for all `i`, and `d`
/// the least index in `1..=k` minimizing `η(q_d(ℓ))`.
pub fn forbidden_word(r: &Recurrence) -> ForbiddenWord {
    let k = r.order();
    let (l, vals) = (1u64..)
        .find_map(|l| {
            let lb = BigInt::from(l);
            let vals: Vec<BigInt> = (0..=k).map(|i| r.q(i, &lb)).collect();
            vals.iter().all(|v| !v.is_zero()).then_some((l, vals))
        })
        .expect("nonzero polynomials have finitely many roots");
    let etas: Vec<u64> = vals.iter().map(|v| v.trailing_zeros().expect("nonzero")).collect();
    let max_eta = *etas.iter().max().expect("k >= 1");
    let mut m = 0u32;
    while (1usize << m) <= k || u64::from(m) <= max_eta {
        m += 1;
    }
    let d = (1..=k).min_by_key(|&i| (etas[i], i)).expect("k >= 1");
    let mut block = vec![0u8; k - d];
    block.push(1);
    block.extend(std::iter::repeat_n(0, k));
    block.push(1);
    block.extend(std::iter::repeat_n(0, d - 1));
    let bits = block.repeat(1 << m);
    ForbiddenWord {
        l,
        m,
        d,
        v: BitWord { start: 1, bits },
    }
}

/// Distinct length-`n` factors of the finite prefix `w`; a lower bound for
/// the complexity of any infinite extension.
pub fn subword_complexity(w: &BitWord, n: usize) -> Result<usize, HoloError> {
    if n > MAX_FACTOR_LEN {
        return Err(HoloError::FactorTooLong {
            n,
            max: MAX_FACTOR_LEN,
        });
    }
    if w.len() < n {
        return Err(HoloError::PrefixTooShort { len: w.len(), n });
    }
    if n == 0 {
        return Ok(1);
    }
    let mut seen = vec![0u64; (1usize << n).div_ceil(64)];
    let mask = (1u32 << n) - 1;
    let mut code = 0u32;
    let mut count = 0;
    for (i, &b) in w.bits.iter().enumerate() {
        code = ((code << 1) | u32::from(b)) & mask;
        if i + 1 >= n {
            let (word, bit) = (code as usize / 64, code % 64);
            if seen[word] >> bit & 1 == 0 {
                seen[word] |= 1 << bit;
                count += 1;
            }
        }
    }
    Ok(count)
}

/// Finds a recurrence of order at most `max_order` and degree at most
/// `max_degree` satisfied by all of `terms`.
///
/// The ansatz grid is searched by increasing order, then degree. Each cell
/// is fitted on all but the last [`HELD_OUT`] terms by an exact nullspace
/// computation; candidates must also annihilate the held-out terms. Among
/// the candidates of the first successful cell the one with the smallest
/// largest coefficient is returned.
pub fn guess_recurrence(
    terms: &SequencePrefix,
    max_order: usize,
    max_degree: usize,
) -> Result<Option<Recurrence>, HoloError> {
    let needed = (max_order + 1) * (max_degree + 1) + max_order + HELD_OUT;
    if terms.len() < needed {
        return Err(HoloError::TooFewTerms {
            needed,
            got: terms.len(),
        });
    }
    for k in 1..=max_order {
        let found: Vec<Option<Recurrence>> = (0..=max_degree)
            .into_par_iter()
            .map(|d| guess_cell(terms, k, d))
            .collect();
        if let Some(r) = found.into_iter().flatten().next() {
            return Ok(Some(r));
        }
    }
    Ok(None)
}

fn guess_cell(terms: &SequencePrefix, k: usize, d: usize) -> Option<Recurrence> {
    let cols = (k + 1) * (d + 1);
    let fit = terms.len() - HELD_OUT;
    let rows: Vec<Vec<BigInt>> = (k..fit)
        .map(|p| {
            let n = BigInt::from(terms.index_of(p));
            let window: Vec<&BigRational> = (0..=k).map(|i| &terms.terms[p - i]).collect();
            let denom = window.iter().fold(BigInt::one(), |l, t| l.lcm(t.denom()));
            let mut row = Vec::with_capacity(cols);
            for t in &window {
                let scaled = t.numer() * (&denom / t.denom());
                let mut pow = BigInt::one();
                for _ in 0..=d {
                    row.push(&scaled * &pow);
                    pow *= &n;
                }
            }
            row
        })
        .filter(|row: &Vec<BigInt>| row.iter().any(|x| !x.is_zero()))
        .collect();
    let basis = linalg::nullspace(&rows, cols);
    basis
        .into_iter()
        .filter_map(|v| Recurrence::new(v.chunks(d + 1).map(<[BigInt]>::to_vec).collect()).ok())
        .filter(|r| r.order() == k && r.annihilates(terms))
        .min_by_key(Recurrence::max_coeff)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_integer::binomial;

    fn catalan() -> Recurrence {
        // (n+1) a_n − (4n−2) a_{n−1} = 0
        Recurrence::from_i64(&[&[1, 1], &[2, -4]]).unwrap()
    }

    fn catalan_direct(n: u64) -> BigInt {
        binomial(BigInt::from(2 * n), BigInt::from(n)) / BigInt::from(n + 1)
    }

    fn fragmented() -> Recurrence {
        // a_n − (2n−1) a_{n−1} + (n−1)(n−2) a_{n−2} = 0
        Recurrence::from_i64(&[&[1], &[1, -2], &[2, -3, 1]]).unwrap()
    }

    #[test]
    fn catalan_terms() {
        let seq = eval_recurrence(&catalan(), &SequencePrefix::from_i64(1, &[1]), 30, EvalMode::Integer).unwrap();
        for (p, t) in seq.terms.iter().enumerate() {
            assert_eq!(t.to_integer(), catalan_direct(p as u64 + 1));
        }
    }

    #[test]
    fn fragmented_terms() {
        let seq = eval_recurrence(&fragmented(), &SequencePrefix::from_i64(1, &[1, 3]), 4, EvalMode::Integer).unwrap();
        assert_eq!(seq, SequencePrefix::from_i64(1, &[1, 3, 13, 73]));
    }

    #[test]
    fn zero_leading_coefficient() {
        // q0 = n − 3 vanishes at n = 3
        let r = Recurrence::from_i64(&[&[-3, 1], &[1]]).unwrap();
        let err = eval_recurrence(&r, &SequencePrefix::from_i64(1, &[1]), 5, EvalMode::Rational).unwrap_err();
        assert!(matches!(err, HoloError::ZeroLeading { n: 3 }));
    }

    #[test]
    fn integer_mode_rejects_fractions() {
        // 2 a_n − a_{n−1} = 0
        let r = Recurrence::from_i64(&[&[2], &[-1]]).unwrap();
        let seeds = SequencePrefix::from_i64(1, &[1]);
        assert!(matches!(
            eval_recurrence(&r, &seeds, 3, EvalMode::Integer),
            Err(HoloError::NonIntegral { n: 2 })
        ));
        let q = eval_recurrence(&r, &seeds, 3, EvalMode::Rational).unwrap();
        assert_eq!(q.terms[2], BigRational::new(BigInt::one(), BigInt::from(4)));
    }

    #[test]
    fn recurrence_validation() {
        assert!(Recurrence::from_i64(&[&[0], &[1]]).is_err());
        assert!(Recurrence::from_i64(&[&[1]]).is_err());
        let r = Recurrence::from_i64(&[&[1, 0], &[-1], &[0, 0]]).unwrap();
        assert_eq!(r.order(), 1);
        assert_eq!(r.polys()[0].len(), 1);
    }

    #[test]
    fn json_round_trip() {
        let r = fragmented();
        let j = r.to_json();
        assert_eq!(j["order"], 2);
        assert_eq!(Recurrence::from_json(&j).unwrap(), r);
        let plain: Value = serde_json::from_str(r#"{"order":1,"polys":[[1,1],[2,-4]]}"#).unwrap();
        assert_eq!(Recurrence::from_json(&plain).unwrap(), catalan());
    }

    #[test]
    fn csv_round_trip() {
        let seq = SequencePrefix::new(
            3,
            vec![BigRational::from_integer(BigInt::from(-7)), BigRational::new(BigInt::from(1), BigInt::from(3))],
        );
        let mut buf = Vec::new();
        seq.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "index,value\n3,-7\n4,1/3\n");
        assert_eq!(SequencePrefix::read_csv(buf.as_slice()).unwrap(), seq);
        assert!(SequencePrefix::read_csv("1,1\n3,2\n".as_bytes()).is_err());
    }

    #[test]
    fn eta_values() {
        assert_eq!(eta(&BigInt::from(12)).unwrap(), 2);
        assert_eq!(eta(&BigInt::from(1)).unwrap(), 0);
        assert_eq!(eta(&BigInt::from(1024)).unwrap(), 10);
        assert_eq!(eta(&BigInt::from(-48)).unwrap(), 4);
        assert!(eta(&BigInt::zero()).is_err());
    }

    #[test]
    fn parity_words() {
        let cat = SequencePrefix::from_i64(1, &[1, 2, 5, 14, 42, 132, 429]);
        assert_eq!(parity_word(&cat, false).unwrap().to_string(), "1010001");
        let even = SequencePrefix::from_i64(1, &[2, 4, 6]);
        assert_eq!(parity_word(&even, true).unwrap().to_string(), "101");
        assert!(matches!(
            parity_word(&SequencePrefix::from_i64(1, &[3]), true),
            Err(HoloError::OddTerm { index: 1 })
        ));
    }

    #[test]
    fn streamed_parity_matches_exact_terms() {
        for (r, seeds) in [
            (catalan(), SequencePrefix::from_i64(1, &[1])),
            (fragmented(), SequencePrefix::from_i64(1, &[1, 3])),
            (Recurrence::from_i64(&[&[1], &[-1], &[-1]]).unwrap(), SequencePrefix::from_i64(1, &[1, 1])),
            // n a_n = (4n−2) a_{n−1}, central binomials: q0 carries many factors of 2
            (Recurrence::from_i64(&[&[0, 1], &[2, -4]]).unwrap(), SequencePrefix::from_i64(1, &[2])),
        ] {
            let exact = eval_recurrence(&r, &seeds, 300, EvalMode::Integer).unwrap();
            assert_eq!(parity_prefix(&r, &seeds, 300).unwrap(), parity_word(&exact, false).unwrap());
        }
    }

    #[test]
    fn streamed_parity_detects_even_denominators() {
        let r = Recurrence::from_i64(&[&[2], &[-1]]).unwrap();
        assert!(matches!(
            parity_prefix(&r, &SequencePrefix::from_i64(1, &[1]), 5),
            Err(HoloError::NonIntegral { n: 2 })
        ));
    }

    #[test]
    fn hensel_division_by_large_odd() {
        let o = BigInt::from(3u8) * (BigInt::one() << 100u32) + 1;
        let q = BigInt::from(123456789u64) * (BigInt::one() << 150u32) + 77;
        let y = trunc(&(&q * &o), 200);
        assert_eq!(div_odd(&y, &o, 200), trunc(&q, 200));
        assert_eq!(div_odd(&trunc(&(&q * 5), 130), &BigInt::from(5), 130), trunc(&q, 130));
    }

    #[test]
    fn forbidden_word_examples() {
        let f = forbidden_word(&catalan());
        assert_eq!((f.l, f.m, f.d), (1, 2, 1));
        assert_eq!(f.v.to_string(), "101101101101");
        // (n−1) a_n − n a_{n−1} = 0, solved by a_n = n
        let f = forbidden_word(&Recurrence::from_i64(&[&[-1, 1], &[0, -1]]).unwrap());
        assert_eq!((f.l, f.m, f.d), (2, 2, 1));
        assert_eq!(f.v.to_string(), "101101101101");
        let f = forbidden_word(&fragmented());
        assert_eq!(f.l, 3);
        assert_eq!(f.v.len(), (1 << f.m) * 5);
    }

    #[test]
    fn subword_search() {
        let w = BitWord::parse("101000100000001").unwrap();
        assert_eq!(contains_subword(&w, &BitWord::parse("101").unwrap()), Some(1));
        assert_eq!(contains_subword(&w, &BitWord::parse("").unwrap()), Some(1));
        assert_eq!(contains_subword(&w, &BitWord::parse("0001").unwrap()), Some(4));
        assert_eq!(contains_subword(&w, &BitWord::parse("11").unwrap()), None);
    }

    #[test]
    fn complexity_small() {
        let w = BitWord::parse("0110").unwrap();
        assert_eq!(subword_complexity(&w, 0).unwrap(), 1);
        assert_eq!(subword_complexity(&w, 1).unwrap(), 2);
        assert_eq!(subword_complexity(&w, 2).unwrap(), 3);
        assert_eq!(subword_complexity(&w, 4).unwrap(), 1);
        assert!(subword_complexity(&w, 5).is_err());
        assert!(subword_complexity(&w, 25).is_err());
    }

    #[test]
    fn guesses_fibonacci() {
        let mut fib = vec![1i64, 1];
        while fib.len() < 40 {
            fib.push(fib[fib.len() - 1] + fib[fib.len() - 2]);
        }
        let r = guess_recurrence(&SequencePrefix::from_i64(1, &fib), 2, 0).unwrap().unwrap();
        assert_eq!(r, Recurrence::from_i64(&[&[1], &[-1], &[-1]]).unwrap());
    }

    #[test]
    fn guess_needs_enough_terms() {
        let s = SequencePrefix::from_i64(1, &[1; 20]);
        assert!(matches!(guess_recurrence(&s, 2, 2), Err(HoloError::TooFewTerms { needed: 21, .. })));
    }
}
