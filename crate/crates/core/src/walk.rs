//! Exact random walks on `H = ℤ ⋉ ℤ²`, the group of 3×3 integer matrices
//! `[[Mᵏ, v], [0, 1]]` with `M = [[2,1],[1,1]]`.
//!
//! Elements are kept in the normal form `(k, v)` with product
//! `(k, v)·(k′, v′) = (k + k′, v + Mᵏv′)`. A distribution is stored as one
//! slice per `k`, sorted by `v`. Right multiplication by a fixed element
//! maps the slice for `k` to the slice for `k + k′` by a translation, which
//! preserves the order, so a step is a merge of sorted runs. A generic
//! matrix walk keyed by [`IntMatrix`] serves as an independent oracle.

use std::cmp::Ordering;
use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde_json::Value;
use thiserror::Error;

use crate::matrix::{IntMatrix, MatrixError};
use crate::BudgetExceeded;

/// Default cap on the number of group elements held by a distribution.
pub const DEFAULT_BALL_CAP: usize = 20_000_000;

const H_FIXTURE: &str = include_str!("../fixtures/h_walk.json");

#[derive(Debug, Error)]
pub enum WalkError {
    #[error(transparent)]
    Budget(#[from] BudgetExceeded),
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
    #[error("matrix is not an element of H: {0}")]
    NotInH(String),
    #[error("generating set is flagged symmetric but is not closed under inversion")]
    NotSymmetric,
    #[error("need at least {needed} even-index points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("return probability at step {0} is not positive")]
    NonPositive(usize),
    #[error("malformed fixture: {0}")]
    Fixture(String),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

/// `Mᵏ` as `[a, b, c, d]`, with checked arithmetic.
fn m_power(k: i64) -> Result<[i64; 4], WalkError> {
    let step: [i64; 4] = if k >= 0 { [2, 1, 1, 1] } else { [1, -1, -1, 2] };
    let mut out = [1, 0, 0, 1];
    for _ in 0..k.unsigned_abs() {
        out = mul2(&out, &step).ok_or(WalkError::Overflow("matrix power"))?;
    }
    Ok(out)
}

fn mul2(a: &[i64; 4], b: &[i64; 4]) -> Option<[i64; 4]> {
    let dot = |x: i64, y: i64, z: i64, w: i64| x.checked_mul(y)?.checked_add(z.checked_mul(w)?);
    Some([
        dot(a[0], b[0], a[1], b[2])?,
        dot(a[0], b[1], a[1], b[3])?,
        dot(a[2], b[0], a[3], b[2])?,
        dot(a[2], b[1], a[3], b[3])?,
    ])
}

fn apply(m: &[i64; 4], v: [i64; 2]) -> Result<[i64; 2], WalkError> {
    let f = |x: i64, y: i64, z: i64, w: i64| x.checked_mul(y).and_then(|p| z.checked_mul(w).and_then(|q| p.checked_add(q)));
    Ok([
        f(m[0], v[0], m[1], v[1]).ok_or(WalkError::Overflow("translation"))?,
        f(m[2], v[0], m[3], v[1]).ok_or(WalkError::Overflow("translation"))?,
    ])
}

fn add_vec(a: [i64; 2], b: [i64; 2]) -> Result<[i64; 2], WalkError> {
    Ok([
        a[0].checked_add(b[0]).ok_or(WalkError::Overflow("translation"))?,
        a[1].checked_add(b[1]).ok_or(WalkError::Overflow("translation"))?,
    ])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WalkGroupElement {
    pub k: i64,
    pub v: [i64; 2],
}

impl WalkGroupElement {
    pub fn identity() -> Self {
        WalkGroupElement { k: 0, v: [0, 0] }
    }

    pub fn new(k: i64, v: [i64; 2]) -> Self {
        WalkGroupElement { k, v }
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity()
    }

    pub fn mul(&self, other: &WalkGroupElement) -> Result<WalkGroupElement, WalkError> {
        let shifted = apply(&m_power(self.k)?, other.v)?;
        Ok(WalkGroupElement {
            k: self.k.checked_add(other.k).ok_or(WalkError::Overflow("exponent"))?,
            v: add_vec(self.v, shifted)?,
        })
    }

    /// `(−k, −M⁻ᵏv)`.
    pub fn inverse(&self) -> Result<WalkGroupElement, WalkError> {
        let w = apply(&m_power(-self.k)?, self.v)?;
        Ok(WalkGroupElement {
            k: -self.k,
            v: [-w[0], -w[1]],
        })
    }

    pub fn to_matrix(&self) -> Result<IntMatrix, WalkError> {
        let m = m_power(self.k)?;
        Ok(IntMatrix::from_i64(&[&[m[0], m[1], self.v[0]], &[m[2], m[3], self.v[1]], &[0, 0, 1]])?)
    }

    /// Inverse of [`to_matrix`](Self::to_matrix) for `|k| ≤ max_k`.
    pub fn from_matrix(m: &IntMatrix, max_k: i64) -> Result<Self, WalkError> {
        let not_in_h = || WalkError::NotInH(m.to_string());
        if m.dim() != 3 || !m.get(2, 0).is_zero() || !m.get(2, 1).is_zero() || !m.get(2, 2).is_one() {
            return Err(not_in_h());
        }
        let entry = |i, j| m.get(i, j).to_i64().ok_or_else(not_in_h);
        let block = [entry(0, 0)?, entry(0, 1)?, entry(1, 0)?, entry(1, 1)?];
        let v = [entry(0, 2)?, entry(1, 2)?];
        // The off-diagonal entry of Mᵏ is a Fibonacci number with the sign of k.
        let sign = block[1].signum();
        let bound = if sign == 0 { 0 } else { max_k };
        for k in (0..=bound).map(|k| k * sign) {
            if m_power(k)? == block {
                return Ok(WalkGroupElement { k, v });
            }
        }
        Err(not_in_h())
    }
}

/// Weighted multiset of generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratingSet {
    pub elements: Vec<(WalkGroupElement, u64)>,
    pub symmetric: bool,
}

impl GeneratingSet {
    /// Validates the symmetry flag when it is set.
    pub fn new(elements: Vec<(WalkGroupElement, u64)>, symmetric: bool) -> Result<Self, WalkError> {
        let set = GeneratingSet { elements, symmetric };
        if symmetric {
            for (g, w) in &set.elements {
                let inv = g.inverse()?;
                let back: u64 = set.elements.iter().filter(|(h, _)| *h == inv).map(|(_, w)| w).sum();
                let fwd: u64 = set.elements.iter().filter(|(h, _)| h == g).map(|(_, w)| w).sum();
                if back != fwd || *w == 0 {
                    return Err(WalkError::NotSymmetric);
                }
            }
        }
        Ok(set)
    }

    /// The six-element set `E`: `M^{±1}` and the unit translations.
    pub fn h_standard() -> Self {
        let e = |k, v| (WalkGroupElement::new(k, v), 1);
        GeneratingSet {
            elements: vec![e(1, [0, 0]), e(-1, [0, 0]), e(0, [1, 0]), e(0, [-1, 0]), e(0, [0, 1]), e(0, [0, -1])],
            symmetric: true,
        }
    }

    pub fn fixture_text() -> &'static str {
        H_FIXTURE
    }

    /// Reads `{"name", "symmetric", "generators": [{"matrix", "weight"}]}`.
    pub fn from_fixture_json(v: &Value) -> Result<Self, WalkError> {
        let bad = |m: &str| WalkError::Fixture(m.to_string());
        let gens = v
            .get("generators")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("missing \"generators\""))?;
        let mut elements = Vec::with_capacity(gens.len());
        for g in gens {
            let m = IntMatrix::from_json(g.get("matrix").ok_or_else(|| bad("generator without \"matrix\""))?)?;
            let w = match g.get("weight") {
                None => 1,
                Some(w) => w.as_u64().filter(|&w| w > 0).ok_or_else(|| bad("weight must be a positive integer"))?,
            };
            elements.push((WalkGroupElement::from_matrix(&m, 64)?, w));
        }
        let symmetric = v.get("symmetric").and_then(Value::as_bool).unwrap_or(false);
        Self::new(elements, symmetric)
    }

    pub fn total_weight(&self) -> u64 {
        self.elements.iter().map(|(_, w)| w).sum()
    }

    pub fn matrices(&self) -> Result<Vec<(IntMatrix, u64)>, WalkError> {
        self.elements.iter().map(|(g, w)| Ok((g.to_matrix()?, *w))).collect()
    }
}

/// Translations `v` with counts, sorted by `v`, for one value of `k`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
struct Slice {
    vs: Vec<[i64; 2]>,
    counts: Vec<u64>,
}

impl Slice {
    fn get(&self, v: &[i64; 2]) -> u64 {
        self.vs.binary_search(v).map_or(0, |i| self.counts[i])
    }
}

/// Counts of walks of length `step` ending at each group element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Distribution {
    step: usize,
    /// Slice `i` holds the elements with `k = k_min + i`.
    k_min: i64,
    slices: Vec<Slice>,
}

impl Distribution {
    pub fn delta() -> Self {
        Distribution {
            step: 0,
            k_min: 0,
            slices: vec![Slice {
                vs: vec![[0, 0]],
                counts: vec![1],
            }],
        }
    }

    pub fn step_index(&self) -> usize {
        self.step
    }

    pub fn support_len(&self) -> usize {
        self.slices.iter().map(|s| s.vs.len()).sum()
    }

    pub fn count(&self, g: &WalkGroupElement) -> u64 {
        let i = g.k - self.k_min;
        if i < 0 || i >= self.slices.len() as i64 {
            return 0;
        }
        self.slices[i as usize].get(&g.v)
    }

    pub fn identity_count(&self) -> u64 {
        self.count(&WalkGroupElement::identity())
    }

    pub fn mass(&self) -> u128 {
        self.slices.iter().flat_map(|s| &s.counts).map(|&c| u128::from(c)).sum()
    }

    /// Elements in `(k, v)` order.
    pub fn iter(&self) -> impl Iterator<Item = (WalkGroupElement, u64)> + '_ {
        self.slices.iter().enumerate().flat_map(move |(i, s)| {
            let k = self.k_min + i as i64;
            s.vs.iter().zip(&s.counts).map(move |(&v, &c)| (WalkGroupElement { k, v }, c))
        })
    }

    /// Whether `count(g) = count(g⁻¹)` for every `g`.
    pub fn is_inversion_symmetric(&self) -> Result<bool, WalkError> {
        let checks: Vec<bool> = self
            .slices
            .par_iter()
            .enumerate()
            .map(|(i, s)| {
                let k = self.k_min + i as i64;
                let m_inv = m_power(-k)?;
                for (v, &c) in s.vs.iter().zip(&s.counts) {
                    let w = apply(&m_inv, *v)?;
                    if self.count(&WalkGroupElement::new(-k, [-w[0], -w[1]])) != c {
                        return Ok(false);
                    }
                }
                Ok(true)
            })
            .collect::<Result<_, WalkError>>()?;
        Ok(checks.into_iter().all(|b| b))
    }

    pub fn to_map(&self) -> HashMap<WalkGroupElement, u64> {
        self.iter().collect()
    }
}

/// One convolution step by `s`, i.e. right multiplication by a random generator.
pub fn step(d: &Distribution, s: &GeneratingSet, cap: usize) -> Result<Distribution, WalkError> {
    let ks: Vec<i64> = s.elements.iter().map(|(g, _)| g.k).collect();
    let (lo, hi) = (
        ks.iter().copied().min().unwrap_or(0),
        ks.iter().copied().max().unwrap_or(0),
    );
    let k_min = d.k_min + lo;
    let k_max = d.k_min + d.slices.len() as i64 - 1 + hi;
    let slices: Vec<Slice> = (k_min..=k_max)
        .into_par_iter()
        .map(|k| merge_into(d, s, k))
        .collect::<Result<_, _>>()?;
    let size: usize = slices.iter().map(|s| s.vs.len()).sum();
    if size > cap {
        return Err(BudgetExceeded {
            what: "walk distribution",
            limit: cap,
        }
        .into());
    }
    let mut out = Distribution {
        step: d.step + 1,
        k_min,
        slices,
    };
    let first = out.slices.iter().position(|s| !s.vs.is_empty()).unwrap_or(0);
    let last = out.slices.iter().rposition(|s| !s.vs.is_empty()).unwrap_or(0);
    out.slices.truncate(last + 1);
    out.slices.drain(..first);
    out.k_min += first as i64;
    Ok(out)
}

/// The output slice for `k`: one sorted run per generator, merged.
fn merge_into(d: &Distribution, s: &GeneratingSet, k: i64) -> Result<Slice, WalkError> {
    struct Run<'a> {
        src: &'a Slice,
        shift: [i64; 2],
        weight: u64,
        pos: usize,
    }
    let mut runs = Vec::new();
    for (g, w) in &s.elements {
        let i = k - g.k - d.k_min;
        if i < 0 || i >= d.slices.len() as i64 {
            continue;
        }
        let src = &d.slices[i as usize];
        if src.vs.is_empty() {
            continue;
        }
        runs.push(Run {
            src,
            shift: apply(&m_power(k - g.k)?, g.v)?,
            weight: *w,
            pos: 0,
        });
    }
    let total: usize = runs.iter().map(|r| r.src.vs.len()).sum();
    let mut out = Slice {
        vs: Vec::with_capacity(total),
        counts: Vec::with_capacity(total),
    };
    loop {
        let mut best: Option<[i64; 2]> = None;
        for r in &runs {
            if r.pos < r.src.vs.len() {
                let v = add_vec(r.src.vs[r.pos], r.shift)?;
                if best.is_none_or(|b| v.cmp(&b) == Ordering::Less) {
                    best = Some(v);
                }
            }
        }
        let Some(v) = best else { break };
        let mut c = 0u64;
        for r in &mut runs {
            if r.pos < r.src.vs.len() && add_vec(r.src.vs[r.pos], r.shift)? == v {
                let add = r.src.counts[r.pos]
                    .checked_mul(r.weight)
                    .ok_or(WalkError::Overflow("walk counts"))?;
                c = c.checked_add(add).ok_or(WalkError::Overflow("walk counts"))?;
                r.pos += 1;
            }
        }
        out.vs.push(v);
        out.counts.push(c);
    }
    out.vs.shrink_to_fit();
    out.counts.shrink_to_fit();
    Ok(out)
}

/// Distributions after `0, 1, …, n` steps.
pub fn walk(s: &GeneratingSet, n: usize, cap: usize) -> Result<Vec<Distribution>, WalkError> {
    let mut out = vec![Distribution::delta()];
    for _ in 0..n {
        let next = step(out.last().expect("nonempty"), s, cap)?;
        out.push(next);
    }
    Ok(out)
}

/// `a_n = [1]uⁿ` for `n ≤ max_n`.
///
/// Only the distributions up to `⌈max_n/2⌉` steps are built; the count of
/// closed walks of length `p + q` is `Σ_g d_p(g)·d_q(g⁻¹)`.
pub fn return_counts(s: &GeneratingSet, max_n: usize, cap: usize) -> Result<Vec<BigInt>, WalkError> {
    let dists = walk(s, max_n.div_ceil(2), cap)?;
    (0..=max_n)
        .map(|n| {
            let (p, q) = (n.div_ceil(2), n / 2);
            let (dp, dq) = (&dists[p], &dists[q]);
            let mut total = BigInt::zero();
            for (g, c) in dq.iter() {
                let other = dp.count(&g.inverse()?);
                if other != 0 {
                    total += BigInt::from(u128::from(c) * u128::from(other));
                }
            }
            Ok(total)
        })
        .collect()
}

/// `p(n) = a_n / |S|ⁿ`, where `|S|` is the total weight.
pub fn return_probability(a: &[BigInt], size: u64) -> Vec<BigRational> {
    let mut denom = BigInt::one();
    a.iter()
        .map(|an| {
            let p = BigRational::new(an.clone(), denom.clone());
            denom *= size;
            p
        })
        .collect()
}

/// A walk on an arbitrary matrix group, keyed by the matrices themselves.
pub fn matrix_walk(
    gens: &[(IntMatrix, u64)],
    n: usize,
    cap: usize,
) -> Result<Vec<HashMap<IntMatrix, u64>>, WalkError> {
    let dim = gens.first().map_or(1, |(m, _)| m.dim());
    let mut cur: HashMap<IntMatrix, u64> = HashMap::from([(IntMatrix::identity(dim), 1)]);
    let mut out = vec![cur.clone()];
    for _ in 0..n {
        let mut next: HashMap<IntMatrix, u64> = HashMap::with_capacity(cur.len() * gens.len());
        for (x, c) in &cur {
            for (g, w) in gens {
                let slot = next.entry(x.mul(g)).or_insert(0);
                *slot = c
                    .checked_mul(*w)
                    .and_then(|a| slot.checked_add(a))
                    .ok_or(WalkError::Overflow("walk counts"))?;
            }
        }
        if next.len() > cap {
            return Err(BudgetExceeded {
                what: "matrix walk",
                limit: cap,
            }
            .into());
        }
        out.push(next.clone());
        cur = next;
    }
    Ok(out)
}

/// Runs both backends for `n` steps and compares the distributions through
/// `(k, v) ↦ [[Mᵏ, v], [0, 1]]` at every step.
pub fn backend_crosscheck(s: &GeneratingSet, n: usize) -> Result<bool, WalkError> {
    let normal = walk(s, n, DEFAULT_BALL_CAP)?;
    let matrix = matrix_walk(&s.matrices()?, n, DEFAULT_BALL_CAP)?;
    for (d, m) in normal.iter().zip(&matrix) {
        if d.support_len() != m.len() {
            return Ok(false);
        }
        for (g, c) in d.iter() {
            if m.get(&g.to_matrix()?) != Some(&c) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Candidate shapes for `log p(2n) ≈ a + c·f(n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    Linear,
    CubeRoot,
    Log,
}

impl Shape {
    pub const ALL: [Shape; 3] = [Shape::Linear, Shape::CubeRoot, Shape::Log];

    fn feature(self, n: f64) -> f64 {
        match self {
            Shape::Linear => n,
            Shape::CubeRoot => n.cbrt(),
            Shape::Log => n.ln(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Shape::Linear => "c*n",
            Shape::CubeRoot => "c*n^(1/3)",
            Shape::Log => "c*log(n)",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShapeFit {
    pub shape: Shape,
    pub intercept: f64,
    pub slope: f64,
    /// Root-mean-square residual of the fit.
    pub residual: f64,
}

/// Least-squares fits of `log p(2n)` against each [`Shape`]. Floating point,
/// for diagnostics only: a finite prefix says nothing certain about the
/// asymptotics.
#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticReport {
    pub points: usize,
    pub fits: Vec<ShapeFit>,
}

impl AsymptoticReport {
    pub fn best(&self) -> &ShapeFit {
        self.fits
            .iter()
            .min_by(|a, b| a.residual.total_cmp(&b.residual))
            .expect("three fits")
    }
}

pub const MIN_FIT_POINTS: usize = 8;

/// `p` is indexed by step; the points used are `(n, ln p(2n))` for `n ≥ 1`.
pub fn asymptotic_report(p: &[f64]) -> Result<AsymptoticReport, WalkError> {
    let pts: Vec<(f64, f64)> = (1..)
        .map(|n| 2 * n)
        .take_while(|&i| i < p.len())
        .map(|i| {
            if p[i] > 0.0 {
                Ok(((i / 2) as f64, p[i].ln()))
            } else {
                Err(WalkError::NonPositive(i))
            }
        })
        .collect::<Result<_, _>>()?;
    if pts.len() < MIN_FIT_POINTS {
        return Err(WalkError::TooFewPoints {
            needed: MIN_FIT_POINTS,
            got: pts.len(),
        });
    }
    let fits = Shape::ALL.iter().map(|&shape| fit(shape, &pts)).collect();
    Ok(AsymptoticReport {
        points: pts.len(),
        fits,
    })
}

fn fit(shape: Shape, pts: &[(f64, f64)]) -> ShapeFit {
    let len = pts.len() as f64;
    let xs: Vec<f64> = pts.iter().map(|&(n, _)| shape.feature(n)).collect();
    let mx = xs.iter().sum::<f64>() / len;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / len;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(pts).map(|(x, p)| (x - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs
        .iter()
        .zip(pts)
        .map(|(x, p)| (p.1 - intercept - slope * x).powi(2))
        .sum();
    ShapeFit {
        shape,
        intercept,
        slope,
        residual: (sse / len).sqrt(),
    }
}

/// `ln` of a positive rational, accurate for huge numerators and denominators.
pub fn ln_rational(q: &BigRational) -> Option<f64> {
    if !q.is_positive() {
        return None;
    }
    Some(ln_big(q.numer()) - ln_big(q.denom()))
}

fn ln_big(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits < 1000 {
        return x.to_f64().expect("finite").ln();
    }
    let shift = bits - 60;
    (x >> shift).to_f64().expect("finite").ln() + shift as f64 * std::f64::consts::LN_2
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normal_form_matches_matrices() {
        let e = GeneratingSet::h_standard();
        for (g, _) in &e.elements {
            for (h, _) in &e.elements {
                let prod = g.mul(h).unwrap();
                assert_eq!(prod.to_matrix().unwrap(), g.to_matrix().unwrap().mul(&h.to_matrix().unwrap()));
            }
            assert!(g.mul(&g.inverse().unwrap()).unwrap().is_identity());
        }
        assert!(WalkGroupElement::identity().to_matrix().unwrap().is_identity());
    }

    #[test]
    fn matrix_round_trip() {
        for k in -6..=6 {
            let g = WalkGroupElement::new(k, [k * 3 - 1, 7]);
            let m = g.to_matrix().unwrap();
            assert_eq!(WalkGroupElement::from_matrix(&m, 64).unwrap(), g);
        }
        let bad = IntMatrix::from_i64(&[&[1, 1, 0], &[0, 1, 0], &[0, 0, 1]]).unwrap();
        assert!(WalkGroupElement::from_matrix(&bad, 64).is_err());
    }

    #[test]
    fn fixture_is_the_standard_set() {
        let v: Value = serde_json::from_str(GeneratingSet::fixture_text()).unwrap();
        let mut a = GeneratingSet::from_fixture_json(&v).unwrap();
        let mut b = GeneratingSet::h_standard();
        a.elements.sort();
        b.elements.sort();
        assert_eq!(a, b);
    }

    #[test]
    fn symmetry_flag_is_checked() {
        let g = WalkGroupElement::new(1, [0, 0]);
        assert!(matches!(GeneratingSet::new(vec![(g, 1)], true), Err(WalkError::NotSymmetric)));
        assert!(GeneratingSet::new(vec![(g, 1)], false).is_ok());
    }

    #[test]
    fn first_steps() {
        let e = GeneratingSet::h_standard();
        let d = walk(&e, 3, DEFAULT_BALL_CAP).unwrap();
        assert_eq!(d[1].support_len(), 6);
        assert!(d[1].iter().all(|(_, c)| c == 1));
        for (n, dist) in d.iter().enumerate() {
            assert_eq!(dist.mass(), 6u128.pow(n as u32));
            assert!(dist.is_inversion_symmetric().unwrap());
        }
        let a = return_counts(&e, 4, DEFAULT_BALL_CAP).unwrap();
        assert_eq!(a[..3], [BigInt::one(), BigInt::zero(), BigInt::from(6)]);
        for (n, an) in a.iter().enumerate() {
            assert_eq!(*an, BigInt::from(walk(&e, n, DEFAULT_BALL_CAP).unwrap()[n].identity_count()));
        }
    }

    #[test]
    fn probabilities() {
        let p = return_probability(&[BigInt::one(), BigInt::zero(), BigInt::from(6)], 6);
        assert_eq!(p[0], BigRational::one());
        assert!(p[1].is_zero());
        assert_eq!(p[2], BigRational::new(BigInt::one(), BigInt::from(6)));
    }

    #[test]
    fn cap_is_enforced() {
        let e = GeneratingSet::h_standard();
        assert!(matches!(walk(&e, 5, 50), Err(WalkError::Budget(_))));
    }

    #[test]
    fn backends_agree() {
        assert!(backend_crosscheck(&GeneratingSet::h_standard(), 5).unwrap());
    }

    #[test]
    fn synthetic_fits() {
        let rho: f64 = 0.7;
        let make = |f: &dyn Fn(f64) -> f64| -> Vec<f64> {
            (0..=40).map(|i| if i % 2 == 0 { f((i / 2) as f64) } else { 0.0 }).collect()
        };
        let lin = asymptotic_report(&make(&|n| rho.powf(n))).unwrap();
        assert_eq!(lin.best().shape, Shape::Linear);
        assert!(lin.best().residual < 1e-9);
        let cube = asymptotic_report(&make(&|n| 3.0 * rho.powf(n.cbrt()))).unwrap();
        assert_eq!(cube.best().shape, Shape::CubeRoot);
        assert!(cube.best().residual < 1e-9);
        assert!(matches!(asymptotic_report(&[1.0; 10]), Err(WalkError::TooFewPoints { .. })));
    }

    #[test]
    fn log_of_huge_rationals() {
        let q = BigRational::new(BigInt::one(), BigInt::from(6).pow(2000u32));
        let l = ln_rational(&q).unwrap();
        assert!((l + 2000.0 * 6f64.ln()).abs() < 1e-9 * 2000.0);
        assert!(ln_rational(&BigRational::zero()).is_none());
    }
}
