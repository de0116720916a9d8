//! Fraction-free linear algebra over arbitrary-precision integers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Row echelon form produced by Bareiss elimination.
#[derive(Debug, Clone)]
pub struct Echelon {
    pub rows: Vec<Vec<BigInt>>,
    /// Pivot column of each of the first `pivots.len()` rows.
    pub pivots: Vec<usize>,
    /// Number of row swaps performed.
    pub swaps: usize,
}

/// Bareiss fraction-free elimination to row echelon form.
///
/// Every intermediate entry is a minor of the input, so the divisions by the
/// previous pivot are exact.
pub fn echelon(matrix: &[Vec<BigInt>]) -> Echelon {
    let mut a: Vec<Vec<BigInt>> = matrix.to_vec();
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut prev = BigInt::one();
    let mut pivots = Vec::new();
    let mut swaps = 0;
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        if p != r {
            a.swap(p, r);
            swaps += 1;
        }
        let (top, rest) = a.split_at_mut(r + 1);
        let pivot_row = &top[r];
        for row in rest.iter_mut() {
            let factor = row[c].clone();
            for j in c + 1..cols {
                let num = &pivot_row[c] * &row[j] - &factor * &pivot_row[j];
                let (q, rem) = num.div_rem(&prev);
                debug_assert!(rem.is_zero(), "Bareiss division must be exact");
                row[j] = q;
            }
            row[c] = BigInt::zero();
        }
        prev = a[r][c].clone();
        pivots.push(c);
        r += 1;
    }
    Echelon {
        rows: a,
        pivots,
        swaps,
    }
}

pub fn rank(matrix: &[Vec<BigInt>]) -> usize {
    echelon(matrix).pivots.len()
}

/// Determinant of a square matrix; the last Bareiss pivot up to sign.
pub fn determinant(matrix: &[Vec<BigInt>]) -> BigInt {
    let n = matrix.len();
    if n == 0 {
        return BigInt::one();
    }
    assert!(matrix.iter().all(|r| r.len() == n), "determinant needs a square matrix");
    let e = echelon(matrix);
    if e.pivots.len() < n {
        return BigInt::zero();
    }
    let d = e.rows[n - 1][n - 1].clone();
    if e.swaps % 2 == 1 {
        -d
    } else {
        d
    }
}

/// Scales a nonzero integer vector to be primitive with a positive first
/// nonzero entry.
pub fn primitive(v: &[BigInt]) -> Vec<BigInt> {
    let g = v.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if g.is_zero() {
        return v.to_vec();
    }
    let lead_negative = v.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative());
    let g = if lead_negative { -g } else { g };
    v.iter().map(|x| x / &g).collect()
}

/// Integer basis of the right nullspace, one primitive vector per free column.
pub fn nullspace(matrix: &[Vec<BigInt>], cols: usize) -> Vec<Vec<BigInt>> {
    let e = echelon(matrix);
    let pivot_of_col: Vec<Option<usize>> = (0..cols)
        .map(|c| e.pivots.iter().position(|&p| p == c))
        .collect();
    let mut basis = Vec::new();
    for free in (0..cols).filter(|&c| pivot_of_col[c].is_none()) {
        let mut x: Vec<BigRational> = vec![BigRational::zero(); cols];
        x[free] = BigRational::one();
        for (r, &pc) in e.pivots.iter().enumerate().rev() {
            let row = &e.rows[r];
            let mut s = BigRational::zero();
            for j in pc + 1..cols {
                if !row[j].is_zero() && !x[j].is_zero() {
                    s += BigRational::from_integer(row[j].clone()) * &x[j];
                }
            }
            x[pc] = -s / BigRational::from_integer(row[pc].clone());
        }
        let denom = x.iter().fold(BigInt::one(), |l, q| l.lcm(q.denom()));
        let ints: Vec<BigInt> = x.iter().map(|q| q.numer() * (&denom / q.denom())).collect();
        basis.push(primitive(&ints));
    }
    basis
}
