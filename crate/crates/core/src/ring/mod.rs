//! Integer group ring `ℤ[F_X × F_Y]`, with an optional coefficient modulus.

mod search;
mod skeleton;

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::words::PairElement;
use crate::BudgetExceeded;

pub use search::{pruned_identity_count, PruneMode, PrunedSearch, SearchOptions};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RingError {
    #[error("modulus mismatch: {0:?} vs {1:?}")]
    ModulusMismatch(Option<u64>, Option<u64>),
    #[error("modulus must be at least 2, got {0}")]
    BadModulus(u64),
    #[error(transparent)]
    Budget(#[from] BudgetExceeded),
}

/// Finitely supported map from group elements to integers.
///
/// No stored coefficient is zero (or zero modulo `modulus`). In modular mode
/// coefficients are kept in `0..modulus`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingElement {
    terms: HashMap<PairElement, BigInt>,
    modulus: Option<u64>,
}

impl RingElement {
    pub fn zero(modulus: Option<u64>) -> Result<Self, RingError> {
        if let Some(m) = modulus {
            if m < 2 {
                return Err(RingError::BadModulus(m));
            }
        }
        Ok(RingElement {
            terms: HashMap::new(),
            modulus,
        })
    }

    pub fn one(modulus: Option<u64>) -> Result<Self, RingError> {
        Self::from_terms([(PairElement::identity(), BigInt::one())], modulus)
    }

    /// Sums the given terms; repeated elements accumulate.
    pub fn from_terms(
        terms: impl IntoIterator<Item = (PairElement, BigInt)>,
        modulus: Option<u64>,
    ) -> Result<Self, RingError> {
        let mut out = Self::zero(modulus)?;
        for (g, c) in terms {
            out.add_term(g, c);
        }
        Ok(out)
    }

    pub fn modulus(&self) -> Option<u64> {
        self.modulus
    }

    pub fn support_len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, g: &PairElement) -> BigInt {
        self.terms.get(g).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PairElement, &BigInt)> {
        self.terms.iter()
    }

    /// Terms sorted by group element, for deterministic output.
    pub fn sorted_terms(&self) -> Vec<(PairElement, BigInt)> {
        let mut v: Vec<_> = self
            .terms
            .iter()
            .map(|(g, c)| (g.clone(), c.clone()))
            .collect();
        v.sort();
        v
    }

    fn normalize(&self, c: BigInt) -> BigInt {
        match self.modulus {
            Some(m) => c.mod_floor(&BigInt::from(m)),
            None => c,
        }
    }

    pub fn add_term(&mut self, g: PairElement, c: BigInt) {
        let c = self.normalize(c);
        if c.is_zero() {
            return;
        }
        let modulus = self.modulus;
        let entry = self.terms.entry(g);
        match entry {
            std::collections::hash_map::Entry::Occupied(mut o) => {
                let mut v = o.get() + c;
                if let Some(m) = modulus {
                    v = v.mod_floor(&BigInt::from(m));
                }
                if v.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = v;
                }
            }
            std::collections::hash_map::Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    pub fn add(&self, other: &RingElement) -> Result<RingElement, RingError> {
        self.check_modulus(other)?;
        let mut out = self.clone();
        for (g, c) in &other.terms {
            out.add_term(g.clone(), c.clone());
        }
        Ok(out)
    }

    fn check_modulus(&self, other: &RingElement) -> Result<(), RingError> {
        if self.modulus != other.modulus {
            return Err(RingError::ModulusMismatch(self.modulus, other.modulus));
        }
        Ok(())
    }

    /// Convolution product, with no support cap.
    pub fn mul(&self, other: &RingElement) -> Result<RingElement, RingError> {
        self.mul_capped(other, usize::MAX)
    }

    /// Convolution product; fails once the partial result's support passes `cap`.
    pub fn mul_capped(&self, other: &RingElement, cap: usize) -> Result<RingElement, RingError> {
        self.check_modulus(other)?;
        let mut out = RingElement::zero(self.modulus)?;
        for (g1, c1) in &self.terms {
            for (g2, c2) in &other.terms {
                out.add_term(g1.mul(g2), c1 * c2);
            }
            if out.terms.len() > cap {
                return Err(BudgetExceeded {
                    what: "group-ring support",
                    limit: cap,
                }
                .into());
            }
        }
        Ok(out)
    }

    /// `[1]uⁿ`, the coefficient of the identity in the `n`-th power.
    ///
    /// Builds `u^⌈n/2⌉` by repeated multiplication (keeping `u^⌊n/2⌋` on the
    /// way) and pairs the two halves at inverse elements, so supports only
    /// ever reach half the exponent.
    pub fn coeff_at_identity_pow(&self, n: usize, cap: usize) -> Result<BigInt, RingError> {
        if n == 0 {
            return Ok(self.normalize(BigInt::one()));
        }
        let lo = n / 2;
        let hi = n - lo;
        let mut power = self.clone();
        let mut low_power = if lo == 0 {
            RingElement::one(self.modulus)?
        } else {
            self.clone()
        };
        for e in 2..=hi {
            power = power.mul_capped(self, cap)?;
            if e == lo {
                low_power = power.clone();
            }
        }
        let mut acc = BigInt::zero();
        for (g, c) in &power.terms {
            if let Some(d) = low_power.terms.get(&g.invert()) {
                acc += c * d;
            }
        }
        Ok(self.normalize(acc))
    }
}
