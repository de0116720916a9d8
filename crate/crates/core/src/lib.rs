//! Exact computations around return counts `[1]uⁿ` in group rings of linear
//! groups: free-group words, group-ring powers, two-stack automata, the
//! witness element in `ℤ[F₁₁ × F₃]`, a P-recursive sequence toolkit, and
//! random walks on the solvable group `ℤ ⋉ ℤ²`.
//!
//! Everything that claims a certificate is computed with arbitrary-precision
//! integers. The only floating point lives in [`walk::fit`], which is a
//! diagnostic.

pub mod automaton;
pub mod holo;
pub mod linalg;
pub mod matrix;
pub mod reach;
pub mod ring;
pub mod walk;
pub mod witness;
pub mod words;

use thiserror::Error;

/// Resource guard tripped by a search or convolution.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{what} exceeded budget of {limit} entries")]
pub struct BudgetExceeded {
    pub what: &'static str,
    pub limit: usize,
}

/// Default cap on memo tables and ring supports.
pub const DEFAULT_BUDGET: usize = 10_000_000;

/// Crate-wide error, mostly for callers that drive several modules.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Word(#[from] words::WordError),
    #[error(transparent)]
    Ring(#[from] ring::RingError),
    #[error(transparent)]
    Automaton(#[from] automaton::AutomatonError),
    #[error(transparent)]
    Matrix(#[from] matrix::MatrixError),
    #[error(transparent)]
    Holo(#[from] holo::HoloError),
    #[error(transparent)]
    Walk(#[from] walk::WalkError),
    #[error(transparent)]
    Budget(#[from] BudgetExceeded),
}

impl Error {
    pub fn is_budget(&self) -> bool {
        match self {
            Error::Budget(_) => true,
            Error::Ring(e) => matches!(e, ring::RingError::Budget(_)),
            Error::Automaton(e) => matches!(e, automaton::AutomatonError::Budget(_)),
            Error::Walk(e) => matches!(e, walk::WalkError::Budget(_)),
            _ => false,
        }
    }
}
