//! Exact computation of genus-0 complex Gromov–Witten invariants of ℙ³ and of
//! the disk invariants of `(ℙ³, τ₃)` determined by the two real WDVV
//! relations, together with the line-class calculus producing lower bounds
//! for real rational curve counts.

pub mod algebra;
pub mod complex_gw;
pub mod insertions;
pub mod real_wdvv;
pub mod series;
pub mod target;

use algebra::{AlgebraError, Rational};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("degree {degree} has not been solved (store covers degrees up to {solved_up_to})")]
    NotSolved { degree: u32, solved_up_to: u32 },
    #[error("degree tier {degree} is underdetermined; free unknowns: {free}")]
    Underdetermined { degree: u32, free: String },
    #[error("degree tier {degree} is inconsistent: {detail}")]
    Inconsistent { degree: u32, detail: String },
    #[error("{what} is not an integer: {value}")]
    NonInteger { what: String, value: Rational },
    #[error("series cap q^{cap} exceeds solved degree {solved}")]
    CapExceedsSolved { cap: u32, solved: u32 },
    #[error("stores belong to different targets ({left} vs {right})")]
    TargetMismatch { left: String, right: String },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
