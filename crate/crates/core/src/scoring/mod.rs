//! Residue alphabets, similarity matrices and the distances derived from
//! them.

mod alphabet;
mod matrix;
mod pssm;
mod quasi;

pub use alphabet::{Alphabet, INVALID, STANDARD_AMINO_ACIDS};
pub use matrix::{ScoreMatrix, BUILTIN_MATRICES};
pub use pssm::Pssm;
pub use quasi::{QuasiMetric, TriangleFailure};
