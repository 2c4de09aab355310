//! Matrix orthogonal polynomials for functionals satisfying Pearson-type
//! distributional equations `D(uΦ) = uΨ`.
//!
//! A matrix functional `u` is represented by its moment sequence
//! `μ_n = ⟨xⁿI, u⟩`; moments are either given explicitly, generated from a
//! Pearson-type recurrence, or produced by a weight oracle from the
//! [`gallery`]. On top of the functionals the crate builds monic matrix
//! orthogonal polynomial segments, derivative segments and ladder
//! relations, the right-submodule and scalar-ideal analysis of the Pearson
//! equation, and the zero-class machinery (closed forms for norms and
//! subleading coefficients, existence criteria, second-order differential
//! equations, hermitian diagonalizability tests).
//!
//! Conventions, fixed once and inherited everywhere:
//!
//! * `⟨P, u⟩ = Σ p_i μ_i` — polynomial coefficients multiply moments on
//!   the left;
//! * `uQ` has moments `ν_n = Σ_k μ_{n+k} q_k` (coefficients on the right);
//! * `Qu` has moments `ν_n = Σ_k q_k μ_{n+k}`;
//! * `Du` has moments `ν_n = −n μ_{n−1}`;
//! * `u*` has moments `ν_n = μ_n^*`;
//! * `P_{−1} = 0` and `π_0 = 0`.

pub mod error;
pub mod functional;
pub mod gallery;
pub mod jsonspec;
pub mod linalg;
pub mod mop;
pub mod pearson;
pub mod zeroclass;

pub use error::{Error, Result};
pub use functional::{Functional, HankelProfile, PearsonSpec};
pub use linalg::{CMatrix, MatrixPolynomial, Tolerance};
pub use mop::MonicSegment;
pub use zeroclass::ZeroClassSpec;
