//! Dense complex linear algebra with a single, explicit tolerance policy.
//!
//! Everything here is a pure function over immutable values. Eigenproblems
//! are restricted to self-adjoint input; general spectra are reached through
//! `m*m`.

mod linalg;
mod matrix;
mod tolerance;

pub use linalg::{
    cluster_descending, hermitian_eig, null_space, null_space_rect, null_space_stacked,
    null_space_scaled, operator_norm, rank_of, rank_of_rect, rank_with_scale, HermitianEigen,
};
pub(crate) use linalg::{eig_unchecked, gap_margins, right_singular};
pub use matrix::ComplexMatrix;
pub use tolerance::Tolerance;

/// The adjoint (conjugate transpose).
pub fn adjoint(m: &ComplexMatrix) -> ComplexMatrix {
    m.adjoint()
}
