//! Graded vector spaces and super matrix operations: super tensor product
//! with Koszul signs, supertrace and partial supertrace, (inverse) partial
//! super transposition, graded permutation and graded site embeddings.

mod matrix;
mod signature;

pub use matrix::{graded_permutation, graded_swap, GradedError, GradedMatrix};
pub use signature::{Signature, SpaceSpec};
