//! Auxiliary-space fusion: symmetrizer projectors, the transformation
//! matrices into the projector eigenbasis, fused R/K/monodromy/transfer
//! matrices for both boundary kinds, the fusion hierarchies, and all
//! root-of-unity truncation identities.

pub mod basis;
pub mod fused_r;
pub mod kernels;
pub mod obc;
pub mod pbc;
pub mod projectors;

pub use basis::{load_fusion_basis, FusionBasis, FusionError};
pub use fused_r::{fused_r, fused_sigma_z};
pub use projectors::{projector_pair_two, projector_plus};
