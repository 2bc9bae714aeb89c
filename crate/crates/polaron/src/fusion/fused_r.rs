//! Fused R-matrices in the auxiliary space: projected products of shifted
//! R-matrices reduced to their non-vanishing block in the projector
//! eigenbasis.

use crate::bulk::{r_matrix, sigma_z};
use crate::graded::{GradedMatrix, Signature, SpaceSpec};
use crate::grassmann::C64;

use super::basis::{load_fusion_basis, FusionError};
use super::projectors::projector_plus;

/// `P⁺_{1…m} R_{1q}(u) R_{2q}(u+2η) … R_{mq}(u+[m−1]2η) P⁺_{1…m}` on the
/// space (aux₁, …, aux_m, q).
pub fn fused_r_projected(m: usize, u: C64, eta: C64) -> GradedMatrix {
    assert!(m >= 1);
    let spec = SpaceSpec::power(Signature::bf(), m + 1);
    let q = m; // quantum factor index
    let mut prod = GradedMatrix::embed_two(&r_matrix(u, eta).unwrap(), &spec, 0, q).unwrap();
    for k in 1..m {
        let shifted = u + 2.0 * eta * (k as f64);
        let rk = GradedMatrix::embed_two(&r_matrix(shifted, eta).unwrap(), &spec, k, q).unwrap();
        prod = prod.matmul(&rk);
    }
    if m == 1 {
        return prod;
    }
    let p_plus = projector_plus(m);
    let id_q = GradedMatrix::identity(&SpaceSpec::single(Signature::bf()));
    let p_full = p_plus.super_tensor(&id_q);
    p_full.matmul(&prod).matmul(&p_full)
}

/// The reduced fused R-matrix `R_{⟪1…m⟫ q}(u)` acting on the
/// (m+1)-dimensional alternating auxiliary space ⊗ BF quantum space.
pub fn fused_r(m: usize, u: C64, eta: C64) -> Result<GradedMatrix, FusionError> {
    if m == 0 {
        // Degenerate level: no auxiliary legs, identity on the quantum space,
        // realized on a one-dimensional bosonic auxiliary factor.
        let spec = SpaceSpec::new(vec![Signature::alternating(1), Signature::bf()]);
        return Ok(GradedMatrix::identity(&spec));
    }
    let basis = load_fusion_basis(m)?;
    let projected = fused_r_projected(m, u, eta);
    let id_q = GradedMatrix::identity(&SpaceSpec::single(Signature::bf()));
    let a_full = basis.a.super_tensor(&id_q);
    let a_inv_full = basis.a_inv.super_tensor(&id_q);
    let conjugated = a_full.matmul(&projected).matmul(&a_inv_full);
    let leak = conjugated.block_leakage(m + 1);
    if leak > 1e-11 {
        return Err(FusionError::BlockLeakage { level: m, leak });
    }
    Ok(conjugated.leading_block(m + 1, Signature::alternating(m + 1)))
}

/// `σᶻ_{⟪m⟫}`: upper-left block of the conjugated `σᶻ_{(m)} = ∏ σᶻ_k`.
/// Acts on the fused auxiliary space alone.
pub fn fused_sigma_z(m: usize) -> GradedMatrix {
    assert!(m >= 1);
    if m == 1 {
        return sigma_z();
    }
    let basis = load_fusion_basis(m).expect("fusion basis");
    let spec = SpaceSpec::power(Signature::bf(), m);
    let sz = sigma_z();
    let mut prod = GradedMatrix::identity(&spec);
    for k in 0..m {
        prod = prod.matmul(&GradedMatrix::embed_one(&sz, &spec, k).unwrap());
    }
    let conjugated = basis.a.matmul(&prod).matmul(&basis.a_inv);
    conjugated.leading_block(m + 1, Signature::alternating(m + 1))
}
