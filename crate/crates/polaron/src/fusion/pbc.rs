//! Fused transfer matrices for periodic boundary conditions, the PBC fusion
//! hierarchy, and the root-of-unity truncation identities.

use crate::bulk::{sigma_z_product, sqd_pbc_closed, quantum_spec};
use crate::graded::{GradedMatrix, Signature, SpaceSpec};
use crate::grassmann::C64;
use crate::model::{eta_p, zeta_kernel, ModelParams};
use crate::report::VerificationReport;

use super::basis::{load_fusion_basis, FusionError};
use super::fused_r::fused_r;
use super::kernels::m_kernel;

/// Fused PBC transfer matrix `τ⁽ⁿ⁾(u) = str_{⟪1…n+1⟫}{ ∏_{i=N…1} R_{⟪1…n+1⟫ q_i}(u) }`
/// acting on the quantum space. Level n = 0 is the ordinary transfer matrix;
/// τ⁽⁻¹⁾ ≡ 𝟙 by convention (pass `n = -1`).
pub fn fused_transfer_pbc(params: &ModelParams, level: i64, u: C64) -> Result<GradedMatrix, FusionError> {
    let nsites = params.sites;
    if level < 0 {
        return Ok(GradedMatrix::identity(&quantum_spec(nsites)));
    }
    let m = (level + 1) as usize; // number of fused auxiliary spaces
    let eta = params.eta();
    let r = fused_r(m, u, eta)?;
    let aux_sig = Signature::alternating(m + 1);
    let mut factors = vec![aux_sig.clone()];
    factors.extend(std::iter::repeat(Signature::bf()).take(nsites));
    let spec = SpaceSpec::new(factors);
    // Product over sites, site N leftmost.
    let mut t = GradedMatrix::embed_two(&r, &spec, 0, nsites).unwrap();
    for site in (1..nsites).rev() {
        t = t.matmul(&GradedMatrix::embed_two(&r, &spec, 0, site).unwrap());
    }
    Ok(t.partial_super_trace(0).expect("supertrace over fused auxiliary space"))
}

/// Residual of the PBC fusion hierarchy
/// `τ⁽ⁿ⁾(u) τ⁽⁰⁾(u+[n+1]2η) = τ⁽ⁿ⁺¹⁾(u) + δ(u+n·2η) τ⁽ⁿ⁻¹⁾(u)`
/// as an operator identity at one sample point.
pub fn hierarchy_residual_pbc(params: &ModelParams, n: usize, u: C64) -> Result<f64, FusionError> {
    let eta = params.eta();
    let lhs = fused_transfer_pbc(params, n as i64, u)?
        .matmul(&fused_transfer_pbc(params, 0, u + 2.0 * eta * (n as f64 + 1.0))?);
    let delta = sqd_pbc_closed(params, u + 2.0 * eta * (n as f64));
    let rhs = fused_transfer_pbc(params, n as i64 + 1, u)?
        .add(&delta.matmul(&fused_transfer_pbc(params, n as i64 - 1, u)?));
    Ok(lhs.sub(&rhs).max_abs())
}

/// Full PBC hierarchy suite over levels `n ≤ n_max` and sample points.
pub fn check_hierarchy_pbc(
    params: &ModelParams,
    n_max: usize,
    samples: &[C64],
    tol: f64,
) -> VerificationReport {
    let mut report = VerificationReport::new("hierarchy-pbc", 0);
    for n in 0..=n_max {
        let mut worst: f64 = 0.0;
        for &u in samples {
            match hierarchy_residual_pbc(params, n, u) {
                Ok(r) => worst = worst.max(r),
                Err(e) => {
                    report.record(
                        &format!("fusion hierarchy level n={n} (N={})", params.sites),
                        &e.to_string(),
                        samples.len(),
                        f64::INFINITY,
                        tol,
                    );
                    continue;
                }
            }
        }
        report.record(
            &format!("fusion hierarchy level n={n} (N={})", params.sites),
            "tau^(n)(u) tau^(0)(u+[n+1]2eta) = tau^(n+1)(u) + delta(u+n 2eta) tau^(n-1)(u)",
            samples.len(),
            worst,
            tol,
        );
    }
    // Mutual commutation across fused levels.
    let mut worst: f64 = 0.0;
    let u = samples.first().copied().unwrap_or(C64::new(0.43, 0.11));
    let v = samples.get(1).copied().unwrap_or(C64::new(-0.29, 0.07));
    let mut ops = Vec::new();
    for n in 0..=n_max as i64 {
        ops.push(fused_transfer_pbc(params, n, u).expect("fused transfer"));
        ops.push(fused_transfer_pbc(params, n, v).expect("fused transfer"));
    }
    for a in &ops {
        for b in &ops {
            worst = worst.max(a.commutator(b).max_abs());
        }
    }
    report.record(
        "fused transfer matrices mutually commute",
        "[tau^(n)(u), tau^(m)(v)] = 0",
        ops.len() * ops.len(),
        worst,
        tol,
    );
    report
}

/// Residual of the B-conjugated R-matrix truncation identity at `η = η_p`:
/// corners `∓𝓜_p(u)·σᶻ-powers`, center `ζ(u) σᶻ_q 𝓡^{(p−2)}(u+2η_p)`.
pub fn truncation_residual_r(p: usize, u: C64) -> Result<f64, FusionError> {
    let eta = eta_p(p);
    let m = p + 1;
    let basis = load_fusion_basis(m)?;
    let fused = fused_r(m, u, eta)?;
    // 𝓡⁽ᵖ⁾ = B R_{⟪…⟫q} B⁻¹ on (fused aux ⊗ q).
    let id_q = GradedMatrix::identity(&SpaceSpec::single(Signature::bf()));
    let b_full = basis.b.super_tensor(&id_q);
    let b_inv_full = basis.b_inv.super_tensor(&id_q);
    let curly = b_full.matmul(&fused).matmul(&b_inv_full);

    // Expected block structure.
    let sz = crate::bulk::sigma_z();
    let mp = m_kernel(p, u);
    let mut worst: f64 = 0.0;
    // Top corner: −𝓜_p(u) σᶻ_q at fused-aux index 0.
    let top = block2(&curly, 0, 0);
    worst = worst.max(top.sub(&sz.scale(-mp)).max_abs());
    // Bottom corner: +𝓜_p(u) (σᶻ_q)^p at fused-aux index p+1.
    let bottom = block2(&curly, m, m);
    let sz_pow = if p % 2 == 1 { sz.clone() } else { GradedMatrix::identity(&SpaceSpec::single(Signature::bf())) };
    worst = worst.max(bottom.sub(&sz_pow.scale(mp)).max_abs());
    // Center: ζ(u) σᶻ_q 𝓡⁽ᵖ⁻²⁾(u+2η_p) on fused-aux indices 1..=p.
    let zeta = zeta_kernel(u, eta);
    if p >= 2 {
        let inner_basis = load_fusion_basis(p - 1)?;
        let inner = fused_r(p - 1, u + 2.0 * eta, eta)?;
        let bi = inner_basis.b.super_tensor(&id_q);
        let bi_inv = inner_basis.b_inv.super_tensor(&id_q);
        let curly_inner = bi.matmul(&inner).matmul(&bi_inv);
        let sz_inner = GradedMatrix::embed_one(&sz, curly_inner.row_spec(), 1).unwrap();
        let expect = sz_inner.matmul(&curly_inner).scale(zeta);
        for a in 1..=p {
            for b in 1..=p {
                let got = block2(&curly, a, b);
                let want = block2(&expect, a - 1, b - 1);
                worst = worst.max(got.sub(&want).max_abs());
            }
        }
    } else {
        // p = 1: the center is the degenerate level, ζ(u) σᶻ_q itself.
        let center = block2(&curly, 1, 1);
        worst = worst.max(center.sub(&sz.scale(zeta)).max_abs());
    }
    // The corner rows vanish off their diagonal; the remaining off-blocks
    // (center rows into corner columns) are the unconstrained entries of the
    // block-triangular structure and drop out of every supertrace.
    for &a in &[0usize, m] {
        for b in 0..=m {
            if b != a {
                worst = worst.max(block2(&curly, a, b).max_abs());
            }
        }
    }
    Ok(worst)
}

/// 2×2 quantum-space block of an operator on (fused aux ⊗ q) at aux indices (a, b).
fn block2(mat: &GradedMatrix, a: usize, b: usize) -> GradedMatrix {
    let spec = SpaceSpec::single(Signature::bf());
    GradedMatrix::from_fn(spec.clone(), spec, |i, j| mat.get(a * 2 + i, b * 2 + j).clone())
}

/// Residual of the PBC transfer-matrix truncation identity at `η = η_p`:
/// `τ⁽ᵖ⁾(u,η_p) = [−𝓜_p(u)]ᴺ ∏σᶻ − (−1)ᵖ [𝓜_p(u)]ᴺ ∏(σᶻ)ᵖ − ζᴺ(u) ∏σᶻ · τ⁽ᵖ⁻²⁾(u+2η_p, η_p)`.
pub fn truncation_residual_pbc(p: usize, nsites: usize, u: C64) -> Result<f64, FusionError> {
    let eta = eta_p(p);
    let params = ModelParams::periodic(nsites, eta);
    let lhs = fused_transfer_pbc(&params, p as i64, u)?;
    let mp = m_kernel(p, u);
    let szp = sigma_z_product(nsites);
    let id = GradedMatrix::identity(&quantum_spec(nsites));
    let sz_pow = if p % 2 == 1 { szp.clone() } else { id.clone() };
    let sign_p = if p % 2 == 0 { 1.0 } else { -1.0 };
    let term1 = szp.scale((-mp).powu(nsites as u32));
    let term2 = sz_pow.scale(mp.powu(nsites as u32) * sign_p);
    let term3 = szp
        .matmul(&fused_transfer_pbc(&params, p as i64 - 2, u + 2.0 * eta)?)
        .scale(zeta_kernel(u, eta).powu(nsites as u32));
    let rhs = term1.sub(&term2).sub(&term3);
    Ok(lhs.sub(&rhs).max_abs())
}

pub fn check_truncation_r(ps: &[usize], samples: &[C64], tol: f64) -> VerificationReport {
    let mut report = VerificationReport::new("truncation-r", 0);
    for &p in ps {
        let mut worst: f64 = 0.0;
        for &u in samples {
            match truncation_residual_r(p, u) {
                Ok(r) => worst = worst.max(r),
                Err(e) => {
                    worst = f64::INFINITY;
                    report.note(&format!("R truncation p={p} construction"), &e.to_string(), 0, f64::NAN);
                }
            }
        }
        report.record(
            &format!("R-matrix truncation at p={p}"),
            "B-conjugated fused R at level p+1 block-decomposes into M_p corners and zeta sigma^z R^(p-2)",
            samples.len(),
            worst,
            tol,
        );
    }
    report
}

pub fn check_truncation_pbc(cases: &[(usize, usize)], samples: &[C64], tol: f64) -> VerificationReport {
    let mut report = VerificationReport::new("truncation-pbc", 0);
    for &(p, nsites) in cases {
        let mut worst: f64 = 0.0;
        for &u in samples {
            match truncation_residual_pbc(p, nsites, u) {
                Ok(r) => worst = worst.max(r),
                Err(_) => worst = f64::INFINITY,
            }
        }
        report.record(
            &format!("PBC transfer truncation p={p}, N={nsites}"),
            "tau^(p)(u,eta_p) = [-M_p]^N prod sigma^z - (-1)^p [M_p]^N prod (sigma^z)^p - zeta^N prod sigma^z tau^(p-2)(u+2eta_p)",
            samples.len(),
            worst,
            tol,
        );
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn level_zero_matches_bulk_transfer() {
        let params = ModelParams::periodic(2, c(0.3, 0.1));
        let u = c(0.52, 0.13);
        let fused = fused_transfer_pbc(&params, 0, u).unwrap();
        let plain = crate::bulk::transfer_pbc(&params, u);
        assert!(fused.approx_eq(&plain, 1e-12));
    }

    #[test]
    fn hierarchy_small_cases() {
        let params = ModelParams::periodic(2, c(0.3, 0.1));
        for n in 0..=2usize {
            for k in 0..3 {
                let u = c(0.21 + 0.2 * k as f64, 0.11);
                let r = hierarchy_residual_pbc(&params, n, u).unwrap();
                assert!(r < 1e-10, "hierarchy n={n} residual {r:.3e}");
            }
        }
    }

    #[test]
    fn hierarchy_sign_sectors_at_n1() {
        // At N=1 in the diagonal basis the SQD term carries (−1)^M per sector.
        let params = ModelParams::periodic(1, c(0.3, 0.1));
        let u = c(0.37, 0.09);
        let r = hierarchy_residual_pbc(&params, 1, u).unwrap();
        assert!(r < 1e-11);
        let delta = sqd_pbc_closed(&params, u);
        // δ is diagonal with opposite signs in the two parity sectors.
        let d0 = delta.get(0, 0).body();
        let d1 = delta.get(1, 1).body();
        assert!((d0 + d1).norm() < 1e-12);
    }

    #[test]
    fn fused_levels_commute() {
        let params = ModelParams::periodic(2, c(0.3, 0.1));
        let u = c(0.43, 0.12);
        let v = c(-0.31, 0.21);
        let t1 = fused_transfer_pbc(&params, 1, u).unwrap();
        let t2 = fused_transfer_pbc(&params, 2, v).unwrap();
        assert!(t1.commutator(&t2).max_abs() < 1e-11);
        let t0 = fused_transfer_pbc(&params, 0, v).unwrap();
        assert!(t1.commutator(&t0).max_abs() < 1e-11);
    }

    #[test]
    fn r_truncation_small() {
        for p in [1usize, 2] {
            for k in 0..3 {
                let u = c(0.27 + 0.19 * k as f64, 0.0);
                let r = truncation_residual_r(p, u).unwrap();
                assert!(r < 1e-11, "R truncation p={p} residual {r:.3e}");
            }
        }
    }

    #[test]
    fn pbc_truncation_small() {
        for (p, n) in [(1usize, 1usize), (1, 2), (2, 1), (2, 2)] {
            for k in 0..2 {
                let u = c(0.33 + 0.17 * k as f64, 0.0);
                let r = truncation_residual_pbc(p, n, u).unwrap();
                assert!(r < 1e-10, "PBC truncation p={p} N={n} residual {r:.3e}");
            }
        }
    }
}
