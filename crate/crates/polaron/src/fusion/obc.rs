//! Fused boundary matrices, the fused open-boundary transfer matrices, the
//! OBC fusion hierarchy, and the boundary/transfer truncation identities at
//! roots of unity.

use crate::boundary::{k_minus, k_plus, sqd_obc_closed, transfer_obc};
use crate::bulk::{quantum_spec, r_matrix};
use crate::graded::{GradedMatrix, Signature, SpaceSpec};
use crate::grassmann::{C64, GrassmannNumber};
use crate::model::{eta_p, zeta_kernel, BoundaryParams, ModelParams};
use crate::report::VerificationReport;

use super::basis::{load_fusion_basis, FusionError};
use super::fused_r::{fused_r, fused_sigma_z};
use super::kernels::{mu_kernel, nu_kernel, phi_id, phi_id_tilde, phi_tau, phi_tau_tilde, xi_product};
use super::projectors::projector_plus;

/// `R^string_i(u) = ∏_{k=1}^{i} R_{k,i+1}(2u+[i+k−1]·2η)` on `n` auxiliary
/// factors (1-based space labels, k ascending from the left).
fn r_string(i: usize, u: C64, eta: C64, spec: &SpaceSpec) -> GradedMatrix {
    let mut acc = GradedMatrix::identity(spec);
    for k in 1..=i {
        let arg = 2.0 * u + 2.0 * eta * ((i + k - 1) as f64);
        let r = GradedMatrix::embed_two(&r_matrix(arg, eta).unwrap(), spec, k - 1, i).unwrap();
        acc = acc.matmul(&r);
    }
    acc
}

/// `R̄^string_i(u) = ∏_{k=1}^{i} R̄_{n+1−k, n−i}(−2u+[i+k−1−2n]·2η)`.
fn rbar_string(i: usize, n: usize, u: C64, eta: C64, spec: &SpaceSpec) -> GradedMatrix {
    let mut acc = GradedMatrix::identity(spec);
    for k in 1..=i {
        let arg = -2.0 * u + 2.0 * eta * ((i + k) as f64 - 1.0 - 2.0 * n as f64);
        let rbar = crate::boundary::conjugated_r(arg, eta);
        let emb = GradedMatrix::embed_two(&rbar, spec, n - k, n - i - 1).unwrap();
        acc = acc.matmul(&emb);
    }
    acc
}

/// Projected fused left boundary matrix `K⁻_{(1…n)}(u)` on `n` auxiliary factors.
fn fused_k_minus_projected(params: &ModelParams, n: usize, u: C64) -> GradedMatrix {
    let eta = params.eta();
    let spec = SpaceSpec::power(Signature::bf(), n);
    let mut x = GradedMatrix::identity(&spec);
    for i in 1..n {
        let shift = 2.0 * eta * ((i - 1) as f64);
        let k = GradedMatrix::embed_one(&k_minus(params, u + shift), &spec, i - 1).unwrap();
        x = x.matmul(&k).matmul(&r_string(i, u, eta, &spec));
    }
    let k_last = GradedMatrix::embed_one(&k_minus(params, u + 2.0 * eta * ((n - 1) as f64)), &spec, n - 1).unwrap();
    x = x.matmul(&k_last);
    if n == 1 {
        return x;
    }
    let p = projector_plus(n);
    p.matmul(&x).matmul(&p)
}

/// Projected fused right boundary matrix `K⁺_{(1…n)}(u)`.
fn fused_k_plus_projected(params: &ModelParams, n: usize, u: C64) -> GradedMatrix {
    let eta = params.eta();
    let spec = SpaceSpec::power(Signature::bf(), n);
    let mut x = GradedMatrix::identity(&spec);
    for i in 1..n {
        let shift = 2.0 * eta * ((n - i) as f64);
        let k = GradedMatrix::embed_one(&k_plus(params, u + shift), &spec, n - i).unwrap();
        x = x.matmul(&k).matmul(&rbar_string(i, n, u, eta, &spec));
    }
    let k_first = GradedMatrix::embed_one(&k_plus(params, u), &spec, 0).unwrap();
    x = x.matmul(&k_first);
    if n == 1 {
        return x;
    }
    let p = projector_plus(n);
    p.matmul(&x).matmul(&p)
}

/// Fused boundary matrices reduced to the `(n+1)`-dimensional block.
/// Degenerate level n = 0 is the scalar 1 on a one-dimensional space.
pub fn fused_k(params: &ModelParams, plus: bool, n: usize, u: C64) -> Result<GradedMatrix, FusionError> {
    if n == 0 {
        let spec = SpaceSpec::single(Signature::alternating(1));
        return Ok(GradedMatrix::identity(&spec));
    }
    let projected = if plus {
        fused_k_plus_projected(params, n, u)
    } else {
        fused_k_minus_projected(params, n, u)
    };
    if n == 1 {
        return Ok(projected);
    }
    let basis = load_fusion_basis(n)?;
    let conjugated = basis.a.matmul(&projected).matmul(&basis.a_inv);
    let leak = conjugated.block_leakage(n + 1);
    if leak > 1e-10 {
        return Err(FusionError::BlockLeakage { level: n, leak });
    }
    Ok(conjugated.leading_block(n + 1, Signature::alternating(n + 1)))
}

/// Fused OBC transfer matrix
/// `τ⁽ⁿ⁾(u) = str_{⟪1…n⟫}{K⁺_{⟪n⟫}(u) T_{⟪n⟫}(u) K⁻_{⟪n⟫}(u) T̂_{⟪n⟫}(u+[n−1]2η)}`
/// acting on the quantum space. Level 0 is `−𝟙`.
pub fn fused_transfer_obc(params: &ModelParams, level: usize, u: C64) -> Result<GradedMatrix, FusionError> {
    let nsites = params.sites;
    if level == 0 {
        return Ok(GradedMatrix::identity(&quantum_spec(nsites)).scale(C64::new(-1.0, 0.0)));
    }
    let eta = params.eta();
    let n = level;
    let r = fused_r(n, u, eta)?;
    let aux_sig = Signature::alternating(n + 1);
    let mut factors = vec![aux_sig.clone()];
    factors.extend(std::iter::repeat(Signature::bf()).take(nsites));
    let spec = SpaceSpec::new(factors);

    // Fused monodromy: sites descending.
    let mut t = GradedMatrix::embed_two(&r, &spec, 0, nsites).unwrap();
    for site in (1..nsites).rev() {
        t = t.matmul(&GradedMatrix::embed_two(&r, &spec, 0, site).unwrap());
    }
    // Fused inverse monodromy at shifted argument: sites ascending over the
    // same fused R, divided by the ζ-product per site.
    let mut t_hat = GradedMatrix::embed_two(&r, &spec, 0, 1).unwrap();
    for site in 2..=nsites {
        t_hat = t_hat.matmul(&GradedMatrix::embed_two(&r, &spec, 0, site).unwrap());
    }
    let mut zprod = C64::new(1.0, 0.0);
    for k in 0..n {
        zprod *= zeta_kernel(u + 2.0 * eta * (k as f64), eta);
    }
    t_hat = t_hat.scale(C64::new(1.0, 0.0) / zprod.powu(nsites as u32));

    let kp = GradedMatrix::embed_one(&fused_k(params, true, n, u)?, &spec, 0).unwrap();
    let km = GradedMatrix::embed_one(&fused_k(params, false, n, u)?, &spec, 0).unwrap();
    // The supertrace of the projected product carries (−1)^{n−1} relative to
    // the hierarchy normalization; fixed against the n = 1 and n = 2 fusion
    // relations.
    let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
    Ok(kp
        .matmul(&t)
        .matmul(&km)
        .matmul(&t_hat)
        .partial_super_trace(0)
        .expect("supertrace over fused auxiliary space")
        .scale(C64::new(sign, 0.0)))
}

/// Rescaled fused transfer matrix `τ̃⁽ⁿ⁾(u)`: `τ̃⁽⁰⁾ ≡ 𝟙`,
/// `τ̃⁽ⁿ⁾(u) = −[∏_{i=1}^{n−1} ξ_i(u)]⁻¹ τ⁽ⁿ⁾(u)`.
pub fn fused_transfer_obc_rescaled(params: &ModelParams, level: usize, u: C64) -> Result<GradedMatrix, FusionError> {
    if level == 0 {
        return Ok(GradedMatrix::identity(&quantum_spec(params.sites)));
    }
    let eta = params.eta();
    let xi = xi_product(level - 1, u, eta);
    Ok(fused_transfer_obc(params, level, u)?.scale(-C64::new(1.0, 0.0) / xi))
}

/// `Δ̃(u) = Δ(u)/ζ(2u+4η)` with the factored closed form of `Δ`.
pub fn sqd_obc_tilde(params: &ModelParams, u: C64) -> C64 {
    let eta = params.eta();
    sqd_obc_closed(params, u) / zeta_kernel(2.0 * u + 4.0 * eta, eta)
}

/// Residual of the rescaled OBC fusion hierarchy
/// `τ̃⁽ⁿ⁾(u) τ̃⁽¹⁾(u+n·2η) = τ̃⁽ⁿ⁺¹⁾(u) − Δ̃(u+[n−1]2η) τ̃⁽ⁿ⁻¹⁾(u)`.
pub fn hierarchy_residual_obc(params: &ModelParams, n: usize, u: C64) -> Result<f64, FusionError> {
    assert!(n >= 1);
    let eta = params.eta();
    let lhs = fused_transfer_obc_rescaled(params, n, u)?
        .matmul(&fused_transfer_obc_rescaled(params, 1, u + 2.0 * eta * (n as f64))?);
    let dt = sqd_obc_tilde(params, u + 2.0 * eta * ((n - 1) as f64));
    let rhs = fused_transfer_obc_rescaled(params, n + 1, u)?
        .sub(&fused_transfer_obc_rescaled(params, n - 1, u)?.scale(dt));
    Ok(lhs.sub(&rhs).max_abs())
}

/// Residual of the unrescaled form
/// `τ⁽ⁿ⁾(u)τ⁽¹⁾(u+n·2η) = −τ⁽ⁿ⁺¹⁾(u)/ξ_n(u) + Δ(u+[n−1]2η)/ζ(2u+2n·2η) · ξ_{n−1}(u) τ⁽ⁿ⁻¹⁾(u)`.
pub fn hierarchy_residual_obc_unrescaled(params: &ModelParams, n: usize, u: C64) -> Result<f64, FusionError> {
    assert!(n >= 1);
    let eta = params.eta();
    let lhs = fused_transfer_obc(params, n, u)?
        .matmul(&fused_transfer_obc(params, 1, u + 2.0 * eta * (n as f64))?);
    let xi_n = super::kernels::xi_kernel(n, u, eta);
    let xi_nm1 = super::kernels::xi_kernel(n - 1, u, eta);
    let delta = sqd_obc_closed(params, u + 2.0 * eta * ((n - 1) as f64));
    let coeff = delta / zeta_kernel(2.0 * u + 2.0 * eta * (2.0 * n as f64), eta) * xi_nm1;
    let rhs = fused_transfer_obc(params, n + 1, u)?
        .scale(-C64::new(1.0, 0.0) / xi_n)
        .add(&fused_transfer_obc(params, n - 1, u)?.scale(coeff));
    Ok(lhs.sub(&rhs).max_abs())
}

pub fn check_hierarchy_obc(
    params: &ModelParams,
    n_max: usize,
    samples: &[C64],
    tol: f64,
) -> VerificationReport {
    let mut report = VerificationReport::new("hierarchy-obc", 0);
    let kind = if params.open_params().map(|b| b.is_diagonal()).unwrap_or(false) {
        "diagonal"
    } else {
        "nondiagonal"
    };
    for n in 1..=n_max {
        let mut worst: f64 = 0.0;
        for &u in samples {
            match hierarchy_residual_obc(params, n, u) {
                Ok(r) => worst = worst.max(r),
                Err(_) => worst = f64::INFINITY,
            }
        }
        report.record(
            &format!("OBC fusion hierarchy level n={n} (N={}, {kind})", params.sites),
            "tau~(n)(u) tau~(1)(u+n 2eta) = tau~(n+1)(u) - Delta~(u+[n-1]2eta) tau~(n-1)(u)",
            samples.len(),
            worst,
            tol,
        );
    }
    // Unrescaled variant at the lowest level.
    let mut worst: f64 = 0.0;
    for &u in samples {
        match hierarchy_residual_obc_unrescaled(params, 1, u) {
            Ok(r) => worst = worst.max(r),
            Err(_) => worst = f64::INFINITY,
        }
    }
    report.record(
        &format!("OBC hierarchy unrescaled form (N={}, {kind})", params.sites),
        "tau(n) tau(1)(u+n 2eta) = -tau(n+1)/xi_n + Delta/zeta(2u+2n 2eta) xi_(n-1) tau(n-1)",
        samples.len(),
        worst,
        tol,
    );
    report
}

/// Residual of the K-matrix truncation identity at level `n`, `η = η_{n−1}`:
/// the C-conjugated fused K± equals `μ±_{n−1}(u)` times the block matrix
/// with `ν±` corners and the rescaled level-(n−2) boundary matrix inside.
pub fn truncation_residual_k(b: &BoundaryParams, plus: bool, n: usize, u: C64) -> Result<f64, FusionError> {
    assert!(n >= 2);
    let eta = eta_p(n - 1);
    // Rescaled K⁺ normalization: the identity is homogeneous of degree n in
    // ω₊, and the standard normalization diverges at η₁.
    let mut b = b.clone();
    b.scaled_k_plus = true;
    let b = &b;
    let params = ModelParams::open(1, eta, b.clone());
    let basis = load_fusion_basis(n)?;
    let fused = fused_k(&params, plus, n, u)?;
    let lhs = basis.c.matmul(&fused).matmul(&basis.c_inv);

    let mu = mu_kernel(plus, n - 1, u, b);
    let sign = if plus { 1.0 } else { -1.0 };
    let nu_top = nu_kernel(plus, n - 1, if plus { -u } else { u }, b);
    let nu_bottom = nu_kernel(plus, n - 1, if plus { u } else { -u }, b)
        * if n % 2 == 0 { 1.0 } else { sign };

    let mut worst: f64 = 0.0;
    worst = worst.max((lhs.get(0, 0).clone() - GrassmannNumber::from_complex(mu * nu_top)).max_abs());
    worst = worst.max(
        (lhs.get(n, n).clone() - GrassmannNumber::from_complex(mu * nu_bottom)).max_abs(),
    );
    // Center block: μ · B_{⟪1…n−2⟫} 𝒦±_{⟪n−2⟫}(u) B⁻¹ with
    // 𝒦⁻ = σᶻ_{⟪n−2⟫} K⁻_{⟪1…n−2⟫}(u+2η), 𝒦⁺ = K⁺_{⟪1…n−2⟫}(u+2η) σᶻ_{⟪n−2⟫}.
    if n >= 3 {
        let inner = fused_k(&params, plus, n - 2, u + 2.0 * eta)?;
        let sz = fused_sigma_z(n - 2);
        let curly = if plus { inner.matmul(&sz) } else { sz.matmul(&inner) };
        let inner_basis = load_fusion_basis(n - 2)?;
        let expect = inner_basis.b.matmul(&curly).matmul(&inner_basis.b_inv).scale(mu);
        for a in 1..n {
            for c in 1..n {
                worst = worst
                    .max((lhs.get(a, c).clone() - expect.get(a - 1, c - 1).clone()).max_abs());
            }
        }
    } else {
        // n = 2: degenerate center, μ · 1.
        worst = worst.max((lhs.get(1, 1).clone() - GrassmannNumber::from_complex(mu)).max_abs());
    }
    // The corner rows vanish off their diagonal entry; the center rows may
    // reach into the corner columns (the starred entries, which carry the
    // odd boundary content and drop out of every supertrace).
    for k in 0..=n {
        if k != 0 {
            worst = worst.max(lhs.get(0, k).max_abs());
        }
        if k != n {
            worst = worst.max(lhs.get(n, k).max_abs());
        }
    }
    Ok(worst)
}

/// Residual of the OBC transfer truncation
/// `τ⁽ⁿ⁾(u,η_{n−1}) = φ^id_{n−1}(u)·𝟙 − φ^τ_{n−1}(u)·τ⁽ⁿ⁻²⁾(u+2η_{n−1},η_{n−1})`
/// together with its rescaled variant.
pub fn truncation_residual_obc(
    b: &BoundaryParams,
    n: usize,
    nsites: usize,
    u: C64,
) -> Result<(f64, f64), FusionError> {
    assert!(n >= 2);
    let eta = eta_p(n - 1);
    let mut b = b.clone();
    b.scaled_k_plus = true;
    let b = &b;
    let params = ModelParams::open(nsites, eta, b.clone());
    let lhs = fused_transfer_obc(&params, n, u)?;
    let id = GradedMatrix::identity(&quantum_spec(nsites));
    let prev = fused_transfer_obc(&params, n - 2, u + 2.0 * eta)?;
    let rhs = id
        .scale(phi_id(n - 1, u, nsites, b))
        .sub(&prev.scale(phi_tau(n - 1, u, nsites, b)));
    let res = lhs.sub(&rhs).max_abs();

    // Rescaled variant.
    let lhs_t = fused_transfer_obc_rescaled(&params, n, u)?;
    let prev_t = if n == 2 {
        GradedMatrix::identity(&quantum_spec(nsites))
    } else {
        fused_transfer_obc_rescaled(&params, n - 2, u + 2.0 * eta)?
    };
    let rhs_t = id
        .scale(phi_id_tilde(n - 1, u, nsites, b))
        .sub(&prev_t.scale(phi_tau_tilde(n - 1, u, nsites, b)));
    let res_t = lhs_t.sub(&rhs_t).max_abs();
    Ok((res, res_t))
}

pub fn check_truncation_k(b: &BoundaryParams, levels: &[usize], samples: &[C64], tol: f64) -> VerificationReport {
    let mut report = VerificationReport::new("truncation-k", 0);
    for &n in levels {
        for plus in [false, true] {
            let mut worst: f64 = 0.0;
            for &u in samples {
                match truncation_residual_k(b, plus, n, u) {
                    Ok(r) => worst = worst.max(r),
                    Err(_) => worst = f64::INFINITY,
                }
            }
            let side = if plus { "K+" } else { "K-" };
            report.record(
                &format!("{side} truncation at level n={n} (eta_{})", n - 1),
                "C-conjugated fused K matches mu/nu kernel block structure",
                samples.len(),
                worst,
                tol,
            );
        }
    }
    report
}

pub fn check_truncation_obc(
    b: &BoundaryParams,
    cases: &[(usize, usize)],
    samples: &[C64],
    tol: f64,
) -> VerificationReport {
    let mut report = VerificationReport::new("truncation-obc", 0);
    for &(n, nsites) in cases {
        let mut worst: f64 = 0.0;
        let mut worst_t: f64 = 0.0;
        for &u in samples {
            match truncation_residual_obc(b, n, nsites, u) {
                Ok((r, rt)) => {
                    worst = worst.max(r);
                    worst_t = worst_t.max(rt);
                }
                Err(_) => {
                    worst = f64::INFINITY;
                    worst_t = f64::INFINITY;
                }
            }
        }
        report.record(
            &format!("OBC transfer truncation n={n}, N={nsites}"),
            "tau^(n)(u,eta_(n-1)) = phi_id 1 - phi_tau tau^(n-2)(u+2eta)",
            samples.len(),
            worst,
            tol,
        );
        report.record(
            &format!("OBC transfer truncation (rescaled) n={n}, N={nsites}"),
            "tau~(n) = phi_id~ 1 - phi_tau~ tau~(n-2)(u+2eta)",
            samples.len(),
            worst_t,
            tol,
        );
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::OddParam;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn grassmann_boundary() -> BoundaryParams {
        let mut b = BoundaryParams::diagonal(c(0.71, 0.23), c(1.13, -0.17));
        b.alpha_minus = OddParam::new(0.8, 0.1);
        b.beta_minus = OddParam::new(-0.4, 0.6);
        b.alpha_plus = OddParam::new(0.5, -0.3);
        b.beta_plus = OddParam::new(0.9, 0.2);
        b
    }

    fn diag_boundary() -> BoundaryParams {
        BoundaryParams::diagonal(c(0.71, 0.23), c(1.13, -0.17))
    }

    #[test]
    fn level_one_fused_k_is_bare() {
        let params = ModelParams::open(1, c(0.3, 0.1), grassmann_boundary());
        let u = c(0.43, 0.19);
        assert!(fused_k(&params, false, 1, u).unwrap().approx_eq(&k_minus(&params, u), 1e-13));
        assert!(fused_k(&params, true, 1, u).unwrap().approx_eq(&k_plus(&params, u), 1e-13));
    }

    #[test]
    fn fused_k_block_closes() {
        let params = ModelParams::open(1, c(0.3, 0.1), grassmann_boundary());
        for n in 2..=4 {
            for plus in [false, true] {
                let got = fused_k(&params, plus, n, c(0.37, 0.11));
                assert!(got.is_ok(), "leakage at n={n}, plus={plus}: {:?}", got.err());
            }
        }
    }

    #[test]
    fn fused_k_periodicity() {
        let params = ModelParams::open(1, c(0.3, 0.1), grassmann_boundary());
        let pi = c(std::f64::consts::PI, 0.0);
        let u = c(0.29, 0.07);
        for n in [1usize, 2, 3] {
            let sz = fused_sigma_z(n);
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            for plus in [false, true] {
                let lhs = fused_k(&params, plus, n, u + pi).unwrap();
                let rhs = sz.matmul(&fused_k(&params, plus, n, u).unwrap()).matmul(&sz).scale(c(sign, 0.0));
                assert!(lhs.approx_eq(&rhs, 1e-11), "fused K periodicity n={n} plus={plus}");
            }
        }
    }

    #[test]
    fn level_one_fused_transfer_is_bare() {
        for bnd in [diag_boundary(), grassmann_boundary()] {
            let params = ModelParams::open(2, c(0.3, 0.1), bnd);
            let u = c(0.52, 0.13);
            let fused = fused_transfer_obc(&params, 1, u).unwrap();
            assert!(fused.approx_eq(&transfer_obc(&params, u), 1e-11));
        }
    }

    #[test]
    fn obc_hierarchy_level_one() {
        for (bnd, nsites) in [(diag_boundary(), 1usize), (grassmann_boundary(), 1), (grassmann_boundary(), 2)] {
            let params = ModelParams::open(nsites, c(0.3, 0.1), bnd);
            for k in 0..3 {
                let u = c(0.23 + 0.17 * k as f64, 0.07);
                let r = hierarchy_residual_obc(&params, 1, u).unwrap();
                assert!(r < 1e-9, "OBC hierarchy n=1, N={nsites} residual {r:.3e}");
            }
        }
    }

    #[test]
    fn obc_hierarchy_level_two_and_unrescaled() {
        let params = ModelParams::open(1, c(0.3, 0.1), grassmann_boundary());
        let u = c(0.31, 0.09);
        let r = hierarchy_residual_obc(&params, 2, u).unwrap();
        assert!(r < 1e-9, "OBC hierarchy n=2 residual {r:.3e}");
        let ru = hierarchy_residual_obc_unrescaled(&params, 1, u).unwrap();
        assert!(ru < 1e-9, "unrescaled OBC hierarchy residual {ru:.3e}");
    }

    #[test]
    fn k_truncation_level_two() {
        for bnd in [diag_boundary(), grassmann_boundary()] {
            for plus in [false, true] {
                for k in 0..3 {
                    let u = c(0.22 + 0.2 * k as f64, 0.0);
                    let r = truncation_residual_k(&bnd, plus, 2, u).unwrap();
                    assert!(r < 1e-9, "K truncation n=2 plus={plus} residual {r:.3e}");
                }
            }
        }
    }

    #[test]
    fn obc_transfer_truncation_small() {
        for bnd in [diag_boundary(), grassmann_boundary()] {
            for (n, nsites) in [(2usize, 1usize), (3, 1)] {
                let u = c(0.41, 0.0);
                let (r, rt) = truncation_residual_obc(&bnd, n, nsites, u).unwrap();
                assert!(r < 1e-9, "OBC truncation n={n} N={nsites} residual {r:.3e}");
                assert!(rt < 1e-9, "rescaled OBC truncation n={n} N={nsites} residual {rt:.3e}");
            }
        }
    }
}
