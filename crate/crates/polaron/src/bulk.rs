//! Bulk integrable structure: the graded six-vertex R-matrix with its
//! property battery, Lax operators, periodic monodromy and transfer
//! matrices, the PBC Hamiltonian, the periodic super quantum determinant
//! and the transfer-matrix asymptotics.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::graded::{graded_swap, GradedMatrix, Signature, SpaceSpec};
use crate::grassmann::{C64, GrassmannNumber};
use crate::model::{csin, zeta_kernel, ModelError, ModelParams};
use crate::report::VerificationReport;

/// Quantum space of an `n`-site chain: `n` BF factors, site `j` at factor `j-1`.
pub fn quantum_spec(n: usize) -> SpaceSpec {
    SpaceSpec::power(Signature::bf(), n)
}

/// Auxiliary ⊗ quantum space: factor 0 is the BF auxiliary space, sites
/// `1..=n` follow.
pub fn chain_spec(n: usize) -> SpaceSpec {
    SpaceSpec::power(Signature::bf(), n + 1)
}

/// Local operators on the BF site space.
pub fn sigma_z() -> GradedMatrix {
    diag2(C64::new(1.0, 0.0), C64::new(-1.0, 0.0))
}

pub fn number_op() -> GradedMatrix {
    diag2(C64::new(0.0, 0.0), C64::new(1.0, 0.0))
}

pub fn hole_op() -> GradedMatrix {
    diag2(C64::new(1.0, 0.0), C64::new(0.0, 0.0))
}

pub fn annihilator() -> GradedMatrix {
    let spec = SpaceSpec::single(Signature::bf());
    let mut m = GradedMatrix::zeros(spec.clone(), spec);
    m.set(0, 1, GrassmannNumber::one());
    m
}

pub fn creator() -> GradedMatrix {
    let spec = SpaceSpec::single(Signature::bf());
    let mut m = GradedMatrix::zeros(spec.clone(), spec);
    m.set(1, 0, GrassmannNumber::one());
    m
}

fn diag2(a: C64, b: C64) -> GradedMatrix {
    let spec = SpaceSpec::single(Signature::bf());
    let mut m = GradedMatrix::zeros(spec.clone(), spec);
    m.set(0, 0, GrassmannNumber::from_complex(a));
    m.set(1, 1, GrassmannNumber::from_complex(b));
    m
}

/// The graded six-vertex R-matrix on BF ⊗ BF (BFFB-graded composite basis):
///
/// ```text
///            ⎛ sin(u+2η)                            ⎞
///   1        ⎜           sin(u)    sin(2η)          ⎟
/// ───────  · ⎜           sin(2η)   sin(u)           ⎟
/// sin(2η)    ⎝                             −sin(u+2η)⎠
/// ```
pub fn r_matrix(u: C64, eta: C64) -> Result<GradedMatrix, ModelError> {
    let s2 = csin(2.0 * eta);
    if s2.norm() < 1e-12 {
        return Err(ModelError::SingularAnisotropy(eta));
    }
    let spec = SpaceSpec::power(Signature::bf(), 2);
    let mut m = GradedMatrix::zeros(spec.clone(), spec);
    let a = csin(u + 2.0 * eta) / s2;
    let b = csin(u) / s2;
    let one = C64::new(1.0, 0.0);
    m.set(0, 0, GrassmannNumber::from_complex(a));
    m.set(1, 1, GrassmannNumber::from_complex(b));
    m.set(1, 2, GrassmannNumber::from_complex(one));
    m.set(2, 1, GrassmannNumber::from_complex(one));
    m.set(2, 2, GrassmannNumber::from_complex(b));
    m.set(3, 3, GrassmannNumber::from_complex(-a));
    Ok(m)
}

/// Lax operator `L_j(u) = R_{0j}(u)` embedded into `spec` with the auxiliary
/// space at factor `aux` and the site at factor `site`.
pub fn lax_embedded(u: C64, eta: C64, spec: &SpaceSpec, aux: usize, site: usize) -> GradedMatrix {
    let r = r_matrix(u, eta).expect("lax at singular anisotropy");
    GradedMatrix::embed_two(&r, spec, aux, site).expect("lax embedding")
}

/// Monodromy `T(u) = L_N(u) ··· L_1(u)` with auxiliary factor `aux` and the
/// chain sites at factors `sites` (given in ascending site order).
pub fn monodromy_with_aux(u: C64, eta: C64, spec: &SpaceSpec, aux: usize, sites: &[usize]) -> GradedMatrix {
    let mut t = lax_embedded(u, eta, spec, aux, *sites.last().expect("at least one site"));
    for &site in sites.iter().rev().skip(1) {
        t = t.matmul(&lax_embedded(u, eta, spec, aux, site));
    }
    t
}

/// PBC monodromy on the standard chain space (factor 0 auxiliary).
pub fn monodromy_pbc(params: &ModelParams, u: C64) -> GradedMatrix {
    let n = params.sites;
    let spec = chain_spec(n);
    let sites: Vec<usize> = (1..=n).collect();
    monodromy_with_aux(u, params.eta(), &spec, 0, &sites)
}

/// PBC super transfer matrix `τ(u) = str₀ T(u)` acting on the quantum space.
pub fn transfer_pbc(params: &ModelParams, u: C64) -> GradedMatrix {
    monodromy_pbc(params, u).partial_super_trace(0).expect("supertrace over auxiliary space")
}

/// Product of `σᶻ` over all sites of the quantum space.
pub fn sigma_z_product(n: usize) -> GradedMatrix {
    let spec = quantum_spec(n);
    let sz = sigma_z();
    let mut out = GradedMatrix::identity(&spec);
    for j in 0..n {
        out = out.matmul(&GradedMatrix::embed_one(&sz, &spec, j).expect("sigma_z embedding"));
    }
    out
}

/// Total particle number `Σ_j n̂_j`.
pub fn total_number(n: usize) -> GradedMatrix {
    let spec = quantum_spec(n);
    let nop = number_op();
    let mut out = GradedMatrix::zeros(spec.clone(), spec.clone());
    for j in 0..n {
        out = out.add(&GradedMatrix::embed_one(&nop, &spec, j).expect("number embedding"));
    }
    out
}

/// PBC Hamiltonian assembled from the density
/// `H_{j,j+1} = −t(c†_{j+1}c_j + c†_j c_{j+1}) + V(n̂_{j+1}n̂_j + n̄_{j+1}n̄_j)`
/// with `t = 1`, `V = −cos(2η)`, and the wrap-around bond `H_{N,1}`.
pub fn hamiltonian_pbc(params: &ModelParams) -> GradedMatrix {
    let n = params.sites;
    let spec = quantum_spec(n);
    let v = -(2.0 * params.eta()).cos();
    let cd: Vec<GradedMatrix> =
        (0..n).map(|j| GradedMatrix::embed_one(&creator(), &spec, j).unwrap()).collect();
    let cc: Vec<GradedMatrix> =
        (0..n).map(|j| GradedMatrix::embed_one(&annihilator(), &spec, j).unwrap()).collect();
    let nop: Vec<GradedMatrix> =
        (0..n).map(|j| GradedMatrix::embed_one(&number_op(), &spec, j).unwrap()).collect();
    let hop: Vec<GradedMatrix> =
        (0..n).map(|j| GradedMatrix::embed_one(&hole_op(), &spec, j).unwrap()).collect();
    let mut h = GradedMatrix::zeros(spec.clone(), spec.clone());
    for j in 0..n {
        let k = (j + 1) % n;
        h = h.add(&bond_density(&cd[k], &cc[j], &cd[j], &cc[k], &nop[j], &nop[k], &hop[j], &hop[k], v));
    }
    h
}

/// One bond of the Hamiltonian density between sites `j` and `k = j+1`.
#[allow(clippy::too_many_arguments)]
pub fn bond_density(
    cd_k: &GradedMatrix,
    cc_j: &GradedMatrix,
    cd_j: &GradedMatrix,
    cc_k: &GradedMatrix,
    n_j: &GradedMatrix,
    n_k: &GradedMatrix,
    nb_j: &GradedMatrix,
    nb_k: &GradedMatrix,
    v: C64,
) -> GradedMatrix {
    let hopping = cd_k.matmul(cc_j).add(&cd_j.matmul(cc_k)).scale(C64::new(-1.0, 0.0));
    let density = n_k.matmul(n_j).add(&nb_k.matmul(nb_j)).scale(v);
    hopping.add(&density)
}

/// Operator-valued PBC super quantum determinant from its defining
/// supertrace `str₁₂{P⁻₁₂ T₁(u) T₂(u+2η)}`.
pub fn sqd_pbc(params: &ModelParams, u: C64) -> GradedMatrix {
    let n = params.sites;
    let eta = params.eta();
    // Factors: aux1, aux2, q1..qN.
    let spec = SpaceSpec::power(Signature::bf(), n + 2);
    let sites: Vec<usize> = (2..n + 2).collect();
    let t1 = monodromy_with_aux(u, eta, &spec, 0, &sites);
    let t2 = monodromy_with_aux(u + 2.0 * eta, eta, &spec, 1, &sites);
    let p_minus = projector_minus(eta);
    let p12 = GradedMatrix::embed_two(&p_minus, &spec, 0, 1).expect("P- embedding");
    p12.matmul(&t1)
        .matmul(&t2)
        .partial_super_trace(1)
        .expect("trace aux2")
        .partial_super_trace(0)
        .expect("trace aux1")
}

/// Closed form `δ(u) = −ζᴺ(u+2η) ∏_i (−σᶻ_{q_i})`.
pub fn sqd_pbc_closed(params: &ModelParams, u: C64) -> GradedMatrix {
    let n = params.sites;
    let eta = params.eta();
    let z = zeta_kernel(u + 2.0 * eta, eta).powu(n as u32);
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    sigma_z_product(n).scale(-z * sign)
}

/// `δ̂(u) = δ{T̂(u)} = −ζ(u)⁻ᴺ ∏_i (−σᶻ_{q_i})` from its defining supertrace
/// `str₁₂{P⁻₁₂ T̂₂(u) T̂₁(u+2η)}`.
pub fn sqd_hat_pbc(params: &ModelParams, u: C64) -> GradedMatrix {
    let n = params.sites;
    let eta = params.eta();
    let spec = SpaceSpec::power(Signature::bf(), n + 2);
    let sites: Vec<usize> = (2..n + 2).collect();
    let t1_hat = t_hat_with_aux(u + 2.0 * eta, eta, &spec, 0, &sites);
    let t2_hat = t_hat_with_aux(u, eta, &spec, 1, &sites);
    let p_minus = projector_minus(eta);
    let p12 = GradedMatrix::embed_two(&p_minus, &spec, 0, 1).expect("P- embedding");
    p12.matmul(&t2_hat)
        .matmul(&t1_hat)
        .partial_super_trace(1)
        .expect("trace aux2")
        .partial_super_trace(0)
        .expect("trace aux1")
}

pub fn sqd_hat_pbc_closed(params: &ModelParams, u: C64) -> GradedMatrix {
    let n = params.sites;
    let eta = params.eta();
    let z = zeta_kernel(u, eta).powu(n as u32);
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    sigma_z_product(n).scale(-sign / z)
}

/// Inverse monodromy `T̂(u) = T⁻¹(−u) = ζ(u)⁻ᴺ R_{01}(u) R_{02}(u) ··· R_{0N}(u)`
/// built through the unitarity product form.
pub fn t_hat_with_aux(u: C64, eta: C64, spec: &SpaceSpec, aux: usize, sites: &[usize]) -> GradedMatrix {
    let mut t = lax_embedded(u, eta, spec, aux, sites[0]);
    for &site in &sites[1..] {
        t = t.matmul(&lax_embedded(u, eta, spec, aux, site));
    }
    let z = zeta_kernel(u, eta).powu(sites.len() as u32);
    t.scale(C64::new(1.0, 0.0) / z)
}

/// Rank-one antisymmetric projector `P⁻ = −R(−2η)/2`.
pub fn projector_minus(eta: C64) -> GradedMatrix {
    r_matrix(-2.0 * eta, eta).expect("P- at singular anisotropy").scale(C64::new(-0.5, 0.0))
}

/// Predicted leading `z^N` coefficient of the transfer-matrix eigenvalue in
/// the `M`-particle sector.
pub fn asymptotics_pbc(params: &ModelParams, m: usize) -> Result<(i64, C64), ModelError> {
    let n = params.sites;
    if m > n {
        return Err(ModelError::BadParams(format!("particle number {m} exceeds {n} sites")));
    }
    let eta = params.eta();
    let i = C64::new(0.0, 1.0);
    let q = (i * eta).exp(); // e^{iη}
    let base = q / ((2.0 * i * eta).exp() - (-2.0 * i * eta).exp());
    let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
    let coeff = base.powu(n as u32)
        * ((i * (n as f64) * eta).exp() * (-2.0 * i * (m as f64) * eta).exp()
            - sign * (-i * (n as f64) * eta).exp() * (2.0 * i * (m as f64) * eta).exp());
    Ok((n as i64, coeff))
}

/// Central difference with one Richardson step, entry-wise on matrices.
pub fn matrix_derivative(f: impl Fn(C64) -> GradedMatrix, at: C64, h: f64) -> GradedMatrix {
    let hh = C64::new(h, 0.0);
    let d = |step: C64| {
        f(at + step)
            .sub(&f(at - step))
            .scale(C64::new(1.0, 0.0) / (2.0 * step))
    };
    let d1 = d(hh);
    let d2 = d(hh / 2.0);
    // (4 D(h/2) − D(h)) / 3 cancels the O(h²) error.
    d2.scale(C64::new(4.0 / 3.0, 0.0)).sub(&d1.scale(C64::new(1.0 / 3.0, 0.0)))
}

fn random_u(rng: &mut StdRng) -> C64 {
    C64::new(rng.gen_range(-1.5..1.5), rng.gen_range(-0.5..0.5))
}

/// Verifies the full battery of R-matrix properties at anisotropy `eta`.
pub fn check_r_properties(eta: C64, n_samples: usize, seed: u64, tol: f64) -> VerificationReport {
    let mut report = VerificationReport::new("rmatrix", seed);
    let mut rng = StdRng::seed_from_u64(seed);
    let spec2 = SpaceSpec::power(Signature::bf(), 2);
    let spec3 = SpaceSpec::power(Signature::bf(), 3);
    let p = graded_swap(&Signature::bf());
    let id2 = GradedMatrix::identity(&spec2);
    let pi = C64::new(std::f64::consts::PI, 0.0);

    let r = |u: C64| r_matrix(u, eta).expect("R at singular eta");

    // Regularity: R(0) = 𝒫.
    let reg = r(C64::new(0.0, 0.0)).sub(&p).max_abs();
    report.record("regularity R(0) = P", "R(0) equals the graded permutation", 1, reg, tol);

    let mut ybe_res: f64 = 0.0;
    let mut psym_res: f64 = 0.0;
    let mut tsym_res: f64 = 0.0;
    let mut unit_res: f64 = 0.0;
    let mut cross_res: f64 = 0.0;
    let mut period_res: f64 = 0.0;
    for _ in 0..n_samples {
        let u = random_u(&mut rng);
        let v = random_u(&mut rng);

        // Yang-Baxter on three graded factors.
        let r12 = GradedMatrix::embed_two(&r(u - v), &spec3, 0, 1).unwrap();
        let r13 = GradedMatrix::embed_two(&r(u), &spec3, 0, 2).unwrap();
        let r23 = GradedMatrix::embed_two(&r(v), &spec3, 1, 2).unwrap();
        let lhs = r12.matmul(&r13).matmul(&r23);
        let rhs = r23.matmul(&r13).matmul(&r12);
        ybe_res = ybe_res.max(lhs.sub(&rhs).max_abs());

        // P-symmetry: 𝒫 R 𝒫 = R.
        let r21 = p.matmul(&r(u)).matmul(&p);
        psym_res = psym_res.max(r21.sub(&r(u)).max_abs());

        // T-symmetry: R^{st₁st₂} = R^{ist₁ist₂} = R₂₁.
        let st = r(u)
            .partial_super_transpose(0, false)
            .unwrap()
            .partial_super_transpose(1, false)
            .unwrap();
        let ist = r(u)
            .partial_super_transpose(0, true)
            .unwrap()
            .partial_super_transpose(1, true)
            .unwrap();
        tsym_res = tsym_res.max(st.sub(&r21).max_abs()).max(ist.sub(&r21).max_abs());

        // Unitarity: R₁₂(u) R₂₁(−u) = ζ(u) 𝟙.
        let r21_minus = p.matmul(&r(-u)).matmul(&p);
        let unit = r(u).matmul(&r21_minus).sub(&id2.scale(zeta_kernel(u, eta)));
        unit_res = unit_res.max(unit.max_abs());

        // Crossing: R₂₁^{st₂}(−u−4η) R₂₁^{st₁}(u) = ζ(u+2η) 𝟙.
        let lhs_cross = p
            .matmul(&r(-u - 4.0 * eta))
            .matmul(&p)
            .partial_super_transpose(1, false)
            .unwrap()
            .matmul(&p.matmul(&r(u)).matmul(&p).partial_super_transpose(0, false).unwrap());
        let cross = lhs_cross.sub(&id2.scale(zeta_kernel(u + 2.0 * eta, eta)));
        cross_res = cross_res.max(cross.max_abs());

        // Periodicity: R(u+π) = −σᶻ₂ R(u) σᶻ₂ = −σᶻ₁ R(u) σᶻ₁.
        let sz1 = GradedMatrix::embed_one(&sigma_z(), &spec2, 0).unwrap();
        let sz2 = GradedMatrix::embed_one(&sigma_z(), &spec2, 1).unwrap();
        let shifted = r(u + pi);
        let c2 = sz2.matmul(&r(u)).matmul(&sz2).scale(C64::new(-1.0, 0.0));
        let c1 = sz1.matmul(&r(u)).matmul(&sz1).scale(C64::new(-1.0, 0.0));
        period_res = period_res.max(shifted.sub(&c2).max_abs()).max(shifted.sub(&c1).max_abs());
    }
    report.record("Yang-Baxter equation", "R12(u-v) R13(u) R23(v) = R23(v) R13(u) R12(u-v)", n_samples, ybe_res, tol);
    report.record("P-symmetry", "R21(u) = P R12(u) P = R12(u)", n_samples, psym_res, tol);
    report.record("T-symmetry", "R^{st1 st2} = R^{ist1 ist2} = R21", n_samples, tsym_res, tol);
    report.record("unitarity", "R12(u) R21(-u) = zeta(u)", n_samples, unit_res, tol);
    report.record("crossing", "R21^{st2}(-u-4eta) R21^{st1}(u) = zeta(u+2eta)", n_samples, cross_res, tol);
    report.record("periodicity", "R(u+pi) = -sigma^z_2 R(u) sigma^z_2", n_samples, period_res, tol);
    report
}

/// Verifies `H^PBC = −sin(2η) d/du ln τ(u)|₀` against the density-built
/// Hamiltonian.
pub fn check_h_log_derivative(params: &ModelParams, tol: f64) -> VerificationReport {
    let mut report = VerificationReport::new("hamiltonian-pbc", 0);
    let eta = params.eta();
    let tau0 = transfer_pbc(params, C64::new(0.0, 0.0));
    let tau0_inv = tau0.inverse_scalar().expect("tau(0) invertible");
    let dtau = matrix_derivative(|u| transfer_pbc(params, u), C64::new(0.0, 0.0), 1e-6);
    let h_log = tau0_inv.matmul(&dtau).scale(-csin(2.0 * eta));
    let h_direct = hamiltonian_pbc(params);
    let res = h_log.sub(&h_direct).max_abs();
    report.record(
        &format!("log-derivative Hamiltonian at N={}", params.sites),
        "H = -sin(2eta) tau(0)^{-1} tau'(0)",
        1,
        res,
        tol,
    );
    report
}

pub use crate::model::{g_kernel as g, zeta_kernel as zeta};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::eta_p;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn r_at_zero_is_graded_permutation() {
        let eta = c(0.3, 0.1);
        let r0 = r_matrix(c(0.0, 0.0), eta).unwrap();
        assert!(r0.approx_eq(&graded_swap(&Signature::bf()), 1e-15));
    }

    #[test]
    fn r_property_battery_generic_and_root_of_unity() {
        for eta in [c(0.3, 0.1), c(0.37, 0.0), eta_p(2), eta_p(1)] {
            let report = check_r_properties(eta, 100, 7, 1e-12);
            assert!(report.passed, "R battery failed at eta = {eta}:\n{}", report.render_lines());
        }
    }

    #[test]
    fn crossing_at_zero_reduces_to_zeta_identity() {
        // At u = 0 the crossing relation becomes R21^{st2}(-4η) R21^{st1}(0) = ζ(2η)·1.
        let eta = c(0.3, 0.1);
        let p = graded_swap(&Signature::bf());
        let r = |u: C64| r_matrix(u, eta).unwrap();
        let lhs = p
            .matmul(&r(-4.0 * eta))
            .matmul(&p)
            .partial_super_transpose(1, false)
            .unwrap()
            .matmul(&p.matmul(&r(c(0.0, 0.0))).matmul(&p).partial_super_transpose(0, false).unwrap());
        let id = GradedMatrix::identity(&SpaceSpec::power(Signature::bf(), 2));
        assert!(lhs.approx_eq(&id.scale(zeta_kernel(2.0 * eta, eta)), 1e-12));
    }

    #[test]
    fn lax_at_zero_permutes_aux_and_site() {
        let eta = c(0.23, 0.05);
        let spec = chain_spec(2);
        let l1 = lax_embedded(c(0.0, 0.0), eta, &spec, 0, 1);
        // Conjugating an embedded site operator with L(0) moves it to the
        // auxiliary slot.
        let n1 = GradedMatrix::embed_one(&number_op(), &spec, 1).unwrap();
        let n0 = GradedMatrix::embed_one(&number_op(), &spec, 0).unwrap();
        let moved = l1.matmul(&n1).matmul(&l1);
        assert!(moved.approx_eq(&n0, 1e-13));
    }

    #[test]
    fn monodromy_satisfies_yang_baxter_algebra() {
        let eta = c(0.3, 0.1);
        let n = 2;
        // Factors: aux1, aux2, q1, q2.
        let spec = SpaceSpec::power(Signature::bf(), n + 2);
        let sites: Vec<usize> = (2..n + 2).collect();
        let mut rng = StdRng::seed_from_u64(21);
        for _ in 0..5 {
            let u = random_u(&mut rng);
            let v = random_u(&mut rng);
            let t1 = monodromy_with_aux(u, eta, &spec, 0, &sites);
            let t2 = monodromy_with_aux(v, eta, &spec, 1, &sites);
            let r12 = GradedMatrix::embed_two(&r_matrix(u - v, eta).unwrap(), &spec, 0, 1).unwrap();
            let lhs = r12.matmul(&t1).matmul(&t2);
            let rhs = t2.matmul(&t1).matmul(&r12);
            assert!(lhs.sub(&rhs).max_abs() < 1e-12);
        }
    }

    #[test]
    fn single_site_monodromy_is_lax() {
        let eta = c(0.3, 0.1);
        let params = ModelParams::periodic(1, eta);
        let u = c(0.4, -0.2);
        let t = monodromy_pbc(&params, u);
        let l = lax_embedded(u, eta, &chain_spec(1), 0, 1);
        assert!(t.approx_eq(&l, 0.0));
    }

    #[test]
    fn transfer_matrices_commute() {
        let eta = c(0.3, 0.1);
        let params = ModelParams::periodic(4, eta);
        let mut rng = StdRng::seed_from_u64(22);
        let mut worst: f64 = 0.0;
        for _ in 0..10 {
            let u = random_u(&mut rng);
            let v = random_u(&mut rng);
            let tu = transfer_pbc(&params, u);
            let tv = transfer_pbc(&params, v);
            worst = worst.max(tu.commutator(&tv).max_abs());
        }
        assert!(worst < 1e-11, "commutator residual {worst:.3e}");
    }

    #[test]
    fn transfer_commutes_with_total_number() {
        let eta = c(0.3, 0.1);
        let params = ModelParams::periodic(3, eta);
        let tau = transfer_pbc(&params, c(0.7, 0.3));
        let num = total_number(3);
        assert!(tau.commutator(&num).max_abs() < 1e-12);
    }

    #[test]
    fn hamiltonian_matches_two_site_density_sum() {
        // For N=2 both bonds act between the same pair of sites:
        // H = −2(c†₁c₂ + c†₂c₁) + 2V(n̂₁n̂₂ + n̄₁n̄₂) on (|00⟩,|01⟩,|10⟩,|11⟩).
        let eta = c(0.3, 0.0);
        let v = -(2.0 * eta).cos();
        let params = ModelParams::periodic(2, eta);
        let h = hamiltonian_pbc(&params);
        let spec = quantum_spec(2);
        let mut expect = GradedMatrix::zeros(spec.clone(), spec);
        expect.set(0, 0, GrassmannNumber::from_complex(2.0 * v));
        expect.set(3, 3, GrassmannNumber::from_complex(2.0 * v));
        expect.set(1, 2, GrassmannNumber::from_re(-2.0));
        expect.set(2, 1, GrassmannNumber::from_re(-2.0));
        assert!(h.approx_eq(&expect, 1e-14));
    }

    #[test]
    fn log_derivative_identity() {
        for n in [2, 3] {
            let params = ModelParams::periodic(n, c(0.3, 0.1));
            let report = check_h_log_derivative(&params, 1e-7);
            assert!(report.passed, "{}", report.render_lines());
        }
    }

    #[test]
    fn free_fermion_point_has_zero_interaction() {
        let eta = eta_p(1); // π/4
        assert!((2.0 * eta).cos().norm() < 1e-15);
    }

    #[test]
    fn sqd_matches_closed_form() {
        let eta = c(0.3, 0.1);
        let mut rng = StdRng::seed_from_u64(23);
        for n in [1, 2, 3] {
            let params = ModelParams::periodic(n, eta);
            for _ in 0..3 {
                let u = random_u(&mut rng);
                let lhs = sqd_pbc(&params, u);
                let rhs = sqd_pbc_closed(&params, u);
                assert!(lhs.approx_eq(&rhs, 1e-12), "SQD mismatch at N={n}");
                let lhs_hat = sqd_hat_pbc(&params, u);
                let rhs_hat = sqd_hat_pbc_closed(&params, u);
                assert!(lhs_hat.approx_eq(&rhs_hat, 1e-11), "hat SQD mismatch at N={n}");
            }
        }
    }

    #[test]
    fn sqd_n1_is_zeta_sigma_z() {
        let eta = c(0.3, 0.1);
        let params = ModelParams::periodic(1, eta);
        let u = c(0.4, 0.1);
        let expect = sigma_z().scale(zeta_kernel(u + 2.0 * eta, eta));
        assert!(sqd_pbc(&params, u).approx_eq(&expect, 1e-12));
    }

    #[test]
    fn sqd_with_sigma_product_commutes_with_monodromy() {
        let eta = c(0.3, 0.1);
        let n = 2;
        let params = ModelParams::periodic(n, eta);
        let u = c(0.35, -0.15);
        let w = c(-0.6, 0.2);
        let spec = chain_spec(n);
        // σᶻ on the extra auxiliary space times δ(u) on the quantum space.
        let sz_aux = GradedMatrix::embed_one(&sigma_z(), &spec, 0).unwrap();
        let delta = sqd_pbc(&params, u);
        let id_aux = GradedMatrix::identity(&SpaceSpec::single(Signature::bf()));
        let delta_full = id_aux.super_tensor(&delta);
        let op = sz_aux.matmul(&delta_full);
        let t = monodromy_pbc(&params, w);
        assert!(op.commutator(&t).max_abs() < 1e-12);
    }

    #[test]
    fn sqd_times_hat_sqd_is_scalar() {
        let eta = c(0.3, 0.1);
        let n = 2;
        let params = ModelParams::periodic(n, eta);
        let u = c(0.45, 0.2);
        let prod = sqd_pbc(&params, u).matmul(&sqd_hat_pbc(&params, u));
        let ratio = zeta_kernel(u + 2.0 * eta, eta).powu(n as u32) / zeta_kernel(u, eta).powu(n as u32);
        let expect = GradedMatrix::identity(&quantum_spec(n)).scale(ratio);
        assert!(prod.approx_eq(&expect, 1e-11));
    }

    #[test]
    fn asymptotics_sector_sign_structure() {
        let params = ModelParams::periodic(3, c(0.3, 0.1));
        for m in 0..=3usize {
            let (deg, c_m) = asymptotics_pbc(&params, m).unwrap();
            assert_eq!(deg, 3);
            // Swapping M ↔ N−M relates the two bracket terms up to the sign (−1)^M.
            let (_, c_swap) = asymptotics_pbc(&params, 3 - m).unwrap();
            assert!(c_m.norm() > 1e-12 || c_swap.norm() > 1e-12);
        }
        assert!(asymptotics_pbc(&params, 4).is_err());
    }
}
