//! TQ-equation and Bethe machinery for diagonal open boundaries.

use ndarray::Array2;

use crate::grassmann::C64;
use crate::model::{csin, ModelParams};
use crate::trigpoly::TrigPoly;

use super::newton::newton_solve;
use super::pbc::BetheState;
use super::BetheError;

/// Diagonal entries of the boundary matrices as scalar functions.
pub struct KEntries {
    pub eta: C64,
    pub psi_minus: C64,
    pub psi_plus: C64,
    pub omega_minus: C64,
    pub omega_plus: C64,
}

impl KEntries {
    pub fn from_params(params: &ModelParams) -> Self {
        let b = params.open_params().expect("open boundary");
        KEntries {
            eta: params.eta(),
            psi_minus: b.psi_minus(),
            psi_plus: b.psi_plus(),
            omega_minus: params.omega_minus().unwrap(),
            omega_plus: params.omega_plus().unwrap(),
        }
    }

    pub fn k_alpha_minus(&self, u: C64) -> C64 {
        self.omega_minus * csin(self.psi_minus + u)
    }

    pub fn k_delta_minus(&self, u: C64) -> C64 {
        self.omega_minus * csin(self.psi_minus - u)
    }

    pub fn k_alpha_plus(&self, u: C64) -> C64 {
        self.omega_plus * csin(u + 2.0 * self.eta + self.psi_plus)
    }

    pub fn k_delta_plus(&self, u: C64) -> C64 {
        self.omega_plus * csin(u + 2.0 * self.eta - self.psi_plus)
    }
}

/// `q̃(u) = ∏_ℓ sin(u+2η+ν_ℓ) sin(u−ν_ℓ)`.
pub fn q_tilde(u: C64, roots: &[C64], eta: C64) -> C64 {
    roots.iter().map(|&v| csin(u + 2.0 * eta + v) * csin(u - v)).product()
}

/// Transfer-matrix eigenvalue for diagonal boundaries from the Bethe roots.
pub fn lambda_tq_obc_diag(u: C64, state: &BetheState, params: &ModelParams) -> Result<C64, BetheError> {
    let eta = params.eta();
    let k = KEntries::from_params(params);
    let roots = state.roots_c();
    let n = state.sites as u32;
    let s = |m: f64, x: C64| csin(x + m * eta);
    let s2u = csin(2.0 * u + 2.0 * eta);
    if s2u.norm() < 1e-12 {
        return Err(BetheError::QZero);
    }
    let s2eta = csin(2.0 * eta);

    let mut prod_a = C64::new(1.0, 0.0);
    let mut prod_d = C64::new(1.0, 0.0);
    for &v in &roots {
        prod_a *= s(0.0, u + v) * s(2.0, v - u) / (s(0.0, v - u) * s(2.0, u + v));
        prod_d *= s(4.0, u + v) * s(2.0, u - v) / (s(0.0, u - v) * s(2.0, u + v));
    }
    let front_a = k.k_alpha_minus(u) * (k.k_alpha_plus(u) - s2eta / s2u * k.k_delta_plus(u));
    let front_d = k.k_delta_plus(u) * (k.k_delta_minus(u) - s2eta / s2u * k.k_alpha_minus(u));
    let ratio_a = (s(2.0, u) / s(2.0, -u)).powu(n);
    let ratio_d = (s(0.0, u) * s(0.0, u) / (s(2.0, u) * s(2.0, -u))).powu(n);
    Ok(front_a * ratio_a * prod_a - front_d * ratio_d * prod_d)
}

/// Multiplicative residual of the doubled Bethe equations.
pub fn bethe_residual_obc(roots: &[C64], params: &ModelParams) -> f64 {
    let eta = params.eta();
    let b = params.open_params().expect("open boundary");
    let (pp, pm) = (b.psi_plus(), b.psi_minus());
    let s = |m: f64, x: C64| csin(x + m * eta);
    let n = params.sites as u32;
    let mut worst: f64 = 0.0;
    for (j, &vj) in roots.iter().enumerate() {
        let mut lhs = (s(2.0, vj)).powu(2 * n) * s(0.0, vj + pp) * s(0.0, vj + pm);
        let mut rhs = (s(0.0, vj)).powu(2 * n) * s(2.0, vj - pp) * s(2.0, vj - pm);
        for (l, &vl) in roots.iter().enumerate() {
            if l == j {
                continue;
            }
            lhs *= s(0.0, vj + vl) * s(-2.0, vj - vl);
            rhs *= s(4.0, vj + vl) * s(2.0, vj - vl);
        }
        let scale = lhs.norm().max(rhs.norm()).max(1e-30);
        worst = worst.max((lhs - rhs).norm() / scale);
    }
    worst
}

/// Canonical root: modulo π and modulo the reflection `ν ↔ −ν−2η` that
/// leaves `q̃` invariant.
pub fn canonical_root_obc(v: C64, eta: C64) -> C64 {
    let a = super::pbc::canonical_root(v);
    let b = super::pbc::canonical_root(-v - 2.0 * eta);
    if (a.re, a.im) <= (b.re, b.im) {
        a
    } else {
        b
    }
}

fn admissible_obc(roots: &[C64], eta: C64) -> bool {
    for (i, &a) in roots.iter().enumerate() {
        if csin(a).norm() < 1e-7 || csin(a + 2.0 * eta).norm() < 1e-7 {
            return false;
        }
        // Self-conjugate roots give a degenerate q̃.
        if (canonical_root_obc(a, eta) - super::pbc::canonical_root(-a - 2.0 * eta)).norm() < 1e-7
            && (super::pbc::canonical_root(a) - super::pbc::canonical_root(-a - 2.0 * eta)).norm() < 1e-7
        {
            return false;
        }
        for &b in roots.iter().skip(i + 1) {
            if (canonical_root_obc(a, eta) - canonical_root_obc(b, eta)).norm() < 1e-7 {
                return false;
            }
        }
    }
    true
}

pub fn same_root_set_obc(a: &[C64], b: &[C64], eta: C64, tol: f64) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut ca: Vec<C64> = a.iter().map(|&x| canonical_root_obc(x, eta)).collect();
    let mut cb: Vec<C64> = b.iter().map(|&x| canonical_root_obc(x, eta)).collect();
    ca.sort_by(|x, y| (x.re, x.im).partial_cmp(&(y.re, y.im)).unwrap());
    cb.sort_by(|x, y| (x.re, x.im).partial_cmp(&(y.re, y.im)).unwrap());
    ca.iter().zip(cb.iter()).all(|(x, y)| (x - y).norm() < tol)
}

/// Newton solving of the doubled (open-chain) Bethe equations.
pub fn solve_bethe_obc_diag(params: &ModelParams, particles: usize, seeds: &[Vec<C64>]) -> Result<Vec<BetheState>, BetheError> {
    let sites = params.sites;
    if particles > sites {
        return Err(BetheError::BadSector { m: particles, n: sites });
    }
    let eta = params.eta();
    let b = params.open_params().expect("open boundary");
    let psi = [[b.psi_minus().re, b.psi_minus().im], [b.psi_plus().re, b.psi_plus().im]];
    let make_state = |roots: &[C64], residual: f64| BetheState {
        kind: "obc-diagonal".into(),
        sites,
        particles,
        eta: [eta.re, eta.im],
        psi: Some(psi),
        roots: roots.iter().map(|l| [l.re, l.im]).collect(),
        residual,
    };
    if particles == 0 {
        return Ok(vec![make_state(&[], 0.0)]);
    }
    let m = particles;
    let (pp, pm) = (b.psi_plus(), b.psi_minus());
    let s = move |k: f64, x: C64| csin(x + k * eta);
    let window: i64 = 2;
    let mut found: Vec<BetheState> = Vec::new();

    let f_with_branch = |branch: &[i64]| {
        let branch = branch.to_vec();
        move |x: &[C64]| -> Vec<C64> {
            let mut out = Vec::with_capacity(x.len());
            for (j, &vj) in x.iter().enumerate() {
                let mut val = (s(2.0, vj) / s(0.0, vj)).ln() * (2.0 * sites as f64);
                val -= (s(2.0, vj - pp) * s(2.0, vj - pm) / (s(0.0, vj + pp) * s(0.0, vj + pm))).ln();
                for (l, &vl) in x.iter().enumerate() {
                    if l == j {
                        continue;
                    }
                    val -= (s(4.0, vj + vl) * s(2.0, vj - vl) / (s(0.0, vj + vl) * s(-2.0, vj - vl))).ln();
                }
                val -= C64::new(0.0, 2.0 * std::f64::consts::PI * branch[j] as f64);
                out.push(val);
            }
            out
        }
    };
    let jac = move |x: &[C64]| -> Array2<C64> {
        let cot = |z: C64| z.cos() / z.sin();
        let mut jm = Array2::zeros((x.len(), x.len()));
        for (a, &va) in x.iter().enumerate() {
            let mut diag = (cot(va + 2.0 * eta) - cot(va)) * (2.0 * sites as f64);
            diag -= cot(va - pp + 2.0 * eta) + cot(va - pm + 2.0 * eta)
                - cot(va + pp)
                - cot(va + pm);
            for (bb, &vb) in x.iter().enumerate() {
                if a == bb {
                    continue;
                }
                diag -= cot(va + vb + 4.0 * eta) + cot(va - vb + 2.0 * eta)
                    - cot(va + vb)
                    - cot(va - vb - 2.0 * eta);
                jm[(a, bb)] = -(cot(va + vb + 4.0 * eta) - cot(va - vb + 2.0 * eta)
                    - cot(va + vb)
                    + cot(va - vb - 2.0 * eta));
            }
            jm[(a, a)] = diag;
        }
        jm
    };

    let mut branch = vec![-window; m];
    loop {
        for seed in seeds {
            if seed.len() != m {
                continue;
            }
            let f = f_with_branch(&branch);
            if let Some(out) = newton_solve(&f, &jac, seed, 60, 1e-12) {
                let roots: Vec<C64> =
                    out.roots.iter().map(|&v| canonical_root_obc(v, eta)).collect();
                if !admissible_obc(&roots, eta) {
                    continue;
                }
                let res = bethe_residual_obc(&roots, params);
                if res > 1e-11 {
                    continue;
                }
                if found.iter().any(|st| same_root_set_obc(&st.roots_c(), &roots, eta, 1e-7)) {
                    continue;
                }
                found.push(make_state(&roots, res));
            }
        }
        let mut k = 0;
        loop {
            if k == m {
                return Ok(found);
            }
            branch[k] += 1;
            if branch[k] <= window {
                break;
            }
            branch[k] = -window;
            k += 1;
        }
    }
}

/// Linear determination of `q̃` from the regularized eigenvalue function
/// `P_Λ(u) = ζᴺ(u)Λ(u)` (a Laurent polynomial of degree ≤ 2N+4): the
/// denominator-cleared TQ relation
/// `sin(2u+2η) sin²ᴺ(2η) P_Λ(u) q̃(u) = A(u) q̃(u−2η) − D(u) q̃(u+2η)`
/// is linear in the coefficients of `q̃`.
pub fn tq_linear_solve_obc(
    lambda_reg: &TrigPoly,
    params: &ModelParams,
    particles: usize,
) -> Result<Vec<C64>, BetheError> {
    let eta = params.eta();
    let k = KEntries::from_params(params);
    let sites = params.sites;
    if particles == 0 {
        return Ok(vec![]);
    }
    let m2 = 2 * particles as i64;
    let s2eta = csin(2.0 * eta);
    let one = crate::grassmann::GrassmannNumber::one;

    // Scalar prefactors as polynomials.
    let sin_2u_2eta = TrigPoly::sin_multi(2, 2.0 * eta);
    let k_am = TrigPoly::sin_shift(k.psi_minus).scale(k.omega_minus);
    // 𝔎⁻δ(u) = ω₋ sin(ψ₋ − u) = −ω₋ sin(u − ψ₋).
    let k_dm = TrigPoly::sin_shift(-k.psi_minus).scale(-k.omega_minus);
    let k_ap = TrigPoly::sin_shift(2.0 * eta + k.psi_plus).scale(k.omega_plus);
    let k_dp = TrigPoly::sin_shift(2.0 * eta - k.psi_plus).scale(k.omega_plus);
    let mut sin2n_u2 = TrigPoly::constant(one());
    let mut sin2n_u = TrigPoly::constant(one());
    for _ in 0..(2 * sites) {
        sin2n_u2 = sin2n_u2.mul(&TrigPoly::sin_shift(2.0 * eta));
        sin2n_u = sin2n_u.mul(&TrigPoly::sin_shift(C64::new(0.0, 0.0)));
    }
    let a_poly = k_am.mul(&sin_2u_2eta.mul(&k_ap).sub(&k_dp.scale(s2eta))).mul(&sin2n_u2);
    let d_poly = k_dp.mul(&sin_2u_2eta.mul(&k_dm).sub(&k_am.scale(s2eta))).mul(&sin2n_u);
    let lhs_factor = sin_2u_2eta.scale(s2eta.powu(2 * sites as u32));

    let deg_total = lhs_factor.degree_bound() + lambda_reg.degree_bound() + m2;
    let rows = (2 * deg_total + 1) as usize;
    let cols = 2 * particles;
    let mut mat = Array2::<C64>::zeros((rows, cols));
    let mut rhs = ndarray::Array1::<C64>::zeros(rows);
    let i = C64::new(0.0, 1.0);
    for kk in 0..=2 * particles {
        let exp = 2 * kk as i64 - m2;
        let basis = TrigPoly::monomial(exp, one());
        let shift_m = (-i * 2.0 * eta * (exp as f64)).exp();
        let shift_p = (i * 2.0 * eta * (exp as f64)).exp();
        let combo = lhs_factor
            .mul(lambda_reg)
            .mul(&basis)
            .sub(&a_poly.mul(&basis).scale(shift_m))
            .add(&d_poly.mul(&basis).scale(shift_p));
        for (row, deg) in (-deg_total..=deg_total).enumerate() {
            let v = combo.coeff(deg).body();
            if kk == 2 * particles {
                rhs[row] = -v;
            } else {
                mat[(row, kk)] = v;
            }
        }
    }
    let sol = crate::linalg::lstsq(&mat, &rhs).ok_or(BetheError::RankDeficient)?;
    let mut worst: f64 = 0.0;
    for r in 0..rows {
        let mut acc = rhs[r];
        for kk in 0..cols {
            acc -= mat[(r, kk)] * sol[kk];
        }
        worst = worst.max(acc.norm());
    }
    let scale = rhs.iter().map(|c| c.norm()).fold(1e-30, f64::max);
    if worst > 1e-6 * scale.max(1.0) {
        return Err(BetheError::RankDeficient);
    }
    // Roots of q̃ in w = z²: pairs {e^{2iν}, e^{−2i(ν+2η)}}.
    let mut coeffs: Vec<C64> = sol.to_vec();
    coeffs.push(C64::new(1.0, 0.0));
    let roots_w = crate::linalg::poly_roots(&coeffs);
    let mut cands: Vec<C64> = roots_w
        .iter()
        .map(|&w| canonical_root_obc(w.ln() / (2.0 * i), eta))
        .collect();
    cands.sort_by(|x, y| (x.re, x.im).partial_cmp(&(y.re, y.im)).unwrap());
    // Each Bethe root appears twice (once per factor of q̃).
    let mut roots: Vec<C64> = Vec::new();
    let mut used = vec![false; cands.len()];
    for a in 0..cands.len() {
        if used[a] {
            continue;
        }
        let mut members = vec![cands[a]];
        used[a] = true;
        for bb in (a + 1)..cands.len() {
            if !used[bb] && (cands[a] - cands[bb]).norm() < 1e-6 {
                used[bb] = true;
                members.push(cands[bb]);
            }
        }
        let centroid = members.iter().sum::<C64>() / members.len() as f64;
        roots.push(centroid);
    }
    if roots.len() != particles {
        return Err(BetheError::RankDeficient);
    }
    Ok(roots)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::transfer_obc;
    use crate::model::{zeta_kernel, BoundaryParams, ModelParams};
    use crate::spectrum::eigenfunction_extract;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn diag_params(n: usize) -> ModelParams {
        ModelParams::open(n, c(0.3, 0.1), BoundaryParams::diagonal(c(0.71, 0.23), c(1.13, -0.17)))
    }

    fn reg_transfer(params: &ModelParams, u: C64) -> crate::graded::GradedMatrix {
        let z = zeta_kernel(u, params.eta()).powu(params.sites as u32);
        transfer_obc(params, u).scale(z)
    }

    #[test]
    fn vacuum_matches_exact_diagonalization() {
        let params = diag_params(2);
        let eta = params.eta();
        let state = BetheState {
            kind: "obc-diagonal".into(),
            sites: 2,
            particles: 0,
            eta: [eta.re, eta.im],
            psi: None,
            roots: vec![],
            residual: 0.0,
        };
        let (polys, _) = eigenfunction_extract(
            |u| reg_transfer(&params, u),
            (2 * params.sites + 4) as i64,
            eta,
            &[0, 1, 2],
            13,
            1e-8,
        )
        .unwrap();
        for k in 0..4 {
            let u = c(0.31 + 0.11 * k as f64, 0.09);
            let lam = lambda_tq_obc_diag(u, &state, &params).unwrap();
            let reg = zeta_kernel(u, eta).powu(2);
            let best = polys
                .iter()
                .map(|p| (p.eval(u).body() / reg - lam).norm())
                .fold(f64::INFINITY, f64::min);
            assert!(best < 1e-7, "vacuum eigenvalue missing from ED (best {best:.3e})");
        }
    }

    #[test]
    fn crossing_symmetry_of_lambda() {
        let params = diag_params(2);
        let eta = params.eta();
        // Any Bethe state: use M=1 solved roots.
        let seeds: Vec<Vec<C64>> = (0..8)
            .map(|k| vec![c(0.3 + 0.25 * k as f64, 0.1 - 0.05 * k as f64)])
            .collect();
        let states = solve_bethe_obc_diag(&params, 1, &seeds).unwrap();
        assert!(!states.is_empty(), "no M=1 states found");
        let st = &states[0];
        for k in 0..5 {
            let u = c(0.27 + 0.17 * k as f64, 0.13);
            let lam_u = lambda_tq_obc_diag(u, st, &params).unwrap();
            let lam_c = lambda_tq_obc_diag(-u - 2.0 * eta, st, &params).unwrap();
            let zl = zeta_kernel(u, eta).powu(2);
            let zr = zeta_kernel(-u - 2.0 * eta, eta).powu(2);
            assert!((zl * lam_u - zr * lam_c).norm() < 1e-9 * (zl * lam_u).norm().max(1.0));
        }
    }

    #[test]
    fn one_particle_sector_recovered() {
        let params = diag_params(2);
        let eta = params.eta();
        let (polys, v) = eigenfunction_extract(
            |u| reg_transfer(&params, u),
            (2 * params.sites + 4) as i64,
            eta,
            &[0, 1, 2],
            17,
            1e-8,
        )
        .unwrap();
        let num = crate::bulk::total_number(2).body_matrix();
        let v_inv = crate::linalg::invert(&v).unwrap();
        let labels = v_inv.dot(&num).dot(&v);
        let seeds: Vec<Vec<C64>> = (0..10)
            .map(|k| vec![c(-1.2 + 0.27 * k as f64, 0.12 - 0.04 * k as f64)])
            .collect();
        let states = solve_bethe_obc_diag(&params, 1, &seeds).unwrap();
        let mut matched = 0;
        for (k, poly) in polys.iter().enumerate() {
            if labels[(k, k)].re.round() as usize != 1 {
                continue;
            }
            let u = c(0.41, 0.15);
            let reg = zeta_kernel(u, eta).powu(2);
            let target = poly.eval(u).body() / reg;
            let hit = states
                .iter()
                .any(|st| (lambda_tq_obc_diag(u, st, &params).unwrap() - target).norm() < 1e-8);
            if hit {
                matched += 1;
            }
            // Cross-method: linear solve from this eigenfunction.
            if let Ok(roots) = tq_linear_solve_obc(poly, &params, 1) {
                assert!(bethe_residual_obc(&roots, &params) < 1e-8);
                assert!(
                    states.iter().any(|st| same_root_set_obc(&st.roots_c(), &roots, eta, 1e-7)),
                    "linear-solve roots disagree with Newton"
                );
            }
        }
        assert_eq!(matched, 2, "both one-particle ED eigenvalues recovered");
    }
}
