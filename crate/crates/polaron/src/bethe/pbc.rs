//! TQ-equation and Bethe-root machinery for periodic boundary conditions.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::grassmann::C64;
use crate::model::csin;
use crate::trigpoly::TrigPoly;

use super::newton::newton_solve;
use super::BetheError;

/// A converged Bethe state.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BetheState {
    pub kind: String,
    #[serde(rename = "N")]
    pub sites: usize,
    #[serde(rename = "M")]
    pub particles: usize,
    pub eta: [f64; 2],
    pub psi: Option<[[f64; 2]; 2]>,
    pub roots: Vec<[f64; 2]>,
    pub residual: f64,
}

impl BetheState {
    pub fn roots_c(&self) -> Vec<C64> {
        self.roots.iter().map(|r| C64::new(r[0], r[1])).collect()
    }

    pub fn eta_c(&self) -> C64 {
        C64::new(self.eta[0], self.eta[1])
    }
}

/// `Q(u) = ∏_ℓ sin(u − λ_ℓ)`.
pub fn q_function(u: C64, roots: &[C64]) -> C64 {
    roots.iter().map(|&l| csin(u - l)).product()
}

/// Transfer-matrix eigenvalue from the two-term TQ form
/// `Λ(u) = a(u) Q(u−2η)/Q(u) − (−1)^M d(u) Q(u+2η)/Q(u)`.
pub fn lambda_tq_pbc(u: C64, state: &BetheState) -> Result<C64, BetheError> {
    let eta = state.eta_c();
    let roots = state.roots_c();
    let q0 = q_function(u, &roots);
    if q0.norm() < 1e-12 {
        return Err(BetheError::QZero);
    }
    let n = state.sites as u32;
    let s2 = csin(2.0 * eta);
    let a = (csin(u + 2.0 * eta) / s2).powu(n);
    let d = (csin(u) / s2).powu(n);
    let sign = if state.particles % 2 == 0 { 1.0 } else { -1.0 };
    Ok(a * q_function(u - 2.0 * eta, &roots) / q0 - sign * d * q_function(u + 2.0 * eta, &roots) / q0)
}

/// Multiplicative Bethe residual (branch-free):
/// `|sinᴺ(λ_j+2η) ∏ sin(λ_ℓ−λ_j+2η) − sinᴺ(λ_j) ∏ sin(λ_j−λ_ℓ+2η)|`
/// normalized by the magnitude of the larger side.
pub fn bethe_residual_pbc(roots: &[C64], sites: usize, eta: C64) -> f64 {
    let mut worst: f64 = 0.0;
    for (j, &lj) in roots.iter().enumerate() {
        let mut lhs = csin(lj + 2.0 * eta).powu(sites as u32);
        let mut rhs = csin(lj).powu(sites as u32);
        for (l, &ll) in roots.iter().enumerate() {
            if l == j {
                continue;
            }
            lhs *= csin(ll - lj + 2.0 * eta);
            rhs *= csin(lj - ll + 2.0 * eta);
        }
        let scale = lhs.norm().max(rhs.norm()).max(1e-30);
        worst = worst.max((lhs - rhs).norm() / scale);
    }
    worst
}

/// Canonical representative of a root modulo π, in the strip
/// `Re ∈ (−π/2, π/2]`.
pub fn canonical_root(l: C64) -> C64 {
    let pi = std::f64::consts::PI;
    let mut re = l.re;
    while re > pi / 2.0 + 1e-12 {
        re -= pi;
    }
    while re <= -pi / 2.0 - 1e-12 {
        re += pi;
    }
    C64::new(re, l.im)
}

fn canonical_set(roots: &[C64]) -> Vec<C64> {
    let mut v: Vec<C64> = roots.iter().map(|&l| canonical_root(l)).collect();
    v.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
    v
}

pub fn same_root_set(a: &[C64], b: &[C64], tol: f64) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let ca = canonical_set(a);
    let cb = canonical_set(b);
    // Greedy matching after canonical sorting; roots are pairwise distinct.
    let mut used = vec![false; cb.len()];
    'outer: for x in &ca {
        for (k, y) in cb.iter().enumerate() {
            if !used[k] && (x - y).norm() < tol {
                used[k] = true;
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// Admissibility: pairwise distinct roots away from the kernel poles.
fn admissible(roots: &[C64], eta: C64) -> bool {
    for (i, &a) in roots.iter().enumerate() {
        if csin(a).norm() < 1e-7 || csin(a + 2.0 * eta).norm() < 1e-7 {
            return false;
        }
        for &b in roots.iter().skip(i + 1) {
            if (canonical_root(a) - canonical_root(b)).norm() < 1e-7 {
                return false;
            }
        }
    }
    true
}

/// Newton solving of the logarithmic Bethe equations over a window of
/// branch integers, keeping distinct admissible solutions.
pub fn solve_bethe_pbc(
    sites: usize,
    particles: usize,
    eta: C64,
    seeds: &[Vec<C64>],
) -> Result<Vec<BetheState>, BetheError> {
    if particles > sites {
        return Err(BetheError::BadSector { m: particles, n: sites });
    }
    if particles == 0 {
        return Ok(vec![BetheState {
            kind: "pbc".into(),
            sites,
            particles,
            eta: [eta.re, eta.im],
            psi: None,
            roots: vec![],
            residual: 0.0,
        }]);
    }
    let m = particles;
    let window: i64 = 2;
    let mut found: Vec<BetheState> = Vec::new();

    let f_with_branch = |branch: &[i64]| {
        let branch = branch.to_vec();
        move |x: &[C64]| -> Vec<C64> {
            let mut out = Vec::with_capacity(x.len());
            for (j, &lj) in x.iter().enumerate() {
                let mut v = (csin(lj + 2.0 * eta) / csin(lj)).ln() * (sites as f64);
                for (l, &ll) in x.iter().enumerate() {
                    if l == j {
                        continue;
                    }
                    v -= (csin(lj - ll + 2.0 * eta) / csin(ll - lj + 2.0 * eta)).ln();
                }
                v -= C64::new(0.0, 2.0 * std::f64::consts::PI * branch[j] as f64);
                out.push(v);
            }
            out
        }
    };
    let jac = move |x: &[C64]| -> Array2<C64> {
        let cot = |z: C64| z.cos() / z.sin();
        let mut j = Array2::zeros((x.len(), x.len()));
        for (a, &la) in x.iter().enumerate() {
            let mut diag = (cot(la + 2.0 * eta) - cot(la)) * (sites as f64);
            for (b, &lb) in x.iter().enumerate() {
                if a == b {
                    continue;
                }
                diag -= cot(la - lb + 2.0 * eta) + cot(lb - la + 2.0 * eta);
                j[(a, b)] = cot(la - lb + 2.0 * eta) + cot(lb - la + 2.0 * eta);
            }
            j[(a, a)] = diag;
        }
        j
    };

    let mut branch = vec![-window; m];
    loop {
        for seed in seeds {
            if seed.len() != m {
                continue;
            }
            let f = f_with_branch(&branch);
            if let Some(out) = newton_solve(&f, &jac, seed, 60, 1e-12) {
                let roots: Vec<C64> = out.roots.iter().map(|&l| canonical_root(l)).collect();
                if !admissible(&roots, eta) {
                    continue;
                }
                let res = bethe_residual_pbc(&roots, sites, eta);
                if res > 1e-11 {
                    continue;
                }
                if found.iter().any(|s| same_root_set(&s.roots_c(), &roots, 1e-7)) {
                    continue;
                }
                found.push(BetheState {
                    kind: "pbc".into(),
                    sites,
                    particles,
                    eta: [eta.re, eta.im],
                    psi: None,
                    roots: roots.iter().map(|l| [l.re, l.im]).collect(),
                    residual: res,
                });
            }
        }
        // Advance the branch multi-index.
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

/// Determines the Q-polynomial coefficients from an eigenvalue function by
/// requiring the TQ combination to be an entire Laurent polynomial, then
/// reads the Bethe roots off the zeros of Q.
///
/// The TQ combination `Λ(u)Q(u) − a(u)Q(u−2η) + (−1)^M d(u)Q(u+2η)` is a
/// Laurent polynomial identity; its coefficients are linear in the `M+1`
/// coefficients of `Q`, with the leading one pinned to the product form.
pub fn tq_linear_solve_pbc(
    lambda: &TrigPoly,
    sites: usize,
    particles: usize,
    eta: C64,
) -> Result<Vec<C64>, BetheError> {
    let m = particles as i64;
    if particles == 0 {
        return Ok(vec![]);
    }
    let n = sites as u32;
    let s2 = csin(2.0 * eta);
    // a(u), d(u) as Laurent polynomials of degree N.
    let mut a = TrigPoly::constant(crate::grassmann::GrassmannNumber::one());
    let mut d = a.clone();
    for _ in 0..n {
        a = a.mul(&TrigPoly::sin_shift(2.0 * eta).scale(C64::new(1.0, 0.0) / s2));
        d = d.mul(&TrigPoly::sin_shift(C64::new(0.0, 0.0)).scale(C64::new(1.0, 0.0) / s2));
    }
    let sign = if particles % 2 == 0 { 1.0 } else { -1.0 };

    // Basis monomials z^{2k−M}, k = 0..M; the identity row space spans
    // degrees −(N+M)..(N+M).
    let rows = (2 * (sites as i64 + m) + 1) as usize;
    let mut mat = Array2::<C64>::zeros((rows, particles as usize));
    let mut rhs = ndarray::Array1::<C64>::zeros(rows);
    let i = C64::new(0.0, 1.0);
    for k in 0..=particles {
        let exp = 2 * k as i64 - m;
        let basis = TrigPoly::monomial(exp, crate::grassmann::GrassmannNumber::one());
        // Λ·z^e − a·e^{−i e 2η} z^e + (−1)^M d·e^{+i e 2η} z^e
        let shift_m = (-i * 2.0 * eta * (exp as f64)).exp();
        let shift_p = (i * 2.0 * eta * (exp as f64)).exp();
        let combo = lambda
            .mul(&basis)
            .sub(&a.mul(&basis).scale(shift_m))
            .add(&d.mul(&basis).scale(sign * shift_p));
        for (row, deg) in (-(sites as i64 + m)..=(sites as i64 + m)).enumerate() {
            let v = combo.coeff(deg).body();
            if k == particles {
                rhs[row] = -v; // pinned c_M = 1
            } else {
                mat[(row, k)] = v;
            }
        }
    }
    let sol = crate::linalg::lstsq(&mat, &rhs).ok_or(BetheError::RankDeficient)?;
    // Residual of the linear system.
    let mut worst: f64 = 0.0;
    for r in 0..rows {
        let mut acc = rhs[r];
        for k in 0..particles {
            acc -= mat[(r, k)] * sol[k];
        }
        worst = worst.max(acc.norm());
    }
    if worst > 1e-7 {
        return Err(BetheError::RankDeficient);
    }
    // Q in w = z²: coefficients c_0..c_M with c_M = 1; roots w_ℓ = e^{2iλ_ℓ}.
    let mut coeffs: Vec<C64> = sol.to_vec();
    coeffs.push(C64::new(1.0, 0.0));
    let roots_w = crate::linalg::poly_roots(&coeffs);
    let lam: Vec<C64> = roots_w
        .iter()
        .map(|&w| canonical_root(w.ln() / (2.0 * i)))
        .collect();
    Ok(lam)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bulk::transfer_pbc;
    use crate::model::ModelParams;
    use crate::spectrum::eigenfunction_extract;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn vacuum_eigenvalue_two_term_form() {
        let eta = c(0.3, 0.1);
        let state = BetheState {
            kind: "pbc".into(),
            sites: 3,
            particles: 0,
            eta: [eta.re, eta.im],
            psi: None,
            roots: vec![],
            residual: 0.0,
        };
        let u = c(0.47, 0.13);
        let s2 = (2.0 * eta).sin();
        let expect = ((u + 2.0 * eta).sin() / s2).powu(3) - (u.sin() / s2).powu(3);
        assert!((lambda_tq_pbc(u, &state).unwrap() - expect).norm() < 1e-13);
    }

    #[test]
    fn n2_m1_analytic_root() {
        // N=2, M=1: sin(λ+2η) = ±sin λ gives λ = π/2 − η among solutions.
        let eta = c(0.3, 0.1);
        let seeds: Vec<Vec<C64>> = vec![vec![c(0.7, 0.0)], vec![c(1.2, -0.1)], vec![c(-0.4, 0.2)]];
        let states = solve_bethe_pbc(2, 1, eta, &seeds).unwrap();
        let target = canonical_root(C64::new(std::f64::consts::FRAC_PI_2, 0.0) - eta);
        assert!(
            states.iter().any(|s| (canonical_root(s.roots_c()[0]) - target).norm() < 1e-9),
            "π/2 − η not among roots: {:?}",
            states.iter().map(|s| s.roots_c()).collect::<Vec<_>>()
        );
        // Both one-particle states exist.
        assert!(states.len() >= 2);
    }

    #[test]
    fn n2_m1_matches_exact_diagonalization() {
        let eta = c(0.3, 0.1);
        let params = ModelParams::periodic(2, eta);
        let state = BetheState {
            kind: "pbc".into(),
            sites: 2,
            particles: 1,
            eta: [eta.re, eta.im],
            psi: None,
            roots: vec![{
                let l = canonical_root(C64::new(std::f64::consts::FRAC_PI_2, 0.0) - eta);
                [l.re, l.im]
            }],
            residual: 0.0,
        };
        let (polys, _) = eigenfunction_extract(
            |u| transfer_pbc(&params, u),
            2,
            eta,
            &[],
            3,
            1e-9,
        )
        .unwrap();
        let u = c(0.39, 0.21);
        let lam = lambda_tq_pbc(u, &state).unwrap();
        let best = polys
            .iter()
            .map(|p| (p.eval(u).body() - lam).norm())
            .fold(f64::INFINITY, f64::min);
        assert!(best < 1e-9, "TQ eigenvalue not in ED spectrum (best {best:.3e})");
    }

    #[test]
    fn linear_solve_agrees_with_newton() {
        let eta = c(0.3, 0.1);
        let params = ModelParams::periodic(2, eta);
        let (polys, v) = eigenfunction_extract(
            |u| transfer_pbc(&params, u),
            2,
            eta,
            &[],
            5,
            1e-9,
        )
        .unwrap();
        // M per column from the total number operator.
        let num = crate::bulk::total_number(2).body_matrix();
        let v_inv = crate::linalg::invert(&v).unwrap();
        let labels = v_inv.dot(&num).dot(&v);
        for (k, poly) in polys.iter().enumerate() {
            let m = labels[(k, k)].re.round() as usize;
            if m != 1 {
                continue;
            }
            let roots = tq_linear_solve_pbc(poly, 2, 1, eta).unwrap();
            assert_eq!(roots.len(), 1);
            assert!(bethe_residual_pbc(&roots, 2, eta) < 1e-8);
            let seeds = vec![roots.clone()];
            let states = solve_bethe_pbc(2, 1, eta, &seeds).unwrap();
            assert!(states.iter().any(|s| same_root_set(&s.roots_c(), &roots, 1e-8)));
        }
    }
}
