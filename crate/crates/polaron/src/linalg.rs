//! Thin wrappers around the dense complex LAPACK routines used by the
//! spectrum and Bethe modules, plus a companion-matrix polynomial root
//! finder. Centralized here so the backend can be swapped in one place.

use ndarray::{Array1, Array2};
use ndarray_linalg::{Eig, Inverse, Solve};
use num_complex::Complex64 as C64;

/// Eigenvalues and right eigenvectors (columns) of a general complex matrix.
pub fn eig(m: &Array2<C64>) -> Option<(Array1<C64>, Array2<C64>)> {
    m.eig().ok()
}

pub fn invert(m: &Array2<C64>) -> Option<Array2<C64>> {
    m.inv().ok()
}

pub fn solve(a: &Array2<C64>, b: &Array1<C64>) -> Option<Array1<C64>> {
    a.solve(b).ok()
}

/// Least-squares solution of an overdetermined system via normal equations.
/// The systems solved here are tiny and well-conditioned (DFT-style nodes),
/// so the squared condition number is not a concern.
pub fn lstsq(a: &Array2<C64>, b: &Array1<C64>) -> Option<Array1<C64>> {
    let ah = conj_transpose(a);
    let ata = ah.dot(a);
    let atb = ah.dot(b);
    ata.solve(&atb).ok()
}

pub fn conj_transpose(a: &Array2<C64>) -> Array2<C64> {
    Array2::from_shape_fn((a.ncols(), a.nrows()), |(i, j)| a[(j, i)].conj())
}

/// Roots of `c₀ + c₁ x + … + c_d x^d` via the companion matrix. Leading
/// zero coefficients are trimmed first.
pub fn poly_roots(coeffs: &[C64]) -> Vec<C64> {
    let scale: f64 = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Vec::new();
    }
    let mut d = coeffs.len() - 1;
    while d > 0 && coeffs[d].norm() < 1e-14 * scale {
        d -= 1;
    }
    if d == 0 {
        return Vec::new();
    }
    let lead = coeffs[d];
    let mut comp = Array2::zeros((d, d));
    for i in 1..d {
        comp[(i, i - 1)] = C64::new(1.0, 0.0);
    }
    for i in 0..d {
        comp[(i, d - 1)] = -coeffs[i] / lead;
    }
    match eig(&comp) {
        Some((vals, _)) => vals.to_vec(),
        None => Vec::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn eig_of_sigma_z() {
        let m = array![
            [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
            [C64::new(0.0, 0.0), C64::new(-1.0, 0.0)]
        ];
        let (vals, _) = eig(&m).unwrap();
        let mut v: Vec<f64> = vals.iter().map(|c| c.re).collect();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((v[0] + 1.0).abs() < 1e-12 && (v[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn roots_of_quadratic() {
        // (x-2)(x+3) = x² + x - 6
        let roots = poly_roots(&[C64::new(-6.0, 0.0), C64::new(1.0, 0.0), C64::new(1.0, 0.0)]);
        let mut re: Vec<f64> = roots.iter().map(|c| c.re).collect();
        re.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((re[0] + 3.0).abs() < 1e-10 && (re[1] - 2.0).abs() < 1e-10);
    }
}
