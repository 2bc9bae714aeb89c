//! Laurent polynomials in `z = e^{iu}` with Grassmann coefficients: the
//! exact representation of transfer-matrix eigenvalue functions and
//! Q-functions, with interpolation from sampled values.

use num_complex::Complex64;
use thiserror::Error;

use crate::grassmann::{C64, GrassmannNumber};

#[derive(Debug, Error)]
pub enum TrigPolyError {
    #[error("interpolation system is ill-conditioned or underdetermined")]
    IllConditioned,
    #[error("held-out residual {residual:.3e} exceeds tolerance {tol:.3e}: degree too small")]
    DegreeTooSmall { residual: f64, tol: f64 },
    #[error("zero polynomial has no leading coefficient")]
    ZeroPoly,
}

/// `p(u) = Σ_{k=-d}^{d} c_k e^{iku}`.
#[derive(Clone, Debug)]
pub struct TrigPoly {
    degree: i64,
    /// Coefficient of `z^k` stored at index `k + degree`.
    coeffs: Vec<GrassmannNumber>,
}

impl TrigPoly {
    pub fn zero(degree: i64) -> Self {
        assert!(degree >= 0);
        TrigPoly { degree, coeffs: vec![GrassmannNumber::zero(); (2 * degree + 1) as usize] }
    }

    pub fn constant(c: GrassmannNumber) -> Self {
        TrigPoly { degree: 0, coeffs: vec![c] }
    }

    pub fn from_coeffs(degree: i64, coeffs: Vec<GrassmannNumber>) -> Self {
        assert_eq!(coeffs.len(), (2 * degree + 1) as usize);
        TrigPoly { degree, coeffs }
    }

    /// Monomial `c·z^k`.
    pub fn monomial(k: i64, c: GrassmannNumber) -> Self {
        let d = k.abs();
        let mut p = Self::zero(d);
        p.set(k, c);
        p
    }

    /// `sin(u + a)` as the degree-1 Laurent polynomial
    /// `(e^{ia} z − e^{-ia} z^{-1}) / 2i`.
    pub fn sin_shift(a: C64) -> Self {
        Self::sin_multi(1, a)
    }

    /// `sin(k·u + a)` as a degree-k Laurent polynomial.
    pub fn sin_multi(k: i64, a: C64) -> Self {
        assert!(k >= 1);
        let i = C64::new(0.0, 1.0);
        let half = 1.0 / (2.0 * i);
        let mut p = Self::zero(k);
        p.set(k, GrassmannNumber::from_complex((i * a).exp() * half));
        p.set(-k, GrassmannNumber::from_complex(-(-i * a).exp() * half));
        p
    }

    pub fn degree_bound(&self) -> i64 {
        self.degree
    }

    pub fn coeff(&self, k: i64) -> GrassmannNumber {
        if k.abs() > self.degree {
            GrassmannNumber::zero()
        } else {
            self.coeffs[(k + self.degree) as usize].clone()
        }
    }

    pub fn set(&mut self, k: i64, c: GrassmannNumber) {
        assert!(k.abs() <= self.degree);
        self.coeffs[(k + self.degree) as usize] = c;
    }

    pub fn eval(&self, u: C64) -> GrassmannNumber {
        let z = (C64::new(0.0, 1.0) * u).exp();
        let zinv = C64::new(1.0, 0.0) / z;
        // Horner in both directions from k = 0.
        let mut out = self.coeff(0);
        let mut zp = C64::new(1.0, 0.0);
        let mut zm = C64::new(1.0, 0.0);
        for k in 1..=self.degree {
            zp *= z;
            zm *= zinv;
            out += self.coeff(k).scale(zp);
            out += self.coeff(-k).scale(zm);
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let d = self.degree.max(other.degree);
        let mut out = Self::zero(d);
        for k in -d..=d {
            out.set(k, self.coeff(k) + other.coeff(k));
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, c: C64) -> Self {
        TrigPoly { degree: self.degree, coeffs: self.coeffs.iter().map(|x| x.scale(c)).collect() }
    }

    pub fn scale_grassmann(&self, g: &GrassmannNumber) -> Self {
        TrigPoly { degree: self.degree, coeffs: self.coeffs.iter().map(|x| g.mul(x)).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let d = self.degree + other.degree;
        let mut out = Self::zero(d);
        for ka in -self.degree..=self.degree {
            let ca = self.coeff(ka);
            if ca.is_exactly_zero() {
                continue;
            }
            for kb in -other.degree..=other.degree {
                let cb = other.coeff(kb);
                if cb.is_exactly_zero() {
                    continue;
                }
                let k = ka + kb;
                out.set(k, out.coeff(k) + ca.mul(&cb));
            }
        }
        out
    }

    /// Substitution `u → u + a`, i.e. `c_k → c_k e^{ika}`.
    pub fn shift(&self, a: C64) -> Self {
        let i = C64::new(0.0, 1.0);
        let mut out = Self::zero(self.degree);
        for k in -self.degree..=self.degree {
            out.set(k, self.coeff(k).scale((i * a * (k as f64)).exp()));
        }
        out
    }

    /// Substitution `u → −u`, i.e. `c_k → c_{−k}`.
    pub fn reflect(&self) -> Self {
        let mut out = Self::zero(self.degree);
        for k in -self.degree..=self.degree {
            out.set(k, self.coeff(-k));
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.max_abs()).fold(0.0, f64::max)
    }

    /// Drops leading/trailing coefficients below `tol`.
    pub fn trim(&self, tol: f64) -> Self {
        let mut d = self.degree;
        while d > 0 && self.coeff(d).max_abs() <= tol && self.coeff(-d).max_abs() <= tol {
            d -= 1;
        }
        let mut out = Self::zero(d);
        for k in -d..=d {
            out.set(k, self.coeff(k));
        }
        out
    }

    /// Highest degree with a coefficient above `tol` and that coefficient.
    pub fn leading(&self, tol: f64) -> Result<(i64, GrassmannNumber), TrigPolyError> {
        for k in (-self.degree..=self.degree).rev() {
            if self.coeff(k).max_abs() > tol {
                return Ok((k, self.coeff(k)));
            }
        }
        Err(TrigPolyError::ZeroPoly)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.sub(other).max_abs() <= tol
    }
}

/// Equally spaced interpolation nodes on the real `u` axis (DFT nodes in z),
/// shifted by `offset`.
pub fn dft_nodes(count: usize, offset: f64) -> Vec<C64> {
    (0..count)
        .map(|s| C64::new(offset + 2.0 * std::f64::consts::PI * (s as f64) / (count as f64), 0.0))
        .collect()
}

/// Nodes avoiding the poles `sin(2u + 2kη) = 0` for `k ∈ ks` by at least
/// `radius` (in `|sin|` magnitude), nudging the grid offset if needed.
pub fn pole_avoiding_nodes(count: usize, eta: C64, ks: &[i64], radius: f64) -> Vec<C64> {
    let mut offset = 0.137;
    'outer: for _ in 0..64 {
        let nodes = dft_nodes(count, offset);
        for &u in &nodes {
            for &k in ks {
                let s = (2.0 * u + 2.0 * eta * (k as f64)).sin();
                if s.norm() < radius {
                    offset += 0.071;
                    continue 'outer;
                }
            }
        }
        return nodes;
    }
    dft_nodes(count, offset)
}

/// Unique Laurent polynomial of degree ≤ `d` through the samples
/// (needs ≥ 2d+1 samples at distinct z; extra samples are fitted in the
/// least-squares sense and act as held-out validation).
pub fn interpolate(samples: &[(C64, GrassmannNumber)], d: i64, holdout_tol: f64) -> Result<TrigPoly, TrigPolyError> {
    let m = 2 * d + 1;
    if (samples.len() as i64) < m {
        return Err(TrigPolyError::IllConditioned);
    }
    let n_nodes = samples.len();
    // Vandermonde in z over exponents −d..d.
    let mut v = ndarray::Array2::<Complex64>::zeros((n_nodes, m as usize));
    for (s, (u, _)) in samples.iter().enumerate() {
        let z = (C64::new(0.0, 1.0) * u).exp();
        for k in -d..=d {
            v[(s, (k + d) as usize)] = z.powi(k as i32);
        }
    }
    // Solve per Grassmann monomial component.
    let mut coeffs = vec![GrassmannNumber::zero(); m as usize];
    for mask in 0..16u8 {
        let rhs = ndarray::Array1::from_iter(samples.iter().map(|(_, g)| g.coeff(mask)));
        if rhs.iter().all(|c| c.norm() == 0.0) {
            continue;
        }
        let sol = if n_nodes == m as usize {
            crate::linalg::solve(&v, &rhs).ok_or(TrigPolyError::IllConditioned)?
        } else {
            crate::linalg::lstsq(&v, &rhs).ok_or(TrigPolyError::IllConditioned)?
        };
        for (idx, c) in sol.iter().enumerate() {
            coeffs[idx] += GrassmannNumber::monomial(mask, *c);
        }
    }
    let poly = TrigPoly::from_coeffs(d, coeffs);
    // Held-out / residual validation on the provided samples.
    let mut worst: f64 = 0.0;
    for (u, g) in samples {
        worst = worst.max((poly.eval(*u) - g.clone()).max_abs());
    }
    if worst > holdout_tol {
        return Err(TrigPolyError::DegreeTooSmall { residual: worst, tol: holdout_tol });
    }
    Ok(poly)
}

/// Samples a function on pole-avoiding nodes and interpolates it, validating
/// on an extra offset grid.
pub fn interpolate_fn(
    f: impl Fn(C64) -> GrassmannNumber,
    d: i64,
    eta: C64,
    pole_ks: &[i64],
    holdout_tol: f64,
) -> Result<TrigPoly, TrigPolyError> {
    let count = (2 * d + 1) as usize;
    let nodes = pole_avoiding_nodes(count, eta, pole_ks, 1e-3);
    let samples: Vec<(C64, GrassmannNumber)> = nodes.iter().map(|&u| (u, f(u))).collect();
    let poly = interpolate(&samples, d, holdout_tol)?;
    // Independent held-out nodes.
    let check_nodes = pole_avoiding_nodes(count + 3, eta, pole_ks, 1e-3);
    let mut worst: f64 = 0.0;
    for u in check_nodes {
        worst = worst.max((poly.eval(u) - f(u)).max_abs());
    }
    if worst > holdout_tol {
        return Err(TrigPolyError::DegreeTooSmall { residual: worst, tol: holdout_tol });
    }
    Ok(poly)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn eval_monomial_at_zero() {
        let p = TrigPoly::monomial(1, GrassmannNumber::one());
        assert!(p.eval(c(0.0, 0.0)).approx_eq(&GrassmannNumber::one(), 1e-15));
    }

    #[test]
    fn sin_at_half_pi() {
        let p = TrigPoly::sin_shift(c(0.0, 0.0));
        let v = p.eval(c(std::f64::consts::FRAC_PI_2, 0.0));
        assert!(v.approx_eq(&GrassmannNumber::one(), 1e-14));
    }

    #[test]
    fn eval_matches_trig_oracle() {
        let eta = c(0.3, 0.1);
        let p = TrigPoly::sin_shift(2.0 * eta).scale(C64::new(1.0, 0.0) / (2.0 * eta).sin());
        let mut rng = StdRng::seed_from_u64(31);
        for _ in 0..20 {
            let u = c(rng.gen_range(-2.0..2.0), rng.gen_range(-0.5..0.5));
            let direct = (u + 2.0 * eta).sin() / (2.0 * eta).sin();
            assert!((p.eval(u).body() - direct).norm() < 1e-12);
        }
    }

    #[test]
    fn interpolate_constant() {
        let samples: Vec<_> = dft_nodes(3, 0.0)
            .into_iter()
            .map(|u| (u, GrassmannNumber::from_re(4.2)))
            .collect();
        let p = interpolate(&samples, 0, 1e-10).unwrap();
        assert_eq!(p.degree_bound(), 0);
        assert!(p.coeff(0).approx_eq(&GrassmannNumber::from_re(4.2), 1e-12));
    }

    #[test]
    fn interpolate_sine() {
        let samples: Vec<_> = dft_nodes(3, 0.1)
            .into_iter()
            .map(|u| (u, GrassmannNumber::from_complex(u.sin())))
            .collect();
        let p = interpolate(&samples, 1, 1e-10).unwrap();
        let half_i = c(0.0, -0.5); // 1/(2i)
        assert!((p.coeff(1).body() - half_i).norm() < 1e-12);
        assert!((p.coeff(-1).body() + half_i).norm() < 1e-12);
    }

    #[test]
    fn degree_too_small_detected() {
        let samples: Vec<_> = dft_nodes(9, 0.05)
            .into_iter()
            .map(|u| (u, GrassmannNumber::from_complex((3.0 * u).sin())))
            .collect();
        match interpolate(&samples, 1, 1e-9) {
            Err(TrigPolyError::DegreeTooSmall { .. }) => {}
            other => panic!("expected DegreeTooSmall, got {other:?}"),
        }
    }

    #[test]
    fn round_trip_degree_six() {
        let mut rng = StdRng::seed_from_u64(32);
        let mut p = TrigPoly::zero(6);
        for k in -6i64..=6 {
            let g = GrassmannNumber::from_complex(c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                + GrassmannNumber::monomial(0b1001, c(rng.gen_range(-1.0..1.0), 0.0));
            p.set(k, g);
        }
        let samples: Vec<_> = dft_nodes(13, 0.0).into_iter().map(|u| (u, p.eval(u))).collect();
        let q = interpolate(&samples, 6, 1e-9).unwrap();
        for k in -6i64..=6 {
            assert!(p.coeff(k).approx_eq(&q.coeff(k), 1e-10), "coefficient {k} differs");
        }
    }

    #[test]
    fn leading_coefficient() {
        let mut p = TrigPoly::zero(2);
        p.set(2, GrassmannNumber::one());
        p.set(0, GrassmannNumber::from_re(3.0));
        let (deg, lead) = p.leading(1e-12).unwrap();
        assert_eq!(deg, 2);
        assert!(lead.approx_eq(&GrassmannNumber::one(), 0.0));
        assert!(matches!(TrigPoly::zero(1).leading(1e-12), Err(TrigPolyError::ZeroPoly)));
    }

    #[test]
    fn shift_then_eval() {
        let p = TrigPoly::sin_shift(c(0.4, 0.0));
        let sh = p.shift(c(0.25, 0.0));
        let u = c(0.7, 0.2);
        assert!((sh.eval(u).body() - (u + 0.25 + 0.4).sin()).norm() < 1e-13);
    }

    proptest! {
        #[test]
        fn ring_laws_pointwise(re1 in -1.0f64..1.0, im1 in -0.3f64..0.3,
                               re2 in -1.0f64..1.0, a in -1.0f64..1.0, b in -1.0f64..1.0) {
            let p = TrigPoly::sin_shift(c(a, 0.0));
            let q = TrigPoly::sin_shift(c(b, 0.0)).scale(c(re2, 0.0));
            let u = c(re1, im1);
            let sum = p.add(&q).eval(u).body();
            prop_assert!((sum - (p.eval(u).body() + q.eval(u).body())).norm() < 1e-12);
            let prod = p.mul(&q).eval(u).body();
            prop_assert!((prod - p.eval(u).body() * q.eval(u).body()).norm() < 1e-12);
        }
    }
}
