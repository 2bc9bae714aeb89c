//! Arithmetic in the quotient Grassmann algebra generated by the four odd
//! boundary parameters α₋, β₋, α₊, β₊.
//!
//! The defining relations are the usual anticommutation of the generators
//! together with the quotient conditions α₋β₋ = 0 and α₊β₊ = 0. Of the 16
//! monomials of the free exterior algebra only 9 survive:
//!
//! ```text
//!   1;  α₋, β₋, α₊, β₊;  α₋α₊, α₋β₊, β₋α₊, β₋β₊
//! ```
//!
//! Monomials are encoded as 4-bit masks in the canonical generator order
//! (α₋, β₋, α₊, β₊) = bits (0, 1, 2, 3). All sign bookkeeping is relative
//! to this order.

use num_complex::Complex64;
use thiserror::Error;

/// Complex double shorthand used throughout the crate.
pub type C64 = Complex64;

/// Number of monomials in the free exterior algebra on 4 generators.
pub const DIM_FULL: usize = 16;

/// Monomial masks surviving the quotient, in increasing mask order.
pub const QUOTIENT_MASKS: [u8; 9] = [0b0000, 0b0001, 0b0010, 0b0100, 0b1000, 0b0101, 0b1001, 0b0110, 0b1010];

/// The four odd generators, in canonical order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Generator {
    AlphaMinus = 0,
    BetaMinus = 1,
    AlphaPlus = 2,
    BetaPlus = 3,
}

/// Z₂ parity. Addition is mod 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn from_usize(n: usize) -> Self {
        if n % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }

    pub fn as_u8(self) -> u8 {
        match self {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }
}

impl std::ops::Add for Parity {
    type Output = Parity;
    fn add(self, rhs: Parity) -> Parity {
        Parity::from_usize((self.as_u8() + rhs.as_u8()) as usize)
    }
}

#[derive(Debug, Error)]
pub enum GrassmannError {
    /// Inversion of an element whose complex part vanishes.
    #[error("body of Grassmann number vanishes (|body| = {0:.3e}), not invertible")]
    ZeroBody(f64),
    /// Parity query on an element with both even and odd content.
    #[error("mixed parity: even norm {even:.3e}, odd norm {odd:.3e}")]
    MixedParity { even: f64, odd: f64 },
}

/// `true` if `mask` is killed by the quotient ideal (contains α₋β₋ or α₊β₊).
#[inline]
pub const fn forbidden(mask: u8) -> bool {
    (mask & 0b0011) == 0b0011 || (mask & 0b1100) == 0b1100
}

/// Sign of reordering the concatenation of two canonical monomials into
/// canonical order. Zero when they share a generator.
const fn reorder_sign(a: u8, b: u8) -> i8 {
    if a & b != 0 {
        return 0;
    }
    // Count inversions: each generator j of b must move left past the
    // generators of a with index greater than j.
    let mut inversions = 0u32;
    let mut j = 0;
    while j < 4 {
        if b & (1 << j) != 0 {
            let higher = a >> (j + 1);
            inversions += higher.count_ones();
        }
        j += 1;
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

const SIGN_TABLE: [[i8; 16]; 16] = {
    let mut table = [[0i8; 16]; 16];
    let mut a = 0;
    while a < 16 {
        let mut b = 0;
        while b < 16 {
            table[a][b] = reorder_sign(a as u8, b as u8);
            b += 1;
        }
        a += 1;
    }
    table
};

/// Element of the 9-dimensional quotient Grassmann algebra (or, through the
/// `*_full` entry points, of the free 16-dimensional exterior algebra).
///
/// A plain complex number is stored without the 16-component array, so the
/// all-scalar matrices appearing in the bulk theory carry no Grassmann
/// overhead.
#[derive(Clone, Debug)]
pub struct GrassmannNumber {
    repr: Repr,
}

#[derive(Clone, Debug)]
enum Repr {
    Scalar(C64),
    Multi(Box<[C64; 16]>),
}

impl GrassmannNumber {
    pub fn zero() -> Self {
        GrassmannNumber { repr: Repr::Scalar(C64::new(0.0, 0.0)) }
    }

    pub fn one() -> Self {
        GrassmannNumber { repr: Repr::Scalar(C64::new(1.0, 0.0)) }
    }

    pub fn from_complex(c: C64) -> Self {
        GrassmannNumber { repr: Repr::Scalar(c) }
    }

    pub fn from_re(x: f64) -> Self {
        Self::from_complex(C64::new(x, 0.0))
    }

    pub fn generator(g: Generator) -> Self {
        Self::monomial(1 << (g as u8), C64::new(1.0, 0.0))
    }

    /// `c` times the canonical monomial with the given mask.
    pub fn monomial(mask: u8, c: C64) -> Self {
        assert!(mask < 16, "monomial mask out of range");
        if mask == 0 {
            return Self::from_complex(c);
        }
        let mut coeffs = [C64::new(0.0, 0.0); 16];
        coeffs[mask as usize] = c;
        GrassmannNumber { repr: Repr::Multi(Box::new(coeffs)) }
    }

    pub fn coeff(&self, mask: u8) -> C64 {
        match &self.repr {
            Repr::Scalar(c) => {
                if mask == 0 {
                    *c
                } else {
                    C64::new(0.0, 0.0)
                }
            }
            Repr::Multi(v) => v[mask as usize],
        }
    }

    /// The complex part (coefficient of the empty monomial).
    pub fn body(&self) -> C64 {
        self.coeff(0)
    }

    /// The nilpotent remainder: `a - body(a)`. Cubes to zero in the quotient.
    pub fn soul(&self) -> GrassmannNumber {
        match &self.repr {
            Repr::Scalar(_) => GrassmannNumber::zero(),
            Repr::Multi(v) => {
                let mut coeffs = **v;
                coeffs[0] = C64::new(0.0, 0.0);
                GrassmannNumber { repr: Repr::Multi(Box::new(coeffs)) }.compact()
            }
        }
    }

    /// `true` when stored as a bare complex number.
    pub fn is_scalar(&self) -> bool {
        matches!(self.repr, Repr::Scalar(_))
    }

    /// Exact structural zero test (used to skip work, not for comparisons).
    pub fn is_exactly_zero(&self) -> bool {
        match &self.repr {
            Repr::Scalar(c) => c.re == 0.0 && c.im == 0.0,
            Repr::Multi(v) => v.iter().all(|c| c.re == 0.0 && c.im == 0.0),
        }
    }

    /// Largest coefficient magnitude over all monomials.
    pub fn max_abs(&self) -> f64 {
        match &self.repr {
            Repr::Scalar(c) => c.norm(),
            Repr::Multi(v) => v.iter().map(|c| c.norm()).fold(0.0, f64::max),
        }
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.max_abs() <= tol
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        (self.clone() - other.clone()).is_zero(tol)
    }

    /// Drops the array representation when only the scalar part is populated.
    fn compact(self) -> Self {
        match &self.repr {
            Repr::Scalar(_) => self,
            Repr::Multi(v) => {
                if v[1..].iter().all(|c| c.re == 0.0 && c.im == 0.0) {
                    GrassmannNumber::from_complex(v[0])
                } else {
                    self
                }
            }
        }
    }

    /// Projects onto the quotient algebra (forbidden monomials dropped).
    pub fn reduce(&self) -> Self {
        match &self.repr {
            Repr::Scalar(_) => self.clone(),
            Repr::Multi(v) => {
                let mut coeffs = **v;
                for (mask, c) in coeffs.iter_mut().enumerate() {
                    if forbidden(mask as u8) {
                        *c = C64::new(0.0, 0.0);
                    }
                }
                GrassmannNumber { repr: Repr::Multi(Box::new(coeffs)) }.compact()
            }
        }
    }

    /// Product in the quotient algebra: reordering signs applied, monomials
    /// hit by the ideal dropped at multiplication time.
    pub fn mul(&self, other: &Self) -> Self {
        self.mul_impl(other, true)
    }

    /// Product in the free 16-dimensional exterior algebra (no quotient).
    pub fn mul_full(&self, other: &Self) -> Self {
        self.mul_impl(other, false)
    }

    fn mul_impl(&self, other: &Self, quotient: bool) -> Self {
        match (&self.repr, &other.repr) {
            (Repr::Scalar(a), Repr::Scalar(b)) => GrassmannNumber::from_complex(a * b),
            (Repr::Scalar(a), Repr::Multi(_)) => other.scale(*a),
            (Repr::Multi(_), Repr::Scalar(b)) => self.scale(*b),
            (Repr::Multi(a), Repr::Multi(b)) => {
                let mut out = [C64::new(0.0, 0.0); 16];
                for (ma, ca) in a.iter().enumerate() {
                    if ca.re == 0.0 && ca.im == 0.0 {
                        continue;
                    }
                    for (mb, cb) in b.iter().enumerate() {
                        if cb.re == 0.0 && cb.im == 0.0 {
                            continue;
                        }
                        let sign = SIGN_TABLE[ma][mb];
                        if sign == 0 {
                            continue;
                        }
                        let mask = (ma | mb) as u8;
                        if quotient && forbidden(mask) {
                            continue;
                        }
                        out[mask as usize] += ca * cb * (sign as f64);
                    }
                }
                GrassmannNumber { repr: Repr::Multi(Box::new(out)) }.compact()
            }
        }
    }

    pub fn scale(&self, c: C64) -> Self {
        match &self.repr {
            Repr::Scalar(a) => GrassmannNumber::from_complex(a * c),
            Repr::Multi(v) => {
                let mut coeffs = **v;
                for x in coeffs.iter_mut() {
                    *x *= c;
                }
                GrassmannNumber { repr: Repr::Multi(Box::new(coeffs)) }
            }
        }
    }

    /// Inverse via the terminating Neumann series
    /// `(b + s)⁻¹ = b⁻¹ (1 - s/b + (s/b)²)`; exact since soul³ = 0.
    pub fn invert(&self) -> Result<Self, GrassmannError> {
        let b = self.body();
        if b.norm() < 1e-300 {
            return Err(GrassmannError::ZeroBody(b.norm()));
        }
        let binv = C64::new(1.0, 0.0) / b;
        let n = self.soul().scale(-binv); // -s/b
        let n2 = n.mul(&n);
        let series = GrassmannNumber::one() + n + n2;
        Ok(series.scale(binv))
    }

    /// Parity of a homogeneous element.
    pub fn parity(&self) -> Result<Parity, GrassmannError> {
        self.parity_tol(1e-12)
    }

    pub fn parity_tol(&self, tol: f64) -> Result<Parity, GrassmannError> {
        let even = self.even_part().max_abs();
        let odd = self.odd_part().max_abs();
        match (even > tol, odd > tol) {
            (true, true) => Err(GrassmannError::MixedParity { even, odd }),
            (false, true) => Ok(Parity::Odd),
            // Zero counts as even.
            _ => Ok(Parity::Even),
        }
    }

    pub fn even_part(&self) -> Self {
        self.parity_project(Parity::Even)
    }

    pub fn odd_part(&self) -> Self {
        self.parity_project(Parity::Odd)
    }

    fn parity_project(&self, keep: Parity) -> Self {
        match &self.repr {
            Repr::Scalar(c) => {
                if keep == Parity::Even {
                    GrassmannNumber::from_complex(*c)
                } else {
                    GrassmannNumber::zero()
                }
            }
            Repr::Multi(v) => {
                let mut coeffs = [C64::new(0.0, 0.0); 16];
                for (mask, c) in v.iter().enumerate() {
                    if Parity::from_usize(mask.count_ones() as usize) == keep {
                        coeffs[mask] = *c;
                    }
                }
                GrassmannNumber { repr: Repr::Multi(Box::new(coeffs)) }.compact()
            }
        }
    }

    /// Entry-wise complex conjugation of the coefficients.
    pub fn conj_coeffs(&self) -> Self {
        match &self.repr {
            Repr::Scalar(c) => GrassmannNumber::from_complex(c.conj()),
            Repr::Multi(v) => {
                let mut coeffs = **v;
                for x in coeffs.iter_mut() {
                    *x = x.conj();
                }
                GrassmannNumber { repr: Repr::Multi(Box::new(coeffs)) }
            }
        }
    }

    /// In-place `self += sign * a * b` with quotient reduction; the workhorse
    /// of graded matrix multiplication.
    pub fn add_mul_assign(&mut self, a: &Self, b: &Self, sign: f64) {
        if a.is_exactly_zero() || b.is_exactly_zero() {
            return;
        }
        match (&mut self.repr, &a.repr, &b.repr) {
            (Repr::Scalar(acc), Repr::Scalar(x), Repr::Scalar(y)) => {
                *acc += x * y * sign;
            }
            _ => {
                let prod = a.mul(b).scale(C64::new(sign, 0.0));
                *self = std::mem::replace(self, GrassmannNumber::zero()) + prod;
            }
        }
    }
}

impl Default for GrassmannNumber {
    fn default() -> Self {
        Self::zero()
    }
}

impl From<C64> for GrassmannNumber {
    fn from(c: C64) -> Self {
        Self::from_complex(c)
    }
}

impl From<f64> for GrassmannNumber {
    fn from(x: f64) -> Self {
        Self::from_re(x)
    }
}

impl std::ops::Add for GrassmannNumber {
    type Output = GrassmannNumber;
    fn add(self, rhs: GrassmannNumber) -> GrassmannNumber {
        match (self.repr, rhs.repr) {
            (Repr::Scalar(a), Repr::Scalar(b)) => GrassmannNumber::from_complex(a + b),
            (Repr::Scalar(a), Repr::Multi(mut v)) => {
                v[0] += a;
                GrassmannNumber { repr: Repr::Multi(v) }
            }
            (Repr::Multi(mut v), Repr::Scalar(b)) => {
                v[0] += b;
                GrassmannNumber { repr: Repr::Multi(v) }
            }
            (Repr::Multi(mut v), Repr::Multi(w)) => {
                for (x, y) in v.iter_mut().zip(w.iter()) {
                    *x += y;
                }
                GrassmannNumber { repr: Repr::Multi(v) }.compact()
            }
        }
    }
}

impl std::ops::Sub for GrassmannNumber {
    type Output = GrassmannNumber;
    fn sub(self, rhs: GrassmannNumber) -> GrassmannNumber {
        self + rhs.neg()
    }
}

impl std::ops::Neg for GrassmannNumber {
    type Output = GrassmannNumber;
    fn neg(self) -> GrassmannNumber {
        self.scale(C64::new(-1.0, 0.0))
    }
}

impl GrassmannNumber {
    fn neg(self) -> Self {
        self.scale(C64::new(-1.0, 0.0))
    }
}

impl std::ops::Mul for GrassmannNumber {
    type Output = GrassmannNumber;
    fn mul(self, rhs: GrassmannNumber) -> GrassmannNumber {
        GrassmannNumber::mul(&self, &rhs)
    }
}

impl<'a> std::ops::Mul<&'a GrassmannNumber> for &'a GrassmannNumber {
    type Output = GrassmannNumber;
    fn mul(self, rhs: &'a GrassmannNumber) -> GrassmannNumber {
        GrassmannNumber::mul(self, rhs)
    }
}

impl std::ops::AddAssign for GrassmannNumber {
    fn add_assign(&mut self, rhs: GrassmannNumber) {
        *self = std::mem::replace(self, GrassmannNumber::zero()) + rhs;
    }
}

/// Free functions mirroring the operation names used across the crate.
pub fn ga_mul(a: &GrassmannNumber, b: &GrassmannNumber) -> GrassmannNumber {
    a.mul(b)
}

pub fn ga_invert(a: &GrassmannNumber) -> Result<GrassmannNumber, GrassmannError> {
    a.invert()
}

pub fn ga_parity(a: &GrassmannNumber) -> Result<Parity, GrassmannError> {
    a.parity()
}

pub fn ga_body(a: &GrassmannNumber) -> C64 {
    a.body()
}

pub fn ga_soul(a: &GrassmannNumber) -> GrassmannNumber {
    a.soul()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn gen(g: Generator) -> GrassmannNumber {
        GrassmannNumber::generator(g)
    }

    fn random_quotient(rng: &mut StdRng) -> GrassmannNumber {
        let mut out = GrassmannNumber::zero();
        for &mask in QUOTIENT_MASKS.iter() {
            let c = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            out += GrassmannNumber::monomial(mask, c);
        }
        out
    }

    fn random_full(rng: &mut StdRng) -> GrassmannNumber {
        let mut out = GrassmannNumber::zero();
        for mask in 0..16u8 {
            let c = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            out += GrassmannNumber::monomial(mask, c);
        }
        out
    }

    #[test]
    fn quotient_kills_same_boundary_products() {
        let am = gen(Generator::AlphaMinus);
        let bm = gen(Generator::BetaMinus);
        let ap = gen(Generator::AlphaPlus);
        let bp = gen(Generator::BetaPlus);
        assert!(am.mul(&bm).is_zero(0.0));
        assert!(ap.mul(&bp).is_zero(0.0));
        assert!(bm.mul(&am).is_zero(0.0));
        // Cross-boundary products survive.
        assert!(!am.mul(&ap).is_zero(0.0));
    }

    #[test]
    fn unit_law() {
        let mut rng = StdRng::seed_from_u64(1);
        for _ in 0..20 {
            let x = random_quotient(&mut rng);
            assert!(GrassmannNumber::one().mul(&x).approx_eq(&x, 1e-15));
            assert!(x.mul(&GrassmannNumber::one()).approx_eq(&x, 1e-15));
        }
    }

    #[test]
    fn boundary_combination_squares_to_zero() {
        // (β₊α₋ − α₊β₋)² = 0: every term repeats a generator or hits the ideal.
        let e = gen(Generator::BetaPlus).mul(&gen(Generator::AlphaMinus))
            - gen(Generator::AlphaPlus).mul(&gen(Generator::BetaMinus));
        assert!(e.mul(&e).is_zero(0.0));
    }

    #[test]
    fn anticommutation_and_canonical_sign() {
        let am = gen(Generator::AlphaMinus);
        let bp = gen(Generator::BetaPlus);
        let ab = am.mul(&bp);
        let ba = bp.mul(&am);
        assert!((ab.clone() + ba).is_zero(0.0));
        // α₋β₊ is canonical, coefficient +1 on mask 0b1001.
        assert!((ab.coeff(0b1001) - C64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn associativity_distributivity_random_triples() {
        let mut rng = StdRng::seed_from_u64(2);
        for _ in 0..1000 {
            let a = random_quotient(&mut rng);
            let b = random_quotient(&mut rng);
            let c = random_quotient(&mut rng);
            let lhs = a.mul(&b).mul(&c);
            let rhs = a.mul(&b.mul(&c));
            assert!(lhs.approx_eq(&rhs, 1e-13));
            let d_lhs = a.mul(&(b.clone() + c.clone()));
            let d_rhs = a.mul(&b) + a.mul(&c);
            assert!(d_lhs.approx_eq(&d_rhs, 1e-13));
        }
    }

    #[test]
    fn graded_commutativity_homogeneous() {
        let mut rng = StdRng::seed_from_u64(3);
        for _ in 0..200 {
            let a = random_quotient(&mut rng);
            let b = random_quotient(&mut rng);
            for (x, y) in [
                (a.even_part(), b.even_part()),
                (a.even_part(), b.odd_part()),
                (a.odd_part(), b.even_part()),
                (a.odd_part(), b.odd_part()),
            ] {
                let px = x.parity().unwrap();
                let py = y.parity().unwrap();
                let sign = if px == Parity::Odd && py == Parity::Odd { -1.0 } else { 1.0 };
                let lhs = x.mul(&y);
                let rhs = y.mul(&x).scale(C64::new(sign, 0.0));
                assert!(lhs.approx_eq(&rhs, 1e-13));
            }
        }
    }

    #[test]
    fn soul_cubes_to_zero() {
        let mut rng = StdRng::seed_from_u64(4);
        for _ in 0..50 {
            let s = random_quotient(&mut rng).soul();
            let s3 = s.mul(&s).mul(&s);
            assert!(s3.is_zero(0.0));
        }
    }

    #[test]
    fn invert_scalar() {
        let x = GrassmannNumber::from_re(2.0);
        assert!(x.invert().unwrap().approx_eq(&GrassmannNumber::from_re(0.5), 1e-15));
    }

    #[test]
    fn invert_one_plus_nilpotent() {
        // (1 + α₋β₊)⁻¹ = 1 − α₋β₊
        let n = GrassmannNumber::monomial(0b1001, C64::new(1.0, 0.0));
        let x = GrassmannNumber::one() + n.clone();
        let expected = GrassmannNumber::one() - n;
        assert!(x.invert().unwrap().approx_eq(&expected, 1e-15));
    }

    #[test]
    fn invert_round_trip_random() {
        let mut rng = StdRng::seed_from_u64(5);
        for _ in 0..100 {
            let mut a = random_quotient(&mut rng);
            // Keep the body away from zero.
            a += GrassmannNumber::from_complex(C64::new(2.0, 1.0));
            let inv = a.invert().unwrap();
            assert!(a.mul(&inv).approx_eq(&GrassmannNumber::one(), 1e-12));
            assert!(inv.mul(&a).approx_eq(&GrassmannNumber::one(), 1e-12));
        }
    }

    #[test]
    fn invert_c_plus_alpha_example() {
        let a = GrassmannNumber::from_complex(C64::new(2.0, 1.0)) + gen(Generator::AlphaPlus);
        let inv = a.invert().unwrap();
        assert!(a.mul(&inv).approx_eq(&GrassmannNumber::one(), 1e-14));
    }

    #[test]
    fn zero_body_rejected() {
        let a = gen(Generator::AlphaMinus);
        assert!(matches!(a.invert(), Err(GrassmannError::ZeroBody(_))));
    }

    #[test]
    fn parity_examples() {
        assert_eq!(gen(Generator::AlphaMinus).parity().unwrap(), Parity::Odd);
        let even = GrassmannNumber::from_re(3.0) + GrassmannNumber::monomial(0b0110, C64::new(2.0, 0.0));
        assert_eq!(even.parity().unwrap(), Parity::Even);
        let mixed = GrassmannNumber::one() + gen(Generator::AlphaPlus);
        assert!(matches!(mixed.parity(), Err(GrassmannError::MixedParity { .. })));
    }

    #[test]
    fn body_soul_examples() {
        let x = GrassmannNumber::from_re(3.0) + gen(Generator::AlphaPlus);
        assert!((x.body() - C64::new(3.0, 0.0)).norm() < 1e-15);
        assert!(GrassmannNumber::from_re(5.0).soul().is_zero(0.0));
        let prod = gen(Generator::AlphaPlus).mul(&gen(Generator::BetaMinus));
        assert!(prod.body().norm() < 1e-15);
    }

    #[test]
    fn quotient_commutes_with_full_multiplication() {
        // Multiplying in the free algebra and reducing afterwards agrees with
        // multiplying reduced representatives in the quotient.
        let mut rng = StdRng::seed_from_u64(6);
        for _ in 0..200 {
            let a = random_full(&mut rng);
            let b = random_full(&mut rng);
            let via_full = a.mul_full(&b).reduce();
            let via_quotient = a.reduce().mul(&b.reduce());
            assert!(via_full.approx_eq(&via_quotient, 1e-13));
        }
    }

    #[test]
    fn structural_ideal_closure() {
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..200 {
            let a = random_quotient(&mut rng);
            let b = random_quotient(&mut rng);
            let p = a.mul(&b);
            for mask in 0..16u8 {
                if forbidden(mask) {
                    assert_eq!(p.coeff(mask), C64::new(0.0, 0.0));
                }
            }
        }
    }
}
