//! Model parameters and the scalar kernels shared by the bulk and boundary
//! constructions.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grassmann::{C64, Generator, GrassmannNumber};

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("sin(2η) vanishes at η = {0}: anisotropy is singular")]
    SingularAnisotropy(C64),
    #[error("boundary parameter {0} has vanishing body, not invertible")]
    ZeroBodyBoundary(&'static str),
    #[error("{0}")]
    BadParams(String),
}

/// Complex sine for spectral arguments.
pub fn csin(u: C64) -> C64 {
    u.sin()
}

pub fn ccos(u: C64) -> C64 {
    u.cos()
}

/// `g(u) = −sin(u−2η)/sin(2η)`; `g(0) = 1`.
pub fn g_kernel(u: C64, eta: C64) -> C64 {
    -csin(u - 2.0 * eta) / csin(2.0 * eta)
}

/// Unitarity kernel `ζ(u) = g(u) g(−u)`.
pub fn zeta_kernel(u: C64, eta: C64) -> C64 {
    g_kernel(u, eta) * g_kernel(-u, eta)
}

/// Root-of-unity anisotropy `η_p = (π/2)/(p+1)`.
pub fn eta_p(p: usize) -> C64 {
    C64::new(std::f64::consts::FRAC_PI_2 / (p as f64 + 1.0), 0.0)
}

/// Odd boundary parameter: a complex multiple of one odd generator.
#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
pub struct OddParam {
    pub coeff: [f64; 2],
}

impl OddParam {
    pub fn zero() -> Self {
        OddParam { coeff: [0.0, 0.0] }
    }

    pub fn new(re: f64, im: f64) -> Self {
        OddParam { coeff: [re, im] }
    }

    pub fn value(&self, generator: Generator) -> GrassmannNumber {
        GrassmannNumber::monomial(1 << (generator as u8), C64::new(self.coeff[0], self.coeff[1]))
    }

    pub fn is_zero(&self) -> bool {
        self.coeff[0] == 0.0 && self.coeff[1] == 0.0
    }
}

/// Open-boundary data: even parameters ψ± with nonvanishing body and odd
/// amplitudes α±, β± proportional to the corresponding generators.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct BoundaryParams {
    pub psi_minus: [f64; 2],
    pub psi_plus: [f64; 2],
    pub alpha_minus: OddParam,
    pub beta_minus: OddParam,
    pub alpha_plus: OddParam,
    pub beta_plus: OddParam,
    /// Use the rescaled normalization ω̂₊ = 1/sin(ψ₊) for K⁺ (drops the
    /// 1/(2cos 2η) factor). The truncation checks switch this on: every
    /// truncation identity is homogeneous in ω₊, and the standard
    /// normalization diverges at the free-fermion point η₁ = π/4.
    #[serde(default)]
    pub scaled_k_plus: bool,
}

impl BoundaryParams {
    pub fn diagonal(psi_minus: C64, psi_plus: C64) -> Self {
        BoundaryParams {
            psi_minus: [psi_minus.re, psi_minus.im],
            psi_plus: [psi_plus.re, psi_plus.im],
            alpha_minus: OddParam::zero(),
            beta_minus: OddParam::zero(),
            alpha_plus: OddParam::zero(),
            beta_plus: OddParam::zero(),
            scaled_k_plus: false,
        }
    }

    /// Generic non-diagonal boundaries with unit odd amplitudes.
    pub fn nondiagonal(psi_minus: C64, psi_plus: C64) -> Self {
        let mut b = Self::diagonal(psi_minus, psi_plus);
        b.alpha_minus = OddParam::new(1.0, 0.0);
        b.beta_minus = OddParam::new(1.0, 0.0);
        b.alpha_plus = OddParam::new(1.0, 0.0);
        b.beta_plus = OddParam::new(1.0, 0.0);
        b
    }

    pub fn psi_minus(&self) -> C64 {
        C64::new(self.psi_minus[0], self.psi_minus[1])
    }

    pub fn psi_plus(&self) -> C64 {
        C64::new(self.psi_plus[0], self.psi_plus[1])
    }

    pub fn alpha_minus(&self) -> GrassmannNumber {
        self.alpha_minus.value(Generator::AlphaMinus)
    }

    pub fn beta_minus(&self) -> GrassmannNumber {
        self.beta_minus.value(Generator::BetaMinus)
    }

    pub fn alpha_plus(&self) -> GrassmannNumber {
        self.alpha_plus.value(Generator::AlphaPlus)
    }

    pub fn beta_plus(&self) -> GrassmannNumber {
        self.beta_plus.value(Generator::BetaPlus)
    }

    pub fn is_diagonal(&self) -> bool {
        self.alpha_minus.is_zero()
            && self.beta_minus.is_zero()
            && self.alpha_plus.is_zero()
            && self.beta_plus.is_zero()
    }

    /// The invariant combination β₊α₋ − α₊β₋ controlling the non-diagonal
    /// asymptotics.
    pub fn odd_invariant(&self) -> GrassmannNumber {
        self.beta_plus().mul(&self.alpha_minus()) - self.alpha_plus().mul(&self.beta_minus())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub enum Boundary {
    Periodic,
    Open(BoundaryParams),
}

/// Full model definition: chain length, anisotropy, boundary data.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ModelParams {
    pub sites: usize,
    pub eta: [f64; 2],
    pub boundary: Boundary,
}

impl ModelParams {
    pub fn periodic(sites: usize, eta: C64) -> Self {
        ModelParams { sites, eta: [eta.re, eta.im], boundary: Boundary::Periodic }
    }

    pub fn open(sites: usize, eta: C64, boundary: BoundaryParams) -> Self {
        ModelParams { sites, eta: [eta.re, eta.im], boundary: Boundary::Open(boundary) }
    }

    pub fn eta(&self) -> C64 {
        C64::new(self.eta[0], self.eta[1])
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let eta = self.eta();
        if csin(2.0 * eta).norm() < 1e-12 {
            return Err(ModelError::SingularAnisotropy(eta));
        }
        if self.sites == 0 {
            return Err(ModelError::BadParams("need at least one site".into()));
        }
        if let Boundary::Open(b) = &self.boundary {
            if csin(b.psi_minus()).norm() < 1e-12 {
                return Err(ModelError::ZeroBodyBoundary("sin(ψ₋)"));
            }
            if csin(b.psi_plus()).norm() < 1e-12 {
                return Err(ModelError::ZeroBodyBoundary("sin(ψ₊)"));
            }
            if !b.scaled_k_plus && ccos(2.0 * eta).norm() < 1e-12 {
                return Err(ModelError::BadParams("cos(2η) = 0 makes ω₊ singular".into()));
            }
        }
        Ok(())
    }

    pub fn open_params(&self) -> Option<&BoundaryParams> {
        match &self.boundary {
            Boundary::Open(b) => Some(b),
            Boundary::Periodic => None,
        }
    }

    /// `ω₋ = 1/sin(ψ₋)`.
    pub fn omega_minus(&self) -> Option<C64> {
        self.open_params().map(|b| C64::new(1.0, 0.0) / csin(b.psi_minus()))
    }

    /// `ω₊ = 1/(2 cos(2η) sin(ψ₊))`, or `1/sin(ψ₊)` in the rescaled
    /// normalization.
    pub fn omega_plus(&self) -> Option<C64> {
        self.open_params().map(|b| {
            if b.scaled_k_plus {
                C64::new(1.0, 0.0) / csin(b.psi_plus())
            } else {
                C64::new(1.0, 0.0) / (2.0 * ccos(2.0 * self.eta()) * csin(b.psi_plus()))
            }
        })
    }
}

/// Complex number parser for CLI/config input: accepts `a`, `a+bi`, `a-bi`.
pub fn parse_complex(s: &str) -> Result<C64, String> {
    let t = s.trim().replace(' ', "");
    if t.is_empty() {
        return Err("empty complex literal".into());
    }
    if let Ok(re) = t.parse::<f64>() {
        return Ok(C64::new(re, 0.0));
    }
    if let Some(stripped) = t.strip_suffix('i') {
        // Split at the last +/- that is not an exponent sign or leading sign.
        let bytes = stripped.as_bytes();
        for k in (1..bytes.len()).rev() {
            let ch = bytes[k] as char;
            if (ch == '+' || ch == '-') && !matches!(bytes[k - 1] as char, 'e' | 'E') {
                let re: f64 = stripped[..k].parse().map_err(|e| format!("bad real part: {e}"))?;
                let im_str = &stripped[k..];
                let im: f64 = if im_str == "+" {
                    1.0
                } else if im_str == "-" {
                    -1.0
                } else {
                    im_str.parse().map_err(|e| format!("bad imaginary part: {e}"))?
                };
                return Ok(C64::new(re, im));
            }
        }
        let im: f64 = stripped.parse().map_err(|e| format!("bad imaginary literal: {e}"))?;
        return Ok(C64::new(0.0, im));
    }
    Err(format!("cannot parse complex number from '{s}'"))
}

#[allow(non_snake_case)]
pub fn pi() -> f64 {
    std::f64::consts::PI
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeta_normalization() {
        let eta = C64::new(0.3, 0.1);
        assert!((zeta_kernel(C64::new(0.0, 0.0), eta) - C64::new(1.0, 0.0)).norm() < 1e-14);
        assert!((g_kernel(C64::new(0.0, 0.0), eta) - C64::new(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn validation_rejects_singular_anisotropy() {
        let p = ModelParams::periodic(2, C64::new(std::f64::consts::FRAC_PI_2, 0.0));
        assert!(p.validate().is_err());
    }

    #[test]
    fn parse_complex_forms() {
        assert_eq!(parse_complex("0.3").unwrap(), C64::new(0.3, 0.0));
        assert_eq!(parse_complex("0.3+0.1i").unwrap(), C64::new(0.3, 0.1));
        assert_eq!(parse_complex("-1.5-2i").unwrap(), C64::new(-1.5, -2.0));
        assert_eq!(parse_complex("2i").unwrap(), C64::new(0.0, 2.0));
        assert_eq!(parse_complex("1e-3+1e-4i").unwrap(), C64::new(1e-3, 1e-4));
    }

    #[test]
    fn odd_invariant_components() {
        let b = BoundaryParams::nondiagonal(C64::new(0.7, 0.0), C64::new(1.1, 0.0));
        let e = b.odd_invariant();
        // β₊α₋ = −α₋β₊ in canonical order; α₊β₋ = −β₋α₊.
        assert!((e.coeff(0b1001) - C64::new(-1.0, 0.0)).norm() < 1e-15);
        assert!((e.coeff(0b0110) - C64::new(1.0, 0.0)).norm() < 1e-15);
    }
}
