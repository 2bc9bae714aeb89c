//! TQ-equations and Bethe-root machinery for periodic and diagonal open
//! boundaries, linear Q-determination from exact eigenvalue functions, the
//! quantum-determinant factorization, and the exploratory non-diagonal
//! Q-ansatz probe.

pub mod newton;
pub mod obc;
pub mod pbc;
pub mod qdet;
pub mod rho;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum BetheError {
    #[error("evaluation point coincides with a Bethe root")]
    QZero,
    #[error("sector M = {m} exceeds N = {n}")]
    BadSector { m: usize, n: usize },
    #[error("Newton iteration did not converge")]
    NoConvergence,
    #[error("colliding Bethe roots rejected")]
    RootCollision,
    #[error("linear TQ system is rank-deficient or inconsistent")]
    RankDeficient,
    #[error("spectrum extraction failed: {0}")]
    Spectrum(String),
}

pub use obc::{lambda_tq_obc_diag, solve_bethe_obc_diag, tq_linear_solve_obc};
pub use pbc::{lambda_tq_pbc, solve_bethe_pbc, tq_linear_solve_pbc, BetheState};
pub use qdet::{factorize_qdet, h_alpha, h_delta};
pub use rho::{rho_probe, RhoProbeReport};
