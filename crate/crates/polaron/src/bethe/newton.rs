//! Damped Newton iteration for small complex systems with analytic Jacobians.

use ndarray::{Array1, Array2};

use crate::grassmann::C64;

pub struct NewtonOutcome {
    pub roots: Vec<C64>,
    pub residual: f64,
    pub iterations: usize,
}

/// Newton iteration on `f` with Jacobian `jac`, damped by step halving.
/// `residual` is the sup-norm of `f` at the returned point.
pub fn newton_solve(
    f: impl Fn(&[C64]) -> Vec<C64>,
    jac: impl Fn(&[C64]) -> Array2<C64>,
    seed: &[C64],
    max_iter: usize,
    tol: f64,
) -> Option<NewtonOutcome> {
    let mut x: Vec<C64> = seed.to_vec();
    let mut fx = f(&x);
    let mut res = sup_norm(&fx);
    for it in 0..max_iter {
        if !res.is_finite() {
            return None;
        }
        if res < tol {
            return Some(NewtonOutcome { roots: x, residual: res, iterations: it });
        }
        let j = jac(&x);
        let rhs = Array1::from_vec(fx.clone());
        let step = crate::linalg::solve(&j, &rhs)?;
        // Step halving keeps the iteration inside the basin.
        let mut damping = 1.0;
        let mut accepted = false;
        for _ in 0..12 {
            let candidate: Vec<C64> =
                x.iter().zip(step.iter()).map(|(xi, si)| xi - si * damping).collect();
            let fc = f(&candidate);
            let rc = sup_norm(&fc);
            if rc.is_finite() && rc < res {
                x = candidate;
                fx = fc;
                res = rc;
                accepted = true;
                break;
            }
            damping *= 0.5;
        }
        if !accepted {
            return None;
        }
    }
    if res < tol {
        Some(NewtonOutcome { roots: x, residual: res, iterations: max_iter })
    } else {
        None
    }
}

fn sup_norm(v: &[C64]) -> f64 {
    v.iter().map(|c| c.norm()).fold(0.0, f64::max)
}
