//! Symmetrizer projectors on n-fold auxiliary spaces.
//!
//! The projectors are the plain (ungraded) symmetrizers of the permutation
//! group — the same as for the XXZ Heisenberg chain. The convention is
//! validated against the similarity transformations of the fused R-matrices:
//! with graded permutation operators instead, the complement block of the
//! conjugated fused R-matrix does not vanish.

use crate::graded::{GradedMatrix, Signature, SpaceSpec};
use crate::grassmann::GrassmannNumber;

/// Ungraded permutation operator on `(C²)^{⊗n}`: maps `e_{I}` to `e_{σ(I)}`
/// with `σ(I)_{σ(k)} = I_k`.
fn permutation_operator(perm: &[usize]) -> GradedMatrix {
    let n = perm.len();
    let spec = SpaceSpec::power(Signature::bf(), n);
    let dim = spec.dim();
    let mut m = GradedMatrix::zeros(spec.clone(), spec);
    for col in 0..dim {
        // Column index I (site k has bit I_k); row index has bits permuted.
        let mut row = 0usize;
        for k in 0..n {
            let bit = (col >> (n - 1 - k)) & 1;
            let target = perm[k];
            row |= bit << (n - 1 - target);
        }
        m.set(row, col, GrassmannNumber::one());
    }
    m
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut items: Vec<usize> = (0..n).collect();
    heap_recurse(&mut items, n, &mut out);
    out
}

fn heap_recurse(items: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k == 1 {
        out.push(items.clone());
        return;
    }
    for i in 0..k {
        heap_recurse(items, k - 1, out);
        if k % 2 == 0 {
            items.swap(i, k - 1);
        } else {
            items.swap(0, k - 1);
        }
    }
}

/// Symmetrizer `P⁺_{1…n} = (1/n!) Σ_σ P_σ`.
pub fn projector_plus(n: usize) -> GradedMatrix {
    assert!((1..=6).contains(&n), "symmetrizer implemented for n ≤ 6");
    let perms = permutations(n);
    let spec = SpaceSpec::power(Signature::bf(), n);
    let mut acc = GradedMatrix::zeros(spec.clone(), spec);
    for p in &perms {
        acc = acc.add(&permutation_operator(p));
    }
    acc.scale(crate::grassmann::C64::new(1.0 / perms.len() as f64, 0.0))
}

/// Complementary pair at n = 2: `(P⁺, P⁻)` with `P⁻ = 𝟙 − P⁺`.
pub fn projector_pair_two() -> (GradedMatrix, GradedMatrix) {
    let p_plus = projector_plus(2);
    let id = GradedMatrix::identity(&SpaceSpec::power(Signature::bf(), 2));
    let p_minus = id.sub(&p_plus);
    (p_plus, p_minus)
}
