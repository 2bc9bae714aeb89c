//! Grading signatures and tensor-factor bookkeeping for graded vector spaces.

use crate::grassmann::Parity;

/// Ordered list of parities, one per basis index of a single space.
///
/// `BF` denotes the two-dimensional space with a bosonic first and fermionic
/// second basis vector; fused auxiliary spaces carry alternating gradings
/// `BFB`, `BFBF`, ....
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Signature(pub Vec<Parity>);

impl Signature {
    /// The local BF space of one lattice site (and of the bare auxiliary space).
    pub fn bf() -> Self {
        Signature(vec![Parity::Even, Parity::Odd])
    }

    /// Alternating grading `BFBF…` of length `dim` (fused auxiliary spaces).
    pub fn alternating(dim: usize) -> Self {
        Signature((0..dim).map(Parity::from_usize).collect())
    }

    /// All-even grading (used for ungraded scratch spaces).
    pub fn even(dim: usize) -> Self {
        Signature(vec![Parity::Even; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn parity(&self, i: usize) -> Parity {
        self.0[i]
    }
}

/// A tensor product of graded factors. Operations that act on a single
/// factor (partial supertrace, partial super transposition, embeddings)
/// consume this metadata instead of caller-side index arithmetic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpaceSpec {
    factors: Vec<Signature>,
    /// Flattened parity of every composite basis index.
    flat: Vec<Parity>,
    /// Row-major strides per factor.
    strides: Vec<usize>,
    dim: usize,
}

impl SpaceSpec {
    pub fn new(factors: Vec<Signature>) -> Self {
        let dim: usize = factors.iter().map(|s| s.dim()).product::<usize>().max(1);
        let mut strides = vec![0usize; factors.len()];
        let mut acc = 1usize;
        for (k, f) in factors.iter().enumerate().rev() {
            strides[k] = acc;
            acc *= f.dim();
        }
        let mut flat = Vec::with_capacity(dim);
        for idx in 0..dim {
            let mut p = 0u8;
            for (k, f) in factors.iter().enumerate() {
                let ik = (idx / strides[k]) % f.dim();
                p ^= f.parity(ik).as_u8();
            }
            flat.push(Parity::from_usize(p as usize));
        }
        SpaceSpec { factors, flat, strides, dim }
    }

    pub fn single(sig: Signature) -> Self {
        Self::new(vec![sig])
    }

    /// `n` copies of the same factor.
    pub fn power(sig: Signature, n: usize) -> Self {
        Self::new(vec![sig; n])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn factors(&self) -> &[Signature] {
        &self.factors
    }

    pub fn n_factors(&self) -> usize {
        self.factors.len()
    }

    pub fn factor_dim(&self, k: usize) -> usize {
        self.factors[k].dim()
    }

    pub fn stride(&self, k: usize) -> usize {
        self.strides[k]
    }

    /// Parity of composite index `idx`.
    pub fn parity(&self, idx: usize) -> Parity {
        self.flat[idx]
    }

    /// Index of factor `k` within composite index `idx`.
    pub fn factor_index(&self, idx: usize, k: usize) -> usize {
        (idx / self.strides[k]) % self.factors[k].dim()
    }

    /// Parity of factor `k`'s index within composite index `idx`.
    pub fn factor_parity(&self, idx: usize, k: usize) -> Parity {
        self.factors[k].parity(self.factor_index(idx, k))
    }

    /// Sum of factor parities strictly after `k` (as 0/1).
    pub fn trailing_parity(&self, idx: usize, k: usize) -> u8 {
        let mut p = 0u8;
        for j in (k + 1)..self.factors.len() {
            p ^= self.factor_parity(idx, j).as_u8();
        }
        p
    }

    /// Concatenation of tensor factors (signature of a super tensor product).
    pub fn tensor(&self, other: &SpaceSpec) -> SpaceSpec {
        let mut factors = self.factors.clone();
        factors.extend(other.factors.iter().cloned());
        SpaceSpec::new(factors)
    }

    /// Spec with factor `k` removed (after a partial supertrace).
    pub fn without_factor(&self, k: usize) -> SpaceSpec {
        let mut factors = self.factors.clone();
        factors.remove(k);
        SpaceSpec::new(factors)
    }

    /// Spec with the factor list reinterpreted as a single flattened factor.
    pub fn flattened(&self) -> SpaceSpec {
        SpaceSpec::new(vec![Signature(self.flat.clone())])
    }

    /// Replaces factor `k` with the given signature (same dimension not
    /// required; used when reading off fused blocks).
    pub fn with_factor(&self, k: usize, sig: Signature) -> SpaceSpec {
        let mut factors = self.factors.clone();
        factors[k] = sig;
        SpaceSpec::new(factors)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grassmann::Parity::{Even, Odd};

    #[test]
    fn bf_tensor_bf_is_bffb() {
        let spec = SpaceSpec::power(Signature::bf(), 2);
        let parities: Vec<_> = (0..4).map(|i| spec.parity(i)).collect();
        assert_eq!(parities, vec![Even, Odd, Odd, Even]);
    }

    #[test]
    fn strides_and_factor_indices() {
        let spec = SpaceSpec::new(vec![Signature::alternating(3), Signature::bf()]);
        assert_eq!(spec.dim(), 6);
        // idx = a*2 + q
        assert_eq!(spec.factor_index(5, 0), 2);
        assert_eq!(spec.factor_index(5, 1), 1);
        assert_eq!(spec.parity(5), Even + Odd); // BFB index 2 is B, q index 1 is F
    }
}
