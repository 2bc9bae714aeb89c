//! Dense matrices over the Grassmann algebra with graded tensor structure.
//!
//! Component conventions follow the standard graded vector space formalism:
//! the super tensor product carries the Koszul sign
//! `(A ⊗ₛ B)^{αγ}_{βδ} = (−1)^{[p(α)+p(β)] p(γ)} A^α_β B^γ_δ`,
//! supertraces weight by `(−1)^{p(α)}`, and embeddings of local operators
//! into a product space pick up signs from the factors they are moved past.
//! Matrix multiplication itself is the usual index contraction; all grading
//! signs live in the tensor operations.

use ndarray::Array2;
use thiserror::Error;

use super::signature::{Signature, SpaceSpec};
use crate::grassmann::{C64, GrassmannNumber, Parity};

#[derive(Debug, Error)]
pub enum GradedError {
    #[error("dimension mismatch: {0}")]
    Shape(String),
    #[error("factor index {slot} out of range (n_factors = {n})")]
    BadSlot { slot: usize, n: usize },
    #[error("operation requires a square matrix on the traced factor")]
    NotSquare,
    #[error("matrix has non-scalar entries where scalars are required (max soul {0:.3e})")]
    NotScalar(f64),
    #[error("site index {site} out of range 1..={n}")]
    BadSite { site: usize, n: usize },
    #[error("singular matrix in scalar inversion")]
    Singular,
}

/// Dense rectangular matrix of Grassmann numbers with explicit row/column
/// grading and tensor-factor metadata.
#[derive(Clone, Debug)]
pub struct GradedMatrix {
    row: SpaceSpec,
    col: SpaceSpec,
    data: Vec<GrassmannNumber>,
}

impl GradedMatrix {
    pub fn zeros(row: SpaceSpec, col: SpaceSpec) -> Self {
        let data = vec![GrassmannNumber::zero(); row.dim() * col.dim()];
        GradedMatrix { row, col, data }
    }

    pub fn identity(spec: &SpaceSpec) -> Self {
        let mut m = Self::zeros(spec.clone(), spec.clone());
        for i in 0..spec.dim() {
            m.set(i, i, GrassmannNumber::one());
        }
        m
    }

    pub fn from_fn(row: SpaceSpec, col: SpaceSpec, mut f: impl FnMut(usize, usize) -> GrassmannNumber) -> Self {
        let (nr, nc) = (row.dim(), col.dim());
        let mut data = Vec::with_capacity(nr * nc);
        for i in 0..nr {
            for j in 0..nc {
                data.push(f(i, j));
            }
        }
        GradedMatrix { row, col, data }
    }

    /// Square scalar matrix on a single graded factor, from complex entries
    /// in row-major order.
    pub fn from_scalar_rows(sig: Signature, rows: &[&[C64]]) -> Self {
        let spec = SpaceSpec::single(sig);
        assert_eq!(rows.len(), spec.dim());
        Self::from_fn(spec.clone(), spec, |i, j| GrassmannNumber::from_complex(rows[i][j]))
    }

    pub fn row_spec(&self) -> &SpaceSpec {
        &self.row
    }

    pub fn col_spec(&self) -> &SpaceSpec {
        &self.col
    }

    pub fn nrows(&self) -> usize {
        self.row.dim()
    }

    pub fn ncols(&self) -> usize {
        self.col.dim()
    }

    pub fn is_square(&self) -> bool {
        self.nrows() == self.ncols()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &GrassmannNumber {
        &self.data[i * self.col.dim() + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: GrassmannNumber) {
        let nc = self.col.dim();
        self.data[i * nc + j] = v;
    }

    pub fn map(&self, f: impl Fn(&GrassmannNumber) -> GrassmannNumber) -> Self {
        GradedMatrix {
            row: self.row.clone(),
            col: self.col.clone(),
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn scale(&self, c: C64) -> Self {
        self.map(|x| x.scale(c))
    }

    pub fn scale_grassmann(&self, g: &GrassmannNumber) -> Self {
        self.map(|x| g.mul(x))
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.nrows(), other.nrows());
        assert_eq!(self.ncols(), other.ncols());
        GradedMatrix {
            row: self.row.clone(),
            col: self.col.clone(),
            data: self
                .data
                .iter()
                .zip(other.data.iter())
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.ncols(), other.nrows(), "matmul dimension mismatch");
        let (nr, nk, nc) = (self.nrows(), self.ncols(), other.ncols());
        let mut out = GradedMatrix::zeros(self.row.clone(), other.col.clone());
        for i in 0..nr {
            for k in 0..nk {
                let a = self.get(i, k);
                if a.is_exactly_zero() {
                    continue;
                }
                for j in 0..nc {
                    let b = other.get(k, j);
                    if b.is_exactly_zero() {
                        continue;
                    }
                    let idx = i * nc + j;
                    out.data[idx].add_mul_assign(a, b, 1.0);
                }
            }
        }
        out
    }

    /// Ordered product `ops[0] · ops[1] · … · ops[n-1]`.
    pub fn product(ops: &[&GradedMatrix]) -> Self {
        assert!(!ops.is_empty());
        let mut acc = ops[0].clone();
        for op in &ops[1..] {
            acc = acc.matmul(op);
        }
        acc
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self.matmul(other).sub(&other.matmul(self))
    }

    /// Largest coefficient magnitude over all entries and monomials.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.max_abs()).fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.sub(other).max_abs() <= tol
    }

    /// Super tensor product with the Koszul sign on components.
    pub fn super_tensor(&self, other: &Self) -> Self {
        let row = self.row.tensor(&other.row);
        let col = self.col.tensor(&other.col);
        let (nr_b, nc_b) = (other.nrows(), other.ncols());
        let mut out = GradedMatrix::zeros(row, col);
        let nc_out = out.ncols();
        for a_r in 0..self.nrows() {
            for a_c in 0..self.ncols() {
                let a = self.get(a_r, a_c);
                if a.is_exactly_zero() {
                    continue;
                }
                let sign_base = self.row.parity(a_r).as_u8() ^ self.col.parity(a_c).as_u8();
                for b_r in 0..nr_b {
                    let sign = if sign_base & other.row.parity(b_r).as_u8() & 1 == 1 { -1.0 } else { 1.0 };
                    for b_c in 0..nc_b {
                        let b = other.get(b_r, b_c);
                        if b.is_exactly_zero() {
                            continue;
                        }
                        let i = a_r * nr_b + b_r;
                        let j = a_c * nc_b + b_c;
                        out.data[i * nc_out + j].add_mul_assign(a, b, sign);
                    }
                }
            }
        }
        out
    }

    /// Supertrace `Σ_α (−1)^{p(α)} A^α_α`.
    pub fn super_trace(&self) -> GrassmannNumber {
        assert!(self.is_square(), "supertrace of non-square matrix");
        let mut acc = GrassmannNumber::zero();
        for i in 0..self.nrows() {
            let term = self.get(i, i);
            match self.row.parity(i) {
                Parity::Even => acc += term.clone(),
                Parity::Odd => acc += term.scale(C64::new(-1.0, 0.0)),
            }
        }
        acc
    }

    /// Partial supertrace over tensor factor `slot`.
    pub fn partial_super_trace(&self, slot: usize) -> Result<Self, GradedError> {
        let nf = self.row.n_factors();
        if slot >= nf {
            return Err(GradedError::BadSlot { slot, n: nf });
        }
        if self.row.factors()[slot] != self.col.factors()[slot] {
            return Err(GradedError::NotSquare);
        }
        let row_out = self.row.without_factor(slot);
        let col_out = self.col.without_factor(slot);
        let mut out = GradedMatrix::zeros(row_out, col_out);
        let d = self.row.factor_dim(slot);
        let stride_r = self.row.stride(slot);
        let stride_c = self.col.stride(slot);
        let nc_out = out.ncols();
        for i_out in 0..out.nrows() {
            let i_base = expand_index(i_out, &self.row, slot);
            for j_out in 0..nc_out {
                let j_base = expand_index(j_out, &self.col, slot);
                let mut acc = GrassmannNumber::zero();
                for g in 0..d {
                    let sign = match self.row.factors()[slot].parity(g) {
                        Parity::Even => 1.0,
                        Parity::Odd => -1.0,
                    };
                    let v = self.get(i_base + g * stride_r, j_base + g * stride_c);
                    if !v.is_exactly_zero() {
                        acc += v.scale(C64::new(sign, 0.0));
                    }
                }
                out.data[i_out * nc_out + j_out] = acc;
            }
        }
        Ok(out)
    }

    /// Partial super transposition on factor `slot`:
    /// `(M^{st_f})^I_J = (−1)^{[p(I_f)+p(J_f)][Σ_{k<f}(p(I_k)+p(J_k)) + p(I_f)]} M^{I'}_{J'}`
    /// with the factor-`f` indices of `I` and `J` exchanged. The inverse
    /// variant uses `p(J_f)` in place of `p(I_f)`.
    pub fn partial_super_transpose(&self, slot: usize, inverse: bool) -> Result<Self, GradedError> {
        let nf = self.row.n_factors();
        if slot >= nf {
            return Err(GradedError::BadSlot { slot, n: nf });
        }
        if self.row.factors()[slot] != self.col.factors()[slot] {
            return Err(GradedError::NotSquare);
        }
        let mut out = GradedMatrix::zeros(self.row.clone(), self.col.clone());
        let nc = self.ncols();
        for i in 0..self.nrows() {
            for j in 0..nc {
                let v = self.get(i, j);
                if v.is_exactly_zero() {
                    continue;
                }
                // Swap slot indices between row and column.
                let fi = self.row.factor_index(i, slot);
                let fj = self.col.factor_index(j, slot);
                let i_new = reindex(i, &self.row, slot, fj);
                let j_new = reindex(j, &self.col, slot, fi);
                let p_fi = self.row.factors()[slot].parity(fi).as_u8();
                let p_fj = self.col.factors()[slot].parity(fj).as_u8();
                let mut leading = 0u8;
                for k in 0..slot {
                    leading ^= self.row.factor_parity(i, k).as_u8() ^ self.col.factor_parity(j, k).as_u8();
                }
                // Sign is evaluated on the *output* indices (I_f = fj, J_f = fi).
                let anchor = if inverse { p_fi } else { p_fj };
                let s = (p_fi ^ p_fj) & (leading ^ anchor);
                let sign = if s == 1 { -1.0 } else { 1.0 };
                out.data[i_new * nc + j_new] = v.scale(C64::new(sign, 0.0));
            }
        }
        Ok(out)
    }

    /// Total super transposition (single-factor view of the whole space).
    pub fn super_transpose(&self, inverse: bool) -> Self {
        let flat = GradedMatrix {
            row: self.row.flattened(),
            col: self.col.flattened(),
            data: self.data.clone(),
        };
        let mut t = flat.partial_super_transpose(0, inverse).expect("square");
        t.row = self.row.clone();
        t.col = self.col.clone();
        t
    }

    /// Graded embedding of a one-factor operator at factor `slot` of `spec`.
    pub fn embed_one(op: &GradedMatrix, spec: &SpaceSpec, slot: usize) -> Result<Self, GradedError> {
        let nf = spec.n_factors();
        if slot >= nf {
            return Err(GradedError::BadSlot { slot, n: nf });
        }
        assert_eq!(op.nrows(), spec.factor_dim(slot));
        assert!(op.is_square());
        let mut out = GradedMatrix::zeros(spec.clone(), spec.clone());
        let dim = spec.dim();
        let nc = dim;
        for i in 0..dim {
            let fi = spec.factor_index(i, slot);
            for fj in 0..spec.factor_dim(slot) {
                let v = op.get(fi, fj);
                if v.is_exactly_zero() {
                    continue;
                }
                let j = reindex(i, spec, slot, fj);
                let p_entry =
                    spec.factors()[slot].parity(fi).as_u8() ^ spec.factors()[slot].parity(fj).as_u8();
                let sign = if p_entry & spec.trailing_parity(i, slot) == 1 { -1.0 } else { 1.0 };
                out.data[i * nc + j] = v.scale(C64::new(sign, 0.0));
            }
        }
        Ok(out)
    }

    /// Graded embedding of a two-factor operator, first factor at `fa`,
    /// second at `fb`. Supports `fa > fb` by conjugating with the graded
    /// permutation of the two small factors first.
    pub fn embed_two(op: &GradedMatrix, spec: &SpaceSpec, fa: usize, fb: usize) -> Result<Self, GradedError> {
        let nf = spec.n_factors();
        if fa >= nf || fb >= nf || fa == fb {
            return Err(GradedError::BadSlot { slot: fa.max(fb), n: nf });
        }
        assert_eq!(op.row.n_factors(), 2, "embed_two expects a two-factor operator");
        if fa > fb {
            return Self::embed_two(&op.swap_two_factors(), spec, fb, fa);
        }
        assert_eq!(op.row.factors()[0], spec.factors()[fa]);
        assert_eq!(op.row.factors()[1], spec.factors()[fb]);
        assert!(op.is_square());

        let dim = spec.dim();
        let da = spec.factor_dim(fa);
        let db = spec.factor_dim(fb);
        let mut out = GradedMatrix::zeros(spec.clone(), spec.clone());
        for i in 0..dim {
            let ia = spec.factor_index(i, fa);
            let ib = spec.factor_index(i, fb);
            // Spectator parities: Σ_{k>fa, k≠fb} p(I_k) and Σ_{k>fb} p(I_k).
            let mut after_a_not_b = 0u8;
            let mut after_b = 0u8;
            for k in 0..spec.n_factors() {
                if k == fa || k == fb {
                    continue;
                }
                let p = spec.factor_parity(i, k).as_u8();
                if k > fa {
                    after_a_not_b ^= p;
                }
                if k > fb {
                    after_b ^= p;
                }
            }
            for ja in 0..da {
                for jb in 0..db {
                    let v = op.get(ia * db + ib, ja * db + jb);
                    if v.is_exactly_zero() {
                        continue;
                    }
                    let pa = spec.factors()[fa].parity(ia).as_u8() ^ spec.factors()[fa].parity(ja).as_u8();
                    let pb = spec.factors()[fb].parity(ib).as_u8() ^ spec.factors()[fb].parity(jb).as_u8();
                    let s = (pa & after_a_not_b) ^ (pb & after_b);
                    let sign = if s & 1 == 1 { -1.0 } else { 1.0 };
                    let j = reindex(reindex(i, spec, fa, ja), spec, fb, jb);
                    out.data[i * dim + j] = v.scale(C64::new(sign, 0.0));
                }
            }
        }
        Ok(out)
    }

    /// The same two-factor operator viewed with its factors in the opposite
    /// order: `op' = 𝒫 op 𝒫` with the graded permutation.
    pub fn swap_two_factors(&self) -> Self {
        assert_eq!(self.row.n_factors(), 2);
        let (sa, sb) = (self.row.factors()[0].clone(), self.row.factors()[1].clone());
        let (da, db) = (sa.dim(), sb.dim());
        let row = SpaceSpec::new(vec![sb.clone(), sa.clone()]);
        let mut out = GradedMatrix::zeros(row.clone(), row);
        let nc = da * db;
        for x1 in 0..da {
            for y1 in 0..db {
                for x2 in 0..da {
                    for y2 in 0..db {
                        let v = self.get(x1 * db + y1, x2 * db + y2);
                        if v.is_exactly_zero() {
                            continue;
                        }
                        let s = (sa.parity(x1).as_u8() & sb.parity(y1).as_u8())
                            ^ (sa.parity(x2).as_u8() & sb.parity(y2).as_u8());
                        let sign = if s == 1 { -1.0 } else { 1.0 };
                        out.data[(y1 * da + x1) * nc + (y2 * da + x2)] = v.scale(C64::new(sign, 0.0));
                    }
                }
            }
        }
        out
    }

    /// `true` if every entry is a plain complex number.
    pub fn is_scalar(&self) -> bool {
        self.data.iter().all(|x| x.soul().is_exactly_zero())
    }

    /// Complex matrix of bodies (drops all soul content).
    pub fn body_matrix(&self) -> Array2<C64> {
        Array2::from_shape_fn((self.nrows(), self.ncols()), |(i, j)| self.get(i, j).body())
    }

    /// Largest soul magnitude over all entries.
    pub fn max_soul(&self) -> f64 {
        self.data.iter().map(|x| x.soul().max_abs()).fold(0.0, f64::max)
    }

    pub fn from_body(spec_row: SpaceSpec, spec_col: SpaceSpec, m: &Array2<C64>) -> Self {
        assert_eq!(m.nrows(), spec_row.dim());
        assert_eq!(m.ncols(), spec_col.dim());
        Self::from_fn(spec_row, spec_col, |i, j| GrassmannNumber::from_complex(m[(i, j)]))
    }

    /// Even-operator homogeneity check: entry `(i,j)` must have Grassmann
    /// parity `p(i)+p(j)`. Returns the largest violating magnitude.
    pub fn even_operator_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.nrows() {
            for j in 0..self.ncols() {
                let v = self.get(i, j);
                let bad = match self.row.parity(i) + self.col.parity(j) {
                    Parity::Even => v.odd_part().max_abs(),
                    Parity::Odd => v.even_part().max_abs(),
                };
                worst = worst.max(bad);
            }
        }
        worst
    }

    /// Odd (Grassmann-parity) part of every entry.
    pub fn odd_part(&self) -> Self {
        self.map(|x| x.odd_part())
    }

    pub fn even_part(&self) -> Self {
        self.map(|x| x.even_part())
    }

    /// Conjugation `A · self · A⁻¹` by a scalar matrix (given with its
    /// precomputed inverse).
    pub fn conjugate_by(&self, a: &GradedMatrix, a_inv: &GradedMatrix) -> Self {
        a.matmul(self).matmul(a_inv)
    }

    /// Reads off the sub-block `rows × cols` where the FIRST factor index is
    /// restricted to `0..block`, reinterpreting that factor with `sig`.
    pub fn leading_block(&self, block: usize, sig: Signature) -> Self {
        assert_eq!(sig.dim(), block);
        assert!(self.row.n_factors() >= 1);
        let tail_r: usize = self.row.factors()[1..].iter().map(|s| s.dim()).product::<usize>().max(1);
        let tail_c: usize = self.col.factors()[1..].iter().map(|s| s.dim()).product::<usize>().max(1);
        let mut row_factors = vec![sig.clone()];
        row_factors.extend(self.row.factors()[1..].iter().cloned());
        let mut col_factors = vec![sig];
        col_factors.extend(self.col.factors()[1..].iter().cloned());
        let row = SpaceSpec::new(row_factors);
        let col = SpaceSpec::new(col_factors);
        let mut out = GradedMatrix::zeros(row, col);
        let nc_out = out.ncols();
        for a in 0..block {
            for r in 0..tail_r {
                for b in 0..block {
                    for c in 0..tail_c {
                        let v = self.get(a * tail_r + r, b * tail_c + c);
                        if !v.is_exactly_zero() {
                            out.data[(a * tail_r + r) * nc_out + (b * tail_c + c)] = v.clone();
                        }
                    }
                }
            }
        }
        out
    }

    /// Largest magnitude outside the upper-left block where the first factor
    /// index is `< block` on both sides.
    pub fn block_leakage(&self, block: usize) -> f64 {
        let tail_r: usize = self.row.factors()[1..].iter().map(|s| s.dim()).product::<usize>().max(1);
        let tail_c: usize = self.col.factors()[1..].iter().map(|s| s.dim()).product::<usize>().max(1);
        let mut worst: f64 = 0.0;
        for i in 0..self.nrows() {
            let a = i / tail_r;
            for j in 0..self.ncols() {
                let b = j / tail_c;
                if a < block && b < block {
                    continue;
                }
                worst = worst.max(self.get(i, j).max_abs());
            }
        }
        worst
    }

    /// LU inverse of a scalar square matrix.
    pub fn inverse_scalar(&self) -> Result<Self, GradedError> {
        if !self.is_square() {
            return Err(GradedError::NotSquare);
        }
        let soul = self.max_soul();
        if soul > 0.0 {
            return Err(GradedError::NotScalar(soul));
        }
        let inv = crate::linalg::invert(&self.body_matrix()).ok_or(GradedError::Singular)?;
        Ok(Self::from_body(self.col.clone(), self.row.clone(), &inv))
    }
}

/// Graded permutation operator mapping `V ⊗ W → W ⊗ V`:
/// rows are indexed by `(w, v)`, columns by `(v, w)`, with entry
/// `(−1)^{p(v) p(w)}` on the matching pairs. For `V = W` this is the paper's
/// `𝒫` with `𝒫² = 𝟙`.
pub fn graded_permutation(sig_v: &Signature, sig_w: &Signature) -> GradedMatrix {
    let row = SpaceSpec::new(vec![sig_w.clone(), sig_v.clone()]);
    let col = SpaceSpec::new(vec![sig_v.clone(), sig_w.clone()]);
    let (dv, dw) = (sig_v.dim(), sig_w.dim());
    let mut out = GradedMatrix::zeros(row, col);
    let nc = dv * dw;
    for v in 0..dv {
        for w in 0..dw {
            let sign = if sig_v.parity(v).as_u8() & sig_w.parity(w).as_u8() == 1 { -1.0 } else { 1.0 };
            let i = w * dv + v;
            let j = v * dw + w;
            out.data[i * nc + j] = GrassmannNumber::from_re(sign);
        }
    }
    out
}

/// Square graded swap on two identical factors.
pub fn graded_swap(sig: &Signature) -> GradedMatrix {
    graded_permutation(sig, sig)
}

/// Composite index with factor `k` replaced by `new_idx`.
#[inline]
fn reindex(idx: usize, spec: &SpaceSpec, k: usize, new_idx: usize) -> usize {
    let old = spec.factor_index(idx, k);
    (idx - old * spec.stride(k)) + new_idx * spec.stride(k)
}

/// Composite index of the reduced space expanded to the full space with
/// factor `slot` set to zero.
fn expand_index(reduced: usize, spec: &SpaceSpec, slot: usize) -> usize {
    // The reduced index enumerates all factors except `slot` in order.
    let mut rem = reduced;
    let mut full = 0usize;
    for k in (0..spec.n_factors()).rev() {
        if k == slot {
            continue;
        }
        let d = spec.factor_dim(k);
        let ik = rem % d;
        rem /= d;
        full += ik * spec.stride(k);
    }
    full
}
