//! Similarity transformations into the projector eigenbasis: the `A`
//! matrices (block-diagonalizing fused objects), and the diagonal `B`, `C`
//! rescalings used by the truncation identities.
//!
//! The symmetric rows of `A_{(1…n)}` are the normalized uniform sums over
//! the weight-`w` basis states, `w = 0…n`, giving the alternating `BFBF…`
//! grading of the fused auxiliary space. The complement rows are an
//! orthonormal completion within each weight class; the printed complement
//! rows (available up to n = 4) span the same spaces, and either choice
//! leaves the fused blocks untouched.

use crate::graded::{GradedMatrix, Signature, SpaceSpec};
use crate::grassmann::{C64, GrassmannNumber, Parity};
use thiserror::Error;

use super::kernels::{a_coefficient, b_coefficient};

#[derive(Debug, Error)]
pub enum FusionError {
    #[error("fusion basis validation failed at level {level}: {reason}")]
    BasisValidationFailed { level: usize, reason: String },
    #[error("complement block leaks: norm {leak:.3e} at level {level}")]
    BlockLeakage { level: usize, leak: f64 },
    #[error("fusion level {0} out of implemented range")]
    BadLevel(usize),
}

/// Transformation data for one fusion level.
pub struct FusionBasis {
    pub level: usize,
    /// Change of basis on the n-fold auxiliary space; rows ordered as
    /// (symmetric w = 0…n, then complement), row grading alternating then
    /// weight parities.
    pub a: GradedMatrix,
    pub a_inv: GradedMatrix,
    /// Diagonal rescaling on the fused (n+1)-dimensional block.
    pub b: GradedMatrix,
    pub b_inv: GradedMatrix,
    pub c: GradedMatrix,
    pub c_inv: GradedMatrix,
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let mut acc = 1usize;
    for i in 0..k.min(n - k) {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Row signature of the transformed n-fold auxiliary space: alternating
/// parities for the symmetric block, then weight parities for the
/// complement rows (grouped by ascending weight).
fn transformed_signature(n: usize) -> Signature {
    let mut parities: Vec<Parity> = (0..=n).map(Parity::from_usize).collect();
    for w in 0..=n {
        for _ in 1..binomial(n, w) {
            parities.push(Parity::from_usize(w));
        }
    }
    Signature(parities)
}

/// The orthogonal `A_{(1…n)}` built from the symmetrizer pattern.
fn build_a(n: usize) -> GradedMatrix {
    let dim = 1usize << n;
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(dim);
    // Symmetric rows: uniform over each weight class.
    for w in 0..=n {
        let count = binomial(n, w);
        let amp = 1.0 / (count as f64).sqrt();
        let mut row = vec![0.0; dim];
        for idx in 0..dim {
            if (idx as u32).count_ones() as usize == w {
                row[idx] = amp;
            }
        }
        rows.push(row);
    }
    // Complement rows: Gram-Schmidt within each weight class.
    for w in 0..=n {
        let members: Vec<usize> = (0..dim).filter(|i| (*i as u32).count_ones() as usize == w).collect();
        if members.len() < 2 {
            continue;
        }
        let mut basis: Vec<Vec<f64>> = Vec::new();
        let sym: Vec<f64> = {
            let amp = 1.0 / (members.len() as f64).sqrt();
            members.iter().map(|_| amp).collect()
        };
        basis.push(sym);
        for pick in 0..members.len() {
            let mut v: Vec<f64> = vec![0.0; members.len()];
            v[pick] = 1.0;
            for b in &basis {
                let overlap: f64 = v.iter().zip(b.iter()).map(|(x, y)| x * y).sum();
                for (x, y) in v.iter_mut().zip(b.iter()) {
                    *x -= overlap * y;
                }
            }
            let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-9 {
                for x in v.iter_mut() {
                    *x /= norm;
                }
                basis.push(v);
            }
        }
        for b in basis.into_iter().skip(1) {
            let mut row = vec![0.0; dim];
            for (pos, &idx) in members.iter().enumerate() {
                row[idx] = b[pos];
            }
            rows.push(row);
        }
    }
    let row_spec = SpaceSpec::single(transformed_signature(n));
    let col_spec = SpaceSpec::power(Signature::bf(), n).flattened();
    GradedMatrix::from_fn(row_spec, col_spec, |i, j| GrassmannNumber::from_re(rows[i][j]))
}

/// Diagonal entries of `B_{⟪1…n⟫}`: `a_n` on both ends, the Appendix
/// coefficient `b` in the center at n = 4, and 1 elsewhere.
fn b_entries(n: usize) -> Vec<C64> {
    let one = C64::new(1.0, 0.0);
    match n {
        1 => vec![one, one],
        2 => vec![a_coefficient(2), one, a_coefficient(2)],
        3 => vec![a_coefficient(3), one, one, a_coefficient(3)],
        4 => vec![a_coefficient(4), one, b_coefficient(), one, a_coefficient(4)],
        _ => panic!("B matrix not tabulated beyond n = 4"),
    }
}

fn diag_on_alternating(entries: &[C64]) -> GradedMatrix {
    let spec = SpaceSpec::single(Signature::alternating(entries.len()));
    let mut m = GradedMatrix::zeros(spec.clone(), spec);
    for (i, &e) in entries.iter().enumerate() {
        m.set(i, i, GrassmannNumber::from_complex(e));
    }
    m
}

/// Loads and validates the fusion basis at level `n ≤ 5`.
pub fn load_fusion_basis(n: usize) -> Result<FusionBasis, FusionError> {
    if !(1..=5).contains(&n) {
        return Err(FusionError::BadLevel(n));
    }
    let a = build_a(n);
    let a_inv = a
        .inverse_scalar()
        .map_err(|e| FusionError::BasisValidationFailed { level: n, reason: e.to_string() })?;
    let id = GradedMatrix::identity(a.row_spec());
    let round = a.matmul(&a_inv);
    if round.sub(&id).max_abs() > 1e-12 {
        return Err(FusionError::BasisValidationFailed { level: n, reason: "A·A⁻¹ ≠ 𝟙".into() });
    }
    let (b, c) = if n <= 4 {
        let be = b_entries(n);
        let mut ce = be.clone();
        *ce.last_mut().unwrap() = C64::new(1.0, 0.0);
        (diag_on_alternating(&be), diag_on_alternating(&ce))
    } else {
        // B/C rescalings are only consumed by the truncation identities,
        // which stop at level 4.
        let e = vec![C64::new(1.0, 0.0); n + 1];
        (diag_on_alternating(&e), diag_on_alternating(&e))
    };
    let b_inv = b.inverse_scalar().expect("diagonal inverse");
    let c_inv = c.inverse_scalar().expect("diagonal inverse");
    Ok(FusionBasis { level: n, a, a_inv, b, b_inv, c, c_inv })
}

/// The printed `A_{(12)}`, `A_{(123)}`, `A_{(1234)}` (exact values), used to
/// validate the generated bases.
pub fn printed_a(n: usize) -> Option<Vec<Vec<f64>>> {
    let s2 = std::f64::consts::SQRT_2;
    let s3 = 3.0_f64.sqrt();
    match n {
        2 => Some(vec![
            vec![1.0, 0.0, 0.0, 0.0],
            vec![0.0, 1.0 / s2, 1.0 / s2, 0.0],
            vec![0.0, 0.0, 0.0, 1.0],
            vec![0.0, 1.0 / s2, -1.0 / s2, 0.0],
        ]),
        3 => {
            let a = 1.0 / s3;
            let b = 2.0 * s2 / 3.0;
            let c = s2 / 3.0;
            Some(vec![
                vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
                vec![0.0, a, a, 0.0, a, 0.0, 0.0, 0.0],
                vec![0.0, 0.0, 0.0, a, 0.0, a, a, 0.0],
                vec![0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0],
                vec![0.0, b, -c, 0.0, -c, 0.0, 0.0, 0.0],
                vec![0.0, -c, b, 0.0, -c, 0.0, 0.0, 0.0],
                vec![0.0, 0.0, 0.0, b, 0.0, -c, -c, 0.0],
                vec![0.0, 0.0, 0.0, -c, 0.0, b, -c, 0.0],
            ])
        }
        4 => {
            let h = 0.5; // (1/√2)·(1/√2)
            let t = 1.0 / (6.0_f64).sqrt(); // (1/√2)·(1/√3)
            let q32 = 3.0 / (2.0 * s2); // (1/√2)·(3/2)
            let q12 = 1.0 / (2.0 * s2); // (1/√2)·(1/2)
            let f53 = 5.0 / (3.0 * s2);
            let f13 = 1.0 / (3.0 * s2);
            let mut rows = vec![vec![0.0; 16]; 16];
            rows[0][0] = 1.0;
            for idx in [1usize, 2, 4, 8] {
                rows[1][idx] = h;
            }
            for idx in [3usize, 5, 6, 9, 10, 12] {
                rows[2][idx] = t;
            }
            for idx in [7usize, 11, 13, 14] {
                rows[3][idx] = h;
            }
            rows[4][15] = 1.0;
            rows[5][1] = q32;
            rows[5][2] = -q12;
            rows[5][4] = -q12;
            rows[5][8] = -q12;
            rows[6][1] = -q12;
            rows[6][2] = q32;
            rows[6][4] = -q12;
            rows[6][8] = -q12;
            rows[7][3] = f53;
            for idx in [5usize, 6, 9, 10, 12] {
                rows[7][idx] = -f13;
            }
            rows[8][1] = -q12;
            rows[8][2] = -q12;
            rows[8][4] = q32;
            rows[8][8] = -q12;
            rows[9][3] = -f13;
            rows[9][5] = f53;
            for idx in [6usize, 9, 10, 12] {
                rows[9][idx] = -f13;
            }
            rows[10][3] = -f13;
            rows[10][5] = -f13;
            rows[10][6] = f53;
            for idx in [9usize, 10, 12] {
                rows[10][idx] = -f13;
            }
            rows[11][7] = q32;
            rows[11][11] = -q12;
            rows[11][13] = -q12;
            rows[11][14] = -q12;
            rows[12][3] = -f13;
            for idx in [5usize, 6] {
                rows[12][idx] = -f13;
            }
            rows[12][9] = f53;
            rows[12][10] = -f13;
            rows[12][12] = -f13;
            rows[13][3] = -f13;
            for idx in [5usize, 6, 9] {
                rows[13][idx] = -f13;
            }
            rows[13][10] = f53;
            rows[13][12] = -f13;
            rows[14][7] = -q12;
            rows[14][11] = q32;
            rows[14][13] = -q12;
            rows[14][14] = -q12;
            rows[15][7] = -q12;
            rows[15][11] = -q12;
            rows[15][13] = q32;
            rows[15][14] = -q12;
            Some(rows)
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generated_symmetric_rows_match_printed() {
        for n in [2usize, 3, 4] {
            let a = build_a(n);
            let printed = printed_a(n).unwrap();
            for w in 0..=n {
                for j in 0..(1 << n) {
                    let got = a.get(w, j).body().re;
                    assert!(
                        (got - printed[w][j]).abs() < 1e-12,
                        "n={n}, symmetric row {w}, col {j}: {got} vs {}",
                        printed[w][j]
                    );
                }
            }
        }
    }

    #[test]
    fn bases_validate_up_to_five() {
        for n in 1..=5 {
            let basis = load_fusion_basis(n).unwrap();
            assert_eq!(basis.a.nrows(), 1 << n);
        }
    }

    #[test]
    fn printed_b_values() {
        // B_{⟪123⟫} = diag(a₃, 1, 1, a₃).
        let basis = load_fusion_basis(3).unwrap();
        let a3 = a_coefficient(3);
        assert!((basis.b.get(0, 0).body() - a3).norm() < 1e-14);
        assert!((basis.b.get(1, 1).body() - C64::new(1.0, 0.0)).norm() < 1e-14);
        assert!((basis.b.get(3, 3).body() - a3).norm() < 1e-14);
        // C replaces the last entry by 1.
        let c = load_fusion_basis(2).unwrap().c;
        assert!((c.get(0, 0).body() - a_coefficient(2)).norm() < 1e-14);
        assert!((c.get(2, 2).body() - C64::new(1.0, 0.0)).norm() < 1e-14);
    }
}
