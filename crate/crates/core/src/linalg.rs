//! Small dense-tensor helpers shared by the invariant pipeline.

use nalgebra::{DMatrix, DVector};

use crate::taylor::Taylor;

/// Dense tensor with runtime rank, row-major.
#[derive(Clone, Debug)]
pub struct NTensor {
    dims: Vec<usize>,
    data: Vec<f64>,
}

impl NTensor {
    pub fn zeros(dims: &[usize]) -> Self {
        let len = dims.iter().product();
        Self {
            dims: dims.to_vec(),
            data: vec![0.0; len],
        }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    fn offset(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.dims.len());
        let mut off = 0;
        for (i, (&k, &d)) in idx.iter().zip(self.dims.iter()).enumerate() {
            debug_assert!(k < d, "index {k} out of bound {d} at axis {i}");
            off = off * d + k;
        }
        off
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.data[self.offset(idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: f64) {
        let off = self.offset(idx);
        self.data[off] = v;
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// max |a - b| / max(1, ||a||_inf, ||b||_inf)
    pub fn rel_distance(&self, other: &NTensor) -> f64 {
        assert_eq!(self.dims, other.dims);
        let scale = 1.0f64.max(self.max_abs()).max(other.max_abs());
        self.data
            .iter()
            .zip(other.data.iter())
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
            / scale
    }
}

/// Determinant of a square matrix of Taylor scalars by cofactor expansion.
/// Dimensions stay tiny (n <= 6) so the factorial cost is irrelevant.
pub fn taylor_det(m: &[Vec<Taylor>]) -> Taylor {
    let n = m.len();
    assert!(n >= 1 && m.iter().all(|r| r.len() == n));
    if n == 1 {
        return m[0][0].clone();
    }
    let ctx = m[0][0].ctx().clone();
    let mut acc = ctx.constant(0.0);
    for (j, pivot) in m[0].iter().enumerate() {
        let minor: Vec<Vec<Taylor>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(c, _)| *c != j)
                    .map(|(_, t)| t.clone())
                    .collect()
            })
            .collect();
        let term = pivot.mul(&taylor_det(&minor));
        if j % 2 == 0 {
            acc = &acc + &term;
        } else {
            acc = &acc - &term;
        }
    }
    acc
}

/// Inverse of a square Taylor matrix by Gauss-Jordan elimination with partial
/// pivoting on constant terms. Panics when the constant-term matrix is
/// singular; callers only invert metrics, which are positive definite.
pub fn taylor_mat_inv(m: &[Vec<Taylor>]) -> Vec<Vec<Taylor>> {
    let n = m.len();
    let ctx = m[0][0].ctx().clone();
    let mut a: Vec<Vec<Taylor>> = m.to_vec();
    let mut inv: Vec<Vec<Taylor>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| ctx.constant(if i == j { 1.0 } else { 0.0 }))
                .collect()
        })
        .collect();
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&r1, &r2| {
                a[r1][col]
                    .value()
                    .abs()
                    .partial_cmp(&a[r2][col].value().abs())
                    .unwrap()
            })
            .unwrap();
        a.swap(col, pivot_row);
        inv.swap(col, pivot_row);
        let pivot_inv = a[col][col].recip();
        for j in 0..n {
            a[col][j] = a[col][j].mul(&pivot_inv);
            inv[col][j] = inv[col][j].mul(&pivot_inv);
        }
        for row in 0..n {
            if row == col {
                continue;
            }
            let factor = a[row][col].clone();
            for j in 0..n {
                a[row][j] = &a[row][j] - &factor.mul(&a[col][j]);
                inv[row][j] = &inv[row][j] - &factor.mul(&inv[col][j]);
            }
        }
    }
    inv
}

/// Symmetric eigendecomposition with deterministic output: eigenvalues sorted
/// ascending, each eigenvector's first component of largest magnitude made
/// positive.
pub fn sym_eigen_sorted(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = m.nrows();
    let sym = (m + m.transpose()) * 0.5;
    let eig = sym.clone().symmetric_eigen();
    // Re-derive each eigenvalue as the Rayleigh quotient of its own column:
    // the solver's eigenvalue vector is not guaranteed to be ordered
    // consistently with the eigenvector columns when eigenvalues repeat.
    let rayleigh: Vec<f64> = (0..n)
        .map(|i| {
            let v = eig.eigenvectors.column(i);
            (&sym * v).dot(&v)
        })
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| rayleigh[i].partial_cmp(&rayleigh[j]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| rayleigh[i]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        let mut v: DVector<f64> = eig.eigenvectors.column(i).into();
        let lead = v
            .iter()
            .enumerate()
            .max_by(|(_, a), (_, b)| a.abs().partial_cmp(&b.abs()).unwrap())
            .map(|(k, _)| k)
            .unwrap();
        if v[lead] < 0.0 {
            v = -v;
        }
        vectors.set_column(col, &v);
    }
    (values, vectors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::taylor::TaylorCtx;

    #[test]
    fn eigen_sort_pairs_values_with_vectors_under_degeneracy() {
        // conjugate a spectrum with a repeated eigenvalue by a rotation; the
        // sorted vectors must diagonalize the matrix in ascending order
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            -0.6527912098338671,
            -0.13055824196677338,
            0.3916747259003203,
            0.39167472590032043,
        ]));
        let seed = DMatrix::from_fn(4, 4, |i, j| ((3 * i + 5 * j + 1) as f64).sin());
        let q = seed.qr().q();
        let m = &q * d * q.transpose();
        let (vals, w) = sym_eigen_sorted(&m);
        for k in 1..4 {
            assert!(vals[k] >= vals[k - 1]);
        }
        let diag = w.transpose() * &m * &w;
        for k in 0..4 {
            assert!((diag[(k, k)] - vals[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn taylor_inverse_round_trips() {
        let ctx = TaylorCtx::new(2, 4);
        let x = ctx.variable(0, 0.2);
        let y = ctx.variable(1, -0.4);
        let m = vec![
            vec![&x.cos() + 2.0, x.clone() * y.clone()],
            vec![x.sin(), &y.exp() + 1.5],
        ];
        let inv = taylor_mat_inv(&m);
        for i in 0..2 {
            for j in 0..2 {
                let mut acc = ctx.constant(0.0);
                for k in 0..2 {
                    acc = &acc + &m[i][k].mul(&inv[k][j]);
                }
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((acc.value() - expect).abs() < 1e-12);
                assert!(acc.partial(&[1, 0]).abs() < 1e-10);
                assert!(acc.partial(&[0, 1]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn det_of_triangular_is_product_of_diagonal() {
        let ctx = TaylorCtx::new(1, 2);
        let x = ctx.variable(0, 0.5);
        let m = vec![
            vec![x.clone(), ctx.constant(0.0), ctx.constant(0.0)],
            vec![ctx.constant(3.0), &x + 1.0, ctx.constant(0.0)],
            vec![x.sin(), x.cos(), &x * 2.0],
        ];
        let d = taylor_det(&m);
        let expect = (&(&x * (&x + 1.0)) * &(&x * 2.0)).value();
        assert!((d.value() - expect).abs() < 1e-13);
    }
}
