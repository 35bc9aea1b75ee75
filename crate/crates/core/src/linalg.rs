//! Small dense-matrix helpers used by explicit-matrix code paths and test
//! oracles. Not meant for large problems.

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    /// Builds a matrix from its columns, each of length `rows`.
    pub fn from_columns(rows: usize, columns: &[Vec<f64>]) -> Self {
        let cols = columns.len();
        let mut m = Self::zeros(rows, cols);
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows, "column {j} has wrong length");
            for (i, &v) in col.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimensions differ");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                let orow = other.row(k);
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(orow) {
                    *d += a * b;
                }
            }
        }
        out
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// A real linear map applied matrix-free, together with its adjoint.
pub trait LinearOperator: Sync {
    /// Length of the input vector.
    fn domain_len(&self) -> usize;
    /// Length of the output vector.
    fn range_len(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]);
    fn adjoint(&self, y: &[f64], x: &mut [f64]);
}

/// Materializes an operator column by column. Only for small test-sized
/// operators.
pub fn dense_from_operator<O: LinearOperator + ?Sized>(op: &O) -> DenseMatrix {
    let n = op.domain_len();
    let m = op.range_len();
    let mut e = vec![0.0; n];
    let mut col = vec![0.0; m];
    let cols: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            e[j] = 1.0;
            op.apply(&e, &mut col);
            e[j] = 0.0;
            col.clone()
        })
        .collect();
    DenseMatrix::from_columns(m, &cols)
}

/// Largest eigenvalue of `AᵀA` by power iteration from a fixed start vector.
pub fn power_iteration<O: LinearOperator + ?Sized>(op: &O, max_iters: usize, rtol: f64) -> f64 {
    let n = op.domain_len();
    // deterministic, non-degenerate start
    let mut v: Vec<f64> = (0..n)
        .map(|i| 1.0 + ((i * 7919) % 97) as f64 / 97.0)
        .collect();
    let nv = norm2(&v);
    v.iter_mut().for_each(|x| *x /= nv);
    let mut av = vec![0.0; op.range_len()];
    let mut w = vec![0.0; n];
    let mut estimate = 0.0;
    for _ in 0..max_iters {
        op.apply(&v, &mut av);
        op.adjoint(&av, &mut w);
        let next = dot(&v, &w);
        let nw = norm2(&w);
        if nw == 0.0 {
            return 0.0;
        }
        for (vi, wi) in v.iter_mut().zip(&w) {
            *vi = wi / nw;
        }
        let done = (next - estimate).abs() <= rtol * next.abs();
        estimate = next;
        if done {
            break;
        }
    }
    estimate
}

/// Spectral norm squared of a dense matrix via power iteration on `MᵀM`,
/// run to tight tolerance. Test oracle for [`power_iteration`].
pub fn dense_spectral_norm_sq(m: &DenseMatrix) -> f64 {
    let gram = m.transpose().matmul(m);
    let n = gram.cols();
    let mut v: Vec<f64> = (0..n).map(|i| ((i as f64) * 0.61803).sin() + 1.5).collect();
    let mut lambda = 0.0;
    for _ in 0..20_000 {
        let w = gram.matvec(&v);
        let nw = norm2(&w);
        if nw == 0.0 {
            return 0.0;
        }
        let next = dot(&v, &w) / dot(&v, &v);
        v = w.iter().map(|x| x / nw).collect();
        if (next - lambda).abs() < 1e-14 * next.abs() {
            return next;
        }
        lambda = next;
    }
    lambda
}
