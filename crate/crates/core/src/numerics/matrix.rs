use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense square complex matrix, row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Zero matrix of dimension `n >= 1`.
    pub fn zeros(n: usize) -> Self {
        assert!(n >= 1, "matrix dimension must be at least 1");
        ComplexMatrix {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = ComplexMatrix::zeros(n);
        for i in 0..n {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    /// Build from a slice of rows; every row must have the same length as
    /// the number of rows.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::Input("matrix must have dimension >= 1".into()));
        }
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::Input(format!(
                    "row length {} does not match dimension {}",
                    row.len(),
                    n
                )));
            }
            data.extend_from_slice(row);
        }
        Ok(ComplexMatrix { n, data })
    }

    pub fn from_diag(diag: &[Complex64]) -> Result<Self> {
        let mut m = ComplexMatrix::zeros(diag.len().max(1));
        if diag.is_empty() {
            return Err(Error::Input("matrix must have dimension >= 1".into()));
        }
        for (i, &d) in diag.iter().enumerate() {
            m.set(i, i, d);
        }
        Ok(m)
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = ComplexMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.n + j] = v;
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|c| c.is_finite())
    }

    /// Errors with `Error::Input` if any entry is NaN or infinite.
    pub fn ensure_finite(&self) -> Result<()> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(Error::Input("matrix has non-finite entries".into()))
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn add(&self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.n, other.n);
        ComplexMatrix {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.n, other.n);
        ComplexMatrix {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, s: Complex64) -> ComplexMatrix {
        ComplexMatrix {
            n: self.n,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    pub fn matmul(&self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.n);
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    /// Maximum absolute column sum.
    pub fn one_norm(&self) -> f64 {
        (0..self.n)
            .map(|j| (0..self.n).map(|i| self.get(i, j).norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Solve A X = B by Gaussian elimination with partial pivoting.
    pub fn solve_matrix(&self, rhs: &ComplexMatrix) -> Result<ComplexMatrix> {
        assert_eq!(self.n, rhs.n);
        let n = self.n;
        let mut a = self.data.clone();
        let mut b = rhs.data.clone();
        let tiny = f64::EPSILON * self.one_norm().max(f64::MIN_POSITIVE) * 1e-3;
        for col in 0..n {
            let mut piv = col;
            let mut best = a[col * n + col].norm_sqr();
            for r in (col + 1)..n {
                let v = a[r * n + col].norm_sqr();
                if v > best {
                    best = v;
                    piv = r;
                }
            }
            if best.sqrt() < tiny {
                return Err(Error::Numeric(
                    "linear solve failed: matrix is singular to working precision".into(),
                ));
            }
            if piv != col {
                for j in 0..n {
                    a.swap(col * n + j, piv * n + j);
                    b.swap(col * n + j, piv * n + j);
                }
            }
            let p = a[col * n + col];
            for r in 0..n {
                if r == col {
                    continue;
                }
                let factor = a[r * n + col] / p;
                if factor == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in col..n {
                    let v = a[col * n + j] * factor;
                    a[r * n + j] -= v;
                }
                for j in 0..n {
                    let v = b[col * n + j] * factor;
                    b[r * n + j] -= v;
                }
            }
        }
        let mut x = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            let p = a[i * n + i];
            for j in 0..n {
                x[i * n + j] = b[i * n + j] / p;
            }
        }
        Ok(ComplexMatrix { n, data: x })
    }

    pub fn inverse(&self) -> Result<ComplexMatrix> {
        self.solve_matrix(&ComplexMatrix::identity(self.n))
    }

    /// Solve A x = b with partial pivoting, replacing near-zero pivots by
    /// `floor` instead of failing. Used by inverse iteration, where an
    /// (almost) exactly singular A is the interesting case.
    pub fn solve_vec_floored(&self, b: &[Complex64], floor: f64) -> Vec<Complex64> {
        assert_eq!(b.len(), self.n);
        let n = self.n;
        let mut a = self.data.clone();
        let mut x: Vec<Complex64> = b.to_vec();
        for col in 0..n {
            let mut piv = col;
            let mut best = a[col * n + col].norm_sqr();
            for r in (col + 1)..n {
                let v = a[r * n + col].norm_sqr();
                if v > best {
                    best = v;
                    piv = r;
                }
            }
            if piv != col {
                for j in 0..n {
                    a.swap(col * n + j, piv * n + j);
                }
                x.swap(col, piv);
            }
            if a[col * n + col].norm() < floor {
                a[col * n + col] = Complex64::new(floor, 0.0);
            }
            let p = a[col * n + col];
            for r in (col + 1)..n {
                let factor = a[r * n + col] / p;
                if factor == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in col..n {
                    let v = a[col * n + j] * factor;
                    a[r * n + j] -= v;
                }
                let v = x[col] * factor;
                x[r] -= v;
            }
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in (i + 1)..n {
                s -= a[i * n + j] * x[j];
            }
            x[i] = s / a[i * n + i];
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn matmul_identity() {
        let m = ComplexMatrix::from_rows(&[
            vec![c(1.0, 2.0), c(0.5, 0.0)],
            vec![c(0.0, -1.0), c(3.0, 0.0)],
        ])
        .unwrap();
        let id = ComplexMatrix::identity(2);
        assert_eq!(m.matmul(&id), m);
        assert_eq!(id.matmul(&m), m);
    }

    #[test]
    fn solve_recovers_known_solution() {
        let a = ComplexMatrix::from_rows(&[
            vec![c(2.0, 1.0), c(1.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(1.0, -1.0), c(2.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, 0.0), c(1.0, 1.0)],
        ])
        .unwrap();
        let x_true = ComplexMatrix::from_rows(&[
            vec![c(1.0, 0.0), c(0.0, 1.0), c(2.0, 0.0)],
            vec![c(0.0, 0.0), c(1.0, 1.0), c(-1.0, 0.0)],
            vec![c(3.0, -1.0), c(0.5, 0.0), c(0.0, 2.0)],
        ])
        .unwrap();
        let b = a.matmul(&x_true);
        let x = a.solve_matrix(&b).unwrap();
        let err = x.sub(&x_true).max_abs();
        assert!(err < 1e-13, "solve error {err}");
    }

    #[test]
    fn inverse_times_self_is_identity() {
        let a = ComplexMatrix::from_rows(&[
            vec![c(1.0, 0.5), c(2.0, 0.0)],
            vec![c(-1.0, 0.0), c(0.0, 3.0)],
        ])
        .unwrap();
        let inv = a.inverse().unwrap();
        let err = a.matmul(&inv).sub(&ComplexMatrix::identity(2)).max_abs();
        assert!(err < 1e-14);
    }

    #[test]
    fn singular_solve_errors() {
        let a = ComplexMatrix::from_rows(&[
            vec![c(1.0, 0.0), c(2.0, 0.0)],
            vec![c(2.0, 0.0), c(4.0, 0.0)],
        ])
        .unwrap();
        assert!(a.solve_matrix(&ComplexMatrix::identity(2)).is_err());
    }

    #[test]
    fn one_norm_is_max_column_sum() {
        let a = ComplexMatrix::from_rows(&[
            vec![c(1.0, 0.0), c(0.0, -2.0)],
            vec![c(0.0, 3.0), c(1.0, 0.0)],
        ])
        .unwrap();
        assert!((a.one_norm() - 4.0).abs() < 1e-15);
    }

    #[test]
    fn non_finite_detected() {
        let mut a = ComplexMatrix::identity(2);
        a.set(0, 1, c(f64::NAN, 0.0));
        assert!(a.ensure_finite().is_err());
    }
}
