//! Square complex matrices of small, dynamically chosen dimension.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use super::dense;
use crate::error::{Error, Result};

/// An m×m complex matrix, row-major. Value-semantic and immutable in
/// spirit: all arithmetic returns fresh matrices.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    dim: usize,
    a: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "dim must be at least 1");
        CMatrix {
            dim,
            a: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.a[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Build from row-major complex entries.
    pub fn from_vec(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                got: entries.len(),
            });
        }
        Ok(CMatrix { dim, a: entries })
    }

    /// Build from real row-major entries (convenience for tests and fixtures).
    pub fn from_real(dim: usize, entries: &[f64]) -> Self {
        assert_eq!(entries.len(), dim * dim);
        CMatrix {
            dim,
            a: entries.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        }
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m.a[i * dim + j] = f(i, j);
            }
        }
        m
    }

    pub fn scalar(dim: usize, z: Complex64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.a[i * dim + i] = z;
        }
        m
    }

    pub fn diag(entries: &[Complex64]) -> Self {
        let mut m = Self::zeros(entries.len());
        for (i, &z) in entries.iter().enumerate() {
            m.a[i * entries.len() + i] = z;
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.a[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, z: Complex64) {
        self.a[i * self.dim + j] = z;
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self.get(j, i).conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self.get(j, i))
    }

    pub fn conj(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self.get(i, j).conj())
    }

    pub fn scale(&self, z: Complex64) -> Self {
        CMatrix {
            dim: self.dim,
            a: self.a.iter().map(|&x| x * z).collect(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn norm(&self) -> f64 {
        dense::fro_norm(&self.a)
    }

    pub fn max_abs(&self) -> f64 {
        self.a.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.a.iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }

    /// ‖A − A*‖ (Frobenius), the hermiticity defect.
    pub fn hermiticity_defect(&self) -> f64 {
        (self - &self.adjoint()).norm()
    }

    pub fn commutator(&self, other: &CMatrix) -> Result<CMatrix> {
        check_dims(self, other)?;
        Ok(&(self * other) - &(other * self))
    }

    /// Frobenius norm of the off-diagonal part.
    pub fn offdiag_norm(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                if i != j {
                    s += self.get(i, j).norm_sqr();
                }
            }
        }
        s.sqrt()
    }

    /// Solve `self · X = B`.
    pub fn solve(&self, b: &CMatrix, cond_max: f64) -> Result<CMatrix> {
        check_dims(self, b)?;
        let n = self.dim;
        let mut a = self.a.clone();
        let mut rhs = b.a.clone();
        dense::lu_solve(n, &mut a, n, &mut rhs, cond_max)?;
        CMatrix::from_vec(n, rhs)
    }

    /// Solve `X · self = B` (via the transposed system).
    pub fn solve_left(&self, b: &CMatrix, cond_max: f64) -> Result<CMatrix> {
        check_dims(self, b)?;
        let xt = self.transpose().solve(&b.transpose(), cond_max)?;
        Ok(xt.transpose())
    }

    pub fn inv(&self, cond_max: f64) -> Result<CMatrix> {
        self.solve(&CMatrix::identity(self.dim), cond_max)
    }

    /// Pivot-ratio condition estimate; infinite when numerically singular.
    pub fn cond_estimate(&self) -> f64 {
        dense::cond_estimate(self.dim, &self.a)
    }

    /// Eigendecomposition of a (numerically) hermitian matrix:
    /// `self ≈ Q · diag(w) · Q*` with unitary `Q`. Eigenvalues ascending.
    pub fn hermitian_eigen(&self) -> (Vec<f64>, CMatrix) {
        let (w, q) = dense::hermitian_eigen(self.dim, &self.a);
        let mut order: Vec<usize> = (0..self.dim).collect();
        order.sort_by(|&i, &j| w[i].partial_cmp(&w[j]).unwrap());
        let ws: Vec<f64> = order.iter().map(|&i| w[i]).collect();
        let qs = CMatrix::from_fn(self.dim, |i, j| q[i * self.dim + order[j]]);
        (ws, qs)
    }

    /// Cholesky factor `L` (lower triangular) of a hermitian positive
    /// definite matrix: `self = L · L*`.
    pub fn cholesky(&self) -> Result<CMatrix> {
        let n = self.dim;
        let mut l = CMatrix::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                let mut s = self.get(i, j);
                for k in 0..j {
                    s -= l.get(i, k) * l.get(j, k).conj();
                }
                if i == j {
                    if s.re <= 0.0 || s.im.abs() > 1e-10 * (1.0 + s.re.abs()) {
                        return Err(Error::HypothesisViolated(
                            "matrix is not positive definite".into(),
                        ));
                    }
                    l.set(i, i, Complex64::new(s.re.sqrt(), 0.0));
                } else {
                    l.set(i, j, s / l.get(j, j));
                }
            }
        }
        Ok(l)
    }
}

pub(crate) fn check_dims(a: &CMatrix, b: &CMatrix) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    Ok(())
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        CMatrix {
            dim: self.dim,
            a: self.a.iter().zip(&rhs.a).map(|(x, y)| x + y).collect(),
        }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        CMatrix {
            dim: self.dim,
            a: self.a.iter().zip(&rhs.a).map(|(x, y)| x - y).collect(),
        }
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let n = self.dim;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let aik = self.a[i * n + k];
                if aik == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out.a[i * n + j] += aik * rhs.a[k * n + j];
                }
            }
        }
        out
    }
}

impl Neg for &CMatrix {
    type Output = CMatrix;
    fn neg(self) -> CMatrix {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.dim, self.dim)?;
        for i in 0..self.dim {
            write!(f, "  ")?;
            for j in 0..self.dim {
                let z = self.get(i, j);
                write!(f, "{:.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adjoint_is_involution() {
        let m = CMatrix::from_fn(3, |i, j| Complex64::new(i as f64, j as f64 - 1.0));
        assert_eq!(m.adjoint().adjoint(), m);
    }

    #[test]
    fn solve_left_matches_right_transposed() {
        let a = CMatrix::from_real(2, &[2.0, 1.0, 0.0, 3.0]);
        let b = CMatrix::from_real(2, &[1.0, 0.0, 0.0, 1.0]);
        let x = a.solve_left(&b, 1e12).unwrap();
        assert!((&(&x * &a) - &b).norm() < 1e-14);
    }

    #[test]
    fn cholesky_roundtrip() {
        let a = CMatrix::from_vec(
            2,
            vec![
                Complex64::new(4.0, 0.0),
                Complex64::new(1.0, 1.0),
                Complex64::new(1.0, -1.0),
                Complex64::new(3.0, 0.0),
            ],
        )
        .unwrap();
        let l = a.cholesky().unwrap();
        assert!((&(&l * &l.adjoint()) - &a).norm() < 1e-13);
    }
}
