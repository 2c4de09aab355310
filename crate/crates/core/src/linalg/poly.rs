//! Polynomials with square complex-matrix coefficients.

use num_complex::Complex64;

use super::cmatrix::CMatrix;
use crate::error::{Error, Result};

/// A polynomial `c_0 + c_1 x + … + c_d x^d` with m×m matrix coefficients.
/// Trailing all-zero coefficients are trimmed, so `degree()` is `None`
/// exactly for the zero polynomial.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixPolynomial {
    dim: usize,
    coeffs: Vec<CMatrix>,
}

impl MatrixPolynomial {
    pub fn zero(dim: usize) -> Self {
        MatrixPolynomial { dim, coeffs: vec![] }
    }

    /// The constant polynomial `I`.
    pub fn identity(dim: usize) -> Self {
        MatrixPolynomial {
            dim,
            coeffs: vec![CMatrix::identity(dim)],
        }
    }

    pub fn constant(c: CMatrix) -> Self {
        Self::from_coeffs(c.dim(), vec![c]).unwrap()
    }

    /// `z · x^k · I`.
    pub fn scalar_monomial(dim: usize, k: usize, z: Complex64) -> Self {
        let mut coeffs = vec![CMatrix::zeros(dim); k + 1];
        coeffs[k] = CMatrix::scalar(dim, z);
        Self::from_coeffs(dim, coeffs).unwrap()
    }

    /// Scalar (dim-1) polynomial from complex coefficients, low to high.
    pub fn scalar_poly(coeffs: &[Complex64]) -> Self {
        let cs = coeffs
            .iter()
            .map(|&z| CMatrix::scalar(1, z))
            .collect::<Vec<_>>();
        Self::from_coeffs(1, cs).unwrap()
    }

    pub fn from_coeffs(dim: usize, coeffs: Vec<CMatrix>) -> Result<Self> {
        for c in &coeffs {
            if c.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: c.dim(),
                });
            }
        }
        let mut p = MatrixPolynomial { dim, coeffs };
        p.trim();
        Ok(p)
    }

    fn trim(&mut self) {
        while matches!(self.coeffs.last(), Some(c) if c.is_zero()) {
            self.coeffs.pop();
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Degree of the stored representation; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    /// Coefficient of `x^k`, zero-padded beyond the stored degree.
    pub fn coeff(&self, k: usize) -> CMatrix {
        self.coeffs
            .get(k)
            .cloned()
            .unwrap_or_else(|| CMatrix::zeros(self.dim))
    }

    pub fn coeffs(&self) -> &[CMatrix] {
        &self.coeffs
    }

    pub fn leading(&self) -> Option<&CMatrix> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: Complex64) -> CMatrix {
        let mut acc = CMatrix::zeros(self.dim);
        for c in self.coeffs.iter().rev() {
            acc = &acc.scale(x) + c;
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero(self.dim);
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c.scale(Complex64::new(k as f64, 0.0)))
            .collect();
        Self::from_coeffs(self.dim, coeffs).unwrap()
    }

    /// `P*(x) = Σ c_k^* x^k` (coefficient-wise adjoint).
    pub fn star(&self) -> Self {
        Self::from_coeffs(self.dim, self.coeffs.iter().map(|c| c.adjoint()).collect()).unwrap()
    }

    pub fn scale(&self, z: Complex64) -> Self {
        Self::from_coeffs(self.dim, self.coeffs.iter().map(|c| c.scale(z)).collect()).unwrap()
    }

    /// Left-multiply every coefficient: `A · P`.
    pub fn mul_matrix_left(&self, a: &CMatrix) -> Result<Self> {
        if a.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: a.dim(),
            });
        }
        Self::from_coeffs(self.dim, self.coeffs.iter().map(|c| a * c).collect())
    }

    /// Right-multiply every coefficient: `P · A`.
    pub fn mul_matrix_right(&self, a: &CMatrix) -> Result<Self> {
        if a.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: a.dim(),
            });
        }
        Self::from_coeffs(self.dim, self.coeffs.iter().map(|c| c * a).collect())
    }

    /// Multiply by `x^k`.
    pub fn shift(&self, k: usize) -> Self {
        if self.coeffs.is_empty() {
            return self.clone();
        }
        let mut coeffs = vec![CMatrix::zeros(self.dim); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Self::from_coeffs(self.dim, coeffs).unwrap()
    }

    /// Multiply by a scalar polynomial (a dim-1 `MatrixPolynomial`), which
    /// commutes with the matrix coefficients.
    pub fn mul_scalar_poly(&self, alpha: &MatrixPolynomial) -> Result<Self> {
        if alpha.dim() != 1 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                got: alpha.dim(),
            });
        }
        if self.coeffs.is_empty() || alpha.coeffs.is_empty() {
            return Ok(Self::zero(self.dim));
        }
        let mut out = vec![CMatrix::zeros(self.dim); self.coeffs.len() + alpha.coeffs.len() - 1];
        for (i, ai) in alpha.coeffs.iter().enumerate() {
            let z = ai.get(0, 0);
            for (j, cj) in self.coeffs.iter().enumerate() {
                out[i + j] = &out[i + j] + &cj.scale(z);
            }
        }
        Self::from_coeffs(self.dim, out)
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        if self.dim != rhs.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: rhs.dim,
            });
        }
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n).map(|k| &self.coeff(k) + &rhs.coeff(k)).collect();
        Self::from_coeffs(self.dim, coeffs)
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.add(&rhs.scale(Complex64::new(-1.0, 0.0)))
    }

    /// Largest coefficient Frobenius norm; the natural scale of the polynomial.
    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Max-norm over trailing coefficients, used for degree decisions on
    /// numerically computed polynomials.
    pub fn effective_degree(&self, floor: f64) -> Option<usize> {
        (0..self.coeffs.len())
            .rev()
            .find(|&k| self.coeffs[k].norm() > floor)
    }
}

/// Matrix-polynomial product; coefficient `k` is `Σ_{i+j=k} a_i · b_j`
/// with A's coefficients on the left.
pub fn poly_mul(a: &MatrixPolynomial, b: &MatrixPolynomial) -> Result<MatrixPolynomial> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch {
            expected: a.dim,
            got: b.dim,
        });
    }
    if a.coeffs.is_empty() || b.coeffs.is_empty() {
        return Ok(MatrixPolynomial::zero(a.dim));
    }
    let mut out = vec![CMatrix::zeros(a.dim); a.coeffs.len() + b.coeffs.len() - 1];
    for (i, ai) in a.coeffs.iter().enumerate() {
        for (j, bj) in b.coeffs.iter().enumerate() {
            out[i + j] = &out[i + j] + &(ai * bj);
        }
    }
    MatrixPolynomial::from_coeffs(a.dim, out)
}

// scalar polynomial helpers over Vec<Complex64>
fn sp_trim(p: &mut Vec<Complex64>) {
    while matches!(p.last(), Some(z) if z.re == 0.0 && z.im == 0.0) {
        p.pop();
    }
}

fn sp_add(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let n = a.len().max(b.len());
    let z = Complex64::new(0.0, 0.0);
    let mut out: Vec<Complex64> = (0..n)
        .map(|k| a.get(k).copied().unwrap_or(z) + b.get(k).copied().unwrap_or(z))
        .collect();
    sp_trim(&mut out);
    out
}

fn sp_mul(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![Complex64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    sp_trim(&mut out);
    out
}

fn sp_scale(a: &[Complex64], z: Complex64) -> Vec<Complex64> {
    let mut out: Vec<Complex64> = a.iter().map(|&x| x * z).collect();
    sp_trim(&mut out);
    out
}

/// Determinant of the scalar-polynomial matrix `e` (m×m of coefficient vectors)
/// by cofactor expansion down the first column.
fn sp_det(e: &[Vec<Vec<Complex64>>]) -> Vec<Complex64> {
    let m = e.len();
    if m == 1 {
        return e[0][0].clone();
    }
    let mut det: Vec<Complex64> = vec![];
    for i in 0..m {
        if e[i][0].is_empty() {
            continue;
        }
        let minor: Vec<Vec<Vec<Complex64>>> = (0..m)
            .filter(|&r| r != i)
            .map(|r| (1..m).map(|c| e[r][c].clone()).collect())
            .collect();
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        let term = sp_scale(&sp_mul(&e[i][0], &sp_det(&minor)), Complex64::new(sign, 0.0));
        det = sp_add(&det, &term);
    }
    det
}

/// Determinant (as a dim-1 `MatrixPolynomial`) and adjugate over the
/// polynomial ring, so that `P · adj = adj · P = det · I`.
/// For m = 1 the adjugate is the constant identity.
#[allow(clippy::needless_range_loop)]
pub fn poly_det_adj(p: &MatrixPolynomial) -> (MatrixPolynomial, MatrixPolynomial) {
    let m = p.dim();
    // entries as scalar coefficient vectors
    let entry = |i: usize, j: usize| -> Vec<Complex64> {
        let mut v: Vec<Complex64> = p.coeffs().iter().map(|c| c.get(i, j)).collect();
        sp_trim(&mut v);
        v
    };
    if m == 1 {
        let det = MatrixPolynomial::scalar_poly(&entry(0, 0));
        return (det, MatrixPolynomial::identity(1));
    }
    let e: Vec<Vec<Vec<Complex64>>> = (0..m)
        .map(|i| (0..m).map(|j| entry(i, j)).collect())
        .collect();
    let det = MatrixPolynomial::scalar_poly(&sp_det(&e));
    // adj_{ij} = (-1)^{i+j} det(minor with row j, column i removed)
    let mut max_deg = 0usize;
    let mut adj_entries: Vec<Vec<Vec<Complex64>>> = vec![vec![vec![]; m]; m];
    for i in 0..m {
        for j in 0..m {
            let minor: Vec<Vec<Vec<Complex64>>> = (0..m)
                .filter(|&r| r != j)
                .map(|r| {
                    (0..m)
                        .filter(|&c| c != i)
                        .map(|c| e[r][c].clone())
                        .collect()
                })
                .collect();
            let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            let v = sp_scale(&sp_det(&minor), Complex64::new(sign, 0.0));
            max_deg = max_deg.max(v.len());
            adj_entries[i][j] = v;
        }
    }
    let zero = Complex64::new(0.0, 0.0);
    let coeffs: Vec<CMatrix> = (0..max_deg.max(1))
        .map(|k| {
            CMatrix::from_fn(m, |i, j| adj_entries[i][j].get(k).copied().unwrap_or(zero))
        })
        .collect();
    let adj = MatrixPolynomial::from_coeffs(m, coeffs).unwrap();
    (det, adj)
}

/// Relative coefficient-wise distance between two polynomials.
pub fn poly_rel_err(a: &MatrixPolynomial, b: &MatrixPolynomial) -> f64 {
    let scale = a.norm().max(b.norm());
    if scale == 0.0 {
        return 0.0;
    }
    a.sub(b).map(|d| d.norm() / scale).unwrap_or(f64::INFINITY)
}

/// `true` when the determinant polynomial is not identically zero, judged
/// relative to the coefficient scale of `p`.
pub fn det_not_identically_zero(p: &MatrixPolynomial, rel: f64) -> bool {
    let (det, _) = poly_det_adj(p);
    let scale = p.norm().powi(p.dim() as i32).max(f64::MIN_POSITIVE);
    det.norm() > rel * scale
}

pub fn check_poly_dims(a: &MatrixPolynomial, b: &MatrixPolynomial) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    Ok(())
}
