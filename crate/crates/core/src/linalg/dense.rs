//! Raw dense kernels over `Complex64` slices (row-major). Internal to `linalg`.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub(crate) type C = Complex64;

#[inline]
pub(crate) fn cz() -> C {
    C::new(0.0, 0.0)
}

/// Frobenius norm of a row-major buffer.
pub(crate) fn fro_norm(a: &[C]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Solve `A X = B` in place, `A` n×n, `B` n×k, both row-major.
///
/// Gaussian elimination with partial pivoting (pivot search down the
/// current column). Returns the pivot-ratio condition estimate
/// max|pivot|/min|pivot|. Fails with `SingularSystem` when a pivot
/// underflows or the estimate exceeds `cond_max`.
pub(crate) fn lu_solve(
    n: usize,
    a: &mut [C],
    k: usize,
    b: &mut [C],
    cond_max: f64,
) -> Result<f64> {
    debug_assert_eq!(a.len(), n * n);
    debug_assert_eq!(b.len(), n * k);
    let mut max_piv: f64 = 0.0;
    let mut min_piv = f64::INFINITY;
    for col in 0..n {
        // pivot: largest magnitude in this column at or below the diagonal
        let mut p = col;
        let mut best = a[col * n + col].norm();
        for r in col + 1..n {
            let v = a[r * n + col].norm();
            if v > best {
                best = v;
                p = r;
            }
        }
        if best < f64::MIN_POSITIVE * 16.0 {
            return Err(Error::SingularSystem { cond: f64::INFINITY });
        }
        if p != col {
            for j in 0..n {
                a.swap(col * n + j, p * n + j);
            }
            for j in 0..k {
                b.swap(col * k + j, p * k + j);
            }
        }
        max_piv = max_piv.max(best);
        min_piv = min_piv.min(best);
        let piv = a[col * n + col];
        for r in col + 1..n {
            let f = a[r * n + col] / piv;
            if f == cz() {
                continue;
            }
            a[r * n + col] = cz();
            for j in col + 1..n {
                let t = a[col * n + j];
                a[r * n + j] -= f * t;
            }
            for j in 0..k {
                let t = b[col * k + j];
                b[r * k + j] -= f * t;
            }
        }
    }
    let cond = max_piv / min_piv;
    if cond > cond_max {
        return Err(Error::SingularSystem { cond });
    }
    // back substitution
    for col in (0..n).rev() {
        let piv = a[col * n + col];
        for j in 0..k {
            let mut s = b[col * k + j];
            for r in col + 1..n {
                s -= a[col * n + r] * b[r * k + j];
            }
            b[col * k + j] = s / piv;
        }
    }
    Ok(cond)
}

/// Non-destructive condition estimate of a square matrix via the pivot
/// ratio of its elimination. Infinite for numerically singular input.
pub(crate) fn cond_estimate(n: usize, a: &[C]) -> f64 {
    let mut work = a.to_vec();
    let mut rhs: Vec<C> = Vec::new();
    lu_solve(n, &mut work, 0, &mut rhs, f64::INFINITY).unwrap_or(f64::INFINITY)
}

/// Jacobi rotation diagonalizing the hermitian 2×2 block [[app, apq], [conj(apq), aqq]].
/// Returns (c, s, phase) for the unitary [[c, -s*e^{i b}], [s*e^{-i b}, c]].
fn jacobi_rot(app: f64, aqq: f64, apq: C) -> (f64, f64, C) {
    let norm = apq.norm();
    let phase = apq / norm;
    let theta = 0.5 * (2.0 * norm).atan2(app - aqq);
    (theta.cos(), theta.sin(), phase)
}

/// Eigendecomposition of a hermitian matrix by the cyclic complex Jacobi
/// method: `A = Q diag(w) Q^H` with `Q` unitary. The input is symmetrized
/// first; eigenvalues are returned unsorted.
pub(crate) fn hermitian_eigen(n: usize, a: &[C]) -> (Vec<f64>, Vec<C>) {
    let mut m: Vec<C> = vec![cz(); n * n];
    for i in 0..n {
        for j in 0..n {
            m[i * n + j] = 0.5 * (a[i * n + j] + a[j * n + i].conj());
        }
    }
    let mut q: Vec<C> = vec![cz(); n * n];
    for i in 0..n {
        q[i * n + i] = C::new(1.0, 0.0);
    }
    let scale = fro_norm(&m).max(f64::MIN_POSITIVE);
    for _sweep in 0..64 {
        let mut off = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    off += m[i * n + j].norm_sqr();
                }
            }
        }
        if off.sqrt() <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for r in p + 1..n {
                let apq = m[p * n + r];
                if apq.norm() <= 1e-18 * scale {
                    continue;
                }
                let (c, s, ph) = jacobi_rot(m[p * n + p].re, m[r * n + r].re, apq);
                // column update: M <- M U, Q <- Q U
                for i in 0..n {
                    let mp = m[i * n + p];
                    let mr = m[i * n + r];
                    m[i * n + p] = c * mp + s * ph.conj() * mr;
                    m[i * n + r] = -s * ph * mp + c * mr;
                    let qp = q[i * n + p];
                    let qr = q[i * n + r];
                    q[i * n + p] = c * qp + s * ph.conj() * qr;
                    q[i * n + r] = -s * ph * qp + c * qr;
                }
                // row update: M <- U^H M
                for j in 0..n {
                    let mp = m[p * n + j];
                    let mr = m[r * n + j];
                    m[p * n + j] = c * mp + s * ph * mr;
                    m[r * n + j] = -s * ph.conj() * mp + c * mr;
                }
            }
        }
    }
    let w: Vec<f64> = (0..n).map(|i| m[i * n + i].re).collect();
    (w, q)
}

/// One-sided Jacobi SVD of a `rows`×`cols` matrix: returns singular values
/// (descending) and the unitary `V` of right singular vectors, so that the
/// columns of `V` matching tiny singular values span the nullspace.
///
/// Small singular values come out with high relative accuracy, which is
/// what the nullspace gap certificates rely on.
pub(crate) fn svd_onesided(rows: usize, cols: usize, a: &[C]) -> (Vec<f64>, Vec<C>) {
    let mut w = a.to_vec();
    let mut v: Vec<C> = vec![cz(); cols * cols];
    for i in 0..cols {
        v[i * cols + i] = C::new(1.0, 0.0);
    }
    let col_dot = |w: &[C], i: usize, j: usize| -> C {
        let mut s = cz();
        for r in 0..rows {
            s += w[r * cols + i].conj() * w[r * cols + j];
        }
        s
    };
    for _sweep in 0..64 {
        let mut rotated = false;
        for i in 0..cols {
            for j in i + 1..cols {
                let alpha = col_dot(&w, i, i).re;
                let beta = col_dot(&w, j, j).re;
                let gamma = col_dot(&w, i, j);
                if gamma.norm() <= 1e-15 * (alpha * beta).sqrt() || gamma.norm() == 0.0 {
                    continue;
                }
                rotated = true;
                let (c, s, ph) = jacobi_rot(alpha, beta, gamma);
                for r in 0..rows {
                    let wi = w[r * cols + i];
                    let wj = w[r * cols + j];
                    w[r * cols + i] = c * wi + s * ph.conj() * wj;
                    w[r * cols + j] = -s * ph * wi + c * wj;
                }
                for r in 0..cols {
                    let vi = v[r * cols + i];
                    let vj = v[r * cols + j];
                    v[r * cols + i] = c * vi + s * ph.conj() * vj;
                    v[r * cols + j] = -s * ph * vi + c * vj;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<(f64, usize)> = (0..cols)
        .map(|i| (col_dot(&w, i, i).re.max(0.0).sqrt(), i))
        .collect();
    sv.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    let mut vperm = vec![cz(); cols * cols];
    for (newcol, &(_, oldcol)) in sv.iter().enumerate() {
        for r in 0..cols {
            vperm[r * cols + newcol] = v[r * cols + oldcol];
        }
    }
    (sv.into_iter().map(|(s, _)| s).collect(), vperm)
}
