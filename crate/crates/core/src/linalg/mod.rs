//! Dense complex matrix and matrix-polynomial arithmetic, block-Hankel
//! solves, and the hermiticity/positivity/nonsingularity predicates used
//! everywhere else. All tolerances are centralized in [`Tolerance`].

mod cmatrix;
mod dense;
mod poly;

pub use cmatrix::CMatrix;
pub use poly::{
    check_poly_dims, det_not_identically_zero, poly_det_adj, poly_mul, poly_rel_err,
    MatrixPolynomial,
};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Numerical thresholds threaded through every predicate.
#[derive(Clone, Copy, Debug)]
pub struct Tolerance {
    /// Relative threshold.
    pub rel: f64,
    /// Absolute floor.
    pub abs: f64,
    /// Condition-number ceiling for trusted solves.
    pub cond_max: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            rel: 1e-9,
            abs: 1e-12,
            cond_max: 1e10,
        }
    }
}

impl Tolerance {
    /// Combined zero-threshold at a given scale: `max(abs, rel · scale)`.
    pub fn at_scale(&self, scale: f64) -> f64 {
        self.abs.max(self.rel * scale)
    }

    /// Looser threshold used when deciding whether a numerically computed
    /// bracket/residual "is zero" (100× the relative threshold).
    pub fn zero_at_scale(&self, scale: f64) -> f64 {
        self.abs.max(100.0 * self.rel * scale)
    }
}

/// Verdict of [`psd_check`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PsdVerdict {
    PositiveDefinite,
    HermitianIndefinite,
    NonHermitian,
}

/// Classify a matrix as hermitian positive definite, hermitian but not
/// positive definite, or not hermitian. Hermiticity is judged at the
/// matrix's own scale; eigenvalues must clear `tol.at_scale(‖A‖)`.
pub fn psd_check(a: &CMatrix, tol: &Tolerance) -> PsdVerdict {
    let scale = a.norm().max(1.0);
    if a.hermiticity_defect() > tol.at_scale(scale) {
        return PsdVerdict::NonHermitian;
    }
    let (w, _) = a.hermitian_eigen();
    if w.iter().all(|&x| x > tol.at_scale(scale)) {
        PsdVerdict::PositiveDefinite
    } else {
        PsdVerdict::HermitianIndefinite
    }
}

/// Solve the block-row system `X · H = rhs`, where `H` is a p×p grid of
/// m×m blocks and `rhs` a 1×p block row. Flattens to the transposed
/// (m·p)×(m·p) scalar system; the pivot ratio of the elimination is the
/// condition estimate, and exceeding `tol.cond_max` signals a degenerate
/// (numerically singular) block matrix.
pub fn solve_block_row(h: &[Vec<CMatrix>], rhs: &[CMatrix], tol: &Tolerance) -> Result<Vec<CMatrix>> {
    let p = h.len();
    if p == 0 || rhs.len() != p {
        return Err(Error::DimensionMismatch {
            expected: p,
            got: rhs.len(),
        });
    }
    let m = rhs[0].dim();
    let n = m * p;
    // scalar system: H^T Y = rhs^T with Y = X^T (n×m)
    let mut a = vec![Complex64::new(0.0, 0.0); n * n];
    for (bi, row) in h.iter().enumerate() {
        if row.len() != p {
            return Err(Error::DimensionMismatch {
                expected: p,
                got: row.len(),
            });
        }
        for (bj, blk) in row.iter().enumerate() {
            for i in 0..m {
                for j in 0..m {
                    // (H^T)[bj*m + j][bi*m + i] = H[bi*m+i][bj*m+j]
                    a[(bj * m + j) * n + (bi * m + i)] = blk.get(i, j);
                }
            }
        }
    }
    let mut b = vec![Complex64::new(0.0, 0.0); n * m];
    for (bj, blk) in rhs.iter().enumerate() {
        for i in 0..m {
            for j in 0..m {
                b[(bj * m + j) * m + i] = blk.get(i, j);
            }
        }
    }
    dense::lu_solve(n, &mut a, m, &mut b, tol.cond_max)?;
    let mut out = Vec::with_capacity(p);
    for bk in 0..p {
        out.push(CMatrix::from_fn(m, |i, j| b[(bk * m + j) * m + i]));
    }
    Ok(out)
}

/// Assemble the (n+1)×(n+1) block Hankel grid from moments μ_0..μ_2n.
pub fn hankel_blocks(moments: &[CMatrix], n: usize) -> Vec<Vec<CMatrix>> {
    assert!(moments.len() > 2 * n);
    (0..=n)
        .map(|i| (0..=n).map(|j| moments[i + j].clone()).collect())
        .collect()
}

/// Flatten a block grid to one scalar matrix.
pub fn flatten_blocks(blocks: &[Vec<CMatrix>]) -> CMatrix {
    let p = blocks.len();
    let m = blocks[0][0].dim();
    CMatrix::from_fn(p * m, |i, j| blocks[i / m][j / m].get(i % m, j % m))
}

/// Result of a nullspace computation on a scalar system.
pub struct Nullspace {
    /// Orthonormal basis vectors of the (numerical) nullspace, each of
    /// length `cols`.
    pub basis: Vec<Vec<Complex64>>,
    /// All singular values, descending.
    pub singular_values: Vec<f64>,
    /// Separation between the smallest kept and the largest discarded
    /// singular value; infinite when the nullspace is empty or everything
    /// is null.
    pub gap: f64,
}

/// Nullspace of a rows×cols scalar system by one-sided Jacobi SVD, after
/// row equilibration (each row scaled to unit norm, which leaves the
/// nullspace unchanged). The rank cutoff is `rel_cut · σ_max`.
pub fn nullspace(rows: usize, cols: usize, a: &[Complex64], rel_cut: f64) -> Nullspace {
    let mut eq = a.to_vec();
    for r in 0..rows {
        let nrm = dense::fro_norm(&eq[r * cols..(r + 1) * cols]);
        if nrm > 0.0 {
            for j in 0..cols {
                eq[r * cols + j] /= nrm;
            }
        }
    }
    let (sv, v) = dense::svd_onesided(rows, cols, &eq);
    let smax = sv.first().copied().unwrap_or(0.0);
    let cut = smax * rel_cut;
    let rank = sv.iter().filter(|&&s| s > cut).count();
    let basis: Vec<Vec<Complex64>> = (rank..cols)
        .map(|k| (0..cols).map(|r| v[r * cols + k]).collect())
        .collect();
    let gap = if rank == 0 || rank == cols {
        f64::INFINITY
    } else {
        let kept = sv[rank - 1];
        let dropped = sv[rank];
        if dropped == 0.0 {
            f64::INFINITY
        } else {
            kept / dropped
        }
    };
    Nullspace {
        basis,
        singular_values: sv,
        gap,
    }
}

/// Raw scalar solve `A X = B` (A n×n, B n×k, row-major, in place) with
/// the same pivoting and condition policy as the block solves.
pub fn lu_solve_raw(
    n: usize,
    a: &mut [Complex64],
    k: usize,
    b: &mut [Complex64],
    cond_max: f64,
) -> Result<f64> {
    dense::lu_solve(n, a, k, b, cond_max)
}

/// Least-squares solve of `A x ≈ b` (rows×cols, rows ≥ cols not required)
/// via the one-sided Jacobi SVD. Singular values below `rel_cut · σ_max`
/// are treated as zero.
pub fn lstsq(rows: usize, cols: usize, a: &[Complex64], b: &[Complex64], rel_cut: f64) -> Vec<Complex64> {
    let (sv, v) = dense::svd_onesided(rows, cols, a);
    let smax = sv.first().copied().unwrap_or(0.0);
    let mut x = vec![Complex64::new(0.0, 0.0); cols];
    for (k, &s) in sv.iter().enumerate() {
        if s <= smax * rel_cut || s == 0.0 {
            continue;
        }
        // u_k = A v_k / s ; coefficient = (u_k^H b) / s
        let mut uk_h_b = Complex64::new(0.0, 0.0);
        for r in 0..rows {
            let mut av = Complex64::new(0.0, 0.0);
            for c in 0..cols {
                av += a[r * cols + c] * v[c * cols + k];
            }
            uk_h_b += av.conj() * b[r];
        }
        let coeff = uk_h_b / (s * s);
        for c in 0..cols {
            x[c] += v[c * cols + k] * coeff;
        }
    }
    x
}

/// Simultaneous unitary diagonalization of a commuting family of hermitian
/// matrices. Returns `T` with every `T · A · T*` diagonal, or `None` when
/// some pairwise commutator does not vanish at the inputs' scale.
pub fn simultaneous_unitary_diagonalizer(
    mats: &[CMatrix],
    tol: &Tolerance,
) -> Result<Option<CMatrix>> {
    if mats.is_empty() {
        return Err(Error::InvalidParameter("empty matrix family".into()));
    }
    let m = mats[0].dim();
    for a in mats {
        let scale = a.norm().max(1.0);
        if a.hermiticity_defect() > tol.at_scale(scale) {
            return Err(Error::NonHermitianInput);
        }
    }
    for i in 0..mats.len() {
        for j in i + 1..mats.len() {
            let scale = (mats[i].norm() * mats[j].norm()).max(1.0);
            if mats[i].commutator(&mats[j])?.norm() > tol.zero_at_scale(scale) {
                return Ok(None);
            }
        }
    }
    // Recursive refinement: diagonalize the first matrix, then recurse on
    // the remaining family inside each (clustered) eigenspace.
    for cluster_width in [1e-8, 1e-6, 1e-4] {
        let q = refine(mats, cluster_width)?;
        let t = q.adjoint();
        let ok = mats.iter().all(|a| {
            let d = &(&t * a) * &t.adjoint();
            d.offdiag_norm() <= tol.zero_at_scale(a.norm().max(1.0))
        });
        let unitary_defect = (&(&t * &t.adjoint()) - &CMatrix::identity(m)).norm();
        if ok && unitary_defect <= tol.zero_at_scale(1.0) {
            return Ok(Some(t));
        }
    }
    Ok(None)
}

/// Build a unitary Q (columns = joint eigenbasis) for a commuting
/// hermitian family; `width` is the relative eigenvalue clustering width.
fn refine(mats: &[CMatrix], width: f64) -> Result<CMatrix> {
    assert!(!mats.is_empty());
    let m = mats[0].dim();
    if m == 1 {
        return Ok(CMatrix::identity(m));
    }
    let (w, mut q) = mats[0].hermitian_eigen();
    let scale = mats[0].norm().max(1.0);
    if mats.len() == 1 {
        return Ok(q);
    }
    // cluster consecutive (sorted) eigenvalues
    let mut start = 0usize;
    while start < m {
        let mut end = start + 1;
        while end < m && (w[end] - w[end - 1]).abs() <= width * scale {
            end += 1;
        }
        let len = end - start;
        if len > 1 {
            // project the rest of the family onto this eigenspace and recurse
            let sub: Vec<CMatrix> = mats[1..]
                .iter()
                .map(|a| {
                    let aq = a * &q;
                    CMatrix::from_fn(len, |i, j| {
                        let mut s = Complex64::new(0.0, 0.0);
                        for r in 0..m {
                            s += q.get(r, start + i).conj() * aq.get(r, start + j);
                        }
                        s
                    })
                })
                .collect();
            let r = refine(&sub, width)?;
            // q[:, start..end] <- q[:, start..end] * r
            let cols: Vec<Vec<Complex64>> = (0..len)
                .map(|c| {
                    (0..m)
                        .map(|row| {
                            (0..len)
                                .map(|k| q.get(row, start + k) * r.get(k, c))
                                .sum()
                        })
                        .collect()
                })
                .collect();
            for (c, col) in cols.iter().enumerate() {
                for (row, &z) in col.iter().enumerate() {
                    q.set(row, start + c, z);
                }
            }
        }
        start = end;
    }
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn block_row_identity_system() {
        let tol = Tolerance::default();
        let b = CMatrix::from_real(2, &[1.0, 2.0, 3.0, 4.0]);
        let h = vec![vec![CMatrix::identity(2)]];
        let x = solve_block_row(&h, std::slice::from_ref(&b), &tol).unwrap();
        assert!((&x[0] - &b).norm() < 1e-14);
    }

    #[test]
    fn block_row_scalar_hermite_order2() {
        // moments 1, 0, 1/2; system (pi0, pi1) Delta_1 = -(mu2, mu3)
        let tol = Tolerance::default();
        let mu = [c(1.0), c(0.0), c(0.5), c(0.0)];
        let h = vec![
            vec![CMatrix::scalar(1, mu[0]), CMatrix::scalar(1, mu[1])],
            vec![CMatrix::scalar(1, mu[1]), CMatrix::scalar(1, mu[2])],
        ];
        let rhs = vec![
            CMatrix::scalar(1, -mu[2]),
            CMatrix::scalar(1, -mu[3]),
        ];
        let x = solve_block_row(&h, &rhs, &tol).unwrap();
        assert!((x[0].get(0, 0) - c(-0.5)).norm() < 1e-14);
        assert!(x[1].get(0, 0).norm() < 1e-14);
    }

    #[test]
    fn block_row_example2_first_order() {
        // pi_0^(1) = -mu_1 mu_0^{-1} for mu_0 = sqrt(pi) diag(3/2, 1),
        // mu_1 = (sqrt(pi)/2) antidiag(1, 1): gives [[0, -1/2], [-1/3, 0]].
        let tol = Tolerance::default();
        let sq = std::f64::consts::PI.sqrt();
        let mu0 = CMatrix::from_real(2, &[1.5 * sq, 0.0, 0.0, sq]);
        let mu1 = CMatrix::from_real(2, &[0.0, 0.5 * sq, 0.5 * sq, 0.0]);
        let x = solve_block_row(&[vec![mu0]], &[-&mu1], &tol).unwrap();
        let expect = CMatrix::from_real(2, &[0.0, -0.5, -1.0 / 3.0, 0.0]);
        assert!((&x[0] - &expect).norm() < 1e-13);
    }

    #[test]
    fn block_row_detects_singular() {
        let tol = Tolerance::default();
        let h = vec![vec![CMatrix::from_real(2, &[1.0, 0.0, 0.0, 0.0])]];
        let rhs = vec![CMatrix::identity(2)];
        assert!(matches!(
            solve_block_row(&h, &rhs, &tol),
            Err(Error::SingularSystem { .. })
        ));
    }

    #[test]
    fn psd_check_trivials() {
        let tol = Tolerance::default();
        assert_eq!(
            psd_check(&CMatrix::identity(2), &tol),
            PsdVerdict::PositiveDefinite
        );
        assert_eq!(
            psd_check(&CMatrix::from_real(2, &[1.0, 0.0, 0.0, -1.0]), &tol),
            PsdVerdict::HermitianIndefinite
        );
        assert_eq!(
            psd_check(&CMatrix::from_real(2, &[0.0, 1.0, 0.0, 0.0]), &tol),
            PsdVerdict::NonHermitian
        );
    }

    #[test]
    fn simdiag_diagonal_inputs() {
        let tol = Tolerance::default();
        let a = CMatrix::diag(&[c(1.0), c(2.0)]);
        let b = CMatrix::diag(&[c(3.0), c(4.0)]);
        let t = simultaneous_unitary_diagonalizer(&[a.clone(), b.clone()], &tol)
            .unwrap()
            .unwrap();
        for m in [&a, &b] {
            assert!((&(&t * m) * &t.adjoint()).offdiag_norm() < 1e-9);
        }
    }

    #[test]
    fn simdiag_flip_and_identity() {
        let tol = Tolerance::default();
        let flip = CMatrix::from_real(2, &[0.0, 1.0, 1.0, 0.0]);
        let id = CMatrix::identity(2);
        let t = simultaneous_unitary_diagonalizer(&[flip.clone(), id], &tol)
            .unwrap()
            .unwrap();
        assert!((&(&t * &flip) * &t.adjoint()).offdiag_norm() < 1e-9);
        assert!((&(&t * &t.adjoint()) - &CMatrix::identity(2)).norm() < 1e-9);
    }

    #[test]
    fn simdiag_rejects_pauli_pair() {
        let tol = Tolerance::default();
        let x = CMatrix::from_real(2, &[0.0, 1.0, 1.0, 0.0]);
        let z = CMatrix::from_real(2, &[1.0, 0.0, 0.0, -1.0]);
        assert!(simultaneous_unitary_diagonalizer(&[x, z], &tol)
            .unwrap()
            .is_none());
    }

    #[test]
    fn simdiag_rejects_non_hermitian() {
        let tol = Tolerance::default();
        let n = CMatrix::from_real(2, &[0.0, 1.0, 0.0, 0.0]);
        assert!(matches!(
            simultaneous_unitary_diagonalizer(&[n], &tol),
            Err(Error::NonHermitianInput)
        ));
    }

    #[test]
    fn simdiag_degenerate_first_matrix() {
        // identity first, flip second: clustering must recurse
        let tol = Tolerance::default();
        let id = CMatrix::identity(2);
        let flip = CMatrix::from_real(2, &[0.0, 1.0, 1.0, 0.0]);
        let t = simultaneous_unitary_diagonalizer(&[id, flip.clone()], &tol)
            .unwrap()
            .expect("commuting family must diagonalize");
        assert!((&(&t * &flip) * &t.adjoint()).offdiag_norm() < 1e-9);
    }

    #[test]
    fn nullspace_of_rank_deficient_system() {
        // rows: [1, 1, 0], [0, 0, 1] -> null = span{(1, -1, 0)/sqrt2}
        let a = vec![c(1.0), c(1.0), c(0.0), c(0.0), c(0.0), c(1.0)];
        let ns = nullspace(2, 3, &a, 1e-7);
        assert_eq!(ns.basis.len(), 1);
        let v = &ns.basis[0];
        assert!((v[0] + v[1]).norm() < 1e-12 && v[2].norm() < 1e-12);
        assert!(ns.gap > 1e6);
    }

    #[test]
    fn lstsq_consistent_system() {
        let a = vec![c(1.0), c(0.0), c(0.0), c(2.0), c(1.0), c(1.0)];
        // A = [[1,0],[0,2],[1,1]], b = A·(1, -1)
        let b = vec![c(1.0), c(-2.0), c(0.0)];
        let x = lstsq(3, 2, &a, &b, 1e-12);
        assert!((x[0] - c(1.0)).norm() < 1e-12 && (x[1] + c(1.0)).norm() < 1e-12);
    }
}
