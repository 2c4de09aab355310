//! Monic matrix orthogonal polynomial segments from Hankel solves: norms
//! `E_n`, subleading coefficients `π_n`, the three-term recurrence, the
//! Favard roundtrip, derivative segments, and the ladder machinery that
//! connects `P_n` with `P'_{n−1}, P'_n, P'_{n+1}`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::functional::{bracket_shifted, Functional, PearsonSpec};
use crate::linalg::{lstsq, poly_mul, solve_block_row, CMatrix, MatrixPolynomial, Tolerance};

fn cr(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Why a segment stopped before the requested degree.
#[derive(Clone, Debug)]
pub struct Horizon {
    /// First order k with Δ_k numerically singular.
    pub blocked_at: usize,
    /// The extra monic polynomial of degree `blocked_at`, orthogonal to
    /// everything below it; it exists even though its norm is singular.
    pub extra: Option<MatrixPolynomial>,
}

/// A finite segment `P_0..P_N` of monic MOP with the data hanging off it.
#[derive(Clone, Debug)]
pub struct MonicSegment {
    dim: usize,
    /// Monic polynomials, `polys[k]` of degree k.
    pub polys: Vec<MatrixPolynomial>,
    /// Norms `E_k = ⟨x^k P_k, u⟩`, nonsingular for every stored k.
    pub e: Vec<CMatrix>,
    /// Subleading coefficients `π_k` (coefficient of `x^{k−1}`), `π_0 = 0`.
    pub pi: Vec<CMatrix>,
    /// Set when the segment is maximal (some Δ_k was singular).
    pub horizon: Option<Horizon>,
}

impl MonicSegment {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Largest stored polynomial degree.
    pub fn max_degree(&self) -> usize {
        self.polys.len().saturating_sub(1)
    }

    pub fn is_maximal(&self) -> bool {
        self.horizon.is_some()
    }
}

/// Recurrence coefficients of `xP_k = P_{k+1} + β_k P_k + γ_k P_{k−1}`:
/// `beta[k] = β_k` for `k = 0..N−1`, `gamma[k] = γ_{k+1}` for `k = 0..N−1`
/// (i.e. γ_1..γ_N).
#[derive(Clone, Debug)]
pub struct RecurrenceCoefficients {
    pub beta: Vec<CMatrix>,
    pub gamma: Vec<CMatrix>,
    /// Worst relative residual of the recurrence over the segment.
    pub residual: f64,
}

/// Coefficients of `P_n = (1/(n+1)) P'_{n+1} + a_n P'_n + b_n P'_{n−1}`,
/// with `a_0 = b_0 = b_1 = 0` by convention (`P'_0 = 0`).
#[derive(Clone, Debug)]
pub struct LadderCoefficients {
    pub a: Vec<CMatrix>,
    pub b: Vec<CMatrix>,
    /// `γ_n − b_n` nonsingular for each stored n ≥ 1 (index 0 trivially true).
    pub gamma_minus_b_nonsingular: Vec<bool>,
    /// Worst relative polynomial residual of the defining relation.
    pub residual: f64,
}

/// Compute the unique monic segment `P_0..P_N` for `u`, solving the row
/// system `(π_0 … π_{k−1}) Δ_{k−1} = −(μ_k … μ_{2k−1})` degree by degree.
/// A singular Δ_k ends the segment early (maximal segment) instead of
/// failing; only a blocked moment recurrence is an error.
pub fn compute_segment(u: &Functional, n_max: usize, tol: &Tolerance) -> Result<MonicSegment> {
    let dim = u.dim();
    let mut polys: Vec<MatrixPolynomial> = Vec::with_capacity(n_max + 1);
    let mut e: Vec<CMatrix> = Vec::new();
    let mut pi: Vec<CMatrix> = Vec::new();
    let mut horizon = None;

    for k in 0..=n_max {
        let poly = if k == 0 {
            MatrixPolynomial::identity(dim)
        } else {
            let moments = u.moments(2 * k - 1)?;
            let h: Vec<Vec<CMatrix>> = (0..k)
                .map(|i| (0..k).map(|j| moments[i + j].clone()).collect())
                .collect();
            let rhs: Vec<CMatrix> = (0..k).map(|j| -&moments[k + j]).collect();
            match solve_block_row(&h, &rhs, tol) {
                Ok(mut coeffs) => {
                    coeffs.push(CMatrix::identity(dim));
                    MatrixPolynomial::from_coeffs(dim, coeffs)?
                }
                Err(Error::SingularSystem { .. }) => {
                    // borderline conditioning of Delta_{k-1}: stop without
                    // the extra polynomial
                    horizon = Some(Horizon {
                        blocked_at: k,
                        extra: None,
                    });
                    break;
                }
                Err(other) => return Err(other),
            }
        };
        // E_k = <x^k P_k, u>; a singular E_k means Delta_k is singular
        let ek = bracket_shifted(k, &poly, u)?;
        let scale = u.moment(2 * k)?.norm().max(1.0);
        if ek.norm() <= tol.at_scale(scale) || ek.cond_estimate() > tol.cond_max {
            horizon = Some(Horizon {
                blocked_at: k,
                extra: Some(poly),
            });
            break;
        }
        pi.push(if k == 0 {
            CMatrix::zeros(dim)
        } else {
            poly.coeff(k - 1)
        });
        e.push(ek);
        polys.push(poly);
    }
    Ok(MonicSegment {
        dim,
        polys,
        e,
        pi,
        horizon,
    })
}

/// Max relative orthogonality defect `‖⟨x^j P_k, u⟩‖ / ‖E_k‖` over `j < k`.
pub fn orthogonality_residual(seg: &MonicSegment, u: &Functional) -> Result<f64> {
    let mut worst = 0.0_f64;
    for (k, p) in seg.polys.iter().enumerate() {
        let scale = seg.e[k].norm();
        for j in 0..k {
            let b = bracket_shifted(j, p, u)?;
            worst = worst.max(b.norm() / scale);
        }
    }
    Ok(worst)
}

/// `β_k = π_k − π_{k+1}`, `γ_k = E_k E_{k−1}^{−1}`, with the three-term
/// recurrence residual verified polynomially.
pub fn recurrence_coefficients(
    seg: &MonicSegment,
    tol: &Tolerance,
) -> Result<RecurrenceCoefficients> {
    let n = seg.polys.len();
    if n < 2 {
        return Err(Error::InvalidParameter(
            "segment must contain at least P_0, P_1".into(),
        ));
    }
    let beta: Vec<CMatrix> = (0..n - 1).map(|k| &seg.pi[k] - &seg.pi[k + 1]).collect();
    let gamma: Vec<CMatrix> = (1..n)
        .map(|k| seg.e[k - 1].solve_left(&seg.e[k], tol.cond_max))
        .collect::<Result<_>>()?;
    let mut residual = 0.0_f64;
    for k in 0..n - 1 {
        let xp = seg.polys[k].shift(1);
        let mut r = xp.sub(&seg.polys[k + 1])?;
        r = r.sub(&seg.polys[k].mul_matrix_left(&beta[k])?)?;
        if k >= 1 {
            r = r.sub(&seg.polys[k - 1].mul_matrix_left(&gamma[k - 1])?)?;
        }
        residual = residual.max(r.norm() / seg.polys[k + 1].norm().max(1.0));
    }
    Ok(RecurrenceCoefficients {
        beta,
        gamma,
        residual,
    })
}

/// Rebuild the moment sequence `μ_0..μ_{2N}` from recurrence coefficients
/// (`beta` = β_0..β_{N−1}, `gamma` = γ_1..γ_N) and `μ_0`, by expanding
/// `xⁿI` in the monic polynomial basis the recurrence defines; then
/// `μ_n = c_{n,0} μ_0`.
pub fn favard_roundtrip(
    beta: &[CMatrix],
    gamma: &[CMatrix],
    mu0: &CMatrix,
    tol: &Tolerance,
) -> Result<Functional> {
    let dim = mu0.dim();
    let nb = beta.len();
    if gamma.len() != nb {
        return Err(Error::InvalidRecurrence(format!(
            "need as many gamma ({}) as beta ({}) coefficients",
            gamma.len(),
            nb
        )));
    }
    for (k, g) in gamma.iter().enumerate() {
        if g.cond_estimate() > tol.cond_max {
            return Err(Error::InvalidRecurrence(format!(
                "gamma_{} is singular",
                k + 1
            )));
        }
    }
    // c[k] = left coefficient of P_k in x^n I; heights capped at nb, which
    // keeps mu_0..mu_{2 nb} exact (paths through higher degrees would need
    // at least 2 nb + 1 steps).
    let kmax = nb + 1;
    let mut c: Vec<CMatrix> = vec![CMatrix::zeros(dim); kmax];
    c[0] = CMatrix::identity(dim);
    let mut moments = vec![mu0.clone()];
    for _n in 1..=(2 * nb) {
        let mut next: Vec<CMatrix> = vec![CMatrix::zeros(dim); kmax];
        for k in 0..kmax {
            if c[k].is_zero() {
                continue;
            }
            if k + 1 < kmax {
                next[k + 1] = &next[k + 1] + &c[k];
            }
            if k < nb {
                next[k] = &next[k] + &(&c[k] * &beta[k]);
            }
            if k >= 1 {
                next[k - 1] = &next[k - 1] + &(&c[k] * &gamma[k - 1]);
            }
        }
        c = next;
        moments.push(&c[0] * mu0);
    }
    Functional::from_moments(moments)
}

/// The derivative segment `Q_{k−1} = (1/k) P'_k` over `ũ = uΦ`, with the
/// norm bookkeeping `Ẽ_{k−1} = −(1/k) E_k (ψ_1 + (k−1)φ_2)` and a direct
/// orthogonality verification against `ũ`.
#[derive(Clone, Debug)]
pub struct DerivativeSegment {
    /// Monic-normalized derivatives `Q_0..Q_{N−1}` with their `Ẽ`, `π̃`.
    pub seg: MonicSegment,
    /// Max relative defect of `⟨x^{k−1} P'_k, ũ⟩ = −E_k(ψ_1 + (k−1)φ_2)`.
    pub norm_identity_residual: f64,
    /// Max relative cross bracket `‖⟨x^j Q_k, ũ⟩‖/‖Ẽ_k‖` for `j < k`.
    pub orthogonality_residual: f64,
}

/// Build the derivative segment of `seg` under the Pearson data `spec`.
/// Fails with `DerivativeNotOrthogonal(k)` when `ψ_1 + (k−1)φ_2` is
/// singular for some degree the segment covers.
pub fn derivative_segment(
    seg: &MonicSegment,
    spec: &PearsonSpec,
    u: &Functional,
    tol: &Tolerance,
) -> Result<DerivativeSegment> {
    let dim = seg.dim();
    let n = seg.polys.len();
    if n < 2 {
        return Err(Error::InvalidParameter("segment too short".into()));
    }
    let u_tilde = u.right_multiply(spec.phi())?;
    let mut polys = Vec::with_capacity(n - 1);
    let mut e = Vec::with_capacity(n - 1);
    let mut pi = Vec::with_capacity(n - 1);
    let mut norm_res = 0.0_f64;
    for k in 1..n {
        let m = spec.m_k(k as i64 - 1);
        if m.cond_estimate() > tol.cond_max {
            return Err(Error::DerivativeNotOrthogonal(k));
        }
        let q = seg.polys[k].derivative().scale(cr(1.0 / k as f64));
        let e_formula = (&seg.e[k] * &m).scale(cr(-1.0 / k as f64));
        let direct = bracket_shifted(k - 1, &q, &u_tilde)?;
        norm_res = norm_res.max((&direct - &e_formula).norm() / e_formula.norm().max(1e-300));
        pi.push(if k == 1 {
            CMatrix::zeros(dim)
        } else {
            q.coeff(k - 2)
        });
        e.push(e_formula);
        polys.push(q);
    }
    let dseg = MonicSegment {
        dim,
        polys,
        e,
        pi,
        horizon: None,
    };
    let orth = orthogonality_residual(&dseg, &u_tilde)?;
    Ok(DerivativeSegment {
        seg: dseg,
        norm_identity_residual: norm_res,
        orthogonality_residual: orth,
    })
}

/// `a_n = β_n − β̃_{n−1}` and `b_n = γ_n − (n/(n−1)) γ̃_{n−1}`, verified
/// against `P_n = (1/(n+1))P'_{n+1} + a_nP'_n + b_nP'_{n−1}`, with the
/// nonsingularity of `γ_n − b_n` flagged.
pub fn ladder_coefficients(
    seg: &MonicSegment,
    dseg: &DerivativeSegment,
    tol: &Tolerance,
) -> Result<LadderCoefficients> {
    let dim = seg.dim();
    if seg.polys.len() < 3 {
        return Err(Error::InvalidParameter("segment too short".into()));
    }
    let rec = recurrence_coefficients(seg, tol)?;
    let drec = recurrence_coefficients(&dseg.seg, tol)?;
    let n_top = seg.polys.len() - 1; // a_n, b_n for n = 0..n_top-1
    let mut a = vec![CMatrix::zeros(dim)];
    let mut b = vec![CMatrix::zeros(dim)];
    for n in 1..n_top {
        a.push(&rec.beta[n] - &drec.beta[n - 1]);
        if n == 1 {
            // P'_0 = 0 leaves b_1 unconstrained
            b.push(CMatrix::zeros(dim));
        } else {
            let g_t = &drec.gamma[n - 2];
            b.push(&rec.gamma[n - 1] - &g_t.scale(cr(n as f64 / (n as f64 - 1.0))));
        }
    }
    let mut residual = 0.0_f64;
    for n in 0..a.len() {
        let mut rhs = seg.polys[n + 1]
            .derivative()
            .scale(cr(1.0 / (n as f64 + 1.0)));
        if n >= 1 {
            rhs = rhs.add(&seg.polys[n].derivative().mul_matrix_left(&a[n])?)?;
        }
        if n >= 2 {
            rhs = rhs.add(&seg.polys[n - 1].derivative().mul_matrix_left(&b[n])?)?;
        }
        let r = seg.polys[n].sub(&rhs)?;
        residual = residual.max(r.norm() / seg.polys[n].norm().max(1.0));
    }
    let gamma_minus_b_nonsingular: Vec<bool> = (0..a.len())
        .map(|n| {
            if n == 0 {
                true
            } else {
                (&rec.gamma[n - 1] - &b[n]).cond_estimate() <= tol.cond_max
            }
        })
        .collect();
    Ok(LadderCoefficients {
        a,
        b,
        gamma_minus_b_nonsingular,
        residual,
    })
}

/// Closed forms for `P'_{n±1}` in terms of `P_n`, `P'_n`:
///
/// ```text
/// P'_{n−1} = E_{n−1} M_{n−2} M_{2n−1}^{−1} E_n^{−1} {(x + π_n/n) P'_n − n P_n}
/// P'_{n+1} = (n+1) E_n {(φ_2 M_{2n−1}^{−1} E_n^{−1} x
///              − (1/n) M_{2n−2} M_{2n−1}^{−1} E_n^{−1} π_n
///              + (1/(n+1)) E_n^{−1} π_{n+1}) P'_n
///              + M_{n−1} M_{2n−1}^{−1} E_n^{−1} P_n}
/// ```
///
/// with `M_k = ψ_1 + kφ_2`. The caller compares the returned polynomials
/// with the actual derivatives.
pub fn ladder_relations(
    seg: &MonicSegment,
    spec: &PearsonSpec,
    n: usize,
    tol: &Tolerance,
) -> Result<(MatrixPolynomial, MatrixPolynomial)> {
    if n < 1 || n + 1 >= seg.polys.len() {
        return Err(Error::InvalidParameter(format!(
            "need 1 <= n and P_(n+1) in the segment; got n = {n}"
        )));
    }
    let nf = n as f64;
    let m2nm1 = spec.m_k(2 * n as i64 - 1);
    if m2nm1.cond_estimate() > tol.cond_max {
        return Err(Error::LadderBlocked(2 * n - 1));
    }
    let m2nm1_inv = m2nm1.inv(tol.cond_max)?;
    let en_inv = seg.e[n]
        .inv(tol.cond_max)
        .map_err(|_| Error::LadderBlocked(n))?;
    let pn = &seg.polys[n];
    let dpn = pn.derivative();

    let lead_minus = &(&(&seg.e[n - 1] * &spec.m_k(n as i64 - 2)) * &m2nm1_inv) * &en_inv;
    let x_plus_pi = MatrixPolynomial::from_coeffs(
        seg.dim(),
        vec![seg.pi[n].scale(cr(1.0 / nf)), CMatrix::identity(seg.dim())],
    )?;
    let brace_minus = poly_mul(&x_plus_pi, &dpn)?.sub(&pn.scale(cr(nf)))?;
    let p_minus = brace_minus.mul_matrix_left(&lead_minus)?;

    let coeff_x = &spec.phi_coeff(2) * &(&m2nm1_inv * &en_inv);
    let coeff_const = &(&(&(&spec.m_k(2 * n as i64 - 2) * &m2nm1_inv) * &en_inv) * &seg.pi[n])
        .scale(cr(-1.0 / nf))
        + &(&en_inv * &seg.pi[n + 1]).scale(cr(1.0 / (nf + 1.0)));
    let lin = MatrixPolynomial::from_coeffs(seg.dim(), vec![coeff_const, coeff_x])?;
    let term1 = poly_mul(&lin, &dpn)?;
    let lead_pn = &(&spec.m_k(n as i64 - 1) * &m2nm1_inv) * &en_inv;
    let term2 = pn.mul_matrix_left(&lead_pn)?;
    let p_plus = term1
        .add(&term2)?
        .mul_matrix_left(&seg.e[n].scale(cr(nf + 1.0)))?;

    Ok((p_minus, p_plus))
}

/// Outcome of the quasi-orthogonality scan.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum QuasiOrthogonality {
    /// Smallest p with `⟨x^k P_n, v⟩ = 0` for all `k ≤ n − p − 1`.
    Order(usize),
    NotQuasiOrthogonal,
}

/// Smallest `p ≤ p_max` such that the segment is quasi-orthogonal of order
/// `p` with respect to `v`. Brackets count as zero below
/// `tol.zero_at_scale` of the largest bracket at the same degree.
pub fn quasi_orthogonality_order(
    seg: &MonicSegment,
    v: &Functional,
    p_max: usize,
    tol: &Tolerance,
) -> Result<QuasiOrthogonality> {
    let mut norms: Vec<Vec<f64>> = Vec::new();
    for (n, p) in seg.polys.iter().enumerate() {
        let row: Vec<f64> = (0..=n)
            .map(|k| bracket_shifted(k, p, v).map(|m| m.norm()))
            .collect::<Result<_>>()?;
        norms.push(row);
    }
    'outer: for p in 0..=p_max {
        for (n, row) in norms.iter().enumerate() {
            let scale = row.iter().fold(0.0_f64, |acc, &b| acc.max(b));
            let cut = tol.zero_at_scale(scale);
            for (k, &val) in row.iter().enumerate() {
                if (k as i64) < n as i64 - p as i64 && val > cut {
                    continue 'outer;
                }
            }
        }
        return Ok(QuasiOrthogonality::Order(p));
    }
    Ok(QuasiOrthogonality::NotQuasiOrthogonal)
}

/// Least-squares falsifier for derivative orthogonality: find the moment
/// sequence `ν` (normalized by `ν_0 = I`) minimizing the cross brackets
/// `⟨x^j Q_k, ν⟩` for `j < k` over the normalized derivatives
/// `Q_{k−1} = (1/k)P'_k`, and return the relative residual of the best
/// fit. A residual far above the noise floor certifies that no functional
/// makes the derivatives orthogonal on this horizon.
pub fn derivative_orthogonality_best_fit(seg: &MonicSegment) -> Result<f64> {
    let dim = seg.dim();
    let nq = seg.polys.len() - 1;
    if nq < 3 {
        return Err(Error::InvalidParameter("segment too short".into()));
    }
    // qs[i] = P'_{i+1}/(i+1), degree i
    let qs: Vec<MatrixPolynomial> = (1..=nq)
        .map(|k| seg.polys[k].derivative().scale(cr(1.0 / k as f64)))
        .collect();
    let hmax = 2 * (nq - 1) - 1; // largest moment index touched
    let n_unknown = hmax * dim; // columns of nu_1..nu_hmax, one nu-column at a time
    let mut worst = 0.0_f64;
    for col in 0..dim {
        let mut rows: Vec<Vec<Complex64>> = Vec::new();
        let mut rhs: Vec<Complex64> = Vec::new();
        for (deg, q) in qs.iter().enumerate() {
            for j in 0..deg {
                for r in 0..dim {
                    let mut row = vec![Complex64::new(0.0, 0.0); n_unknown];
                    let mut b = Complex64::new(0.0, 0.0);
                    for (i, qi) in q.coeffs().iter().enumerate() {
                        let idx = i + j;
                        for cc in 0..dim {
                            let w = qi.get(r, cc);
                            if idx == 0 {
                                if cc == col {
                                    b -= w;
                                }
                            } else {
                                row[(idx - 1) * dim + cc] += w;
                            }
                        }
                    }
                    rows.push(row);
                    rhs.push(b);
                }
            }
        }
        let nrows = rows.len();
        let mut flat = Vec::with_capacity(nrows * n_unknown);
        for row in &rows {
            flat.extend_from_slice(row);
        }
        let x = lstsq(nrows, n_unknown, &flat, &rhs, 1e-12);
        let mut res = 0.0_f64;
        let mut scale = 0.0_f64;
        for (ri, row) in rows.iter().enumerate() {
            let mut s = -rhs[ri];
            for (ci, &a) in row.iter().enumerate() {
                s += a * x[ci];
            }
            res = res.max(s.norm());
            scale = scale.max(row.iter().map(|z| z.norm()).fold(0.0, f64::max));
        }
        worst = worst.max(res / scale.max(1.0));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functional::PearsonSpec;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn hermite() -> (Functional, PearsonSpec) {
        let spec = PearsonSpec::scalar(&[c(1.0)], &[c(0.0), c(-2.0)], c(1.0)).unwrap();
        (Functional::from_pearson(spec.clone()), spec)
    }

    fn laguerre0() -> (Functional, PearsonSpec) {
        let spec = PearsonSpec::scalar(&[c(0.0), c(1.0)], &[c(1.0), c(-1.0)], c(1.0)).unwrap();
        (Functional::from_pearson(spec.clone()), spec)
    }

    #[test]
    fn hermite_segment_values() {
        let (u, _) = hermite();
        let tol = Tolerance::default();
        let seg = compute_segment(&u, 2, &tol).unwrap();
        assert!(seg.horizon.is_none());
        // P_1 = x, P_2 = x^2 - 1/2
        assert!(seg.polys[1].coeff(0).norm() < 1e-14);
        assert!((seg.polys[2].coeff(0).get(0, 0) - c(-0.5)).norm() < 1e-14);
        assert!(seg.polys[2].coeff(1).norm() < 1e-14);
        assert!((seg.e[1].get(0, 0) - c(0.5)).norm() < 1e-14);
        assert!((seg.e[2].get(0, 0) - c(0.5)).norm() < 1e-14);
        assert!(orthogonality_residual(&seg, &u).unwrap() < 1e-13);
    }

    #[test]
    fn laguerre_segment_and_recurrence() {
        let (u, _) = laguerre0();
        let tol = Tolerance::default();
        let seg = compute_segment(&u, 3, &tol).unwrap();
        assert!((seg.e[2].get(0, 0) - c(4.0)).norm() < 1e-12);
        let rec = recurrence_coefficients(&seg, &tol).unwrap();
        assert!((rec.beta[0].get(0, 0) - c(1.0)).norm() < 1e-12);
        assert!((rec.beta[1].get(0, 0) - c(3.0)).norm() < 1e-12);
        assert!((rec.gamma[0].get(0, 0) - c(1.0)).norm() < 1e-12);
        assert!(rec.residual < 1e-12);
    }

    #[test]
    fn hermite_recurrence_is_symmetric() {
        let (u, _) = hermite();
        let tol = Tolerance::default();
        let seg = compute_segment(&u, 4, &tol).unwrap();
        let rec = recurrence_coefficients(&seg, &tol).unwrap();
        for b in &rec.beta {
            assert!(b.norm() < 1e-13);
        }
        assert!((rec.gamma[0].get(0, 0) - c(0.5)).norm() < 1e-13);
        assert!((rec.gamma[1].get(0, 0) - c(1.0)).norm() < 1e-13);
    }

    #[test]
    fn favard_rebuilds_hermite_moments() {
        let (u, _) = hermite();
        let tol = Tolerance::default();
        let seg = compute_segment(&u, 2, &tol).unwrap();
        let rec = recurrence_coefficients(&seg, &tol).unwrap();
        let v = favard_roundtrip(&rec.beta, &rec.gamma, &u.moment(0).unwrap(), &tol).unwrap();
        let expect = [1.0, 0.0, 0.5, 0.0, 0.75];
        for (n, &m) in expect.iter().enumerate() {
            assert!(
                (v.moment(n).unwrap().get(0, 0) - c(m)).norm() < 1e-12,
                "moment {n}"
            );
        }
    }

    #[test]
    fn favard_rejects_singular_gamma() {
        let tol = Tolerance::default();
        let err = favard_roundtrip(
            &[CMatrix::zeros(1)],
            &[CMatrix::zeros(1)],
            &CMatrix::identity(1),
            &tol,
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidRecurrence(_)));
    }

    #[test]
    fn hermite_derivatives_are_hermite() {
        let (u, spec) = hermite();
        let tol = Tolerance::default();
        let seg = compute_segment(&u, 5, &tol).unwrap();
        let d = derivative_segment(&seg, &spec, &u, &tol).unwrap();
        assert!(d.orthogonality_residual < 1e-12);
        assert!(d.norm_identity_residual < 1e-12);
        // E~_{k-1} = 2 E_k / k
        for k in 1..=5usize {
            let expect = seg.e[k].scale(c(2.0 / k as f64));
            assert!((&d.seg.e[k - 1] - &expect).norm() < 1e-12);
        }
    }

    #[test]
    fn hermite_ladder_coefficients_vanish() {
        let (u, spec) = hermite();
        let tol = Tolerance::default();
        let seg = compute_segment(&u, 5, &tol).unwrap();
        let d = derivative_segment(&seg, &spec, &u, &tol).unwrap();
        let lad = ladder_coefficients(&seg, &d, &tol).unwrap();
        for m in lad.a.iter().chain(lad.b.iter()) {
            assert!(m.norm() < 1e-12);
        }
        assert!(lad.residual < 1e-12);
        assert!(lad.gamma_minus_b_nonsingular.iter().all(|&x| x));
    }

    #[test]
    fn laguerre_ladder_residual_small() {
        let (u, spec) = laguerre0();
        let tol = Tolerance::default();
        let seg = compute_segment(&u, 6, &tol).unwrap();
        let d = derivative_segment(&seg, &spec, &u, &tol).unwrap();
        let lad = ladder_coefficients(&seg, &d, &tol).unwrap();
        // a_n computed numerically; the defining relation is the assertion
        assert!(lad.residual < 1e-10, "residual {}", lad.residual);
        assert!(lad.gamma_minus_b_nonsingular.iter().all(|&x| x));
    }

    #[test]
    fn hermite_ladder_relations_exact() {
        let (u, spec) = hermite();
        let tol = Tolerance::default();
        let seg = compute_segment(&u, 4, &tol).unwrap();
        let (pm, pp) = ladder_relations(&seg, &spec, 2, &tol).unwrap();
        let d1 = seg.polys[1].derivative();
        let d3 = seg.polys[3].derivative();
        assert!(pm.sub(&d1).unwrap().norm() < 1e-12, "minus side");
        assert!(pp.sub(&d3).unwrap().norm() < 1e-12, "plus side");
    }

    #[test]
    fn ladder_blocked_on_singular_m() {
        // psi1 = diag(0, 1), phi2 = 0 -> every M_k singular
        let tol = Tolerance::default();
        let phi = MatrixPolynomial::identity(2);
        let psi = MatrixPolynomial::from_coeffs(
            2,
            vec![
                CMatrix::zeros(2),
                CMatrix::from_real(2, &[0.0, 0.0, 0.0, 1.0]),
            ],
        )
        .unwrap();
        let spec = PearsonSpec::new(phi, psi, CMatrix::identity(2)).unwrap();
        // diagonal Hermite ⊕ Hermite segment as the carrier
        let h = PearsonSpec::new(
            MatrixPolynomial::identity(2),
            MatrixPolynomial::from_coeffs(2, vec![CMatrix::zeros(2), CMatrix::scalar(2, c(-2.0))])
                .unwrap(),
            CMatrix::identity(2),
        )
        .unwrap();
        let u = Functional::from_pearson(h);
        let seg = compute_segment(&u, 4, &tol).unwrap();
        assert!(matches!(
            ladder_relations(&seg, &spec, 2, &tol),
            Err(Error::LadderBlocked(3))
        ));
    }

    #[test]
    fn quasi_orthogonality_of_u_itself_is_zero() {
        let (u, _) = hermite();
        let tol = Tolerance::default();
        let seg = compute_segment(&u, 5, &tol).unwrap();
        assert_eq!(
            quasi_orthogonality_order(&seg, &u, 3, &tol).unwrap(),
            QuasiOrthogonality::Order(0)
        );
    }

    #[test]
    fn best_fit_accepts_classical_derivatives() {
        let (u, _) = hermite();
        let tol = Tolerance::default();
        let seg = compute_segment(&u, 6, &tol).unwrap();
        let res = derivative_orthogonality_best_fit(&seg).unwrap();
        assert!(res < 1e-10, "residual {res}");
    }

    #[test]
    fn maximal_segment_on_crafted_degeneracy() {
        // m = 1, alpha = x, psi0 = -3, psi1 = -1:
        // mu_{n+1} = mu_n (n - 3), so mu_4 = 0 onwards and Delta_4 is singular.
        let spec = PearsonSpec::scalar(&[c(0.0), c(1.0)], &[c(-3.0), c(-1.0)], c(1.0)).unwrap();
        let u = Functional::from_pearson(spec);
        let tol = Tolerance::default();
        let seg = compute_segment(&u, 8, &tol).unwrap();
        let hz = seg.horizon.clone().expect("segment must be maximal");
        assert_eq!(hz.blocked_at, 4);
        assert_eq!(seg.polys.len(), 4); // P_0..P_3
        assert!(hz.extra.is_some());
    }
}
