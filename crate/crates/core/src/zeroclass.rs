//! The zero class: functionals with `D(uαI) = uΨ` for a scalar
//! `α = α_0 + α_1 x + α_2 x²` and `Ψ = ψ_0 + ψ_1 x`. Ladder matrices,
//! closed forms for `E_n`/`π_n`, the existence criterion, canonical types,
//! second-order differential equations, and the hermitian
//! diagonalizability analysis.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::functional::{hankel_profile, Functional, PearsonSpec};
use crate::linalg::{
    poly_mul, psd_check, simultaneous_unitary_diagonalizer, CMatrix, MatrixPolynomial,
    PsdVerdict, Tolerance,
};
use crate::mop::MonicSegment;

fn cr(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn czero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// Zero-class data: scalar `α` (not identically zero, degree ≤ 2) and the
/// matrices `ψ_0`, `ψ_1`, with the seed moment `μ_0`.
#[derive(Clone, Debug)]
pub struct ZeroClassSpec {
    dim: usize,
    /// α_0, α_1, α_2.
    pub alpha: [Complex64; 3],
    pub psi0: CMatrix,
    pub psi1: CMatrix,
    pub mu0: CMatrix,
}

impl ZeroClassSpec {
    pub fn new(
        alpha: [Complex64; 3],
        psi0: CMatrix,
        psi1: CMatrix,
        mu0: CMatrix,
    ) -> Result<Self> {
        if alpha.iter().all(|z| z.norm() == 0.0) {
            return Err(Error::InvalidParameter("alpha must be nonzero".into()));
        }
        let dim = mu0.dim();
        for m in [&psi0, &psi1] {
            if m.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: m.dim(),
                });
            }
        }
        Ok(ZeroClassSpec {
            dim,
            alpha,
            psi0,
            psi1,
            mu0,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Recognize a Pearson spec whose Φ is a scalar polynomial times the
    /// identity; returns the zero-class data when it is.
    pub fn from_pearson(spec: &PearsonSpec) -> Option<Self> {
        let m = spec.dim();
        let scale = spec.phi().norm().max(f64::MIN_POSITIVE);
        let mut alpha = [czero(); 3];
        for (k, slot) in alpha.iter_mut().enumerate() {
            let coeff = spec.phi_coeff(k);
            let a = coeff.get(0, 0);
            if (&coeff - &CMatrix::scalar(m, a)).norm() > 1e-12 * scale {
                return None;
            }
            *slot = a;
        }
        ZeroClassSpec::new(alpha, spec.psi_coeff(0), spec.psi_coeff(1), spec.mu0().clone()).ok()
    }

    /// The scalar polynomial α as a dim-1 polynomial.
    pub fn alpha_poly(&self) -> MatrixPolynomial {
        MatrixPolynomial::scalar_poly(&self.alpha)
    }

    /// The associated Pearson pair `(Φ, Ψ) = (αI, ψ_0 + ψ_1 x)`.
    pub fn to_pearson(&self) -> Result<PearsonSpec> {
        let phi = MatrixPolynomial::from_coeffs(
            self.dim,
            self.alpha
                .iter()
                .map(|&z| CMatrix::scalar(self.dim, z))
                .collect(),
        )?;
        let psi =
            MatrixPolynomial::from_coeffs(self.dim, vec![self.psi0.clone(), self.psi1.clone()])?;
        PearsonSpec::new(phi, psi, self.mu0.clone())
    }

    /// The generated functional (moments from the Pearson recurrence).
    pub fn functional(&self) -> Result<Functional> {
        Ok(Functional::from_pearson(self.to_pearson()?))
    }

    /// `M_n = ψ_1 + n α_2 I`.
    pub fn m_n(&self, n: i64) -> CMatrix {
        &self.psi1 + &CMatrix::scalar(self.dim, cr(n as f64) * self.alpha[2])
    }

    /// `N_n = ψ_0 + n α_1 I`.
    pub fn n_n(&self, n: i64) -> CMatrix {
        &self.psi0 + &CMatrix::scalar(self.dim, cr(n as f64) * self.alpha[1])
    }

    /// `V_n = M_n M_{n+1} ⋯ M_{2n+1}` (n+2 factors, increasing index);
    /// `V_{−1} = I`.
    pub fn v_n(&self, n: i64) -> CMatrix {
        let mut acc = CMatrix::identity(self.dim);
        if n < 0 {
            return acc;
        }
        for k in n..=(2 * n + 1) {
            acc = &acc * &self.m_n(k);
        }
        acc
    }

    /// α evaluated at a matrix argument: `α_0 I + α_1 X + α_2 X²`.
    pub fn alpha_at(&self, x: &CMatrix) -> CMatrix {
        let id = CMatrix::scalar(self.dim, self.alpha[0]);
        &(&id + &x.scale(self.alpha[1])) + &(x * x).scale(self.alpha[2])
    }

    /// `α(−N_n M_{2n}^{−1})`, the existence factor at ladder index n.
    pub fn alpha_at_ladder(&self, n: i64, tol: &Tolerance) -> Result<CMatrix> {
        let m2n = self.m_n(2 * n);
        let m2n_inv = m2n
            .inv(tol.cond_max)
            .map_err(|_| Error::ClosedFormBlocked((2 * n).unsigned_abs() as usize))?;
        let x = -&(&self.n_n(n) * &m2n_inv);
        Ok(self.alpha_at(&x))
    }

    /// `κ_n = (E_n V_{n−1})^{−1}` for the given segment norm `E_n`.
    pub fn kappa(&self, e_n: &CMatrix, n: usize, tol: &Tolerance) -> Result<CMatrix> {
        (e_n * &self.v_n(n as i64 - 1)).inv(tol.cond_max)
    }
}

/// Which nonsingularity condition failed first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BlockReason {
    /// `M_k` singular.
    MSingular(usize),
    /// `α(−N_j M_{2j}^{−1})` singular.
    AlphaEvalSingular(usize),
}

/// Verdict of [`existence_check`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExistenceVerdict {
    /// All conditions hold up to the requested horizon: segments of every
    /// length up to it exist (for nonsingular μ_0).
    QuasiDefiniteTo(usize),
    /// Conditions fail when extending past degree `max_degree`; the
    /// maximal segment is `P_0..P_{max_degree}`.
    BlockedAt {
        max_degree: usize,
        reason: BlockReason,
    },
}

/// Existence criterion for the zero class: a finite segment `P_0..P_n`
/// exists (for nonsingular μ_0) precisely when `M_k` is nonsingular for
/// `k ≤ 2n−1` and `α(−N_j M_{2j}^{−1})` is nonsingular for `j ≤ n−1`.
pub fn existence_check(spec: &ZeroClassSpec, n_max: usize, tol: &Tolerance) -> ExistenceVerdict {
    for n in 1..=n_max {
        // conditions new at degree n
        for k in [2 * n - 2, 2 * n - 1] {
            if spec.m_n(k as i64).cond_estimate() > tol.cond_max {
                return ExistenceVerdict::BlockedAt {
                    max_degree: n - 1,
                    reason: BlockReason::MSingular(k),
                };
            }
        }
        let ae = match spec.alpha_at_ladder(n as i64 - 1, tol) {
            Ok(m) => m,
            Err(_) => {
                return ExistenceVerdict::BlockedAt {
                    max_degree: n - 1,
                    reason: BlockReason::MSingular(2 * n - 2),
                }
            }
        };
        if ae.cond_estimate() > tol.cond_max {
            return ExistenceVerdict::BlockedAt {
                max_degree: n - 1,
                reason: BlockReason::AlphaEvalSingular(n - 1),
            };
        }
    }
    ExistenceVerdict::QuasiDefiniteTo(n_max)
}

/// `E_0^{(j)} = E_0 ∏_{i<j} α(−N_i M_{2i}^{−1}) M_{2i} M_{2i+1}^{−1}`,
/// the seed norm of the i-th associated functional.
fn e0_level(spec: &ZeroClassSpec, j: usize, tol: &Tolerance) -> Result<CMatrix> {
    let mut acc = spec.mu0.clone();
    for i in 0..j {
        let ae = spec.alpha_at_ladder(i as i64, tol)?;
        let m2i = spec.m_n(2 * i as i64);
        let m2ip1_inv = spec
            .m_n(2 * i as i64 + 1)
            .inv(tol.cond_max)
            .map_err(|_| Error::ClosedFormBlocked(2 * i + 1))?;
        acc = &(&(&acc * &ae) * &m2i) * &m2ip1_inv;
    }
    Ok(acc)
}

/// Closed form for the norm:
/// `E_n = (−1)^n n! E_0 α(−N_0M_0^{−1})M_0M_1^{−1} ⋯ α(−N_{n−1}M_{2n−2}^{−1})M_{2n−2} V_{n−1}^{−1}`,
/// evaluated with exactly this factor grouping.
pub fn closed_form_e(spec: &ZeroClassSpec, n: usize, tol: &Tolerance) -> Result<CMatrix> {
    if n == 0 {
        return Ok(spec.mu0.clone());
    }
    let mut acc = spec.mu0.clone();
    for j in 0..n {
        let ae = spec.alpha_at_ladder(j as i64, tol)?;
        acc = &(&acc * &ae) * &spec.m_n(2 * j as i64);
        if j + 1 < n {
            let m_inv = spec
                .m_n(2 * j as i64 + 1)
                .inv(tol.cond_max)
                .map_err(|_| Error::ClosedFormBlocked(2 * j + 1))?;
            acc = &acc * &m_inv;
        }
    }
    let v_inv = spec
        .v_n(n as i64 - 1)
        .inv(tol.cond_max)
        .map_err(|_| Error::ClosedFormBlocked(n))?;
    let mut fact = 1.0;
    for k in 2..=n {
        fact *= k as f64;
    }
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    Ok((&acc * &v_inv).scale(cr(sign * fact)))
}

/// Closed form for the subleading coefficient:
/// `π_n = n E_0^{(n−1)} N_{n−1} M_{2n−2}^{−1} (E_0^{(n−1)})^{−1}`; `π_0 = 0`.
pub fn closed_form_pi(spec: &ZeroClassSpec, n: usize, tol: &Tolerance) -> Result<CMatrix> {
    if n == 0 {
        return Ok(CMatrix::zeros(spec.dim()));
    }
    let e0 = e0_level(spec, n - 1, tol)?;
    let m_inv = spec
        .m_n(2 * n as i64 - 2)
        .inv(tol.cond_max)
        .map_err(|_| Error::ClosedFormBlocked(2 * n - 2))?;
    let e0_inv = e0
        .inv(tol.cond_max)
        .map_err(|_| Error::ClosedFormBlocked(n - 1))?;
    Ok((&(&(&e0 * &spec.n_n(n as i64 - 1)) * &m_inv) * &e0_inv).scale(cr(n as f64)))
}

/// Closed forms for `Π_n = E_n^{−1} π_n E_n` and the norm ratio
/// `E_n^{−1} E_{n+1}`:
///
/// ```text
/// Π_n             = n V_{n−1} M_{2n−2}^{−1} N_{n−1} V_{n−1}^{−1}
/// E_n^{−1}E_{n+1} = −(n+1) V_{n−1} M_{2n−1}^{−1} α(−N_nM_{2n}^{−1}) M_{2n} V_n^{−1}
/// ```
pub fn closed_form_ratios(
    spec: &ZeroClassSpec,
    n: usize,
    tol: &Tolerance,
) -> Result<(CMatrix, CMatrix)> {
    let v = spec.v_n(n as i64 - 1);
    let v_inv = v
        .inv(tol.cond_max)
        .map_err(|_| Error::ClosedFormBlocked(n))?;
    let pi_n = if n == 0 {
        CMatrix::zeros(spec.dim())
    } else {
        let m_inv = spec
            .m_n(2 * n as i64 - 2)
            .inv(tol.cond_max)
            .map_err(|_| Error::ClosedFormBlocked(2 * n - 2))?;
        (&(&(&v * &m_inv) * &spec.n_n(n as i64 - 1)) * &v_inv).scale(cr(n as f64))
    };
    let ae = spec.alpha_at_ladder(n as i64, tol)?;
    let vn_inv = spec
        .v_n(n as i64)
        .inv(tol.cond_max)
        .map_err(|_| Error::ClosedFormBlocked(n))?;
    // the printed V_{n-1} M_{2n-1}^{-1} prefix is an n >= 1 convention;
    // at n = 0 the ratio comes straight from the norm product
    let prefix = if n == 0 {
        CMatrix::identity(spec.dim())
    } else {
        let m2nm1_inv = spec
            .m_n(2 * n as i64 - 1)
            .inv(tol.cond_max)
            .map_err(|_| Error::ClosedFormBlocked(2 * n - 1))?;
        &v * &m2nm1_inv
    };
    let ratio = (&(&prefix * &ae) * &(&spec.m_n(2 * n as i64) * &vn_inv))
        .scale(cr(-(n as f64 + 1.0)));
    Ok((pi_n, ratio))
}

/// Canonical families classified by the root structure of α.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CanonicalTag {
    Hermite,
    Laguerre,
    Jacobi,
    Bessel,
}

/// Root classification of α with the affine change of variable
/// `t(x) = ax + b` mapping α to its canonical form (1, x, 1−x², x²) up to
/// a constant factor.
#[derive(Clone, Debug)]
pub struct CanonicalType {
    pub tag: CanonicalTag,
    /// `t(x) = a x + b`.
    pub transform: (Complex64, Complex64),
    /// Whether the transform keeps real coefficients. Complex roots
    /// destroy hermiticity in general, so such transforms are only ever
    /// reported, never silently applied.
    pub real_roots: bool,
}

/// Classify α by its roots: none / one simple / two distinct / one double.
/// Double roots are detected by `|α_1² − 4α_0α_2| ≤ tol.rel · max|α_i|²`.
pub fn canonical_type(spec: &ZeroClassSpec, tol: &Tolerance) -> CanonicalType {
    let [a0, a1, a2] = spec.alpha;
    let scale = a0.norm().max(a1.norm()).max(a2.norm());
    let is_real = |z: Complex64, s: f64| z.im.abs() <= tol.rel * (s + z.norm());
    if a2.norm() <= tol.rel * scale {
        if a1.norm() <= tol.rel * scale {
            return CanonicalType {
                tag: CanonicalTag::Hermite,
                transform: (cr(1.0), czero()),
                real_roots: true,
            };
        }
        let root = -a0 / a1;
        return CanonicalType {
            tag: CanonicalTag::Laguerre,
            transform: (cr(1.0), -root),
            real_roots: is_real(root, 1.0),
        };
    }
    let disc = a1 * a1 - a2.scale(4.0) * a0;
    if disc.norm() <= tol.rel * scale * scale {
        let root = -a1 / (a2.scale(2.0));
        return CanonicalType {
            tag: CanonicalTag::Bessel,
            transform: (cr(1.0), -root),
            real_roots: is_real(root, 1.0),
        };
    }
    let sq = disc.sqrt();
    let r1 = (-a1 - sq) / (a2.scale(2.0));
    let r2 = (-a1 + sq) / (a2.scale(2.0));
    // t(r1) = -1, t(r2) = 1
    let a = cr(2.0) / (r2 - r1);
    let b = -(r1 + r2) / (r2 - r1);
    CanonicalType {
        tag: CanonicalTag::Jacobi,
        transform: (a, b),
        real_roots: is_real(r1, 1.0 + r1.norm()) && is_real(r2, 1.0 + r2.norm()),
    }
}

/// Structure relation data: `αP'_n = nα_2 P_{n+1} + η_n P_n + θ_n P_{n−1}`
/// with `η_n = nα_1 + [(n−1)π_n − nπ_{n+1}]α_2` and
/// `θ_n = −E_n M_{n−1} E_{n−1}^{−1}`.
#[derive(Clone, Debug)]
pub struct StructureRelation {
    pub eta: CMatrix,
    pub theta: CMatrix,
    /// Relative polynomial residual of the relation.
    pub residual: f64,
}

pub fn structure_relation(
    spec: &ZeroClassSpec,
    seg: &MonicSegment,
    n: usize,
    tol: &Tolerance,
) -> Result<StructureRelation> {
    if n < 1 || n + 1 >= seg.polys.len() {
        return Err(Error::InvalidParameter(format!(
            "structure relation needs P_(n+1); got n = {n}"
        )));
    }
    let nf = n as f64;
    let eta = &CMatrix::scalar(spec.dim(), cr(nf) * spec.alpha[1])
        + &(&seg.pi[n].scale(cr(nf - 1.0)) - &seg.pi[n + 1].scale(cr(nf))).scale(spec.alpha[2]);
    let theta =
        -&(&(&seg.e[n] * &spec.m_n(n as i64 - 1)) * &seg.e[n - 1].inv(tol.cond_max)?);
    let lhs = seg.polys[n]
        .derivative()
        .mul_scalar_poly(&spec.alpha_poly())?;
    let mut rhs = seg.polys[n + 1].scale(cr(nf) * spec.alpha[2]);
    rhs = rhs.add(&seg.polys[n].mul_matrix_left(&eta)?)?;
    rhs = rhs.add(&seg.polys[n - 1].mul_matrix_left(&theta)?)?;
    let r = lhs.sub(&rhs)?;
    let residual = r.norm() / lhs.norm().max(1.0);
    Ok(StructureRelation {
        eta,
        theta,
        residual,
    })
}

/// Consistency of the assembled `Σ_n = nα_2Σ_n^{(+)} + θ_nΣ_n^{(−)}`
/// against the closed form `Σ_n = n E_n M_{n−1} E_n^{−1}`; returns the
/// relative defect.
pub fn sigma_consistency(
    spec: &ZeroClassSpec,
    seg: &MonicSegment,
    n: usize,
    tol: &Tolerance,
) -> Result<f64> {
    if n < 1 || n >= seg.e.len() {
        return Err(Error::InvalidParameter("need E_n and E_{n-1}".into()));
    }
    let nf = n as f64;
    let en_inv = seg.e[n].inv(tol.cond_max)?;
    let m2nm1_inv = spec
        .m_n(2 * n as i64 - 1)
        .inv(tol.cond_max)
        .map_err(|_| Error::ClosedFormBlocked(2 * n - 1))?;
    let sigma_plus = (&(&(&seg.e[n] * &m2nm1_inv) * &spec.m_n(n as i64 - 1)) * &en_inv)
        .scale(cr(nf + 1.0));
    let sigma_minus = (&(&(&seg.e[n - 1] * &m2nm1_inv) * &spec.m_n(n as i64 - 2)) * &en_inv)
        .scale(cr(-nf));
    let theta =
        -&(&(&seg.e[n] * &spec.m_n(n as i64 - 1)) * &seg.e[n - 1].inv(tol.cond_max)?);
    let assembled = &sigma_plus.scale(cr(nf) * spec.alpha[2]) + &(&theta * &sigma_minus);
    let direct = (&(&seg.e[n] * &spec.m_n(n as i64 - 1)) * &en_inv).scale(cr(nf));
    Ok((&assembled - &direct).norm() / direct.norm().max(1.0))
}

/// One left-sided second-order ODE `α y'' + B(x) y' + C y = 0`.
#[derive(Clone, Debug)]
pub struct LeftOde {
    /// Scalar α coefficients.
    pub alpha: [Complex64; 3],
    /// The first-order coefficient `B(x)` (degree ≤ 1), multiplying `y'`
    /// from the left.
    pub linear: MatrixPolynomial,
    /// The zero-order coefficient `C`, multiplying `y` from the left.
    pub constant: CMatrix,
    /// Leading normalization of the solution this ODE annihilates
    /// (`I` for the monic form, `κ_n` for the κ-normalized form).
    pub leading: CMatrix,
    /// Relative polynomial residual on the segment member.
    pub residual: f64,
}

/// The right-sided ODE `y''Φ* + y'Ψ* + Λ_n y = 0`.
#[derive(Clone, Debug)]
pub struct RightOde {
    pub phi_star: MatrixPolynomial,
    pub psi_star: MatrixPolynomial,
    /// `Λ_n = −n M_{n−1}^*`.
    pub lambda: CMatrix,
    pub residual: f64,
}

/// Both left-sided ODEs for `P_n`:
/// (monic) `αP_n'' + E_nV_{n−1}ΨV_{n−1}^{−1}E_n^{−1}P_n' − nE_nM_{n−1}E_n^{−1}P_n = 0`
/// and (κ-normalized, `Q_n = κ_nP_n` with `κ_n = (E_nV_{n−1})^{−1}`)
/// `αQ_n'' + ΨQ_n' − nM_{n−1}Q_n = 0`.
pub fn ode_coefficients(
    spec: &ZeroClassSpec,
    seg: &MonicSegment,
    n: usize,
    tol: &Tolerance,
) -> Result<(LeftOde, LeftOde)> {
    if n >= seg.polys.len() {
        return Err(Error::InvalidParameter(format!(
            "segment does not contain P_{n}"
        )));
    }
    let dim = spec.dim();
    let psi = MatrixPolynomial::from_coeffs(dim, vec![spec.psi0.clone(), spec.psi1.clone()])?;
    let pn = &seg.polys[n];

    // monic form
    let (linear_monic, constant_monic) = if n == 0 {
        (psi.clone(), CMatrix::zeros(dim))
    } else {
        let v = spec.v_n(n as i64 - 1);
        let v_inv = v.inv(tol.cond_max)?;
        let en_inv = seg.e[n].inv(tol.cond_max)?;
        let ev = &seg.e[n] * &v;
        let tail = &v_inv * &en_inv;
        let wrap = |m: &CMatrix| -> CMatrix { &(&ev * m) * &tail };
        let linear =
            MatrixPolynomial::from_coeffs(dim, vec![wrap(&spec.psi0), wrap(&spec.psi1)])?;
        let constant =
            (&(&seg.e[n] * &spec.m_n(n as i64 - 1)) * &en_inv).scale(cr(-(n as f64)));
        (linear, constant)
    };
    let res_monic = left_ode_residual(&spec.alpha, &linear_monic, &constant_monic, pn)?;
    let monic = LeftOde {
        alpha: spec.alpha,
        linear: linear_monic,
        constant: constant_monic,
        leading: CMatrix::identity(dim),
        residual: res_monic,
    };

    // kappa-normalized form
    let kappa = spec.kappa(&seg.e[n], n, tol)?;
    let qn = pn.mul_matrix_left(&kappa)?;
    let constant_kappa = spec.m_n(n as i64 - 1).scale(cr(-(n as f64)));
    let res_kappa = left_ode_residual(&spec.alpha, &psi, &constant_kappa, &qn)?;
    let kappa_ode = LeftOde {
        alpha: spec.alpha,
        linear: psi,
        constant: constant_kappa,
        leading: kappa,
        residual: res_kappa,
    };
    Ok((monic, kappa_ode))
}

fn left_ode_residual(
    alpha: &[Complex64; 3],
    linear: &MatrixPolynomial,
    constant: &CMatrix,
    y: &MatrixPolynomial,
) -> Result<f64> {
    let alpha_poly = MatrixPolynomial::scalar_poly(alpha);
    let term2 = y.derivative().derivative().mul_scalar_poly(&alpha_poly)?;
    let term1 = poly_mul(linear, &y.derivative())?;
    let term0 = y.mul_matrix_left(constant)?;
    let r = term2.add(&term1)?.add(&term0)?;
    Ok(r.norm() / y.norm().max(1e-300))
}

/// The right-sided ODE `P_n''Φ* + P_n'Ψ* + Λ_nP_n = 0` with
/// `Λ_n = −nM_{n−1}^*` and `M_{n−1} = ψ_1 + (n−1)φ_2`, valid when both
/// `u` and `uΦ` are hermitian. `pearson` may be any Pearson pair of `u`,
/// scalar-Φ or not.
pub fn right_ode(
    pearson: &PearsonSpec,
    u: &Functional,
    seg: &MonicSegment,
    n: usize,
    tol: &Tolerance,
) -> Result<RightOde> {
    if n >= seg.polys.len() {
        return Err(Error::InvalidParameter(format!(
            "segment does not contain P_{n}"
        )));
    }
    let horizon = 2 * seg.polys.len() + 2;
    let u_phi = u.right_multiply(pearson.phi())?;
    for (label, f) in [("u", u), ("u*Phi", &u_phi)] {
        for k in 0..=horizon {
            let m = f.moment(k)?;
            if m.hermiticity_defect() > tol.zero_at_scale(m.norm().max(1.0)) {
                return Err(Error::HermiticityRequired(format!(
                    "moment {k} of {label} is not hermitian"
                )));
            }
        }
    }
    let lambda = pearson.m_k(n as i64 - 1).adjoint().scale(cr(-(n as f64)));
    let pn = &seg.polys[n];
    let phi_star = pearson.phi().star();
    let psi_star = pearson.psi().star();
    let term2 = poly_mul(&pn.derivative().derivative(), &phi_star)?;
    let term1 = poly_mul(&pn.derivative(), &psi_star)?;
    let term0 = pn.mul_matrix_left(&lambda)?;
    let r = term2.add(&term1)?.add(&term0)?;
    let residual = r.norm() / pn.norm().max(1e-300);
    Ok(RightOde {
        phi_star,
        psi_star,
        lambda,
        residual,
    })
}

/// Solve `α y'' + Ψ y' − n M_{n−1} y = 0` for the degree-n matrix
/// polynomial with the given leading coefficient, by back-substituting
/// `(n−k) M_{k+n−1} c_k = (k+1)[N_k c_{k+1} + (k+2) α_0 c_{k+2}]`.
/// With `leading = κ_n` the solution is the κ-normalized MOP.
pub fn ode_solve(
    spec: &ZeroClassSpec,
    n: usize,
    leading: &CMatrix,
    tol: &Tolerance,
) -> Result<MatrixPolynomial> {
    if leading.dim() != spec.dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.dim(),
            got: leading.dim(),
        });
    }
    let dim = spec.dim();
    let mut coeffs = vec![CMatrix::zeros(dim); n + 1];
    coeffs[n] = leading.clone();
    for k in (0..n).rev() {
        let kf = k as f64;
        let mut rhs = &spec.n_n(k as i64) * &coeffs[k + 1];
        if k + 2 <= n {
            rhs = &rhs + &coeffs[k + 2].scale(cr(kf + 2.0) * spec.alpha[0]);
        }
        rhs = rhs.scale(cr((kf + 1.0) / (n as f64 - kf)));
        let m = spec.m_n(k as i64 + n as i64 - 1);
        coeffs[k] = m
            .solve(&rhs, tol.cond_max)
            .map_err(|_| Error::OdeSolveBlocked(k))?;
    }
    MatrixPolynomial::from_coeffs(dim, coeffs)
}

/// Residual of the hermiticity identity
/// `ψ_0^*μ_{n+1}ψ_1 − ψ_1^*μ_{n+1}ψ_0 = i2n(n+1)(A_0μ_{n−1} + A_1μ_n + A_2μ_{n+1})`
/// with `A_0 = ℑ(ᾱ_0α_1), A_1 = 2ℑ(ᾱ_0α_2), A_2 = ℑ(ᾱ_1α_2)`.
/// Requires `μ_{n−2}..μ_{n+2}` hermitian.
pub fn hermiticity_obstruction(
    u: &Functional,
    spec: &ZeroClassSpec,
    n: usize,
    tol: &Tolerance,
) -> Result<CMatrix> {
    if n < 2 {
        return Err(Error::InvalidParameter("identity needs n >= 2".into()));
    }
    let mut bad = Vec::new();
    for k in n - 2..=n + 2 {
        let m = u.moment(k)?;
        if m.hermiticity_defect() > tol.zero_at_scale(m.norm().max(1.0)) {
            bad.push(k);
        }
    }
    if !bad.is_empty() {
        return Err(Error::HypothesisViolated(format!(
            "non-hermitian moments at indices {bad:?}"
        )));
    }
    let [a0, a1, a2] = spec.alpha;
    let cap_a0 = (a0.conj() * a1).im;
    let cap_a1 = 2.0 * (a0.conj() * a2).im;
    let cap_a2 = (a1.conj() * a2).im;
    let mu_np1 = u.moment(n + 1)?;
    let lhs = &(&(&spec.psi0.adjoint() * &mu_np1) * &spec.psi1)
        - &(&(&spec.psi1.adjoint() * &mu_np1) * &spec.psi0);
    let factor = Complex64::new(0.0, 2.0 * n as f64 * (n as f64 + 1.0));
    let rhs = (&(&u.moment(n - 1)?.scale(cr(cap_a0)) + &u.moment(n)?.scale(cr(cap_a1)))
        + &mu_np1.scale(cr(cap_a2)))
        .scale(factor);
    Ok(&lhs - &rhs)
}

/// Commutator form of the identity, valid when `μ_0 = I` and `μ_1` is
/// hermitian: `ψ_1^*[μ_{n+1}, μ_1]ψ_1 − i2n(n+1)(A_0μ_{n−1} + A_1μ_n + A_2μ_{n+1})`.
pub fn hermiticity_obstruction_commutator(
    u: &Functional,
    spec: &ZeroClassSpec,
    n: usize,
    tol: &Tolerance,
) -> Result<CMatrix> {
    let mu0 = u.moment(0)?;
    if (&mu0 - &CMatrix::identity(spec.dim())).norm() > tol.zero_at_scale(1.0) {
        return Err(Error::HypothesisViolated("needs mu_0 = I".into()));
    }
    let mu1 = u.moment(1)?;
    if mu1.hermiticity_defect() > tol.zero_at_scale(mu1.norm().max(1.0)) {
        return Err(Error::HypothesisViolated("needs mu_1 hermitian".into()));
    }
    let [a0, a1, a2] = spec.alpha;
    let cap_a0 = (a0.conj() * a1).im;
    let cap_a1 = 2.0 * (a0.conj() * a2).im;
    let cap_a2 = (a1.conj() * a2).im;
    let mu_np1 = u.moment(n + 1)?;
    let comm = mu_np1.commutator(&mu1)?;
    let lhs = &(&spec.psi1.adjoint() * &comm) * &spec.psi1;
    let factor = Complex64::new(0.0, 2.0 * n as f64 * (n as f64 + 1.0));
    let rhs = (&(&u.moment(n - 1)?.scale(cr(cap_a0)) + &u.moment(n)?.scale(cr(cap_a1)))
        + &mu_np1.scale(cr(cap_a2)))
        .scale(factor);
    Ok(&lhs - &rhs)
}

/// Witness returned with a [`DiagVerdict::NotDiagonalizable`] verdict.
#[derive(Clone, Debug)]
pub enum DiagWitness {
    /// `[μ_i, μ_j] ≠ 0` (after μ_0-normalization when μ_0 > 0); rules out
    /// a single unitary diagonalizing every moment.
    NonCommutingMoments {
        i: usize,
        j: usize,
        commutator_norm: f64,
    },
    /// The constructive path failed to produce a verified transform.
    VerificationFailed { moment: usize },
}

/// Verdict of [`diagonalizability_report`].
#[derive(Clone, Debug)]
pub enum DiagVerdict {
    /// `transform · μ_n · transform*` is diagonal for every tested n.
    /// `unitary` is true when μ_0 was already the identity; otherwise the
    /// transform composes a unitary with the μ_0-Cholesky normalizer.
    UnitarilyDiagonalizable { transform: CMatrix, unitary: bool },
    NotDiagonalizable {
        witness: DiagWitness,
        delta2_positive_definite: bool,
    },
    Inconclusive { reason: String },
}

/// Hermitian diagonalizability test: normalizes `μ_0 = I` when possible,
/// checks the commutation of `μ_1, μ_2`, builds the joint diagonalizer of
/// the normalized moments and verifies every moment up to `n_test`.
pub fn diagonalizability_report(
    u: &Functional,
    n_test: usize,
    tol: &Tolerance,
) -> Result<DiagVerdict> {
    let dim = u.dim();
    for k in 0..=5usize {
        let m = u.moment(k)?;
        if m.hermiticity_defect() > tol.zero_at_scale(m.norm().max(1.0)) {
            return Ok(DiagVerdict::Inconclusive {
                reason: format!("moment {k} is not hermitian"),
            });
        }
    }
    let mu0 = u.moment(0)?;
    let delta2_pd = hankel_profile(u, 2, tol)?.all_positive_definite();
    if psd_check(&mu0, tol) != PsdVerdict::PositiveDefinite {
        // the constructive conditions need mu_0 > 0; a non-commuting pair
        // still rules out unitary diagonalizability outright
        for i in 0..4 {
            for j in i + 1..=4 {
                let a = u.moment(i)?;
                let b = u.moment(j)?;
                let c = a.commutator(&b)?;
                if c.norm() > tol.zero_at_scale((a.norm() * b.norm()).max(1.0)) {
                    return Ok(DiagVerdict::NotDiagonalizable {
                        witness: DiagWitness::NonCommutingMoments {
                            i,
                            j,
                            commutator_norm: c.norm(),
                        },
                        delta2_positive_definite: delta2_pd,
                    });
                }
            }
        }
        return Ok(DiagVerdict::Inconclusive {
            reason: "mu_0 is not positive definite and all low moments commute".into(),
        });
    }
    let (nu, linv) = u.normalized_congruence(tol)?;
    let unitary = (&mu0 - &CMatrix::identity(dim)).norm() <= tol.zero_at_scale(1.0);
    let nu1 = nu.moment(1)?;
    let nu2 = nu.moment(2)?;
    let comm = nu2.commutator(&nu1)?;
    if comm.norm() > tol.zero_at_scale((nu1.norm() * nu2.norm()).max(1.0)) {
        return Ok(DiagVerdict::NotDiagonalizable {
            witness: DiagWitness::NonCommutingMoments {
                i: 2,
                j: 1,
                commutator_norm: comm.norm(),
            },
            delta2_positive_definite: delta2_pd,
        });
    }
    let t = match simultaneous_unitary_diagonalizer(&[nu1, nu2], tol)? {
        Some(t) => t,
        None => {
            return Ok(DiagVerdict::NotDiagonalizable {
                witness: DiagWitness::VerificationFailed { moment: 2 },
                delta2_positive_definite: delta2_pd,
            })
        }
    };
    for k in 0..=n_test {
        let nk = nu.moment(k)?;
        let d = &(&t * &nk) * &t.adjoint();
        if d.offdiag_norm() > tol.zero_at_scale(nk.norm().max(1.0)) {
            return Ok(DiagVerdict::NotDiagonalizable {
                witness: DiagWitness::VerificationFailed { moment: k },
                delta2_positive_definite: delta2_pd,
            });
        }
    }
    Ok(DiagVerdict::UnitarilyDiagonalizable {
        transform: &t * &linv,
        unitary,
    })
}

/// Verdict of the Bessel positivity guard.
#[derive(Clone, Debug)]
pub enum GuardVerdict {
    /// Some Δ_k (k ≤ 2) is not positive definite, as the double-root
    /// obstruction demands.
    ConsistentWithDoubleRootObstruction { failing_order: usize },
    /// Every Δ_k came out positive definite; a double-root zero-class
    /// functional cannot be positive definite, so this flags a bug.
    Violation { detail: String },
}

/// Check that a zero-class spec whose α has a double root generates a
/// functional that is not positive definite.
pub fn bessel_positivity_guard(spec: &ZeroClassSpec, tol: &Tolerance) -> Result<GuardVerdict> {
    let [a0, a1, a2] = spec.alpha;
    let scale = a0.norm().max(a1.norm()).max(a2.norm());
    let disc = a1 * a1 - a2.scale(4.0) * a0;
    if a2.norm() <= tol.rel * scale || disc.norm() > tol.rel * scale * scale {
        return Err(Error::InvalidParameter(
            "guard applies only when alpha has a double root".into(),
        ));
    }
    let u = spec.functional()?;
    let prof = hankel_profile(&u, 2, tol)?;
    match prof.flags.iter().find(|f| !f.positive_definite) {
        Some(f) => Ok(GuardVerdict::ConsistentWithDoubleRootObstruction {
            failing_order: f.order,
        }),
        None => Ok(GuardVerdict::Violation {
            detail: "Delta_0..Delta_2 all positive definite under a double-root alpha".into(),
        }),
    }
}

/// Diagnostic bundle for cross-validating [`existence_check`] against the
/// Hankel path on the generated functional.
#[derive(Clone, Debug)]
pub struct ExistenceCrossCheck {
    pub verdict: ExistenceVerdict,
    /// Max degree of the segment the Hankel path produced.
    pub hankel_max_degree: usize,
    /// First singular Δ order observed by the Hankel path, if any.
    pub hankel_blocked_at: Option<usize>,
    pub agree: bool,
}

/// Run both the algebraic existence criterion and the Hankel segment on
/// the generated functional, and report whether they agree.
pub fn existence_cross_check(
    spec: &ZeroClassSpec,
    n_max: usize,
    tol: &Tolerance,
) -> Result<ExistenceCrossCheck> {
    let verdict = existence_check(spec, n_max, tol);
    let u = spec.functional()?;
    let seg = crate::mop::compute_segment(&u, n_max, tol)?;
    let hankel_max_degree = seg.max_degree();
    let hankel_blocked_at = seg.horizon.as_ref().map(|h| h.blocked_at);
    let agree = match &verdict {
        ExistenceVerdict::QuasiDefiniteTo(n) => {
            hankel_blocked_at.is_none() && hankel_max_degree == *n
        }
        ExistenceVerdict::BlockedAt { max_degree, .. } => {
            hankel_max_degree == *max_degree && hankel_blocked_at == Some(max_degree + 1)
        }
    };
    Ok(ExistenceCrossCheck {
        verdict,
        hankel_max_degree,
        hankel_blocked_at,
        agree,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mop::{compute_segment, recurrence_coefficients};

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn scalar_hermite() -> ZeroClassSpec {
        ZeroClassSpec::new(
            [c(1.0), czero(), czero()],
            CMatrix::zeros(1),
            CMatrix::scalar(1, c(-2.0)),
            CMatrix::identity(1),
        )
        .unwrap()
    }

    fn scalar_laguerre0() -> ZeroClassSpec {
        ZeroClassSpec::new(
            [czero(), c(1.0), czero()],
            CMatrix::scalar(1, c(1.0)),
            CMatrix::scalar(1, c(-1.0)),
            CMatrix::identity(1),
        )
        .unwrap()
    }

    #[test]
    fn hermite_existence_unconditional() {
        let tol = Tolerance::default();
        assert_eq!(
            existence_check(&scalar_hermite(), 20, &tol),
            ExistenceVerdict::QuasiDefiniteTo(20)
        );
    }

    #[test]
    fn crafted_alpha_eval_blocks_and_agrees_with_hankel() {
        // alpha = x, psi0 = -3, psi1 = -1: alphaeval_3 = 0, so the maximal
        // segment is P_0..P_3 and Delta_4 is the first singular Hankel.
        let tol = Tolerance::default();
        let spec = ZeroClassSpec::new(
            [czero(), c(1.0), czero()],
            CMatrix::scalar(1, c(-3.0)),
            CMatrix::scalar(1, c(-1.0)),
            CMatrix::identity(1),
        )
        .unwrap();
        let cc = existence_cross_check(&spec, 8, &tol).unwrap();
        match &cc.verdict {
            ExistenceVerdict::BlockedAt { max_degree, reason } => {
                assert_eq!(*max_degree, 3);
                assert_eq!(*reason, BlockReason::AlphaEvalSingular(3));
            }
            v => panic!("unexpected verdict {v:?}"),
        }
        assert_eq!(cc.hankel_blocked_at, Some(4));
        assert!(cc.agree);
    }

    #[test]
    fn jacobi_integer_psi1_blocks_m() {
        // alpha = 1 - x^2 (alpha2 = -1), psi1 = 3: M_3 = 0
        let tol = Tolerance::default();
        let spec = ZeroClassSpec::new(
            [c(1.0), czero(), c(-1.0)],
            CMatrix::scalar(1, c(0.5)),
            CMatrix::scalar(1, c(3.0)),
            CMatrix::identity(1),
        )
        .unwrap();
        match existence_check(&spec, 10, &tol) {
            ExistenceVerdict::BlockedAt { reason, .. } => {
                assert_eq!(reason, BlockReason::MSingular(3));
            }
            v => panic!("unexpected verdict {v:?}"),
        }
    }

    #[test]
    fn closed_form_e_hermite() {
        let tol = Tolerance::default();
        let spec = scalar_hermite();
        // E_n = n!/2^n
        for n in 0..7usize {
            let e = closed_form_e(&spec, n, &tol).unwrap();
            let mut expect = 1.0;
            for k in 2..=n {
                expect *= k as f64;
            }
            expect /= 2_f64.powi(n as i32);
            assert!(
                (e.get(0, 0) - c(expect)).norm() < 1e-12 * expect.max(1.0),
                "n = {n}"
            );
        }
        assert!((closed_form_e(&spec, 3, &tol).unwrap().get(0, 0) - c(0.75)).norm() < 1e-13);
    }

    #[test]
    fn closed_form_e_laguerre() {
        let tol = Tolerance::default();
        let spec = scalar_laguerre0();
        // E_n = (n!)^2
        let e2 = closed_form_e(&spec, 2, &tol).unwrap();
        assert!((e2.get(0, 0) - c(4.0)).norm() < 1e-12);
        let e3 = closed_form_e(&spec, 3, &tol).unwrap();
        assert!((e3.get(0, 0) - c(36.0)).norm() < 1e-11);
    }

    #[test]
    fn closed_form_pi_values() {
        let tol = Tolerance::default();
        // Hermite: pi_n = 0
        for n in 1..5 {
            assert!(closed_form_pi(&scalar_hermite(), n, &tol).unwrap().norm() < 1e-13);
        }
        // Laguerre r=0: pi_1 = E_0 psi_0 psi_1^{-1} E_0^{-1} = -1 (monic L_1 = x - 1)
        let pi1 = closed_form_pi(&scalar_laguerre0(), 1, &tol).unwrap();
        assert!((pi1.get(0, 0) - c(-1.0)).norm() < 1e-13);
    }

    #[test]
    fn closed_forms_match_hankel() {
        let tol = Tolerance::default();
        for spec in [scalar_hermite(), scalar_laguerre0()] {
            let u = spec.functional().unwrap();
            let seg = compute_segment(&u, 6, &tol).unwrap();
            for n in 0..=6usize {
                let e = closed_form_e(&spec, n, &tol).unwrap();
                let rel = (&e - &seg.e[n]).norm() / seg.e[n].norm();
                assert!(rel < 1e-10, "E_{n} rel {rel}");
                let pi = closed_form_pi(&spec, n, &tol).unwrap();
                let rel_pi = (&pi - &seg.pi[n]).norm() / seg.pi[n].norm().max(1.0);
                assert!(rel_pi < 1e-10, "pi_{n} rel {rel_pi}");
            }
        }
    }

    #[test]
    fn ratio_consistency() {
        let tol = Tolerance::default();
        for spec in [scalar_hermite(), scalar_laguerre0()] {
            for n in 1..5usize {
                let (pi_n, ratio) = closed_form_ratios(&spec, n, &tol).unwrap();
                let e_n = closed_form_e(&spec, n, &tol).unwrap();
                let e_np1 = closed_form_e(&spec, n + 1, &tol).unwrap();
                let direct = e_n.solve(&e_np1, tol.cond_max).unwrap();
                assert!((&direct - &ratio).norm() / direct.norm() < 1e-10);
                // Pi_n = E_n^{-1} pi_n E_n
                let pi = closed_form_pi(&spec, n, &tol).unwrap();
                let conj = &e_n.inv(tol.cond_max).unwrap() * &(&pi * &e_n);
                assert!((&conj - &pi_n).norm() <= 1e-10 * (1.0 + pi_n.norm()));
            }
        }
    }

    #[test]
    fn canonical_types() {
        let tol = Tolerance::default();
        let mk = |alpha: [Complex64; 3]| {
            ZeroClassSpec::new(
                alpha,
                CMatrix::zeros(1),
                CMatrix::scalar(1, c(-2.0)),
                CMatrix::identity(1),
            )
            .unwrap()
        };
        assert_eq!(
            canonical_type(&mk([c(1.0), czero(), czero()]), &tol).tag,
            CanonicalTag::Hermite
        );
        // 3(x-2)(x+5) = -30 + 9x + 3x^2
        let ct = canonical_type(&mk([c(-30.0), c(9.0), c(3.0)]), &tol);
        assert_eq!(ct.tag, CanonicalTag::Jacobi);
        assert!(ct.real_roots);
        let (a, b) = ct.transform;
        assert!((a * c(-5.0) + b - c(-1.0)).norm() < 1e-12);
        assert!((a * c(2.0) + b - c(1.0)).norm() < 1e-12);
        // x^2 + 1: complex pair
        let ct2 = canonical_type(&mk([c(1.0), czero(), c(1.0)]), &tol);
        assert_eq!(ct2.tag, CanonicalTag::Jacobi);
        assert!(!ct2.real_roots);
        // x^2: double root
        let ct3 = canonical_type(&mk([czero(), czero(), c(1.0)]), &tol);
        assert_eq!(ct3.tag, CanonicalTag::Bessel);
        assert!(ct3.real_roots);
        // x - 1/2: Laguerre
        let ct4 = canonical_type(&mk([c(-0.5), c(1.0), czero()]), &tol);
        assert_eq!(ct4.tag, CanonicalTag::Laguerre);
    }

    #[test]
    fn hermite_kappa_ode_is_classical() {
        // alpha Q'' + Psi Q' - n M_{n-1} Q = 0 reads y'' - 2xy' + 2ny = 0
        let tol = Tolerance::default();
        let spec = scalar_hermite();
        let u = spec.functional().unwrap();
        let seg = compute_segment(&u, 5, &tol).unwrap();
        for n in 1..=5usize {
            let (monic, kappa) = ode_coefficients(&spec, &seg, n, &tol).unwrap();
            assert!(monic.residual < 1e-11, "monic n = {n}: {}", monic.residual);
            assert!(kappa.residual < 1e-11, "kappa n = {n}: {}", kappa.residual);
            // -n M_{n-1} = 2n
            assert!((kappa.constant.get(0, 0) - c(2.0 * n as f64)).norm() < 1e-12);
        }
    }

    #[test]
    fn ode_solve_hermite_reproduces_p2() {
        let tol = Tolerance::default();
        let spec = scalar_hermite();
        let u = spec.functional().unwrap();
        let seg = compute_segment(&u, 3, &tol).unwrap();
        let kappa = spec.kappa(&seg.e[2], 2, &tol).unwrap();
        let q = ode_solve(&spec, 2, &kappa, &tol).unwrap();
        let expect = seg.polys[2].mul_matrix_left(&kappa).unwrap();
        assert!(q.sub(&expect).unwrap().norm() < 1e-12);
        // leading = 0 gives the zero polynomial
        let z = ode_solve(&spec, 2, &CMatrix::zeros(1), &tol).unwrap();
        assert_eq!(z.degree(), None);
    }

    #[test]
    fn structure_relation_hermite() {
        let tol = Tolerance::default();
        let spec = scalar_hermite();
        let u = spec.functional().unwrap();
        let seg = compute_segment(&u, 5, &tol).unwrap();
        for n in 1..=4usize {
            let sr = structure_relation(&spec, &seg, n, &tol).unwrap();
            assert!(sr.residual < 1e-12, "n = {n}");
            // theta_n = n for monic Hermite (P'_n = n P_{n-1})
            assert!((sr.theta.get(0, 0) - c(n as f64)).norm() < 1e-12);
            assert!(sr.eta.norm() < 1e-13);
        }
    }

    #[test]
    fn sigma_assembly_consistent() {
        let tol = Tolerance::default();
        for spec in [scalar_hermite(), scalar_laguerre0()] {
            let u = spec.functional().unwrap();
            let seg = compute_segment(&u, 5, &tol).unwrap();
            for n in 1..=4usize {
                assert!(sigma_consistency(&spec, &seg, n, &tol).unwrap() < 1e-11);
            }
        }
    }

    #[test]
    fn right_ode_scalar_hermite() {
        let tol = Tolerance::default();
        let spec = scalar_hermite();
        let u = spec.functional().unwrap();
        let seg = compute_segment(&u, 5, &tol).unwrap();
        let p = spec.to_pearson().unwrap();
        for n in 1..=4usize {
            let ode = right_ode(&p, &u, &seg, n, &tol).unwrap();
            assert!(ode.residual < 1e-11, "n = {n}");
        }
    }

    #[test]
    fn hermiticity_identity_scalar() {
        // m = 1: everything commutes, residual identically zero
        let tol = Tolerance::default();
        let spec = scalar_hermite();
        let u = spec.functional().unwrap();
        for n in 2..=5usize {
            let r = hermiticity_obstruction(&u, &spec, n, &tol).unwrap();
            assert!(r.norm() < 1e-12);
        }
    }

    #[test]
    fn guard_requires_double_root() {
        let tol = Tolerance::default();
        assert!(matches!(
            bessel_positivity_guard(&scalar_hermite(), &tol),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn diag_report_roundtrip_on_scrambled_diagonal() {
        let tol = Tolerance::default();
        // diagonal positive definite zero-class functional: Hermite ⊕ scaled Hermite
        let psi1 = CMatrix::diag(&[c(-2.0), c(-4.0)]);
        let spec = ZeroClassSpec::new(
            [c(1.0), czero(), czero()],
            CMatrix::zeros(2),
            psi1,
            CMatrix::diag(&[c(1.0), c(2.0)]),
        )
        .unwrap();
        let w = spec.functional().unwrap();
        // scramble by a unitary (Givens) congruence
        let th = 0.7_f64;
        let t = CMatrix::from_vec(
            2,
            vec![c(th.cos()), c(th.sin()), c(-th.sin()), c(th.cos())],
        )
        .unwrap();
        let scrambled = w.congruence(&t).unwrap();
        match diagonalizability_report(&scrambled, 10, &tol).unwrap() {
            DiagVerdict::UnitarilyDiagonalizable { transform, .. } => {
                for n in 0..=10usize {
                    let m = scrambled.moment(n).unwrap();
                    let d = &(&transform * &m) * &transform.adjoint();
                    assert!(
                        d.offdiag_norm() <= 1e-8 * m.norm().max(1.0),
                        "moment {n} not diagonalized"
                    );
                }
            }
            v => panic!("expected diagonalizable, got {v:?}"),
        }
    }

    #[test]
    fn recurrence_and_closed_forms_agree_on_matrix_case() {
        // 2x2 Hermite-type with nontrivial triangular psi1
        let tol = Tolerance::default();
        let psi1 = CMatrix::from_real(2, &[-2.0, 1.0, 0.0, -3.0]);
        let spec = ZeroClassSpec::new(
            [c(1.0), czero(), czero()],
            CMatrix::from_real(2, &[0.0, 0.5, 0.0, 0.0]),
            psi1,
            CMatrix::identity(2),
        )
        .unwrap();
        let u = spec.functional().unwrap();
        let seg = compute_segment(&u, 5, &tol).unwrap();
        assert!(seg.horizon.is_none());
        let rec = recurrence_coefficients(&seg, &tol).unwrap();
        assert!(rec.residual < 1e-10);
        for n in 0..=5usize {
            let e = closed_form_e(&spec, n, &tol).unwrap();
            let rel = (&e - &seg.e[n]).norm() / seg.e[n].norm();
            assert!(rel < 1e-9, "E_{n} rel {rel}");
            let pi = closed_form_pi(&spec, n, &tol).unwrap();
            let rel = (&pi - &seg.pi[n]).norm() / seg.pi[n].norm().max(1.0);
            assert!(rel < 1e-9, "pi_{n} rel {rel}");
        }
        // the factor orderings in the structure relation and the sigma
        // assembly only bite in the matrix case
        for n in 1..=4usize {
            let sr = structure_relation(&spec, &seg, n, &tol).unwrap();
            assert!(sr.residual < 1e-9, "structure n = {n}: {}", sr.residual);
            let sc = sigma_consistency(&spec, &seg, n, &tol).unwrap();
            assert!(sc < 1e-9, "sigma n = {n}: {sc}");
        }
    }

    #[test]
    fn matrix_jacobi_type_closed_forms() {
        // alpha = 1 - x^2 with noncommuting psi0: exercises every ladder
        // index sign (M_n = psi1 - n I decreasing)
        let tol = Tolerance::default();
        let spec = ZeroClassSpec::new(
            [c(1.0), czero(), c(-1.0)],
            CMatrix::from_real(2, &[0.2, 0.4, 0.0, -0.3]),
            CMatrix::from_real(2, &[-3.0, 0.5, 0.0, -3.5]),
            CMatrix::identity(2),
        )
        .unwrap();
        assert_eq!(
            existence_check(&spec, 5, &tol),
            ExistenceVerdict::QuasiDefiniteTo(5)
        );
        let u = spec.functional().unwrap();
        let seg = compute_segment(&u, 5, &tol).unwrap();
        assert!(seg.horizon.is_none());
        for n in 0..=5usize {
            let e = closed_form_e(&spec, n, &tol).unwrap();
            let rel = (&e - &seg.e[n]).norm() / seg.e[n].norm();
            assert!(rel < 1e-8, "E_{n} rel {rel}");
        }
        for n in 1..=4usize {
            let sr = structure_relation(&spec, &seg, n, &tol).unwrap();
            assert!(sr.residual < 1e-8, "structure n = {n}: {}", sr.residual);
            let sc = sigma_consistency(&spec, &seg, n, &tol).unwrap();
            assert!(sc < 1e-8, "sigma n = {n}: {sc}");
            let (monic, kappa) = ode_coefficients(&spec, &seg, n, &tol).unwrap();
            assert!(monic.residual < 1e-8, "monic ode n = {n}");
            assert!(kappa.residual < 1e-8, "kappa ode n = {n}");
        }
    }
}
