//! Matrix functionals as moment sequences, Pearson-driven moment
//! generation, and the functional algebra (`uQ`, `Qu`, `Du`, `u*`,
//! change of variable, equivalence/congruence).
//!
//! Moments, not weights, are the canonical representation; weights live in
//! [`crate::gallery`] as oracles. A functional may be shared read-only
//! across threads once its cache has been grown to the needed order.

use std::sync::{Arc, RwLock};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{
    self, det_not_identically_zero, flatten_blocks, hankel_blocks, poly_mul, psd_check, CMatrix,
    MatrixPolynomial, PsdVerdict, Tolerance,
};

/// A Pearson pair `(Φ, Ψ)` with `deg Φ ≤ 2`, `deg Ψ ≤ 1`, `det Φ ≢ 0`,
/// plus the seed moment `μ_0`. Drives the moment recurrence
/// `μ_{n+1}(ψ_1 + nφ_2) = −(n μ_{n−1} φ_0 + μ_n (ψ_0 + n φ_1))`.
#[derive(Clone, Debug)]
pub struct PearsonSpec {
    phi: MatrixPolynomial,
    psi: MatrixPolynomial,
    mu0: CMatrix,
}

impl PearsonSpec {
    pub fn new(phi: MatrixPolynomial, psi: MatrixPolynomial, mu0: CMatrix) -> Result<Self> {
        linalg::check_poly_dims(&phi, &psi)?;
        if phi.dim() != mu0.dim() {
            return Err(Error::DimensionMismatch {
                expected: phi.dim(),
                got: mu0.dim(),
            });
        }
        if phi.degree().is_none_or(|d| d > 2) {
            return Err(Error::InvalidParameter(
                "Phi must be nonzero with degree at most 2".into(),
            ));
        }
        if psi.degree().is_some_and(|d| d > 1) {
            return Err(Error::InvalidParameter("Psi must have degree at most 1".into()));
        }
        if !det_not_identically_zero(&phi, 1e-12) {
            return Err(Error::InvalidParameter(
                "det Phi vanishes identically".into(),
            ));
        }
        Ok(PearsonSpec { phi, psi, mu0 })
    }

    /// Scalar (m = 1) spec from coefficient lists.
    pub fn scalar(phi: &[Complex64], psi: &[Complex64], mu0: Complex64) -> Result<Self> {
        Self::new(
            MatrixPolynomial::scalar_poly(phi),
            MatrixPolynomial::scalar_poly(psi),
            CMatrix::scalar(1, mu0),
        )
    }

    pub fn dim(&self) -> usize {
        self.mu0.dim()
    }

    pub fn phi(&self) -> &MatrixPolynomial {
        &self.phi
    }

    pub fn psi(&self) -> &MatrixPolynomial {
        &self.psi
    }

    pub fn mu0(&self) -> &CMatrix {
        &self.mu0
    }

    pub fn phi_coeff(&self, k: usize) -> CMatrix {
        self.phi.coeff(k)
    }

    pub fn psi_coeff(&self, k: usize) -> CMatrix {
        self.psi.coeff(k)
    }

    /// `M_k = ψ_1 + k φ_2`, the recurrence (and ladder) matrix.
    pub fn m_k(&self, k: i64) -> CMatrix {
        &self.psi.coeff(1) + &self.phi.coeff(2).scale(Complex64::new(k as f64, 0.0))
    }

    /// Spec with `(Φ, Ψ)` replaced by `(Φ ψ_1^{-1}, Ψ ψ_1^{-1})`, so that
    /// the new ψ_1 is the identity. The Pearson equation is unchanged.
    pub fn normalized(&self, tol: &Tolerance) -> Result<Self> {
        let psi1 = self.psi.coeff(1);
        let inv = psi1
            .inv(tol.cond_max)
            .map_err(|_| Error::TildeBlocked("psi1 is singular".into()))?;
        Ok(PearsonSpec {
            phi: self.phi.mul_matrix_right(&inv)?,
            psi: self.psi.mul_matrix_right(&inv)?,
            mu0: self.mu0.clone(),
        })
    }
}

/// Moment oracle interface implemented by gallery weights.
pub trait MomentOracle: Send + Sync {
    fn dim(&self) -> usize;
    fn moment(&self, n: usize) -> Result<CMatrix>;
}

enum Source {
    Explicit(Vec<CMatrix>),
    Pearson(PearsonSpec),
    Oracle(Arc<dyn MomentOracle>),
    RightMul(Functional, MatrixPolynomial),
    LeftMul(Functional, MatrixPolynomial),
    Derivative(Functional),
    Adjoint(Functional),
    ChangeOfVariable(Functional, Complex64, Complex64),
    Equivalence(Functional, CMatrix, CMatrix),
}

struct Inner {
    dim: usize,
    source: Source,
    cache: RwLock<Vec<CMatrix>>,
    tol: Tolerance,
}

/// A matrix functional, determined by its moment sequence. Cheap to clone
/// (shared backing store); the moment cache is grow-only.
#[derive(Clone)]
pub struct Functional(Arc<Inner>);

impl std::fmt::Debug for Functional {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let kind = match &self.0.source {
            Source::Explicit(ms) => format!("explicit[{}]", ms.len()),
            Source::Pearson(_) => "pearson".into(),
            Source::Oracle(_) => "oracle".into(),
            Source::RightMul(..) => "right-mul".into(),
            Source::LeftMul(..) => "left-mul".into(),
            Source::Derivative(_) => "derivative".into(),
            Source::Adjoint(_) => "adjoint".into(),
            Source::ChangeOfVariable(..) => "change-of-variable".into(),
            Source::Equivalence(..) => "equivalence".into(),
        };
        let cached = self.0.cache.read().unwrap().len();
        write!(f, "Functional(dim={}, {kind}, cached={cached})", self.0.dim)
    }
}

impl Functional {
    fn from_source(dim: usize, source: Source) -> Self {
        Functional(Arc::new(Inner {
            dim,
            source,
            cache: RwLock::new(Vec::new()),
            tol: Tolerance::default(),
        }))
    }

    /// Functional with explicitly given moments; indices past the end are
    /// unavailable rather than zero.
    pub fn from_moments(moments: Vec<CMatrix>) -> Result<Self> {
        let dim = moments
            .first()
            .map(CMatrix::dim)
            .ok_or_else(|| Error::InvalidParameter("at least one moment required".into()))?;
        for m in &moments {
            if m.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: m.dim(),
                });
            }
        }
        Ok(Self::from_source(dim, Source::Explicit(moments)))
    }

    /// Moments generated on demand from a Pearson spec seeded with `μ_0`.
    pub fn from_pearson(spec: PearsonSpec) -> Self {
        Self::from_source(spec.dim(), Source::Pearson(spec))
    }

    pub fn from_oracle(oracle: Arc<dyn MomentOracle>) -> Self {
        Self::from_source(oracle.dim(), Source::Oracle(oracle))
    }

    pub fn dim(&self) -> usize {
        self.0.dim
    }

    /// The Pearson spec backing this functional, when it is
    /// Pearson-generated.
    pub fn pearson_spec(&self) -> Option<&PearsonSpec> {
        match &self.0.source {
            Source::Pearson(s) => Some(s),
            _ => None,
        }
    }

    /// The n-th moment `μ_n = ⟨xⁿI, u⟩`. Grows the cache; all intermediate
    /// moments are cached too.
    pub fn moment(&self, n: usize) -> Result<CMatrix> {
        {
            let cache = self.0.cache.read().unwrap();
            if let Some(m) = cache.get(n) {
                return Ok(m.clone());
            }
        }
        let mut cache = self.0.cache.write().unwrap();
        while cache.len() <= n {
            let k = cache.len();
            let next = self.compute_moment(k, &cache)?;
            cache.push(next);
        }
        Ok(cache[n].clone())
    }

    /// Moments `μ_0..μ_n` as a vector.
    pub fn moments(&self, n: usize) -> Result<Vec<CMatrix>> {
        self.moment(n)?;
        let cache = self.0.cache.read().unwrap();
        Ok(cache[..=n].to_vec())
    }

    fn compute_moment(&self, k: usize, have: &[CMatrix]) -> Result<CMatrix> {
        let zero = CMatrix::zeros(self.0.dim);
        match &self.0.source {
            Source::Explicit(ms) => ms.get(k).cloned().ok_or(Error::MomentUnavailable(k)),
            Source::Oracle(o) => o.moment(k),
            Source::Pearson(spec) => {
                if k == 0 {
                    return Ok(spec.mu0().clone());
                }
                // solve mu_k M_{k-1} = -((k-1) mu_{k-2} phi0 + mu_{k-1} (psi0 + (k-1) phi1))
                let n = k - 1;
                let nf = Complex64::new(n as f64, 0.0);
                let m_n = spec.m_k(n as i64);
                let mu_nm1 = if n == 0 { &zero } else { &have[n - 1] };
                let rhs = -&(&(mu_nm1 * &spec.phi_coeff(0)).scale(nf)
                    + &(&have[n] * &(&spec.psi_coeff(0) + &spec.phi_coeff(1).scale(nf))));
                m_n.solve_left(&rhs, self.0.tol.cond_max)
                    .map_err(|_| Error::RecurrenceBlocked(n))
            }
            Source::RightMul(u, q) => {
                let mut acc = zero;
                for (i, qi) in q.coeffs().iter().enumerate() {
                    acc = &acc + &(&u.moment(k + i)? * qi);
                }
                Ok(acc)
            }
            Source::LeftMul(u, q) => {
                let mut acc = zero;
                for (i, qi) in q.coeffs().iter().enumerate() {
                    acc = &acc + &(qi * &u.moment(k + i)?);
                }
                Ok(acc)
            }
            Source::Derivative(u) => {
                if k == 0 {
                    Ok(zero)
                } else {
                    Ok(u.moment(k - 1)?.scale(Complex64::new(-(k as f64), 0.0)))
                }
            }
            Source::Adjoint(u) => Ok(u.moment(k)?.adjoint()),
            Source::ChangeOfVariable(u, a, b) => {
                // nu_n = sum_i C(n,i) a^i b^{n-i} mu_i
                let mut acc = zero;
                let mut binom = 1.0_f64;
                for i in 0..=k {
                    if i > 0 {
                        binom = binom * ((k - i + 1) as f64) / (i as f64);
                    }
                    let w = Complex64::new(binom, 0.0) * a.powu(i as u32) * b.powu((k - i) as u32);
                    if w != Complex64::new(0.0, 0.0) {
                        acc = &acc + &u.moment(i)?.scale(w);
                    }
                }
                Ok(acc)
            }
            Source::Equivalence(u, t, s) => Ok(&(t * &u.moment(k)?) * s),
        }
    }

    /// `uQ`: moments `ν_n = Σ_k μ_{n+k} q_k`.
    pub fn right_multiply(&self, q: &MatrixPolynomial) -> Result<Functional> {
        if q.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: q.dim(),
            });
        }
        Ok(Self::from_source(
            self.dim(),
            Source::RightMul(self.clone(), q.clone()),
        ))
    }

    /// `Qu`: moments `ν_n = Σ_k q_k μ_{n+k}`.
    pub fn left_multiply(&self, q: &MatrixPolynomial) -> Result<Functional> {
        if q.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: q.dim(),
            });
        }
        Ok(Self::from_source(
            self.dim(),
            Source::LeftMul(self.clone(), q.clone()),
        ))
    }

    /// `Du`: moments `ν_n = −n μ_{n−1}`.
    pub fn derivative(&self) -> Functional {
        Self::from_source(self.dim(), Source::Derivative(self.clone()))
    }

    /// `u*`: moments `ν_n = μ_n^*`.
    pub fn adjoint(&self) -> Functional {
        Self::from_source(self.dim(), Source::Adjoint(self.clone()))
    }

    /// `u_t` for `t(x) = ax + b`: `⟨P, u_t⟩ = ⟨P∘t, u⟩`.
    pub fn change_of_variable(&self, a: Complex64, b: Complex64) -> Result<Functional> {
        if a == Complex64::new(0.0, 0.0) {
            return Err(Error::InvalidTransform(
                "change of variable needs a != 0".into(),
            ));
        }
        Ok(Self::from_source(
            self.dim(),
            Source::ChangeOfVariable(self.clone(), a, b),
        ))
    }

    /// `û = TuS` with `T`, `S` nonsingular.
    pub fn equivalence(&self, t: &CMatrix, s: &CMatrix) -> Result<Functional> {
        for m in [t, s] {
            if m.dim() != self.dim() {
                return Err(Error::DimensionMismatch {
                    expected: self.dim(),
                    got: m.dim(),
                });
            }
            if m.cond_estimate() > self.0.tol.cond_max {
                return Err(Error::InvalidTransform(
                    "equivalence factors must be nonsingular".into(),
                ));
            }
        }
        Ok(Self::from_source(
            self.dim(),
            Source::Equivalence(self.clone(), t.clone(), s.clone()),
        ))
    }

    /// Congruence `TuT*`.
    pub fn congruence(&self, t: &CMatrix) -> Result<Functional> {
        self.equivalence(t, &t.adjoint())
    }

    /// Normalize to `ν_0 = I` via the congruence `L^{-1} u (L^{-1})*`
    /// where `μ_0 = L L*`; requires `μ_0 > 0`. Returns the functional and
    /// the factor `L^{-1}` applied.
    pub fn normalized_congruence(&self, tol: &Tolerance) -> Result<(Functional, CMatrix)> {
        let mu0 = self.moment(0)?;
        let l = mu0.cholesky()?;
        let linv = l.inv(tol.cond_max)?;
        Ok((self.congruence(&linv)?, linv))
    }
}

/// `⟨P, u⟩ = Σ_i p_i μ_i` (coefficients left-multiply moments).
pub fn bracket(p: &MatrixPolynomial, u: &Functional) -> Result<CMatrix> {
    if p.dim() != u.dim() {
        return Err(Error::DimensionMismatch {
            expected: u.dim(),
            got: p.dim(),
        });
    }
    let mut acc = CMatrix::zeros(u.dim());
    for (i, pi) in p.coeffs().iter().enumerate() {
        acc = &acc + &(pi * &u.moment(i)?);
    }
    Ok(acc)
}

/// `⟨x^j P, u⟩`.
pub fn bracket_shifted(j: usize, p: &MatrixPolynomial, u: &Functional) -> Result<CMatrix> {
    let mut acc = CMatrix::zeros(u.dim());
    for (i, pi) in p.coeffs().iter().enumerate() {
        acc = &acc + &(pi * &u.moment(i + j)?);
    }
    Ok(acc)
}

/// Matrix inner product `⟨P, Q⟩_u = ⟨P, uQ*⟩`.
pub fn inner(p: &MatrixPolynomial, q: &MatrixPolynomial, u: &Functional) -> Result<CMatrix> {
    bracket(p, &u.right_multiply(&q.star())?)
}

/// Per-order flags of a block Hankel matrix Δ_k.
#[derive(Clone, Debug)]
pub struct HankelFlags {
    pub order: usize,
    pub nonsingular: bool,
    pub cond_estimate: f64,
    pub hermitian: bool,
    pub positive_definite: bool,
}

/// Δ_0..Δ_n with nonsingularity/hermiticity/positivity flags.
#[derive(Clone, Debug)]
pub struct HankelProfile {
    pub order: usize,
    pub flags: Vec<HankelFlags>,
}

impl HankelProfile {
    pub fn all_nonsingular(&self) -> bool {
        self.flags.iter().all(|f| f.nonsingular)
    }

    pub fn all_positive_definite(&self) -> bool {
        self.flags.iter().all(|f| f.positive_definite)
    }

    /// First order whose Δ is singular, if any.
    pub fn first_singular(&self) -> Option<usize> {
        self.flags.iter().position(|f| !f.nonsingular)
    }
}

/// Assemble Δ_0..Δ_n and flag each as nonsingular / hermitian / positive
/// definite.
pub fn hankel_profile(u: &Functional, n: usize, tol: &Tolerance) -> Result<HankelProfile> {
    let moments = u.moments(2 * n)?;
    let mut flags = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let delta = flatten_blocks(&hankel_blocks(&moments, k));
        let cond = delta.cond_estimate();
        let verdict = psd_check(&delta, tol);
        flags.push(HankelFlags {
            order: k,
            nonsingular: cond <= tol.cond_max,
            cond_estimate: cond,
            hermitian: verdict != PsdVerdict::NonHermitian,
            positive_definite: verdict == PsdVerdict::PositiveDefinite,
        });
    }
    Ok(HankelProfile { order: n, flags })
}

/// Residual of the Pearson moment identity at one `n`, for arbitrary
/// `(Φ, Ψ)` degrees: `n Σ_i μ_{n+i−1} φ_i + Σ_j μ_{n+j} ψ_j` (with
/// `μ_{−1} = 0`). Identically zero when `D(uΦ) = uΨ`.
pub fn pearson_residual_at(
    u: &Functional,
    phi: &MatrixPolynomial,
    psi: &MatrixPolynomial,
    n: usize,
) -> Result<CMatrix> {
    let dim = u.dim();
    let mut acc = CMatrix::zeros(dim);
    let nf = Complex64::new(n as f64, 0.0);
    for (i, fi) in phi.coeffs().iter().enumerate() {
        if n + i == 0 {
            continue; // mu_{-1} = 0
        }
        acc = &acc + &(&u.moment(n + i - 1)? * fi).scale(nf);
    }
    for (j, gj) in psi.coeffs().iter().enumerate() {
        acc = &acc + &(&u.moment(n + j)? * gj);
    }
    Ok(acc)
}

/// Largest relative Pearson residual over `0 ≤ n ≤ horizon`; the residual
/// at each `n` is scaled by the largest participating term.
pub fn pearson_residual(
    u: &Functional,
    phi: &MatrixPolynomial,
    psi: &MatrixPolynomial,
    horizon: usize,
) -> Result<f64> {
    let mut worst = 0.0_f64;
    for n in 0..=horizon {
        let res = pearson_residual_at(u, phi, psi, n)?;
        // backward-error scale: coefficient mass times the largest moment
        // in reach, so that rows that vanish identically (for instance at
        // even n for symmetric weights) do not divide noise by noise
        let nf = n as f64;
        let mut coeff_mass = 0.0_f64;
        let mut moment_scale = 0.0_f64;
        for (i, fi) in phi.coeffs().iter().enumerate() {
            if n + i > 0 {
                coeff_mass += nf * fi.norm();
                moment_scale = moment_scale.max(u.moment(n + i - 1)?.norm());
            }
        }
        for (j, gj) in psi.coeffs().iter().enumerate() {
            coeff_mass += gj.norm();
            moment_scale = moment_scale.max(u.moment(n + j)?.norm());
        }
        let scale = coeff_mass * moment_scale;
        if scale > 0.0 {
            worst = worst.max(res.norm() / scale);
        } else {
            worst = worst.max(res.norm());
        }
    }
    Ok(worst)
}

/// Relative distance between the moments of two functionals over
/// `0 ≤ n ≤ horizon`. Each index is scaled by the larger of its own and
/// its predecessor's norms, so an exactly-zero moment (symmetric weights)
/// is compared at the scale of its neighbors rather than against noise.
pub fn moments_rel_err(a: &Functional, b: &Functional, horizon: usize) -> Result<f64> {
    let mut worst = 0.0_f64;
    let mut prev_scale = 0.0_f64;
    for n in 0..=horizon {
        let ma = a.moment(n)?;
        let mb = b.moment(n)?;
        let own = ma.norm().max(mb.norm());
        let scale = own.max(prev_scale);
        let diff = (&ma - &mb).norm();
        if scale > 0.0 {
            worst = worst.max(diff / scale);
        } else {
            worst = worst.max(diff);
        }
        prev_scale = own;
    }
    Ok(worst)
}

/// `u · (Q R)`, the composition side of the identity `(uQ)R = u(QR)`.
pub fn right_multiply_poly_product(
    u: &Functional,
    q: &MatrixPolynomial,
    r: &MatrixPolynomial,
) -> Result<Functional> {
    u.right_multiply(&poly_mul(q, r)?)
}
