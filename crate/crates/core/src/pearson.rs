//! Pearson-equation analysis: bases of the right-submodules `M_{p,q}(u)`,
//! cyclicity at `(p, q) = (2, 1)`, the scalar ideal generator and class,
//! and the tilde chain `(Φ̃, Ψ̃)` that makes `ũ = uΦψ_1^{−1}` Pearson
//! again.
//!
//! Everything here certifies properties on a *finite* moment horizon: the
//! defining equations are only checked for `n ≤ N_cert`, and every report
//! carries the horizon it used.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::functional::{hankel_profile, pearson_residual, Functional, PearsonSpec};
use crate::linalg::{
    det_not_identically_zero, lstsq, lu_solve_raw, nullspace, poly_det_adj, poly_mul, CMatrix,
    MatrixPolynomial, Tolerance,
};
use crate::mop::{compute_segment, derivative_segment};

fn czero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// Default certificate horizon for a (p, q) module computation.
pub fn default_horizon(dim: usize, p: usize, q: usize) -> usize {
    2 * dim * (p + q + 3)
}

/// Basis of the right-module `M_{p,q}(u) = {Φ : D(uΦ) = uΨ, deg Ψ ≤ q}`.
#[derive(Clone, Debug)]
pub struct ModuleBasis {
    pub p: usize,
    pub q: usize,
    /// Generator pairs `(Φ, Ψ)`, packed from an orthonormal nullspace
    /// basis m columns at a time, so no generator lies in the module
    /// generated by the others.
    pub generators: Vec<(MatrixPolynomial, MatrixPolynomial)>,
    /// Minimal number of right-module generators: `ceil(d / m)` for the
    /// d-dimensional column solution space.
    pub rank: usize,
    /// Dimension d of the single-column solution space.
    pub solution_dim: usize,
    /// Moment equations used (n = 0..N_cert).
    pub horizon: usize,
    /// Separation between the smallest kept and largest discarded
    /// singular value of the certificate system.
    pub singular_value_gap: f64,
    /// Largest relative Pearson residual of the returned generators,
    /// re-verified directly on the moment equations.
    pub certificate_residual: f64,
}

/// Compute a basis of `M_{p,q}(u)` from the homogeneous moment system
/// `n Σ_i μ_{n+i−1} φ_i + Σ_j μ_{n+j} ψ_j = 0`, `0 ≤ n ≤ N_cert`.
///
/// The unknowns multiply the moments on the right, so the system acts on
/// each column independently; the nullspace is computed for one column
/// stack of height `(p+q+2)·m` and the right-module structure follows.
pub fn module_basis(
    u: &Functional,
    p: usize,
    q: usize,
    n_cert: usize,
    tol: &Tolerance,
) -> Result<ModuleBasis> {
    let _ = tol;
    let m = u.dim();
    let cols = (p + q + 2) * m;
    let rows = (n_cert + 1) * m;
    let moments = u.moments(n_cert + p.max(q + 1))?;
    let mut a = vec![czero(); rows * cols];
    for n in 0..=n_cert {
        let nf = Complex64::new(n as f64, 0.0);
        for r in 0..m {
            let row = n * m + r;
            for i in 0..=p {
                if n + i == 0 {
                    continue; // mu_{-1} = 0
                }
                let mu = &moments[n + i - 1];
                for c in 0..m {
                    a[row * cols + i * m + c] += nf * mu.get(r, c);
                }
            }
            for j in 0..=q {
                let mu = &moments[n + j];
                for c in 0..m {
                    a[row * cols + (p + 1 + j) * m + c] += mu.get(r, c);
                }
            }
        }
    }
    let ns = nullspace(rows, cols, &a, 1e-7);
    let d = ns.basis.len();
    let rank = d.div_ceil(m);
    let mut generators = Vec::with_capacity(rank);
    for g in 0..rank {
        let mut phi_coeffs = vec![CMatrix::zeros(m); p + 1];
        let mut psi_coeffs = vec![CMatrix::zeros(m); q + 1];
        for col in 0..m {
            let idx = g * m + col;
            if idx >= d {
                break;
            }
            let v = &ns.basis[idx];
            for (i, pc) in phi_coeffs.iter_mut().enumerate() {
                for r in 0..m {
                    pc.set(r, col, v[i * m + r]);
                }
            }
            for (j, qc) in psi_coeffs.iter_mut().enumerate() {
                for r in 0..m {
                    qc.set(r, col, v[(p + 1 + j) * m + r]);
                }
            }
        }
        // flush SVD noise so trimmed degrees are meaningful
        let scale = phi_coeffs
            .iter()
            .chain(psi_coeffs.iter())
            .map(|c| c.norm())
            .fold(0.0, f64::max);
        for c in phi_coeffs.iter_mut().chain(psi_coeffs.iter_mut()) {
            if c.norm() <= 1e-10 * scale {
                *c = CMatrix::zeros(m);
            }
        }
        generators.push((
            MatrixPolynomial::from_coeffs(m, phi_coeffs)?,
            MatrixPolynomial::from_coeffs(m, psi_coeffs)?,
        ));
    }
    // independent re-verification on the generators; the nullspace stores
    // (Phi, Psi) with D(uPhi) = uPsi, which is what the residual checks
    let mut cert = 0.0_f64;
    for (phi, psi) in &generators {
        cert = cert.max(pearson_residual(u, phi, psi, n_cert)?);
    }
    Ok(ModuleBasis {
        p,
        q,
        generators,
        rank,
        solution_dim: d,
        horizon: n_cert,
        singular_value_gap: ns.gap,
        certificate_residual: cert,
    })
}

/// Verdict of the (2,1) cyclicity check.
#[derive(Clone, Debug)]
pub enum Cyclicity {
    /// Rank-one module with a `det ≢ 0` generator.
    Cyclic {
        generator: (MatrixPolynomial, MatrixPolynomial),
    },
    /// Rank-one module whose generator has identically zero determinant,
    /// so no Pearson pair with `det Φ ≢ 0` exists at (2, 1).
    CyclicDegenerate {
        generator: (MatrixPolynomial, MatrixPolynomial),
    },
    /// `M_{2,1}(u) = {0}`.
    NotCyclic,
    /// Some of Δ_0, Δ_1, Δ_2 is singular (the criterion does not apply),
    /// or the computed rank exceeds the theoretical bound.
    Inconclusive { reason: String },
}

/// Check cyclicity of `M_{2,1}(u)`: with Δ_0, Δ_1, Δ_2 nonsingular the
/// module has at most one generator.
pub fn cyclicity_check(u: &Functional, tol: &Tolerance) -> Result<Cyclicity> {
    let prof = hankel_profile(u, 2, tol)?;
    if let Some(k) = prof.first_singular() {
        return Ok(Cyclicity::Inconclusive {
            reason: format!("Delta_{k} is singular"),
        });
    }
    let basis = module_basis(u, 2, 1, default_horizon(u.dim(), 2, 1), tol)?;
    match basis.rank {
        0 => Ok(Cyclicity::NotCyclic),
        1 => {
            let generator = basis.generators.into_iter().next().unwrap();
            if det_not_identically_zero(&generator.0, 1e-9) {
                Ok(Cyclicity::Cyclic { generator })
            } else {
                Ok(Cyclicity::CyclicDegenerate { generator })
            }
        }
        r => Ok(Cyclicity::Inconclusive {
            reason: format!("rank {r} exceeds the cyclicity bound"),
        }),
    }
}

/// Scalar-ideal result: the minimal monic scalar `α` with `D(uαI) = uΨ`,
/// its `Ψ`, and the class `s = max(deg α − 2, deg Ψ − 1)`.
#[derive(Clone, Debug)]
pub struct ClassReport {
    /// Monic scalar generator (dim-1 polynomial).
    pub alpha: MatrixPolynomial,
    pub psi: MatrixPolynomial,
    pub class: i64,
    /// Moment equations the certificate used.
    pub certified_to: usize,
    /// Re-verified residual of `D(uαI) = uΨ` on the horizon.
    pub residual: f64,
}

/// Find the minimal-degree scalar `α` (searched over `deg α = 0..d_max`,
/// with `deg Ψ ≤ deg α + 2` unless a seed from `known` widens the window)
/// such that `D(uαI) = uΨ` holds on the certificate horizon.
pub fn scalar_ideal(
    u: &Functional,
    known: Option<&PearsonSpec>,
    d_max: usize,
    n_cert: usize,
    tol: &Tolerance,
) -> Result<ClassReport> {
    // seed from det Phi when a Pearson pair is known: alpha_0 = det Phi
    // and Psi_0 = Phi (adj Phi)' + Psi adj Phi bound the search window
    let mut q_extra = 2usize;
    let mut d_top = d_max;
    if let Some(spec) = known {
        let (det, adj) = poly_det_adj(spec.phi());
        if let Some(da) = det.degree() {
            d_top = d_top.min(da);
        }
        let psi0 = poly_mul(spec.phi(), &adj.derivative())?.add(&poly_mul(spec.psi(), &adj)?)?;
        if let Some(dq) = psi0.degree() {
            q_extra = q_extra.max(dq.saturating_sub(d_top));
        }
    }
    for d in 0..=d_top {
        let q = d + q_extra;
        if let Some(report) = try_scalar_degree(u, d, q, n_cert, tol)? {
            return Ok(report);
        }
    }
    Err(Error::NoGeneratorFound(d_max))
}

/// Look for a nonzero scalar `α` of degree ≤ d admitting some `Ψ` of
/// degree ≤ q on the horizon; `None` when the nullspace has no α content.
fn try_scalar_degree(
    u: &Functional,
    d: usize,
    q: usize,
    n_cert: usize,
    tol: &Tolerance,
) -> Result<Option<ClassReport>> {
    let m = u.dim();
    let n_alpha = d + 1;
    let n_psi = (q + 1) * m * m;
    let cols = n_alpha + n_psi;
    let rows = (n_cert + 1) * m * m;
    let moments = u.moments(n_cert + d.max(q) + 1)?;
    let mut a = vec![czero(); rows * cols];
    for n in 0..=n_cert {
        let nf = Complex64::new(n as f64, 0.0);
        for r in 0..m {
            for c in 0..m {
                let row = (n * m + r) * m + c;
                for i in 0..=d {
                    if n + i == 0 {
                        continue;
                    }
                    a[row * cols + i] += nf * moments[n + i - 1].get(r, c);
                }
                for j in 0..=q {
                    for k in 0..m {
                        let col = n_alpha + (j * m + k) * m + c;
                        a[row * cols + col] += moments[n + j].get(r, k);
                    }
                }
            }
        }
    }
    let ns = nullspace(rows, cols, &a, 1e-7);
    if ns.basis.is_empty() {
        return Ok(None);
    }
    // The alpha components of the nullspace basis span a small subspace;
    // take the combination maximizing the alpha content (top eigenvector
    // of the alpha-block Gram matrix).
    let dn = ns.basis.len();
    let mut gram = vec![czero(); dn * dn];
    for i in 0..dn {
        for j in 0..dn {
            let mut s = czero();
            for r in 0..n_alpha {
                s += ns.basis[i][r].conj() * ns.basis[j][r];
            }
            gram[i * dn + j] = s;
        }
    }
    let (w, qv) = CMatrix::from_vec(dn, gram)?.hermitian_eigen();
    let best = dn - 1;
    if w[best] <= 1e-12 {
        return Ok(None);
    }
    let mut combo = vec![czero(); ns.basis[0].len()];
    for (j, v) in ns.basis.iter().enumerate() {
        let weight = qv.get(j, best);
        for (slot, &x) in v.iter().enumerate() {
            combo[slot] += weight * x;
        }
    }
    let mut alpha_coeffs: Vec<Complex64> = combo[..n_alpha].to_vec();
    let amax = alpha_coeffs.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if amax <= 1e-10 {
        return Ok(None);
    }
    for z in alpha_coeffs.iter_mut() {
        if z.norm() < 1e-10 * amax {
            *z = czero();
        }
    }
    let lead_idx = (0..n_alpha)
        .rev()
        .find(|&i| alpha_coeffs[i].norm() > 0.0)
        .unwrap();
    let lead = alpha_coeffs[lead_idx];
    for z in alpha_coeffs.iter_mut() {
        *z /= lead;
    }
    alpha_coeffs.truncate(lead_idx + 1);
    let alpha = MatrixPolynomial::scalar_poly(&alpha_coeffs);
    let psi = solve_psi_for_alpha(u, &alpha, q, n_cert, &moments)?;
    let phi_alpha = alpha_identity(&alpha, m)?;
    let residual = pearson_residual(u, &phi_alpha, &psi, n_cert)?;
    if residual > 100.0 * tol.rel {
        return Ok(None);
    }
    let deg_a = alpha.degree().unwrap_or(0) as i64;
    let deg_q = psi.degree().map(|x| x as i64).unwrap_or(0);
    let class = (deg_a - 2).max(deg_q - 1);
    Ok(Some(ClassReport {
        alpha,
        psi,
        class,
        certified_to: n_cert,
        residual,
    }))
}

/// `α · I` as a dim-m polynomial.
pub fn alpha_identity(alpha: &MatrixPolynomial, m: usize) -> Result<MatrixPolynomial> {
    MatrixPolynomial::identity(m).mul_scalar_poly(alpha)
}

/// Given α, solve `Σ_j μ_{n+j} ψ_j = −n Σ_i μ_{n+i−1} α_i` for Ψ by
/// least squares, one column of Ψ at a time.
fn solve_psi_for_alpha(
    u: &Functional,
    alpha: &MatrixPolynomial,
    q: usize,
    n_cert: usize,
    moments: &[CMatrix],
) -> Result<MatrixPolynomial> {
    let m = u.dim();
    let acoef = alpha.coeffs();
    let rows = (n_cert + 1) * m;
    let cols = (q + 1) * m;
    let mut a = vec![czero(); rows * cols];
    let mut rhs_cols: Vec<Vec<Complex64>> = vec![vec![czero(); rows]; m];
    for n in 0..=n_cert {
        let nf = Complex64::new(n as f64, 0.0);
        for r in 0..m {
            let row = n * m + r;
            for j in 0..=q {
                for k in 0..m {
                    a[row * cols + j * m + k] = moments[n + j].get(r, k);
                }
            }
            for (i, ai) in acoef.iter().enumerate() {
                if n + i == 0 {
                    continue;
                }
                let w = nf * ai.get(0, 0);
                for (c, rhs) in rhs_cols.iter_mut().enumerate() {
                    rhs[row] -= w * moments[n + i - 1].get(r, c);
                }
            }
        }
    }
    // row-equilibrate (scaling a row together with its right-hand side
    // leaves the solution unchanged); the gamma families span dozens of
    // orders of magnitude otherwise
    for row in 0..rows {
        let mut nrm = 0.0_f64;
        for k in 0..cols {
            nrm += a[row * cols + k].norm_sqr();
        }
        let nrm = nrm.sqrt();
        if nrm > 0.0 {
            for k in 0..cols {
                a[row * cols + k] /= nrm;
            }
            for rhs in rhs_cols.iter_mut() {
                rhs[row] /= nrm;
            }
        }
    }
    let mut psi_coeffs = vec![CMatrix::zeros(m); q + 1];
    for (c, rhs) in rhs_cols.iter().enumerate() {
        let x = lstsq(rows, cols, &a, rhs, 1e-10);
        for (j, pc) in psi_coeffs.iter_mut().enumerate() {
            for k in 0..m {
                pc.set(k, c, x[j * m + k]);
            }
        }
    }
    let scale = psi_coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    for c in psi_coeffs.iter_mut() {
        if c.norm() <= 1e-9 * scale {
            *c = CMatrix::zeros(m);
        }
    }
    MatrixPolynomial::from_coeffs(m, psi_coeffs)
}

/// Result of the tilde construction for `ũ = uΦψ_1^{−1}`.
#[derive(Debug)]
pub struct TildeResult {
    pub spec: PearsonSpec,
    /// The right factor `Φψ_1^{−1}` with `ũ = u · phi_normalized`.
    pub phi_normalized: MatrixPolynomial,
    /// Residual of `D(ũΦ̃) = ũΨ̃` on the verification horizon.
    pub residual: f64,
}

/// The Pearson data of `ũ = uΦψ_1^{−1}`: with `(Φ, Ψ)` normalized to
/// `ψ_1 = I`, set `φ̃_2 = φ_2`, `ψ̃_1 = I + 2φ_2` and solve
/// `ΨΦ̃ + ΦΦ̃′ = ΦΨ̃` coefficient-wise for `φ̃_0, φ̃_1, ψ̃_0`.
pub fn tilde_pearson(spec: &PearsonSpec, u: &Functional, tol: &Tolerance) -> Result<TildeResult> {
    let m = spec.dim();
    let prof = hankel_profile(u, 3, tol)?;
    if let Some(k) = prof.first_singular() {
        return Err(Error::TildeBlocked(format!("Delta_{k} is singular")));
    }
    let norm = spec.normalized(tol)?;
    let phi0 = norm.phi_coeff(0);
    let phi1 = norm.phi_coeff(1);
    let phi2 = norm.phi_coeff(2);
    let psi0 = norm.psi_coeff(0);
    let id = CMatrix::identity(m);
    let sum = &id + &phi2;
    if sum.cond_estimate() > tol.cond_max {
        return Err(Error::TildeBlocked("psi1 + phi2 is singular".into()));
    }
    // coefficient equations, unknowns (phi~_0, phi~_1, psi~_0) multiplied
    // from the left by known matrices:
    //   x^2:  (I + phi2) phi~_1 − phi2 psi~_0             = phi1 − psi0 phi2
    //   x^1:  phi~_0 + (psi0 + phi1) phi~_1 − phi1 psi~_0 = phi0
    //   x^0:  psi0 phi~_0 + phi0 phi~_1 − phi0 psi~_0     = 0
    let psi0_plus_phi1 = &psi0 + &phi1;
    let rhs2 = &phi1 - &(&psi0 * &phi2);
    let n = 3 * m;
    let mut a = vec![czero(); n * n];
    let put = |a: &mut Vec<Complex64>, br: usize, bc: usize, mat: &CMatrix, sign: f64| {
        for i in 0..m {
            for j in 0..m {
                a[(br * m + i) * n + bc * m + j] += Complex64::new(sign, 0.0) * mat.get(i, j);
            }
        }
    };
    put(&mut a, 0, 1, &sum, 1.0);
    put(&mut a, 0, 2, &phi2, -1.0);
    put(&mut a, 1, 0, &id, 1.0);
    put(&mut a, 1, 1, &psi0_plus_phi1, 1.0);
    put(&mut a, 1, 2, &phi1, -1.0);
    put(&mut a, 2, 0, &psi0, 1.0);
    put(&mut a, 2, 1, &phi0, 1.0);
    put(&mut a, 2, 2, &phi0, -1.0);
    let mut rhs = vec![czero(); n * m];
    for i in 0..m {
        for c in 0..m {
            rhs[i * m + c] = rhs2.get(i, c);
            rhs[(m + i) * m + c] = phi0.get(i, c);
        }
    }
    lu_solve_raw(n, &mut a, m, &mut rhs, tol.cond_max)
        .map_err(|_| Error::TildeBlocked("tilde coefficient system is singular".into()))?;
    let tphi0 = CMatrix::from_fn(m, |i, c| rhs[i * m + c]);
    let tphi1 = CMatrix::from_fn(m, |i, c| rhs[(m + i) * m + c]);
    let tpsi0 = CMatrix::from_fn(m, |i, c| rhs[(2 * m + i) * m + c]);
    let tpsi1 = &id + &phi2.scale(Complex64::new(2.0, 0.0));
    let tphi = MatrixPolynomial::from_coeffs(m, vec![tphi0, tphi1, phi2.clone()])?;
    let tpsi = MatrixPolynomial::from_coeffs(m, vec![tpsi0, tpsi1])?;
    if !det_not_identically_zero(&tphi, 1e-12) {
        return Err(Error::TildeBlocked("det of tilde Phi vanishes".into()));
    }
    let u_tilde = u.right_multiply(norm.phi())?;
    let mu0_t = u_tilde.moment(0)?;
    let tilde_spec = PearsonSpec::new(tphi.clone(), tpsi.clone(), mu0_t)?;
    let horizon = default_horizon(m, 2, 1).min(24);
    let residual = pearson_residual(&u_tilde, &tphi, &tpsi, horizon)?;
    Ok(TildeResult {
        spec: tilde_spec,
        phi_normalized: norm.phi().clone(),
        residual,
    })
}

/// One link of the derivative chain.
#[derive(Debug)]
pub struct ChainLink {
    /// `u^{(j+1)} = u^{(j)} Φ^{(j)} (ψ_1^{(j)})^{−1}`.
    pub functional: Functional,
    /// Pearson data of the new functional.
    pub spec: PearsonSpec,
    /// Residual of the tilde Pearson certificate at this link.
    pub pearson_residual: f64,
    /// Orthogonality defect of the monic-normalized (j+1)-th derivatives
    /// of the base segment against the new functional.
    pub derivative_orthogonality: f64,
}

/// Iterate the tilde construction `depth` times, verifying at each level
/// that the monic-normalized higher derivatives of the base MOP stay
/// orthogonal with respect to the chain functional.
pub fn derivative_chain(
    spec: &PearsonSpec,
    u: &Functional,
    depth: usize,
    base_degree: usize,
    tol: &Tolerance,
) -> Result<Vec<ChainLink>> {
    let mut links = Vec::with_capacity(depth);
    let base = compute_segment(u, base_degree, tol)?;
    let mut cur_u = u.clone();
    let mut cur_spec = spec.clone();
    for level in 0..depth {
        let t = tilde_pearson(&cur_spec, &cur_u, tol).map_err(|e| Error::ChainBroken {
            level,
            reason: e.to_string(),
        })?;
        let next_u = cur_u
            .right_multiply(&t.phi_normalized)
            .map_err(|e| Error::ChainBroken {
                level,
                reason: e.to_string(),
            })?;
        // (level+1)-th derivatives of the base segment, monic-normalized
        let order = level + 1;
        let mut worst = 0.0_f64;
        for k in (order + 1)..base.polys.len() {
            let mut qpoly = base.polys[k].clone();
            let mut scale = 1.0;
            for step in 0..order {
                qpoly = qpoly.derivative();
                scale *= (k - step) as f64;
            }
            let qpoly = qpoly.scale(Complex64::new(1.0 / scale, 0.0));
            let deg = k - order;
            let en = crate::functional::bracket_shifted(deg, &qpoly, &next_u)?;
            for j in 0..deg {
                let b = crate::functional::bracket_shifted(j, &qpoly, &next_u)?;
                worst = worst.max(b.norm() / en.norm().max(1e-300));
            }
        }
        links.push(ChainLink {
            functional: next_u.clone(),
            spec: t.spec.clone(),
            pearson_residual: t.residual,
            derivative_orthogonality: worst,
        });
        cur_u = next_u;
        cur_spec = t.spec;
    }
    Ok(links)
}

/// The three equivalent differential characterizations evaluated on one
/// functional, for the characterization tests: (a) derivative-segment
/// orthogonality, (b) ladder relation with `γ_n − b_n` nonsingular,
/// (c) quasi-orthogonality of `(P_n)` against `ũ = uΦ` (order ≤ 2) and
/// `w = D(uΦ)` (order ≤ 1).
pub struct P21Summary {
    pub derivative_orthogonality: f64,
    pub ladder_residual: f64,
    pub gamma_minus_b_ok: bool,
    pub quasi_order_u_tilde: crate::mop::QuasiOrthogonality,
    pub quasi_order_w: crate::mop::QuasiOrthogonality,
}

pub fn p21_summary(
    u: &Functional,
    spec: &PearsonSpec,
    n_max: usize,
    tol: &Tolerance,
) -> Result<P21Summary> {
    let seg = compute_segment(u, n_max, tol)?;
    let dseg = derivative_segment(&seg, spec, u, tol)?;
    let lad = crate::mop::ladder_coefficients(&seg, &dseg, tol)?;
    let u_tilde = u.right_multiply(spec.phi())?;
    let w = u_tilde.derivative();
    let q_t = crate::mop::quasi_orthogonality_order(&seg, &u_tilde, 4, tol)?;
    let q_w = crate::mop::quasi_orthogonality_order(&seg, &w, 4, tol)?;
    Ok(P21Summary {
        derivative_orthogonality: dseg.orthogonality_residual,
        ladder_residual: lad.residual,
        gamma_minus_b_ok: lad.gamma_minus_b_nonsingular.iter().all(|&x| x),
        quasi_order_u_tilde: q_t,
        quasi_order_w: q_w,
    })
}
