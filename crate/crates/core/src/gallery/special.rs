//! Scalar special functions and quadrature backing the weight oracles.
//! Internal helpers; the public oracle surface lives in the parent module.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;

/// Lanczos approximation (g = 7, 9 coefficients) of the gamma function
/// for complex argument.
pub fn gamma_complex(z: Complex64) -> Complex64 {
    const G: f64 = 7.0;
    const P: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.5203681218851,
        -1259.1392167224028,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507343278686905,
        -0.13857109526572012,
        9.984_369_578_019_572e-6,
        1.5056327351493116e-7,
    ];
    if z.re < 0.5 {
        // reflection
        let pi = std::f64::consts::PI;
        return Complex64::new(pi, 0.0) / ((Complex64::new(pi, 0.0) * z).sin() * gamma_complex(Complex64::new(1.0, 0.0) - z));
    }
    let z = z - 1.0;
    let mut t = Complex64::new(P[0], 0.0);
    for (i, &p) in P.iter().enumerate().skip(1) {
        t += p / (z + i as f64);
    }
    let w = z + G + 0.5;
    let two_pi_sqrt = (2.0 * std::f64::consts::PI).sqrt();
    two_pi_sqrt * w.powc(z + 0.5) * (-w).exp() * t
}

/// Γ(x) for real argument.
pub fn gamma(x: f64) -> f64 {
    gamma_complex(Complex64::new(x, 0.0)).re
}

/// Digamma ψ(x) for real x > 0: upward recurrence shift to x ≥ 8, then
/// the asymptotic series through x^{-12}.
pub fn digamma(x: f64) -> f64 {
    assert!(x > 0.0, "digamma needs a positive argument");
    let mut acc = 0.0;
    let mut x = x;
    while x < 8.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    // B_2/2 x^-2, B_4/4 x^-4, ...
    let series = inv2
        * (1.0 / 12.0
            - inv2
                * (1.0 / 120.0 - inv2 * (1.0 / 252.0 - inv2 * (1.0 / 240.0 - inv2 / 132.0))));
    acc + x.ln() - 0.5 * inv - series
}

/// Tanh–sinh (double exponential) quadrature of a matrix-valued function
/// on the finite interval (a, b). The integrand receives `(x, x−a, b−x)`
/// with the endpoint distances computed from the transform itself, so
/// integrable endpoint singularities keep full precision. Refines the
/// level until the relative change is below `tol_rel` (or 10 levels).
pub fn integrate_matrix_ep(
    f: &dyn Fn(f64, f64, f64) -> CMatrix,
    a: f64,
    b: f64,
    dim: usize,
    tol_rel: f64,
) -> CMatrix {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let pi_half = 0.5 * std::f64::consts::PI;
    let t_max = 6.5_f64;
    // x(t) = tanh(pi/2 sinh t): 1 - x = e^{-s}/cosh s, 1 + x = e^{s}/cosh s
    let eval = |t: f64| -> Option<(f64, f64, f64, f64)> {
        let s = pi_half * t.sinh();
        let ch = s.cosh();
        if !ch.is_finite() {
            return None;
        }
        let w = pi_half * t.cosh() / (ch * ch);
        if w < 1e-300 {
            return None;
        }
        let dist_hi = (-s).exp() / ch; // 1 - tanh(s)
        let dist_lo = s.exp() / ch; // 1 + tanh(s)
        Some((s.tanh(), dist_lo, dist_hi, w))
    };
    // level refinement is incremental: halving h keeps the old nodes, so
    // acc_{h/2} = acc_h / 2 + (h/2) * (new odd-index nodes)
    let mut h = 1.0_f64;
    let mut acc = CMatrix::zeros(dim);
    let mut mass = 0.0_f64; // integral of ||f||, the natural residual scale
    {
        let n_steps = (t_max / h).ceil() as i64;
        for k in -n_steps..=n_steps {
            if let Some((x, dlo, dhi, w)) = eval(k as f64 * h) {
                let (da, db) = (half * dlo, half * dhi);
                if da <= 0.0 || db <= 0.0 {
                    continue;
                }
                let v = f(mid + half * x, da, db);
                mass += v.norm() * w * half.abs() * h;
                acc = &acc + &v.scale(Complex64::new(w * half * h, 0.0));
            }
        }
    }
    for _level in 0..10 {
        h *= 0.5;
        let n_steps = (t_max / h).ceil() as i64;
        let mut new_part = CMatrix::zeros(dim);
        let mut new_mass = 0.0_f64;
        for k in (-n_steps..=n_steps).filter(|k| k % 2 != 0) {
            if let Some((x, dlo, dhi, w)) = eval(k as f64 * h) {
                let (da, db) = (half * dlo, half * dhi);
                if da <= 0.0 || db <= 0.0 {
                    continue;
                }
                let v = f(mid + half * x, da, db);
                new_mass += v.norm() * w * half.abs() * h;
                new_part = &new_part + &v.scale(Complex64::new(w * half * h, 0.0));
            }
        }
        let refined = &acc.scale(Complex64::new(0.5, 0.0)) + &new_part;
        let diff = (&refined - &acc).norm();
        mass = 0.5 * mass + new_mass;
        acc = refined;
        if diff <= tol_rel * mass.max(acc.norm()) {
            break;
        }
    }
    acc
}

/// [`integrate_matrix_ep`] for integrands that only need the point.
pub fn integrate_matrix(
    f: &dyn Fn(f64) -> CMatrix,
    a: f64,
    b: f64,
    dim: usize,
    tol_rel: f64,
) -> CMatrix {
    integrate_matrix_ep(&|x, _, _| f(x), a, b, dim, tol_rel)
}

/// Matrix exponential by scaling and squaring with a Taylor series.
pub fn matrix_exp(a: &CMatrix) -> CMatrix {
    let norm = a.norm();
    let s = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let b = a.scale(Complex64::new(0.5_f64.powi(s), 0.0));
    let mut term = CMatrix::identity(a.dim());
    let mut acc = CMatrix::identity(a.dim());
    for k in 1..80 {
        term = (&term * &b).scale(Complex64::new(1.0 / k as f64, 0.0));
        acc = &acc + &term;
        if term.norm() <= 1e-18 * acc.norm() {
            break;
        }
    }
    for _ in 0..s {
        acc = &acc * &acc;
    }
    acc
}

/// Eigenvalues of a small complex matrix via its characteristic
/// polynomial (Faddeev–LeVerrier) and Durand–Kerner root finding. Used
/// only for spectral precondition checks on gallery parameters.
#[allow(clippy::needless_range_loop)]
pub fn small_eigenvalues(a: &CMatrix) -> Result<Vec<Complex64>> {
    let m = a.dim();
    if m > 6 {
        return Err(Error::InvalidParameter(
            "eigenvalue precondition checks support dim <= 6".into(),
        ));
    }
    // char poly lambda^m + c_1 lambda^{m-1} + ... + c_m
    let mut coeffs = vec![Complex64::new(0.0, 0.0); m + 1];
    coeffs[0] = Complex64::new(1.0, 0.0);
    let mut mk = a.clone();
    let mut c = -mk.trace();
    coeffs[1] = c;
    for k in 2..=m {
        let shifted = &mk + &CMatrix::scalar(m, c);
        mk = a * &shifted;
        c = -mk.trace() / (k as f64);
        coeffs[k] = c;
    }
    // Durand-Kerner on p(z) = sum coeffs[i] z^{m-i}
    let p = |z: Complex64| -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &ci in coeffs.iter() {
            acc = acc * z + ci;
        }
        acc
    };
    let mut roots: Vec<Complex64> = (0..m)
        .map(|k| Complex64::new(0.4, 0.9).powu(k as u32 + 1))
        .collect();
    for _ in 0..200 {
        let mut delta = 0.0_f64;
        for i in 0..m {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..m {
                if i != j {
                    denom *= roots[i] - roots[j];
                }
            }
            let step = p(roots[i]) / denom;
            roots[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-13 {
            break;
        }
    }
    Ok(roots)
}

/// Matrix Pochhammer symbol `(A)_k = A (A+I) ⋯ (A+(k−1)I)`.
pub fn pochhammer(a: &CMatrix, k: usize) -> CMatrix {
    let mut acc = CMatrix::identity(a.dim());
    for j in 0..k {
        acc = &acc * &(a + &CMatrix::scalar(a.dim(), Complex64::new(j as f64, 0.0)));
    }
    acc
}
