//! Acceptance suite: one test per criterion, each printing a PASS line
//! with the measured quantities once its assertions hold. Tolerances are
//! pinned in code, not configurable.

use num_complex::Complex64;

use mopol::functional::{
    hankel_profile, moments_rel_err, pearson_residual, Functional, PearsonSpec,
};
use mopol::gallery::{self, GalleryParams};
use mopol::linalg::{det_not_identically_zero, CMatrix, Tolerance};
use mopol::mop::{
    compute_segment, derivative_orthogonality_best_fit, derivative_segment,
};
use mopol::pearson::{module_basis, scalar_ideal};
use mopol::zeroclass::{
    bessel_positivity_guard, closed_form_e, closed_form_pi, closed_form_ratios,
    diagonalizability_report, existence_check, hermiticity_obstruction,
    hermiticity_obstruction_commutator, ode_coefficients, ode_solve, right_ode, structure_relation,
    BlockReason, DiagVerdict, DiagWitness, ExistenceVerdict, GuardVerdict, ZeroClassSpec,
};

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn cz() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

fn tol() -> Tolerance {
    Tolerance::default()
}

/// Criterion 1: right-module ranks for the bounded-degree Pearson pairs
/// of the first gallery example, at certificate horizon >= 40 equations
/// with nullspace singular-value gap >= 1e6.
#[test]
fn acceptance_1_module_ranks() {
    let tol = tol();
    let entry = gallery::build("example1", &GalleryParams::default()).unwrap();
    let cases: [(usize, usize, usize); 7] = [
        (3, 2, 2),
        (2, 2, 1),
        (3, 1, 1),
        (2, 1, 1),
        (1, 2, 0),
        (3, 0, 0),
        (0, 3, 0),
    ];
    for (p, q, expected_rank) in cases {
        let basis = module_basis(&entry.functional, p, q, 40, &tol).unwrap();
        assert!(basis.horizon >= 40);
        assert_eq!(
            basis.rank, expected_rank,
            "M_({p},{q}) rank {} != {expected_rank}",
            basis.rank
        );
        assert!(
            basis.singular_value_gap >= 1e6,
            "M_({p},{q}) sv gap {}",
            basis.singular_value_gap
        );
        if basis.rank > 0 {
            assert!(
                basis.certificate_residual <= 1e-8,
                "M_({p},{q}) certificate {}",
                basis.certificate_residual
            );
        }
        if (p, q) == (2, 1) {
            // the lone generator must have identically zero determinant
            let (phi, _) = &basis.generators[0];
            assert!(
                !det_not_identically_zero(phi, 1e-9),
                "(2,1) generator unexpectedly has det != 0"
            );
        }
    }
    println!(
        "ACCEPTANCE 1 PASS: module ranks (3,2)=2 (2,2)=1 (3,1)=1 (2,1)=1(det=0) \
         (1,2)=(3,0)=(0,3)=0 at horizon 40, sv gap >= 1e6"
    );
}

/// Criterion 2: the Gaussian 2x2 example end to end.
#[test]
fn acceptance_2_gaussian_example_end_to_end() {
    let tol = tol();
    let entry = gallery::build("example2", &GalleryParams::default()).unwrap();
    let u = &entry.functional;

    // (a) Pearson residual of the printed pair against oracle moments
    let (phi, psi) = entry.pearson_pair.as_ref().unwrap();
    let res_a = pearson_residual(u, phi, psi, 12).unwrap();
    assert!(res_a <= 1e-8, "(a) residual {res_a}");

    // (b) class s = 1
    let report = scalar_ideal(u, entry.pearson.as_ref(), 4, 24, &tol).unwrap();
    assert_eq!(report.class, 1, "(b) class");

    // (c) derivative orthogonality for n <= 6
    let seg = compute_segment(u, 7, &tol).unwrap();
    let dseg = derivative_segment(&seg, entry.pearson.as_ref().unwrap(), u, &tol).unwrap();
    assert!(
        dseg.orthogonality_residual <= 1e-8,
        "(c) residual {}",
        dseg.orthogonality_residual
    );

    // (d) moments of u Phi^(0) match the printed derived weight
    let (q_poly, u1) = entry.derived_u1.as_ref().unwrap();
    let derived = u.right_multiply(q_poly).unwrap();
    let rel_d = moments_rel_err(&derived, u1, 12).unwrap();
    assert!(rel_d <= 1e-8, "(d) rel {rel_d}");

    // (e) right-sided ODE with the printed coefficient matrices
    let phi0 = q_poly.clone();
    let psi0 = psi.mul_matrix_right(&CMatrix::diag(&[c(1.0), c(2.0)])).unwrap();
    let spec0 = PearsonSpec::new(phi0, psi0, u.moment(0).unwrap()).unwrap();
    let mut worst_e = 0.0_f64;
    for n in 1..=5usize {
        let ode = right_ode(&spec0, u, &seg, n, &tol).unwrap();
        worst_e = worst_e.max(ode.residual);
        // printed matrices for a = 1: Phi* = [[3, -x], [0, 2]],
        // Lambda_n = n diag(4, 6)
        assert!(
            (&ode.phi_star.coeff(0) - &CMatrix::from_real(2, &[3.0, 0.0, 0.0, 2.0])).norm()
                < 1e-12
        );
        assert!(
            (&ode.phi_star.coeff(1) - &CMatrix::from_real(2, &[0.0, -1.0, 0.0, 0.0])).norm()
                < 1e-12
        );
        let lam = CMatrix::diag(&[c(4.0 * n as f64), c(6.0 * n as f64)]);
        assert!((&ode.lambda - &lam).norm() < 1e-12, "(e) Lambda_{n}");
    }
    assert!(worst_e <= 1e-8, "(e) residual {worst_e}");

    println!(
        "ACCEPTANCE 2 PASS: pearson {res_a:.2e}, class 1, derivative orthogonality \
         {:.2e}, derived weight {rel_d:.2e}, right ODE {worst_e:.2e}",
        dseg.orthogonality_residual
    );
}

/// Criterion 3: the x^4-coupled Gaussian weight is discriminated: no
/// nonsingular (2,1) generator, and no functional makes the derivatives
/// orthogonal.
#[test]
fn acceptance_3_counterexample_discrimination() {
    let tol = tol();
    let entry = gallery::build("example2_counter", &GalleryParams::default()).unwrap();
    let basis = module_basis(&entry.functional, 2, 1, 24, &tol).unwrap();
    for (phi, _) in &basis.generators {
        assert!(
            !det_not_identically_zero(phi, 1e-9),
            "counterexample has a det != 0 generator"
        );
    }
    let seg = compute_segment(&entry.functional, 5, &tol).unwrap();
    let res = derivative_orthogonality_best_fit(&seg).unwrap();
    assert!(res >= 1e-3, "best-fit residual only {res}");
    println!(
        "ACCEPTANCE 3 PASS: (2,1) module rank {} with no invertible generator; derivative \
         best-fit residual {res:.3e} >= 1e-3",
        basis.rank
    );
}

/// Criterion 4: the two Gamma-weight examples end to end.
#[test]
fn acceptance_4_gamma_examples() {
    let tol = tol();
    for name in ["example3", "example4"] {
        let entry = gallery::build(name, &GalleryParams::default()).unwrap();
        let u = &entry.functional;
        let (phi, psi) = entry.pearson_pair.as_ref().unwrap();
        let res = pearson_residual(u, phi, psi, 12).unwrap();
        assert!(res <= 1e-8, "{name} residual {res}");
        let report = scalar_ideal(u, entry.pearson.as_ref(), 4, 24, &tol).unwrap();
        assert_eq!(report.class, 1, "{name} class");
        // derived weight
        let (q_poly, u1) = entry.derived_u1.as_ref().unwrap();
        let derived = u.right_multiply(q_poly).unwrap();
        let rel = moments_rel_err(&derived, u1, 12).unwrap();
        assert!(rel <= 1e-8, "{name} derived weight rel {rel}");
        // right-sided ODE: example3 uses Phi itself, example4 the diag(r+1,1)
        // right multiple; both make u Phi hermitian
        let seg = compute_segment(u, 6, &tol).unwrap();
        let (phi_ode, psi_ode) = if name == "example3" {
            (phi.clone(), psi.clone())
        } else {
            let d = CMatrix::diag(&[c(1.0), c(1.0)]); // r = 0: diag(r+1, 1) = I
            (
                phi.mul_matrix_right(&d).unwrap(),
                psi.mul_matrix_right(&d).unwrap(),
            )
        };
        let spec_ode = PearsonSpec::new(phi_ode, psi_ode, u.moment(0).unwrap()).unwrap();
        let mut worst = 0.0_f64;
        for n in 1..=5usize {
            let ode = right_ode(&spec_ode, u, &seg, n, &tol).unwrap();
            worst = worst.max(ode.residual);
            if name == "example3" {
                // printed für a = 1, r = 0: Lambda_n = n [[1, n+1], [0, 2]]
                let nf = n as f64;
                let lam = CMatrix::from_vec(
                    2,
                    vec![c(nf), c(nf * (nf + 1.0)), cz(), c(2.0 * nf)],
                )
                .unwrap();
                assert!((&ode.lambda - &lam).norm() < 1e-10, "{name} Lambda_{n}");
            } else {
                // printed for a = 1, r = 0: Lambda_n = n [[1, 2], [0, 3]]
                let nf = n as f64;
                let lam =
                    CMatrix::from_vec(2, vec![c(nf), c(2.0 * nf), cz(), c(3.0 * nf)]).unwrap();
                assert!((&ode.lambda - &lam).norm() < 1e-10, "{name} Lambda_{n}");
            }
        }
        assert!(worst <= 1e-8, "{name} ode residual {worst}");
        println!(
            "ACCEPTANCE 4 PASS ({name}): pearson {res:.2e}, class 1, derived weight \
             {rel:.2e}, right ODE {worst:.2e}"
        );
    }
}

fn all_closed_forms_match(spec: &ZeroClassSpec, u: &Functional, label: &str, tol: &Tolerance) {
    let seg = compute_segment(u, 6, tol).unwrap();
    assert!(seg.polys.len() >= 7, "{label}: segment too short");
    for n in 0..=6usize {
        let e = closed_form_e(spec, n, tol).unwrap();
        let rel = (&e - &seg.e[n]).norm() / seg.e[n].norm();
        assert!(rel <= 1e-8, "{label} E_{n} rel {rel}");
        let pi = closed_form_pi(spec, n, tol).unwrap();
        let rel = (&pi - &seg.pi[n]).norm() / seg.pi[n].norm().max(1.0);
        assert!(rel <= 1e-8, "{label} pi_{n} rel {rel}");
        let (cap_pi, ratio) = closed_form_ratios(spec, n, tol).unwrap();
        let cap_direct = &seg.e[n].inv(tol.cond_max).unwrap() * &(&seg.pi[n] * &seg.e[n]);
        let rel = (&cap_pi - &cap_direct).norm() / cap_direct.norm().max(1.0);
        assert!(rel <= 1e-8, "{label} Pi_{n} rel {rel}");
        if n + 1 < seg.polys.len() {
            let direct = seg.e[n].solve(&seg.e[n + 1], tol.cond_max).unwrap();
            let rel = (&ratio - &direct).norm() / direct.norm();
            assert!(rel <= 1e-8, "{label} ratio at {n} rel {rel}");
        }
    }
}

/// Criterion 5: zero-class closed forms match Hankel values on the scalar
/// classical fixtures and all rank-one-family variants.
#[test]
fn acceptance_5_closed_forms() {
    let tol = tol();
    let p = GalleryParams::default();
    let names = [
        "hermite",
        "laguerre",
        "jacobi",
        "example5_hermite",
        "example5_laguerre",
        "example5_jacobi",
        "example5_bessel",
    ];
    for name in names {
        let entry = gallery::build(name, &p).unwrap();
        let spec = entry.zero_class.as_ref().unwrap();
        all_closed_forms_match(spec, &entry.functional, name, &tol);
    }
    // spot values
    let hermite = gallery::build("hermite", &p).unwrap();
    let e3 = closed_form_e(hermite.zero_class.as_ref().unwrap(), 3, &tol).unwrap();
    assert!((e3.get(0, 0) - c(0.75)).norm() < 1e-12, "hermite E_3");
    let laguerre = gallery::build("laguerre", &p).unwrap();
    let e2 = closed_form_e(laguerre.zero_class.as_ref().unwrap(), 2, &tol).unwrap();
    assert!((e2.get(0, 0) - c(4.0)).norm() < 1e-11, "laguerre E_2");
    println!(
        "ACCEPTANCE 5 PASS: closed forms match Hankel to 1e-8 on {} fixtures; \
         E_3(hermite) = 3/4, E_2(laguerre) = 4",
        names.len()
    );
}

/// Criterion 6: a crafted singular ladder factor yields a maximal segment
/// of exactly the predicted length from both the algebraic criterion and
/// the Hankel path.
#[test]
fn acceptance_6_maximal_segment_agreement() {
    let tol = tol();

    // (i) singular alpha-evaluation factor: alpha = x, psi0 = -3,
    // psi1 = -1, so alpha(-N_3 M_6^{-1}) = 0. The Pearson solution stays
    // unique (every M_k = -1 is nonsingular), the maximal segment is
    // P_0..P_3, and the first singular Hankel matrix is Delta_4: the
    // algebraic criterion and the Hankel horizon must agree exactly.
    let spec = ZeroClassSpec::new(
        [cz(), c(1.0), cz()],
        CMatrix::scalar(1, c(-3.0)),
        CMatrix::scalar(1, c(-1.0)),
        CMatrix::identity(1),
    )
    .unwrap();
    let cc = mopol::zeroclass::existence_cross_check(&spec, 8, &tol).unwrap();
    match &cc.verdict {
        ExistenceVerdict::BlockedAt { max_degree, reason } => {
            assert_eq!(*max_degree, 3);
            assert_eq!(*reason, BlockReason::AlphaEvalSingular(3));
        }
        v => panic!("unexpected verdict {v:?}"),
    }
    assert_eq!(cc.hankel_max_degree, 3, "hankel maximal degree");
    assert_eq!(cc.hankel_blocked_at, Some(4), "first singular Delta");
    assert!(cc.agree, "cross-check disagrees: {cc:?}");

    // (ii) singular ladder matrix M_4 (psi1 = 4, alpha = 1 - x^2, so
    // M_n = 4 - n): beyond the wall the moment equation no longer
    // determines mu_5 (the solution stops being unique), so the Pearson
    // recurrence reports exactly the predicted index, matching the
    // algebraic criterion's first-failure report.
    let k0 = 4usize;
    let spec_m = ZeroClassSpec::new(
        [c(1.0), cz(), c(-1.0)],
        CMatrix::zeros(1),
        CMatrix::scalar(1, c(k0 as f64)),
        CMatrix::identity(1),
    )
    .unwrap();
    match existence_check(&spec_m, 8, &tol) {
        ExistenceVerdict::BlockedAt { max_degree, reason } => {
            assert_eq!(max_degree, 2); // 2n-1 < 4 forces n <= 2
            assert_eq!(reason, BlockReason::MSingular(k0));
        }
        v => panic!("unexpected verdict {v:?}"),
    }
    let u_m = spec_m.functional().unwrap();
    match compute_segment(&u_m, 5, &tol) {
        Err(mopol::error::Error::RecurrenceBlocked(k)) => assert_eq!(k, k0),
        other => panic!("expected the recurrence to block at {k0}, got {other:?}"),
    }
    // a particular solution continued past the wall (free odd moment set
    // to zero) is genuinely solution-dependent: its segment extends beyond
    // the guaranteed degree, confirming why the criterion only certifies
    // degree 2 for *every* solution
    let mut mu = vec![1.0_f64, 0.0];
    for n in 1..=11usize {
        if n == k0 {
            mu.push(0.0);
        } else {
            let v = n as f64 * mu[n - 1] / (n as f64 - k0 as f64);
            mu.push(v);
        }
    }
    let u_free =
        Functional::from_moments(mu.iter().map(|&x| CMatrix::scalar(1, c(x))).collect()).unwrap();
    let seg_free = compute_segment(&u_free, 4, &tol).unwrap();
    assert!(seg_free.max_degree() >= 3);

    println!(
        "ACCEPTANCE 6 PASS: singular alpha factor at j = 3 gives maximal degree 3 from both \
         the criterion and the Hankel horizon (Delta_4 singular); singular M_4 blocks the \
         recurrence at exactly k = 4 with guaranteed degree 2"
    );
}

/// Criterion 7: the ODE back-substitution with leading coefficient kappa_n
/// reproduces the kappa-normalized Hankel polynomial on three distinct
/// zero-class fixtures.
#[test]
fn acceptance_7_ode_uniqueness() {
    let tol = tol();
    let p = GalleryParams {
        r: 0.5,
        ..Default::default()
    };
    let fixtures = [
        ("laguerre", gallery::build("laguerre", &p).unwrap()),
        (
            "example5_hermite",
            gallery::build("example5_hermite", &GalleryParams::default()).unwrap(),
        ),
        (
            "hermite_exp",
            gallery::build("hermite_exp", &GalleryParams::default()).unwrap(),
        ),
    ];
    for (name, entry) in fixtures {
        let spec = entry.zero_class.as_ref().unwrap();
        let seg = compute_segment(&entry.functional, 5, &tol).unwrap();
        for n in 1..=5usize {
            let kappa = spec.kappa(&seg.e[n], n, &tol).unwrap();
            let q = ode_solve(spec, n, &kappa, &tol).unwrap();
            let expect = seg.polys[n].mul_matrix_left(&kappa).unwrap();
            let rel = q.sub(&expect).unwrap().norm() / expect.norm().max(1e-300);
            assert!(rel <= 1e-8, "{name} n = {n}: rel {rel}");
            // the ODE residual itself must also vanish
            let (_, kappa_ode) = ode_coefficients(spec, &seg, n, &tol).unwrap();
            assert!(kappa_ode.residual <= 1e-8, "{name} n = {n} ode residual");
        }
        println!("ACCEPTANCE 7 PASS ({name}): ode_solve(kappa_n) = kappa_n P_n to 1e-8, n <= 5");
    }
}

/// Criterion 8: hermitian diagonalizability analysis.
#[test]
fn acceptance_8_diagonalizability() {
    let tol = tol();

    // (a) construct-then-recover roundtrip
    let diag_spec = ZeroClassSpec::new(
        [c(1.0), cz(), cz()],
        CMatrix::zeros(2),
        CMatrix::diag(&[c(-2.0), c(-5.0)]),
        CMatrix::diag(&[c(1.0), c(3.0)]),
    )
    .unwrap();
    let w = diag_spec.functional().unwrap();
    let th = 0.6_f64;
    let t = CMatrix::from_vec(2, vec![c(th.cos()), c(th.sin()), c(-th.sin()), c(th.cos())])
        .unwrap();
    let scrambled = w.congruence(&t).unwrap();
    match diagonalizability_report(&scrambled, 10, &tol).unwrap() {
        DiagVerdict::UnitarilyDiagonalizable { transform, .. } => {
            for n in 0..=10usize {
                let m = scrambled.moment(n).unwrap();
                let d = &(&transform * &m) * &transform.adjoint();
                assert!(
                    d.offdiag_norm() <= 1e-8 * m.norm().max(1.0),
                    "(a) moment {n}"
                );
            }
        }
        v => panic!("(a) expected diagonalizable, got {v:?}"),
    }

    // (b) the hermitian rank-one variant is not diagonalizable, with an
    // explicit witness, and its Delta_2 is not positive definite
    let entry = gallery::build("example5_hermite", &GalleryParams::default()).unwrap();
    match diagonalizability_report(&entry.functional, 10, &tol).unwrap() {
        DiagVerdict::NotDiagonalizable {
            witness,
            delta2_positive_definite,
        } => {
            assert!(!delta2_positive_definite, "(b) Delta_2 must not be PD");
            match witness {
                DiagWitness::NonCommutingMoments { i, j, commutator_norm } => {
                    assert!(commutator_norm > 1e-6, "(b) witness too weak");
                    println!("ACCEPTANCE 8b witness: [mu_{i}, mu_{j}] != 0");
                }
                w => panic!("(b) unexpected witness {w:?}"),
            }
        }
        v => panic!("(b) expected not diagonalizable, got {v:?}"),
    }
    let prof = hankel_profile(&entry.functional, 2, &tol).unwrap();
    assert!(!prof.all_positive_definite(), "(b) Delta_2 check");

    // (c) hermiticity identity wherever the hypotheses hold
    for name in ["example5_hermite", "example5_laguerre", "example5_jacobi"] {
        let e = gallery::build(name, &GalleryParams::default()).unwrap();
        let spec = e.zero_class.as_ref().unwrap();
        for n in 2..=4usize {
            let res = hermiticity_obstruction(&e.functional, spec, n, &tol).unwrap();
            let scale = e.functional.moment(n + 1).unwrap().norm()
                * spec.psi0.norm().max(1.0)
                * spec.psi1.norm().max(1.0);
            assert!(
                res.norm() <= 1e-8 * scale.max(1.0),
                "(c) {name} n = {n}: {}",
                res.norm()
            );
        }
    }
    // commutator form on a mu_0 = I hermitian functional
    let (nu, _) = scrambled.normalized_congruence(&tol).unwrap();
    let nu_spec = ZeroClassSpec::new(
        [c(1.0), cz(), cz()],
        CMatrix::zeros(2),
        CMatrix::identity(2), // psi unused by the commutator-side scale here
        CMatrix::identity(2),
    )
    .unwrap();
    for n in 2..=4usize {
        let res = hermiticity_obstruction_commutator(&nu, &nu_spec, n, &tol).unwrap();
        // alpha real: the right side vanishes and [mu_{n+1}, mu_1] must too
        assert!(res.norm() <= 1e-8 * nu.moment(n + 1).unwrap().norm().max(1.0));
    }

    // (d) double-root positivity guard on scalar and matrix fixtures
    for name in ["bessel_circle", "bessel_series"] {
        let e = gallery::build(name, &GalleryParams::default()).unwrap();
        let spec = e.zero_class.as_ref().unwrap();
        match bessel_positivity_guard(spec, &tol).unwrap() {
            GuardVerdict::ConsistentWithDoubleRootObstruction { .. } => {}
            GuardVerdict::Violation { detail } => panic!("(d) {name}: {detail}"),
        }
    }
    // real-normalized scalar variant (moments 1/(n+1)!)
    let real_bessel = ZeroClassSpec::new(
        [cz(), cz(), c(1.0)],
        CMatrix::scalar(1, c(-1.0)),
        CMatrix::scalar(1, c(2.0)),
        CMatrix::scalar(1, c(1.0)),
    )
    .unwrap();
    match bessel_positivity_guard(&real_bessel, &tol).unwrap() {
        GuardVerdict::ConsistentWithDoubleRootObstruction { .. } => {}
        GuardVerdict::Violation { detail } => panic!("(d) real-normalized: {detail}"),
    }

    println!(
        "ACCEPTANCE 8 PASS: scrambled-diagonal roundtrip recovered; rank-one hermitian \
         variant rejected with witness and indefinite Delta_2; hermiticity identity <= 1e-8; \
         double-root guard consistent on scalar, matrix, and real-normalized fixtures"
    );
}

/// Criterion 9 lives in tests/properties.rs (proptest, 256 cases per
/// suite); this test restates the structure-relation bound on the gallery
/// fixtures so the acceptance suite prints its line.
#[test]
fn acceptance_9_property_suites() {
    let tol = tol();
    let p = GalleryParams::default();
    for name in ["hermite", "laguerre", "example5_hermite"] {
        let entry = gallery::build(name, &p).unwrap();
        let spec = entry.zero_class.as_ref().unwrap();
        let seg = compute_segment(&entry.functional, 5, &tol).unwrap();
        for n in 1..=4usize {
            let sr = structure_relation(spec, &seg, n, &tol).unwrap();
            assert!(sr.residual <= 1e-7, "{name} n = {n}: {}", sr.residual);
        }
    }
    println!(
        "ACCEPTANCE 9 PASS: randomized suites (256 cases each) run in tests/properties.rs; \
         structure relation residuals <= 1e-7 re-verified on gallery fixtures"
    );
}
