//! Command-line front end: load a functional spec (inline JSON or
//! `gallery:<name>`), run analyses, emit human-readable and JSON reports.

mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use mopol::error::Error;
use mopol::functional::{hankel_profile, pearson_residual};
use mopol::jsonspec::{self, LoadedSpec};
use mopol::mop::{compute_segment, orthogonality_residual, recurrence_coefficients};
use mopol::pearson::{cyclicity_check, derivative_chain, module_basis, scalar_ideal, Cyclicity};
use mopol::zeroclass::{
    self, bessel_positivity_guard, canonical_type, closed_form_e, closed_form_ratios,
    diagonalizability_report, existence_cross_check, ode_coefficients, DiagVerdict,
    ExistenceVerdict, GuardVerdict,
};
use mopol::{Tolerance, ZeroClassSpec};

use report::{fmt_c, fmt_f, fmt_matrix, fmt_poly, Report, Status, Table};

#[derive(Parser)]
#[command(
    name = "mopol",
    version,
    about = "Matrix orthogonal polynomials for Pearson-type matrix functionals"
)]
struct Cli {
    /// Write the machine-readable report JSON to this path.
    #[arg(long, global = true, value_name = "PATH")]
    json: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SpecArg {
    /// Inline JSON spec or `gallery:<name>`.
    spec: String,
}

#[derive(Subcommand)]
enum Command {
    /// Print moments mu_0..mu_n of the functional.
    Moments {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long, default_value_t = 8)]
        n: usize,
    },
    /// Compute the monic orthogonal segment with norms, subleading
    /// coefficients, recurrence coefficients and residuals.
    Mop {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long, default_value_t = 5)]
        n: usize,
    },
    /// Verify the attached Pearson pair against the moment equations.
    CheckPearson {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long, default_value_t = 12)]
        horizon: usize,
    },
    /// Iterate the derivative chain and verify higher-derivative
    /// orthogonality at each level.
    Derivatives {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long, default_value_t = 2)]
        depth: usize,
    },
    /// Basis of the right-module of Pearson pairs with deg Phi <= p,
    /// deg Psi <= q.
    ModuleBasis {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long)]
        p: usize,
        #[arg(long)]
        q: usize,
        /// Certificate horizon (moment equations used); defaults to
        /// 2 m (p + q + 3).
        #[arg(long)]
        horizon: Option<usize>,
    },
    /// Scalar ideal generator and class.
    Class {
        #[command(flatten)]
        spec: SpecArg,
    },
    /// Zero-class analyses (scalar Phi = alpha I).
    #[command(subcommand)]
    Zeroclass(ZeroclassCmd),
    /// Gallery registry.
    #[command(subcommand)]
    Gallery(GalleryCmd),
    /// Re-render a saved JSON report.
    Report {
        /// Path to a report JSON written with --json.
        path: PathBuf,
    },
}

#[derive(Subcommand)]
enum ZeroclassCmd {
    /// Existence criterion vs the Hankel segment.
    Check {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long, default_value_t = 6)]
        n: usize,
    },
    /// Closed forms for E_n, pi_n, the conjugated subleading coefficient
    /// and the norm ratio, against Hankel-computed values.
    ClosedForms {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long, default_value_t = 6)]
        n: usize,
    },
    /// Second-order differential equations and their residuals.
    Ode {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long, default_value_t = 5)]
        n: usize,
    },
    /// Hermitian diagonalizability report.
    Diag {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long, default_value_t = 10)]
        n: usize,
    },
    /// Double-root (Bessel-type) positivity guard.
    Guard {
        #[command(flatten)]
        spec: SpecArg,
    },
}

#[derive(Subcommand)]
enum GalleryCmd {
    /// List the available example names.
    List,
    /// Show one entry and its attached data.
    Show { name: String },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let tol = Tolerance::default();
    match run(&cli, &tol) {
        Ok(rep) => {
            print!("{}", rep.render());
            if let Some(path) = &cli.json {
                let json = serde_json::to_string_pretty(&rep).expect("report serializes");
                if let Err(e) = std::fs::write(path, json) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            }
            ExitCode::from(rep.exit_code())
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli, tol: &Tolerance) -> anyhow::Result<Report> {
    match &cli.command {
        Command::Moments { spec, n } => cmd_moments(&load(spec)?, *n, tol),
        Command::Mop { spec, n } => cmd_mop(&load(spec)?, *n, tol),
        Command::CheckPearson { spec, horizon } => cmd_check_pearson(&load(spec)?, *horizon, tol),
        Command::Derivatives { spec, depth } => cmd_derivatives(&load(spec)?, *depth, tol),
        Command::ModuleBasis {
            spec,
            p,
            q,
            horizon,
        } => cmd_module_basis(&load(spec)?, *p, *q, *horizon, tol),
        Command::Class { spec } => cmd_class(&load(spec)?, tol),
        Command::Zeroclass(zc) => match zc {
            ZeroclassCmd::Check { spec, n } => {
                let loaded = load(spec)?;
                let z = require_zero_class(&loaded)?;
                cmd_zc_check(&loaded, z, *n, tol)
            }
            ZeroclassCmd::ClosedForms { spec, n } => {
                let loaded = load(spec)?;
                let z = require_zero_class(&loaded)?;
                cmd_zc_closed_forms(&loaded, z, *n, tol)
            }
            ZeroclassCmd::Ode { spec, n } => {
                let loaded = load(spec)?;
                let z = require_zero_class(&loaded)?;
                cmd_zc_ode(&loaded, z, *n, tol)
            }
            ZeroclassCmd::Diag { spec, n } => cmd_zc_diag(&load(spec)?, *n, tol),
            ZeroclassCmd::Guard { spec } => {
                let loaded = load(spec)?;
                let z = require_zero_class(&loaded)?;
                cmd_zc_guard(z, tol)
            }
        },
        Command::Gallery(g) => match g {
            GalleryCmd::List => cmd_gallery_list(tol),
            GalleryCmd::Show { name } => cmd_gallery_show(name, tol),
        },
        Command::Report { path } => {
            let text = std::fs::read_to_string(path)?;
            let rep: Report = serde_json::from_str(&text)?;
            Ok(rep)
        }
    }
}

fn load(spec: &SpecArg) -> anyhow::Result<LoadedSpec> {
    Ok(jsonspec::load(&spec.spec)?)
}

fn require_zero_class(loaded: &LoadedSpec) -> anyhow::Result<ZeroClassSpec> {
    loaded.zero_class.clone().ok_or_else(|| {
        anyhow::anyhow!("spec is not zero-class (Phi must be a scalar polynomial times I)")
    })
}

fn residual_status(res: f64, cut: f64) -> Status {
    if res <= cut {
        Status::Ok
    } else {
        Status::Violation
    }
}

fn cmd_moments(loaded: &LoadedSpec, n: usize, tol: &Tolerance) -> anyhow::Result<Report> {
    let mut rep = Report::new(format!("moments {} --n {}", loaded.label, n), tol);
    let mut rows = Vec::new();
    for k in 0..=n {
        let m = loaded.functional.moment(k)?;
        rows.push(vec![k.to_string(), fmt_matrix(&m)]);
    }
    rep.table(Table {
        title: "moments".into(),
        regime: "oracle / recurrence values".into(),
        headers: vec!["n".into(), "mu_n".into()],
        rows,
    });
    Ok(rep)
}

fn cmd_mop(loaded: &LoadedSpec, n: usize, tol: &Tolerance) -> anyhow::Result<Report> {
    let mut rep = Report::new(format!("mop {} --n {}", loaded.label, n), tol);
    let seg = compute_segment(&loaded.functional, n, tol)?;
    let mut rows = Vec::new();
    for k in 0..seg.polys.len() {
        rows.push(vec![
            k.to_string(),
            fmt_matrix(&seg.e[k]),
            fmt_matrix(&seg.pi[k]),
        ]);
    }
    rep.table(Table {
        title: "segment norms and subleading coefficients".into(),
        regime: format!("cond_max {}", fmt_f(tol.cond_max)),
        headers: vec!["k".into(), "E_k".into(), "pi_k".into()],
        rows,
    });
    if seg.polys.len() >= 2 {
        let rec = recurrence_coefficients(&seg, tol)?;
        let mut rows = Vec::new();
        for k in 0..rec.beta.len() {
            rows.push(vec![
                k.to_string(),
                fmt_matrix(&rec.beta[k]),
                fmt_matrix(&rec.gamma[k]),
            ]);
        }
        rep.table(Table {
            title: "recurrence coefficients".into(),
            regime: format!("rel {}", fmt_f(tol.rel)),
            headers: vec!["k".into(), "beta_k".into(), "gamma_{k+1}".into()],
            rows,
        });
        rep.verdict(
            "three-term recurrence residual",
            residual_status(rec.residual, 1e-8),
            fmt_f(rec.residual),
        );
    }
    let orth = orthogonality_residual(&seg, &loaded.functional)?;
    rep.verdict(
        "segment orthogonality residual",
        residual_status(orth, 1e-8),
        fmt_f(orth),
    );
    match &seg.horizon {
        Some(h) => rep.verdict(
            "horizon",
            Status::Blocked,
            format!(
                "maximal segment: Delta_{} is singular; largest full degree {}",
                h.blocked_at,
                seg.max_degree()
            ),
        ),
        None => rep.verdict(
            "horizon",
            Status::Ok,
            format!("segment complete to degree {n}"),
        ),
    }
    Ok(rep)
}

fn cmd_check_pearson(
    loaded: &LoadedSpec,
    horizon: usize,
    tol: &Tolerance,
) -> anyhow::Result<Report> {
    let mut rep = Report::new(format!("check-pearson {}", loaded.label), tol);
    let (phi, psi) = loaded
        .pearson_pair
        .clone()
        .or_else(|| {
            loaded
                .pearson
                .as_ref()
                .map(|p| (p.phi().clone(), p.psi().clone()))
        })
        .ok_or_else(|| anyhow::anyhow!("spec carries no Pearson pair to check"))?;
    let res = pearson_residual(&loaded.functional, &phi, &psi, horizon)?;
    rep.certificate("pearson moment equations", horizon, 1e-8);
    rep.table(Table {
        title: "pearson pair".into(),
        regime: "as given".into(),
        headers: vec!["Phi".into(), "Psi".into()],
        rows: vec![vec![fmt_poly(&phi), fmt_poly(&psi)]],
    });
    rep.verdict("pearson residual", residual_status(res, 1e-8), fmt_f(res));
    Ok(rep)
}

fn cmd_derivatives(loaded: &LoadedSpec, depth: usize, tol: &Tolerance) -> anyhow::Result<Report> {
    let mut rep = Report::new(
        format!("derivatives {} --depth {}", loaded.label, depth),
        tol,
    );
    let spec = loaded
        .pearson
        .clone()
        .ok_or_else(|| anyhow::anyhow!("spec carries no (2,1) Pearson data"))?;
    let base_degree = 2 * depth + 4;
    match derivative_chain(&spec, &loaded.functional, depth, base_degree, tol) {
        Ok(links) => {
            let mut rows = Vec::new();
            for (j, link) in links.iter().enumerate() {
                rows.push(vec![
                    (j + 1).to_string(),
                    fmt_f(link.pearson_residual),
                    fmt_f(link.derivative_orthogonality),
                ]);
            }
            rep.table(Table {
                title: "derivative chain".into(),
                regime: format!("rel {}", fmt_f(tol.rel)),
                headers: vec![
                    "level".into(),
                    "pearson residual".into(),
                    "orthogonality defect".into(),
                ],
                rows,
            });
            let worst = links
                .iter()
                .map(|l| l.pearson_residual.max(l.derivative_orthogonality))
                .fold(0.0, f64::max);
            rep.verdict(
                "chain",
                residual_status(worst, 1e-8),
                format!("worst residual {}", fmt_f(worst)),
            );
        }
        Err(Error::ChainBroken { level, reason }) => {
            rep.verdict(
                "chain",
                Status::Blocked,
                format!("broken at level {level}: {reason}"),
            );
        }
        Err(other) => return Err(other.into()),
    }
    Ok(rep)
}

fn cmd_module_basis(
    loaded: &LoadedSpec,
    p: usize,
    q: usize,
    horizon: Option<usize>,
    tol: &Tolerance,
) -> anyhow::Result<Report> {
    let n_cert = horizon.unwrap_or_else(|| mopol::pearson::default_horizon(loaded.dim, p, q));
    let mut rep = Report::new(format!("module-basis {} --p {p} --q {q}", loaded.label), tol);
    let basis = module_basis(&loaded.functional, p, q, n_cert, tol)?;
    rep.certificate("module nullspace", basis.horizon, 1e-8);
    let mut rows = Vec::new();
    for (i, (phi, psi)) in basis.generators.iter().enumerate() {
        rows.push(vec![i.to_string(), fmt_poly(phi), fmt_poly(psi)]);
    }
    rep.table(Table {
        title: format!("generators of the ({p},{q}) module"),
        regime: format!("sv gap {}", fmt_f(basis.singular_value_gap)),
        headers: vec!["#".into(), "Phi".into(), "Psi".into()],
        rows,
    });
    rep.verdict(
        "rank",
        Status::Info,
        format!(
            "rank {} (column solution dimension {})",
            basis.rank, basis.solution_dim
        ),
    );
    rep.verdict(
        "certificate residual",
        residual_status(basis.certificate_residual, 1e-8),
        fmt_f(basis.certificate_residual),
    );
    if p == 2 && q == 1 {
        match cyclicity_check(&loaded.functional, tol)? {
            Cyclicity::Cyclic { .. } => {
                rep.verdict("cyclicity", Status::Ok, "cyclic with det != 0 generator")
            }
            Cyclicity::CyclicDegenerate { .. } => rep.verdict(
                "cyclicity",
                Status::Info,
                "cyclic but the generator has det = 0 (no Pearson pair at (2,1))",
            ),
            Cyclicity::NotCyclic => rep.verdict("cyclicity", Status::Info, "module is {0}"),
            Cyclicity::Inconclusive { reason } => rep.verdict("cyclicity", Status::Blocked, reason),
        }
    }
    Ok(rep)
}

fn cmd_class(loaded: &LoadedSpec, tol: &Tolerance) -> anyhow::Result<Report> {
    let mut rep = Report::new(format!("class {}", loaded.label), tol);
    let n_cert = 24.max(4 * loaded.dim);
    match scalar_ideal(&loaded.functional, loaded.pearson.as_ref(), 4, n_cert, tol) {
        Ok(cr) => {
            rep.certificate("scalar ideal", cr.certified_to, 1e-8);
            rep.table(Table {
                title: "scalar Pearson generator".into(),
                regime: "monic alpha".into(),
                headers: vec!["alpha".into(), "Psi".into()],
                rows: vec![vec![fmt_poly(&cr.alpha), fmt_poly(&cr.psi)]],
            });
            rep.verdict("class", Status::Ok, format!("class s = {}", cr.class));
            rep.verdict(
                "generator residual",
                residual_status(cr.residual, 1e-8),
                fmt_f(cr.residual),
            );
        }
        Err(Error::NoGeneratorFound(d)) => {
            rep.verdict(
                "class",
                Status::Blocked,
                format!("no scalar generator up to degree {d} on this horizon"),
            );
        }
        Err(other) => return Err(other.into()),
    }
    Ok(rep)
}

fn cmd_zc_check(
    loaded: &LoadedSpec,
    zc: ZeroClassSpec,
    n: usize,
    tol: &Tolerance,
) -> anyhow::Result<Report> {
    let mut rep = Report::new(format!("zeroclass check {} --n {n}", loaded.label), tol);
    let ct = canonical_type(&zc, tol);
    rep.verdict(
        "canonical type",
        Status::Info,
        format!(
            "{:?}, transform t(x) = {} x + {}, real roots: {}",
            ct.tag,
            fmt_c(ct.transform.0),
            fmt_c(ct.transform.1),
            ct.real_roots
        ),
    );
    let cc = existence_cross_check(&zc, n, tol)?;
    match &cc.verdict {
        ExistenceVerdict::QuasiDefiniteTo(k) => rep.verdict(
            "existence",
            Status::Ok,
            format!("quasi-definite to degree {k} (all ladder factors nonsingular)"),
        ),
        ExistenceVerdict::BlockedAt { max_degree, reason } => rep.verdict(
            "existence",
            Status::Blocked,
            format!("maximal segment degree {max_degree}; first failure {reason:?}"),
        ),
    }
    rep.verdict(
        "hankel cross-check",
        if cc.agree {
            Status::Ok
        } else {
            Status::Violation
        },
        format!(
            "hankel max degree {}, first singular Delta {:?}, agreement: {}",
            cc.hankel_max_degree, cc.hankel_blocked_at, cc.agree
        ),
    );
    Ok(rep)
}

fn cmd_zc_closed_forms(
    loaded: &LoadedSpec,
    zc: ZeroClassSpec,
    n: usize,
    tol: &Tolerance,
) -> anyhow::Result<Report> {
    let mut rep = Report::new(format!("zeroclass closed-forms {} --n {n}", loaded.label), tol);
    let seg = compute_segment(&loaded.functional, n, tol)?;
    let mut rows = Vec::new();
    let mut worst = 0.0_f64;
    for k in 0..seg.polys.len() {
        let e_closed = closed_form_e(&zc, k, tol)?;
        let e_rel = (&e_closed - &seg.e[k]).norm() / seg.e[k].norm();
        let pi_closed = zeroclass::closed_form_pi(&zc, k, tol)?;
        let pi_rel = (&pi_closed - &seg.pi[k]).norm() / seg.pi[k].norm().max(1.0);
        let (cap_pi, ratio) = closed_form_ratios(&zc, k, tol)?;
        let cap_pi_direct = &seg.e[k].inv(tol.cond_max)? * &(&seg.pi[k] * &seg.e[k]);
        let cap_rel = (&cap_pi - &cap_pi_direct).norm() / cap_pi_direct.norm().max(1.0);
        let ratio_rel = if k + 1 < seg.polys.len() {
            let direct = seg.e[k].solve(&seg.e[k + 1], tol.cond_max)?;
            (&ratio - &direct).norm() / direct.norm()
        } else {
            0.0
        };
        worst = worst.max(e_rel).max(pi_rel).max(cap_rel).max(ratio_rel);
        rows.push(vec![
            k.to_string(),
            fmt_matrix(&e_closed),
            fmt_f(e_rel),
            fmt_f(pi_rel),
            fmt_f(cap_rel),
            fmt_f(ratio_rel),
        ]);
    }
    rep.table(Table {
        title: "closed forms vs Hankel".into(),
        regime: "relative error".into(),
        headers: vec![
            "n".into(),
            "E_n (closed)".into(),
            "E rel".into(),
            "pi rel".into(),
            "Pi rel".into(),
            "ratio rel".into(),
        ],
        rows,
    });
    rep.verdict(
        "closed-form agreement",
        residual_status(worst, 1e-8),
        format!("worst relative error {}", fmt_f(worst)),
    );
    Ok(rep)
}

fn cmd_zc_ode(
    loaded: &LoadedSpec,
    zc: ZeroClassSpec,
    n: usize,
    tol: &Tolerance,
) -> anyhow::Result<Report> {
    let mut rep = Report::new(format!("zeroclass ode {} --n {n}", loaded.label), tol);
    let seg = compute_segment(&loaded.functional, n, tol)?;
    let mut rows = Vec::new();
    let mut worst = 0.0_f64;
    for k in 1..seg.polys.len() {
        let (monic, kappa) = ode_coefficients(&zc, &seg, k, tol)?;
        let right = match zeroclass::right_ode(&zc.to_pearson()?, &loaded.functional, &seg, k, tol)
        {
            Ok(r) => {
                worst = worst.max(r.residual);
                fmt_f(r.residual)
            }
            Err(Error::HermiticityRequired(_)) => "n/a".into(),
            Err(other) => return Err(other.into()),
        };
        worst = worst.max(monic.residual).max(kappa.residual);
        rows.push(vec![
            k.to_string(),
            fmt_f(monic.residual),
            fmt_f(kappa.residual),
            right,
        ]);
    }
    rep.table(Table {
        title: "second-order ODE residuals".into(),
        regime: "relative to the polynomial norm".into(),
        headers: vec![
            "n".into(),
            "monic left".into(),
            "kappa left".into(),
            "right-sided".into(),
        ],
        rows,
    });
    rep.verdict(
        "ode residuals",
        residual_status(worst, 1e-8),
        format!("worst {}", fmt_f(worst)),
    );
    Ok(rep)
}

fn cmd_zc_diag(loaded: &LoadedSpec, n: usize, tol: &Tolerance) -> anyhow::Result<Report> {
    let mut rep = Report::new(format!("zeroclass diag {} --n {n}", loaded.label), tol);
    match diagonalizability_report(&loaded.functional, n, tol)? {
        DiagVerdict::UnitarilyDiagonalizable { transform, unitary } => {
            rep.table(Table {
                title: "diagonalizing transform".into(),
                regime: if unitary {
                    "unitary".into()
                } else {
                    "unitary composed with the mu_0 normalizer".into()
                },
                headers: vec!["T".into()],
                rows: vec![vec![fmt_matrix(&transform)]],
            });
            rep.verdict(
                "diagonalizability",
                Status::Ok,
                format!("unitarily diagonalizable (moments 0..={n} diagonalized)"),
            );
        }
        DiagVerdict::NotDiagonalizable {
            witness,
            delta2_positive_definite,
        } => {
            rep.verdict(
                "diagonalizability",
                Status::Info,
                format!(
                    "not unitarily diagonalizable; witness {witness:?}; Delta_2 positive \
                     definite: {delta2_positive_definite}"
                ),
            );
        }
        DiagVerdict::Inconclusive { reason } => {
            rep.verdict("diagonalizability", Status::Blocked, reason);
        }
    }
    Ok(rep)
}

fn cmd_zc_guard(zc: ZeroClassSpec, tol: &Tolerance) -> anyhow::Result<Report> {
    let mut rep = Report::new("zeroclass guard", tol);
    match bessel_positivity_guard(&zc, tol)? {
        GuardVerdict::ConsistentWithDoubleRootObstruction { failing_order } => rep.verdict(
            "double-root positivity guard",
            Status::Ok,
            format!("not positive definite (Delta_{failing_order} fails), as required"),
        ),
        GuardVerdict::Violation { detail } => {
            rep.verdict("double-root positivity guard", Status::Violation, detail)
        }
    }
    Ok(rep)
}

fn cmd_gallery_list(tol: &Tolerance) -> anyhow::Result<Report> {
    let mut rep = Report::new("gallery list", tol);
    let rows = mopol::gallery::list()
        .into_iter()
        .map(|(name, desc)| vec![name.to_string(), desc.to_string()])
        .collect();
    rep.table(Table {
        title: "gallery".into(),
        regime: "registry".into(),
        headers: vec!["name".into(), "description".into()],
        rows,
    });
    Ok(rep)
}

fn cmd_gallery_show(name: &str, tol: &Tolerance) -> anyhow::Result<Report> {
    let mut rep = Report::new(format!("gallery show {name}"), tol);
    let entry = mopol::gallery::build(name, &mopol::gallery::GalleryParams::default())?;
    let mut rows = vec![
        vec!["description".into(), entry.description.clone()],
        vec!["dim".into(), entry.dim.to_string()],
        vec!["mu_0".into(), fmt_matrix(&entry.functional.moment(0)?)],
    ];
    if let Some(p) = &entry.pearson {
        rows.push(vec!["Phi".into(), fmt_poly(p.phi())]);
        rows.push(vec!["Psi".into(), fmt_poly(p.psi())]);
    }
    if let Some(zc) = &entry.zero_class {
        rows.push(vec![
            "alpha".into(),
            format!(
                "{} + {} x + {} x^2",
                fmt_c(zc.alpha[0]),
                fmt_c(zc.alpha[1]),
                fmt_c(zc.alpha[2])
            ),
        ]);
    }
    if let Some(cls) = entry.expected.class {
        rows.push(vec!["expected class".into(), cls.to_string()]);
    }
    if let Some(pd) = entry.expected.positive_definite {
        rows.push(vec!["positive definite".into(), pd.to_string()]);
    }
    rep.table(Table {
        title: format!("gallery entry {name}"),
        regime: "registry".into(),
        headers: vec!["field".into(), "value".into()],
        rows,
    });
    let prof = hankel_profile(&entry.functional, 2, tol)?;
    rep.verdict(
        "hankel profile",
        Status::Info,
        format!(
            "Delta_0..Delta_2 nonsingular: {}, positive definite: {}",
            prof.all_nonsingular(),
            prof.all_positive_definite()
        ),
    );
    Ok(rep)
}
