//! Report data model: everything a command computed, with all numbers
//! already formatted, so the JSON mirror re-renders to identical text.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use mopol::{CMatrix, MatrixPolynomial};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    Blocked,
    Violation,
    Info,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub status: Status,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Table {
    pub title: String,
    /// Tolerance regime the cells were computed under.
    pub regime: String,
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Certificate {
    pub name: String,
    pub horizon: usize,
    pub tolerance: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Report {
    pub schema: u32,
    pub command: String,
    pub tolerance: Tolerances,
    pub verdicts: Vec<Verdict>,
    pub tables: Vec<Table>,
    pub certificates: Vec<Certificate>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Tolerances {
    pub rel: String,
    pub abs: String,
    pub cond_max: String,
}

impl Report {
    pub fn new(command: impl Into<String>, tol: &mopol::Tolerance) -> Self {
        Report {
            schema: SCHEMA_VERSION,
            command: command.into(),
            tolerance: Tolerances {
                rel: fmt_f(tol.rel),
                abs: fmt_f(tol.abs),
                cond_max: fmt_f(tol.cond_max),
            },
            verdicts: vec![],
            tables: vec![],
            certificates: vec![],
        }
    }

    pub fn verdict(&mut self, name: impl Into<String>, status: Status, detail: impl Into<String>) {
        self.verdicts.push(Verdict {
            name: name.into(),
            status,
            detail: detail.into(),
        });
    }

    pub fn table(&mut self, table: Table) {
        self.tables.push(table);
    }

    pub fn certificate(&mut self, name: impl Into<String>, horizon: usize, tolerance: f64) {
        self.certificates.push(Certificate {
            name: name.into(),
            horizon,
            tolerance: fmt_f(tolerance),
        });
    }

    /// Exit code: 1 if any violation, else 0.
    pub fn exit_code(&self) -> u8 {
        if self.verdicts.iter().any(|v| v.status == Status::Violation) {
            1
        } else {
            0
        }
    }

    /// Deterministic text rendering; the JSON round-trip reproduces it.
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# {}\n", self.command));
        out.push_str(&format!(
            "tolerances: rel={} abs={} cond_max={}\n",
            self.tolerance.rel, self.tolerance.abs, self.tolerance.cond_max
        ));
        for t in &self.tables {
            out.push('\n');
            out.push_str(&format!("## {} [{}]\n", t.title, t.regime));
            let widths: Vec<usize> = (0..t.headers.len())
                .map(|i| {
                    t.rows
                        .iter()
                        .map(|r| r.get(i).map(String::len).unwrap_or(0))
                        .chain(std::iter::once(t.headers[i].len()))
                        .max()
                        .unwrap_or(0)
                })
                .collect();
            let fmt_row = |cells: &[String]| -> String {
                cells
                    .iter()
                    .enumerate()
                    .map(|(i, c)| format!("{:width$}", c, width = widths.get(i).copied().unwrap_or(0)))
                    .collect::<Vec<_>>()
                    .join("  ")
                    .trim_end()
                    .to_string()
            };
            out.push_str(&fmt_row(&t.headers));
            out.push('\n');
            for r in &t.rows {
                out.push_str(&fmt_row(r));
                out.push('\n');
            }
        }
        if !self.certificates.is_empty() {
            out.push_str("\n## certificates\n");
            for c in &self.certificates {
                out.push_str(&format!(
                    "{}: horizon n <= {}, tolerance {}\n",
                    c.name, c.horizon, c.tolerance
                ));
            }
        }
        if !self.verdicts.is_empty() {
            out.push_str("\n## verdicts\n");
            for v in &self.verdicts {
                let tag = match v.status {
                    Status::Ok => "OK",
                    Status::Blocked => "BLOCKED",
                    Status::Violation => "VIOLATION",
                    Status::Info => "INFO",
                };
                out.push_str(&format!("[{tag}] {}: {}\n", v.name, v.detail));
            }
        }
        out
    }
}

/// 12 significant digits; positional notation for moderate exponents.
pub fn fmt_f(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.11e}", x);
    let epos = sci.find('e').unwrap();
    let exp: i32 = sci[epos + 1..].parse().unwrap();
    if (-4..12).contains(&exp) {
        let places = (11 - exp).clamp(0, 17) as usize;
        let t = format!("{:.*}", places, x);
        if t.contains('.') {
            t.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            t
        }
    } else {
        let mant = sci[..epos].trim_end_matches('0').trim_end_matches('.');
        format!("{mant}e{exp}")
    }
}

/// Complex as `re+imj`.
pub fn fmt_c(z: Complex64) -> String {
    if z.im == 0.0 {
        fmt_f(z.re)
    } else if z.im < 0.0 {
        format!("{}-{}j", fmt_f(z.re), fmt_f(-z.im))
    } else {
        format!("{}+{}j", fmt_f(z.re), fmt_f(z.im))
    }
}

pub fn fmt_matrix(m: &CMatrix) -> String {
    let rows: Vec<String> = (0..m.dim())
        .map(|i| {
            let cells: Vec<String> = (0..m.dim()).map(|j| fmt_c(m.get(i, j))).collect();
            format!("[{}]", cells.join(", "))
        })
        .collect();
    format!("[{}]", rows.join(", "))
}

pub fn fmt_poly(p: &MatrixPolynomial) -> String {
    match p.degree() {
        None => "0".into(),
        Some(d) => {
            let terms: Vec<String> = (0..=d)
                .map(|k| {
                    if k == 0 {
                        fmt_matrix(&p.coeff(0))
                    } else if k == 1 {
                        format!("{} x", fmt_matrix(&p.coeff(1)))
                    } else {
                        format!("{} x^{k}", fmt_matrix(&p.coeff(k)))
                    }
                })
                .collect();
            terms.join(" + ")
        }
    }
}
