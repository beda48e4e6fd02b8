//! Report assembly and the three output formats: human-readable table,
//! csv (17 significant digits, byte-deterministic), and a json run report
//! whose numbers round-trip losslessly.

use crate::specfile::{ProblemEcho, SolverEcho};
use fracbvp_core::solver::SolveReport;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Table,
    Csv,
    Json,
}

/// One grid row of a solve.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Row {
    pub x: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<f64>,
    pub approx: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub abs_error: Option<f64>,
}

/// Machine-readable record of one run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub version: String,
    pub problem: ProblemEcho,
    pub solver: SolverEcho,
    pub dropped_psi: Vec<usize>,
    pub warnings: Vec<String>,
    pub iterates_delta: Vec<f64>,
    pub rows: Vec<Row>,
    /// Monomial coefficients of the reported solution (with the boundary
    /// shift already added back).
    pub solution_coeffs: Vec<f64>,
    pub wall_time_ms: f64,
}

pub fn make_rows(
    report: &SolveReport,
    exact: Option<&fracbvp_core::polybasis::Polynomial>,
) -> Vec<Row> {
    report
        .grid
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let e = exact.map(|p| p.eval(x));
            Row {
                x,
                exact: e,
                approx: report.approx[i],
                abs_error: e.map(|ev| (report.approx[i] - ev).abs()),
            }
        })
        .collect()
}

/// 17 significant digits: enough to reproduce the f64 bit pattern.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn csv_solve(rows: &[Row]) -> String {
    let mut out = String::from("x,exact,approx,abs_error\n");
    for r in rows {
        let exact = r.exact.map(fmt17).unwrap_or_default();
        let err = r.abs_error.map(fmt17).unwrap_or_default();
        out.push_str(&format!("{},{},{},{}\n", r.x, exact, fmt17(r.approx), err));
    }
    out
}

pub fn table_solve(rows: &[Row]) -> String {
    let with_exact = rows.iter().any(|r| r.exact.is_some());
    let mut out = String::new();
    if with_exact {
        out.push_str(&format!(
            "{:<8} {:<26} {:<26} {}\n",
            "x", "Exact Sol.", "Approximate Sol.", "Absolute Error"
        ));
        for r in rows {
            out.push_str(&format!(
                "{:<8} {:<26} {:<26} {}\n",
                r.x,
                r.exact.map(fmt17).unwrap_or_default(),
                fmt17(r.approx),
                r.abs_error.map(|e| format!("{e:.2e}")).unwrap_or_default(),
            ));
        }
    } else {
        out.push_str(&format!("{:<8} {}\n", "x", "Approximate Sol."));
        for r in rows {
            out.push_str(&format!("{:<8} {}\n", r.x, fmt17(r.approx)));
        }
    }
    out
}

/// Error-matrix output of a sweep: one column per (alpha, beta) pair.
pub struct SweepTable {
    pub grid: Vec<f64>,
    pub pairs: Vec<(f64, f64)>,
    /// errors[pair][grid index]
    pub errors: Vec<Vec<f64>>,
}

pub fn csv_sweep(t: &SweepTable) -> String {
    let mut out = String::from("x");
    for (a, b) in &t.pairs {
        out.push_str(&format!(",alpha={a};beta={b}"));
    }
    out.push('\n');
    for (i, &x) in t.grid.iter().enumerate() {
        out.push_str(&x.to_string());
        for col in &t.errors {
            out.push(',');
            out.push_str(&fmt17(col[i]));
        }
        out.push('\n');
    }
    out
}

pub fn table_sweep(t: &SweepTable) -> String {
    let mut out = format!("{:<8}", "x");
    for (a, b) in &t.pairs {
        out.push_str(&format!(" {:<18}", format!("a={a}, b={b}")));
    }
    out.push('\n');
    for (i, &x) in t.grid.iter().enumerate() {
        out.push_str(&format!("{x:<8}"));
        for col in &t.errors {
            out.push_str(&format!(" {:<18}", format!("{:.2e}", col[i])));
        }
        out.push('\n');
    }
    out
}
