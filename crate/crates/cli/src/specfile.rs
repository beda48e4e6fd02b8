//! Problem-specification files: `[problem]` and `[solver]` sections of
//! `key = value` lines, `#` comments. Unknown or duplicate keys are errors
//! with their line number; missing optional keys take documented defaults
//! (gamma* = 0, a0 = a1 = "0", a2 = "1", node_offset = 0.3, gs_tol = 1e-12,
//! grid = 0:1:0.1).
//!
//! Two modes: `explicit` supplies the right-hand side `g` as an expression
//! in xi, z, zp; `manufactured` supplies the exact solution's monomial
//! coefficients plus a nonlinear term, and the forcing function is derived
//! in closed form so the solver's error is exactly measurable.

use fracbvp_core::exprlang::{self, Expr, Var};
use fracbvp_core::fracops::FracOrder;
use fracbvp_core::polybasis::Polynomial;
use fracbvp_core::solver::{manufacture, CoeffFn, ProblemSpec, RhsFn, SolverConfig};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::Arc;

#[derive(Debug)]
pub struct SpecError {
    pub line: Option<usize>,
    pub key: Option<String>,
    pub message: String,
}

impl fmt::Display for SpecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.line, &self.key) {
            (Some(line), Some(key)) => write!(f, "line {line}, key `{key}`: {}", self.message),
            (Some(line), None) => write!(f, "line {line}: {}", self.message),
            (None, Some(key)) => write!(f, "key `{key}`: {}", self.message),
            (None, None) => write!(f, "{}", self.message),
        }
    }
}

impl std::error::Error for SpecError {}

fn err_at(line: usize, key: &str, message: impl Into<String>) -> SpecError {
    SpecError {
        line: Some(line),
        key: Some(key.to_string()),
        message: message.into(),
    }
}

fn err_key(key: &str, message: impl Into<String>) -> SpecError {
    SpecError {
        line: None,
        key: Some(key.to_string()),
        message: message.into(),
    }
}

/// Problem half of the echo: everything needed to rebuild the run.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ProblemEcho {
    pub alpha: f64,
    pub beta: f64,
    pub theta: f64,
    pub gamma: [f64; 3],
    pub a0: String,
    pub a1: String,
    pub a2: String,
    pub mode: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact_coeffs: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nonlinear: Option<String>,
}

/// Solver half of the echo.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SolverEcho {
    pub m: usize,
    pub n: usize,
    pub node_offset: f64,
    pub gs_tol: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stop_tol: Option<f64>,
    pub grid: Vec<f64>,
}

/// Parsed spec file before m/n overrides are applied.
#[derive(Debug, Clone)]
pub struct SpecData {
    pub alpha: f64,
    pub beta: f64,
    pub theta: f64,
    pub gamma: [f64; 3],
    pub a0: String,
    pub a1: String,
    pub a2: String,
    pub mode: Mode,
    pub m: Option<usize>,
    pub n: Option<usize>,
    pub node_offset: f64,
    pub gs_tol: f64,
    pub stop_tol: Option<f64>,
    pub grid: Vec<f64>,
}

#[derive(Debug, Clone)]
pub enum Mode {
    Explicit {
        g: String,
    },
    Manufactured {
        exact_coeffs: Vec<f64>,
        nonlinear: String,
    },
}

/// Parse `start:stop:step` into an inclusive grid.
pub fn parse_grid(src: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = src.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("expected start:stop:step, got `{src}`"));
    }
    let nums: Vec<f64> = parts
        .iter()
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| format!("`{p}` is not a number"))
        })
        .collect::<Result<_, _>>()?;
    let (start, stop, step) = (nums[0], nums[1], nums[2]);
    if !(step > 0.0) || stop < start {
        return Err("need step > 0 and stop >= start".into());
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize;
    // for decimal steps like 0.1 whose reciprocal is an integer, dividing
    // by it lands on the clean grid values (3/10 = 0.3, while 3*0.1 does
    // not round to 0.3)
    let inv = 1.0 / step;
    let points = if (inv - inv.round()).abs() < 1e-9 * inv {
        (0..=count)
            .map(|i| start + i as f64 / inv.round())
            .collect()
    } else {
        (0..=count).map(|i| start + i as f64 * step).collect()
    };
    Ok(points)
}

struct KeyTable<'a> {
    entries: Vec<(usize, &'a str, &'a str)>, // line, key, value
    section: &'static str,
}

impl<'a> KeyTable<'a> {
    fn take(&mut self, key: &str) -> Option<(usize, &'a str)> {
        let idx = self.entries.iter().position(|(_, k, _)| *k == key)?;
        let (line, _, value) = self.entries.remove(idx);
        Some((line, value))
    }

    fn take_parsed<T: std::str::FromStr>(&mut self, key: &str) -> Result<Option<T>, SpecError> {
        match self.take(key) {
            None => Ok(None),
            Some((line, value)) => value.parse::<T>().map(Some).map_err(|_| {
                err_at(
                    line,
                    key,
                    format!("cannot parse `{value}` in [{}]", self.section),
                )
            }),
        }
    }

    fn finish(self) -> Result<(), SpecError> {
        if let Some((line, key, _)) = self.entries.first() {
            return Err(err_at(
                *line,
                key,
                format!("unknown key in [{}]", self.section),
            ));
        }
        Ok(())
    }
}

pub fn parse(text: &str) -> Result<SpecData, SpecError> {
    let mut problem = KeyTable {
        entries: Vec::new(),
        section: "problem",
    };
    let mut solver = KeyTable {
        entries: Vec::new(),
        section: "solver",
    };
    let mut current: Option<&mut KeyTable> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            current = match name.trim() {
                "problem" => Some(&mut problem),
                "solver" => Some(&mut solver),
                other => {
                    return Err(SpecError {
                        line: Some(line_no),
                        key: None,
                        message: format!("unknown section `[{other}]`"),
                    })
                }
            };
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(SpecError {
                line: Some(line_no),
                key: None,
                message: format!("expected `key = value`, got `{line}`"),
            });
        };
        let (key, value) = (key.trim(), value.trim());
        let Some(table) = current.as_deref_mut() else {
            return Err(SpecError {
                line: Some(line_no),
                key: Some(key.to_string()),
                message: "key appears before any [problem] or [solver] section".into(),
            });
        };
        if table.entries.iter().any(|(_, k, _)| *k == key) {
            return Err(err_at(
                line_no,
                key,
                format!("duplicate key in [{}]", table.section),
            ));
        }
        table.entries.push((line_no, key, value));
    }

    let alpha: f64 = problem
        .take_parsed("alpha")?
        .ok_or_else(|| err_key("alpha", "missing required key in [problem]"))?;
    let beta: f64 = problem
        .take_parsed("beta")?
        .ok_or_else(|| err_key("beta", "missing required key in [problem]"))?;
    let theta: f64 = problem
        .take_parsed("theta")?
        .ok_or_else(|| err_key("theta", "missing required key in [problem]"))?;
    let gamma = [
        problem.take_parsed("gamma0")?.unwrap_or(0.0),
        problem.take_parsed("gamma1")?.unwrap_or(0.0),
        problem.take_parsed("gamma2")?.unwrap_or(0.0),
    ];
    let a0 = problem
        .take("a0")
        .map(|(_, v)| v.to_string())
        .unwrap_or_else(|| "0".into());
    let a1 = problem
        .take("a1")
        .map(|(_, v)| v.to_string())
        .unwrap_or_else(|| "0".into());
    let a2 = problem
        .take("a2")
        .map(|(_, v)| v.to_string())
        .unwrap_or_else(|| "1".into());

    let mode_entry = problem.take("mode");
    let g_entry = problem.take("g");
    let exact_entry = problem.take("exact_coeffs");
    let nonlinear_entry = problem.take("nonlinear");
    let mode = match mode_entry {
        Some((line, "explicit")) => {
            if let Some((l, _)) = exact_entry {
                return Err(err_at(l, "exact_coeffs", "only valid in manufactured mode"));
            }
            if let Some((l, _)) = nonlinear_entry {
                return Err(err_at(l, "nonlinear", "only valid in manufactured mode"));
            }
            let (_, g) = g_entry.ok_or_else(|| err_at(line, "g", "required in explicit mode"))?;
            Mode::Explicit { g: g.to_string() }
        }
        Some((line, "manufactured")) => {
            if let Some((l, _)) = g_entry {
                return Err(err_at(l, "g", "only valid in explicit mode"));
            }
            let (cl, coeffs_text) = exact_entry
                .ok_or_else(|| err_at(line, "exact_coeffs", "required in manufactured mode"))?;
            let exact_coeffs: Vec<f64> = coeffs_text
                .split(',')
                .map(|c| {
                    c.trim().parse::<f64>().map_err(|_| {
                        err_at(
                            cl,
                            "exact_coeffs",
                            format!("`{}` is not a number", c.trim()),
                        )
                    })
                })
                .collect::<Result<_, _>>()?;
            let nonlinear = nonlinear_entry
                .map(|(_, v)| v.to_string())
                .unwrap_or_else(|| "0".into());
            Mode::Manufactured {
                exact_coeffs,
                nonlinear,
            }
        }
        Some((line, other)) => {
            return Err(err_at(
                line,
                "mode",
                format!("expected explicit or manufactured, got `{other}`"),
            ))
        }
        None => return Err(err_key("mode", "missing required key in [problem]")),
    };

    let m = solver.take_parsed::<usize>("m")?;
    let n = solver.take_parsed::<usize>("n")?;
    let node_offset = solver.take_parsed("node_offset")?.unwrap_or(0.3);
    let gs_tol = solver.take_parsed("gs_tol")?.unwrap_or(1e-12);
    let stop_tol = solver.take_parsed("stop_tol")?;
    let grid = match solver.take("grid") {
        None => fracbvp_core::solver::default_grid(),
        Some((line, src)) => parse_grid(src).map_err(|e| err_at(line, "grid", e))?,
    };

    problem.finish()?;
    solver.finish()?;

    Ok(SpecData {
        alpha,
        beta,
        theta,
        gamma,
        a0,
        a1,
        a2,
        mode,
        m,
        n,
        node_offset,
        gs_tol,
        stop_tol,
        grid,
    })
}

fn compile_coeff(key: &str, src: &str) -> Result<(Expr, CoeffFn), SpecError> {
    let expr = exprlang::parse(src).map_err(|e| err_key(key, e.to_string()))?;
    let vars = exprlang::free_vars(&expr);
    if vars.contains(&Var::Z) || vars.contains(&Var::Zp) {
        return Err(err_key(
            key,
            "coefficient functions may only use xi (z and zp are reserved for g/nonlinear)",
        ));
    }
    let compiled = expr.clone();
    let f: CoeffFn =
        Arc::new(move |x: f64| exprlang::eval(&compiled, x, 0.0, 0.0).unwrap_or(f64::NAN));
    Ok((expr, f))
}

fn compile_rhs(key: &str, src: &str) -> Result<RhsFn, SpecError> {
    let expr = exprlang::parse(src).map_err(|e| err_key(key, e.to_string()))?;
    let f: RhsFn = Arc::new(move |x: f64, z: f64, zp: f64| {
        exprlang::eval(&expr, x, z, zp).unwrap_or(f64::NAN)
    });
    Ok(f)
}

/// Build the runnable problem and configuration; `alpha`/`beta` override
/// the file values (used by sweeps, which pair them per column).
pub fn build(
    data: &SpecData,
    alpha: Option<f64>,
    beta: Option<f64>,
) -> Result<(ProblemSpec, SolverConfig, ProblemEcho, SolverEcho), SpecError> {
    let alpha_v = alpha.unwrap_or(data.alpha);
    let beta_v = beta.unwrap_or(data.beta);
    if !(data.theta > 0.0 && data.theta < 1.0) {
        return Err(err_key(
            "theta",
            format!("{} is out of range: need 0 < theta < 1", data.theta),
        ));
    }
    let alpha_order = FracOrder::new(alpha_v)
        .ok()
        .filter(|a| a.value() > 1.0)
        .ok_or_else(|| {
            err_key(
                "alpha",
                format!("{alpha_v} is out of range: need 1 < alpha <= 2"),
            )
        })?;
    let beta_order = FracOrder::new(beta_v)
        .ok()
        .filter(|b| b.value() <= 1.0)
        .ok_or_else(|| {
            err_key(
                "beta",
                format!("{beta_v} is out of range: need 0 < beta <= 1"),
            )
        })?;

    let (_, a0) = compile_coeff("a0", &data.a0)?;
    let (_, a1) = compile_coeff("a1", &data.a1)?;
    let (_, a2) = compile_coeff("a2", &data.a2)?;

    let m = data
        .m
        .ok_or_else(|| err_key("m", "missing: set [solver] m or pass --m"))?;
    let n = data
        .n
        .ok_or_else(|| err_key("n", "missing: set [solver] n or pass --n"))?;
    if m < 3 {
        return Err(err_key("m", format!("{m} is too small: need m >= 3")));
    }
    if n == 0 {
        return Err(err_key("n", "need n >= 1"));
    }
    if !(data.node_offset > 0.0 && data.node_offset < 1.0) {
        return Err(err_key(
            "node_offset",
            format!(
                "{} is out of range: need 0 < node_offset < 1",
                data.node_offset
            ),
        ));
    }

    let spec = match &data.mode {
        Mode::Explicit { g } => {
            let g_fn = compile_rhs("g", g)?;
            ProblemSpec {
                alpha: alpha_order,
                beta: beta_order,
                theta: data.theta,
                gamma: data.gamma,
                a0,
                a1,
                a2,
                g: g_fn,
                exact: None,
            }
        }
        Mode::Manufactured {
            exact_coeffs,
            nonlinear,
        } => {
            if data.gamma != [0.0; 3] {
                return Err(err_key(
                    "gamma0",
                    "manufactured mode derives boundary values from exact_coeffs; \
                     remove gamma0/gamma1/gamma2",
                ));
            }
            let nl = compile_rhs("nonlinear", nonlinear)?;
            let exact = Polynomial::new(exact_coeffs);
            manufacture(exact, data.theta, alpha_order, beta_order, a0, a1, a2, nl).map_err(
                |e| SpecError {
                    line: None,
                    key: None,
                    message: e.to_string(),
                },
            )?
        }
    };

    let cfg = SolverConfig {
        m,
        n,
        node_offset: data.node_offset,
        gs_drop_tol: data.gs_tol,
        stop_tol: data.stop_tol,
        grid: data.grid.clone(),
    };

    let problem_echo = ProblemEcho {
        alpha: alpha_v,
        beta: beta_v,
        theta: data.theta,
        gamma: data.gamma,
        a0: data.a0.clone(),
        a1: data.a1.clone(),
        a2: data.a2.clone(),
        mode: match &data.mode {
            Mode::Explicit { .. } => "explicit".into(),
            Mode::Manufactured { .. } => "manufactured".into(),
        },
        g: match &data.mode {
            Mode::Explicit { g } => Some(g.clone()),
            _ => None,
        },
        exact_coeffs: match &data.mode {
            Mode::Manufactured { exact_coeffs, .. } => Some(exact_coeffs.clone()),
            _ => None,
        },
        nonlinear: match &data.mode {
            Mode::Manufactured { nonlinear, .. } => Some(nonlinear.clone()),
            _ => None,
        },
    };
    let solver_echo = SolverEcho {
        m,
        n,
        node_offset: data.node_offset,
        gs_tol: data.gs_tol,
        stop_tol: data.stop_tol,
        grid: data.grid.clone(),
    };

    Ok((spec, cfg, problem_echo, solver_echo))
}

/// Rebuild a run from a report's echoed configuration.
pub fn from_echo(
    problem: &ProblemEcho,
    solver: &SolverEcho,
) -> Result<(ProblemSpec, SolverConfig), SpecError> {
    let mode = match problem.mode.as_str() {
        "explicit" => Mode::Explicit {
            g: problem
                .g
                .clone()
                .ok_or_else(|| err_key("g", "missing from echo"))?,
        },
        "manufactured" => Mode::Manufactured {
            exact_coeffs: problem
                .exact_coeffs
                .clone()
                .ok_or_else(|| err_key("exact_coeffs", "missing from echo"))?,
            nonlinear: problem.nonlinear.clone().unwrap_or_else(|| "0".into()),
        },
        other => return Err(err_key("mode", format!("unknown mode `{other}` in echo"))),
    };
    let data = SpecData {
        alpha: problem.alpha,
        beta: problem.beta,
        theta: problem.theta,
        gamma: problem.gamma,
        a0: problem.a0.clone(),
        a1: problem.a1.clone(),
        a2: problem.a2.clone(),
        mode,
        m: Some(solver.m),
        n: Some(solver.n),
        node_offset: solver.node_offset,
        gs_tol: solver.gs_tol,
        stop_tol: solver.stop_tol,
        grid: solver.grid.clone(),
    };
    let (spec, cfg, _, _) = build(&data, None, None)?;
    Ok((spec, cfg))
}
