//! Collocation solver for nonlinear fractional three-point boundary value
//! problems
//!
//! ```text
//! a2(ξ) D^α z + a1(ξ) D^β z + a0(ξ) z = g(ξ, z, z'),   ξ ∈ [0,1]
//! z(0) = γ0,  z(θ) = γ1,  z(1) = γ2
//! ```
//!
//! with Caputo derivatives of orders α ∈ (1,2] and β ∈ (0,1]. Boundary
//! values are homogenized by subtracting the quadratic interpolant of the
//! three boundary points; the transformed unknown lives in the three-point
//! kernel space. Each collocation node ξ_j contributes
//! `ψ_j(ξ) = L_x R(x,ξ)|_{x=ξ_j}`, computed exactly by termwise Caputo
//! differentiation of the kernel basis members; the orthonormalized ψ̄
//! carry the solution expansion, and nonlinear right-hand sides are handled
//! by a lagged (Picard) iteration that makes every step a linear solve.
//!
//! The node rule places m-1 nodes at (j + offset)/m in a space of dimension
//! m-2, so one ψ is linearly dependent by construction; Gram-Schmidt drops
//! it deterministically (first-come kept) and the solution sums run over
//! the survivors.

use crate::dd::Real;
use crate::fracops::{caputo_poly, FracOrder, FracSeries};
use crate::polybasis::{gram_schmidt, inner_real, Polynomial};
use crate::rkhs::{kernel_threepoint, KernelBasis, RkhsError};
use std::sync::Arc;
use thiserror::Error;

/// A coefficient function a_i(ξ) on [0,1].
pub type CoeffFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
/// A right-hand side g(ξ, z, z').
pub type RhsFn = Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;

pub fn coeff_fn(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> CoeffFn {
    Arc::new(f)
}

pub fn rhs_fn(f: impl Fn(f64, f64, f64) -> f64 + Send + Sync + 'static) -> RhsFn {
    Arc::new(f)
}

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("theta = {0} must lie strictly inside (0, 1)")]
    InvalidTheta(f64),
    #[error("alpha = {0} must lie in (1, 2]")]
    AlphaOutOfRange(f64),
    #[error("beta = {0} must lie in (0, 1]")]
    BetaOutOfRange(f64),
    #[error("node offset {0} must lie in (0, 1)")]
    InvalidNodeOffset(f64),
    #[error("m = {0} is too small: the three-point space needs m >= 3")]
    SpaceTooSmall(usize),
    #[error("iteration count must be at least 1")]
    NoIterations,
    #[error("evaluation grid is empty")]
    EmptyGrid,
    #[error("a2 vanishes at every collocation node {nodes:?}: no leading operator")]
    LeadingCoefficientVanishes { nodes: Vec<f64> },
    #[error("the operator annihilated every psi function at nodes {nodes:?}")]
    OperatorAnnihilatesSpace { nodes: Vec<f64> },
    #[error("g evaluated non-finite ({value}) at node {node} in iteration {iteration}")]
    NonFiniteRhs {
        node: f64,
        iteration: usize,
        value: f64,
    },
    #[error("coefficient {name} evaluated non-finite ({value}) at node {node}")]
    NonFiniteCoefficient {
        name: &'static str,
        node: f64,
        value: f64,
    },
    #[error(transparent)]
    Kernel(#[from] RkhsError),
}

/// Full description of one boundary value problem.
#[derive(Clone)]
pub struct ProblemSpec {
    pub alpha: FracOrder,
    pub beta: FracOrder,
    pub theta: f64,
    /// Boundary values at 0, theta, 1.
    pub gamma: [f64; 3],
    pub a0: CoeffFn,
    pub a1: CoeffFn,
    pub a2: CoeffFn,
    pub g: RhsFn,
    /// Known exact solution, for manufactured problems and error reporting.
    pub exact: Option<Polynomial>,
}

impl std::fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("alpha", &self.alpha.value())
            .field("beta", &self.beta.value())
            .field("theta", &self.theta)
            .field("gamma", &self.gamma)
            .field("exact", &self.exact.as_ref().map(|e| e.coeffs_f64()))
            .finish_non_exhaustive()
    }
}

impl ProblemSpec {
    pub fn validate(&self) -> Result<(), SolverError> {
        if !(self.theta > 0.0 && self.theta < 1.0) {
            return Err(SolverError::InvalidTheta(self.theta));
        }
        if self.alpha.value() <= 1.0 {
            return Err(SolverError::AlphaOutOfRange(self.alpha.value()));
        }
        if self.beta.value() > 1.0 {
            return Err(SolverError::BetaOutOfRange(self.beta.value()));
        }
        Ok(())
    }
}

/// Numerical configuration of one solve.
#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Space parameter: polynomial degree of the kernel space.
    pub m: usize,
    /// Number of Picard iterations.
    pub n: usize,
    /// Nodes are (j + node_offset)/m for j = 0..m-2.
    pub node_offset: f64,
    pub gs_drop_tol: f64,
    /// Optional early exit on the max successive-iterate difference.
    pub stop_tol: Option<f64>,
    /// Points where iterate differences and errors are reported.
    pub grid: Vec<f64>,
}

impl SolverConfig {
    pub fn new(m: usize, n: usize) -> Self {
        Self {
            m,
            n,
            node_offset: 0.3,
            gs_drop_tol: 1e-12,
            stop_tol: None,
            grid: default_grid(),
        }
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        if self.m < 3 {
            return Err(SolverError::SpaceTooSmall(self.m));
        }
        if self.n == 0 {
            return Err(SolverError::NoIterations);
        }
        if !(self.node_offset > 0.0 && self.node_offset < 1.0) {
            return Err(SolverError::InvalidNodeOffset(self.node_offset));
        }
        if self.grid.is_empty() {
            return Err(SolverError::EmptyGrid);
        }
        Ok(())
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.m - 1)
            .map(|j| (j as f64 + self.node_offset) / self.m as f64)
            .collect()
    }
}

/// The grid {0, 0.1, ..., 1}.
pub fn default_grid() -> Vec<f64> {
    (0..=10).map(|i| i as f64 / 10.0).collect()
}

/// The assembled collocation system: kernel basis, raw and orthonormalized
/// psi functions, orthogonalization coefficients, and rank diagnostics.
#[derive(Debug, Clone)]
pub struct CollocationSystem {
    pub kb: KernelBasis,
    pub psi: Vec<Polynomial>,
    pub psibar: Vec<Polynomial>,
    /// Lower-triangular: psibar[j] = Σ_k beta_coeffs[j][k] psi[kept[k]].
    pub beta_coeffs: Vec<Vec<Real>>,
    pub kept: Vec<usize>,
    pub dropped: Vec<usize>,
    pub nodes: Vec<f64>,
    pub warnings: Vec<String>,
}

/// Outcome of one solve: the solution in homogenized variables plus the
/// boundary shift, per-iteration diagnostics, and the error grid when the
/// exact solution is known.
#[derive(Debug, Clone)]
pub struct SolveReport {
    /// Solution of the homogenized problem (vanishes at 0, theta, 1).
    pub solution: Polynomial,
    /// Boundary interpolant q; the answer to the original problem is
    /// solution + shift.
    pub shift: Polynomial,
    /// Max successive-iterate difference on the grid, one entry per
    /// iteration performed.
    pub iterates_delta: Vec<f64>,
    pub grid: Vec<f64>,
    /// solution + shift evaluated on the grid.
    pub approx: Vec<f64>,
    /// |approx - exact| on the grid when the exact solution is known.
    pub errors: Option<Vec<f64>>,
    pub dropped_psi: Vec<usize>,
    pub warnings: Vec<String>,
    pub config: SolverConfig,
}

impl SolveReport {
    /// The solution of the original (non-homogenized) problem.
    pub fn full_solution(&self) -> Polynomial {
        self.solution.add(&self.shift)
    }
}

/// One row of a reported error table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorRow {
    pub x: f64,
    pub exact: f64,
    pub approx: f64,
    pub abs_error: f64,
}

/// Reduce a problem with boundary values (γ0, γ1, γ2) to one with zero
/// boundary values by subtracting the quadratic q interpolating the three
/// boundary points. The right-hand side absorbs both the argument shift in
/// g and the operator applied to q.
pub fn homogenize(spec: &ProblemSpec) -> Result<(ProblemSpec, Polynomial), SolverError> {
    spec.validate()?;
    let th = Real::from(spec.theta);
    // Lagrange basis through (0, θ, 1)
    let xi = Polynomial::new(&[0.0, 1.0]);
    let xi_m1 = Polynomial::new(&[-1.0, 1.0]);
    let xi_mth = xi.sub(&Polynomial::from_reals(vec![th]));
    let l0 = xi_mth.mul(&xi_m1).scale(Real::ONE / th);
    let l1 = xi.mul(&xi_m1).scale(Real::ONE / (th * th - th));
    let l2 = xi.mul(&xi_mth).scale(Real::ONE / (Real::ONE - th));
    let q = l0
        .scale(Real::from(spec.gamma[0]))
        .add(&l1.scale(Real::from(spec.gamma[1])))
        .add(&l2.scale(Real::from(spec.gamma[2])));

    let q_alpha = caputo_poly(&q, spec.alpha);
    let q_beta = caputo_poly(&q, spec.beta);
    let q_prime = q.derivative();

    let g = spec.g.clone();
    let (a0, a1, a2) = (spec.a0.clone(), spec.a1.clone(), spec.a2.clone());
    let q_for_g = q.clone();
    let g0: RhsFn = Arc::new(move |x: f64, w: f64, wp: f64| {
        let qv = q_for_g.eval(x);
        let qpv = q_prime.eval(x);
        let correction = a2(x) * q_alpha.eval_real(x).to_f64()
            + a1(x) * q_beta.eval_real(x).to_f64()
            + a0(x) * qv;
        g(x, w + qv, wp + qpv) - correction
    });

    let spec0 = ProblemSpec {
        alpha: spec.alpha,
        beta: spec.beta,
        theta: spec.theta,
        gamma: [0.0; 3],
        a0: spec.a0.clone(),
        a1: spec.a1.clone(),
        a2: spec.a2.clone(),
        g: g0,
        exact: spec.exact.as_ref().map(|e| e.sub(&q)),
    };
    Ok((spec0, q))
}

/// Assemble the collocation system for a homogenized problem: the
/// three-point kernel basis and, for each node ξ_j,
/// `ψ_j(ξ) = a2(ξ_j) [D^α_x R(x,ξ)] + a1(ξ_j) [D^β_x R(x,ξ)] + a0(ξ_j) R(ξ_j,ξ)`
/// evaluated at x = ξ_j by termwise Caputo differentiation of each basis
/// member, followed by Gram-Schmidt on the ψ set.
pub fn build_system(
    spec: &ProblemSpec,
    cfg: &SolverConfig,
) -> Result<CollocationSystem, SolverError> {
    spec.validate()?;
    cfg.validate()?;
    let nodes = cfg.nodes();
    let mut warnings = Vec::new();
    for &x in &nodes {
        if (x - spec.theta).abs() < 1e-12 {
            warnings.push(format!(
                "collocation node {x} coincides with theta = {}; psi there is \
                 well-defined but carries no new information",
                spec.theta
            ));
        }
    }

    let kb = kernel_threepoint(cfg.m, spec.theta)?;
    let d_alpha: Vec<FracSeries> = kb
        .members()
        .iter()
        .map(|h| caputo_poly(h, spec.alpha))
        .collect();
    let d_beta: Vec<FracSeries> = kb
        .members()
        .iter()
        .map(|h| caputo_poly(h, spec.beta))
        .collect();

    let mut psi: Vec<Polynomial> = Vec::with_capacity(nodes.len());
    for &xj in &nodes {
        let (a2v, a1v, a0v) = ((spec.a2)(xj), (spec.a1)(xj), (spec.a0)(xj));
        for (name, value) in [("a2", a2v), ("a1", a1v), ("a0", a0v)] {
            if !value.is_finite() {
                return Err(SolverError::NonFiniteCoefficient {
                    name,
                    node: xj,
                    value,
                });
            }
        }
        let mut p = Polynomial::zero();
        for (i, h) in kb.members().iter().enumerate() {
            let w = Real::from(a2v) * d_alpha[i].eval_real(xj)
                + Real::from(a1v) * d_beta[i].eval_real(xj)
                + Real::from(a0v) * h.eval_real(Real::from(xj));
            p = p.add(&h.scale(w));
        }
        psi.push(p);
    }

    let gs =
        gram_schmidt(&psi, cfg.gs_drop_tol).map_err(|_| SolverError::OperatorAnnihilatesSpace {
            nodes: nodes.clone(),
        })?;

    Ok(CollocationSystem {
        kb,
        psi,
        psibar: gs.members,
        beta_coeffs: gs.coeffs,
        kept: gs.kept,
        dropped: gs.dropped,
        nodes,
        warnings,
    })
}

/// Solution of the linear collocation problem with the given right-hand
/// side values at the nodes:
/// `z(ξ) = Σ_j (Σ_{k<=j} β_jk rhs[kept[k]]) ψ̄_j(ξ)`,
/// summed over the surviving ψ indices.
pub fn linear_solve(sys: &CollocationSystem, rhs_values: &[f64]) -> Polynomial {
    assert_eq!(
        rhs_values.len(),
        sys.nodes.len(),
        "one right-hand side value per collocation node"
    );
    let mut z = Polynomial::zero();
    for (j, psibar) in sys.psibar.iter().enumerate() {
        let mut coef = Real::ZERO;
        for (k, &beta) in sys.beta_coeffs[j].iter().enumerate() {
            coef += beta * Real::from(rhs_values[sys.kept[k]]);
        }
        z = z.add(&psibar.scale(coef));
    }
    z
}

fn max_grid_diff(a: &Polynomial, b: &Polynomial, grid: &[f64]) -> f64 {
    grid.iter()
        .map(|&x| {
            (a.eval_real(Real::from(x)) - b.eval_real(Real::from(x)))
                .to_f64()
                .abs()
        })
        .fold(0.0, f64::max)
}

/// Run the lagged (Picard) iteration on an already-homogenized problem:
/// z_0 = 0, then each step solves the linear problem with g evaluated at
/// the previous iterate and its analytic derivative. Boundary values in
/// `spec` are expected to be zero; use [`solve`] for the general path.
pub fn iterate(spec: &ProblemSpec, cfg: &SolverConfig) -> Result<SolveReport, SolverError> {
    let sys = build_system(spec, cfg)?;
    let nodes = &sys.nodes;
    if nodes.iter().all(|&x| (spec.a2)(x) == 0.0) {
        return Err(SolverError::LeadingCoefficientVanishes {
            nodes: nodes.clone(),
        });
    }

    let mut z = Polynomial::zero();
    let mut deltas = Vec::with_capacity(cfg.n);
    for it in 1..=cfg.n {
        let zp = z.derivative();
        let mut rhs = vec![0.0; nodes.len()];
        for &k in &sys.kept {
            let x = nodes[k];
            let value = (spec.g)(x, z.eval(x), zp.eval(x));
            if !value.is_finite() {
                return Err(SolverError::NonFiniteRhs {
                    node: x,
                    iteration: it,
                    value,
                });
            }
            rhs[k] = value;
        }
        let next = linear_solve(&sys, &rhs);
        let delta = max_grid_diff(&next, &z, &cfg.grid);
        deltas.push(delta);
        z = next;
        if cfg.stop_tol.is_some_and(|tol| delta <= tol) {
            break;
        }
    }

    let approx: Vec<f64> = cfg.grid.iter().map(|&x| z.eval(x)).collect();
    let errors = spec.exact.as_ref().map(|e| {
        cfg.grid
            .iter()
            .map(|&x| (z.eval(x) - e.eval(x)).abs())
            .collect()
    });
    Ok(SolveReport {
        solution: z,
        shift: Polynomial::zero(),
        iterates_delta: deltas,
        grid: cfg.grid.clone(),
        approx,
        errors,
        dropped_psi: sys.dropped,
        warnings: sys.warnings,
        config: cfg.clone(),
    })
}

/// Homogenize, assemble, iterate; the reported solution and errors refer to
/// the original problem.
pub fn solve(spec: &ProblemSpec, cfg: &SolverConfig) -> Result<SolveReport, SolverError> {
    let (spec0, q) = homogenize(spec)?;
    let mut report = iterate(&spec0, cfg)?;
    report.approx = report
        .grid
        .iter()
        .map(|&x| report.solution.eval(x) + q.eval(x))
        .collect();
    report.shift = q;
    Ok(report)
}

/// Build a problem with a known polynomial solution: the forcing term
/// `f = a2 D^α e + a1 D^β e + a0 e - nonlinear(ξ, e, e')` is computed in
/// closed form and the right-hand side becomes
/// `g(ξ, z, z') = f(ξ) + nonlinear(ξ, z, z')`. Boundary values are read off
/// the exact solution (zero when it vanishes at the three points).
#[allow(clippy::too_many_arguments)]
pub fn manufacture(
    exact: Polynomial,
    theta: f64,
    alpha: FracOrder,
    beta: FracOrder,
    a0: CoeffFn,
    a1: CoeffFn,
    a2: CoeffFn,
    nonlinear: RhsFn,
) -> Result<ProblemSpec, SolverError> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(SolverError::InvalidTheta(theta));
    }
    let gamma = [exact.eval(0.0), exact.eval(theta), exact.eval(1.0)];
    let e_alpha = caputo_poly(&exact, alpha);
    let e_beta = caputo_poly(&exact, beta);
    let e_prime = exact.derivative();

    let (fa0, fa1, fa2) = (a0.clone(), a1.clone(), a2.clone());
    let nl = nonlinear.clone();
    let e = exact.clone();
    let g: RhsFn = Arc::new(move |x: f64, z: f64, zp: f64| {
        let f = fa2(x) * e_alpha.eval_real(x).to_f64()
            + fa1(x) * e_beta.eval_real(x).to_f64()
            + fa0(x) * e.eval(x)
            - nl(x, e.eval(x), e_prime.eval(x));
        f + nl(x, z, zp)
    });

    Ok(ProblemSpec {
        alpha,
        beta,
        theta,
        gamma,
        a0,
        a1,
        a2,
        g,
        exact: Some(exact),
    })
}

/// Error table rows at the given grid points; the approximation is the
/// reported solution plus the boundary shift.
pub fn error_grid(report: &SolveReport, exact: &Polynomial, grid: &[f64]) -> Vec<ErrorRow> {
    let full = report.full_solution();
    grid.iter()
        .map(|&x| {
            let e = exact.eval(x);
            let a = full.eval(x);
            ErrorRow {
                x,
                exact: e,
                approx: a,
                abs_error: (a - e).abs(),
            }
        })
        .collect()
}

/// The two worked problems used throughout the tests and the acceptance
/// suite.
pub mod examples {
    use super::*;

    /// `D^α z + (ξ+1) D^β z + ξ z - z² = f`, exact solution
    /// ξ(ξ-1/2)(ξ-1), interior point 1/2.
    pub fn nonlinear_halfpoint(alpha: f64, beta: f64) -> ProblemSpec {
        let exact = Polynomial::new(&[0.0, 0.5, -1.5, 1.0]);
        manufacture(
            exact,
            0.5,
            FracOrder::new(alpha).expect("alpha in (1,2]"),
            FracOrder::new(beta).expect("beta in (0,1]"),
            coeff_fn(|x| x),
            coeff_fn(|x| x + 1.0),
            coeff_fn(|_| 1.0),
            rhs_fn(|_, z, _| -z * z),
        )
        .expect("valid manufactured problem")
    }

    /// `ξ² D^α z + (ξ²-1) D^β z + ξ³ z - z z' - z³ = f`, exact solution
    /// ξ(ξ-3/5)(ξ-1), interior point 3/5.
    pub fn nonlinear_sixtenths(alpha: f64, beta: f64) -> ProblemSpec {
        let exact = Polynomial::new(&[0.0, 0.6, -1.6, 1.0]);
        manufacture(
            exact,
            0.6,
            FracOrder::new(alpha).expect("alpha in (1,2]"),
            FracOrder::new(beta).expect("beta in (0,1]"),
            coeff_fn(|x| x * x * x),
            coeff_fn(|x| x * x - 1.0),
            coeff_fn(|x| x * x),
            rhs_fn(|_, z, zp| -z * zp - z * z * z),
        )
        .expect("valid manufactured problem")
    }
}

/// Residual of the inner-product identity `⟨z, ψ_j⟩ = rhs_j` over the kept
/// indices; this is the identity the solution expansion rests on.
pub fn collocation_residual(sys: &CollocationSystem, z: &Polynomial, rhs: &[f64]) -> f64 {
    sys.kept
        .iter()
        .map(|&k| {
            (inner_real(z, &sys.psi[k]) - Real::from(rhs[k]))
                .to_f64()
                .abs()
        })
        .fold(0.0, f64::max)
}
