//! Polynomial algebra on [0,1]: shifted Legendre polynomials, the
//! boundary-adapted basis, the exact L2 inner product, and Gram-Schmidt
//! orthonormalization.
//!
//! Polynomials are dense ascending monomial-coefficient sequences. The
//! coefficients are carried in [`Real`] (double-double): shifted Legendre
//! coefficients alternate in sign and grow like 5.8^n, so inner products
//! and basis combinations cancel heavily and would lose ~1.5 digits per
//! degree in plain f64.

use crate::dd::Real;
use thiserror::Error;

/// Largest polynomial degree the basis builders will produce. Bounds the
/// conditioning of the monomial representation; the solver is normally run
/// with m <= 12.
pub const DEGREE_CAP: usize = 64;

#[derive(Debug, Error, PartialEq)]
pub enum PolyError {
    #[error("degree {0} exceeds the cap {DEGREE_CAP}")]
    DegreeCapExceeded(usize),
    #[error("space parameter m = {0} is too small (need m >= {1})")]
    SpaceTooSmall(usize, usize),
    #[error("drop tolerance must be positive, got {0}")]
    BadDropTolerance(f64),
    #[error("every input vector was dropped: the basis is degenerate")]
    AllVectorsDropped,
}

/// Dense polynomial in ascending monomial order: `coeffs[i]` multiplies x^i.
///
/// Trailing zero coefficients are trimmed; the zero polynomial holds no
/// coefficients at all.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Polynomial {
    coeffs: Vec<Real>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn new(coeffs: &[f64]) -> Self {
        Self::from_reals(coeffs.iter().map(|&c| Real::from(c)).collect())
    }

    pub fn from_reals(coeffs: Vec<Real>) -> Self {
        let mut p = Self { coeffs };
        p.trim();
        p
    }

    fn trim(&mut self) {
        while self.coeffs.last() == Some(&Real::ZERO) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree of the polynomial; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeffs(&self) -> &[Real] {
        &self.coeffs
    }

    pub fn coeffs_f64(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.to_f64()).collect()
    }

    /// Horner evaluation in double-double.
    pub fn eval_real(&self, x: Real) -> Real {
        let mut acc = Real::ZERO;
        for &c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.eval_real(Real::from(x)).to_f64()
    }

    /// Classical first derivative.
    pub fn derivative(&self) -> Polynomial {
        if self.coeffs.len() <= 1 {
            return Polynomial::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &c)| c * Real::from(k))
            .collect();
        Polynomial::from_reals(coeffs)
    }

    pub fn scale(&self, c: Real) -> Polynomial {
        Polynomial::from_reals(self.coeffs.iter().map(|&a| a * c).collect())
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![Real::ZERO; n];
        for (i, &c) in self.coeffs.iter().enumerate() {
            out[i] += c;
        }
        for (i, &c) in other.coeffs.iter().enumerate() {
            out[i] += c;
        }
        Polynomial::from_reals(out)
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.add(&other.scale(-Real::ONE))
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        if self.is_zero() || other.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![Real::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::from_reals(out)
    }
}

/// Exact inner product ∫₀¹ p q dξ from coefficients:
/// Σ over term pairs of c_i d_j / (i + j + 1). The weight is 1.
pub fn inner_real(p: &Polynomial, q: &Polynomial) -> Real {
    let mut acc = Real::ZERO;
    for (i, &ci) in p.coeffs.iter().enumerate() {
        for (j, &dj) in q.coeffs.iter().enumerate() {
            acc += ci * dj / Real::from(i + j + 1);
        }
    }
    acc
}

pub fn inner(p: &Polynomial, q: &Polynomial) -> f64 {
    inner_real(p, q).to_f64()
}

/// L2 norm on [0,1].
pub fn norm_real(p: &Polynomial) -> Real {
    inner_real(p, p).sqrt()
}

/// Shifted Legendre polynomial P_n on [0,1], by the three-term recurrence
/// (n+1) P_{n+1} = (2n+1)(2ξ-1) P_n - n P_{n-1} with P_0 = 1, P_1 = 2ξ-1.
pub fn shifted_legendre(n: usize) -> Result<Polynomial, PolyError> {
    if n > DEGREE_CAP {
        return Err(PolyError::DegreeCapExceeded(n));
    }
    let mut prev = Polynomial::new(&[1.0]);
    if n == 0 {
        return Ok(prev);
    }
    let mut curr = Polynomial::new(&[-1.0, 2.0]);
    for k in 1..n {
        // (2ξ-1) * curr
        let mut shifted = vec![Real::ZERO; curr.coeffs.len() + 1];
        for (i, &c) in curr.coeffs.iter().enumerate() {
            shifted[i + 1] += c * Real::from(2);
            shifted[i] -= c;
        }
        let t = Polynomial::from_reals(shifted)
            .scale(Real::from(2 * k + 1))
            .sub(&prev.scale(Real::from(k)))
            .scale(Real::ONE / Real::from(k + 1));
        prev = curr;
        curr = t;
    }
    Ok(curr)
}

/// Basis functions spanning the polynomials that vanish at both endpoints.
#[derive(Debug, Clone)]
pub struct BasisSet {
    pub members: Vec<Polynomial>,
    pub m: usize,
}

/// The boundary-adapted basis {φ_j}_{j=2..m}: φ_j = P_j - P_0 for even j,
/// P_j - P_1 for odd j. Every member vanishes at 0 and 1.
pub fn phi_basis(m: usize) -> Result<BasisSet, PolyError> {
    if m < 2 {
        return Err(PolyError::SpaceTooSmall(m, 2));
    }
    if m > DEGREE_CAP {
        return Err(PolyError::DegreeCapExceeded(m));
    }
    let p0 = shifted_legendre(0)?;
    let p1 = shifted_legendre(1)?;
    let mut members = Vec::with_capacity(m - 1);
    for j in 2..=m {
        let pj = shifted_legendre(j)?;
        members.push(if j % 2 == 0 { pj.sub(&p0) } else { pj.sub(&p1) });
    }
    Ok(BasisSet { members, m })
}

/// Result of [`gram_schmidt`]: `members[j] = Σ_k coeffs[j][k] · input[kept[k]]`,
/// with `coeffs` lower-triangular over the kept indices.
#[derive(Debug, Clone)]
pub struct Orthonormalized {
    pub members: Vec<Polynomial>,
    pub coeffs: Vec<Vec<Real>>,
    pub kept: Vec<usize>,
    pub dropped: Vec<usize>,
}

/// Modified Gram-Schmidt with one reorthogonalization pass under [`inner_real`].
///
/// A vector whose post-projection norm falls below `drop_tol` times its
/// pre-projection norm is linearly dependent on its predecessors and is
/// dropped (first-come kept, later dependents dropped). The expansion
/// coefficients of each orthonormal member in terms of the kept inputs are
/// tracked through both passes and returned.
pub fn gram_schmidt(vs: &[Polynomial], drop_tol: f64) -> Result<Orthonormalized, PolyError> {
    if !(drop_tol > 0.0) {
        return Err(PolyError::BadDropTolerance(drop_tol));
    }
    let mut members: Vec<Polynomial> = Vec::new();
    let mut coeffs: Vec<Vec<Real>> = Vec::new();
    let mut kept: Vec<usize> = Vec::new();
    let mut dropped: Vec<usize> = Vec::new();

    for (idx, v) in vs.iter().enumerate() {
        let pre = norm_real(v);
        let mut w = v.clone();
        // rep[k] tracks w as a combination of the kept inputs; slot
        // members.len() is the current vector itself.
        let mut rep = vec![Real::ZERO; members.len() + 1];
        rep[members.len()] = Real::ONE;
        for _pass in 0..2 {
            for (t, h) in members.iter().enumerate() {
                let c = inner_real(&w, h);
                w = w.sub(&h.scale(c));
                for (slot, &hc) in coeffs[t].iter().enumerate() {
                    rep[slot] -= c * hc;
                }
            }
        }
        let post = norm_real(&w);
        if pre == Real::ZERO || post.to_f64() < drop_tol * pre.to_f64() {
            dropped.push(idx);
            continue;
        }
        let inv = Real::ONE / post;
        members.push(w.scale(inv));
        coeffs.push(rep.iter().map(|&r| r * inv).collect());
        kept.push(idx);
    }
    if members.is_empty() {
        return Err(PolyError::AllVectorsDropped);
    }
    Ok(Orthonormalized {
        members,
        coeffs,
        kept,
        dropped,
    })
}
