//! Reproducing kernels for the polynomial spaces with homogeneous boundary
//! conditions: the two-point kernel over functions vanishing at 0 and 1,
//! and the three-point kernel whose sections also vanish at an interior
//! point theta.
//!
//! A kernel is stored as an orthonormal basis {h_j}; the kernel value is
//! `R(x, ξ) = Σ_j h_j(x) h_j(ξ)`. The three-point kernel is obtained by the
//! rank-one correction
//! `R(x,ξ) - R(x,θ) R(θ,ξ) / R(θ,θ)`,
//! implemented as an orthogonal projection of the basis against the unit
//! vector along the section R_θ, followed by re-orthonormalization. The
//! closed-form correction itself is kept around in tests as the oracle for
//! the basis route, and the solver differentiates basis members termwise.

use crate::dd::Real;
use crate::polybasis::{self, gram_schmidt, phi_basis, PolyError, Polynomial};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum RkhsError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("evaluation point {0} lies outside [0, 1]")]
    Domain(f64),
    #[error("theta = {theta} is degenerate: |R_theta(theta)| = {value:e} < 1e-14")]
    DegenerateTheta { theta: f64, value: f64 },
    #[error("theta = {0} must lie strictly inside (0, 1)")]
    ThetaOutOfRange(f64),
}

/// Default Gram-Schmidt drop tolerance for kernel construction.
pub const GS_DROP_TOL: f64 = 1e-12;

/// An orthonormal polynomial basis representing a reproducing kernel.
///
/// Every member vanishes at 0 and 1; when `theta` is present the members
/// vanish there as well and the represented kernel is the three-point one.
#[derive(Debug, Clone)]
pub struct KernelBasis {
    h: Vec<Polynomial>,
    m: usize,
    theta: Option<f64>,
}

impl KernelBasis {
    pub fn members(&self) -> &[Polynomial] {
        &self.h
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn theta(&self) -> Option<f64> {
        self.theta
    }
}

fn check_unit_interval(x: f64) -> Result<(), RkhsError> {
    if !(0.0..=1.0).contains(&x) {
        return Err(RkhsError::Domain(x));
    }
    Ok(())
}

/// Kernel of the space of degree <= m polynomials vanishing at 0 and 1:
/// Gram-Schmidt on the boundary-adapted basis, m - 1 members.
pub fn kernel_0w(m: usize) -> Result<KernelBasis, RkhsError> {
    let basis = phi_basis(m)?;
    let gs = gram_schmidt(&basis.members, GS_DROP_TOL)?;
    Ok(KernelBasis {
        h: gs.members,
        m,
        theta: None,
    })
}

fn section_real(kb: &KernelBasis, x: Real) -> Polynomial {
    let mut acc = Polynomial::zero();
    for h in &kb.h {
        acc = acc.add(&h.scale(h.eval_real(x)));
    }
    acc
}

/// The section R_x(·) = Σ_j h_j(x) h_j as a polynomial in ξ.
pub fn kernel_section(kb: &KernelBasis, x: f64) -> Result<Polynomial, RkhsError> {
    check_unit_interval(x)?;
    Ok(section_real(kb, Real::from(x)))
}

/// R(x, ξ) = Σ_j h_j(x) h_j(ξ); symmetric in its arguments.
pub fn kernel_eval(kb: &KernelBasis, x: f64, xi: f64) -> Result<f64, RkhsError> {
    check_unit_interval(x)?;
    check_unit_interval(xi)?;
    let (x, xi) = (Real::from(x), Real::from(xi));
    let mut acc = Real::ZERO;
    for h in &kb.h {
        acc += h.eval_real(x) * h.eval_real(xi);
    }
    Ok(acc.to_f64())
}

/// Kernel basis of the subspace additionally vanishing at `theta`.
///
/// Projects the two-point basis against the normalized section R_θ and
/// re-orthonormalizes; exactly one direction is removed, leaving m - 2
/// members. Fails when |R_θ(θ)| < 1e-14, where the correction has no
/// numerical meaning.
pub fn kernel_threepoint(m: usize, theta: f64) -> Result<KernelBasis, RkhsError> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(RkhsError::ThetaOutOfRange(theta));
    }
    if m < 3 {
        return Err(RkhsError::Poly(PolyError::SpaceTooSmall(m, 3)));
    }
    let base = kernel_0w(m)?;
    let th = Real::from(theta);
    let r_theta = section_real(&base, th);
    let r_tt = r_theta.eval_real(th);
    if r_tt.to_f64().abs() < 1e-14 {
        return Err(RkhsError::DegenerateTheta {
            theta,
            value: r_tt.to_f64(),
        });
    }
    // Gram-Schmidt [u, h_0, ..., h_{m-2}] with u the normalized section at
    // theta, then discard u: the remaining members span the orthogonal
    // complement of u, which is exactly the subspace vanishing at theta.
    // Feeding u first (rather than pre-projecting each h_j) keeps every
    // input at unit norm, so the relative drop rule fires on the one h_j
    // that u absorbs.
    let u = r_theta.scale(Real::ONE / r_tt.sqrt());
    let mut inputs = vec![u];
    inputs.extend(base.h.iter().cloned());
    let gs = gram_schmidt(&inputs, GS_DROP_TOL)?;
    debug_assert_eq!(gs.kept.first(), Some(&0));
    Ok(KernelBasis {
        h: gs.members[1..].to_vec(),
        m,
        theta: Some(theta),
    })
}

/// Reproducing-property defect `|⟨p, R_x⟩ - p(x)|` for a member p of the
/// represented space.
pub fn verify_reproducing(kb: &KernelBasis, p: &Polynomial, x: f64) -> f64 {
    let xr = Real::from(x);
    let section = section_real(kb, xr);
    (polybasis::inner_real(p, &section) - p.eval_real(xr))
        .to_f64()
        .abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polybasis::inner;

    #[test]
    fn one_dimensional_kernel() {
        // m = 2: single member, normalized 6x^2 - 6x; norm^2 = 1.2
        let kb = kernel_0w(2).unwrap();
        assert_eq!(kb.members().len(), 1);
        let h = &kb.members()[0];
        let r = kernel_section(&kb, 0.3).unwrap();
        let defect = (inner(h, &r) - h.eval(0.3)).abs();
        assert!(defect < 1e-15);
        // value at (0.5, 0.5): (-1.5)^2 / 1.2
        let v = kernel_eval(&kb, 0.5, 0.5).unwrap();
        assert!((v - 1.875).abs() < 1e-14, "got {v}");
    }

    #[test]
    fn kernel_vanishes_at_origin() {
        let kb = kernel_0w(5).unwrap();
        for i in 0..=20 {
            let xi = i as f64 / 20.0;
            assert!(kernel_eval(&kb, 0.0, xi).unwrap().abs() < 1e-20);
            assert!(kernel_eval(&kb, 1.0, xi).unwrap().abs() < 1e-18);
        }
    }

    #[test]
    fn kernel_symmetry() {
        let kb = kernel_0w(7).unwrap();
        // fixed pseudo-random pairs from a tiny LCG
        let mut state = 0x2545F4914F6CDD1D_u64;
        let mut next = move || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..50 {
            let a = next();
            let b = next();
            let lhs = kernel_eval(&kb, a, b).unwrap();
            let rhs = kernel_eval(&kb, b, a).unwrap();
            assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));
        }
    }

    #[test]
    fn reproducing_property_m4() {
        let kb = kernel_0w(4).unwrap();
        let phis = phi_basis(4).unwrap();
        // p = phi_2 + 2 phi_3
        let p = phis.members[0].add(&phis.members[1].scale(Real::from(2.0)));
        let section = kernel_section(&kb, 0.3).unwrap();
        let got = inner(&p, &section);
        let want = p.eval(0.3);
        assert!((got - want).abs() <= 1e-11, "{got} vs {want}");
    }

    #[test]
    fn reproducing_defect_random_members() {
        let mut state = 0x9E3779B97F4A7C15_u64;
        let mut next = move || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        for m in [4, 7, 10] {
            let kb = kernel_0w(m).unwrap();
            for _ in 0..5 {
                let mut p = Polynomial::zero();
                for h in kb.members() {
                    p = p.add(&h.scale(Real::from(next())));
                }
                for _ in 0..10 {
                    let x = (next() + 1.0) / 2.0;
                    let defect = verify_reproducing(&kb, &p, x);
                    assert!(defect <= 1e-10, "m={m}, x={x}: defect {defect:e}");
                }
            }
        }
    }

    #[test]
    fn section_is_consistent_with_eval() {
        let kb = kernel_0w(6).unwrap();
        let sec = kernel_section(&kb, 0.42).unwrap();
        for i in 0..=10 {
            let xi = i as f64 / 10.0;
            let a = sec.eval(xi);
            let b = kernel_eval(&kb, 0.42, xi).unwrap();
            assert!((a - b).abs() < 1e-14);
        }
        // every member vanishes exactly at 0, so the section there is the
        // zero polynomial
        assert!(kernel_section(&kb, 0.0).unwrap().is_zero());
        assert!(kernel_section(&kb, 1.2).is_err());
        assert!(kernel_eval(&kb, 0.5, -0.1).is_err());
    }

    #[test]
    fn reproducing_defect_edge_cases() {
        let kb = kernel_0w(5).unwrap();
        assert_eq!(verify_reproducing(&kb, &Polynomial::zero(), 0.3), 0.0);
        for h in kb.members() {
            assert!(verify_reproducing(&kb, h, 0.3) <= 1e-11);
        }
    }

    #[test]
    fn threepoint_member_count() {
        for m in 3..=10 {
            let kb = kernel_threepoint(m, 0.5).unwrap();
            assert_eq!(kb.members().len(), m - 2, "m = {m}");
            assert_eq!(kb.theta(), Some(0.5));
        }
    }

    #[test]
    fn threepoint_m3_is_the_cubic() {
        // the only cubic vanishing at {0, 1/2, 1} is x(x-1/2)(x-1), so the
        // single member is proportional to it; its L2 norm is 1/sqrt(840)
        let kb = kernel_threepoint(3, 0.5).unwrap();
        assert_eq!(kb.members().len(), 1);
        let h = &kb.members()[0];
        let cubic = Polynomial::new(&[0.0, 0.5, -1.5, 1.0]);
        let scale = 840.0_f64.sqrt();
        let coeffs = h.coeffs_f64();
        let want = cubic.scale(Real::from(scale)).coeffs_f64();
        let sign = if coeffs[1] * want[1] < 0.0 { -1.0 } else { 1.0 };
        for (c, w) in coeffs.iter().zip(&want) {
            assert!((c - sign * w).abs() < 1e-10, "{coeffs:?} vs {want:?}");
        }
    }

    #[test]
    fn threepoint_annihilates_theta() {
        let kb = kernel_threepoint(5, 0.5).unwrap();
        for i in 0..=20 {
            let xi = i as f64 * 0.05;
            let v = kernel_eval(&kb, 0.5, xi).unwrap();
            assert!(v.abs() <= 1e-11, "R(theta, {xi}) = {v:e}");
        }
        let sec = kernel_section(&kb, 0.37).unwrap();
        assert!(sec.eval(0.5).abs() <= 1e-11);
        assert!(sec.eval(0.0).abs() <= 1e-11);
        assert!(sec.eval(1.0).abs() <= 1e-11);
    }

    #[test]
    fn threepoint_matches_rank_one_formula() {
        // basis route vs the closed-form correction, on a 21x21 grid
        for m in [3, 5, 8] {
            for theta in [0.3, 0.5, 0.6] {
                let base = kernel_0w(m).unwrap();
                let three = kernel_threepoint(m, theta).unwrap();
                let rtt = kernel_eval(&base, theta, theta).unwrap();
                let mut worst = 0.0_f64;
                for i in 0..=20 {
                    for j in 0..=20 {
                        let x = i as f64 / 20.0;
                        let xi = j as f64 / 20.0;
                        let direct = kernel_eval(&three, x, xi).unwrap();
                        let formula = kernel_eval(&base, x, xi).unwrap()
                            - kernel_eval(&base, x, theta).unwrap()
                                * kernel_eval(&base, theta, xi).unwrap()
                                / rtt;
                        worst = worst.max((direct - formula).abs());
                    }
                }
                assert!(worst <= 1e-10, "m={m} theta={theta}: worst {worst:e}");
            }
        }
    }

    #[test]
    fn projection_is_idempotent() {
        // applying the rank-one correction a second time changes nothing:
        // the corrected members already vanish at theta
        let theta = 0.3;
        let th = Real::from(theta);
        let base = kernel_0w(6).unwrap();
        let kb = kernel_threepoint(6, theta).unwrap();
        let r_theta = section_real(&base, th);
        let inv = Real::ONE / r_theta.eval_real(th);
        for h in kb.members() {
            let again = h.sub(&r_theta.scale(h.eval_real(th) * inv));
            let diff = again.sub(h);
            for c in diff.coeffs_f64() {
                assert!(c.abs() <= 1e-12, "second correction moved a coeff by {c:e}");
            }
        }
    }

    #[test]
    fn degenerate_and_invalid_theta() {
        assert!(matches!(
            kernel_threepoint(5, 0.0),
            Err(RkhsError::ThetaOutOfRange(_))
        ));
        assert!(matches!(
            kernel_threepoint(5, 1.0),
            Err(RkhsError::ThetaOutOfRange(_))
        ));
        assert!(matches!(kernel_threepoint(2, 0.5), Err(RkhsError::Poly(_))));
    }
}
