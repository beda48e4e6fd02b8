//! Double-double arithmetic: the working scalar of the polynomial pipeline.
//!
//! A value is stored as an unevaluated sum `hi + lo` of two `f64` with
//! `|lo| <= ulp(hi)/2`, giving roughly 106 bits (~31 decimal digits) of
//! precision. Monomial coefficients of shifted Legendre polynomials grow
//! like 5.8^n while their inner products cancel down to O(1), so plain
//! f64 loses ~1.5 decimal digits per degree and is unusable past degree 8.
//! Carrying coefficients and inner products in double-double keeps
//! orthonormality defects near 1e-20 for every degree this crate supports.
//!
//! The algorithms are the classical error-free transformations (Dekker,
//! Knuth) plus the add/mul/div/sqrt compositions from Bailey's qd library.
//! [`Real`] is the single switch point for the pipeline precision: the rest
//! of the crate only uses the `Real` alias and its operator impls.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

/// The scalar used for polynomial coefficients and inner products.
pub type Real = DoubleDouble;

/// Unevaluated sum of two `f64` values, `hi + lo`.
#[derive(Debug, Clone, Copy, Default)]
pub struct DoubleDouble {
    hi: f64,
    lo: f64,
}

/// Knuth two-sum: s + e == a + b exactly.
#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

/// Fast two-sum, valid when |a| >= |b|.
#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let e = b - (s - a);
    (s, e)
}

/// Exact product via fused multiply-add: p + e == a * b exactly.
#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let e = f64::mul_add(a, b, -p);
    (p, e)
}

impl DoubleDouble {
    pub const ZERO: Self = Self { hi: 0.0, lo: 0.0 };
    pub const ONE: Self = Self { hi: 1.0, lo: 0.0 };

    /// Unit roundoff of the format, 2^-106.
    pub const EPSILON: f64 = 1.232595164407831e-32;

    #[inline]
    pub fn new(hi: f64, lo: f64) -> Self {
        let (s, e) = two_sum(hi, lo);
        Self { hi: s, lo: e }
    }

    #[inline]
    pub fn hi(self) -> f64 {
        self.hi
    }

    #[inline]
    pub fn lo(self) -> f64 {
        self.lo
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn abs(self) -> Self {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            -self
        } else {
            self
        }
    }

    pub fn is_finite(self) -> bool {
        self.hi.is_finite() && self.lo.is_finite()
    }

    pub fn max(self, other: Self) -> Self {
        if self < other {
            other
        } else {
            self
        }
    }

    /// Karp-style square root: one f64 seed plus a single Newton step in
    /// double-double, which is enough to reach full precision.
    pub fn sqrt(self) -> Self {
        if self.hi == 0.0 && self.lo == 0.0 {
            return Self::ZERO;
        }
        debug_assert!(self.hi > 0.0, "sqrt of negative double-double");
        let x = 1.0 / self.hi.sqrt();
        let ax = self.hi * x;
        let ax_dd = Self { hi: ax, lo: 0.0 };
        let err = self - ax_dd * ax_dd;
        let (hi, lo) = quick_two_sum(ax, err.hi * (x * 0.5));
        Self { hi, lo }
    }

    /// Integer power by repeated squaring.
    pub fn powi(self, n: u32) -> Self {
        let mut base = self;
        let mut k = n;
        let mut acc = Self::ONE;
        while k > 0 {
            if k & 1 == 1 {
                acc *= base;
            }
            base *= base;
            k >>= 1;
        }
        acc
    }

    /// Reciprocal, `1 / self`.
    pub fn recip(self) -> Self {
        Self::ONE / self
    }
}

impl From<f64> for DoubleDouble {
    #[inline]
    fn from(v: f64) -> Self {
        Self { hi: v, lo: 0.0 }
    }
}

impl From<i32> for DoubleDouble {
    #[inline]
    fn from(v: i32) -> Self {
        Self {
            hi: v as f64,
            lo: 0.0,
        }
    }
}

impl From<usize> for DoubleDouble {
    #[inline]
    fn from(v: usize) -> Self {
        // usize up to 2^53 converts exactly; degrees here are tiny.
        Self {
            hi: v as f64,
            lo: 0.0,
        }
    }
}

impl Add for DoubleDouble {
    type Output = Self;
    /// Accurate (IEEE-style) double-double addition.
    fn add(self, rhs: Self) -> Self {
        let (s1, s2) = two_sum(self.hi, rhs.hi);
        let (t1, t2) = two_sum(self.lo, rhs.lo);
        let (s1, s2) = quick_two_sum(s1, s2 + t1);
        let (hi, lo) = quick_two_sum(s1, s2 + t2);
        Self { hi, lo }
    }
}

impl Sub for DoubleDouble {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Mul for DoubleDouble {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let (p1, p2) = two_prod(self.hi, rhs.hi);
        let p2 = p2 + self.hi * rhs.lo + self.lo * rhs.hi;
        let (hi, lo) = quick_two_sum(p1, p2);
        Self { hi, lo }
    }
}

impl Div for DoubleDouble {
    type Output = Self;
    /// Long division with two correction terms (qd's accurate division).
    fn div(self, rhs: Self) -> Self {
        let q1 = self.hi / rhs.hi;
        let r = self - rhs * Self::from(q1);
        let q2 = r.hi / rhs.hi;
        let r = r - rhs * Self::from(q2);
        let q3 = r.hi / rhs.hi;
        let (s, e) = quick_two_sum(q1, q2);
        Self { hi: s, lo: e } + Self::from(q3)
    }
}

impl Neg for DoubleDouble {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

macro_rules! mixed_ops {
    ($($op:ident :: $f:ident),*) => {$(
        impl $op<f64> for DoubleDouble {
            type Output = Self;
            #[inline]
            fn $f(self, rhs: f64) -> Self {
                self.$f(Self::from(rhs))
            }
        }
    )*};
}
mixed_ops!(Add::add, Sub::sub, Mul::mul, Div::div);

impl AddAssign for DoubleDouble {
    #[inline]
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}
impl SubAssign for DoubleDouble {
    #[inline]
    fn sub_assign(&mut self, rhs: Self) {
        *self = *self - rhs;
    }
}
impl MulAssign for DoubleDouble {
    #[inline]
    fn mul_assign(&mut self, rhs: Self) {
        *self = *self * rhs;
    }
}
impl DivAssign for DoubleDouble {
    #[inline]
    fn div_assign(&mut self, rhs: Self) {
        *self = *self / rhs;
    }
}

impl Sum for DoubleDouble {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::ZERO, |a, b| a + b)
    }
}

impl PartialEq for DoubleDouble {
    fn eq(&self, other: &Self) -> bool {
        self.hi == other.hi && self.lo == other.lo
    }
}

impl PartialOrd for DoubleDouble {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            ord => ord,
        }
    }
}

impl fmt::Display for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e}", self.to_f64())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sums_are_error_free() {
        let a = 1.0;
        let b = 1e-20;
        let s = Real::from(a) + Real::from(b);
        // plain f64 would lose b entirely
        assert_eq!(s.hi(), 1.0);
        assert_eq!(s.lo(), 1e-20);
    }

    #[test]
    fn product_captures_rounding_error() {
        let a = Real::from(0.1) * Real::from(0.1);
        let exact_err = f64::mul_add(0.1, 0.1, -(0.1 * 0.1));
        assert_eq!(a.hi(), 0.1 * 0.1);
        assert_eq!(a.lo(), exact_err);
    }

    #[test]
    fn division_roundtrips() {
        let x = Real::from(1.0) / Real::from(3.0);
        let back = x * Real::from(3.0) - Real::ONE;
        assert!(back.to_f64().abs() < 1e-31);
    }

    #[test]
    fn sqrt_squares_back() {
        for v in [2.0, 840.0, 1.0 / 3.0, 1e-8] {
            let r = Real::from(v).sqrt();
            let d = (r * r - Real::from(v)).to_f64().abs();
            assert!(d < v * 1e-30, "sqrt defect {d:e} for {v}");
        }
    }

    #[test]
    fn powi_matches_repeated_mul() {
        let x = Real::from(0.7);
        let mut acc = Real::ONE;
        for _ in 0..9 {
            acc *= x;
        }
        assert!((x.powi(9) - acc).to_f64().abs() < 1e-33);
        assert_eq!(x.powi(0), Real::ONE);
    }

    #[test]
    fn comparisons_respect_low_word() {
        let a = Real::new(1.0, 1e-20);
        let b = Real::new(1.0, -1e-20);
        assert!(b < a);
        assert!(a.abs() == a);
        assert!((-a).abs() == a);
        assert!(a.max(b) == a);
    }

    #[test]
    fn harmonic_sum_beats_f64() {
        // sum 1/k for k=1..=50 forwards in dd, compare against the same
        // sum done backwards (better conditioned in f64)
        let fwd: Real = (1..=50).map(|k| Real::ONE / Real::from(k as f64)).sum();
        let mut back = 0.0_f64;
        for k in (1..=50).rev() {
            back += 1.0 / k as f64;
        }
        assert!((fwd.to_f64() - back).abs() < 1e-14);
        assert!(fwd.lo().abs() > 0.0, "low word should carry information");
    }
}
