//! Arbitrary-precision real and complex ball arithmetic with outward rounding.
//!
//! A [`RealBall`] is a midpoint at working precision together with a
//! low-precision nonnegative radius; the contract is that the exact value
//! being tracked lies within `radius` of `midpoint`. Every operation rounds
//! the midpoint to nearest and accounts for (a) the propagated input radii,
//! (b) the function's modulus of continuity, and (c) the midpoint rounding
//! error, always rounding radius arithmetic *up*. Radii may therefore be
//! over-estimates, never under-estimates, so any strict inequality decided
//! through [`RealBall::is_positive_certified`] and friends is a statement
//! about the exact values.
//!
//! [`ComplexBall`] is the rectangular (re/im) pairing of two real balls.

use std::cmp::Ordering;

use rug::float::{Constant, Round};
use rug::{Float, Integer, Rational};

use crate::{Error, Result};

/// Precision (bits) of radius arithmetic. Radii only need a couple of correct
/// leading digits; what matters is the huge exponent range of the backing
/// float type.
pub const RADIUS_PREC: u32 = 32;

/// Exponent used for the radius surrogate attached to a zero midpoint (a zero
/// float carries no exponent, so "one ulp" is pinned to a fixed tiny scale
/// well inside the representable exponent range).
const ZERO_ULP_EXP: i32 = -1_000_000_000;

pub(crate) fn exp2(e: i32) -> Float {
    Float::with_val(RADIUS_PREC, Float::i_exp(1, e))
}

/// One unit in the last place of `mid` (or the fixed surrogate for zero),
/// used as an upper bound for a round-to-nearest midpoint error.
pub(crate) fn ulp(mid: &Float) -> Float {
    match mid.get_exp() {
        Some(e) => exp2(e.saturating_sub(mid.prec() as i32).max(ZERO_ULP_EXP)),
        None => exp2(ZERO_ULP_EXP),
    }
}

pub(crate) fn radd(a: &Float, b: &Float) -> Float {
    Float::with_val_round(RADIUS_PREC, a + b, Round::Up).0
}

pub(crate) fn rsub_down(a: &Float, b: &Float) -> Float {
    Float::with_val_round(RADIUS_PREC, a - b, Round::Down).0
}

pub(crate) fn rmul(a: &Float, b: &Float) -> Float {
    Float::with_val_round(RADIUS_PREC, a * b, Round::Up).0
}

pub(crate) fn rmul_down(a: &Float, b: &Float) -> Float {
    Float::with_val_round(RADIUS_PREC, a * b, Round::Down).0
}

pub(crate) fn rdiv(a: &Float, b: &Float) -> Float {
    Float::with_val_round(RADIUS_PREC, a / b, Round::Up).0
}

pub(crate) fn abs_up(x: &Float) -> Float {
    Float::with_val_round(RADIUS_PREC, x.abs_ref(), Round::Up).0
}

pub(crate) fn abs_down(x: &Float) -> Float {
    Float::with_val_round(RADIUS_PREC, x.abs_ref(), Round::Down).0
}

/// `exp(a)` rounded up, at radius precision.
pub(crate) fn rexp_up(a: &Float) -> Float {
    let mut t = Float::with_val_round(RADIUS_PREC, a, Round::Up).0;
    t.exp_round(Round::Up);
    t
}

/// `x^e` with every multiplication rounded up, at radius precision
/// (for 0 ≤ x; used in truncation-tail bounds).
pub(crate) fn rpow_up(x: &Float, mut e: u64) -> Float {
    let mut result = Float::with_val(RADIUS_PREC, 1);
    let mut base = Float::with_val_round(RADIUS_PREC, x, Round::Up).0;
    while e > 0 {
        if e & 1 == 1 {
            result = rmul(&result, &base);
        }
        e >>= 1;
        if e > 0 {
            base = rmul(&base, &base);
        }
    }
    result
}

/// A real number enclosure `[mid − rad, mid + rad]`.
#[derive(Clone, Debug)]
pub struct RealBall {
    mid: Float,
    rad: Float,
}

impl RealBall {
    /// Ball from explicit midpoint and radius.
    pub fn from_parts(mid: Float, rad: Float) -> Self {
        debug_assert!(rad.is_finite() && rad >= 0);
        Self { mid, rad }
    }

    /// Exact zero at the given precision.
    pub fn zero(prec: u32) -> Self {
        Self {
            mid: Float::with_val(prec, 0),
            rad: Float::with_val(RADIUS_PREC, 0),
        }
    }

    /// Exact small-integer ball.
    pub fn from_i64(prec: u32, v: i64) -> Self {
        let (mid, ord) = Float::with_val_round(prec, v, Round::Nearest);
        let rad = if ord == Ordering::Equal {
            Float::with_val(RADIUS_PREC, 0)
        } else {
            ulp(&mid)
        };
        Self { mid, rad }
    }

    /// Ball enclosing an arbitrary-precision integer (exact when it fits).
    pub fn from_integer(prec: u32, v: &Integer) -> Self {
        let (mid, ord) = Float::with_val_round(prec, v, Round::Nearest);
        let rad = if ord == Ordering::Equal {
            Float::with_val(RADIUS_PREC, 0)
        } else {
            ulp(&mid)
        };
        Self { mid, rad }
    }

    /// Ball enclosing a rational number.
    pub fn from_rational(prec: u32, v: &Rational) -> Self {
        let (mid, ord) = Float::with_val_round(prec, v, Round::Nearest);
        let rad = if ord == Ordering::Equal {
            Float::with_val(RADIUS_PREC, 0)
        } else {
            ulp(&mid)
        };
        Self { mid, rad }
    }

    /// Enclosure of π.
    pub fn pi(prec: u32) -> Self {
        let mid = Float::with_val(prec, Constant::Pi);
        let rad = ulp(&mid);
        Self { mid, rad }
    }

    /// Ball from certified directed endpoints `lo ≤ hi`.
    pub fn from_endpoints(prec: u32, lo: &Float, hi: &Float) -> Self {
        debug_assert!(lo <= hi);
        let (sum, _) = Float::with_val_round(prec, lo + hi, Round::Nearest);
        let mid = sum / 2u32; // division by 2 is exact
        let half_width = rdiv(&rsub(hi, lo), &Float::with_val(RADIUS_PREC, 2));
        let rad = radd(&radd(&half_width, &ulp(&mid)), &ulp(&mid));
        Self { mid, rad }
    }

    pub fn mid(&self) -> &Float {
        &self.mid
    }

    pub fn rad(&self) -> &Float {
        &self.rad
    }

    pub fn prec(&self) -> u32 {
        self.mid.prec()
    }

    /// Certified upper endpoint (rounded up).
    pub fn upper(&self) -> Float {
        Float::with_val_round(self.prec(), &self.mid + &self.rad, Round::Up).0
    }

    /// Certified lower endpoint (rounded down).
    pub fn lower(&self) -> Float {
        Float::with_val_round(self.prec(), &self.mid - &self.rad, Round::Down).0
    }

    /// Certified upper bound on the absolute value.
    pub fn abs_upper(&self) -> Float {
        radd(&abs_up(&self.mid), &self.rad)
    }

    /// Certified lower bound on the absolute value (clamped at 0).
    pub fn abs_lower(&self) -> Float {
        let t = rsub_down(&abs_down(&self.mid), &self.rad);
        if t < 0 {
            Float::with_val(RADIUS_PREC, 0)
        } else {
            t
        }
    }

    /// Whether the enclosure contains zero.
    pub fn contains_zero(&self) -> bool {
        let t = abs_down(&self.mid);
        t <= self.rad
    }

    /// Certified `> 0`.
    pub fn is_positive_certified(&self) -> bool {
        self.mid.is_sign_positive() && !self.contains_zero() && self.mid.is_finite()
    }

    /// Certified `< 0`.
    pub fn is_negative_certified(&self) -> bool {
        self.mid.is_sign_negative() && !self.contains_zero() && self.mid.is_finite()
    }

    /// Certified strict comparison `self > other`.
    pub fn gt_certified(&self, other: &RealBall) -> bool {
        self.lower() > other.upper()
    }

    /// Certified strict comparison `self < other`.
    pub fn lt_certified(&self, other: &RealBall) -> bool {
        self.upper() < other.lower()
    }

    /// Whether the enclosure contains the exact rational `v`.
    pub fn contains_rational(&self, v: &Rational) -> bool {
        let prec = self.prec() + 64;
        let d = self.sub(&RealBall::from_rational(prec, v));
        d.contains_zero()
    }

    pub fn neg(&self) -> RealBall {
        RealBall {
            mid: Float::with_val(self.prec(), -&self.mid),
            rad: self.rad.clone(),
        }
    }

    pub fn add(&self, o: &RealBall) -> RealBall {
        let prec = self.prec().max(o.prec());
        let (mid, ord) = Float::with_val_round(prec, &self.mid + &o.mid, Round::Nearest);
        let mut rad = radd(&self.rad, &o.rad);
        if ord != Ordering::Equal {
            rad = radd(&rad, &ulp(&mid));
        }
        RealBall { mid, rad }
    }

    pub fn sub(&self, o: &RealBall) -> RealBall {
        let prec = self.prec().max(o.prec());
        let (mid, ord) = Float::with_val_round(prec, &self.mid - &o.mid, Round::Nearest);
        let mut rad = radd(&self.rad, &o.rad);
        if ord != Ordering::Equal {
            rad = radd(&rad, &ulp(&mid));
        }
        RealBall { mid, rad }
    }

    pub fn mul(&self, o: &RealBall) -> RealBall {
        let prec = self.prec().max(o.prec());
        let (mid, ord) = Float::with_val_round(prec, &self.mid * &o.mid, Round::Nearest);
        // |xy − m₁m₂| ≤ |m₁|r₂ + |m₂|r₁ + r₁r₂
        let mut rad = radd(
            &radd(
                &rmul(&abs_up(&self.mid), &o.rad),
                &rmul(&abs_up(&o.mid), &self.rad),
            ),
            &rmul(&self.rad, &o.rad),
        );
        if ord != Ordering::Equal {
            rad = radd(&rad, &ulp(&mid));
        }
        RealBall { mid, rad }
    }

    /// Multiplication by an exact machine integer.
    pub fn mul_i64(&self, k: i64) -> RealBall {
        self.mul(&RealBall::from_i64(self.prec(), k))
    }

    /// `1 / self`; fails if the ball contains zero.
    pub fn recip(&self) -> Result<RealBall> {
        let am = abs_down(&self.mid);
        if am <= self.rad {
            return Err(Error::Indeterminate(
                "reciprocal of a ball containing zero".into(),
            ));
        }
        let prec = self.prec();
        let (mid, _) = Float::with_val_round(prec, self.mid.recip_ref(), Round::Nearest);
        // |1/x − 1/m| ≤ r / (|m|·(|m| − r))
        let denom = rmul_down(&am, &rsub_down(&am, &self.rad));
        let rad = radd(&rdiv(&self.rad, &denom), &ulp(&mid));
        Ok(RealBall { mid, rad })
    }

    pub fn div(&self, o: &RealBall) -> Result<RealBall> {
        Ok(self.mul(&o.recip()?))
    }

    /// Square root for balls whose exact value is known to be ≥ 0. A lower
    /// endpoint that dips below zero (radius slack) is clamped to zero.
    pub fn sqrt_clamped(&self) -> RealBall {
        let prec = self.prec();
        let mut hi = Float::with_val_round(prec, &self.mid + &self.rad, Round::Up).0;
        if hi < 0 {
            hi = Float::with_val(prec, 0);
        }
        hi.sqrt_round(Round::Up);
        let mut lo = Float::with_val_round(prec, &self.mid - &self.rad, Round::Down).0;
        if lo < 0 {
            lo = Float::with_val(prec, 0);
        }
        lo.sqrt_round(Round::Down);
        RealBall::from_endpoints(prec, &lo, &hi)
    }

    pub fn exp(&self) -> RealBall {
        let prec = self.prec();
        let (mid, _) = Float::with_val_round(prec, self.mid.exp_ref(), Round::Nearest);
        // |e^x − e^m| ≤ e^m (e^r − 1) ≤ e^m · r·e^r
        let em = rexp_up(&self.mid);
        let rad = radd(
            &rmul(&em, &rmul(&self.rad, &rexp_up(&self.rad))),
            &ulp(&mid),
        );
        RealBall { mid, rad }
    }

    /// Natural logarithm; fails unless the ball is certified positive.
    pub fn ln(&self) -> Result<RealBall> {
        let m_low = rsub_down(&abs_down(&self.mid), &self.rad);
        if !(self.mid.is_sign_positive() && m_low > 0) {
            return Err(Error::Indeterminate(
                "logarithm of a ball not certified positive".into(),
            ));
        }
        let prec = self.prec();
        let (mid, _) = Float::with_val_round(prec, self.mid.ln_ref(), Round::Nearest);
        // |ln x − ln m| ≤ r / (m − r)
        let rad = radd(&rdiv(&self.rad, &m_low), &ulp(&mid));
        Ok(RealBall { mid, rad })
    }

    pub fn cos(&self) -> RealBall {
        let (mid, _) = Float::with_val_round(self.prec(), self.mid.cos_ref(), Round::Nearest);
        let rad = radd(&self.rad, &ulp(&mid)); // |cos| is 1-Lipschitz
        RealBall { mid, rad }
    }

    pub fn sin(&self) -> RealBall {
        let (mid, _) = Float::with_val_round(self.prec(), self.mid.sin_ref(), Round::Nearest);
        let rad = radd(&self.rad, &ulp(&mid));
        RealBall { mid, rad }
    }

    /// Integer power by binary exponentiation.
    pub fn pow_u64(&self, mut e: u64) -> RealBall {
        let mut result = RealBall::from_i64(self.prec(), 1);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Enclosure of the absolute value.
    pub fn abs(&self) -> RealBall {
        if self.contains_zero() {
            // |x| ∈ [0, |m| + r]
            let hi = self.abs_upper();
            let hi_full = Float::with_val_round(self.prec(), &hi, Round::Up).0;
            let lo = Float::with_val(self.prec(), 0);
            RealBall::from_endpoints(self.prec(), &lo, &hi_full)
        } else {
            RealBall {
                mid: Float::with_val(self.prec(), self.mid.abs_ref()),
                rad: self.rad.clone(),
            }
        }
    }

    /// Certified integer identification. Returns `Some(n)` exactly when the
    /// ball is narrow enough (radius < 1/4) that it can contain at most one
    /// integer and that integer is inside the enclosure. When the tracked
    /// exact value is known to be an integer, the returned value equals it.
    pub fn round_to_integer_certified(&self) -> Option<Integer> {
        // the radius has RADIUS_PREC ≤ 53 significant bits, so to_f64 is exact
        if !(self.rad.to_f64() < 0.25) {
            return None;
        }
        let cand = self.mid.to_integer()?;
        let diff = Float::with_val_round(self.prec() + 64, &self.mid - &cand, Round::Up).0;
        let adiff = Float::with_val_round(RADIUS_PREC, diff.abs_ref(), Round::Up).0;
        if adiff <= self.rad {
            Some(cand)
        } else {
            None
        }
    }

    /// Human-readable `mid ± rad` rendering.
    pub fn to_display_string(&self, digits: usize) -> String {
        format!("{:.*e} ± {:.3e}", digits, self.mid, self.rad.to_f64())
    }
}

pub(crate) fn rsub(a: &Float, b: &Float) -> Float {
    Float::with_val_round(RADIUS_PREC, a - b, Round::Up).0
}

/// A rectangular complex enclosure: independent real and imaginary balls.
#[derive(Clone, Debug)]
pub struct ComplexBall {
    pub re: RealBall,
    pub im: RealBall,
}

impl ComplexBall {
    pub fn new(re: RealBall, im: RealBall) -> Self {
        Self { re, im }
    }

    pub fn zero(prec: u32) -> Self {
        Self {
            re: RealBall::zero(prec),
            im: RealBall::zero(prec),
        }
    }

    pub fn from_i64(prec: u32, v: i64) -> Self {
        Self {
            re: RealBall::from_i64(prec, v),
            im: RealBall::zero(prec),
        }
    }

    pub fn from_real(re: RealBall) -> Self {
        let prec = re.prec();
        Self {
            re,
            im: RealBall::zero(prec),
        }
    }

    pub fn prec(&self) -> u32 {
        self.re.prec().max(self.im.prec())
    }

    pub fn is_real_exactly(&self) -> bool {
        self.im.mid().is_zero() && self.im.rad().is_zero()
    }

    pub fn contains_zero(&self) -> bool {
        self.re.contains_zero() && self.im.contains_zero()
    }

    pub fn neg(&self) -> ComplexBall {
        ComplexBall {
            re: self.re.neg(),
            im: self.im.neg(),
        }
    }

    pub fn conj(&self) -> ComplexBall {
        ComplexBall {
            re: self.re.clone(),
            im: self.im.neg(),
        }
    }

    pub fn add(&self, o: &ComplexBall) -> ComplexBall {
        ComplexBall {
            re: self.re.add(&o.re),
            im: self.im.add(&o.im),
        }
    }

    pub fn sub(&self, o: &ComplexBall) -> ComplexBall {
        ComplexBall {
            re: self.re.sub(&o.re),
            im: self.im.sub(&o.im),
        }
    }

    pub fn mul(&self, o: &ComplexBall) -> ComplexBall {
        ComplexBall {
            re: self.re.mul(&o.re).sub(&self.im.mul(&o.im)),
            im: self.re.mul(&o.im).add(&self.im.mul(&o.re)),
        }
    }

    pub fn mul_real(&self, o: &RealBall) -> ComplexBall {
        ComplexBall {
            re: self.re.mul(o),
            im: self.im.mul(o),
        }
    }

    pub fn mul_i64(&self, k: i64) -> ComplexBall {
        ComplexBall {
            re: self.re.mul_i64(k),
            im: self.im.mul_i64(k),
        }
    }

    /// `re² + im²` as a real ball.
    pub fn norm_sq(&self) -> RealBall {
        self.re.mul(&self.re).add(&self.im.mul(&self.im))
    }

    /// Enclosure of `|z|`.
    pub fn abs(&self) -> RealBall {
        self.norm_sq().sqrt_clamped()
    }

    /// `1 / self`; fails if the ball contains zero.
    pub fn recip(&self) -> Result<ComplexBall> {
        let n = self.norm_sq();
        let inv_n = n.recip().map_err(|_| {
            Error::Indeterminate("reciprocal of a complex ball containing zero".into())
        })?;
        Ok(ComplexBall {
            re: self.re.mul(&inv_n),
            im: self.im.neg().mul(&inv_n),
        })
    }

    pub fn div(&self, o: &ComplexBall) -> Result<ComplexBall> {
        Ok(self.mul(&o.recip()?))
    }

    /// `exp(z) = e^{re}(cos im + i sin im)`.
    pub fn exp(&self) -> ComplexBall {
        let scale = self.re.exp();
        ComplexBall {
            re: scale.mul(&self.im.cos()),
            im: scale.mul(&self.im.sin()),
        }
    }

    /// Integer power by binary exponentiation.
    pub fn pow_u64(&self, mut e: u64) -> ComplexBall {
        let mut result = ComplexBall::from_i64(self.prec(), 1);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Maximum of the coordinate radii (a convenient scalar error gauge).
    pub fn rad_upper(&self) -> Float {
        let a = self.re.rad().clone();
        let b = self.im.rad().clone();
        if a >= b {
            a
        } else {
            b
        }
    }

    pub fn to_display_string(&self, digits: usize) -> String {
        format!(
            "{:.*e} + {:.*e}·i (± {:.3e})",
            digits,
            self.re.mid(),
            digits,
            self.im.mid(),
            self.rad_upper().to_f64()
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close_f64(b: &RealBall, v: f64) {
        let mid = b.mid().to_f64();
        assert!(
            (mid - v).abs() <= 1e-13 * v.abs().max(1.0),
            "ball {} is not near {v}",
            b.to_display_string(20)
        );
        assert!(b.rad().to_f64() <= 1e-20, "radius too large");
    }

    #[test]
    fn exact_construction() {
        let b = RealBall::from_i64(64, 42);
        assert!(b.rad().is_zero());
        assert!(!b.contains_zero());
        assert!(b.is_positive_certified());
        let z = RealBall::zero(64);
        assert!(z.contains_zero());
        assert!(!z.is_positive_certified());
    }

    #[test]
    fn add_mul_enclosure() {
        let a = RealBall::from_rational(128, &Rational::from((1, 3)));
        let b = RealBall::from_rational(128, &Rational::from((1, 6)));
        let s = a.add(&b);
        assert!(s.contains_rational(&Rational::from((1, 2))));
        let p = a.mul(&b);
        assert!(p.contains_rational(&Rational::from((1, 18))));
        assert!(!p.contains_rational(&Rational::from((1, 17))));
    }

    #[test]
    fn division_and_zero_balls() {
        let a = RealBall::from_i64(128, 1);
        let b = RealBall::from_i64(128, 7);
        let q = a.div(&b).unwrap();
        assert!(q.contains_rational(&Rational::from((1, 7))));
        let z = RealBall::from_parts(
            Float::with_val(128, 0.0),
            Float::with_val(RADIUS_PREC, 1e-10),
        );
        assert!(z.recip().is_err());
    }

    #[test]
    fn sqrt_exp_ln() {
        let two = RealBall::from_i64(128, 2);
        let r = two.sqrt_clamped();
        assert_close_f64(&r, std::f64::consts::SQRT_2);
        let sq = r.mul(&r);
        assert!(sq.contains_rational(&Rational::from(2)));

        let e1 = RealBall::from_i64(128, 1).exp();
        assert_close_f64(&e1, std::f64::consts::E);
        let back = e1.ln().unwrap();
        assert!(back.contains_rational(&Rational::from(1)));
    }

    #[test]
    fn trigonometry_and_pi() {
        let pi = RealBall::pi(128);
        assert_close_f64(&pi, std::f64::consts::PI);
        let c = pi.cos();
        assert!(c.contains_rational(&Rational::from(-1)));
        let s = pi.sin();
        assert!(s.contains_zero());
    }

    #[test]
    fn powers() {
        let three = RealBall::from_i64(128, 3);
        assert!(three
            .pow_u64(7)
            .contains_rational(&Rational::from(2187)));
        let z = ComplexBall::new(RealBall::zero(128), RealBall::from_i64(128, 1));
        let z4 = z.pow_u64(4); // i⁴ = 1
        assert!(z4.re.contains_rational(&Rational::from(1)));
        assert!(z4.im.contains_zero());
    }

    #[test]
    fn complex_basics() {
        let prec = 128;
        let z = ComplexBall::new(RealBall::from_i64(prec, 3), RealBall::from_i64(prec, 4));
        let a = z.abs();
        assert!(a.contains_rational(&Rational::from(5)));
        let w = z.mul(&z.recip().unwrap());
        assert!(w.re.contains_rational(&Rational::from(1)));
        assert!(w.im.contains_zero());
        // exp(iπ) = −1
        let ipi = ComplexBall::new(RealBall::zero(prec), RealBall::pi(prec));
        let m1 = ipi.exp();
        assert!(m1.re.contains_rational(&Rational::from(-1)));
        assert!(m1.im.contains_zero());
    }

    #[test]
    fn radius_monotone_refinement() {
        // Doubling the precision shrinks the radius of a composite computation.
        let f = |prec: u32| {
            let x = RealBall::from_i64(prec, 2).sqrt_clamped();
            let y = x.exp().ln().unwrap().mul(&RealBall::pi(prec));
            y.rad().to_f64()
        };
        let r128 = f(128);
        let r256 = f(256);
        assert!(r256 < r128 / 2.0, "r128 = {r128:e}, r256 = {r256:e}");
    }

    #[test]
    fn integer_identification() {
        let b = RealBall::from_parts(
            Float::with_val(128, 287496.0000001),
            Float::with_val(RADIUS_PREC, 1e-6),
        );
        assert_eq!(b.round_to_integer_certified(), Some(Integer::from(287496)));
        let wide = RealBall::from_parts(
            Float::with_val(128, 287496),
            Float::with_val(RADIUS_PREC, 0.3),
        );
        assert_eq!(wide.round_to_integer_certified(), None);
        let offset = RealBall::from_parts(
            Float::with_val(128, 287496.1),
            Float::with_val(RADIUS_PREC, 1e-6),
        );
        assert_eq!(offset.round_to_integer_certified(), None);
    }

    #[test]
    fn certified_comparisons() {
        let a = RealBall::from_i64(128, 10);
        let b = RealBall::from_i64(128, 11);
        assert!(b.gt_certified(&a));
        assert!(a.lt_certified(&b));
        assert!(!a.gt_certified(&a));
        let wide = RealBall::from_parts(
            Float::with_val(128, 10.5),
            Float::with_val(RADIUS_PREC, 1.0),
        );
        assert!(!wide.gt_certified(&a));
        assert!(!wide.lt_certified(&b));
    }
}
