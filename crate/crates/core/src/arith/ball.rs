//! Midpoint-radius enclosures over MPFR floats.
//!
//! A [`Ball`] `m ± r` stands for every real number within `r` of `m`. Every
//! operation returns a ball containing the exact result for every choice of
//! inputs inside the operand balls: midpoints are computed with
//! round-to-nearest and the rounding error is folded into the radius, while
//! radii are always accumulated with upward rounding.
//!
//! [`ComplexBall`] is a rectangular enclosure built from two real balls.

use std::cmp::Ordering;
use std::fmt;

use rug::float::{Constant, Round};
use rug::{Float, Rational};

/// Precision of radius arithmetic. Radii only need a handful of correct bits.
pub const RAD_PREC: u32 = 64;

fn rad_zero() -> Float {
    Float::new(RAD_PREC)
}

#[inline]
fn add_up(a: &Float, b: &Float) -> Float {
    Float::with_val_round(RAD_PREC, a + b, Round::Up).0
}

#[inline]
fn mul_up(a: &Float, b: &Float) -> Float {
    Float::with_val_round(RAD_PREC, a * b, Round::Up).0
}

#[inline]
fn div_up(a: &Float, b: &Float) -> Float {
    Float::with_val_round(RAD_PREC, a / b, Round::Up).0
}

#[inline]
fn abs_up(a: &Float) -> Float {
    Float::with_val_round(RAD_PREC, a.abs_ref(), Round::Up).0
}

/// Bound on `|exact - mid|` for a correctly rounded nearest result.
fn rounding_error(mid: &Float, ord: Ordering) -> Float {
    if ord == Ordering::Equal || mid.is_zero() {
        return rad_zero();
    }
    let shift = mid.prec().saturating_sub(1);
    abs_up(mid) >> shift
}

/// Real enclosure `mid ± rad`.
#[derive(Clone, Debug, PartialEq)]
pub struct Ball {
    mid: Float,
    rad: Float,
}

impl Ball {
    pub fn zero(prec: u32) -> Self {
        Ball { mid: Float::new(prec), rad: rad_zero() }
    }

    pub fn one(prec: u32) -> Self {
        Ball::from_i64(1, prec)
    }

    pub fn from_i64(value: i64, prec: u32) -> Self {
        let (mid, ord) = Float::with_val_round(prec, value, Round::Nearest);
        let rad = rounding_error(&mid, ord);
        Ball { mid, rad }
    }

    pub fn from_rational(value: &Rational, prec: u32) -> Self {
        let (mid, ord) = Float::with_val_round(prec, value, Round::Nearest);
        let rad = rounding_error(&mid, ord);
        Ball { mid, rad }
    }

    /// Exact ball around a float; the float is rounded to `prec` if needed.
    pub fn from_float(value: &Float, prec: u32) -> Self {
        let (mid, ord) = Float::with_val_round(prec, value, Round::Nearest);
        let rad = rounding_error(&mid, ord);
        Ball { mid, rad }
    }

    /// Builds a ball from a midpoint and an extra radius (rounded up).
    pub fn with_radius(mid: Float, rad: &Float) -> Self {
        Ball { mid, rad: abs_up(rad) }
    }

    /// Parses a decimal literal such as `-1.25e-3`.
    pub fn parse_decimal(text: &str, prec: u32) -> Option<Self> {
        let parsed = Float::parse(text.trim()).ok()?;
        let (mid, ord) = Float::with_val_round(prec, parsed, Round::Nearest);
        let rad = rounding_error(&mid, ord);
        Some(Ball { mid, rad })
    }

    pub fn pi(prec: u32) -> Self {
        let (mid, ord) = Float::with_val_round(prec, Constant::Pi, Round::Nearest);
        let rad = rounding_error(&mid, ord);
        Ball { mid, rad }
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

    /// Re-rounds the midpoint to a new precision, keeping the enclosure valid.
    pub fn with_prec(&self, prec: u32) -> Self {
        let (mid, ord) = Float::with_val_round(prec, &self.mid, Round::Nearest);
        let rad = add_up(&self.rad, &rounding_error(&mid, ord));
        Ball { mid, rad }
    }

    /// Widens the ball by `extra`.
    pub fn inflate(&self, extra: &Float) -> Self {
        Ball { mid: self.mid.clone(), rad: add_up(&self.rad, &abs_up(extra)) }
    }

    pub fn is_exact(&self) -> bool {
        self.rad.is_zero()
    }

    pub fn is_exact_zero(&self) -> bool {
        self.rad.is_zero() && self.mid.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        self.mid.is_finite() && self.rad.is_finite()
    }

    /// Upper bound on `|x|` over the ball.
    pub fn abs_upper(&self) -> Float {
        add_up(&abs_up(&self.mid), &self.rad)
    }

    /// Lower bound on `|x|` over the ball (zero when the ball contains 0).
    pub fn abs_lower(&self) -> Float {
        let m = Float::with_val_round(RAD_PREC, self.mid.abs_ref(), Round::Down).0;
        let lo = Float::with_val_round(RAD_PREC, &m - &self.rad, Round::Down).0;
        if lo.is_sign_negative() || lo.is_zero() {
            rad_zero()
        } else {
            lo
        }
    }

    /// Lower endpoint, rounded down.
    pub fn lower(&self) -> Float {
        Float::with_val_round(self.prec().max(RAD_PREC), &self.mid - &self.rad, Round::Down).0
    }

    /// Upper endpoint, rounded up.
    pub fn upper(&self) -> Float {
        Float::with_val_round(self.prec().max(RAD_PREC), &self.mid + &self.rad, Round::Up).0
    }

    pub fn contains_zero(&self) -> bool {
        !self.is_finite() || abs_up(&self.mid) <= self.rad
    }

    pub fn excludes_zero(&self) -> bool {
        !self.contains_zero()
    }

    /// Certified strictly positive.
    pub fn is_positive(&self) -> bool {
        self.is_finite() && self.mid.is_sign_positive() && self.excludes_zero()
    }

    /// Certified strictly negative.
    pub fn is_negative(&self) -> bool {
        self.is_finite() && self.mid.is_sign_negative() && self.excludes_zero()
    }

    /// True when the two enclosures share at least one point.
    pub fn overlaps(&self, other: &Ball) -> bool {
        self.sub(other).contains_zero()
    }

    /// True when `value` lies inside the ball.
    pub fn contains_rational(&self, value: &Rational) -> bool {
        let (Some(mid), Some(rad)) = (self.mid.to_rational(), self.rad.to_rational()) else {
            return !self.is_finite();
        };
        let diff = mid - value;
        diff.abs() <= rad
    }

    pub fn neg(&self) -> Ball {
        Ball { mid: Float::with_val(self.prec(), -&self.mid), rad: self.rad.clone() }
    }

    pub fn abs(&self) -> Ball {
        if self.mid.is_sign_negative() {
            self.neg()
        } else {
            self.clone()
        }
    }

    pub fn add(&self, other: &Ball) -> Ball {
        let prec = self.prec().max(other.prec());
        let (mid, ord) = Float::with_val_round(prec, &self.mid + &other.mid, Round::Nearest);
        let rad = add_up(&add_up(&self.rad, &other.rad), &rounding_error(&mid, ord));
        Ball { mid, rad }
    }

    pub fn sub(&self, other: &Ball) -> Ball {
        let prec = self.prec().max(other.prec());
        let (mid, ord) = Float::with_val_round(prec, &self.mid - &other.mid, Round::Nearest);
        let rad = add_up(&add_up(&self.rad, &other.rad), &rounding_error(&mid, ord));
        Ball { mid, rad }
    }

    pub fn mul(&self, other: &Ball) -> Ball {
        let prec = self.prec().max(other.prec());
        let (mid, ord) = Float::with_val_round(prec, &self.mid * &other.mid, Round::Nearest);
        let mut rad = mul_up(&abs_up(&self.mid), &other.rad);
        rad = add_up(&rad, &mul_up(&abs_up(&other.mid), &self.rad));
        rad = add_up(&rad, &mul_up(&self.rad, &other.rad));
        rad = add_up(&rad, &rounding_error(&mid, ord));
        Ball { mid, rad }
    }

    pub fn sqr(&self) -> Ball {
        self.mul(self)
    }

    pub fn mul_i64(&self, k: i64) -> Ball {
        let (mid, ord) = Float::with_val_round(self.prec(), &self.mid * k, Round::Nearest);
        let kabs = Float::with_val(RAD_PREC, k.unsigned_abs());
        let rad = add_up(&mul_up(&self.rad, &kabs), &rounding_error(&mid, ord));
        Ball { mid, rad }
    }

    pub fn mul_rational(&self, q: &Rational) -> Ball {
        self.mul(&Ball::from_rational(q, self.prec()))
    }

    /// Exact multiplication by `2^k`.
    pub fn mul_pow2(&self, k: i32) -> Ball {
        Ball { mid: self.mid.clone() << k, rad: self.rad.clone() << k }
    }

    /// Division; `None` when the divisor is not certified nonzero.
    pub fn div(&self, other: &Ball) -> Option<Ball> {
        let lo = other.abs_lower();
        if lo.is_zero() || !other.is_finite() {
            return None;
        }
        let prec = self.prec().max(other.prec());
        let (mid, ord) = Float::with_val_round(prec, &self.mid / &other.mid, Round::Nearest);
        let err = rounding_error(&mid, ord);
        let q_up = add_up(&abs_up(&mid), &err);
        let num = add_up(&self.rad, &mul_up(&q_up, &other.rad));
        let rad = add_up(&div_up(&num, &lo), &err);
        Some(Ball { mid, rad })
    }

    pub fn recip(&self) -> Option<Ball> {
        Ball::one(self.prec()).div(self)
    }

    pub fn powi(&self, n: u32) -> Ball {
        let mut result = Ball::one(self.prec());
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.sqr();
            }
        }
        result
    }

    fn with_lipschitz(mid: Float, ord: Ordering, input_rad: &Float, lipschitz: &Float) -> Ball {
        let rad = add_up(&mul_up(input_rad, lipschitz), &rounding_error(&mid, ord));
        Ball { mid, rad }
    }

    /// `|x| + r`, rounded up, as a float of radius precision.
    fn reach(&self) -> Float {
        self.abs_upper()
    }

    pub fn sin(&self) -> Ball {
        let (mid, ord) = Float::with_val_round(self.prec(), self.mid.sin_ref(), Round::Nearest);
        Ball::with_lipschitz(mid, ord, &self.rad, &Float::with_val(RAD_PREC, 1))
    }

    pub fn cos(&self) -> Ball {
        let (mid, ord) = Float::with_val_round(self.prec(), self.mid.cos_ref(), Round::Nearest);
        Ball::with_lipschitz(mid, ord, &self.rad, &Float::with_val(RAD_PREC, 1))
    }

    pub fn sinh(&self) -> Ball {
        let (mid, ord) = Float::with_val_round(self.prec(), self.mid.sinh_ref(), Round::Nearest);
        let lip = if self.rad.is_zero() {
            rad_zero()
        } else {
            Float::with_val_round(RAD_PREC, self.reach().cosh_ref(), Round::Up).0
        };
        Ball::with_lipschitz(mid, ord, &self.rad, &lip)
    }

    pub fn cosh(&self) -> Ball {
        let (mid, ord) = Float::with_val_round(self.prec(), self.mid.cosh_ref(), Round::Nearest);
        let lip = if self.rad.is_zero() {
            rad_zero()
        } else {
            Float::with_val_round(RAD_PREC, self.reach().sinh_ref(), Round::Up).0
        };
        Ball::with_lipschitz(mid, ord, &self.rad, &lip)
    }

    pub fn exp(&self) -> Ball {
        let (mid, ord) = Float::with_val_round(self.prec(), self.mid.exp_ref(), Round::Nearest);
        let lip = if self.rad.is_zero() {
            rad_zero()
        } else {
            let top = Float::with_val_round(RAD_PREC, &self.mid + &self.rad, Round::Up).0;
            Float::with_val_round(RAD_PREC, top.exp_ref(), Round::Up).0
        };
        Ball::with_lipschitz(mid, ord, &self.rad, &lip)
    }

    /// Natural logarithm; `None` unless the ball is certified positive.
    pub fn ln(&self) -> Option<Ball> {
        if !self.is_positive() {
            return None;
        }
        let (mid, ord) = Float::with_val_round(self.prec(), self.mid.ln_ref(), Round::Nearest);
        let lo = self.abs_lower();
        let lip = div_up(&Float::with_val(RAD_PREC, 1), &lo);
        Some(Ball::with_lipschitz(mid, ord, &self.rad, &lip))
    }

    /// Square root; `None` unless the ball is certified positive.
    pub fn sqrt(&self) -> Option<Ball> {
        if !self.is_positive() {
            return None;
        }
        let (mid, ord) = Float::with_val_round(self.prec(), self.mid.sqrt_ref(), Round::Nearest);
        let lo = self.abs_lower();
        let root_lo = Float::with_val_round(RAD_PREC, lo.sqrt_ref(), Round::Down).0;
        let lip = div_up(&Float::with_val(RAD_PREC, 1), &root_lo);
        Some(Ball::with_lipschitz(mid, ord, &self.rad, &lip))
    }

    /// Rounds the midpoint to the nearest integer.
    pub fn round_mid(&self) -> rug::Integer {
        self.mid.to_integer().unwrap_or_default()
    }

    /// Decimal rendering of the midpoint with `digits` significant digits.
    pub fn mid_string(&self, digits: usize) -> String {
        float_to_string(&self.mid, Some(digits), Round::Nearest)
    }

    /// Decimal rendering of the radius, rounded up.
    pub fn rad_string(&self) -> String {
        float_to_string(&self.rad, Some(6), Round::Up)
    }
}

/// Decimal rendering; `None` digits gives a round-trippable representation.
pub fn float_to_string(value: &Float, digits: Option<usize>, round: Round) -> String {
    if value.is_zero() {
        return "0".to_string();
    }
    value.to_string_radix_round(10, digits, round)
}

impl fmt::Display for Ball {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} +/- {}", self.mid_string(20), self.rad_string())
    }
}

/// Rectangular complex enclosure.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexBall {
    pub re: Ball,
    pub im: Ball,
}

impl ComplexBall {
    pub fn new(re: Ball, im: Ball) -> Self {
        ComplexBall { re, im }
    }

    pub fn zero(prec: u32) -> Self {
        ComplexBall { re: Ball::zero(prec), im: Ball::zero(prec) }
    }

    pub fn one(prec: u32) -> Self {
        ComplexBall { re: Ball::one(prec), im: Ball::zero(prec) }
    }

    pub fn i(prec: u32) -> Self {
        ComplexBall { re: Ball::zero(prec), im: Ball::one(prec) }
    }

    pub fn from_real(re: Ball) -> Self {
        let prec = re.prec();
        ComplexBall { re, im: Ball::zero(prec) }
    }

    pub fn from_i64(value: i64, prec: u32) -> Self {
        ComplexBall::from_real(Ball::from_i64(value, prec))
    }

    pub fn from_rationals(re: &Rational, im: &Rational, prec: u32) -> Self {
        ComplexBall { re: Ball::from_rational(re, prec), im: Ball::from_rational(im, prec) }
    }

    pub fn prec(&self) -> u32 {
        self.re.prec().max(self.im.prec())
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        ComplexBall { re: self.re.with_prec(prec), im: self.im.with_prec(prec) }
    }

    pub fn inflate(&self, extra: &Float) -> Self {
        ComplexBall { re: self.re.inflate(extra), im: self.im.inflate(extra) }
    }

    pub fn is_exact_zero(&self) -> bool {
        self.re.is_exact_zero() && self.im.is_exact_zero()
    }

    pub fn is_exact(&self) -> bool {
        self.re.is_exact() && self.im.is_exact()
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub fn contains_zero(&self) -> bool {
        self.re.contains_zero() && self.im.contains_zero()
    }

    pub fn excludes_zero(&self) -> bool {
        !self.contains_zero()
    }

    pub fn overlaps(&self, other: &ComplexBall) -> bool {
        self.re.overlaps(&other.re) && self.im.overlaps(&other.im)
    }

    /// Upper bound on `|z|`.
    pub fn abs_upper(&self) -> Float {
        let a = self.re.abs_upper();
        let b = self.im.abs_upper();
        let s = add_up(&mul_up(&a, &a), &mul_up(&b, &b));
        Float::with_val_round(RAD_PREC, s.sqrt_ref(), Round::Up).0
    }

    /// Lower bound on `|z|`.
    pub fn abs_lower(&self) -> Float {
        let a = self.re.abs_lower();
        let b = self.im.abs_lower();
        let s = Float::with_val_round(
            RAD_PREC,
            Float::with_val_round(RAD_PREC, &a * &a, Round::Down).0
                + Float::with_val_round(RAD_PREC, &b * &b, Round::Down).0,
            Round::Down,
        )
        .0;
        Float::with_val_round(RAD_PREC, s.sqrt_ref(), Round::Down).0
    }

    /// Largest component radius.
    pub fn max_rad(&self) -> Float {
        let a = self.re.rad().clone();
        let b = self.im.rad().clone();
        if a > b {
            a
        } else {
            b
        }
    }

    pub fn neg(&self) -> Self {
        ComplexBall { re: self.re.neg(), im: self.im.neg() }
    }

    pub fn conj(&self) -> Self {
        ComplexBall { re: self.re.clone(), im: self.im.neg() }
    }

    pub fn add(&self, other: &ComplexBall) -> Self {
        ComplexBall { re: self.re.add(&other.re), im: self.im.add(&other.im) }
    }

    pub fn sub(&self, other: &ComplexBall) -> Self {
        ComplexBall { re: self.re.sub(&other.re), im: self.im.sub(&other.im) }
    }

    pub fn mul(&self, other: &ComplexBall) -> Self {
        let re = self.re.mul(&other.re).sub(&self.im.mul(&other.im));
        let im = self.re.mul(&other.im).add(&self.im.mul(&other.re));
        ComplexBall { re, im }
    }

    pub fn sqr(&self) -> Self {
        let re = self.re.sqr().sub(&self.im.sqr());
        let im = self.re.mul(&self.im).mul_i64(2);
        ComplexBall { re, im }
    }

    pub fn mul_real(&self, k: &Ball) -> Self {
        ComplexBall { re: self.re.mul(k), im: self.im.mul(k) }
    }

    pub fn mul_i64(&self, k: i64) -> Self {
        ComplexBall { re: self.re.mul_i64(k), im: self.im.mul_i64(k) }
    }

    pub fn mul_pow2(&self, k: i32) -> Self {
        ComplexBall { re: self.re.mul_pow2(k), im: self.im.mul_pow2(k) }
    }

    /// Multiplication by `i`.
    pub fn mul_i(&self) -> Self {
        ComplexBall { re: self.im.neg(), im: self.re.clone() }
    }

    pub fn norm_sqr(&self) -> Ball {
        self.re.sqr().add(&self.im.sqr())
    }

    /// Division; `None` when the divisor is not certified nonzero.
    pub fn div(&self, other: &ComplexBall) -> Option<Self> {
        if other.abs_lower().is_zero() {
            return None;
        }
        if other.im.is_exact_zero() {
            return Some(ComplexBall { re: self.re.div(&other.re)?, im: self.im.div(&other.re)? });
        }
        let denom = other.norm_sqr();
        let num = self.mul(&other.conj());
        Some(ComplexBall { re: num.re.div(&denom)?, im: num.im.div(&denom)? })
    }

    pub fn recip(&self) -> Option<Self> {
        ComplexBall::one(self.prec()).div(self)
    }

    pub fn powi(&self, n: u32) -> Self {
        let mut result = ComplexBall::one(self.prec());
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.sqr();
            }
        }
        result
    }

    pub fn exp(&self) -> Self {
        let scale = self.re.exp();
        ComplexBall { re: scale.mul(&self.im.cos()), im: scale.mul(&self.im.sin()) }
    }

    /// `sin(x + iy) = sin x cosh y + i cos x sinh y`.
    pub fn sin(&self) -> Self {
        let re = self.re.sin().mul(&self.im.cosh());
        let im = self.re.cos().mul(&self.im.sinh());
        ComplexBall { re, im }
    }

    /// `cos(x + iy) = cos x cosh y - i sin x sinh y`.
    pub fn cos(&self) -> Self {
        let re = self.re.cos().mul(&self.im.cosh());
        let im = self.re.sin().mul(&self.im.sinh()).neg();
        ComplexBall { re, im }
    }
}

impl fmt::Display for ComplexBall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) + ({})i", self.re, self.im)
    }
}
