//! Exact arithmetic in quadratic fields `Q(sqrt d)`.

use std::fmt;

use rug::ops::Pow;
use rug::{Integer, Rational};

use super::ball::{Ball, ComplexBall};
use crate::error::{Error, Result};

/// Squarefree kernel of `d` together with the square factor: `d = s^2 * core`.
pub fn squarefree_split(d: i64) -> (i64, i64) {
    if d == 0 {
        return (0, 1);
    }
    let sign = d.signum();
    let mut n = d.unsigned_abs();
    let mut core: u64 = 1;
    let mut square: u64 = 1;
    let mut p = 2u64;
    while p * p <= n {
        let mut k = 0;
        while n.is_multiple_of(p) {
            n /= p;
            k += 1;
        }
        square *= p.pow(k / 2);
        if k % 2 == 1 {
            core *= p;
        }
        p += 1;
    }
    core *= n;
    (sign * core as i64, square as i64)
}

pub fn is_squarefree(d: i64) -> bool {
    d != 0 && squarefree_split(d).1 == 1
}

/// `a + b*sqrt(d)` with rational `a, b` and squarefree `d`.
///
/// Elements with `b = 0` are plain rationals and combine with any `d`.
#[derive(Clone, Debug)]
pub struct QuadNumber {
    pub a: Rational,
    pub b: Rational,
    pub d: i64,
}

impl PartialEq for QuadNumber {
    fn eq(&self, other: &Self) -> bool {
        self.a == other.a && self.b == other.b && (self.b == 0 || self.d == other.d)
    }
}

impl Eq for QuadNumber {}

impl std::hash::Hash for QuadNumber {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.a.hash(state);
        self.b.hash(state);
        if self.b != 0 {
            self.d.hash(state);
        }
    }
}

impl QuadNumber {
    /// Builds `a + b sqrt(d)`, moving square factors of `d` into `b`.
    pub fn new(a: Rational, b: Rational, d: i64) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidInput("quadratic radicand must be nonzero".into()));
        }
        let (core, square) = squarefree_split(d);
        let b = b * Integer::from(square);
        let mut q = QuadNumber { a, b, d: core };
        if core == 1 {
            q.a += std::mem::take(&mut q.b);
        }
        Ok(q)
    }

    pub fn rational(a: Rational) -> Self {
        QuadNumber { a, b: Rational::new(), d: 1 }
    }

    pub fn from_i64(a: i64) -> Self {
        QuadNumber::rational(Rational::from(a))
    }

    pub fn zero() -> Self {
        QuadNumber::from_i64(0)
    }

    pub fn one() -> Self {
        QuadNumber::from_i64(1)
    }

    /// `sqrt(d)` itself.
    pub fn sqrt_of(d: i64) -> Result<Self> {
        QuadNumber::new(Rational::new(), Rational::from(1), d)
    }

    pub fn is_rational(&self) -> bool {
        self.b == 0
    }

    pub fn is_zero(&self) -> bool {
        self.a == 0 && self.b == 0
    }

    /// The field this element lives in, if it is irrational.
    pub fn field(&self) -> Option<i64> {
        if self.is_rational() {
            None
        } else {
            Some(self.d)
        }
    }

    fn common_d(&self, other: &QuadNumber) -> Result<i64> {
        match (self.field(), other.field()) {
            (Some(x), Some(y)) if x != y => Err(Error::InvalidInput(format!(
                "cannot combine elements of Q(sqrt {x}) and Q(sqrt {y})"
            ))),
            (Some(x), _) | (_, Some(x)) => Ok(x),
            (None, None) => Ok(if self.d == other.d { self.d } else { 1 }),
        }
    }

    fn build(a: Rational, b: Rational, d: i64) -> Self {
        QuadNumber { a, b, d }
    }

    /// Moves this element into `Q(sqrt d)` (only changes the tag of rationals).
    pub fn in_field(mut self, d: i64) -> Self {
        if self.is_rational() {
            self.d = d;
        }
        self
    }

    pub fn add(&self, other: &QuadNumber) -> Result<Self> {
        let d = self.common_d(other)?;
        Ok(QuadNumber::build(
            Rational::from(&self.a + &other.a),
            Rational::from(&self.b + &other.b),
            d,
        ))
    }

    pub fn sub(&self, other: &QuadNumber) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        QuadNumber { a: Rational::from(-&self.a), b: Rational::from(-&self.b), d: self.d }
    }

    pub fn mul(&self, other: &QuadNumber) -> Result<Self> {
        let d = self.common_d(other)?;
        let dd = Rational::from(d);
        let a = Rational::from(&self.a * &other.a) + Rational::from(&self.b * &other.b) * dd;
        let b = Rational::from(&self.a * &other.b) + Rational::from(&self.b * &other.a);
        Ok(QuadNumber::build(a, b, d))
    }

    pub fn scale(&self, k: &Rational) -> Self {
        QuadNumber::build(Rational::from(&self.a * k), Rational::from(&self.b * k), self.d)
    }

    /// Galois conjugate `a - b sqrt(d)`; complex conjugation when `d < 0`.
    pub fn conj(&self) -> Self {
        QuadNumber { a: self.a.clone(), b: Rational::from(-&self.b), d: self.d }
    }

    /// Field norm `a^2 - d b^2`.
    pub fn norm(&self) -> Rational {
        Rational::from(&self.a * &self.a) - Rational::from(&self.b * &self.b) * Rational::from(self.d)
    }

    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::InvalidInput("division by zero in quadratic field".into()));
        }
        let n = self.norm();
        let c = self.conj();
        Ok(QuadNumber::build(Rational::from(&c.a / &n), Rational::from(&c.b / &n), self.d))
    }

    pub fn div(&self, other: &QuadNumber) -> Result<Self> {
        self.common_d(other)?;
        self.mul(&other.recip()?)
    }

    /// Real part for `d < 0`.
    pub fn re(&self) -> Rational {
        self.a.clone()
    }

    /// `Im(x) / sqrt(|d|)`, i.e. the exact coefficient of `i sqrt(|d|)` when `d < 0`.
    pub fn im_coeff(&self) -> Rational {
        if self.d < 0 {
            self.b.clone()
        } else {
            Rational::new()
        }
    }

    /// Sign of the imaginary part (exact).
    pub fn im_sign(&self) -> std::cmp::Ordering {
        self.im_coeff().cmp0()
    }

    /// `|x|^2` for `d < 0`, exact.
    pub fn abs_sqr(&self) -> Rational {
        if self.d < 0 {
            self.norm()
        } else {
            Rational::from(&self.a * &self.a)
        }
    }

    /// Enclosure as a complex number (`d < 0` imaginary, `d > 0` real).
    pub fn to_complex_ball(&self, prec: u32) -> ComplexBall {
        let a = Ball::from_rational(&self.a, prec);
        if self.b == 0 {
            return ComplexBall::from_real(a);
        }
        let root = Ball::from_i64(self.d.abs(), prec).sqrt().expect("positive radicand");
        let bpart = Ball::from_rational(&self.b, prec).mul(&root);
        if self.d < 0 {
            ComplexBall::new(a, bpart)
        } else {
            ComplexBall::from_real(a.add(&bpart))
        }
    }

    /// Parses `p+qi:d`, `p:d` style input; see [`parse_quad`].
    pub fn parse(text: &str) -> Result<Self> {
        parse_quad(text)
    }
}

/// Parses `a/b` or an integer into a rational.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let t = text.trim();
    if t.is_empty() {
        return Err(Error::Parse("empty rational".into()));
    }
    if let Ok(r) = t.parse::<Rational>() {
        return Ok(r);
    }
    // decimals like 0.25 are accepted exactly
    if let Some((int, frac)) = t.split_once('.') {
        let neg = int.trim_start().starts_with('-');
        let digits = format!("{}{}", int.trim_start_matches(['-', '+']), frac);
        if !digits.is_empty() && digits.chars().all(|c| c.is_ascii_digit()) {
            let num: Integer = digits.parse().map_err(|_| Error::Parse(format!("bad rational {t:?}")))?;
            let den = Integer::from(10).pow(frac.len() as u32);
            let r = Rational::from((num, den));
            return Ok(if neg { -r } else { r });
        }
    }
    Err(Error::Parse(format!("bad rational {t:?}")))
}

/// Parses `p+qi:d` meaning `p + q sqrt(d)`, or `p:d`, or a bare rational.
///
/// The `i` suffix is decoration only; `q` multiplies `sqrt(d)`.
pub fn parse_quad(text: &str) -> Result<QuadNumber> {
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let (body, d) = match t.rsplit_once(':') {
        Some((body, d)) => {
            let d: i64 = d.parse().map_err(|_| Error::Parse(format!("bad radicand in {text:?}")))?;
            (body.to_string(), d)
        }
        None => (t.clone(), 1),
    };
    let body = body.trim_end_matches('i');
    let has_i = t.split(':').next().is_some_and(|b| b.ends_with('i'));
    if !has_i {
        return QuadNumber::new(parse_rational(body)?, Rational::new(), d);
    }
    // split "p+q" or "p-q" at the last sign that is not leading or after '/'
    let bytes = body.as_bytes();
    let mut split = None;
    for idx in (1..bytes.len()).rev() {
        if (bytes[idx] == b'+' || bytes[idx] == b'-') && bytes[idx - 1] != b'e' && bytes[idx - 1] != b'/' {
            split = Some(idx);
            break;
        }
    }
    let (p, q) = match split {
        Some(idx) => (parse_rational(&body[..idx])?, coeff(&body[idx..])?),
        None => (Rational::new(), coeff(body)?),
    };
    QuadNumber::new(p, q, d)
}

fn coeff(text: &str) -> Result<Rational> {
    match text {
        "" | "+" => Ok(Rational::from(1)),
        "-" => Ok(Rational::from(-1)),
        _ => parse_rational(text.trim_start_matches('+')),
    }
}

pub fn rational_string(r: &Rational) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for QuadNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b == 0 {
            return write!(f, "{}", rational_string(&self.a));
        }
        let sign = if self.b < 0 { "-" } else { "+" };
        let mag = Rational::from(self.b.abs_ref());
        write!(f, "{}{}{}i:{}", rational_string(&self.a), sign, rational_string(&mag), self.d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64, d: i64) -> QuadNumber {
        QuadNumber::new(Rational::from(a), Rational::from(b), d).unwrap()
    }

    #[test]
    fn squarefree_kernel() {
        assert_eq!(squarefree_split(-12), (-3, 2));
        assert_eq!(squarefree_split(-8), (-2, 2));
        assert_eq!(squarefree_split(18), (2, 3));
        assert!(is_squarefree(-1));
        assert!(!is_squarefree(-4));
    }

    #[test]
    fn square_factors_move_into_coefficient() {
        let x = q(0, 1, -4);
        assert_eq!(x, q(0, 2, -1));
    }

    #[test]
    fn field_arithmetic() {
        let i = q(0, 1, -1);
        assert_eq!(i.mul(&i).unwrap(), QuadNumber::from_i64(-1).in_field(-1));
        let x = q(1, 2, -3);
        let y = q(-2, 5, -3);
        let back = x.mul(&y).unwrap().div(&y).unwrap();
        assert_eq!(back, x);
    }

    #[test]
    fn mixing_fields_is_rejected() {
        assert!(q(0, 1, -1).add(&q(0, 1, -2)).is_err());
        assert!(q(0, 1, -1).add(&QuadNumber::from_i64(3)).is_ok());
    }

    #[test]
    fn parsing() {
        assert_eq!(parse_quad("0+1i:-1").unwrap(), q(0, 1, -1));
        assert_eq!(parse_quad("1/2+1/2i:-3").unwrap().to_string(), "1/2+1/2i:-3");
        assert_eq!(parse_quad("-1/4-2i:-2").unwrap().to_string(), "-1/4-2i:-2");
        assert_eq!(parse_quad("3/5").unwrap(), QuadNumber::rational(Rational::from((3, 5))));
        assert_eq!(parse_quad("0.25").unwrap(), QuadNumber::rational(Rational::from((1, 4))));
        assert_eq!(parse_quad("2i:-1").unwrap(), q(0, 2, -1));
    }

    #[test]
    fn enclosure_of_sqrt_minus_two() {
        let z = q(0, 1, -2).to_complex_ball(128);
        let sq = z.sqr();
        assert!(sq.re.contains_rational(&Rational::from(-2)));
        assert!(sq.im.contains_zero());
    }
}
