//! Sparse multivariate polynomials and rational functions over `Q`.

use std::collections::BTreeMap;
use std::fmt;

use rug::ops::Pow;
use rug::Rational;

use super::ball::ComplexBall;
use super::linalg::{FieldElem, Zeroness};
use super::quad::{parse_rational, rational_string};
use crate::error::{Error, Result};

/// Exponent vector with trailing zeros trimmed.
pub type Monomial = Vec<u32>;

fn trim(mut m: Monomial) -> Monomial {
    while m.last() == Some(&0) {
        m.pop();
    }
    m
}

fn mono_mul(a: &Monomial, b: &Monomial) -> Monomial {
    let n = a.len().max(b.len());
    let out = (0..n).map(|i| a.get(i).copied().unwrap_or(0) + b.get(i).copied().unwrap_or(0)).collect();
    trim(out)
}

fn mono_div(a: &Monomial, b: &Monomial) -> Option<Monomial> {
    if b.len() > a.len() {
        return None;
    }
    let mut out = a.clone();
    for (i, e) in b.iter().enumerate() {
        out[i] = out[i].checked_sub(*e)?;
    }
    Some(trim(out))
}

/// Polynomial as a map from monomials to nonzero coefficients.
///
/// `BTreeMap` ordering on exponent vectors is lexicographic, so the last key
/// is the leading monomial.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, Rational>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn constant(c: Rational) -> Self {
        let mut p = Poly::zero();
        if c != 0 {
            p.terms.insert(Vec::new(), c);
        }
        p
    }

    pub fn one() -> Self {
        Poly::constant(Rational::from(1))
    }

    pub fn var(index: usize) -> Self {
        let mut m = vec![0; index + 1];
        m[index] = 1;
        let mut p = Poly::zero();
        p.terms.insert(m, Rational::from(1));
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::new()),
            1 => self.terms.get(&Vec::new()).cloned(),
            _ => None,
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Number of variables mentioned (highest index + 1).
    pub fn nvars(&self) -> usize {
        self.terms.keys().map(|m| m.len()).max().unwrap_or(0)
    }

    fn leading(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c == 0 {
            return;
        }
        let entry = self.terms.entry(m.clone()).or_default();
        *entry += c;
        if *entry == 0 {
            self.terms.remove(&m);
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Poly {
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), Rational::from(-c))).collect() }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(mono_mul(ma, mb), Rational::from(ca * cb));
            }
        }
        out
    }

    pub fn scale(&self, k: &Rational) -> Poly {
        if *k == 0 {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), Rational::from(c * k))).collect() }
    }

    pub fn pow(&self, n: u32) -> Poly {
        let mut out = Poly::one();
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    /// Partial derivative with respect to variable `index`.
    pub fn derivative(&self, index: usize) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let e = m.get(index).copied().unwrap_or(0);
            if e == 0 {
                continue;
            }
            let mut dm = m.clone();
            dm[index] -= 1;
            out.add_term(trim(dm), Rational::from(c * e));
        }
        out
    }

    /// Exact quotient when `divisor` divides `self`.
    pub fn div_exact(&self, divisor: &Poly) -> Option<Poly> {
        let (lm, lc) = divisor.leading()?;
        let mut rem = self.clone();
        let mut quo = Poly::zero();
        while let Some((rm, rc)) = rem.leading() {
            let m = mono_div(rm, lm)?;
            let c = Rational::from(rc / lc);
            let mut t = Poly::zero();
            t.terms.insert(m, c);
            rem = rem.sub(&t.mul(divisor));
            quo = quo.add(&t);
        }
        Some(quo)
    }

    /// Evaluates at complex enclosures (one per variable).
    pub fn eval(&self, values: &[ComplexBall], prec: u32) -> ComplexBall {
        let mut acc = ComplexBall::zero(prec);
        for (m, c) in &self.terms {
            let mut t = ComplexBall::from_rationals(c, &Rational::new(), prec);
            for (i, e) in m.iter().enumerate() {
                if *e > 0 {
                    t = t.mul(&values[i].powi(*e));
                }
            }
            acc = acc.add(&t);
        }
        acc
    }

    /// Evaluates at exact rationals.
    pub fn eval_rational(&self, values: &[Rational]) -> Rational {
        let mut acc = Rational::new();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, e) in m.iter().enumerate() {
                if *e > 0 {
                    t *= Rational::from((&values[i]).pow(*e as i32));
                }
            }
            acc += t;
        }
        acc
    }

    pub fn render(&self, names: &[String]) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (m, c) in self.terms.iter().rev() {
            let mut factors = Vec::new();
            for (i, e) in m.iter().enumerate() {
                let name = names.get(i).cloned().unwrap_or_else(|| format!("x{i}"));
                match e {
                    0 => {}
                    1 => factors.push(name),
                    _ => factors.push(format!("{name}^{e}")),
                }
            }
            let coeff = rational_string(c);
            let term = if factors.is_empty() {
                coeff
            } else if *c == 1 {
                factors.join("*")
            } else if *c == -1 {
                format!("-{}", factors.join("*"))
            } else {
                format!("{}*{}", coeff, factors.join("*"))
            };
            parts.push(term);
        }
        let mut out = parts[0].clone();
        for p in &parts[1..] {
            if let Some(rest) = p.strip_prefix('-') {
                out.push_str(" - ");
                out.push_str(rest);
            } else {
                out.push_str(" + ");
                out.push_str(p);
            }
        }
        out
    }
}

/// Quotient of polynomials with a normalized denominator.
#[derive(Clone, Debug)]
pub struct RatFunc {
    pub num: Poly,
    pub den: Poly,
}

impl RatFunc {
    pub fn from_poly(p: Poly) -> Self {
        RatFunc { num: p, den: Poly::one() }
    }

    pub fn constant(c: Rational) -> Self {
        RatFunc::from_poly(Poly::constant(c))
    }

    pub fn var(index: usize) -> Self {
        RatFunc::from_poly(Poly::var(index))
    }

    pub fn new(num: Poly, den: Poly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        RatFunc { num, den }.normalized()
    }

    fn normalized(self) -> Self {
        if self.num.is_zero() {
            return RatFunc::from_poly(Poly::zero());
        }
        if let Some(q) = self.num.div_exact(&self.den) {
            return RatFunc::from_poly(q);
        }
        let lc = self.den.leading().map(|(_, c)| c.clone()).expect("nonzero denominator");
        let inv = Rational::from(lc.recip_ref());
        RatFunc { num: self.num.scale(&inv), den: self.den.scale(&inv) }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn as_constant(&self) -> Option<Rational> {
        let n = self.num.as_constant()?;
        let d = self.den.as_constant()?;
        Some(n / d)
    }

    /// True when both sides agree as rational functions.
    pub fn equals(&self, other: &RatFunc) -> bool {
        self.num.mul(&other.den) == other.num.mul(&self.den)
    }

    pub fn render(&self, names: &[String]) -> String {
        if self.den == Poly::one() {
            self.num.render(names)
        } else {
            format!("({})/({})", self.num.render(names), self.den.render(names))
        }
    }

    pub fn eval(&self, values: &[ComplexBall], prec: u32) -> Option<ComplexBall> {
        self.num.eval(values, prec).div(&self.den.eval(values, prec))
    }
}

impl PartialEq for RatFunc {
    fn eq(&self, other: &Self) -> bool {
        self.equals(other)
    }
}

impl FieldElem for RatFunc {
    fn zeroness(&self) -> Zeroness {
        if self.is_zero() {
            Zeroness::Zero
        } else {
            Zeroness::NonZero
        }
    }
    fn add(&self, other: &Self) -> Self {
        if self.den == other.den {
            return RatFunc::new(self.num.add(&other.num), self.den.clone());
        }
        RatFunc::new(self.num.mul(&other.den).add(&other.num.mul(&self.den)), self.den.mul(&other.den))
    }
    fn sub(&self, other: &Self) -> Self {
        FieldElem::add(self, &RatFunc { num: other.num.neg(), den: other.den.clone() })
    }
    fn mul(&self, other: &Self) -> Self {
        RatFunc::new(self.num.mul(&other.num), self.den.mul(&other.den))
    }
    fn div(&self, other: &Self) -> Self {
        RatFunc::new(self.num.mul(&other.den), self.den.mul(&other.num))
    }
    fn zero_like(&self) -> Self {
        RatFunc::from_poly(Poly::zero())
    }
    fn one_like(&self) -> Self {
        RatFunc::from_poly(Poly::one())
    }
    /// Prefers constants, then short expressions, to limit expression swell.
    fn pivot_score(&self) -> f64 {
        -((self.num.num_terms() + self.den.num_terms()) as f64)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render(&[]))
    }
}

/// Parses a polynomial expression; `resolve` maps identifiers to variable indices.
///
/// Grammar: sums and differences of products of powers of numbers,
/// identifiers and parenthesized expressions. Division is allowed only by
/// constants, so `3/4*x` and `x/2` are fine.
pub fn parse_poly(text: &str, resolve: &mut dyn FnMut(&str) -> Result<usize>) -> Result<Poly> {
    let tokens = tokenize(text)?;
    let mut parser = Parser { tokens, pos: 0, resolve, source: text };
    let p = parser.expr()?;
    if parser.pos != parser.tokens.len() {
        return Err(Error::Parse(format!("trailing input in polynomial {text:?}")));
    }
    Ok(p)
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    Op(char),
}

fn tokenize(text: &str) -> Result<Vec<Tok>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            out.push(Tok::Num(chars[start..i].iter().collect()));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                i += 1;
            }
            out.push(Tok::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(Error::Parse(format!("unexpected character {c:?} in polynomial {text:?}")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Tok>,
    pos: usize,
    resolve: &'a mut dyn FnMut(&str) -> Result<usize>,
    source: &'a str,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos)
    }

    fn err(&self, what: &str) -> Error {
        Error::Parse(format!("{what} in polynomial {:?}", self.source))
    }

    fn expr(&mut self) -> Result<Poly> {
        let mut acc = self.term()?;
        while let Some(Tok::Op(op @ ('+' | '-'))) = self.peek().cloned() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = if op == '+' { acc.add(&rhs) } else { acc.sub(&rhs) };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Poly> {
        let mut acc = self.unary()?;
        while let Some(Tok::Op(op @ ('*' | '/'))) = self.peek().cloned() {
            self.pos += 1;
            let rhs = self.unary()?;
            if op == '*' {
                acc = acc.mul(&rhs);
            } else {
                let c = rhs.as_constant().filter(|c| *c != 0).ok_or_else(|| self.err("division by a non-constant"))?;
                acc = acc.scale(&Rational::from(c.recip_ref()));
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Poly> {
        match self.peek() {
            Some(Tok::Op('-')) => {
                self.pos += 1;
                Ok(self.unary()?.neg())
            }
            Some(Tok::Op('+')) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Poly> {
        let base = self.primary()?;
        if let Some(Tok::Op('^')) = self.peek() {
            self.pos += 1;
            match self.peek().cloned() {
                Some(Tok::Num(n)) => {
                    self.pos += 1;
                    let e: u32 = n.parse().map_err(|_| self.err("bad exponent"))?;
                    return Ok(base.pow(e));
                }
                _ => return Err(self.err("exponent must be a nonnegative integer")),
            }
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Poly> {
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(Poly::constant(parse_rational(&n)?))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                let idx = (self.resolve)(&name)?;
                Ok(Poly::var(idx))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(&Tok::Op(')')) {
                    return Err(self.err("missing ')'"));
                }
                self.pos += 1;
                Ok(inner)
            }
            _ => Err(self.err("unexpected end or operator")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names() -> Vec<String> {
        vec!["x".into(), "y".into(), "z".into()]
    }

    fn parse(text: &str) -> Poly {
        let n = names();
        parse_poly(text, &mut |s| n.iter().position(|v| v == s).ok_or_else(|| Error::Parse(s.into()))).unwrap()
    }

    #[test]
    fn parse_and_render() {
        let p = parse("y^2 - x^3");
        assert_eq!(p.render(&names()), "-x^3 + y^2");
        let q = parse("(x+1)*(x-1) - x^2 + 1/2*3");
        assert_eq!(q.as_constant(), Some(Rational::from((1, 2))));
        assert_eq!(parse("x/2").render(&names()), "1/2*x");
    }

    #[test]
    fn derivative_of_cusp() {
        let p = parse("y^2 - x^3");
        let vals = [Rational::from(1), Rational::from(1)];
        assert_eq!(p.derivative(0).eval_rational(&vals), -3);
        assert_eq!(p.derivative(1).eval_rational(&vals), 2);
    }

    #[test]
    fn exact_division() {
        let a = parse("x^2 - y^2");
        let b = parse("x + y");
        assert_eq!(a.div_exact(&b).unwrap(), parse("x - y"));
        assert!(parse("x^2 + y").div_exact(&b).is_none());
    }

    #[test]
    fn ratfunc_field_ops() {
        let x = RatFunc::var(0);
        let y = RatFunc::var(1);
        let q = FieldElem::div(&x, &y);
        let back = FieldElem::mul(&q, &y);
        assert_eq!(back, x);
        assert_eq!(FieldElem::sub(&back, &x).zeroness(), Zeroness::Zero);
    }

    #[test]
    fn rejects_division_by_variable() {
        let n = names();
        let r = parse_poly("1/x", &mut |s| n.iter().position(|v| v == s).ok_or_else(|| Error::Parse(s.into())));
        assert!(r.is_err());
    }
}
