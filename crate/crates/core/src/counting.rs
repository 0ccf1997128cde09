//! Positive rationals of bounded height near the graph of `h(t) = f⁻¹(g(f(t)))`.
//!
//! Exact membership `h(p) = q` is not decidable numerically, so each pair is
//! classified from a certified enclosure of `h(p) − q`: confirmed within `ε`,
//! excluded, or undetermined.

use std::cmp::Ordering;
use std::fmt;

use num_integer::Integer;
use rug::{Float, Rational};

use crate::arith::ball::{Ball, ComplexBall, RAD_PREC};
use crate::arith::quad::parse_rational;
use crate::error::{Error, Result};
use crate::lattice::{ExactComplex, Lattice};
use crate::wp::{invariants, EllipticModel};

/// `a/b` in lowest terms with `a, b > 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RationalQ {
    pub num: u64,
    pub den: u64,
}

impl RationalQ {
    pub fn new(num: u64, den: u64) -> Result<Self> {
        if num == 0 || den == 0 {
            return Err(Error::InvalidInput("rationals here are positive".into()));
        }
        let g = num.gcd(&den);
        Ok(RationalQ { num: num / g, den: den / g })
    }

    pub fn height(&self) -> u64 {
        self.num.max(self.den)
    }

    pub fn to_rational(self) -> Rational {
        Rational::from((self.num, self.den))
    }
}

impl Ord for RationalQ {
    fn cmp(&self, other: &Self) -> Ordering {
        (u128::from(self.num) * u128::from(other.den)).cmp(&(u128::from(other.num) * u128::from(self.den)))
    }
}

impl PartialOrd for RationalQ {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for RationalQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

/// Open interval `(lower, upper)` of the positive reals; `upper = None` is `∞`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Domain {
    pub lower: Rational,
    pub upper: Option<Rational>,
}

impl Domain {
    pub fn positive() -> Self {
        Domain { lower: Rational::new(), upper: None }
    }

    pub fn new(lower: Rational, upper: Option<Rational>) -> Result<Self> {
        if lower < 0 || upper.as_ref().is_some_and(|u| *u <= lower) {
            return Err(Error::InvalidInput("domain must be a nonempty open interval of positive reals".into()));
        }
        Ok(Domain { lower, upper })
    }

    /// `"(6/5, 23/10)"`, `"(0, inf)"`, or the same without parentheses.
    pub fn parse(text: &str) -> Result<Self> {
        let inner = text.trim().trim_start_matches('(').trim_end_matches(')');
        let (lo, hi) = inner.split_once(',').ok_or_else(|| Error::Parse(format!("domain {text:?} needs two endpoints")))?;
        let lower = parse_rational(lo.trim())?;
        let hi = hi.trim();
        let upper = if hi == "inf" || hi == "∞" { None } else { Some(parse_rational(hi)?) };
        Domain::new(lower, upper)
    }

    pub fn contains(&self, q: &RationalQ) -> bool {
        let r = q.to_rational();
        r > self.lower && self.upper.as_ref().is_none_or(|u| r < *u)
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.upper {
            Some(u) => write!(f, "({}, {})", self.lower, u),
            None => write!(f, "({}, inf)", self.lower),
        }
    }
}

/// Positive rationals of height at most `h` inside `domain`, increasing.
pub fn enumerate_rationals(h: u64, domain: &Domain) -> Vec<RationalQ> {
    let mut out = Vec::new();
    for den in 1..=h {
        for num in 1..=h {
            if num.gcd(&den) == 1 {
                let q = RationalQ { num, den };
                if domain.contains(&q) {
                    out.push(q);
                }
            }
        }
    }
    out.sort();
    out
}

/// The outer change of variable `f` (with its inverse applied last).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outer {
    Identity,
    Log,
}

/// The middle function `g`.
#[derive(Clone, Debug, PartialEq)]
pub enum Inner {
    Identity,
    /// ℘ of the lattice `ℤ + ℤτ`, `τ` purely imaginary.
    Wp(ExactComplex),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Descriptor {
    Identity,
    /// `exp(℘(log t))`.
    ExpWpLog(ExactComplex),
    Composite { f: Outer, g: Inner },
}

impl Descriptor {
    fn parts(&self) -> (Outer, Inner) {
        match self {
            Descriptor::Identity => (Outer::Identity, Inner::Identity),
            Descriptor::ExpWpLog(tau) => (Outer::Log, Inner::Wp(tau.clone())),
            Descriptor::Composite { f, g } => (*f, g.clone()),
        }
    }

    pub fn name(&self) -> String {
        match self {
            Descriptor::Identity => "identity".into(),
            Descriptor::ExpWpLog(tau) => format!("exp_wp_log(tau={tau})"),
            Descriptor::Composite { f, g } => format!("composite(f={f:?}, g={g:?})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TargetFunction {
    pub descriptor: Descriptor,
    pub domain: Domain,
}

impl TargetFunction {
    pub fn identity() -> Self {
        TargetFunction { descriptor: Descriptor::Identity, domain: Domain::positive() }
    }

    pub fn exp_wp_log(tau: ExactComplex, domain: Domain) -> Self {
        TargetFunction { descriptor: Descriptor::ExpWpLog(tau), domain }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Class {
    ConfirmedEps,
    Excluded,
    Undetermined,
}

impl Class {
    pub fn name(self) -> &'static str {
        match self {
            Class::ConfirmedEps => "confirmed",
            Class::Excluded => "excluded",
            Class::Undetermined => "undetermined",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PointVerdict {
    pub p: RationalQ,
    pub q: RationalQ,
    pub class: Class,
    /// Enclosure of `h(p) − q`; absent when evaluation failed.
    pub interval: Option<Ball>,
    pub note: Option<String>,
}

/// `2^(-precision/2)`.
pub fn default_eps(precision: u32) -> Float {
    Float::with_val(RAD_PREC, 1) >> (precision / 2)
}

/// Evaluates `h` on rationals at a fixed precision, reusing the ℘ model.
pub struct Evaluator {
    pub target: TargetFunction,
    pub precision: u32,
    outer: Outer,
    model: Option<EllipticModel>,
}

fn log_ball(r: &Rational, prec: u32) -> Result<Ball> {
    Ball::from_rational(r, prec).ln().ok_or_else(|| Error::PrecisionExhausted("log of a non-positive enclosure".into()))
}

impl Evaluator {
    /// Checks that the lattice is rectangular and that `f(domain)` stays
    /// strictly between two consecutive real poles.
    pub fn new(target: &TargetFunction, precision: u32) -> Result<Self> {
        let (outer, inner) = target.descriptor.parts();
        let model = match inner {
            Inner::Identity => None,
            Inner::Wp(tau) => {
                let imaginary = match &tau {
                    ExactComplex::Quad(q) => q.re() == 0,
                    ExactComplex::Numeric(b) => b.re.is_exact_zero(),
                };
                if !imaginary {
                    return Err(Error::InvalidInput(format!("tau = {tau} is not purely imaginary")));
                }
                let upper = target
                    .domain
                    .upper
                    .as_ref()
                    .ok_or_else(|| Error::InvalidInput("a ℘ target needs a bounded domain".into()))?;
                let lower = &target.domain.lower;
                let (lo, hi) = match outer {
                    Outer::Identity => (Ball::from_rational(lower, precision), Ball::from_rational(upper, precision)),
                    Outer::Log => {
                        if *lower <= 0 {
                            return Err(Error::InvalidInput("log needs a domain bounded away from 0".into()));
                        }
                        (log_ball(lower, precision)?, log_ball(upper, precision)?)
                    }
                };
                let k = lo.lower().floor();
                let same_cell = lo.lower() > k && hi.upper() < Float::with_val(RAD_PREC, &k + 1u32);
                if !same_cell {
                    return Err(Error::InvalidInput(format!("domain {} meets a pole of ℘", target.domain)));
                }
                Some(invariants(&Lattice::from_tau(tau)?, precision)?)
            }
        };
        Ok(Evaluator { target: target.clone(), precision, outer, model })
    }

    /// Certified enclosure of `h(p)`.
    pub fn value(&self, p: &RationalQ) -> Result<Ball> {
        let prec = self.precision + 32;
        let r = p.to_rational();
        let x = match self.outer {
            Outer::Identity => Ball::from_rational(&r, prec),
            Outer::Log => log_ball(&r, prec)?,
        };
        let y = match &self.model {
            None => x,
            Some(m) => {
                let w = m.wp(&ComplexBall::new(x, Ball::zero(prec)))?;
                // ℘ is real on the real axis of a rectangular lattice
                w.re
            }
        };
        Ok(match self.outer {
            Outer::Identity => y,
            Outer::Log => y.exp(),
        })
    }
}

fn classify(value: &Result<Ball>, p: RationalQ, q: RationalQ, eps: &Float) -> PointVerdict {
    let v = match value {
        Ok(v) => v,
        Err(e) => return PointVerdict { p, q, class: Class::Undetermined, interval: None, note: Some(e.to_string()) },
    };
    let diff = v.sub(&Ball::from_rational(&q.to_rational(), v.prec()));
    let class = if diff.abs_upper() < *eps {
        Class::ConfirmedEps
    } else if diff.excludes_zero() && diff.abs_lower() >= *eps {
        Class::Excluded
    } else {
        Class::Undetermined
    };
    PointVerdict { p, q, class, interval: Some(diff), note: None }
}

pub fn classify_point(h: &TargetFunction, p: RationalQ, q: RationalQ, eps: &Float, precision: u32) -> Result<PointVerdict> {
    if !h.domain.contains(&p) {
        return Err(Error::InvalidInput(format!("{p} is outside the domain {}", h.domain)));
    }
    let ev = Evaluator::new(h, precision)?;
    Ok(classify(&ev.value(&p), p, q, eps))
}

/// Every pair `(p, q)` of height at most `max_height` with `p` in the domain,
/// ordered by `p` then `q`.
pub fn all_verdicts(h: &TargetFunction, max_height: u64, eps: &Float, precision: u32) -> Result<Vec<PointVerdict>> {
    let ev = Evaluator::new(h, precision)?;
    let ps = enumerate_rationals(max_height, &h.domain);
    let qs = enumerate_rationals(max_height, &Domain::positive());
    let mut out = Vec::with_capacity(ps.len() * qs.len());
    for p in ps {
        let value = ev.value(&p);
        for &q in &qs {
            out.push(classify(&value, p, q, eps));
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CountRow {
    pub height: u64,
    pub confirmed: u64,
    pub undetermined: u64,
    pub excluded: u64,
}

/// Least squares `log N = log c + k log log H`.
#[derive(Clone, Debug, PartialEq)]
pub struct Fit {
    pub c: f64,
    pub k: f64,
    pub residuals: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CountReport {
    pub target: String,
    pub domain: String,
    pub precision: u32,
    pub eps: Float,
    pub rows: Vec<CountRow>,
    pub fit: Option<Fit>,
}

/// Counts confirmed pairs for each `H` in the schedule. Each stage only
/// classifies the pairs whose height lies in `(H_prev, H]`.
pub fn count_report(h: &TargetFunction, schedule: &[u64], eps: &Float, precision: u32) -> Result<CountReport> {
    if schedule.is_empty() || schedule[0] == 0 || schedule.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidInput("height schedule must be increasing and positive".into()));
    }
    let ev = Evaluator::new(h, precision)?;
    let mut ps: Vec<(RationalQ, Result<Ball>)> = Vec::new();
    let mut qs: Vec<RationalQ> = Vec::new();
    let mut totals = [0u64; 3];
    let slot = |v: PointVerdict| match v.class {
        Class::ConfirmedEps => 0,
        Class::Undetermined => 1,
        Class::Excluded => 2,
    };
    let mut rows = Vec::new();
    let mut prev = 0u64;
    for &height in schedule {
        let fresh = |q: &RationalQ| q.height() > prev && q.height() <= height;
        let new_qs: Vec<RationalQ> = enumerate_rationals(height, &Domain::positive()).into_iter().filter(fresh).collect();
        let new_ps: Vec<RationalQ> = enumerate_rationals(height, &h.domain).into_iter().filter(fresh).collect();
        for (p, value) in &ps {
            for &q in &new_qs {
                totals[slot(classify(value, *p, q, eps))] += 1;
            }
        }
        qs.extend(new_qs);
        for p in new_ps {
            let value = ev.value(&p);
            for &q in &qs {
                totals[slot(classify(&value, p, q, eps))] += 1;
            }
            ps.push((p, value));
        }
        rows.push(CountRow { height, confirmed: totals[0], undetermined: totals[1], excluded: totals[2] });
        prev = height;
    }
    let fit = fit_log_log(&rows);
    Ok(CountReport {
        target: h.descriptor.name(),
        domain: h.domain.to_string(),
        precision,
        eps: eps.clone(),
        rows,
        fit,
    })
}

fn fit_log_log(rows: &[CountRow]) -> Option<Fit> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.confirmed > 0 && r.height >= 2)
        .map(|r| ((r.height as f64).ln().ln(), (r.confirmed as f64).ln()))
        .collect();
    if pts.len() < 3 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    let k = sxy / sxx;
    let log_c = my - k * mx;
    let residuals = pts.iter().map(|p| p.1 - (log_c + k * p.0)).collect();
    Some(Fit { c: log_c.exp(), k, residuals })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: u64, b: u64) -> RationalQ {
        RationalQ::new(a, b).unwrap()
    }

    #[test]
    fn small_heights() {
        assert_eq!(enumerate_rationals(1, &Domain::positive()), vec![q(1, 1)]);
        assert_eq!(enumerate_rationals(2, &Domain::positive()), vec![q(1, 2), q(1, 1), q(2, 1)]);
        assert_eq!(enumerate_rationals(10, &Domain::positive()).len(), 63);
    }

    #[test]
    fn identity_points() {
        let h = TargetFunction::identity();
        let eps = default_eps(128);
        assert_eq!(classify_point(&h, q(3, 2), q(3, 2), &eps, 128).unwrap().class, Class::ConfirmedEps);
        assert_eq!(classify_point(&h, q(1, 1), q(2, 1), &eps, 128).unwrap().class, Class::Excluded);
        let r = count_report(&h, &[2, 10], &eps, 128).unwrap();
        assert_eq!(r.rows.iter().map(|r| r.confirmed).collect::<Vec<_>>(), vec![3, 63]);
        assert!(r.fit.is_none());
    }

    #[test]
    fn wp_target_is_stable() {
        let h = TargetFunction::exp_wp_log(ExactComplex::parse("0+2i:-1", 128).unwrap(), Domain::parse("(6/5, 23/10)").unwrap());
        let eps = default_eps(128);
        let a = classify_point(&h, q(3, 2), q(7, 1), &eps, 128).unwrap();
        let b = classify_point(&h, q(3, 2), q(7, 1), &eps, 256).unwrap();
        assert_eq!(a.class, b.class);
        assert_eq!(a.class, Class::Excluded);
        let bad = TargetFunction::exp_wp_log(ExactComplex::parse("0+2i:-1", 128).unwrap(), Domain::parse("(1/2, 2)").unwrap());
        assert!(Evaluator::new(&bad, 128).is_err());
    }
}
