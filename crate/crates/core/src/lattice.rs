//! Period lattices: normalization, reduction, CM detection, isogeny and ISR verdicts.
//!
//! Matrices `[[a, b], [c, e]]` act on `τ` by `τ ↦ (aτ + b)/(cτ + e)` and on a
//! period pair by `(ω₂, ω₁) ↦ (aω₂ + bω₁, cω₂ + eω₁)`, so that the two
//! actions agree on `τ = ω₂/ω₁`.

use std::fmt;

use num_integer::Integer as _;
use rug::{Float, Integer, Rational};

use crate::arith::ball::{Ball, ComplexBall};
use crate::arith::quad::{parse_quad, parse_rational, QuadNumber};
use crate::error::{Error, Result};

pub type IntMatrix = [[i64; 2]; 2];

pub const IDENTITY: IntMatrix = [[1, 0], [0, 1]];

pub fn mat_mul(x: &IntMatrix, y: &IntMatrix) -> IntMatrix {
    let mut out = [[0i64; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = x[i][0] * y[0][j] + x[i][1] * y[1][j];
        }
    }
    out
}

pub fn det(m: &IntMatrix) -> i64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

/// Adjugate; equal to the inverse up to the factor `det`, which acts trivially on `τ`.
pub fn adjugate(m: &IntMatrix) -> IntMatrix {
    [[m[1][1], -m[0][1]], [-m[1][0], m[0][0]]]
}

/// A complex number that is either exact in an imaginary quadratic field or an enclosure.
#[derive(Clone, Debug, PartialEq)]
pub enum ExactComplex {
    /// `a + b sqrt(d)` with `d < 0` squarefree, or a rational (`b = 0`).
    Quad(QuadNumber),
    Numeric(ComplexBall),
}

impl ExactComplex {
    pub fn quad(q: QuadNumber) -> Result<Self> {
        if !q.is_rational() && q.d > 0 {
            return Err(Error::InvalidInput(format!("{q} is real irrational; exact periods need d < 0")));
        }
        Ok(ExactComplex::Quad(q))
    }

    pub fn rational(r: Rational) -> Self {
        ExactComplex::Quad(QuadNumber::rational(r))
    }

    pub fn from_i64(n: i64) -> Self {
        ExactComplex::rational(Rational::from(n))
    }

    /// `i` as an exact element of `Q(sqrt -1)`.
    pub fn i() -> Self {
        ExactComplex::Quad(QuadNumber::sqrt_of(-1).expect("nonzero radicand"))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, ExactComplex::Quad(_))
    }

    pub fn as_quad(&self) -> Option<&QuadNumber> {
        match self {
            ExactComplex::Quad(q) => Some(q),
            ExactComplex::Numeric(_) => None,
        }
    }

    /// Enclosure at `prec` bits (numeric values keep their own precision if higher).
    pub fn to_ball(&self, prec: u32) -> ComplexBall {
        match self {
            ExactComplex::Quad(q) => q.to_complex_ball(prec),
            ExactComplex::Numeric(b) => b.with_prec(prec.max(b.prec())),
        }
    }

    /// Working precision of a numeric value; `None` for exact values.
    pub fn precision(&self) -> Option<u32> {
        match self {
            ExactComplex::Quad(_) => None,
            ExactComplex::Numeric(b) => Some(b.prec()),
        }
    }

    pub fn conj(&self) -> Self {
        match self {
            ExactComplex::Quad(q) => ExactComplex::Quad(q.conj()),
            ExactComplex::Numeric(b) => ExactComplex::Numeric(b.conj()),
        }
    }

    pub fn neg(&self) -> Self {
        match self {
            ExactComplex::Quad(q) => ExactComplex::Quad(q.neg()),
            ExactComplex::Numeric(b) => ExactComplex::Numeric(b.neg()),
        }
    }

    pub fn to_numeric(&self, prec: u32) -> Self {
        ExactComplex::Numeric(self.to_ball(prec))
    }

    /// Parses `p+qi:d` (exact), `i` (exact), or a decimal such as `0.3+1.7i` (numeric).
    pub fn parse(text: &str, prec: u32) -> Result<Self> {
        let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if t == "i" {
            return Ok(ExactComplex::i());
        }
        if t.contains(':') {
            return ExactComplex::quad(parse_quad(&t)?);
        }
        let (re, im) = split_complex(&t)?;
        let parse = |s: &str| {
            Ball::parse_decimal(s, prec).ok_or_else(|| Error::Parse(format!("bad decimal {s:?} in {text:?}")))
        };
        let re = if re.is_empty() { Ball::zero(prec) } else { parse(re)? };
        let im = match im {
            None => Ball::zero(prec),
            Some("" | "+") => Ball::one(prec),
            Some("-") => Ball::one(prec).neg(),
            Some(s) => parse(s.trim_start_matches('+'))?,
        };
        Ok(ExactComplex::Numeric(ComplexBall::new(re, im)))
    }
}

/// Like [`ExactComplex::parse`], but also reads bare rationals and `p+qi`
/// with rational parts (as Gaussian numbers) exactly.
pub fn parse_value(text: &str, prec: u32) -> Result<ExactComplex> {
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if let Ok(r) = parse_rational(&t) {
        return Ok(ExactComplex::rational(r));
    }
    match ExactComplex::parse(&t, prec) {
        Ok(v) => Ok(v),
        Err(e) if t.ends_with('i') => parse_quad(&format!("{t}:-1")).and_then(ExactComplex::quad).map_err(|_| e),
        Err(e) => Err(e),
    }
}

/// Splits `x+yi` into `("x", Some("+y"))`; the imaginary part keeps its sign.
fn split_complex(t: &str) -> Result<(&str, Option<&str>)> {
    let Some(body) = t.strip_suffix('i') else {
        return Ok((t, None));
    };
    let bytes = body.as_bytes();
    for idx in (1..bytes.len()).rev() {
        if (bytes[idx] == b'+' || bytes[idx] == b'-') && !matches!(bytes[idx - 1], b'e' | b'E') {
            return Ok((&body[..idx], Some(&body[idx..])));
        }
    }
    Ok(("", Some(body)))
}

impl fmt::Display for ExactComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExactComplex::Quad(q) => write!(f, "{q}"),
            ExactComplex::Numeric(b) => {
                let im = b.im.mid_string(25);
                let sep = if im.starts_with('-') { "" } else { "+" };
                write!(f, "{}{}{}i (+/- {})", b.re.mid_string(25), sep, im, crate::arith::ball::float_to_string(&b.max_rad(), Some(4), rug::float::Round::Up))
            }
        }
    }
}

/// Period lattice `Zω₁ + Zω₂` with `Im(ω₂/ω₁) > 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct Lattice {
    pub omega1: ExactComplex,
    pub omega2: ExactComplex,
    pub tau: ExactComplex,
    /// Maps the input pair to the stored pair.
    pub basis_change: IntMatrix,
}

impl Lattice {
    pub fn is_exact(&self) -> bool {
        self.tau.is_exact()
    }

    /// Lattice `Z + Zτ`.
    pub fn from_tau(tau: ExactComplex) -> Result<Self> {
        make_lattice(ExactComplex::from_i64(1), tau)
    }

    pub fn tau_ball(&self, prec: u32) -> ComplexBall {
        self.tau.to_ball(prec)
    }

    pub fn omega1_ball(&self, prec: u32) -> ComplexBall {
        self.omega1.to_ball(prec)
    }

    pub fn omega2_ball(&self, prec: u32) -> ComplexBall {
        self.omega2.to_ball(prec)
    }

    /// The same lattice with numeric periods.
    pub fn to_numeric(&self, prec: u32) -> Lattice {
        Lattice {
            omega1: self.omega1.to_numeric(prec),
            omega2: self.omega2.to_numeric(prec),
            tau: self.tau.to_numeric(prec),
            basis_change: self.basis_change,
        }
    }

    /// Precision carried by numeric periods, if any.
    pub fn precision(&self) -> Option<u32> {
        self.tau.precision()
    }
}

/// Builds a lattice from two periods, flipping `ω₂` if needed so that `Im τ > 0`.
pub fn make_lattice(w1: ExactComplex, w2: ExactComplex) -> Result<Lattice> {
    match (&w1, &w2) {
        (ExactComplex::Quad(a), ExactComplex::Quad(b)) => {
            if a.is_zero() {
                return Err(Error::DegenerateLattice("omega1 is zero".into()));
            }
            let tau = b.div(a)?;
            match tau.im_sign() {
                std::cmp::Ordering::Equal => Err(Error::DegenerateLattice(format!("ratio {tau} is real"))),
                std::cmp::Ordering::Greater => {
                    Ok(Lattice { omega1: w1, omega2: w2, tau: ExactComplex::Quad(tau), basis_change: IDENTITY })
                }
                std::cmp::Ordering::Less => Ok(Lattice {
                    omega1: w1,
                    omega2: w2.neg(),
                    tau: ExactComplex::Quad(tau.neg()),
                    basis_change: [[-1, 0], [0, 1]],
                }),
            }
        }
        _ => {
            let prec = w1.precision().or(w2.precision()).unwrap_or(128);
            let a = w1.to_ball(prec);
            let b = w2.to_ball(prec);
            let tau = b
                .div(&a)
                .ok_or_else(|| Error::DegenerateLattice("omega1 not certified nonzero".into()))?;
            if tau.im.is_positive() {
                Ok(Lattice {
                    omega1: ExactComplex::Numeric(a),
                    omega2: ExactComplex::Numeric(b),
                    tau: ExactComplex::Numeric(tau),
                    basis_change: IDENTITY,
                })
            } else if tau.im.is_negative() {
                Ok(Lattice {
                    omega1: ExactComplex::Numeric(a),
                    omega2: ExactComplex::Numeric(b.neg()),
                    tau: ExactComplex::Numeric(tau.neg()),
                    basis_change: [[-1, 0], [0, 1]],
                })
            } else {
                Err(Error::DegenerateLattice("Im(omega2/omega1) not certified nonzero".into()))
            }
        }
    }
}

/// `(aτ + b)/(cτ + e)` exactly.
pub fn mobius_quad(m: &IntMatrix, tau: &QuadNumber) -> Result<QuadNumber> {
    let num = tau.scale(&Rational::from(m[0][0])).add(&QuadNumber::from_i64(m[0][1]))?;
    let den = tau.scale(&Rational::from(m[1][0])).add(&QuadNumber::from_i64(m[1][1]))?;
    num.div(&den)
}

/// `(aτ + b)/(cτ + e)` on enclosures; `None` if the denominator may vanish.
pub fn mobius_ball(m: &IntMatrix, tau: &ComplexBall) -> Option<ComplexBall> {
    let prec = tau.prec();
    let num = tau.mul_i64(m[0][0]).add(&ComplexBall::from_i64(m[0][1], prec));
    let den = tau.mul_i64(m[1][0]).add(&ComplexBall::from_i64(m[1][1], prec));
    num.div(&den)
}

pub fn mobius(m: &IntMatrix, tau: &ExactComplex) -> Result<ExactComplex> {
    match tau {
        ExactComplex::Quad(q) => Ok(ExactComplex::Quad(mobius_quad(m, q)?)),
        ExactComplex::Numeric(b) => mobius_ball(m, b)
            .map(ExactComplex::Numeric)
            .ok_or_else(|| Error::PrecisionExhausted("denominator of fractional-linear map not certified nonzero".into())),
    }
}

fn ceil_rational(r: &Rational) -> i64 {
    let (_, c) = r.clone().fract_ceil(Integer::new());
    c.to_i64().expect("translation fits in i64")
}

const MAX_REDUCTION_STEPS: usize = 10_000;

/// Reduces `τ` into the standard fundamental domain.
///
/// The result has `Re τ ∈ (-1/2, 1/2]`, `|τ| ≥ 1`, and on the unit circle `Re τ ≥ 0`.
pub fn reduce_tau(l: &Lattice) -> Result<(ExactComplex, IntMatrix)> {
    match &l.tau {
        ExactComplex::Quad(q) => {
            let (t, m) = reduce_quad(q)?;
            Ok((ExactComplex::Quad(t), m))
        }
        ExactComplex::Numeric(b) => {
            let (t, m) = reduce_ball(b)?;
            Ok((ExactComplex::Numeric(t), m))
        }
    }
}

fn reduce_quad(tau: &QuadNumber) -> Result<(QuadNumber, IntMatrix)> {
    let half = Rational::from((1, 2));
    let mut t = tau.clone();
    let mut m = IDENTITY;
    for _ in 0..MAX_REDUCTION_STEPS {
        let n = ceil_rational(&(t.re() - &half));
        if n != 0 {
            let step = [[1, -n], [0, 1]];
            t = mobius_quad(&step, &t)?;
            m = mat_mul(&step, &m);
        }
        let r2 = t.abs_sqr();
        if r2 < 1 || (r2 == 1 && t.re() < 0) {
            let step = [[0, -1], [1, 0]];
            t = mobius_quad(&step, &t)?;
            m = mat_mul(&step, &m);
            continue;
        }
        return Ok((t, m));
    }
    Err(Error::PrecisionExhausted("reduction did not terminate".into()))
}

fn reduce_ball(tau: &ComplexBall) -> Result<(ComplexBall, IntMatrix)> {
    let prec = tau.prec();
    let half = Ball::from_rational(&Rational::from((1, 2)), prec);
    let one = Ball::one(prec);
    let exhausted = || Error::PrecisionExhausted("tau enclosure straddles the fundamental domain boundary".into());
    let mut t = tau.clone();
    let mut m = IDENTITY;
    for _ in 0..MAX_REDUCTION_STEPS {
        let n = t.re.sub(&half).mid().to_f64().ceil() as i64;
        if n != 0 {
            let step = [[1, -n], [0, 1]];
            t = mobius_ball(&step, &t).ok_or_else(exhausted)?;
            m = mat_mul(&step, &m);
        }
        // Re τ must be certified inside (-1/2, 1/2], with exact hits allowed on the right edge.
        let right = t.re.sub(&half);
        let left = t.re.add(&half);
        if !(right.is_negative() || right.is_exact_zero()) || !left.is_positive() {
            return Err(exhausted());
        }
        let s = t.norm_sqr().sub(&one);
        let on_circle = s.is_exact_zero();
        if s.is_negative() || (on_circle && t.re.is_negative()) {
            let step = [[0, -1], [1, 0]];
            t = mobius_ball(&step, &t).ok_or_else(exhausted)?;
            m = mat_mul(&step, &m);
            continue;
        }
        if s.is_positive() || (on_circle && !t.re.is_negative()) {
            return Ok((t, m));
        }
        return Err(exhausted());
    }
    Err(Error::PrecisionExhausted("reduction did not terminate".into()))
}

/// Reduction driven by midpoints only. Any unimodular map is valid for series
/// evaluation, so this never fails on boundary straddles.
pub fn reduce_loose(tau: &ComplexBall) -> Result<(ComplexBall, IntMatrix)> {
    let prec = tau.prec();
    let mut x = tau.re.mid().clone();
    let mut y = tau.im.mid().clone();
    let mut m = IDENTITY;
    for _ in 0..MAX_REDUCTION_STEPS {
        let n = Float::with_val(prec, &x - 0.5).ceil().to_f64() as i64;
        if n != 0 {
            x -= n;
            m = mat_mul(&[[1, -n], [0, 1]], &m);
        }
        let r2 = Float::with_val(prec, &x * &x) + Float::with_val(prec, &y * &y);
        // a small slack avoids cycling on the unit circle
        if r2 < 0.999_999 {
            x = Float::with_val(prec, &x / &r2);
            x = -x;
            y = Float::with_val(prec, &y / &r2);
            m = mat_mul(&[[0, -1], [1, 0]], &m);
            continue;
        }
        let t = mobius_ball(&m, tau)
            .ok_or_else(|| Error::PrecisionExhausted("tau enclosure too wide to reduce".into()))?;
        return Ok((t, m));
    }
    Err(Error::PrecisionExhausted("reduction did not terminate".into()))
}

/// Default height bound for numeric CM searches.
pub const DEFAULT_CM_BOUND: u32 = 100;

/// Imaginary quadratic field of complex multiplication, as its squarefree `d`.
///
/// Exact lattices carry `d` directly. Numeric lattices are searched for a
/// primitive relation `aτ² + bτ + c = 0` with `|a|, |b|, |c| ≤ bound`.
pub fn cm_field(l: &Lattice, bound: u32) -> Result<Option<i64>> {
    match &l.tau {
        ExactComplex::Quad(q) => Ok(q.field()),
        ExactComplex::Numeric(t) => cm_field_numeric(t, bound),
    }
}

fn cm_field_numeric(tau: &ComplexBall, bound: u32) -> Result<Option<i64>> {
    let b_max = bound as i64;
    let tau2 = tau.sqr();
    let mut found: Vec<(i64, i64, i64)> = Vec::new();
    for a in 1..=b_max {
        let at2 = tau2.mul_i64(a);
        for b in -b_max..=b_max {
            let v = at2.add(&tau.mul_i64(b));
            if !v.im.contains_zero() {
                continue;
            }
            // c = -Re(v) must be an integer inside the enclosure
            let lo = v.re.neg().lower().ceil().to_f64();
            let hi = v.re.neg().upper().floor().to_f64();
            if !(lo.is_finite() && hi.is_finite()) {
                return Err(Error::UnknownUpToBound { bound });
            }
            let lo = (lo as i64).max(-b_max);
            let hi = (hi as i64).min(b_max);
            for c in lo..=hi {
                if a.gcd(&b).gcd(&c) == 1 {
                    found.push((a, b, c));
                }
            }
        }
    }
    match found.as_slice() {
        [] => Ok(None),
        [(a, b, c)] => {
            let disc = b * b - 4 * a * c;
            if disc >= 0 {
                return Ok(None);
            }
            Ok(Some(crate::arith::quad::squarefree_split(disc).0))
        }
        _ => Err(Error::UnknownUpToBound { bound }),
    }
}

/// The lattice of complex-conjugated periods, renormalized so `Im τ > 0`.
pub fn conjugate(l: &Lattice) -> Lattice {
    let omega1 = l.omega1.conj();
    let omega2 = l.omega2.conj().neg();
    let tau = l.tau.conj().neg();
    Lattice { omega1, omega2, tau, basis_change: IDENTITY }
}

/// Outcome of an isogeny test.
#[derive(Clone, Debug, PartialEq)]
pub enum IsogenyOutcome {
    /// `witness` maps `τ₁` to `τ₂` by fractional-linear action and `Λ₁ ⊆ αΛ₂`.
    Isogenous { witness: IntMatrix, alpha: ExactComplex },
    NotIsogenous { reason: String },
    UnknownUpToBound { bound: u32 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct IsogenyVerdict {
    pub outcome: IsogenyOutcome,
    /// Mixed exact/numeric inputs were compared numerically.
    pub downgraded: bool,
}

impl IsogenyVerdict {
    pub fn is_isogenous(&self) -> bool {
        matches!(self.outcome, IsogenyOutcome::Isogenous { .. })
    }

    pub fn witness(&self) -> Option<IntMatrix> {
        match &self.outcome {
            IsogenyOutcome::Isogenous { witness, .. } => Some(*witness),
            _ => None,
        }
    }
}

/// `α = ω₁⁽¹⁾ (cτ₁ + e) / (det M · ω₁⁽²⁾)`, which satisfies `Λ₁ ⊆ αΛ₂`.
pub fn isogeny_alpha(l1: &Lattice, l2: &Lattice, m: &IntMatrix, prec: u32) -> Result<ExactComplex> {
    let dm = det(m);
    if dm == 0 {
        return Err(Error::InvalidInput("witness matrix is singular".into()));
    }
    if let (Some(t1), Some(w1), Some(w2)) = (l1.tau.as_quad(), l1.omega1.as_quad(), l2.omega1.as_quad()) {
        let f = t1.scale(&Rational::from(m[1][0])).add(&QuadNumber::from_i64(m[1][1]))?;
        let num = w1.mul(&f)?;
        let den = w2.scale(&Rational::from(dm));
        if let Ok(alpha) = num.div(&den) {
            return Ok(ExactComplex::Quad(alpha));
        }
    }
    let t1 = l1.tau_ball(prec);
    let f = t1.mul_i64(m[1][0]).add(&ComplexBall::from_i64(m[1][1], prec));
    let num = l1.omega1_ball(prec).mul(&f);
    let den = l2.omega1_ball(prec).mul_i64(dm);
    num.div(&den)
        .map(ExactComplex::Numeric)
        .ok_or_else(|| Error::PrecisionExhausted("alpha denominator not certified nonzero".into()))
}

fn clear_denominators(r: &Rational, s: &Rational) -> Result<IntMatrix> {
    let l = Integer::from(r.denom().lcm_ref(s.denom()));
    let to_i64 = |x: Integer| x.to_i64().ok_or_else(|| Error::InvalidInput("witness entries overflow i64".into()));
    let a = to_i64(Integer::from(r.numer() * &l) / r.denom())?;
    let b = to_i64(Integer::from(s.numer() * &l) / s.denom())?;
    let e = to_i64(l)?;
    Ok([[a, b], [0, e]])
}

/// Default precision for numeric comparisons when neither lattice carries one.
pub const DEFAULT_PRECISION: u32 = 128;

/// Decides whether `Λ₁ ⊆ αΛ₂` for some `α ≠ 0`.
pub fn is_isogenous(l1: &Lattice, l2: &Lattice, search_bound: u32) -> Result<IsogenyVerdict> {
    if let (ExactComplex::Quad(t1), ExactComplex::Quad(t2)) = (&l1.tau, &l2.tau) {
        return exact_isogeny(l1, l2, t1, t2).map(|outcome| IsogenyVerdict { outcome, downgraded: false });
    }
    let downgraded = l1.is_exact() != l2.is_exact();
    let prec = l1.precision().into_iter().chain(l2.precision()).min().unwrap_or(DEFAULT_PRECISION);
    let outcome = numeric_isogeny(l1, l2, search_bound, prec)?;
    Ok(IsogenyVerdict { outcome, downgraded })
}

fn exact_isogeny(l1: &Lattice, l2: &Lattice, t1: &QuadNumber, t2: &QuadNumber) -> Result<IsogenyOutcome> {
    let (d1, d2) = (t1.field(), t2.field());
    if d1 != d2 {
        return Ok(IsogenyOutcome::NotIsogenous {
            reason: format!(
                "CM fields differ: Q(sqrt {}) vs Q(sqrt {})",
                d1.map_or("?".into(), |d| d.to_string()),
                d2.map_or("?".into(), |d| d.to_string())
            ),
        });
    }
    let r = Rational::from(&t2.b / &t1.b);
    let s = &t2.a - Rational::from(&t1.a * &r);
    let witness = clear_denominators(&r, &s)?;
    debug_assert_eq!(mobius_quad(&witness, t1)?, *t2);
    let alpha = isogeny_alpha(l1, l2, &witness, DEFAULT_PRECISION)?;
    Ok(IsogenyOutcome::Isogenous { witness, alpha })
}

/// Integers inside a ball, clipped to `[-bound, bound]`.
fn integers_in(b: &Ball, bound: i64) -> Option<std::ops::RangeInclusive<i64>> {
    let lo = b.lower().ceil().to_f64();
    let hi = b.upper().floor().to_f64();
    if !lo.is_finite() || !hi.is_finite() {
        return None;
    }
    Some((lo.max(-(bound as f64)) as i64)..=(hi.min(bound as f64) as i64))
}

/// Candidate witnesses with entries bounded by `bound`, in canonical sign
/// (`c > 0`, or `c = 0` and `e > 0`), consistent with `τ₂ = M·τ₁` on enclosures.
pub fn numeric_witnesses(t1: &ComplexBall, t2: &ComplexBall, bound: u32) -> Result<Vec<IntMatrix>> {
    let b = bound as i64;
    let too_wide = || Error::PrecisionExhausted("tau enclosures too wide for witness search".into());
    let mut out = Vec::new();
    for c in 0..=b {
        for e in -b..=b {
            if c == 0 && e <= 0 {
                continue;
            }
            // τ₂ (cτ₁ + e) = aτ₁ + b  ⇒  a = Im(w)/Im(τ₁), b = Re(w) − a Re(τ₁)
            let w = t2.mul(&t1.mul_i64(c).add(&ComplexBall::from_i64(e, t1.prec())));
            let a_ball = w.im.div(&t1.im).ok_or_else(too_wide)?;
            for a in integers_in(&a_ball, b).ok_or_else(too_wide)? {
                let b_ball = w.re.sub(&t1.re.mul_i64(a));
                for bb in integers_in(&b_ball, b).ok_or_else(too_wide)? {
                    let m = [[a, bb], [c, e]];
                    if det(&m) == 0 {
                        continue;
                    }
                    if let Some(img) = mobius_ball(&m, t1) {
                        if img.overlaps(t2) {
                            out.push(m);
                        }
                    }
                }
            }
        }
    }
    out.sort_by_key(|m| (m.iter().flatten().map(|x| x.abs()).max(), *m));
    Ok(out)
}

fn numeric_isogeny(l1: &Lattice, l2: &Lattice, bound: u32, prec: u32) -> Result<IsogenyOutcome> {
    let t1 = l1.tau_ball(prec);
    let t2 = l2.tau_ball(prec);
    let candidates = numeric_witnesses(&t1, &t2, bound)?;
    match candidates.first() {
        Some(m) => {
            let alpha = isogeny_alpha(l1, l2, m, prec)?;
            Ok(IsogenyOutcome::Isogenous { witness: *m, alpha })
        }
        None => Ok(IsogenyOutcome::UnknownUpToBound { bound }),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IsrVerdict {
    pub verdict: IsogenyVerdict,
    pub used_reflection: bool,
}

/// Isogeny to `l2` or to its complex conjugate; the direct branch is tried first.
pub fn isr_equivalent(l1: &Lattice, l2: &Lattice, search_bound: u32) -> Result<IsrVerdict> {
    let direct = is_isogenous(l1, l2, search_bound)?;
    if direct.is_isogenous() {
        return Ok(IsrVerdict { verdict: direct, used_reflection: false });
    }
    let reflected = is_isogenous(l1, &conjugate(l2), search_bound)?;
    if reflected.is_isogenous() {
        return Ok(IsrVerdict { verdict: reflected, used_reflection: true });
    }
    let downgraded = direct.downgraded || reflected.downgraded;
    let outcome = match (&direct.outcome, &reflected.outcome) {
        (IsogenyOutcome::NotIsogenous { reason }, IsogenyOutcome::NotIsogenous { .. }) => {
            IsogenyOutcome::NotIsogenous { reason: format!("{reason} (also after reflection)") }
        }
        _ => IsogenyOutcome::UnknownUpToBound { bound: search_bound },
    };
    Ok(IsrVerdict { verdict: IsogenyVerdict { outcome, downgraded }, used_reflection: false })
}
