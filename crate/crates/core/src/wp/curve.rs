//! Points of `Y²Z = 4X³ − g₂XZ² − g₃Z³`, the group law, and `exp_E`.

use rug::{Float, Rational};

use super::{scaled_pair, EllipticModel, ReducedArg};
use crate::arith::ball::{Ball, ComplexBall, RAD_PREC};
use crate::error::{Error, Result};

/// Projective point `[X : Y : Z]`. Finite points are stored with `Z = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvePoint {
    pub x: ComplexBall,
    pub y: ComplexBall,
    pub z: ComplexBall,
}

impl CurvePoint {
    /// The point at infinity `[0 : 1 : 0]`.
    pub fn identity(prec: u32) -> Self {
        CurvePoint { x: ComplexBall::zero(prec), y: ComplexBall::one(prec), z: ComplexBall::zero(prec) }
    }

    pub fn affine(x: ComplexBall, y: ComplexBall) -> Self {
        let prec = x.prec();
        CurvePoint { x, y, z: ComplexBall::one(prec) }
    }

    pub fn is_identity(&self) -> bool {
        self.z.is_exact_zero()
    }

    /// `(X/Z, Y/Z)` when `Z` is certified nonzero.
    pub fn affine_coords(&self) -> Option<(ComplexBall, ComplexBall)> {
        if self.z == ComplexBall::one(self.z.prec()) {
            return Some((self.x.clone(), self.y.clone()));
        }
        Some((self.x.div(&self.z)?, self.y.div(&self.z)?))
    }

    pub fn prec(&self) -> u32 {
        self.x.prec()
    }
}

pub fn curve_neg(p: &CurvePoint) -> CurvePoint {
    CurvePoint { x: p.x.clone(), y: p.y.neg(), z: p.z.clone() }
}

fn branch(msg: &str) -> Error {
    Error::IndistinguishableBranch(msg.into())
}

/// Tangent step: `m = (12x² − g₂)/(2y)`.
pub fn curve_double(m: &EllipticModel, p: &CurvePoint) -> Result<CurvePoint> {
    if p.is_identity() {
        return Ok(p.clone());
    }
    let (x, y) = p.affine_coords().ok_or_else(|| branch("Z coordinate not certified nonzero"))?;
    if y.is_exact_zero() {
        return Ok(CurvePoint::identity(p.prec()));
    }
    if !y.excludes_zero() {
        return Err(branch("doubling a point whose Y may vanish"));
    }
    let slope = x.sqr().mul_i64(12).sub(&m.g2).div(&y.mul_i64(2)).ok_or_else(|| branch("2y not certified nonzero"))?;
    Ok(third_point(&slope, &x, &y, &x))
}

/// `x₃ = m²/4 − x₁ − x₂`, `y₃ = −(m(x₃ − x₁) + y₁)`.
fn third_point(slope: &ComplexBall, x1: &ComplexBall, y1: &ComplexBall, x2: &ComplexBall) -> CurvePoint {
    let x3 = slope.sqr().mul_pow2(-2).sub(x1).sub(x2);
    let y3 = slope.mul(&x3.sub(x1)).add(y1).neg();
    CurvePoint::affine(x3, y3)
}

/// `P ⊕ Q`. Equal and opposite points are recognized structurally; any other
/// case in which `x₁ = x₂` cannot be excluded is reported rather than guessed.
pub fn curve_add(m: &EllipticModel, p: &CurvePoint, q: &CurvePoint) -> Result<CurvePoint> {
    if p.is_identity() {
        return Ok(q.clone());
    }
    if q.is_identity() {
        return Ok(p.clone());
    }
    let (x1, y1) = p.affine_coords().ok_or_else(|| branch("Z coordinate not certified nonzero"))?;
    let (x2, y2) = q.affine_coords().ok_or_else(|| branch("Z coordinate not certified nonzero"))?;
    if x1 == x2 && y1 == y2 {
        return curve_double(m, p);
    }
    let dx = x2.sub(&x1);
    if dx.excludes_zero() {
        let slope = y2.sub(&y1).div(&dx).expect("certified nonzero");
        return Ok(third_point(&slope, &x1, &y1, &x2));
    }
    if x1 == x2 && y1 == y2.neg() {
        return Ok(CurvePoint::identity(p.prec()));
    }
    Err(branch("points may coincide up to sign"))
}

/// `n·P` by double-and-add.
pub fn curve_smul(m: &EllipticModel, n: i64, p: &CurvePoint) -> Result<CurvePoint> {
    if n == 0 {
        return Ok(CurvePoint::identity(p.prec()));
    }
    if n < 0 {
        return curve_smul(m, -n, &curve_neg(p));
    }
    let bits = 64 - n.leading_zeros();
    let mut acc = p.clone();
    for i in (0..bits - 1).rev() {
        acc = curve_double(m, &acc)?;
        if (n >> i) & 1 == 1 {
            acc = curve_add(m, &acc, p)?;
        }
    }
    Ok(acc)
}

/// Upper bound on `|Y²Z − (4X³ − g₂XZ² − g₃Z³)|` for an affine point.
pub fn curve_defect(m: &EllipticModel, p: &CurvePoint) -> Float {
    if p.is_identity() {
        return Float::with_val(RAD_PREC, 0);
    }
    let Some((x, y)) = p.affine_coords() else {
        return Float::with_val(RAD_PREC, f64::INFINITY);
    };
    let rhs = x.powi(3).mul_i64(4).sub(&m.g2.mul(&x)).sub(&m.g3);
    y.sqr().sub(&rhs).abs_upper()
}

/// Upper bound on the coordinatewise distance between two points.
///
/// Both at infinity gives 0; exactly one at infinity gives `+inf`.
pub fn point_distance(p: &CurvePoint, q: &CurvePoint) -> Float {
    match (p.is_identity(), q.is_identity()) {
        (true, true) => Float::with_val(RAD_PREC, 0),
        (false, false) => match (p.affine_coords(), q.affine_coords()) {
            (Some((x1, y1)), Some((x2, y2))) => {
                let dx = x1.sub(&x2).abs_upper();
                let dy = y1.sub(&y2).abs_upper();
                if dx > dy {
                    dx
                } else {
                    dy
                }
            }
            _ => Float::with_val(RAD_PREC, f64::INFINITY),
        },
        _ => Float::with_val(RAD_PREC, f64::INFINITY),
    }
}

/// `[℘ : ℘′ : 1]` from the series at a reduced argument, no near-pole handling.
fn exp_direct(m: &EllipticModel, zeta: &ComplexBall) -> Result<CurvePoint> {
    let (p, dp) = scaled_pair(&m.basis, zeta)?;
    Ok(CurvePoint::affine(p, dp))
}

fn is_safe(m: &EllipticModel, zeta: &ComplexBall) -> bool {
    m.basis.pole_distance(zeta).to_f64() >= m.basis.safe_radius()
}

/// `exp_E(z) = [℘(z) : ℘′(z) : 1]`, or `[0 : 1 : 0]` on the lattice.
///
/// Arguments closer to the lattice than the safe radius go through
/// [`near_pole_eval`] with an automatically chosen anchor; the raw series is
/// the fallback when no anchor works.
pub fn exp_e(m: &EllipticModel, z: &ComplexBall) -> Result<CurvePoint> {
    let prec = m.working_precision();
    let zeta = match m.basis.reduce_arg(z)? {
        ReducedArg::LatticePoint => return Ok(CurvePoint::identity(prec)),
        ReducedArg::Cell(zeta) => zeta,
    };
    if is_safe(m, &zeta) {
        return exp_direct(m, &zeta);
    }
    match auto_near_pole(m, &zeta) {
        Ok(p) => Ok(p),
        Err(_) => exp_direct(m, &zeta).map_err(|_| Error::UndecidablePoleProximity),
    }
}

/// `exp_E(xω₁ + yω₂)` for exact lattice coordinates.
///
/// Lattice points and 2-torsion points are recognized exactly; at 2-torsion
/// the `Y` coordinate is set to an exact zero.
pub fn exp_e_coords(m: &EllipticModel, x: &Rational, y: &Rational) -> Result<CurvePoint> {
    let prec = m.working_precision();
    let frac = |r: &Rational| r - r.clone().round();
    let (fx, fy) = (frac(x), frac(y));
    if fx == 0 && fy == 0 {
        return Ok(CurvePoint::identity(prec));
    }
    let w1 = m.lattice.omega1_ball(prec);
    let w2 = m.lattice.omega2_ball(prec);
    let z = w1.mul_real(&Ball::from_rational(&fx, prec)).add(&w2.mul_real(&Ball::from_rational(&fy, prec)));
    let half = Rational::from((1, 2));
    let two_torsion = [&fx, &fy].iter().all(|c| **c == 0 || Rational::from(c.abs_ref()) == half);
    let p = exp_e(m, &z)?;
    if two_torsion {
        if let Some((px, _)) = p.affine_coords() {
            return Ok(CurvePoint::affine(px, ComplexBall::zero(prec)));
        }
    }
    Ok(p)
}

/// `exp_E(z) = n·(exp_E(b) − exp_E(a))` with `b = z/n + a`.
///
/// `a` is a Gaussian rational `a_re + a_im·i`. Both `a` (unless it is 0) and
/// `b` must lie in the safe region of the series.
pub fn near_pole_eval(m: &EllipticModel, z: &ComplexBall, a: (&Rational, &Rational), n: u32) -> Result<CurvePoint> {
    if n == 0 {
        return Err(Error::InvalidInput("near-pole multiplier must be positive".into()));
    }
    let prec = m.working_precision();
    let a_ball = ComplexBall::from_rationals(a.0, a.1, prec);
    let w = &m.basis.omega1;
    let fail = || Error::PrecisionExhausted("omega1 enclosure contains zero".into());
    let a_zeta = a_ball.div(w).ok_or_else(fail)?;
    let z_zeta = z.with_prec(prec).div(w).ok_or_else(fail)?;
    near_pole_zeta(m, &z_zeta, &a_zeta, n)
}

fn near_pole_zeta(m: &EllipticModel, z_zeta: &ComplexBall, a_zeta: &ComplexBall, n: u32) -> Result<CurvePoint> {
    let prec = m.working_precision();
    let b_zeta = z_zeta
        .div(&ComplexBall::from_i64(n as i64, prec))
        .expect("nonzero")
        .add(a_zeta);
    let pa = if a_zeta.is_exact_zero() {
        CurvePoint::identity(prec)
    } else {
        match m.basis.reduce_zeta(a_zeta) {
            Ok(ReducedArg::Cell(r)) if is_safe(m, &r) => exp_direct(m, &r)?,
            _ => return Err(Error::NoSafeAnchor),
        }
    };
    let pb = match m.basis.reduce_zeta(&b_zeta) {
        Ok(ReducedArg::Cell(r)) if is_safe(m, &r) => exp_direct(m, &r)?,
        _ => return Err(Error::NoSafeAnchor),
    };
    let diff = curve_add(m, &pb, &curve_neg(&pa))?;
    curve_smul(m, n as i64, &diff)
}

/// Tries multipliers and anchors in a fixed order until one certifies.
fn auto_near_pole(m: &EllipticModel, zeta: &ComplexBall) -> Result<CurvePoint> {
    let prec = m.working_precision();
    let tau = &m.basis.tau;
    let one = ComplexBall::one(prec);
    // shift by a period so that z/n lands away from the lattice
    let shifts = [one.clone(), tau.clone(), one.add(tau)];
    let q = 8i64;
    let mut anchors: Vec<(i64, i64)> = (-q..=q).flat_map(|j| (-q..=q).map(move |k| (j, k))).collect();
    anchors.retain(|&(j, k)| (j, k) != (0, 0));
    anchors.sort_by_key(|&(j, k)| (j.abs() + k.abs(), j, k));
    let scale = w_scale(m);
    for n in 2..=8u32 {
        for shift in &shifts {
            let lifted = zeta.add(shift);
            let part = lifted.div(&ComplexBall::from_i64(n as i64, prec)).expect("nonzero");
            match m.basis.reduce_zeta(&part) {
                Ok(ReducedArg::Cell(r)) if is_safe(m, &r) => {}
                _ => continue,
            }
            for &(j, k) in &anchors {
                let a = ComplexBall::from_rationals(&Rational::from((j, q)), &Rational::from((k, q)), prec)
                    .mul_real(&scale);
                let Some(a_zeta) = a.div(&m.basis.omega1) else { continue };
                if let Ok(p) = near_pole_zeta(m, &lifted, &a_zeta, n) {
                    return Ok(p);
                }
            }
        }
    }
    Err(Error::NoSafeAnchor)
}

/// Power of two closest to `|ω₁′|`, so anchors stay Gaussian rationals at any scale.
fn w_scale(m: &EllipticModel) -> Ball {
    let mag = m.basis.omega1.abs_upper().to_f64().max(f64::MIN_POSITIVE);
    let e = mag.log2().round() as i32;
    Ball::one(m.working_precision()).mul_pow2(e)
}
