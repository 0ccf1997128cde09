//! Certified evaluation of g₂, g₃, ℘ and ℘′.
//!
//! Everything is computed for the normalized lattice `Z + Zτ` with `τ` in
//! the fundamental domain and then rescaled:
//! `℘_Λ(z) = ω⁻² ℘_τ(z/ω)`, `g₂(Λ) = ω⁻⁴ g₂(τ)`, `g₃(Λ) = ω⁻⁶ g₃(τ)`.
//!
//! Lattice rows `{m + nτ : m ∈ Z}` are summed in closed form with
//! `Σ_m (w + m)⁻² = π² / sin²(πw)` and its derivatives, so the remaining sum
//! over `n` converges geometrically. The tail beyond the last row is bounded
//! with `|sin(πw)| ≥ sinh(π |Im w|)` and folded into the radius.

pub mod curve;
pub mod residual;

use rug::float::Round;
use rug::Float;

use crate::arith::ball::{Ball, ComplexBall, RAD_PREC};
use crate::error::{Error, Result};
use crate::lattice::{reduce_loose, IntMatrix, Lattice};

pub use curve::{curve_add, curve_neg, curve_smul, exp_e, exp_e_coords, near_pole_eval, CurvePoint};
pub use residual::{
    addition_residual, homogeneity_residual, isogeny_residual, ode_residual, schwarz_residual, IdentityTag,
    IsogenyResidual, Residual,
};

/// Extra bits carried internally above the requested precision.
pub const GUARD_BITS: u32 = 64;

/// `f` as a 64-bit float rounded in the given direction.
fn round64(f: &Float, round: Round) -> Float {
    Float::with_val_round(RAD_PREC, f, round).0
}

/// The lattice in a reduced basis `(ω₁′, ω₂′)` at a fixed working precision.
#[derive(Clone, Debug)]
pub struct ReducedBasis {
    pub prec: u32,
    /// Maps the stored period pair to the reduced pair.
    pub matrix: IntMatrix,
    pub omega1: ComplexBall,
    pub omega2: ComplexBall,
    /// `ω₂′/ω₁′`, in (or near) the fundamental domain.
    pub tau: ComplexBall,
}

/// A lattice argument after reduction into the cell around 0.
#[derive(Clone, Debug)]
pub enum ReducedArg {
    LatticePoint,
    /// `z/ω₁′` minus the nearest lattice vector, in units of `ω₁′`.
    Cell(ComplexBall),
}

impl ReducedBasis {
    pub fn new(l: &Lattice, prec: u32) -> Result<Self> {
        let (tau, m) = reduce_loose(&l.tau_ball(prec))?;
        let w1 = l.omega1_ball(prec);
        let w2 = l.omega2_ball(prec);
        let omega2 = w2.mul_i64(m[0][0]).add(&w1.mul_i64(m[0][1]));
        let omega1 = w2.mul_i64(m[1][0]).add(&w1.mul_i64(m[1][1]));
        if !tau.im.is_positive() {
            return Err(Error::DegenerateLattice("reduced tau not certified in the upper half plane".into()));
        }
        Ok(ReducedBasis { prec, matrix: m, omega1, omega2, tau })
    }

    /// Expresses `z` in units of `ω₁′` and subtracts the nearest lattice vector.
    pub fn reduce_arg(&self, z: &ComplexBall) -> Result<ReducedArg> {
        let zeta = z
            .with_prec(self.prec)
            .div(&self.omega1)
            .ok_or_else(|| Error::PrecisionExhausted("omega1 enclosure contains zero".into()))?;
        self.reduce_zeta(&zeta)
    }

    /// Same as [`Self::reduce_arg`] for an argument already in units of `ω₁′`.
    pub fn reduce_zeta(&self, zeta: &ComplexBall) -> Result<ReducedArg> {
        let y = zeta
            .im
            .div(&self.tau.im)
            .ok_or_else(|| Error::PrecisionExhausted("Im tau not certified nonzero".into()))?;
        let n = y.mid().to_f64().round();
        let x = zeta.re.sub(&self.tau.re.mul(&y));
        let m = x.mid().to_f64().round();
        if !n.is_finite() || !m.is_finite() {
            return Err(Error::PrecisionExhausted("argument enclosure is not finite".into()));
        }
        let shift = self.tau.mul_i64(n as i64).add(&ComplexBall::from_i64(m as i64, self.prec));
        let reduced = zeta.sub(&shift);
        if reduced.is_exact_zero() {
            return Ok(ReducedArg::LatticePoint);
        }
        for (dm, dn) in NEIGHBOURS {
            let lambda = self.tau.mul_i64(dn).add(&ComplexBall::from_i64(dm, self.prec));
            if reduced.sub(&lambda).contains_zero() {
                return Err(Error::UndecidablePoleProximity);
            }
        }
        Ok(ReducedArg::Cell(reduced))
    }

    /// Lower bound on the distance from `zeta` (a reduced cell argument) to the lattice, in units of `ω₁′`.
    pub fn pole_distance(&self, zeta: &ComplexBall) -> Float {
        NEIGHBOURS
            .iter()
            .map(|&(dm, dn)| {
                let lambda = self.tau.mul_i64(dn).add(&ComplexBall::from_i64(dm, self.prec));
                zeta.sub(&lambda).abs_lower()
            })
            .fold(Float::with_val(RAD_PREC, f64::INFINITY), |acc, d| if d < acc { d } else { acc })
    }

    /// Radius of the safe region: a quarter of the reduced cell's diameter (units of `ω₁′`).
    pub fn safe_radius(&self) -> f64 {
        let one = ComplexBall::one(self.prec);
        let d1 = self.tau.add(&one).abs_lower().to_f64();
        let d2 = self.tau.sub(&one).abs_lower().to_f64();
        d1.max(d2) / 4.0
    }

    /// Number of rows `n = 1..=N` summed explicitly for a tail below `2^-(prec+20)`.
    fn rows(&self) -> usize {
        let y = self.tau.im.lower().to_f64();
        (((self.prec + 20) as f64 * std::f64::consts::LN_2) / (2.0 * std::f64::consts::PI * y)).ceil() as usize
    }

    fn pi(&self) -> Ball {
        Ball::pi(self.prec)
    }

    /// `℘_τ(ζ)` and `℘′_τ(ζ)` for a reduced argument `ζ` off the lattice.
    pub fn wp_pair_normalized(&self, zeta: &ComplexBall) -> Result<(ComplexBall, ComplexBall)> {
        let prec = self.prec;
        let pi = self.pi();
        let rows = self.rows();
        let fail = || Error::PrecisionExhausted("sin(pi w) not certified nonzero".into());
        // s(w) = 1/sin²(πw), c(w) = cos(πw)/sin³(πw)
        let sc = |w: &ComplexBall| -> Result<(ComplexBall, ComplexBall)> {
            let pw = w.mul_real(&pi);
            let sn = pw.sin();
            let cs = pw.cos();
            let inv = sn.recip().ok_or_else(fail)?;
            let s = inv.sqr();
            Ok((s.clone(), cs.mul(&s).mul(&inv)))
        };
        let (s0, c0) = sc(zeta)?;
        let mut wp_sum = s0.sub(&ComplexBall::from_real(Ball::from_rational(&rug::Rational::from((1, 3)), prec)));
        let mut wpp_sum = c0;
        for n in 1..=rows as i64 {
            let nt = self.tau.mul_i64(n);
            let (sm, cm) = sc(&zeta.sub(&nt))?;
            let (sp, cp) = sc(&zeta.add(&nt))?;
            let (sl, _) = sc(&nt)?;
            wp_sum = wp_sum.add(&sm.add(&sp).sub(&sl.mul_i64(2)));
            wpp_sum = wpp_sum.add(&cm.add(&cp));
        }
        let tails = self.tails(&zeta.im.abs_upper(), rows);
        let pi2 = pi.sqr();
        let wp = wp_sum.mul_real(&pi2).inflate(&tails.wp);
        let wpp = wpp_sum.mul_real(&pi2.mul(&pi).mul_i64(-2)).inflate(&tails.wpp);
        Ok((wp, wpp))
    }

    /// Eisenstein sums `G₄ = Σ′ λ⁻⁴` and `G₆ = Σ′ λ⁻⁶` of `Z + Zτ`.
    pub fn eisenstein_normalized(&self) -> Result<(ComplexBall, ComplexBall)> {
        let prec = self.prec;
        let pi = self.pi();
        let rows = self.rows();
        let mut g4 = ComplexBall::zero(prec);
        let mut g6 = ComplexBall::zero(prec);
        for n in 1..=rows as i64 {
            let w = self.tau.mul_i64(n).mul_real(&pi);
            let s = w
                .sin()
                .sqr()
                .recip()
                .ok_or_else(|| Error::PrecisionExhausted("sin(n pi tau) not certified nonzero".into()))?;
            let s2 = s.sqr();
            // s(3s - 2)/3 and s(15s² - 15s + 2)/15
            let t4 = s2.mul_i64(3).sub(&s.mul_i64(2));
            let t6 = s2.mul(&s).mul_i64(15).sub(&s2.mul_i64(15)).add(&s.mul_i64(2));
            g4 = g4.add(&t4);
            g6 = g6.add(&t6);
        }
        let pi4 = pi.powi(4);
        let pi6 = pi.powi(6);
        let third = Ball::from_rational(&rug::Rational::from((2, 3)), prec);
        let fifteenth = Ball::from_rational(&rug::Rational::from((2, 15)), prec);
        let head4 = pi4.div(&Ball::from_i64(45, prec)).expect("nonzero");
        let head6 = pi6.mul_i64(2).div(&Ball::from_i64(945, prec)).expect("nonzero");
        let tails = self.tails(&Float::with_val(RAD_PREC, 0), rows);
        let g4 = g4.mul_real(&pi4.mul(&third)).add(&ComplexBall::from_real(head4)).inflate(&tails.g4);
        let g6 = g6.mul_real(&pi6.mul(&fifteenth)).add(&ComplexBall::from_real(head6)).inflate(&tails.g6);
        Ok((g4, g6))
    }

    fn tails(&self, eta_hi: &Float, rows: usize) -> Tails {
        tail_bounds(&self.tau.im.lower(), eta_hi, rows)
    }
}

const NEIGHBOURS: [(i64, i64); 9] = [(0, 0), (1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (-1, -1), (1, -1), (-1, 1)];

#[derive(Clone, Debug)]
struct Tails {
    wp: Float,
    wpp: Float,
    g4: Float,
    g6: Float,
}

/// Rigorous bounds on the rows `n > rows` (both signs) of each series.
///
/// `y_lo` bounds `Im τ` from below and `eta_hi` bounds `|Im ζ|` from above.
fn tail_bounds(y_lo: &Float, eta_hi: &Float, rows: usize) -> Tails {
    let p = RAD_PREC;
    let y = Ball::from_float(&round64(y_lo, Round::Down), p);
    let h = Ball::from_float(&round64(eta_hi, Round::Up), p);
    let pi = Ball::pi(p);
    let two_pi = pi.mul_i64(2);
    let n1 = rows as i64 + 1;
    let inf = || Float::with_val(p, f64::INFINITY);
    let u0 = y.mul_i64(n1).sub(&h);
    if !u0.is_positive() {
        return Tails { wp: inf(), wpp: inf(), g4: inf(), g6: inf() };
    }
    let one = Ball::one(p);
    let e = two_pi.mul(&y).mul_i64(n1).neg().exp();
    let r = two_pi.mul(&y).neg().exp();
    let q0 = two_pi.mul(&u0).neg().exp();
    let k = Ball::from_i64(4, p).div(&one.sub(&q0).sqr());
    let geo = e.div(&one.sub(&r));
    let (Some(k), Some(geo)) = (k, geo) else {
        return Tails { wp: inf(), wpp: inf(), g4: inf(), g6: inf() };
    };
    let grow = two_pi.mul(&h).exp();
    let pi2 = pi.sqr();
    let wp = pi2.mul(&k).mul(&grow.mul_i64(2).add(&Ball::from_i64(2, p))).mul(&geo);
    let v0 = pi.mul(&u0);
    let coth = v0.cosh().div(&v0.sinh()).unwrap_or_else(|| Ball::from_float(&inf(), p));
    let wpp = pi2.mul(&pi).mul_i64(2).mul(&coth).mul(&k).mul(&grow.mul_i64(2)).mul(&geo);
    let smax = k.mul(&e);
    let g4 = pi2.sqr().mul_i64(2).mul(&one.add(&smax)).mul(&k).mul(&geo);
    let g6 = pi2.powi(3).mul_i64(2).mul(&smax.sqr().add(&smax).add(&one)).mul(&k).mul(&geo);
    Tails { wp: wp.abs_upper(), wpp: wpp.abs_upper(), g4: g4.abs_upper(), g6: g6.abs_upper() }
}

/// Invariants `g₂, g₃` of a lattice together with a reduced basis for evaluation.
#[derive(Clone, Debug)]
pub struct EllipticModel {
    pub lattice: Lattice,
    pub g2: ComplexBall,
    pub g3: ComplexBall,
    /// Requested precision in bits.
    pub precision: u32,
    /// The lattice's own error radii prevented the requested accuracy.
    pub input_limited: bool,
    pub basis: ReducedBasis,
}

/// Radius target `2^-(precision) * 2^slack`.
pub fn target_radius(precision: u32, slack: i32) -> Float {
    Float::with_val(RAD_PREC, 1) >> (precision as i32 - slack)
}

fn max_working(precision: u32) -> u32 {
    4 * precision + 256
}

/// Computes `g₂ = 60 Σ′ λ⁻⁴` and `g₃ = 140 Σ′ λ⁻⁶` with radius at most `2^(-precision+8)`.
pub fn invariants(l: &Lattice, precision: u32) -> Result<EllipticModel> {
    if precision < 53 {
        return Err(Error::InvalidInput(format!("precision must be at least 53 bits, got {precision}")));
    }
    let target = target_radius(precision, 8);
    let mut working = precision + GUARD_BITS;
    loop {
        let basis = ReducedBasis::new(l, working)?;
        let (g4, g6) = basis.eisenstein_normalized()?;
        let w = &basis.omega1;
        let w4 = w.sqr().sqr();
        let w6 = w4.mul(&w.sqr());
        let fail = || Error::PrecisionExhausted("omega1 enclosure contains zero".into());
        let g2 = g4.mul_i64(60).div(&w4).ok_or_else(fail)?;
        let g3 = g6.mul_i64(140).div(&w6).ok_or_else(fail)?;
        let ok = g2.max_rad() <= target && g3.max_rad() <= target;
        if ok || working >= max_working(precision) {
            let input_limited = !ok && !l.is_exact();
            if !ok && !input_limited {
                return Err(Error::PrecisionExhausted(format!(
                    "invariants did not reach 2^-{} at {} working bits",
                    precision - 8,
                    working
                )));
            }
            let disc = g2.powi(3).sub(&g3.sqr().mul_i64(27));
            if disc.contains_zero() {
                return Err(Error::DegenerateLattice("discriminant not certified nonzero".into()));
            }
            return Ok(EllipticModel { lattice: l.clone(), g2, g3, precision, input_limited, basis });
        }
        working = (working * 2).min(max_working(precision));
    }
}

impl EllipticModel {
    pub fn working_precision(&self) -> u32 {
        self.basis.prec
    }

    /// Copy with perturbed invariants, for negative controls.
    pub fn perturbed(&self, dg2: &ComplexBall, dg3: &ComplexBall) -> EllipticModel {
        let mut m = self.clone();
        m.g2 = m.g2.add(dg2);
        m.g3 = m.g3.add(dg3);
        m
    }

    /// Discriminant `g₂³ − 27 g₃²`.
    pub fn discriminant(&self) -> ComplexBall {
        self.g2.powi(3).sub(&self.g3.sqr().mul_i64(27))
    }

    /// `(℘(z), ℘′(z))` computed in the given basis.
    fn pair_in(&self, basis: &ReducedBasis, z: &ComplexBall) -> Result<(ComplexBall, ComplexBall)> {
        match basis.reduce_arg(z)? {
            ReducedArg::LatticePoint => Err(Error::PoleAtLatticePoint),
            ReducedArg::Cell(zeta) => scaled_pair(basis, &zeta),
        }
    }

    /// `(℘(z), ℘′(z))` with radius at most `2^(-precision+16)` when the inputs allow it.
    pub fn wp_pair(&self, z: &ComplexBall) -> Result<(ComplexBall, ComplexBall)> {
        let target = target_radius(self.precision, 16);
        let mut result = self.pair_in(&self.basis, z)?;
        let mut working = self.basis.prec;
        while (result.0.max_rad() > target || result.1.max_rad() > target) && working < max_working(self.precision) {
            working = (working * 2).min(max_working(self.precision));
            let basis = ReducedBasis::new(&self.lattice, working)?;
            result = self.pair_in(&basis, z)?;
        }
        let met = result.0.max_rad() <= target && result.1.max_rad() <= target;
        if !met && z.is_exact() && self.lattice.is_exact() {
            return Err(Error::PrecisionExhausted("wp radius target not met".into()));
        }
        Ok(result)
    }

    pub fn wp(&self, z: &ComplexBall) -> Result<ComplexBall> {
        Ok(self.wp_pair(z)?.0)
    }

    pub fn wp_prime(&self, z: &ComplexBall) -> Result<ComplexBall> {
        Ok(self.wp_pair(z)?.1)
    }
}

/// `℘_Λ, ℘′_Λ` from a reduced argument `ζ` in units of `ω₁′`.
pub(crate) fn scaled_pair(basis: &ReducedBasis, zeta: &ComplexBall) -> Result<(ComplexBall, ComplexBall)> {
    let (p, dp) = basis.wp_pair_normalized(zeta)?;
    let w = &basis.omega1;
    let w2 = w.sqr();
    let fail = || Error::PrecisionExhausted("omega1 enclosure contains zero".into());
    Ok((p.div(&w2).ok_or_else(fail)?, dp.div(&w2.mul(w)).ok_or_else(fail)?))
}

pub fn wp(m: &EllipticModel, z: &ComplexBall) -> Result<ComplexBall> {
    m.wp(z)
}

pub fn wp_prime(m: &EllipticModel, z: &ComplexBall) -> Result<ComplexBall> {
    m.wp_prime(z)
}
