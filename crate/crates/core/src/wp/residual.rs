//! Certified defect bounds for the functional identities of ℘ and `exp_E`.

use std::fmt;

use rug::Float;

use super::curve::{curve_add, curve_defect, curve_neg, exp_e, point_distance};
use super::{invariants, target_radius, EllipticModel, ReducedArg};
use crate::arith::ball::{ComplexBall, RAD_PREC};
use crate::error::{Error, Result};
use crate::lattice::{conjugate, isogeny_alpha, make_lattice, ExactComplex, IntMatrix, Lattice};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum IdentityTag {
    Ode,
    Homogeneity,
    Schwarz,
    Addition,
    Isogeny,
}

impl IdentityTag {
    pub fn name(self) -> &'static str {
        match self {
            IdentityTag::Ode => "ode",
            IdentityTag::Homogeneity => "homogeneity",
            IdentityTag::Schwarz => "schwarz",
            IdentityTag::Addition => "addition",
            IdentityTag::Isogeny => "isogeny",
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        match text {
            "ode" => Ok(IdentityTag::Ode),
            "homogeneity" => Ok(IdentityTag::Homogeneity),
            "schwarz" => Ok(IdentityTag::Schwarz),
            "addition" => Ok(IdentityTag::Addition),
            "isogeny" => Ok(IdentityTag::Isogeny),
            _ => Err(Error::Parse(format!("unknown identity {text:?}"))),
        }
    }
}

impl fmt::Display for IdentityTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Upper bound on the defect of one identity at one argument.
#[derive(Clone, Debug, PartialEq)]
pub struct Residual {
    pub identity: IdentityTag,
    pub value: Float,
}

impl Residual {
    fn new(identity: IdentityTag, parts: &[Float]) -> Self {
        let value = parts.iter().fold(Float::with_val(RAD_PREC, 0), |acc, p| if *p > acc { p.clone() } else { acc });
        Residual { identity, value }
    }

    /// True when the bound is at most `2^(-bits)`.
    pub fn below_pow2(&self, bits: i32) -> bool {
        self.value <= (Float::with_val(RAD_PREC, 1) >> bits)
    }

    pub fn log2(&self) -> f64 {
        if self.value.is_zero() {
            f64::NEG_INFINITY
        } else {
            self.value.to_f64().log2()
        }
    }
}

/// `|℘′² − 4℘³ + g₂℘ + g₃|` at `z`, using the model's own `g₂, g₃`.
pub fn ode_residual(m: &EllipticModel, z: &ComplexBall) -> Result<Residual> {
    let (p, dp) = m.wp_pair(z)?;
    let defect = dp.sqr().sub(&p.powi(3).mul_i64(4)).add(&m.g2.mul(&p)).add(&m.g3);
    Ok(Residual::new(IdentityTag::Ode, &[defect.abs_upper()]))
}

fn mul_exact(a: &ExactComplex, b: &ExactComplex, prec: u32) -> ExactComplex {
    if let (ExactComplex::Quad(x), ExactComplex::Quad(y)) = (a, b) {
        if let Ok(p) = x.mul(y) {
            return ExactComplex::Quad(p);
        }
    }
    ExactComplex::Numeric(a.to_ball(prec).mul(&b.to_ball(prec)))
}

fn diff(a: &ComplexBall, b: &ComplexBall) -> Float {
    a.sub(b).abs_upper()
}

/// `℘_{αΛ}(z) = α⁻²℘_Λ(z/α)`, the matching statement for ℘′, and the
/// transport of the invariants `g₂(αΛ) = α⁻⁴g₂(Λ)`, `g₃(αΛ) = α⁻⁶g₃(Λ)`.
pub fn homogeneity_residual(m: &EllipticModel, alpha: &ExactComplex, z: &ComplexBall) -> Result<Residual> {
    let prec = m.working_precision();
    let l = &m.lattice;
    let scaled = make_lattice(mul_exact(alpha, &l.omega1, prec), mul_exact(alpha, &l.omega2, prec))?;
    let ms = invariants(&scaled, m.precision)?;
    let a = alpha.to_ball(prec);
    let inv = a.recip().ok_or_else(|| Error::InvalidInput("alpha must be nonzero".into()))?;
    let (lhs, dlhs) = ms.wp_pair(z)?;
    let (p, dp) = m.wp_pair(&z.with_prec(prec).mul(&inv))?;
    let inv2 = inv.sqr();
    let inv3 = inv2.mul(&inv);
    let inv4 = inv2.sqr();
    let inv6 = inv4.mul(&inv2);
    Ok(Residual::new(
        IdentityTag::Homogeneity,
        &[
            diff(&lhs, &p.mul(&inv2)),
            diff(&dlhs, &dp.mul(&inv3)),
            diff(&ms.g2, &m.g2.mul(&inv4)),
            diff(&ms.g3, &m.g3.mul(&inv6)),
        ],
    ))
}

/// `℘_{Λ̄}(z) = conj ℘_Λ(z̄)`, likewise for ℘′, and `g_k(Λ̄) = conj g_k(Λ)`.
pub fn schwarz_residual(m: &EllipticModel, z: &ComplexBall) -> Result<Residual> {
    let mc = invariants(&conjugate(&m.lattice), m.precision)?;
    let (lhs, dlhs) = mc.wp_pair(z)?;
    let (p, dp) = m.wp_pair(&z.conj())?;
    Ok(Residual::new(
        IdentityTag::Schwarz,
        &[
            diff(&lhs, &p.conj()),
            diff(&dlhs, &dp.conj()),
            diff(&mc.g2, &m.g2.conj()),
            diff(&mc.g3, &m.g3.conj()),
        ],
    ))
}

/// `exp_E(z₁ + z₂) = exp_E(z₁) ⊕ exp_E(z₂)`, plus the curve equation at the sum.
///
/// When `z₂ = −z₁` or `z₁ + z₂` is exactly a lattice point the check becomes
/// `exp_E(z₂) = −exp_E(z₁)`.
pub fn addition_residual(m: &EllipticModel, z1: &ComplexBall, z2: &ComplexBall) -> Result<Residual> {
    let p = exp_e(m, z1)?;
    let q = exp_e(m, z2)?;
    let s = z1.add(z2);
    let opposite = *z2 == z1.neg();
    if opposite || matches!(m.basis.reduce_arg(&s)?, ReducedArg::LatticePoint) {
        let parts = [point_distance(&q, &curve_neg(&p)), curve_defect(m, &p), curve_defect(m, &q)];
        return Ok(Residual::new(IdentityTag::Addition, &parts));
    }
    let sum = curve_add(m, &p, &q)?;
    let direct = exp_e(m, &s)?;
    Ok(Residual::new(IdentityTag::Addition, &[point_distance(&sum, &direct), curve_defect(m, &sum)]))
}

/// Which scalar makes `exp_E₂(β · exp_E₁⁻¹(·))` well defined.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AlphaDirection {
    /// `β = α⁻¹`, so `βΛ₁ ⊆ Λ₂`.
    Inverse,
    /// `β = α`.
    Direct,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IsogenyResidual {
    /// Defect of well-definedness with `β = α⁻¹`.
    pub inverse: Residual,
    /// Defect with `β = α`.
    pub direct: Residual,
    /// Directions whose defect is below `2^(-precision+16)`.
    pub certified: Vec<AlphaDirection>,
}

impl IsogenyResidual {
    /// The smallest defect among certified directions (or the inverse one if none certify).
    pub fn best(&self) -> &Residual {
        if self.certified.first() == Some(&AlphaDirection::Direct) {
            &self.direct
        } else {
            &self.inverse
        }
    }
}

/// Tests `exp_E₂(β(z + λ)) = exp_E₂(βz)` for both periods `λ` of `Λ₁` and
/// both conventions `β ∈ {α⁻¹, α}`, where `Λ₁ ⊆ αΛ₂` comes from `witness`.
pub fn isogeny_residual(
    l1: &Lattice,
    l2: &Lattice,
    witness: &IntMatrix,
    z: &ComplexBall,
    precision: u32,
) -> Result<IsogenyResidual> {
    let m2 = invariants(l2, precision)?;
    let prec = m2.working_precision();
    let alpha = isogeny_alpha(l1, l2, witness, prec)?.to_ball(prec);
    let inv = alpha.recip().ok_or_else(|| Error::PrecisionExhausted("alpha not certified nonzero".into()))?;
    let periods = [l1.omega1_ball(prec), l1.omega2_ball(prec)];
    let z = z.with_prec(prec);
    let defect = |beta: &ComplexBall| -> Result<Float> {
        let base = exp_e(&m2, &beta.mul(&z))?;
        let mut worst = Float::with_val(RAD_PREC, 0);
        for lambda in &periods {
            let shifted = exp_e(&m2, &beta.mul(&z.add(lambda)))?;
            let d = point_distance(&shifted, &base);
            if d > worst {
                worst = d;
            }
        }
        Ok(worst)
    };
    let inverse = Residual::new(IdentityTag::Isogeny, &[defect(&inv)?]);
    let direct = match defect(&alpha) {
        Ok(v) => Residual::new(IdentityTag::Isogeny, &[v]),
        Err(_) => Residual::new(IdentityTag::Isogeny, &[Float::with_val(RAD_PREC, f64::INFINITY)]),
    };
    let target = target_radius(precision, 16);
    let mut certified = Vec::new();
    if inverse.value <= target {
        certified.push(AlphaDirection::Inverse);
    }
    if direct.value <= target {
        certified.push(AlphaDirection::Direct);
    }
    Ok(IsogenyResidual { inverse, direct, certified })
}
