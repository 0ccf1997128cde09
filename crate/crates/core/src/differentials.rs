//! Finite presentations of `Ω(B/C)`, the forms `f′(b)db − d f(b)`, and
//! spaces of derivations annihilating them.
//!
//! Generic presentations have algebraically independent generators and
//! compute exactly over the rational function field. NumericPoint
//! presentations specialize the relation Jacobian at a certified point and
//! only accept pivots whose enclosures exclude zero.

use std::fmt;

use crate::arith::ball::ComplexBall;
use crate::arith::linalg::{self, FieldElem, Solution, Zeroness};
use crate::arith::poly::{Poly, RatFunc};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Generic,
    NumericPoint,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Generic => "generic",
            Mode::NumericPoint => "numeric_point",
        }
    }
}

/// A coefficient: exact in Generic mode, an enclosure in NumericPoint mode.
#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Exact(RatFunc),
    Numeric(ComplexBall),
}

impl Scalar {
    pub fn render(&self, names: &[String]) -> String {
        match self {
            Scalar::Exact(r) => r.render(names),
            Scalar::Numeric(b) => b.to_string(),
        }
    }

    fn mode(&self) -> Mode {
        match self {
            Scalar::Exact(_) => Mode::Generic,
            Scalar::Numeric(_) => Mode::NumericPoint,
        }
    }
}

fn mixed() -> ! {
    panic!("scalars from different presentation modes combined")
}

macro_rules! lift {
    ($a:expr, $b:expr, $op:ident) => {
        match ($a, $b) {
            (Scalar::Exact(x), Scalar::Exact(y)) => Scalar::Exact(FieldElem::$op(x, y)),
            (Scalar::Numeric(x), Scalar::Numeric(y)) => Scalar::Numeric(FieldElem::$op(x, y)),
            _ => mixed(),
        }
    };
}

impl FieldElem for Scalar {
    fn zeroness(&self) -> Zeroness {
        match self {
            Scalar::Exact(x) => x.zeroness(),
            Scalar::Numeric(x) => x.zeroness(),
        }
    }
    fn add(&self, other: &Self) -> Self {
        lift!(self, other, add)
    }
    fn sub(&self, other: &Self) -> Self {
        lift!(self, other, sub)
    }
    fn mul(&self, other: &Self) -> Self {
        lift!(self, other, mul)
    }
    fn div(&self, other: &Self) -> Self {
        lift!(self, other, div)
    }
    fn zero_like(&self) -> Self {
        match self {
            Scalar::Exact(x) => Scalar::Exact(x.zero_like()),
            Scalar::Numeric(x) => Scalar::Numeric(x.zero_like()),
        }
    }
    fn one_like(&self) -> Self {
        match self {
            Scalar::Exact(x) => Scalar::Exact(x.one_like()),
            Scalar::Numeric(x) => Scalar::Numeric(x.one_like()),
        }
    }
    fn pivot_score(&self) -> f64 {
        match self {
            Scalar::Exact(x) => x.pivot_score(),
            Scalar::Numeric(x) => x.pivot_score(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FieldPresentation {
    pub mode: Mode,
    pub generators: Vec<String>,
    pub relations: Vec<Poly>,
    /// Values of the generators (NumericPoint mode).
    pub point: Vec<ComplexBall>,
    pub precision: u32,
    /// Transcendence degree asserted by the caller; checked against the Jacobian.
    pub claimed_td: Option<usize>,
}

impl FieldPresentation {
    pub fn generic(generators: Vec<String>) -> Self {
        FieldPresentation { mode: Mode::Generic, generators, relations: Vec::new(), point: Vec::new(), precision: 0, claimed_td: None }
    }

    pub fn numeric(generators: Vec<String>, relations: Vec<Poly>, point: Vec<ComplexBall>, precision: u32) -> Self {
        FieldPresentation { mode: Mode::NumericPoint, generators, relations, point, precision, claimed_td: None }
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.generators
            .iter()
            .position(|g| g == name)
            .ok_or_else(|| Error::InvalidInput(format!("unknown generator {name:?}")))
    }

    pub fn zero(&self) -> Scalar {
        match self.mode {
            Mode::Generic => Scalar::Exact(RatFunc::constant(0.into())),
            Mode::NumericPoint => Scalar::Numeric(ComplexBall::zero(self.precision)),
        }
    }

    pub fn one(&self) -> Scalar {
        self.zero().one_like()
    }

    /// `|P(point)|` must be at most `2^(-precision/2)`.
    fn tolerance(&self) -> rug::Float {
        rug::Float::with_val(64, 1) >> (self.precision / 2)
    }

    fn validate(&self) -> Result<()> {
        match self.mode {
            Mode::Generic if !self.relations.is_empty() => {
                Err(Error::InvalidConfiguration("generic presentations carry no relations".into()))
            }
            Mode::NumericPoint if self.point.len() != self.len() => Err(Error::InvalidConfiguration(format!(
                "point has {} values for {} generators",
                self.point.len(),
                self.len()
            ))),
            _ => {
                if let Some(p) = self.relations.iter().find(|p| p.nvars() > self.len()) {
                    return Err(Error::InvalidConfiguration(format!("relation {p} uses an unknown generator")));
                }
                Ok(())
            }
        }
    }
}

/// Rows `Σ_j ∂P/∂g_j dg_j` of the relations, evaluated at the point.
///
/// Each relation must vanish at the point within tolerance and the Jacobian
/// must have certified full row rank (and match `claimed_td` if given).
pub fn omega_presentation(p: &FieldPresentation) -> Result<Vec<Vec<Scalar>>> {
    p.validate()?;
    if p.mode == Mode::Generic {
        return Ok(Vec::new());
    }
    let names = &p.generators;
    let tol = p.tolerance();
    let mut rows = Vec::with_capacity(p.relations.len());
    for rel in &p.relations {
        let value = rel.eval(&p.point, p.precision);
        if value.abs_upper() > tol {
            return Err(Error::InvalidConfiguration(format!(
                "relation {} does not vanish at the point (|value| <= {})",
                rel.render(names),
                value.abs_upper().to_f64()
            )));
        }
        rows.push((0..p.len()).map(|j| Scalar::Numeric(rel.derivative(j).eval(&p.point, p.precision))).collect::<Vec<_>>());
    }
    let rank = linalg::rank(&rows, p.len()).map_err(|u| {
        Error::SingularSpecialization(format!("Jacobian rank not certified at column {}", names[u.column]))
    })?;
    if rank != rows.len() {
        return Err(Error::SingularSpecialization(format!(
            "Jacobian has rank {rank} for {} relations at the point",
            rows.len()
        )));
    }
    if let Some(td) = p.claimed_td {
        if p.len() - rank != td {
            return Err(Error::SingularSpecialization(format!(
                "claimed transcendence degree {td} but the Jacobian gives {}",
                p.len() - rank
            )));
        }
    }
    Ok(rows)
}

/// Input for one form: `f′(b)·db − d(fb)` for the point `(b, fb)` of `slot`.
#[derive(Clone, Debug, PartialEq)]
pub struct FormSpec {
    pub slot: usize,
    pub b: usize,
    pub fb: usize,
    pub fprime: Scalar,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FForm {
    pub slot: usize,
    pub b_index: usize,
    pub fb_index: usize,
    pub fprime_value: Scalar,
    pub vector: Vec<Scalar>,
}

pub fn f_forms(p: &FieldPresentation, points: &[FormSpec]) -> Result<Vec<FForm>> {
    points
        .iter()
        .map(|s| {
            if s.b >= p.len() || s.fb >= p.len() {
                return Err(Error::InvalidInput(format!("form on slot {} refers to a missing generator", s.slot)));
            }
            if s.fprime.mode() != p.mode {
                return Err(Error::InvalidInput(format!("f' value for slot {} does not match the presentation mode", s.slot)));
            }
            let mut vector = vec![p.zero(); p.len()];
            vector[s.b] = s.fprime.clone();
            vector[s.fb] = vector[s.fb].sub(&p.one());
            Ok(FForm { slot: s.slot, b_index: s.b, fb_index: s.fb, fprime_value: s.fprime.clone(), vector })
        })
        .collect()
}

fn uncertified(p: &FieldPresentation) -> impl Fn(linalg::Uncertified) -> Error + '_ {
    move |u| Error::RankNotCertified(format!("pivot in column {} is not certified", p.generators[u.column]))
}

/// Relation rows followed by form rows, with a label for each.
fn all_rows(p: &FieldPresentation, forms: &[FForm]) -> Result<(Vec<Vec<Scalar>>, Vec<String>)> {
    let mut rows = omega_presentation(p)?;
    let mut labels: Vec<String> = p.relations.iter().map(|r| format!("relation {}", r.render(&p.generators))).collect();
    for f in forms {
        if f.vector.len() != p.len() {
            return Err(Error::InvalidInput("form vector length differs from the generator count".into()));
        }
        rows.push(f.vector.clone());
        labels.push(format!("form slot {} at ({}, {})", f.slot, p.generators[f.b_index], p.generators[f.fb_index]));
    }
    Ok((rows, labels))
}

/// `dim Der = m − rank(relation rows ∪ form rows)`.
pub fn der_dimension(p: &FieldPresentation, forms: &[FForm]) -> Result<usize> {
    let (rows, _) = all_rows(p, forms)?;
    let r = linalg::rank(&rows, p.len()).map_err(uncertified(p))?;
    Ok(p.len() - r)
}

/// Values `∂g_j` on some of the generators.
#[derive(Clone, Debug, PartialEq)]
pub struct DerivationAssignment {
    pub values: Vec<(usize, Scalar)>,
}

impl DerivationAssignment {
    pub fn get(&self, index: usize) -> Option<&Scalar> {
        self.values.iter().find(|(i, _)| *i == index).map(|(_, v)| v)
    }

    pub fn render(&self, names: &[String]) -> String {
        self.values.iter().map(|(i, v)| format!("d{} = {}", names[*i], v.render(names))).collect::<Vec<_>>().join(", ")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Extension {
    Unique(DerivationAssignment),
    Family { dimension: usize, particular: DerivationAssignment },
    Inconsistent { row: usize, label: String },
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Row `r` applied to `x` is certified nonzero.
fn violates(row: &[Scalar], x: &[Scalar], zero: &Scalar) -> bool {
    let v = row.iter().zip(x).fold(zero.clone(), |acc, (a, b)| acc.add(&a.mul(b)));
    v.zeroness() == Zeroness::NonZero
}

/// Extends `boundary` to all generators subject to every relation and form row.
///
/// `target = (b, c)` asks for `∂b = c` when the extension is not unique. The
/// result is `Unique` when no freedom remains over the boundary, `Family`
/// with the dimension of the freedom otherwise, and `Inconsistent` naming the
/// first row that no extension can satisfy.
pub fn extend_derivation(
    p: &FieldPresentation,
    forms: &[FForm],
    boundary: &DerivationAssignment,
    target: Option<(usize, Scalar)>,
) -> Result<Extension> {
    let (rows, labels) = all_rows(p, forms)?;
    let zero = p.zero();
    let m = p.len();
    let mut fixed: Vec<Option<Scalar>> = vec![None; m];
    for (i, v) in &boundary.values {
        if *i >= m || v.mode() != p.mode {
            return Err(Error::InvalidInput("boundary value refers to a missing generator or the wrong mode".into()));
        }
        fixed[*i] = Some(v.clone());
    }
    let free: Vec<usize> = (0..m).filter(|&j| fixed[j].is_none()).collect();
    let reduced: Vec<Vec<Scalar>> = rows.iter().map(|r| free.iter().map(|&j| r[j].clone()).collect()).collect();
    let rhs: Vec<Scalar> = rows
        .iter()
        .map(|r| {
            (0..m).filter_map(|j| fixed[j].as_ref().map(|v| r[j].mul(v))).fold(zero.clone(), |acc, t| acc.sub(&t))
        })
        .collect();

    let ech = linalg::rref(&reduced, free.len()).map_err(uncertified(p))?;
    let dimension = free.len() - ech.rank();
    let mut sub_a: Vec<Vec<Scalar>> = ech.source_rows.iter().map(|&r| reduced[r].clone()).collect();
    let mut sub_b: Vec<Scalar> = ech.source_rows.iter().map(|&r| rhs[r].clone()).collect();
    if let Some((b, c)) = &target {
        match free.iter().position(|j| j == b) {
            Some(k) if dimension > 0 => {
                let mut e = vec![zero.clone(); free.len()];
                e[k] = p.one();
                sub_a.push(e);
                sub_b.push(c.clone());
            }
            Some(_) => {}
            None => {
                if fixed[*b].as_ref().is_some_and(|v| v.sub(c).zeroness() == Zeroness::NonZero) {
                    return Ok(Extension::Inconsistent { row: rows.len(), label: "target disagrees with the boundary".into() });
                }
            }
        }
    }
    let particular = match linalg::solve(&sub_a, &sub_b, free.len(), &zero).map_err(uncertified(p))? {
        Solution::Solved { particular, .. } => particular,
        Solution::Inconsistent { .. } => {
            return Ok(Extension::Inconsistent { row: rows.len(), label: "target is forced by the rows".into() });
        }
    };
    let mut x: Vec<Scalar> = fixed.iter().map(|v| v.clone().unwrap_or_else(|| zero.clone())).collect();
    for (k, &j) in free.iter().enumerate() {
        x[j] = particular[k].clone();
    }
    if let Some(r) = rows.iter().position(|row| violates(row, &x, &zero)) {
        return Ok(Extension::Inconsistent { row: r, label: labels[r].clone() });
    }
    let assignment = DerivationAssignment { values: x.into_iter().enumerate().collect() };
    Ok(if dimension == 0 { Extension::Unique(assignment) } else { Extension::Family { dimension, particular: assignment } })
}

#[derive(Clone, Debug, PartialEq)]
pub enum HclResult {
    InClosure,
    Witness(DerivationAssignment),
}

/// `b` is in the closure iff `db` lies in the span of the rows, i.e. every
/// annihilating derivation kills `b`. Otherwise returns one with `∂b = 1`.
pub fn hcl_witness(p: &FieldPresentation, forms: &[FForm], b_index: usize) -> Result<HclResult> {
    if b_index >= p.len() {
        return Err(Error::InvalidInput(format!("generator index {b_index} out of range")));
    }
    let (mut rows, _) = all_rows(p, forms)?;
    let zero = p.zero();
    let base_rank = linalg::rank(&rows, p.len()).map_err(uncertified(p))?;
    let mut e = vec![zero.clone(); p.len()];
    e[b_index] = p.one();
    rows.push(e);
    let ech = linalg::rref(&rows, p.len()).map_err(uncertified(p))?;
    if ech.rank() == base_rank {
        return Ok(HclResult::InClosure);
    }
    let mut rhs = vec![zero.clone(); rows.len()];
    rhs[rows.len() - 1] = p.one();
    let sub_a: Vec<Vec<Scalar>> = ech.source_rows.iter().map(|&r| rows[r].clone()).collect();
    let sub_b: Vec<Scalar> = ech.source_rows.iter().map(|&r| rhs[r].clone()).collect();
    match linalg::solve(&sub_a, &sub_b, p.len(), &zero).map_err(uncertified(p))? {
        Solution::Solved { particular, .. } => Ok(HclResult::Witness(DerivationAssignment { values: particular.into_iter().enumerate().collect() })),
        Solution::Inconsistent { .. } => unreachable!("independent rows are always solvable"),
    }
}
