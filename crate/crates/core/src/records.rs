//! Structured text records: lattices, enclosures, configuration and
//! presentation files, and the text/record rendering of reports.

use std::path::Path;

use rug::float::Round;
use rug::Float;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::arith::ball::{float_to_string, Ball, ComplexBall, RAD_PREC};
use crate::arith::poly::{parse_poly, Poly, RatFunc};
use crate::arith::quad::{parse_quad, parse_rational, rational_string, QuadNumber};
use crate::differentials::{FieldPresentation, FormSpec, Mode, Scalar};
use crate::error::{Error, Result};
use crate::lattice::{ExactComplex, IntMatrix, Lattice};
use crate::predim::{CoordSet, Configuration, FunctionSlot, GroupPoint, SlotKind, SlotRelations};

/// `mid ± rad` with decimal strings that round-trip exactly.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BallRecord {
    pub mid: String,
    pub rad: String,
    pub prec: u32,
}

impl BallRecord {
    pub fn from_ball(b: &Ball) -> Self {
        BallRecord {
            mid: float_to_string(b.mid(), None, Round::Nearest),
            rad: float_to_string(b.rad(), None, Round::Up),
            prec: b.prec(),
        }
    }

    pub fn to_ball(&self) -> Result<Ball> {
        let parse = |s: &str, prec: u32| -> Result<Float> {
            let p = Float::parse(s).map_err(|e| Error::Parse(format!("bad decimal {s:?}: {e}")))?;
            Ok(Float::with_val(prec, p))
        };
        Ok(Ball::with_radius(parse(&self.mid, self.prec)?, &parse(&self.rad, RAD_PREC)?))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexRecord {
    pub re: BallRecord,
    pub im: BallRecord,
}

impl ComplexRecord {
    pub fn from_ball(b: &ComplexBall) -> Self {
        ComplexRecord { re: BallRecord::from_ball(&b.re), im: BallRecord::from_ball(&b.im) }
    }

    pub fn to_ball(&self) -> Result<ComplexBall> {
        Ok(ComplexBall::new(self.re.to_ball()?, self.im.to_ball()?))
    }
}

/// An exact value as `"p+qi:d"` or an enclosure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ValueRecord {
    Quad(String),
    Num(ComplexRecord),
}

impl ValueRecord {
    pub fn from_value(v: &ExactComplex) -> Self {
        match v {
            ExactComplex::Quad(q) => ValueRecord::Quad(q.to_string()),
            ExactComplex::Numeric(b) => ValueRecord::Num(ComplexRecord::from_ball(b)),
        }
    }

    pub fn to_value(&self) -> Result<ExactComplex> {
        match self {
            ValueRecord::Quad(s) => ExactComplex::quad(parse_quad(s)?),
            ValueRecord::Num(c) => Ok(ExactComplex::Numeric(c.to_ball()?)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeRecord {
    pub rep: String,
    pub omega1: ValueRecord,
    pub omega2: ValueRecord,
    pub tau: ValueRecord,
    pub basis_change: IntMatrix,
}

impl LatticeRecord {
    pub fn from_lattice(l: &Lattice) -> Self {
        LatticeRecord {
            rep: if l.is_exact() { "quad" } else { "num" }.into(),
            omega1: ValueRecord::from_value(&l.omega1),
            omega2: ValueRecord::from_value(&l.omega2),
            tau: ValueRecord::from_value(&l.tau),
            basis_change: l.basis_change,
        }
    }

    /// Rebuilds the lattice exactly as recorded (no renormalization).
    pub fn to_lattice(&self) -> Result<Lattice> {
        Ok(Lattice {
            omega1: self.omega1.to_value()?,
            omega2: self.omega2.to_value()?,
            tau: self.tau.to_value()?,
            basis_change: self.basis_change,
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatroidRecord {
    pub rows: usize,
    pub entries: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlotRecord {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointRecord {
    pub slot: usize,
    pub b: String,
    pub e: String,
    /// `f′(b)`: a polynomial in the generators (generic) or a decimal (numeric).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fprime: Option<String>,
}

/// Either slot relations `[[x, y], …]` rows meaning `x + y√d`, or a
/// polynomial relation among generators of a presentation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RelationRecord {
    Slot { slot: usize, rows: Vec<Vec<[String; 2]>> },
    Polynomial(String),
}

/// The shared configuration / presentation file.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileRecord {
    pub coordinates: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matroid: Option<MatroidRecord>,
    #[serde(default)]
    pub slots: Vec<SlotRecord>,
    #[serde(default)]
    pub points: Vec<PointRecord>,
    #[serde(default)]
    pub relations: Vec<RelationRecord>,
    #[serde(default)]
    pub base: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub td: Option<usize>,
}

pub fn read_file(path: &Path) -> Result<FileRecord> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::File(format!("{}: {e}", path.display())))?;
    parse_file(&text)
}

pub fn parse_file(text: &str) -> Result<FileRecord> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("configuration: {e}")))
}

fn coord(names: &[String], name: &str, field: &str) -> Result<usize> {
    names.iter().position(|n| n == name).ok_or_else(|| Error::Parse(format!("{field}: unknown coordinate {name:?}")))
}

fn slot_kind(r: &SlotRecord, i: usize) -> Result<SlotKind> {
    match r.kind.as_str() {
        "exp" => Ok(SlotKind::Exp),
        "wp_cm" => r.d.map(SlotKind::WpCM).ok_or_else(|| Error::Parse(format!("slots[{i}].d is required for wp_cm"))),
        "wp_generic" | "wp" => Ok(SlotKind::WpGeneric(r.label.clone().unwrap_or_else(|| i.to_string()))),
        other => Err(Error::Parse(format!("slots[{i}].kind: unknown kind {other:?}"))),
    }
}

pub fn config_from_record(r: &FileRecord) -> Result<Configuration> {
    let names = &r.coordinates;
    let matroid = match &r.matroid {
        None => Configuration::free_matroid(names.len()),
        Some(m) => {
            if m.entries.len() != m.rows {
                return Err(Error::Parse(format!("matroid.rows is {} but {} rows are given", m.rows, m.entries.len())));
            }
            m.entries
                .iter()
                .map(|row| row.iter().map(|x| parse_rational(x)).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()
                .map_err(|e| Error::Parse(format!("matroid.entries: {e}")))?
        }
    };
    let slots = r
        .slots
        .iter()
        .enumerate()
        .map(|(i, s)| Ok(FunctionSlot { index: i, kind: slot_kind(s, i)? }))
        .collect::<Result<Vec<_>>>()?;
    let points = r
        .points
        .iter()
        .enumerate()
        .map(|(k, p)| {
            let field = format!("points[{k}]");
            Ok(GroupPoint { slot: p.slot, b: coord(names, &p.b, &field)?, e: coord(names, &p.e, &field)? })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut relations = Vec::new();
    for (k, rel) in r.relations.iter().enumerate() {
        let RelationRecord::Slot { slot, rows } = rel else { continue };
        let d = match slots.get(*slot).map(|s| &s.kind) {
            Some(SlotKind::WpCM(d)) => *d,
            Some(_) => 1,
            None => return Err(Error::Parse(format!("relations[{k}].slot: no slot {slot}"))),
        };
        let rows = rows
            .iter()
            .map(|row| {
                row.iter()
                    .map(|[x, y]| {
                        let (x, y) = (parse_rational(x)?, parse_rational(y)?);
                        if y != 0 && d == 1 {
                            return Err(Error::Parse(format!("relations[{k}]: irrational entry for a slot over Q")));
                        }
                        if y == 0 {
                            Ok(QuadNumber::rational(x))
                        } else {
                            QuadNumber::new(x, y, d)
                        }
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        relations.push(SlotRelations { slot: *slot, rows });
    }
    let mut base: CoordSet = 0;
    for b in &r.base {
        base |= 1 << coord(names, b, "base")?;
    }
    Ok(Configuration::new(names.clone(), matroid, slots, points, relations, base))
}

pub fn config_record(cfg: &Configuration) -> FileRecord {
    let slots = cfg
        .slots
        .iter()
        .map(|s| match &s.kind {
            SlotKind::Exp => SlotRecord { kind: "exp".into(), d: None, label: None },
            SlotKind::WpCM(d) => SlotRecord { kind: "wp_cm".into(), d: Some(*d), label: None },
            SlotKind::WpGeneric(l) => SlotRecord { kind: "wp_generic".into(), d: None, label: Some(l.clone()) },
        })
        .collect();
    let points = cfg
        .points
        .iter()
        .map(|p| PointRecord {
            slot: p.slot,
            b: cfg.coordinates[p.b].clone(),
            e: cfg.coordinates[p.e].clone(),
            fprime: None,
        })
        .collect();
    let relations = cfg
        .relations
        .iter()
        .map(|r| RelationRecord::Slot {
            slot: r.slot,
            rows: r
                .rows
                .iter()
                .map(|row| row.iter().map(|q| [rational_string(&q.a), rational_string(&q.b)]).collect())
                .collect(),
        })
        .collect();
    FileRecord {
        coordinates: cfg.coordinates.clone(),
        matroid: Some(MatroidRecord {
            rows: cfg.matroid.len(),
            entries: cfg.matroid.iter().map(|row| row.iter().map(rational_string).collect()).collect(),
        }),
        slots,
        points,
        relations,
        base: cfg.names(cfg.base),
        ..FileRecord::default()
    }
}

/// A presentation and the forms of its points.
pub fn presentation_from_record(r: &FileRecord, precision: u32) -> Result<(FieldPresentation, Vec<FormSpec>)> {
    let names = r.coordinates.clone();
    let mode = match r.mode.as_deref() {
        None | Some("generic") => Mode::Generic,
        Some("numeric_point" | "numeric") => Mode::NumericPoint,
        Some(other) => return Err(Error::Parse(format!("mode: unknown mode {other:?}"))),
    };
    let mut resolve = |n: &str| coord(&names, n, "relations");
    let polys: Vec<Poly> = r
        .relations
        .iter()
        .filter_map(|rel| match rel {
            RelationRecord::Polynomial(s) => Some(parse_poly(s, &mut resolve)),
            RelationRecord::Slot { .. } => None,
        })
        .collect::<Result<_>>()?;
    let mut p = match mode {
        Mode::Generic => {
            if !polys.is_empty() {
                return Err(Error::Parse("relations: generic presentations carry no polynomial relations".into()));
            }
            FieldPresentation::generic(names.clone())
        }
        Mode::NumericPoint => {
            let values = r.point.as_ref().ok_or_else(|| Error::Parse("point: required in numeric_point mode".into()))?;
            let point = values
                .iter()
                .map(|v| Ok(crate::lattice::parse_value(v, precision)?.to_ball(precision)))
                .collect::<Result<Vec<_>>>()
                .map_err(|e| Error::Parse(format!("point: {e}")))?;
            FieldPresentation::numeric(names.clone(), polys, point, precision)
        }
    };
    p.claimed_td = r.td;
    let kinds: Vec<SlotKind> = r.slots.iter().enumerate().map(|(i, s)| slot_kind(s, i)).collect::<Result<_>>()?;
    let mut specs = Vec::new();
    for (k, pt) in r.points.iter().enumerate() {
        let field = format!("points[{k}]");
        let b = coord(&names, &pt.b, &field)?;
        let e = coord(&names, &pt.e, &field)?;
        let kind = kinds.get(pt.slot).ok_or_else(|| Error::Parse(format!("{field}.slot: no slot {}", pt.slot)))?;
        let fprime = match (mode, &pt.fprime) {
            (Mode::Generic, Some(s)) => {
                let mut res = |n: &str| coord(&names, n, &field);
                Scalar::Exact(RatFunc::from_poly(parse_poly(s, &mut res)?))
            }
            (Mode::Generic, None) if *kind == SlotKind::Exp => Scalar::Exact(RatFunc::var(e)),
            (Mode::NumericPoint, Some(s)) => Scalar::Numeric(crate::lattice::parse_value(s, precision)?.to_ball(precision)),
            (Mode::NumericPoint, None) if *kind == SlotKind::Exp => Scalar::Numeric(p.point[e].clone()),
            _ => return Err(Error::Parse(format!("{field}.fprime: required for a ℘ slot"))),
        };
        specs.push(FormSpec { slot: pt.slot, b, fb: e, fprime });
    }
    Ok((p, specs))
}

/// Renders a record either as pretty JSON or as `key: value` lines.
pub fn render<T: Serialize>(value: &T, record: bool) -> String {
    let v = serde_json::to_value(value).expect("records serialize");
    if record {
        let mut s = serde_json::to_string_pretty(&v).expect("records serialize");
        s.push('\n');
        return s;
    }
    let mut out = String::new();
    flatten("", &v, &mut out);
    out
}

fn flatten(prefix: &str, v: &Value, out: &mut String) {
    match v {
        Value::Object(map) if !map.is_empty() => {
            for (k, x) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, x, out);
            }
        }
        Value::Array(items) if items.iter().any(|x| x.is_object() || x.is_array()) => {
            for (i, x) in items.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), x, out);
            }
        }
        Value::String(s) => out.push_str(&format!("{prefix}: {s}\n")),
        other => out.push_str(&format!("{prefix}: {other}\n")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_round_trip() {
        let b = Ball::pi(128).mul(&Ball::from_i64(3, 128)).inflate(&Float::with_val(64, 1e-30));
        let r = BallRecord::from_ball(&b);
        assert_eq!(r.to_ball().unwrap(), b);
    }

    #[test]
    fn lattice_round_trip() {
        for tau in ["1/3+5/4i:-1", "0.3+1.7i"] {
            let l = Lattice::from_tau(ExactComplex::parse(tau, 128).unwrap()).unwrap();
            let rec = LatticeRecord::from_lattice(&l);
            let text = serde_json::to_string(&rec).unwrap();
            let back: LatticeRecord = serde_json::from_str(&text).unwrap();
            assert_eq!(back, rec);
            assert_eq!(back.to_lattice().unwrap(), l);
        }
    }

    #[test]
    fn config_round_trip() {
        let text = r#"{"coordinates": ["x", "px", "y", "py"],
            "slots": [{"kind": "wp_cm", "d": -1}],
            "points": [{"slot": 0, "b": "x", "e": "px"}, {"slot": 0, "b": "y", "e": "py"}],
            "relations": [{"slot": 0, "rows": [[["0", "1"], ["-1", "0"]]]}],
            "base": []}"#;
        let cfg = config_from_record(&parse_file(text).unwrap()).unwrap();
        assert_eq!(cfg.grk(0, cfg.all(), 0), 1);
        let again = config_from_record(&config_record(&cfg)).unwrap();
        assert_eq!(again, cfg);
    }

    #[test]
    fn text_rendering_flattens() {
        #[derive(Serialize)]
        struct R {
            a: u32,
            b: Vec<u32>,
        }
        assert_eq!(render(&R { a: 1, b: vec![2, 3] }, false), "a: 1\nb: [2,3]\n");
    }
}
