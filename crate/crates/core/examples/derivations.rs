//! Derivation spaces of generic and numerically specialized presentations.
//!
//!     cargo run --example derivations

use isr_workbench::arith::poly::RatFunc;
use isr_workbench::differentials::{
    der_dimension, extend_derivation, f_forms, hcl_witness, DerivationAssignment, Extension, FieldPresentation,
    FormSpec, HclResult, Scalar,
};
use isr_workbench::records::{parse_file, presentation_from_record};
use rug::Rational;

fn show(p: &FieldPresentation, e: &Extension) -> String {
    match e {
        Extension::Unique(a) => format!("unique: {}", a.render(&p.generators)),
        Extension::Family { dimension, particular } => {
            format!("family of dimension {dimension}, e.g. {}", particular.render(&p.generators))
        }
        Extension::Inconsistent { row, label } => format!("inconsistent at row {row} ({label})"),
    }
}

fn main() -> isr_workbench::Result<()> {
    // two exp points (a, e^a), (b, e^b) with everything generic
    let names: Vec<String> = ["a", "ea", "b", "eb"].map(String::from).to_vec();
    let p = FieldPresentation::generic(names);
    let specs = [
        FormSpec { slot: 0, b: 0, fb: 1, fprime: Scalar::Exact(RatFunc::var(1)) },
        FormSpec { slot: 0, b: 2, fb: 3, fprime: Scalar::Exact(RatFunc::var(3)) },
    ];
    let forms = f_forms(&p, &specs)?;
    println!("generic: dim Der = {}", der_dimension(&p, &forms)?);

    let one = Scalar::Exact(RatFunc::constant(Rational::from(1)));
    let boundary = DerivationAssignment { values: vec![(0, one.clone())] };
    println!("  extend da = 1:           {}", show(&p, &extend_derivation(&p, &forms, &boundary, None)?));
    let both = DerivationAssignment { values: vec![(0, one.clone()), (2, one.clone())] };
    println!("  extend da = db = 1:      {}", show(&p, &extend_derivation(&p, &forms, &both, None)?));
    let target = Some((2, one));
    println!("  extend da = 1, db -> 1:  {}", show(&p, &extend_derivation(&p, &forms, &boundary, target)?));
    for b in 0..p.len() {
        let r = match hcl_witness(&p, &forms, b)? {
            HclResult::InClosure => "in closure".to_string(),
            HclResult::Witness(w) => format!("witness {}", w.render(&p.generators)),
        };
        println!("  hcl {}: {r}", p.generators[b]);
    }

    // b = 2a specialized at a point; the rank is certified with balls
    let text = r#"{
        "coordinates": ["a", "ea", "b", "eb"],
        "mode": "numeric_point",
        "relations": ["b - 2*a"],
        "point": ["3/10", "1.3498588075760031040", "3/5", "1.8221188003905089749"],
        "slots": [{"kind": "exp"}],
        "points": [{"slot": 0, "b": "a", "e": "ea"}, {"slot": 0, "b": "b", "e": "eb"}]
    }"#;
    let (p, specs) = presentation_from_record(&parse_file(text)?, 128)?;
    let forms = f_forms(&p, &specs)?;
    println!("\nnumeric: dim Der = {}", der_dimension(&p, &forms)?);
    let boundary = DerivationAssignment { values: vec![(0, p.one())] };
    println!("  extend da = 1: {}", show(&p, &extend_derivation(&p, &forms, &boundary, None)?));
    Ok(())
}
