//! Reduce a few lattices, read off their CM fields and classify pairs up to
//! isogeny and Schwarz reflection.
//!
//!     cargo run --example lattice_isogeny

use isr_workbench::lattice::{
    cm_field, is_isogenous, isr_equivalent, reduce_tau, ExactComplex, IsogenyOutcome, Lattice, DEFAULT_CM_BOUND,
};

fn lattice(tau: &str) -> Lattice {
    Lattice::from_tau(ExactComplex::parse(tau, 192).unwrap()).unwrap()
}

fn main() -> isr_workbench::Result<()> {
    for tau in ["7/3+1/5i:-1", "1/2+1/2i:-3", "0+1i:-2", "0.3141+1.2718i"] {
        let l = lattice(tau);
        let (reduced, m) = reduce_tau(&l)?;
        let cm = match cm_field(&l, DEFAULT_CM_BOUND)? {
            Some(d) => format!("Q(sqrt {d})"),
            None => "none".into(),
        };
        println!("tau = {tau:<16} reduced = {reduced}  via {m:?}  CM: {cm}");
    }

    println!();
    let pairs = [
        ("i", "0+2i:-1"),
        ("i", "3/5+2i:-1"),
        ("i", "0+1i:-2"),
        ("1/3+1i:-1", "-1/3+1i:-1"),
        ("0.25+1.5i", "0.5+3.0i"),
    ];
    for (t1, t2) in pairs {
        let (l1, l2) = (lattice(t1), lattice(t2));
        let iso = is_isogenous(&l1, &l2, 50)?;
        let isr = isr_equivalent(&l1, &l2, 50)?;
        let verdict = match &iso.outcome {
            IsogenyOutcome::Isogenous { witness, alpha } => format!("isogenous, witness {witness:?}, alpha = {alpha}"),
            IsogenyOutcome::NotIsogenous { reason } => format!("not isogenous ({reason})"),
            IsogenyOutcome::UnknownUpToBound { bound } => format!("unknown up to {bound}"),
        };
        println!("{t1} ~ {t2}: {verdict}");
        println!("    ISR-equivalent: {} (reflection used: {})", isr.verdict.is_isogenous(), isr.used_reflection);
    }
    Ok(())
}
