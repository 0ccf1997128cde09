//! Rational points of bounded height on the graph of `t ↦ exp(℘(log t))`
//! for the rectangular lattice `Z + 2iZ`, next to the identity baseline.
//!
//!     cargo run --release --example counting

use isr_workbench::counting::{count_report, default_eps, Domain, Evaluator, RationalQ, TargetFunction};
use isr_workbench::lattice::ExactComplex;

fn main() -> isr_workbench::Result<()> {
    let eps = default_eps(128);
    let id = count_report(&TargetFunction::identity(), &[2, 5, 10, 20], &eps, 128)?;
    println!("identity:");
    for r in &id.rows {
        println!("  H = {:>3}: {:>5} confirmed", r.height, r.confirmed);
    }

    let h = TargetFunction::exp_wp_log(ExactComplex::parse("0+2i:-1", 128)?, Domain::parse("(6/5, 23/10)")?);
    let report = count_report(&h, &[5, 10, 20, 40], &eps, 128)?;
    println!("\n{} on {}:", report.target, report.domain);
    for r in &report.rows {
        println!("  H = {:>3}: {} confirmed, {} undetermined, {} excluded", r.height, r.confirmed, r.undetermined, r.excluded);
    }

    let ev = Evaluator::new(&h, 128)?;
    for (num, den) in [(5, 4), (3, 2), (2, 1)] {
        let t = RationalQ::new(num, den)?;
        println!("  h({t}) = {}", ev.value(&t)?);
    }
    Ok(())
}
