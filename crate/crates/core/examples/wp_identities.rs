//! Invariants of the square and hexagonal lattices, and certified defect
//! bounds for the identities satisfied by ℘.
//!
//!     cargo run --release --example wp_identities

use isr_workbench::arith::ComplexBall;
use isr_workbench::lattice::{is_isogenous, ExactComplex, Lattice};
use isr_workbench::wp::{
    addition_residual, homogeneity_residual, invariants, isogeny_residual, ode_residual, schwarz_residual,
};
use rug::Rational;

fn main() -> isr_workbench::Result<()> {
    let precision = 128;
    for tau in ["i", "1/2+1/2i:-3"] {
        let m = invariants(&Lattice::from_tau(ExactComplex::parse(tau, precision)?)?, precision)?;
        println!("tau = {tau}");
        println!("  g2 = {}", m.g2);
        println!("  g3 = {}", m.g3);
    }

    let l = Lattice::from_tau(ExactComplex::parse("1/3+5/4i:-1", precision)?)?;
    let m = invariants(&l, precision)?;
    let p = m.working_precision();
    let z1 = ComplexBall::from_rationals(&Rational::from((17, 53)), &Rational::from((11, 31)), p);
    let z2 = ComplexBall::from_rationals(&Rational::from((-2, 7)), &Rational::from((3, 5)), p);
    println!("\ndefect bounds at tau = 1/3+5/4i, precision {precision}:");
    println!("  ode          {:.3e}", ode_residual(&m, &z1)?.value.to_f64());
    let alpha = ExactComplex::parse("3/2+1/2i:-1", precision)?;
    println!("  homogeneity  {:.3e}", homogeneity_residual(&m, &alpha, &z1)?.value.to_f64());
    println!("  schwarz      {:.3e}", schwarz_residual(&m, &z1)?.value.to_f64());
    println!("  addition     {:.3e}", addition_residual(&m, &z1, &z2)?.value.to_f64());

    let l2 = Lattice::from_tau(ExactComplex::parse("2/3+5/2i:-1", precision)?)?;
    let witness = is_isogenous(&l, &l2, 20)?.witness().expect("2τ is isogenous to τ");
    let iso = isogeny_residual(&l, &l2, &witness, &z1, precision)?;
    println!("  isogeny      {:.3e} (inverse scale), {:.3e} (direct scale)", iso.inverse.value.to_f64(), iso.direct.value.to_f64());

    // a perturbed g3 no longer satisfies the differential equation
    let bad = m.perturbed(&ComplexBall::zero(p), &ComplexBall::from_rationals(&Rational::from((1, 100_000)), &Rational::new(), p));
    println!("  ode, g3 + 1e-5: {:.3e}", ode_residual(&bad, &z1)?.value.to_f64());
    Ok(())
}
