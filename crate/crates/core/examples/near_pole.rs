//! Points of the curve close to the identity: direct series evaluation next
//! to the anchored `n·(exp(z/n + a) − exp(a))` route.
//!
//!     cargo run --release --example near_pole

use isr_workbench::arith::ComplexBall;
use isr_workbench::lattice::{ExactComplex, Lattice};
use isr_workbench::wp::curve::point_distance;
use isr_workbench::wp::{curve_add, curve_neg, curve_smul, exp_e, invariants, near_pole_eval};
use rug::Rational;

fn main() -> isr_workbench::Result<()> {
    let m = invariants(&Lattice::from_tau(ExactComplex::parse("i", 128)?)?, 128)?;
    let p = m.working_precision();
    let anchor = (&Rational::from((1, 4)), &Rational::from((1, 2)));
    for k in [4, 8, 16, 32] {
        let z = ComplexBall::from_rationals(&Rational::from((1, 1i64 << k)), &Rational::from((1, 3i64 << k)), p);
        let direct = exp_e(&m, &z)?;
        let anchored = near_pole_eval(&m, &z, anchor, 4)?;
        let (x, _) = anchored.affine_coords().expect("z is not a lattice point");
        println!(
            "|z| ~ 2^-{k:<2}  wp(z) ~ {:.6e}  |direct - anchored| <= {:.2e}",
            x.re.mid().to_f64(),
            point_distance(&direct, &anchored).to_f64()
        );
    }

    // 3P - 2P against P, and exp_E(3z) against 3P
    let z = ComplexBall::from_rationals(&Rational::from((2, 7)), &Rational::from((1, 5)), p);
    let pt = exp_e(&m, &z)?;
    let three = curve_smul(&m, 3, &pt)?;
    let diff = curve_add(&m, &three, &curve_neg(&curve_smul(&m, 2, &pt)?))?;
    println!("|3P - 2P - P| <= {:.2e}", point_distance(&diff, &pt).to_f64());
    println!("|exp(3z) - 3P| <= {:.2e}", point_distance(&exp_e(&m, &z.mul_i64(3))?, &three).to_f64());
    Ok(())
}
