//! Lattice isogeny classification, certified Weierstrass ℘ numerics, a finite
//! predimension calculus, Kähler-differential derivation spaces and a
//! rational-point counting harness.
//!
//! The modules build on each other roughly in this order:
//!
//! * [`arith`]: ball arithmetic over MPFR, quadratic fields, polynomials, elimination
//! * [`lattice`]: period lattices, reduction, CM detection, isogeny and ISR verdicts
//! * [`wp`]: invariants g₂/g₃, ℘ and ℘′, the curve group law, identity residuals
//! * [`predim`]: δ = td − grk over finite configurations, strongness, hulls, chains
//! * [`differentials`]: F-forms and derivation spaces of finite presentations
//! * [`counting`]: rational points of bounded height near `exp(g(log t))`
//!
//! [`cli`] ties everything to the `isrwb` binary.

pub mod arith;
pub mod cli;
pub mod counting;
pub mod differentials;
pub mod error;
pub mod lattice;
pub mod predim;
pub mod records;
pub mod reports;
pub mod selftest;
pub mod wp;

pub use error::{Error, Result};
