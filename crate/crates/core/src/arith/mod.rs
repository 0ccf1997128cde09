//! Numeric and exact arithmetic shared by the other modules.

pub mod ball;
pub mod linalg;
pub mod poly;
pub mod quad;

pub use ball::{Ball, ComplexBall};
pub use quad::QuadNumber;
