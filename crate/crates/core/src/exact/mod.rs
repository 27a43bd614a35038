//! Exact arithmetic substrate: rationals, dense matrices, polynomials, truncated series.

pub mod matrix;
pub mod poly;
pub mod rational;
pub mod series;

pub use matrix::RationalMatrix;
pub use poly::Polynomial;
pub use rational::Rational;
pub use series::LaurentSeries;
