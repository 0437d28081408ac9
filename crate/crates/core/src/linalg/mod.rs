//! Exact rational linear algebra: inverses, kernels, minors, Vandermonde determinants and
//! Cramer solves. No floating point is used anywhere in the crate.

mod matrix;
mod rational;

pub use matrix::{vandermonde_det, RationalMatrix};
pub use rational::{q, qq, Rational};
