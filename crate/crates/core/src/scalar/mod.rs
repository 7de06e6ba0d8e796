//! Exact scalars: rationals, polynomials in a fixed alphabet, dense matrices.

pub mod linalg;
pub mod matrix;
pub mod poly;
pub mod rational;

pub use linalg::{inverse, kernel, rank, rref, solve_exact, Solution};
pub use matrix::{Matrix, PMatrix, QMatrix, Ring};
pub use poly::{Monomial, Polynomial, Var};
pub use rational::{int, rat, Rational};
