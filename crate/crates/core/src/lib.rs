//! Exact-arithmetic Sum-of-Squares (Lasserre) certificates for symmetric
//! binary polynomial problems.
//!
//! * [`exactnum`] rational scalars and factorial combinatorics
//! * [`unipoly`] univariate polynomials, partial fractions
//! * [`moments`] full subset-indexed moment matrices and exact PSD tests
//! * [`symsos`] the symmetry-reduced criterion (weighted Hankel matrices)
//! * [`certificates`] the degree-`2d` lower-bound construction
//! * [`laurentk`] rank computations for the empty polytope `K`
//! * [`cli`] the batch front-end

pub mod certificates;
pub mod cli;
pub mod error;
pub mod exactnum;
pub mod laurentk;
pub mod moments;
pub mod symsos;
pub mod unipoly;

pub use error::{Error, Result};
pub use exactnum::Rational;
