//! Octonionic pluripotential toolkit.
//!
//! Numerical infrastructure for plurisubharmonic-type potential theory in two
//! octonionic variables: the algebra itself, forward-mode jets, Hermitian
//! Hessians and their determinants, the automorphism group of the unit ball,
//! Monte Carlo / quasi-Monte Carlo quadrature, Monge-Ampere-type measures,
//! and Perron envelopes with verification suites for all of it.

pub mod catalog;
pub mod error;
pub mod geometry;
pub mod hermitian;
pub mod jets;
pub mod octonion;
pub mod operators;
pub mod perron;
pub mod quadrature;
pub mod real;
pub mod report;
pub mod suites;

pub use error::{CoreError, Result};
