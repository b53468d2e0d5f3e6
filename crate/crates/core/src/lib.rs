//! Chow weights of polarized toric surfaces, two ways.
//!
//! A diagonal one-parameter subgroup acting on the monomial sections of an
//! ample line bundle over a toric surface traces out a Bergman geodesic of
//! Kähler potentials. Along that geodesic the Aubin-Yau energy grows
//! linearly in `u = log(1/|t|)`, and its asymptotic slope is the stability
//! invariant this crate computes:
//!
//! * the **formula route** builds the Newton polytope of the weighted
//!   exponent data in exact rational arithmetic, enumerates its nontrivial
//!   lower faces, and assembles the slope as a lowest-weight term minus a
//!   weighted sum of convergent singular integrals attached to each face;
//! * the **oracle route** evaluates the energy itself by quadrature in
//!   logarithmic coordinates and fits the slope from samples at large `u`.
//!
//! The two routes are independent down to the quadrature kernel, so they can
//! be cross-checked against each other (see the `acceptance` test suite and
//! the `both` mode of the CLI).

pub mod cli;
pub mod diagram;
pub mod error;
pub mod functional;
pub mod polytope;
pub mod quadrature;
pub mod slope;
pub mod symbols;

mod hull;

pub use error::Error;

/// Exact rational scalar used throughout the combinatorial layers.
pub type Rat = num::BigRational;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
