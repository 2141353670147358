//! Cyclic cubic fields: Gaussian periods, Shanks' simplest cubics and the exact affine
//! relation between them.
//!
//! The pipeline for a conductor `f` enumerates the normalized pairs `4f = M^2 + 27N^2`
//! ([`quadform`]), builds Shanks' cubic `f_n` and the closed-form period polynomial
//! ([`cubicpoly`]), computes the periods from first principles over the index-3 subgroups of
//! `(Z/fZ)^x` ([`periods`]) and checks that everything agrees.

pub mod arith;
pub mod cli;
pub mod cubicpoly;
pub mod eisenstein;
pub mod error;
pub mod groupring;
pub mod numeric;
pub mod periods;
pub mod quadform;

pub use error::{ConductorIssue, Error, Result};
