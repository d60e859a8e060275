//! Computable entropy-number theory for finite-dimensional sequence spaces
//! and weighted summation operators on trees.
//!
//! The crate is organised bottom-up:
//!
//! * [`spaces`]: `l_p^m` exponents, norms and certified unit-ball nets.
//! * [`entropy`]: the covering/packing entropy oracle, closed-form envelopes
//!   for identities and diagonal operators, and the bound calculus.
//! * [`tree`]: rooted trees with h-set level structure.
//! * [`partition`]: balanced partitions of bounded-branching trees.
//! * [`sumop`]: two-weighted summation operators and their norms.
//! * [`asymptotics`]: envelope evaluators, growth inversion and slope fits.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod entropy;
pub mod error;
pub mod partition;
pub mod slow;
pub mod spaces;
pub mod sumop;
pub mod tree;

pub use error::{Error, Result};
pub use spaces::{Exponent, NetPointSet, Vector};
