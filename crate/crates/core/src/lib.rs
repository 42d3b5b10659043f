//! Certified classification of the integers `c` admitting two representations
//! `c = F_n − 2^m`.
//!
//! The crate runs the exact search over a small exponent rectangle, evaluates
//! the linear-forms-in-logarithms bound that caps `n`, and then shrinks that
//! cap with continued-fraction (Baker–Davenport style) reductions until it
//! falls inside the searched rectangle. Every real-number decision is made
//! with outward-rounded ball arithmetic; every algebraic identity is checked
//! exactly in Q(√5).

pub mod bounds;
pub mod contfrac;
pub mod error;
pub mod pipeline;
pub mod quadfield;
pub mod realball;
pub mod reduction;
pub mod search;
pub mod sequences;

pub use error::{Error, Result};
pub use quadfield::QuadRat;
pub use realball::{BallSource, CertSign, Dyadic, RealBall};
