//! Casson-Gordon signature invariants of connected sums of cabled torus
//! knots, and the four-genus lower bounds they certify.

pub mod arith;
pub mod casson_gordon;
pub mod error;
pub mod knots;
pub mod linking_form;
pub mod obstruction;
pub mod poly;
pub mod rational;
pub mod search;
pub mod signatures;

pub use error::{Error, Result};
pub use knots::{build_family, GAKnot, Piece, Sign};
pub use rational::Rational;
pub use signatures::RootOfUnity;
