//! Simulation and optimization lab for generalized principal-agent games
//! (persuasion, Stackelberg commitment, contract design) played against
//! learning agents.
//!
//! The crate computes exact static objectives at desk scale (Stackelberg
//! values, inducibility gaps, approximate-best-response objectives) and
//! runs repeated-game experiments that measure realized regrets against
//! the corresponding utility bounds.

pub mod error;
pub mod game;
#[cfg(test)]
pub(crate) mod testutil;
pub mod instances;
pub mod lp;
pub mod rng;
pub mod solve;
pub mod space;

pub use error::{Error, Result};
