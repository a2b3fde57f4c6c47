//! Distributionally constrained online binary classification.
//!
//! Exact combinatorial quantities over finite instance spaces (VC and Littlestone
//! dimensions, interaction-tree dimensions, critical-region levels, threshold
//! dimensions), learners and lower-bound adversaries, and a seeded Monte-Carlo
//! engine that estimates oblivious and adaptive regret.

pub mod adversaries;
pub mod arena;
pub mod cli;
pub mod critical;
pub mod dims;
pub mod env;
pub mod error;
pub mod learners;
pub mod model;
pub mod problem;
pub mod rational;
pub mod rng;
pub mod spec;

pub use error::{Error, Result};
pub use rational::Rational;
