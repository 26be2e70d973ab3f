//! Exact superhedging prices, hedges and nonlinear expectations on finite
//! scenario trees.

pub mod emm;
pub mod error;
pub mod expectation;
pub mod fixtures;
pub mod cli;
pub mod decomp;
pub mod format;
pub mod lp;
pub mod market;
pub mod pricing;
pub mod random;
pub mod rational;

pub use error::{Error, Result};
pub use rational::Rational;
