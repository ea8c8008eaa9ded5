//! Pseudo-spectral solver for the modified KdV equation and the coupled mKdV
//! system, with the I-method modified-energy machinery and its numerical checks.

pub mod cli;
pub mod error;
pub mod experiments;
pub mod imethod;
pub mod output;
pub mod solver;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
