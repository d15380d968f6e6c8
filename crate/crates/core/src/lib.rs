//! Discrete potential theory on finite harmonic spaces: Dirichlet problems,
//! balayage, Green and Martin kernels, harmonic measure, capacity, Wiener
//! series and polar sets, with Monte Carlo and linear-programming oracles.

pub mod balayage;
pub mod cli;
pub mod dirichlet;
pub mod error;
pub mod linalg;
pub mod martin;
pub mod mc;
pub mod measure;
pub mod polar;
pub mod space;

pub use error::{Error, Result};
