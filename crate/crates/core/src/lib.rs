//! Tetrahedral-symmetric steady states of the 2D Euler equations on the unit
//! sphere and their formal stability in the Energy-Casimir sense.

pub mod bifurcation;
pub mod checks;
pub mod convergence;
pub mod error;
pub mod linalg;
pub mod models;
pub mod report;
pub mod space;
pub mod sphere;
pub mod stability;
pub mod symmetry;

pub use error::{Error, Result};
