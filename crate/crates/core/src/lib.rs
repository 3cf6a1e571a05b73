//! Polynomial Poisson algebras, Moyal star products and matrix quantizations
//! (fuzzy sphere, fuzzy torus, Lie-algebra representations), together with
//! numerical checks of their classical limits and the Yang–Mills type matrix model.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod error;
pub mod limits;
pub mod linalg;
pub mod model;
pub mod moyal;
pub mod pipeline;
pub mod poisson;
pub mod poly;
#[cfg(test)]
mod properties;
pub mod quantize;
pub mod reps;
pub mod span;
pub mod sphere;

pub use error::{Error, Result};
pub use linalg::Matrix;
pub use poly::{Polynomial, TorusFunction};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex<f64>;
