//! Weak subordination of multivariate Brownian motion by ray-and-atom
//! subordinators: characteristic exponents, Lévy densities, moments,
//! path samplers and a statistical validation harness.

pub mod charfn;
pub mod cli;
pub mod error;
pub mod levy_core;
pub mod levy_measure;
pub mod linalg;
pub mod moments;
pub mod quad;
pub mod simulate;
pub mod spec_doc;
pub mod special;
pub mod validate;

pub use error::{Error, Result};
