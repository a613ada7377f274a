//! Certified robust confidence intervals for the null location in Efron's
//! Gaussian two-groups model.
//!
//! Data flow: [`model`] generates or describes data, [`ecf`] turns samples
//! into characteristic-function values, [`pilot`] localizes the parameters
//! crudely, [`certificates`] scores location candidates, and [`ci`] assembles
//! the final interval. [`hard_instances`] builds the lower-bound priors and
//! [`harness`] runs Monte-Carlo sweeps over all of it.

pub mod certificates;
pub mod ci;
pub mod ecf;
pub mod error;
pub mod hard_instances;
pub mod harness;
pub mod model;
pub mod pilot;
pub mod quadrature;
pub mod rng;

pub use error::{Error, Result};
pub use num_complex::Complex64;
