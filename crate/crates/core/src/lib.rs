//! Numerical toolkit for Poincaré constants of 1-D and finite-space
//! probability measures: spectral-gap estimation, convolution and CLT
//! traces, closed-form convolution bounds, and exact verification of
//! Shearer-type inequalities.

pub mod bounds;
pub mod calculators;
pub mod cli;
pub mod config;
pub mod convolve;
pub mod eigen;
pub mod error;
pub mod measures;
pub mod numeric;
pub mod report;
pub mod runner;
pub mod shearer;
pub mod spectral;
pub mod suites;
pub mod tasks;
pub mod transport;
pub mod zoo;

pub use error::{Error, Result};
