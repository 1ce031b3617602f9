//! Gaussian expectation problems solved three ways: exact Wick/hafnian
//! reduction, simulated Gaussian-boson-sampling estimators (importance and
//! probability flavors), and a plain Monte Carlo baseline, together with
//! the truncated-polylog machinery that certifies guaranteed sample sizes
//! and exponential GBS-over-MC speedups.
//!
//! The `examples/` directory has one runnable example per capability; the
//! `gbsgauss` binary exposes the same surface as subcommands.

pub mod bounds;
pub mod cli;
pub mod eigen;
pub mod error;
pub mod estimators;
pub mod families;
pub mod gbs;
pub mod hafnian;
pub mod index;
pub mod logdomain;
pub mod matrix;
pub mod problem;

pub use error::{Error, Result};
pub use index::{degree_profile, enumerate_indices, DegreeProfile, MultiIndex};
pub use matrix::SymMatrix;
