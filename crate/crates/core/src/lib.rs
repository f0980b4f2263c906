//! Simulation and consensus certification for Hegselmann-Krause opinion dynamics with
//! time-variable pointwise and distributed delays.
//!
//! ```
//! use hkdelay::analysis::build_certificate;
//! use hkdelay::model::{DelaySpec, InfluenceSpec, InitialHistory, ScalarFn, Scenario};
//! use hkdelay::solver::{integrate, SolverParams};
//!
//! let scenario = Scenario::new(
//!     4.0,
//!     DelaySpec::pointwise(1.0, ScalarFn::constant(0.5)),
//!     InfluenceSpec::constant(1.0)?,
//!     InitialHistory::constant(1.0, vec![vec![1.0], vec![0.0]])?,
//!     SolverParams::with_step(1.0 / 64.0),
//! )?;
//! let trajectory = integrate(&scenario)?;
//! let certificate = build_certificate(&trajectory, &scenario)?;
//! assert!(certificate.passed());
//! # Ok::<(), hkdelay::Error>(())
//! ```

// `!(x > 0.0)` is used on purpose so that NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod cli;
pub mod error;
pub mod meanfield;
pub mod model;
pub mod solver;

pub use error::{Error, Result};
