//! Coverage probability and achievable-rate analysis for geographically
//! clustered cloud radio networks.
//!
//! Base stations form a Poisson point process; those inside a cluster share
//! channel state and jointly serve their users with zero-forcing dirty paper
//! coding, so only out-of-cluster BSs interfere. The crate provides:
//!
//! * [`analytic`]: stochastic-geometry lower bounds on coverage for full and
//!   partial channel state, plus the no-cooperation and ideal baselines and
//!   rate distributions derived from them.
//! * [`scaling`]: how large a cluster must be to get within a factor of the
//!   ideal coverage.
//! * [`simulator`]: Monte Carlo ground truth with explicit LQ precoding.
//! * [`harness`]: configuration files, experiment presets and report output.

pub mod analytic;
pub mod error;
pub mod harness;
pub mod model;
pub mod numerics;
pub mod scaling;
pub mod simulator;

pub use error::{Error, Result};
