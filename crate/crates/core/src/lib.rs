//! Adaptive finite-time and fixed-time backstepping control of
//! strict-feedback systems, with composite RBF-network learning, smooth
//! switching to a robust law outside the network's domain, and a fixed-step
//! closed-loop simulator.
//!
//! The usual entry point is [`config::ExperimentConfig`] followed by
//! [`sim::run_experiment`]:
//!
//! ```
//! use sfctl_core::config::ExperimentConfig;
//! use sfctl_core::sim::run_experiment;
//!
//! let cfg = ExperimentConfig::parse("variant = fxt-m4\n[sim]\nhorizon = 1\nwindow_start = 0.5\nwindow_end = 1\n").unwrap();
//! let run = run_experiment(&cfg).unwrap();
//! assert!(run.metrics.rms_tracking_error.is_finite());
//! ```

pub mod approximator;
pub mod config;
pub mod controller;
pub mod error;
pub mod expr;
pub mod learning;
pub mod math;
pub mod observer;
pub mod plant;
pub mod sim;

pub use error::{Error, Result};
