//! Closed-loop simulation: integration, logging, metrics and batch runs.

pub mod batch;
pub mod experiment;
pub mod integrator;
pub mod log;
pub mod metrics;
pub mod state;

pub use batch::{compare_runs, run_batch, run_batch_sequential, sweep, Comparison, RunOutcome, SweepResult};
#[cfg(feature = "parallel")]
pub use batch::run_batch_parallel;
pub use experiment::{run_experiment, RunFailure, RunResult};
pub use integrator::{rk4_step, Rk4};
pub use log::TrajectoryLog;
pub use metrics::{compute_metrics, RunMetrics};
pub use state::{StateLayout, SystemState};
