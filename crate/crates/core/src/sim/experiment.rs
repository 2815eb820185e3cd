//! One closed-loop run from a resolved configuration.

use std::fmt;

use log::{debug, info};

use crate::config::ExperimentConfig;
use crate::controller::ControlOutput;
use crate::error::Error;
use crate::sim::integrator::Rk4;
use crate::sim::log::TrajectoryLog;
use crate::sim::metrics::{compute_metrics, RunMetrics};
use crate::sim::state::{StateLayout, SystemState};

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    /// Decimated log with the resolved configuration as its header.
    pub log: TrajectoryLog,
    /// Computed on the dense integration grid.
    pub metrics: RunMetrics,
}

/// A run that could not finish; `partial` holds everything logged before the
/// failure (empty when the configuration itself was rejected).
#[derive(Debug, Clone, PartialEq)]
pub struct RunFailure {
    pub error: Error,
    pub partial: TrajectoryLog,
}

impl fmt::Display for RunFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({} samples logged)", self.error, self.partial.len())
    }
}

impl std::error::Error for RunFailure {}

/// Column names of a run log for `layout`.
pub fn log_columns(layout: &StateLayout) -> Vec<String> {
    let n = layout.order();
    let idx = |p: &'static str| (1..=n).map(move |i| format!("{p}{i}"));
    let mut c = vec!["t".to_string()];
    c.extend(idx("rho"));
    c.push("zeta1".into());
    c.extend(idx("lambda"));
    c.extend(idx("sigma"));
    c.extend(idx("w"));
    c.push("u".into());
    c.extend((0..layout.theta_len()).map(|k| layout.theta_name(k)));
    c.extend(idx("tau_hat"));
    c.extend(idx("d_hat"));
    c.extend(idx("tau_hat_N"));
    c.extend(idx("d_hat_N"));
    c.extend((1..=n).map(|i| format!("z{i}N")));
    c
}

fn log_row(x: &SystemState, out: &ControlOutput) -> Vec<f64> {
    let mut r = Vec::with_capacity(64);
    r.push(x.t);
    r.extend_from_slice(x.rho());
    r.push(out.zeta[0]);
    r.extend_from_slice(&out.lambda);
    r.extend_from_slice(x.sigma());
    r.extend_from_slice(&out.w);
    r.push(out.u);
    r.extend_from_slice(x.theta());
    r.extend_from_slice(x.tau_hat());
    r.extend_from_slice(x.d_hat());
    r.extend_from_slice(x.tau_hat_n());
    r.extend_from_slice(x.d_hat_n());
    r.extend_from_slice(&out.z);
    r
}

/// Integrates the closed loop over the configured horizon.
///
/// Deterministic: identical configs give bit-identical logs.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunResult, RunFailure> {
    let v = cfg.variant;
    let layout = StateLayout::new(cfg.order(), v.is_shared(), v.neural_form);
    let mut dense = TrajectoryLog::new(log_columns(&layout));
    dense.set_header(&cfg.echo_header());
    let fail = |error: Error, dense: &TrajectoryLog| RunFailure { error, partial: dense.decimated(cfg.sim.decimation) };

    let controller = match cfg.controller() {
        Ok(c) => c,
        Err(e) => return Err(fail(e, &dense)),
    };
    let plant = &cfg.plant;

    let mut x = SystemState::zeros(layout);
    x.rho_mut().copy_from_slice(&cfg.initial);
    x.rho_hat_mut().copy_from_slice(&cfg.initial);
    if let Err(e) = controller.initialize_filters(&mut x, cfg.reference.sample(0.0), plant) {
        return Err(fail(e, &dense));
    }

    let dt = cfg.sim.dt;
    let steps = (cfg.sim.horizon / dt).round() as usize;
    info!("running {} ({}) for {steps} steps at dt = {dt}", cfg.name, v.label());

    let mut rk = Rk4::new(layout.len());
    let mut xs = SystemState::zeros(layout);
    let mut dxs = SystemState::zeros(layout);
    let names = |k: usize| layout.component_name(k);

    // Evaluates the full closed-loop rate at (t, y); logs stage-0 samples.
    let mut rhs = |record: bool, t: f64, y: &[f64], dy: &mut [f64], dense: &mut TrajectoryLog| -> Result<(), Error> {
        xs.t = t;
        xs.as_mut_slice().copy_from_slice(y);
        let out = controller.evaluate(&xs, cfg.reference.sample(t), plant, &mut dxs)?;
        if !out.u.is_finite() {
            return Err(Error::NonFinite { signal: "u".into(), t });
        }
        plant.rhs(xs.rho(), out.u, t, dxs.rho_mut());
        if let Some(k) = dxs.as_slice().iter().position(|d| !d.is_finite()) {
            return Err(Error::NonFinite { signal: format!("d{}/dt", layout.component_name(k)), t });
        }
        dy.copy_from_slice(dxs.as_slice());
        if record {
            dense.push(log_row(&xs, &out))?;
        }
        Ok(())
    };

    for k in 0..steps {
        let t = k as f64 * dt;
        let res = rk.step(t, x.as_mut_slice(), dt, |stage, t, y, dy| rhs(stage == 0, t, y, dy, &mut dense), names);
        if let Err(e) = res {
            debug!("{}: stopped at t = {t}: {e}", cfg.name);
            return Err(fail(e, &dense));
        }
        x.t = (k + 1) as f64 * dt;
    }
    let mut scratch = vec![0.0; layout.len()];
    let y = x.as_slice().to_vec();
    if let Err(e) = rhs(true, x.t, &y, &mut scratch, &mut dense) {
        return Err(fail(e, &dense));
    }

    let metrics = match compute_metrics(&dense, cfg.sim.band, cfg.sim.window) {
        Ok(m) => m,
        Err(e) => return Err(fail(e, &dense)),
    };
    debug!("{}: rms = {:e}, settle = {:?}", cfg.name, metrics.rms_tracking_error, metrics.settle_time);
    Ok(RunResult { log: dense.decimated(cfg.sim.decimation), metrics })
}
