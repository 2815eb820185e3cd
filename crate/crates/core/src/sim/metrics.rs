//! Scalar summaries of a run.

use std::fmt;

use crate::error::{Error, Result};
use crate::sim::log::TrajectoryLog;

#[derive(Debug, Clone, PartialEq)]
pub struct RunMetrics {
    /// RMS of `ζ_1` over the window.
    pub rms_tracking_error: f64,
    /// `max|ζ_1|` over the window.
    pub max_abs_error: f64,
    /// First time after which `|ζ_1|` stays inside the band; `None` if it
    /// is outside at the end of the run.
    pub settle_time: Option<f64>,
    /// `∫u² dt` over the whole run (trapezoid rule).
    pub control_energy: f64,
    /// Fraction of the run spent with the last switch indicator below 1.
    pub switch_activity: f64,
    /// First time after which the last switch indicator stays at 1.
    pub neural_return_time: Option<f64>,
    /// `max_i max|z_iN|` over the window.
    pub max_abs_prediction_error: f64,
    pub band: f64,
    pub window: (f64, f64),
}

impl RunMetrics {
    /// Metric names in table order.
    pub const NAMES: [&'static str; 7] = [
        "rms_tracking_error",
        "max_abs_error",
        "settle_time",
        "control_energy",
        "switch_activity",
        "neural_return_time",
        "max_abs_prediction_error",
    ];

    /// Value by name; unsettled times read as `+∞` so they rank last.
    pub fn value(&self, name: &str) -> Option<f64> {
        Some(match name {
            "rms_tracking_error" => self.rms_tracking_error,
            "max_abs_error" => self.max_abs_error,
            "settle_time" => self.settle_time.unwrap_or(f64::INFINITY),
            "control_energy" => self.control_energy,
            "switch_activity" => self.switch_activity,
            "neural_return_time" => self.neural_return_time.unwrap_or(f64::INFINITY),
            "max_abs_prediction_error" => self.max_abs_prediction_error,
            _ => return None,
        })
    }

    /// Flat `key=value` block.
    pub fn to_kv(&self) -> String {
        self.to_string()
    }
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "unsettled".to_string(), |x| format!("{x}"))
}

impl fmt::Display for RunMetrics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "rms_tracking_error={}", self.rms_tracking_error)?;
        writeln!(f, "max_abs_error={}", self.max_abs_error)?;
        writeln!(f, "settle_time={}", opt(self.settle_time))?;
        writeln!(f, "control_energy={}", self.control_energy)?;
        writeln!(f, "switch_activity={}", self.switch_activity)?;
        writeln!(f, "neural_return_time={}", opt(self.neural_return_time))?;
        writeln!(f, "max_abs_prediction_error={}", self.max_abs_prediction_error)?;
        writeln!(f, "band={}", self.band)?;
        writeln!(f, "window_start={}", self.window.0)?;
        writeln!(f, "window_end={}", self.window.1)
    }
}

/// Last time after which `inside` holds for every remaining sample.
fn entry_time(t: &[f64], inside: impl Fn(usize) -> bool) -> Option<f64> {
    match (0..t.len()).rev().find(|&k| !inside(k)) {
        None => t.first().copied(),
        Some(k) if k + 1 < t.len() => Some(t[k + 1]),
        Some(_) => None,
    }
}

/// Needs columns `t` and `zeta1`; uses `u`, the highest-numbered `w<i>`, and
/// every `z<i>N` column when present.
pub fn compute_metrics(log: &TrajectoryLog, band: f64, window: (f64, f64)) -> Result<RunMetrics> {
    let t = log.times();
    let zeta = log
        .column("zeta1")
        .ok_or_else(|| Error::Mismatch("log has no `zeta1` column".into()))?;
    let (t0, t1) = window;
    let slack = 1e-9 * t1.abs().max(1.0);
    let in_window: Vec<usize> = (0..t.len()).filter(|&k| t[k] >= t0 - slack && t[k] <= t1 + slack).collect();
    if in_window.is_empty() || !(t0 <= t1) {
        return Err(Error::EmptyWindow(t0, t1));
    }

    let m = in_window.len() as f64;
    let rms_tracking_error = (in_window.iter().map(|&k| zeta[k] * zeta[k]).sum::<f64>() / m).sqrt();
    let max_abs_error = in_window.iter().map(|&k| zeta[k].abs()).fold(0.0, f64::max);
    let settle_time = entry_time(&t, |k| zeta[k].abs() <= band);

    let control_energy = log.column("u").map_or(0.0, |u| {
        t.windows(2)
            .zip(u.windows(2))
            .map(|(tt, uu)| 0.5 * (tt[1] - tt[0]) * (uu[0] * uu[0] + uu[1] * uu[1]))
            .sum()
    });

    let last_w = (1..)
        .map(|i| format!("w{i}"))
        .take_while(|name| log.column_index(name).is_some())
        .last();
    let (switch_activity, neural_return_time) = match last_w.and_then(|name| log.column(&name)) {
        None => (0.0, t.first().copied()),
        Some(w) => {
            let span = t.last().unwrap_or(&0.0) - t.first().unwrap_or(&0.0);
            let off: f64 = t.windows(2).enumerate().filter(|(k, _)| w[*k] < 1.0).map(|(_, tt)| tt[1] - tt[0]).sum();
            let activity = if span > 0.0 { off / span } else if w.first().is_some_and(|&x| x < 1.0) { 1.0 } else { 0.0 };
            (activity, entry_time(&t, |k| w[k] >= 1.0))
        }
    };

    let mut max_abs_prediction_error = 0.0f64;
    for i in 1.. {
        let Some(z) = log.column(&format!("z{i}N")) else { break };
        for &k in &in_window {
            max_abs_prediction_error = max_abs_prediction_error.max(z[k].abs());
        }
    }

    Ok(RunMetrics {
        rms_tracking_error,
        max_abs_error,
        settle_time,
        control_energy,
        switch_activity,
        neural_return_time,
        max_abs_prediction_error,
        band,
        window,
    })
}
