//! Independent runs in bulk: comparisons and parameter sweeps.
//!
//! Runs share only immutable configs, so with the `parallel` feature they
//! are spread over the rayon pool; without it they run in order. Results
//! are identical either way.

use std::fmt::Write as _;

use crate::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::sim::experiment::{run_experiment, RunFailure, RunResult};
use crate::sim::metrics::RunMetrics;

pub type RunOutcome = std::result::Result<RunResult, RunFailure>;

/// Runs every config one after another.
pub fn run_batch_sequential(configs: &[ExperimentConfig]) -> Vec<RunOutcome> {
    configs.iter().map(run_experiment).collect()
}

/// Runs every config on the rayon pool; output order follows input order.
#[cfg(feature = "parallel")]
pub fn run_batch_parallel(configs: &[ExperimentConfig]) -> Vec<RunOutcome> {
    use rayon::prelude::*;
    configs.par_iter().map(run_experiment).collect()
}

/// Parallel when the `parallel` feature is on, sequential otherwise.
pub fn run_batch(configs: &[ExperimentConfig]) -> Vec<RunOutcome> {
    #[cfg(feature = "parallel")]
    {
        run_batch_parallel(configs)
    }
    #[cfg(not(feature = "parallel"))]
    {
        run_batch_sequential(configs)
    }
}

/// Metrics of several runs side by side.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub names: Vec<String>,
    pub outcomes: Vec<RunOutcome>,
}

impl Comparison {
    pub fn metrics(&self, k: usize) -> Option<&RunMetrics> {
        self.outcomes[k].as_ref().ok().map(|r| &r.metrics)
    }

    /// Indices of successful runs ordered best-first (smaller is better) on
    /// metric `name`.
    pub fn ranking(&self, name: &str) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.names.len()).filter(|&k| self.metrics(k).is_some()).collect();
        idx.sort_by(|&a, &b| {
            let va = self.metrics(a).and_then(|m| m.value(name)).unwrap_or(f64::INFINITY);
            let vb = self.metrics(b).and_then(|m| m.value(name)).unwrap_or(f64::INFINITY);
            va.total_cmp(&vb)
        });
        idx
    }

    /// Aligned text table: one row per run, then one ranking line per
    /// metric.
    pub fn table(&self) -> String {
        let mut out = String::new();
        let w = self.names.iter().map(|n| n.len()).max().unwrap_or(3).max(3);
        let _ = write!(out, "{:<w$}", "run");
        for m in RunMetrics::NAMES {
            let _ = write!(out, "  {m:>24}");
        }
        out.push('\n');
        for (k, name) in self.names.iter().enumerate() {
            let _ = write!(out, "{name:<w$}");
            match &self.outcomes[k] {
                Ok(r) => {
                    for m in RunMetrics::NAMES {
                        let v = r.metrics.value(m).unwrap_or(f64::NAN);
                        if v.is_finite() {
                            let _ = write!(out, "  {v:>24.6e}");
                        } else {
                            let _ = write!(out, "  {:>24}", "unsettled");
                        }
                    }
                }
                Err(f) => {
                    let _ = write!(out, "  failed: {}", f.error);
                }
            }
            out.push('\n');
        }
        out.push('\n');
        for m in RunMetrics::NAMES {
            let order: Vec<&str> = self.ranking(m).into_iter().map(|k| self.names[k].as_str()).collect();
            let _ = writeln!(out, "rank {m}: {}", order.join(" < "));
        }
        out
    }
}

/// Runs `configs`, which must share plant and reference.
pub fn compare_runs(configs: &[ExperimentConfig]) -> Result<Comparison> {
    if configs.len() < 2 {
        return Err(Error::Mismatch("a comparison needs at least two configs".into()));
    }
    let first = &configs[0];
    for c in &configs[1..] {
        if c.plant != first.plant {
            return Err(Error::Mismatch(format!("`{}` uses a different plant than `{}`", c.name, first.name)));
        }
        if c.reference != first.reference {
            return Err(Error::Mismatch(format!("`{}` uses a different reference than `{}`", c.name, first.name)));
        }
    }
    Ok(Comparison { names: unique_names(configs), outcomes: run_batch(configs) })
}

fn unique_names(configs: &[ExperimentConfig]) -> Vec<String> {
    let mut out: Vec<String> = Vec::with_capacity(configs.len());
    for c in configs {
        let mut name = c.name.clone();
        let mut k = 2;
        while out.contains(&name) {
            name = format!("{}-{k}", c.name);
            k += 1;
        }
        out.push(name);
    }
    out
}

/// One row per swept value.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub param: String,
    pub values: Vec<String>,
    pub outcomes: Vec<RunOutcome>,
}

impl SweepResult {
    /// `value,<metrics...>,status` CSV.
    pub fn summary_csv(&self) -> String {
        let mut out = format!("{},{},status\n", self.param, RunMetrics::NAMES.join(","));
        for (v, o) in self.values.iter().zip(&self.outcomes) {
            out.push_str(&format!("\"{v}\""));
            match o {
                Ok(r) => {
                    for m in RunMetrics::NAMES {
                        let x = r.metrics.value(m).unwrap_or(f64::NAN);
                        out.push_str(&format!(",{x:.15e}"));
                    }
                    out.push_str(",ok\n");
                }
                Err(f) => {
                    out.push_str(&",".repeat(RunMetrics::NAMES.len()));
                    out.push_str(&format!(",\"{}\"\n", f.error.to_string().replace('"', "'")));
                }
            }
        }
        out
    }
}

/// Clones `base` once per value of `param` (`section.key`) and runs them.
/// Every value is validated before any run starts.
pub fn sweep(base: &ExperimentConfig, param: &str, values: &[String]) -> Result<SweepResult> {
    if values.is_empty() {
        return Err(Error::Config("sweep needs at least one value".into()));
    }
    let configs = values
        .iter()
        .map(|v| {
            let mut c = base.with_override(param, v)?;
            c.name = format!("{}-{}", base.name, sanitize(v));
            Ok(c)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult { param: param.to_string(), values: values.to_vec(), outcomes: run_batch(&configs) })
}

fn sanitize(v: &str) -> String {
    v.chars().map(|c| if c.is_ascii_alphanumeric() || c == '.' || c == '-' { c } else { '_' }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn short(text: &str) -> ExperimentConfig {
        ExperimentConfig::parse(&format!("{text}\n[sim]\nhorizon = 0.5\nwindow_start = 0.1\nwindow_end = 0.5\n")).unwrap()
    }

    #[test]
    fn identical_configs_identical_metrics() {
        let c = short("");
        let cmp = compare_runs(&[c.clone(), c]).unwrap();
        assert_eq!(cmp.names, vec!["fnt-m1", "fnt-m1-2"]);
        assert_eq!(cmp.metrics(0), cmp.metrics(1));
        assert!(cmp.table().contains("rank rms_tracking_error"));
    }

    #[test]
    fn mismatched_plant_or_reference_rejected() {
        let a = short("");
        assert!(compare_runs(&[a.clone()]).is_err());
        let b = short("[plant]\nm_a = 0.2");
        assert!(matches!(compare_runs(&[a.clone(), b]), Err(Error::Mismatch(_))));
        let c = short("reference = constant");
        assert!(matches!(compare_runs(&[a, c]), Err(Error::Mismatch(_))));
    }

    #[test]
    fn sequential_and_default_agree() {
        let cs = vec![short("variant = fnt-m2"), short("variant = fxt-m4s")];
        assert_eq!(run_batch_sequential(&cs), run_batch(&cs));
    }

    #[test]
    fn sweep_emits_one_row_per_value() {
        let s = sweep(&short(""), "controller.p", &["0.5".into(), "1".into(), "2".into()]).unwrap();
        let csv = s.summary_csv();
        assert_eq!(csv.lines().count(), 4);
        assert!(csv.starts_with("controller.p,rms_tracking_error"));
        assert!(s.outcomes.iter().all(|o| o.is_ok()));
        assert!(sweep(&short(""), "controller.m", &["3".into()]).is_err());
    }
}
