use crate::controller::Timing;
use crate::error::{Error, Result};
use crate::learning::{LearningGains, Leakage};

/// Design constants of one backstepping level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubsystemGains {
    /// Linear error gain (finite time).
    pub k: f64,
    /// Smoothing-term gain (finite time).
    pub p: f64,
    /// Fractional compensation gain (finite time).
    pub gamma: f64,
    /// `k_{i1}`: smoothing-term and `σ^m` gain (fixed time).
    pub k1: f64,
    /// `k_{i2}`: `λ^r` and `σ^r` gain (fixed time).
    pub k2: f64,
    pub a: f64,
    pub mu: f64,
    pub kappa: f64,
    pub learning: LearningGains,
    /// Linear (or `z^r`) correction of the estimation model.
    pub r1: f64,
    /// `z^m` correction of the estimation model.
    pub r2: f64,
}

/// Second-order command filter constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterGains {
    pub omega: f64,
    pub l1: f64,
    pub l2: f64,
    pub m_f: f64,
    pub r_f: f64,
}

impl FilterGains {
    /// `ω = 50`, `l1 = l2 = 1`, `m_f = 0.6`, `r_f = 1` (finite time) or `5/3`
    /// (fixed time).
    pub fn default_for(timing: Timing) -> Self {
        Self {
            omega: 50.0,
            l1: 1.0,
            l2: 1.0,
            m_f: 0.6,
            r_f: match timing {
                Timing::FiniteTime => 1.0,
                Timing::FixedTime => 5.0 / 3.0,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GainSet {
    pub m: f64,
    pub r: f64,
    pub subsystems: Vec<SubsystemGains>,
    pub filter: FilterGains,
    /// Lower bound every `g_i` must respect during a run.
    pub g_floor: f64,
}

impl GainSet {
    pub fn order(&self) -> usize {
        self.subsystems.len()
    }

    /// Gains of 1-based level `i`.
    pub fn level(&self, i: usize) -> Result<&SubsystemGains> {
        i.checked_sub(1)
            .and_then(|k| self.subsystems.get(k))
            .ok_or(Error::IndexOutOfRange { index: i, order: self.order() })
    }

    pub fn neural_leakage(&self, s: &SubsystemGains) -> Leakage {
        self.leak(s.learning.beta_1, s.learning.beta_2)
    }

    pub fn leak(&self, decay1: f64, decay2: f64) -> Leakage {
        Leakage { decay1, decay2, m: self.m, r: self.r }
    }

    /// Checks the sign and range constraints the designs rely on.
    pub fn validate(&self, timing: Timing) -> Result<()> {
        if self.subsystems.is_empty() {
            return Err(Error::Config("at least one subsystem is required".into()));
        }
        if !(self.m > 0.5 && self.m < 1.0) {
            return Err(Error::Config("m must lie in (1/2, 1)".into()));
        }
        if !(self.r > 1.0) || !self.r.is_finite() {
            return Err(Error::Config("r must be greater than 1".into()));
        }
        if !(self.g_floor > 0.0) {
            return Err(Error::Config("g_floor must be positive".into()));
        }
        let f = &self.filter;
        positive("filter.omega", f.omega)?;
        positive("filter.l1", f.l1)?;
        positive("filter.l2", f.l2)?;
        if !(f.m_f > 0.0 && f.m_f < 1.0) {
            return Err(Error::Config("filter.m_f must lie in (0, 1)".into()));
        }
        if !(f.r_f >= 1.0) {
            return Err(Error::Config("filter.r_f must be at least 1".into()));
        }
        for (idx, s) in self.subsystems.iter().enumerate() {
            let i = idx + 1;
            let named = |name: &str| format!("{name}[{i}]");
            match timing {
                Timing::FiniteTime => {
                    positive(&named("controller.k"), s.k)?;
                    positive(&named("controller.p"), s.p)?;
                    positive(&named("controller.gamma"), s.gamma)?;
                }
                Timing::FixedTime => {
                    positive(&named("controller.k1"), s.k1)?;
                    positive(&named("controller.k2"), s.k2)?;
                }
            }
            positive(&named("controller.a"), s.a)?;
            positive(&named("controller.mu"), s.mu)?;
            positive(&named("controller.kappa"), s.kappa)?;
            positive(&named("observer.r1"), s.r1)?;
            positive(&named("observer.r2"), s.r2)?;
            let l = &s.learning;
            for (name, v) in [
                ("learning.beta_h", l.beta_h),
                ("learning.beta_1", l.beta_1),
                ("learning.beta_2", l.beta_2),
                ("learning.delta_1", l.delta_1),
                ("learning.delta_2", l.delta_2),
                ("learning.delta_3", l.delta_3),
                ("learning.delta_1n", l.delta_1n),
                ("learning.delta_2n", l.delta_2n),
                ("learning.delta_3n", l.delta_3n),
                ("learning.q_1", l.q_1),
                ("learning.q_2", l.q_2),
                ("learning.q_3", l.q_3),
                ("learning.q_1n", l.q_1n),
                ("learning.q_2n", l.q_2n),
                ("learning.q_3n", l.q_3n),
                ("learning.eta", l.eta),
                ("learning.eta_d", l.eta_d),
                ("learning.eta_n", l.eta_n),
                ("learning.eta_dn", l.eta_dn),
                ("learning.eta_theta", l.eta_theta),
                ("learning.eta_theta_n", l.eta_theta_n),
            ] {
                positive(&named(name), v)?;
            }
            // zero is the composite-learning ablation
            if !(l.beta_z >= 0.0) || !l.beta_z.is_finite() {
                return Err(Error::Config(format!("{} must be non-negative", named("learning.beta_z"))));
            }
        }
        Ok(())
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} must be positive (got {v})")))
    }
}

impl LearningGains {
    /// `β_h = 10`, `δ_1 = δ_1N = 10`, `q_1 = q_1N = 5`, every other decay
    /// `0.1`, `β_z = 1`, all `tanh` widths `0.1`.
    pub fn defaults() -> Self {
        Self {
            beta_h: 10.0,
            beta_z: 1.0,
            beta_1: 0.1,
            beta_2: 0.1,
            delta_1: 10.0,
            delta_2: 0.1,
            delta_3: 0.1,
            delta_1n: 10.0,
            delta_2n: 0.1,
            delta_3n: 0.1,
            q_1: 5.0,
            q_2: 0.1,
            q_3: 0.1,
            q_1n: 5.0,
            q_2n: 0.1,
            q_3n: 0.1,
            eta: 0.1,
            eta_d: 0.1,
            eta_n: 0.1,
            eta_dn: 0.1,
            eta_theta: 0.1,
            eta_theta_n: 0.1,
        }
    }
}

impl SubsystemGains {
    /// Defaults for 1-based level `i`: `k = 2` on the first level and `4`
    /// afterwards, `p = 0.5`, `γ = 1`, `k_{i1} = 2`, `k_{i2} = 4`, `a = 1`,
    /// `μ = κ = 0.1`, `r1 = 5`, `r2 = 1`.
    pub fn defaults(i: usize) -> Self {
        Self {
            k: if i <= 1 { 2.0 } else { 4.0 },
            p: 0.5,
            gamma: 1.0,
            k1: 2.0,
            k2: 4.0,
            a: 1.0,
            mu: 0.1,
            kappa: 0.1,
            learning: LearningGains::defaults(),
            r1: 5.0,
            r2: 1.0,
        }
    }
}

impl GainSet {
    /// `m = 0.6`, `r = 5/3`, `g_floor = 0.05` and per-level defaults.
    pub fn defaults(order: usize, timing: Timing) -> Self {
        Self {
            m: 0.6,
            r: 5.0 / 3.0,
            subsystems: (1..=order).map(SubsystemGains::defaults).collect(),
            filter: FilterGains::default_for(timing),
            g_floor: 0.05,
        }
    }
}
