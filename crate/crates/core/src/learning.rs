//! Adaptive update laws.
//!
//! Every law has the shape `ẋ = gain·drive - leakage(x)`. The drive terms
//! below are non-negative for `w ∈ [0, 1]`, so an estimate is pushed up only
//! by excitation and pulled back only by its leakage.

use crate::controller::Timing;
use crate::math::signed_pow;

/// Per-subsystem learning gains and `tanh` softening widths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LearningGains {
    pub beta_h: f64,
    pub beta_z: f64,
    pub beta_1: f64,
    pub beta_2: f64,
    pub delta_1: f64,
    pub delta_2: f64,
    pub delta_3: f64,
    pub delta_1n: f64,
    pub delta_2n: f64,
    pub delta_3n: f64,
    pub q_1: f64,
    pub q_2: f64,
    pub q_3: f64,
    pub q_1n: f64,
    pub q_2n: f64,
    pub q_3n: f64,
    pub eta: f64,
    pub eta_d: f64,
    pub eta_n: f64,
    pub eta_dn: f64,
    pub eta_theta: f64,
    pub eta_theta_n: f64,
}

/// Decay coefficients and exponents of one leakage term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Leakage {
    pub decay1: f64,
    pub decay2: f64,
    pub m: f64,
    pub r: f64,
}

/// `drive - decay1·x - decay2·x^m` (finite time) or
/// `drive - decay1·x^r - decay2·x^m` (fixed time).
#[inline]
pub fn leakage_rate(value: f64, drive: f64, g: &Leakage, mode: Timing) -> f64 {
    let first = match mode {
        Timing::FiniteTime => g.decay1 * value,
        Timing::FixedTime => g.decay1 * signed_pow(value, g.r),
    };
    drive - first - g.decay2 * signed_pow(value, g.m)
}

/// How the squared-norm neural drive is assembled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LDrive {
    /// `w(λ² + β_z z²)ψᵀψ`; the caller scales by `β_h`.
    PerSubsystem,
    /// One summand `w/(2a²)(λ² + β_z z²)ψᵀψ` of the shared law; the caller
    /// sums over subsystems and then scales by `β_h`.
    SingleSummand,
}

#[inline]
pub fn drive_l(w: f64, lambda: f64, z: f64, beta_z: f64, psi_sq: f64, a: f64, variant: LDrive) -> f64 {
    let core = w * (lambda * lambda + beta_z * z * z) * psi_sq;
    match variant {
        LDrive::PerSubsystem => core,
        LDrive::SingleSummand => core / (2.0 * a * a),
    }
}

/// `w[λψ_h tanh(λψ_h/η_θ) + β_z zψ_h tanh(zψ_h/η_θN)]`
#[inline]
pub fn drive_n(w: f64, lambda: f64, z: f64, beta_z: f64, psi_h: f64, eta_theta: f64, eta_theta_n: f64) -> f64 {
    let a = lambda * psi_h;
    let b = z * psi_h;
    w * (a * (a / eta_theta).tanh() + beta_z * b * (b / eta_theta_n).tanh())
}

/// `(1-w)·H·s·tanh(H·s/η)`
#[inline]
pub fn drive_tau(w: f64, h: f64, s: f64, eta: f64) -> f64 {
    let hs = h * s;
    (1.0 - w) * hs * (hs / eta).tanh()
}

/// `s·tanh(s/η_d)`
#[inline]
pub fn drive_d(s: f64, eta_d: f64) -> f64 {
    s * (s / eta_d).tanh()
}

/// All adaptive parameters of one run. `theta` holds the neural estimate
/// (`L̂` for squared-norm methods, `N̂` for norm methods): one entry per
/// subsystem, or a single shared entry.
#[derive(Debug, Clone, PartialEq)]
pub struct AdaptiveEstimates {
    pub theta: Vec<f64>,
    pub tau_hat: Vec<f64>,
    pub d_hat: Vec<f64>,
    pub tau_hat_n: Vec<f64>,
    pub d_hat_n: Vec<f64>,
}

impl AdaptiveEstimates {
    /// All estimates start at zero.
    pub fn zeros(order: usize, shared: bool) -> Self {
        Self {
            theta: vec![0.0; if shared { 1 } else { order }],
            tau_hat: vec![0.0; order],
            d_hat: vec![0.0; order],
            tau_hat_n: vec![0.0; order],
            d_hat_n: vec![0.0; order],
        }
    }

    /// Neural estimate used by subsystem `i` (0-based).
    #[inline]
    pub fn theta_for(&self, i: usize) -> f64 {
        if self.theta.len() == 1 {
            self.theta[0]
        } else {
            self.theta[i]
        }
    }

    pub fn all_finite(&self) -> bool {
        [&self.theta, &self.tau_hat, &self.d_hat, &self.tau_hat_n, &self.d_hat_n]
            .iter()
            .all(|v| v.iter().all(|x| x.is_finite()))
    }
}
