//! Scalar building blocks shared by every control law: odd fractional
//! powers, the `tanh` gap, the `φ` smoothing function and the smooth
//! switching windows that gate the neural approximators.

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};

/// `sign(x)·|x|^p`.
///
/// For exponents written as ratios of odd integers this is the real odd
/// root power, so `signed_pow(-8.0, 1.0 / 3.0) == -2.0`.
#[inline]
pub fn signed_pow(x: f64, p: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x.signum() * x.abs().powf(p)
    }
}

/// `|W| - W·tanh(W/η)`, which lies in `[0, 0.2785·η]`.
pub fn tanh_gap(w: f64, eta: f64) -> Result<f64> {
    if !(eta > 0.0) {
        return Err(Error::domain("eta", "must be positive"));
    }
    Ok(w.abs() - w * (w / eta).tanh())
}

/// Upper bound constant of [`tanh_gap`], in units of `η`.
pub const TANH_GAP_BOUND: f64 = 0.2785;

/// Smoothing function used by the stabilizing term of every virtual control:
///
/// `φ(λ) = λ^{1+2m}·sqrt((λ^{2+2m}+μ²+κ²) / ((λ^{2+2m}+μ²)(λ^{2+2m}+κ²)))`.
///
/// Odd in `λ`; `λ·φ(λ)` sits within `μκ/sqrt(μ²+κ²)` of `|λ|^{1+m}`.
pub fn phi(lambda: f64, mu: f64, kappa: f64, m: f64) -> Result<f64> {
    if !(mu > 0.0) {
        return Err(Error::domain("mu", "must be positive"));
    }
    if !(kappa > 0.0) {
        return Err(Error::domain("kappa", "must be positive"));
    }
    if !(m > 0.5 && m < 1.0) {
        return Err(Error::domain("m", "must lie in (1/2, 1)"));
    }
    Ok(phi_unchecked(lambda, mu, kappa, m))
}

#[inline]
pub(crate) fn phi_unchecked(lambda: f64, mu: f64, kappa: f64, m: f64) -> f64 {
    let lead = signed_pow(lambda, 1.0 + 2.0 * m);
    let even = lambda.abs().powf(2.0 + 2.0 * m);
    let (mu2, ka2) = (mu * mu, kappa * kappa);
    lead * ((even + mu2 + ka2) / ((even + mu2) * (even + ka2))).sqrt()
}

/// Argument convention of the switching window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SwitchForm {
    /// Blend argument `(ρ² - c1²)/(c2² - c1²)`.
    Squared,
    /// Blend argument `(|ρ| - c1)/(c2 - c1)`.
    Absolute,
}

impl SwitchForm {
    pub fn as_str(self) -> &'static str {
        match self {
            SwitchForm::Squared => "squared",
            SwitchForm::Absolute => "absolute",
        }
    }
}

impl std::str::FromStr for SwitchForm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "squared" => Ok(SwitchForm::Squared),
            "absolute" | "abs" => Ok(SwitchForm::Absolute),
            other => Err(Error::domain("form", format!("unknown switch form `{other}`"))),
        }
    }
}

/// Inner/outer radii of one state's switching window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwitchBoundaries {
    c1: f64,
    c2: f64,
    order: u32,
    form: SwitchForm,
}

impl SwitchBoundaries {
    pub fn new(c1: f64, c2: f64, order: u32, form: SwitchForm) -> Result<Self> {
        if !(c1 > 0.0) {
            return Err(Error::domain("c1", "must be positive"));
        }
        if !(c2 > c1) || !c2.is_finite() {
            return Err(Error::domain("c2", "must be greater than c1"));
        }
        if order == 0 {
            return Err(Error::domain("order", "must be at least 1"));
        }
        Ok(Self { c1, c2, order, form })
    }

    pub fn c1(&self) -> f64 {
        self.c1
    }

    pub fn c2(&self) -> f64 {
        self.c2
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn form(&self) -> SwitchForm {
        self.form
    }
}

/// `n`-times continuously differentiable window: 1 on `|ρ| ≤ c1`, 0 on
/// `|ρ| ≥ c2`, and `cos^{n+1}(π/2·s^n)` in between.
pub fn smooth_switch(rho: f64, b: &SwitchBoundaries) -> f64 {
    let a = rho.abs();
    if a <= b.c1 {
        return 1.0;
    }
    if a >= b.c2 {
        return 0.0;
    }
    let s = match b.form {
        SwitchForm::Squared => (a * a - b.c1 * b.c1) / (b.c2 * b.c2 - b.c1 * b.c1),
        SwitchForm::Absolute => (a - b.c1) / (b.c2 - b.c1),
    };
    let n = b.order as i32;
    (FRAC_PI_2 * s.powi(n)).cos().powi(n + 1)
}

/// Product of the per-state windows of `rho_bar`.
pub fn switch_indicator(rho_bar: &[f64], bounds: &[SwitchBoundaries]) -> Result<f64> {
    if rho_bar.len() != bounds.len() {
        return Err(Error::DimensionMismatch {
            what: "switch indicator",
            expected: bounds.len(),
            found: rho_bar.len(),
        });
    }
    Ok(rho_bar
        .iter()
        .zip(bounds)
        .map(|(&r, b)| smooth_switch(r, b))
        .product())
}

/// Numerical checks of the inequalities the stability analysis rests on.
///
/// Used by the property tests; each returns whether the inequality holds to
/// `1e-12` absolute plus `1e-9` relative.
pub mod lemmas {
    use super::{phi_unchecked, signed_pow, tanh_gap, TANH_GAP_BOUND};

    const ABS_TOL: f64 = 1e-12;
    const REL_TOL: f64 = 1e-9;

    #[inline]
    fn le(lhs: f64, rhs: f64) -> bool {
        lhs <= rhs + ABS_TOL + REL_TOL * rhs.abs().max(lhs.abs())
    }

    /// Sum-power inequalities. For `0 < q ≤ 1`: `(Σ|x|)^q ≤ Σ|x|^q`; for
    /// `q > 1`: `p^{1-q}(Σ|x|)^q ≤ Σ|x|^q` with `p = values.len()`.
    pub fn lemma_bounds_check(values: &[f64], q: f64) -> bool {
        if values.is_empty() || !(q > 0.0) {
            return false;
        }
        let sum: f64 = values.iter().map(|x| x.abs()).sum();
        let rhs: f64 = values.iter().map(|x| x.abs().powf(q)).sum();
        let lhs = if q <= 1.0 {
            sum.powf(q)
        } else {
            (values.len() as f64).powf(1.0 - q) * sum.powf(q)
        };
        le(lhs, rhs)
    }

    /// `0 ≤ |W| - W·tanh(W/η) ≤ 0.2785·η`.
    pub fn tanh_gap_check(w: f64, eta: f64) -> bool {
        match tanh_gap(w, eta) {
            Ok(g) => le(0.0, g) && le(g, TANH_GAP_BOUND * eta),
            Err(_) => false,
        }
    }

    /// Young-type product bound
    /// `|u1|^{s1}|u2|^{s2} ≤ s1/(s1+s2)|u1|^{s1+s2} + s2/(s1+s2)|u2|^{s1+s2}`.
    pub fn young_check(u1: f64, u2: f64, s1: f64, s2: f64) -> bool {
        if !(s1 > 0.0 && s2 > 0.0) {
            return false;
        }
        let s = s1 + s2;
        let lhs = u1.abs().powf(s1) * u2.abs().powf(s2);
        let rhs = s1 / s * u1.abs().powf(s) + s2 / s * u2.abs().powf(s);
        le(lhs, rhs)
    }

    /// Gap bound of the smoothing function with `λ` replaced by `λ^{1+m}`:
    /// `0 ≤ |ℓ| - ℓ²·sqrt((ℓ²+μ²+κ²)/((ℓ²+μ²)(ℓ²+κ²))) ≤ μκ/sqrt(μ²+κ²)`.
    ///
    /// The middle term is evaluated as `λ·φ(λ)`, tying the check to the
    /// function actually used by the controllers.
    pub fn smoothing_gap_check(lambda: f64, mu: f64, kappa: f64, m: f64) -> bool {
        let ell = signed_pow(lambda, 1.0 + m);
        let gap = ell.abs() - lambda * phi_unchecked(lambda, mu, kappa, m);
        let bound = mu * kappa / (mu * mu + kappa * kappa).sqrt();
        le(0.0, gap) && le(gap, bound)
    }
}
