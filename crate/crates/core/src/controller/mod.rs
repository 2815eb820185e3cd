//! Command-filtered adaptive backstepping: tracking errors, compensation
//! signals, the twelve virtual-control variants, and the assembly of every
//! controller-side rate for one evaluation of the closed loop.

pub mod filter;
pub mod gains;
mod variant;

pub use filter::{CommandFilter, FilterState};
pub use gains::{FilterGains, GainSet, SubsystemGains};
pub use variant::{ControllerVariant, NeuralForm, Sharing, Timing};

use crate::approximator::{psi_h_from_norm, RbfNetwork};
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::learning::{drive_d, drive_l, drive_n, drive_tau, leakage_rate, LDrive};
use crate::math::{phi_unchecked, signed_pow, switch_indicator, SwitchBoundaries};
use crate::observer::{observer_adapt_rates, spem_rhs};
use crate::plant::{InputGains, RefSample};
use crate::sim::state::SystemState;

/// Every quantity one backstepping level needs, already evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SubsystemSignals {
    /// 1-based level.
    pub index: usize,
    pub t: f64,
    /// Switch indicator `w_i`.
    pub w: f64,
    /// `ψᵀψ`.
    pub psi_sq: f64,
    /// `ψ_h` (norm variants only; zero otherwise).
    pub psi_h: f64,
    /// Bound shape `H_i`.
    pub bound: f64,
    pub g: f64,
    /// `g_{i-1}` (unused on the first level).
    pub g_prev: f64,
    pub zeta: f64,
    pub zeta_prev: f64,
    pub lambda: f64,
    pub sigma: f64,
    /// `ẏ_r` on the first level, `ρ̇_{i,c}` afterwards.
    pub feedforward: f64,
    /// Prediction error `z_iN`.
    pub z: f64,
    /// `ρ_{i+1}`, or `u` on the last level.
    pub next_state: f64,
    /// Neural estimate used by this level.
    pub theta: f64,
    pub tau_hat: f64,
    pub d_hat: f64,
    pub tau_hat_n: f64,
    pub d_hat_n: f64,
}

/// `ζ_1 = ρ_1 - y_r`, `ζ_i = ρ_i - ρ_{i,c}`. `rho_c[0]` is ignored.
pub fn tracking_errors(rho: &[f64], y_r: f64, rho_c: &[f64]) -> Result<Vec<f64>> {
    if rho.len() != rho_c.len() {
        return Err(Error::DimensionMismatch { what: "filter outputs", expected: rho.len(), found: rho_c.len() });
    }
    Ok(rho
        .iter()
        .zip(rho_c)
        .enumerate()
        .map(|(k, (r, c))| if k == 0 { r - y_r } else { r - c })
        .collect())
}

/// `λ = ζ - σ`.
pub fn lambda_errors(zeta: &[f64], sigma: &[f64]) -> Result<Vec<f64>> {
    if zeta.len() != sigma.len() {
        return Err(Error::DimensionMismatch { what: "compensation signals", expected: zeta.len(), found: sigma.len() });
    }
    Ok(zeta.iter().zip(sigma).map(|(z, s)| z - s).collect())
}

/// `σ̇` of the compensation system. `gaps[i] = ρ_{i+2,c} - α_{i+1}` (0-based),
/// length `n - 1`; `g` holds `g_1..g_n`.
pub fn compensation_rhs(sigma: &[f64], gaps: &[f64], g: &[f64], gains: &GainSet, timing: Timing) -> Result<Vec<f64>> {
    let n = sigma.len();
    if gains.order() != n {
        return Err(Error::DimensionMismatch { what: "gain set", expected: n, found: gains.order() });
    }
    if g.len() != n {
        return Err(Error::DimensionMismatch { what: "input gains", expected: n, found: g.len() });
    }
    if gaps.len() + 1 != n {
        return Err(Error::DimensionMismatch { what: "filter gaps", expected: n - 1, found: gaps.len() });
    }
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let s = &gains.subsystems[k];
        let x = sigma[k];
        let mut rate = match timing {
            Timing::FiniteTime => -s.k * x - s.gamma * signed_pow(x, gains.m),
            Timing::FixedTime => -s.k1 * signed_pow(x, gains.m) - s.k2 * signed_pow(x, gains.r),
        };
        if k + 1 < n {
            rate += g[k] * (gaps[k] + sigma[k + 1]);
        }
        if k > 0 {
            rate -= g[k - 1] * sigma[k - 1];
        }
        out.push(rate);
    }
    Ok(out)
}

/// Virtual control `α_i` (the plant input `u` on the last level).
pub fn virtual_control(sig: &SubsystemSignals, variant: &ControllerVariant, gains: &GainSet) -> Result<f64> {
    let s = gains.level(sig.index)?;
    let l = &s.learning;
    if !(sig.g >= gains.g_floor) {
        return Err(Error::GainBelowFloor { index: sig.index, value: sig.g, floor: gains.g_floor, t: sig.t });
    }
    let phi = phi_unchecked(sig.lambda, s.mu, s.kappa, gains.m);
    let stab = match variant.timing {
        Timing::FiniteTime => -s.k * sig.zeta - s.p * phi,
        Timing::FixedTime => -s.k2 * signed_pow(sig.lambda, gains.r) - s.k1 * phi,
    };
    let coupling = if sig.index >= 2 { sig.g_prev * sig.zeta_prev } else { 0.0 };
    let neural = neural_term(sig, variant, s);
    let robust = (1.0 - sig.w) * sig.tau_hat * sig.bound * (sig.bound * sig.lambda / l.eta).tanh();
    let disturbance = sig.d_hat * (sig.lambda / l.eta_d).tanh();
    Ok((stab + sig.feedforward - coupling - disturbance - neural - robust) / sig.g)
}

#[inline]
fn neural_term(sig: &SubsystemSignals, variant: &ControllerVariant, s: &SubsystemGains) -> f64 {
    match variant.neural_form {
        NeuralForm::SquaredNorm => sig.w * sig.lambda / (2.0 * s.a * s.a) * sig.theta * sig.psi_sq,
        NeuralForm::NormPlusEps | NeuralForm::Norm => {
            sig.w * sig.theta * sig.psi_h * (sig.psi_h * sig.lambda / s.learning.eta_theta).tanh()
        }
    }
}

/// Neural drive of one level before `β_h` is applied. For shared variants
/// this is the level's summand of the common law.
pub fn neural_drive(sig: &SubsystemSignals, variant: &ControllerVariant, gains: &GainSet, beta_z: f64) -> Result<f64> {
    let s = gains.level(sig.index)?;
    Ok(match variant.neural_form {
        NeuralForm::SquaredNorm => {
            let mode = match variant.sharing {
                Sharing::PerSubsystem => LDrive::PerSubsystem,
                Sharing::Single => LDrive::SingleSummand,
            };
            drive_l(sig.w, sig.lambda, sig.z, beta_z, sig.psi_sq, s.a, mode)
        }
        NeuralForm::NormPlusEps | NeuralForm::Norm => drive_n(
            sig.w,
            sig.lambda,
            sig.z,
            beta_z,
            sig.psi_h,
            s.learning.eta_theta,
            s.learning.eta_theta_n,
        ),
    })
}

/// `(dτ̂_i/dt, dd̂_i/dt)`.
pub fn robust_rates(sig: &SubsystemSignals, variant: &ControllerVariant, gains: &GainSet) -> Result<(f64, f64)> {
    let s = gains.level(sig.index)?;
    let l = &s.learning;
    let tau = leakage_rate(
        sig.tau_hat,
        l.delta_1 * drive_tau(sig.w, sig.bound, sig.lambda, l.eta),
        &gains.leak(l.delta_2, l.delta_3),
        variant.timing,
    );
    let d = leakage_rate(
        sig.d_hat,
        l.q_1 * drive_d(sig.lambda, l.eta_d),
        &gains.leak(l.q_2, l.q_3),
        variant.timing,
    );
    Ok((tau, d))
}

/// Signals produced by one controller evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlOutput {
    pub u: f64,
    pub w: Vec<f64>,
    pub zeta: Vec<f64>,
    pub lambda: Vec<f64>,
    /// `α_1..α_n`; the last entry equals `u`.
    pub alpha: Vec<f64>,
    pub z: Vec<f64>,
    pub g: Vec<f64>,
}

/// A fully configured controller for one plant order.
#[derive(Debug, Clone)]
pub struct Controller {
    variant: ControllerVariant,
    gains: GainSet,
    networks: Vec<RbfNetwork>,
    switches: Vec<SwitchBoundaries>,
    bounds: Vec<Expr>,
    filter: CommandFilter,
    composite: bool,
    switching_frozen_on: bool,
}

impl Controller {
    /// `networks[i]` must take `i + 1` inputs; `switches` holds one window
    /// per state and `bounds` one `H_i` per level.
    pub fn new(
        variant: ControllerVariant,
        gains: GainSet,
        networks: Vec<RbfNetwork>,
        switches: Vec<SwitchBoundaries>,
        bounds: Vec<Expr>,
    ) -> Result<Self> {
        gains.validate(variant.timing)?;
        let n = gains.order();
        for (what, found) in [("networks", networks.len()), ("switch boundaries", switches.len()), ("bound shapes", bounds.len())] {
            if found != n {
                return Err(Error::DimensionMismatch { what, expected: n, found });
            }
        }
        for (k, net) in networks.iter().enumerate() {
            if net.dim() != k + 1 {
                return Err(Error::DimensionMismatch { what: "network inputs", expected: k + 1, found: net.dim() });
            }
        }
        for (k, h) in bounds.iter().enumerate() {
            if h.max_state_index() > k + 1 {
                return Err(Error::Config(format!(
                    "bound H{} may only depend on rho1..rho{}, got `{h}`",
                    k + 1,
                    k + 1
                )));
            }
        }
        let filter = CommandFilter::new(gains.filter);
        Ok(Self { variant, gains, networks, switches, bounds, filter, composite: true, switching_frozen_on: false })
    }

    /// Disconnects the prediction error from the neural learning law.
    pub fn with_composite(mut self, on: bool) -> Self {
        self.composite = on;
        self
    }

    /// Forces `w ≡ 1` (neural control everywhere).
    pub fn with_switching_frozen_on(mut self, on: bool) -> Self {
        self.switching_frozen_on = on;
        self
    }

    pub fn variant(&self) -> &ControllerVariant {
        &self.variant
    }

    pub fn gains(&self) -> &GainSet {
        &self.gains
    }

    pub fn order(&self) -> usize {
        self.gains.order()
    }

    /// Evaluates the control and writes every controller-side rate
    /// (`σ`, filters, estimates, `ρ̂`) into `rates`. Plant rates are left
    /// untouched.
    pub fn evaluate(
        &self,
        x: &SystemState,
        r: RefSample,
        plant: &dyn InputGains,
        rates: &mut SystemState,
    ) -> Result<ControlOutput> {
        let (out, sigs) = self.signals(x, r, plant)?;
        self.fill_rates(x, &out, &sigs, rates)?;
        Ok(out)
    }

    /// Places every filter at rest on its input, level by level, so the
    /// run starts without an artificial filter transient.
    pub fn initialize_filters(&self, x: &mut SystemState, r: RefSample, plant: &dyn InputGains) -> Result<()> {
        for i in 2..=self.order() {
            let (out, _) = self.signals(x, r, plant)?;
            x.set_filter(i, FilterState { rho_c: out.alpha[i - 2], rho_c_dot: 0.0 });
        }
        Ok(())
    }

    fn signals(&self, x: &SystemState, r: RefSample, plant: &dyn InputGains) -> Result<(ControlOutput, Vec<SubsystemSignals>)> {
        let n = self.order();
        if x.layout().order() != n || plant.order() != n {
            return Err(Error::DimensionMismatch { what: "plant order", expected: n, found: plant.order() });
        }
        let rho = x.rho();
        let sigma = x.sigma();
        let mut out = ControlOutput {
            u: 0.0,
            w: Vec::with_capacity(n),
            zeta: Vec::with_capacity(n),
            lambda: Vec::with_capacity(n),
            alpha: Vec::with_capacity(n),
            z: Vec::with_capacity(n),
            g: Vec::with_capacity(n),
        };
        let mut sigs: Vec<SubsystemSignals> = Vec::with_capacity(n);
        let form = self.variant.neural_form.psi_norm();
        for i in 1..=n {
            let rho_bar = &rho[..i];
            let g = plant.input_gain(i, rho);
            let w = if self.switching_frozen_on { 1.0 } else { switch_indicator(rho_bar, &self.switches[..i])? };
            let (psi_sq, norm) = self.networks[i - 1].norms(rho_bar)?;
            let psi_h = form.map_or(0.0, |f| psi_h_from_norm(norm, f));
            let (zeta, feedforward) = if i == 1 {
                (rho[0] - r.y, r.y_dot)
            } else {
                let fs = x.filter(i);
                (rho[i - 1] - fs.rho_c, fs.rho_c_dot)
            };
            let prev = sigs.last();
            let sig = SubsystemSignals {
                index: i,
                t: x.t,
                w,
                psi_sq,
                psi_h,
                bound: self.bounds[i - 1].eval(rho),
                g,
                g_prev: prev.map_or(0.0, |p| p.g),
                zeta,
                zeta_prev: prev.map_or(0.0, |p| p.zeta),
                lambda: zeta - sigma[i - 1],
                sigma: sigma[i - 1],
                feedforward,
                z: x.prediction_error(i),
                next_state: 0.0,
                theta: x.theta_for(i),
                tau_hat: x.tau_hat()[i - 1],
                d_hat: x.d_hat()[i - 1],
                tau_hat_n: x.tau_hat_n()[i - 1],
                d_hat_n: x.d_hat_n()[i - 1],
            };
            let alpha = virtual_control(&sig, &self.variant, &self.gains)?;
            out.w.push(w);
            out.zeta.push(sig.zeta);
            out.lambda.push(sig.lambda);
            out.alpha.push(alpha);
            out.z.push(sig.z);
            out.g.push(g);
            sigs.push(sig);
        }
        out.u = out.alpha[n - 1];
        for (k, sig) in sigs.iter_mut().enumerate() {
            sig.next_state = if k + 1 < n { rho[k + 1] } else { out.u };
        }
        Ok((out, sigs))
    }

    fn fill_rates(&self, x: &SystemState, out: &ControlOutput, sigs: &[SubsystemSignals], rates: &mut SystemState) -> Result<()> {
        let n = self.order();
        let v = &self.variant;
        let gaps: Vec<f64> = (2..=n).map(|i| x.filter(i).rho_c - out.alpha[i - 2]).collect();
        let ds = compensation_rhs(x.sigma(), &gaps, &out.g, &self.gains, v.timing)?;
        rates.sigma_mut().copy_from_slice(&ds);

        for i in 2..=n {
            let (d_rc, d_rcd) = self.filter.rates(x.filter(i), out.alpha[i - 2]);
            rates.set_filter(i, FilterState { rho_c: d_rc, rho_c_dot: d_rcd });
        }

        let mut shared_drive = 0.0;
        for sig in sigs {
            let s = self.gains.level(sig.index)?;
            let beta_z = if self.composite { s.learning.beta_z } else { 0.0 };
            let drive = neural_drive(sig, v, &self.gains, beta_z)?;
            match v.sharing {
                Sharing::PerSubsystem => {
                    rates.theta_mut()[sig.index - 1] = leakage_rate(
                        sig.theta,
                        s.learning.beta_h * drive,
                        &self.gains.neural_leakage(s),
                        v.timing,
                    );
                }
                Sharing::Single => shared_drive += drive,
            }
            let (tau, d) = robust_rates(sig, v, &self.gains)?;
            rates.tau_hat_mut()[sig.index - 1] = tau;
            rates.d_hat_mut()[sig.index - 1] = d;
            let (tau_n, d_n) = observer_adapt_rates(sig, v, &self.gains)?;
            rates.tau_hat_n_mut()[sig.index - 1] = tau_n;
            rates.d_hat_n_mut()[sig.index - 1] = d_n;
            rates.rho_hat_mut()[sig.index - 1] = spem_rhs(sig, v, &self.gains)?;
        }
        if v.sharing == Sharing::Single {
            // The common law borrows the last level's gains.
            let s = &self.gains.subsystems[n - 1];
            let theta = x.theta()[0];
            rates.theta_mut()[0] =
                leakage_rate(theta, s.learning.beta_h * shared_drive, &self.gains.neural_leakage(s), v.timing);
        }
        Ok(())
    }
}


#[cfg(test)]
mod tests {
    use super::testing::{gains_with, signals};
    use super::*;
    use crate::math::SwitchForm;
    use crate::plant::{Disturbance, PendulumParams, PlantModel};
    use crate::sim::state::StateLayout;
    use approx::assert_abs_diff_eq;

    const M1: ControllerVariant = ControllerVariant::new(Timing::FiniteTime, NeuralForm::SquaredNorm, Sharing::PerSubsystem);
    const M1S: ControllerVariant = ControllerVariant::new(Timing::FiniteTime, NeuralForm::SquaredNorm, Sharing::Single);
    const M4: ControllerVariant = ControllerVariant::new(Timing::FixedTime, NeuralForm::SquaredNorm, Sharing::PerSubsystem);

    fn pendulum_controller(variant: ControllerVariant) -> (Controller, PlantModel) {
        let gains = GainSet::defaults(2, variant.timing);
        let networks = (1..=2).map(|d| RbfNetwork::grid(d, 11, -0.25, 0.25, 2.0).unwrap()).collect();
        let sw = SwitchBoundaries::new(0.25, 0.35, 2, SwitchForm::Squared).unwrap();
        let c = Controller::new(variant, gains, networks, vec![sw; 2], vec![Expr::constant(1.0); 2]).unwrap();
        let p = PlantModel::pendulum(PendulumParams::default(), Disturbance::Zero).unwrap();
        (c, p)
    }

    #[test]
    fn tracking_and_lambda_examples() {
        assert_eq!(tracking_errors(&[0.3, 0.7], 0.3, &[0.0, 0.7]).unwrap(), vec![0.0, 0.0]);
        assert_eq!(tracking_errors(&[-0.1, 0.0], 0.0, &[0.0, 0.0]).unwrap()[0], -0.1);
        let l = lambda_errors(&[0.2, -0.1], &[0.05, 0.05]).unwrap();
        assert_abs_diff_eq!(l[0], 0.15, epsilon = 1e-15);
        assert_abs_diff_eq!(l[1], -0.15, epsilon = 1e-15);
        assert!(lambda_errors(&[0.0], &[0.0, 0.0]).is_err());
    }

    #[test]
    fn compensation_examples() {
        let g = GainSet::defaults(2, Timing::FiniteTime);
        assert_eq!(compensation_rhs(&[0.0, 0.0], &[0.0], &[1.0, 1.0], &g, Timing::FiniteTime).unwrap(), vec![0.0, 0.0]);
        assert_eq!(compensation_rhs(&[0.0, 0.0], &[0.1], &[1.0, 1.0], &g, Timing::FiniteTime).unwrap(), vec![0.1, 0.0]);
        let g = GainSet::defaults(2, Timing::FixedTime);
        let ds = compensation_rhs(&[1.0, 0.0], &[0.0], &[1.0, 1.0], &g, Timing::FixedTime).unwrap();
        assert_abs_diff_eq!(ds[0], -6.0, epsilon = 1e-12);
        assert_abs_diff_eq!(ds[1], -1.0, epsilon = 1e-12);
    }

    #[test]
    fn virtual_control_examples() {
        let g = gains_with(|_| {});
        let mut sig = signals(1);
        sig.g = 1.0;
        for v in ControllerVariant::all() {
            assert_eq!(virtual_control(&sig, &v, &g).unwrap(), 0.0);
        }
        sig.zeta = 0.1;
        sig.lambda = 0.1;
        sig.w = 1.0;
        let expected = -0.2 - 0.5 * 0.085_248_611_674_558_55;
        assert_abs_diff_eq!(virtual_control(&sig, &M1, &g).unwrap(), expected, epsilon = 1e-12);
        assert_abs_diff_eq!(expected, -0.242_624_305_837_279_3, epsilon = 1e-12);
    }

    #[test]
    fn gating_outside_neural_region() {
        let g = gains_with(|_| {});
        let mut sig = signals(2);
        sig.g = 1.0;
        sig.lambda = 0.3;
        sig.zeta = 0.3;
        sig.theta = 5.0;
        sig.psi_sq = 3.0;
        sig.psi_h = 2.0;
        sig.bound = 1.0;
        for v in ControllerVariant::all() {
            sig.tau_hat = 0.0;
            sig.w = 0.0;
            let without_theta = {
                let mut s = sig;
                s.theta = 0.0;
                virtual_control(&s, &v, &g).unwrap()
            };
            assert_eq!(virtual_control(&sig, &v, &g).unwrap(), without_theta);
            sig.tau_hat = 2.0;
            assert!(virtual_control(&sig, &v, &g).unwrap() < without_theta);
        }
    }

    #[test]
    fn gain_floor_and_index() {
        let g = gains_with(|_| {});
        let mut sig = signals(1);
        sig.g = 0.01;
        assert!(matches!(virtual_control(&sig, &M1, &g), Err(Error::GainBelowFloor { index: 1, .. })));
        sig.g = 1.0;
        sig.index = 3;
        assert!(matches!(virtual_control(&sig, &M1, &g), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn fxt_stabilizing_term_sector() {
        let g = GainSet::defaults(2, Timing::FixedTime);
        let s = &g.subsystems[0];
        let term = |l: f64| -s.k2 * signed_pow(l, g.r);
        let mut prev = 0.0;
        for k in 1..=1000 {
            let l = k as f64 * 1e-3;
            let v = term(l);
            assert!(v < 0.0 && v < prev);
            prev = v;
        }
        let mut sig = signals(1);
        sig.g = 1.0;
        sig.lambda = 0.5;
        assert!(virtual_control(&sig, &M4, &g).unwrap() < 0.0);
    }

    #[test]
    fn single_matches_per_subsystem_when_estimates_agree() {
        let (per, p) = pendulum_controller(M1);
        let (single, _) = pendulum_controller(M1S);
        let r = RefSample { y: 0.05, y_dot: 0.2 };
        let mut xp = SystemState::zeros(StateLayout::new(2, false, NeuralForm::SquaredNorm));
        let mut xs = SystemState::zeros(StateLayout::new(2, true, NeuralForm::SquaredNorm));
        for x in [&mut xp, &mut xs] {
            x.rho_mut().copy_from_slice(&[0.1, -0.05]);
            x.sigma_mut().copy_from_slice(&[0.01, 0.02]);
            x.set_filter(2, FilterState { rho_c: 0.03, rho_c_dot: 0.1 });
        }
        xp.theta_mut().copy_from_slice(&[1.7, 1.7]);
        xs.theta_mut()[0] = 1.7;
        let mut dp = SystemState::zeros(*xp.layout());
        let mut ds = SystemState::zeros(*xs.layout());
        let up = per.evaluate(&xp, r, &p, &mut dp).unwrap();
        let us = single.evaluate(&xs, r, &p, &mut ds).unwrap();
        assert_eq!(up.w, vec![1.0, 1.0]);
        assert_eq!(up.u, us.u);
    }

    #[test]
    fn equilibrium_gives_zero_control_and_rates() {
        for v in ControllerVariant::all() {
            let (c, p) = pendulum_controller(v);
            let layout = StateLayout::new(2, v.is_shared(), v.neural_form);
            let mut x = SystemState::zeros(layout);
            let r = RefSample { y: 0.0, y_dot: 0.0 };
            c.initialize_filters(&mut x, r, &p).unwrap();
            let mut dx = SystemState::zeros(layout);
            let out = c.evaluate(&x, r, &p, &mut dx).unwrap();
            assert_eq!(out.u, 0.0);
            assert!(dx.as_slice().iter().all(|&d| d == 0.0), "{v}");
        }
    }

    #[test]
    fn outer_region_removes_neural_terms() {
        let (c, p) = pendulum_controller(M1);
        let layout = StateLayout::new(2, false, NeuralForm::SquaredNorm);
        let mut x = SystemState::zeros(layout);
        x.rho_mut().copy_from_slice(&[0.5, 0.4]);
        let r = RefSample { y: 0.0, y_dot: 0.0 };
        let mut dx = SystemState::zeros(layout);
        let u0 = c.evaluate(&x, r, &p, &mut dx).unwrap();
        assert_eq!(u0.w, vec![0.0, 0.0]);
        x.theta_mut().copy_from_slice(&[10.0, 10.0]);
        let u1 = c.evaluate(&x, r, &p, &mut dx).unwrap();
        assert_eq!(u0.u, u1.u);
    }

    #[test]
    fn control_continuous_across_switch_band() {
        let (c, p) = pendulum_controller(M1);
        let layout = StateLayout::new(2, false, NeuralForm::SquaredNorm);
        let mut x = SystemState::zeros(layout);
        x.theta_mut().copy_from_slice(&[3.0, 3.0]);
        x.tau_hat_mut().copy_from_slice(&[2.0, 2.0]);
        x.set_filter(2, FilterState { rho_c: 0.1, rho_c_dot: 0.0 });
        let r = RefSample { y: 0.0, y_dot: 0.0 };
        let mut dx = SystemState::zeros(layout);
        // A jump would not shrink with the sweep step; a continuous curve's
        // largest increment scales with it.
        let mut max_jump = |step: f64| {
            let mut prev: Option<f64> = None;
            let mut worst = 0.0f64;
            let count = (0.12 / step).round() as usize;
            for k in 0..=count {
                x.rho_mut()[0] = 0.24 + k as f64 * step;
                let u = c.evaluate(&x, r, &p, &mut dx).unwrap().u;
                if let Some(pu) = prev {
                    worst = worst.max((u - pu).abs());
                }
                prev = Some(u);
            }
            worst
        };
        let coarse = max_jump(1e-5);
        let fine = max_jump(1e-6);
        assert!(fine.is_finite() && fine < 0.2 * coarse, "coarse {coarse}, fine {fine}");
        assert!(fine < 1e-3, "fine {fine}");
    }

    #[test]
    fn initialized_filters_rest_on_inputs() {
        let (c, p) = pendulum_controller(M1);
        let layout = StateLayout::new(2, false, NeuralForm::SquaredNorm);
        let mut x = SystemState::zeros(layout);
        x.rho_mut()[0] = -0.1;
        let r = RefSample { y: 0.0, y_dot: 0.2 };
        c.initialize_filters(&mut x, r, &p).unwrap();
        let mut dx = SystemState::zeros(layout);
        let out = c.evaluate(&x, r, &p, &mut dx).unwrap();
        assert_eq!(x.filter(2).rho_c, out.alpha[0]);
        assert_eq!(dx.filter(2).rho_c, 0.0);
        assert_abs_diff_eq!(out.zeta[0].abs(), 0.1, epsilon = 1e-15);
        assert!(out.u.is_finite());
    }
}
