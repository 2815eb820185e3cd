//! Serial-parallel estimation model.
//!
//! Each level runs a predictor `ρ̂_i` from measured signals only; the
//! prediction error `z_iN = ρ_i - ρ̂_i` is the extra excitation fed into the
//! composite learning laws.

use crate::controller::{ControllerVariant, GainSet, NeuralForm, SubsystemSignals, Timing};
use crate::error::Result;
use crate::learning::{drive_d, drive_tau, leakage_rate};
use crate::math::signed_pow;

#[derive(Debug, Clone, PartialEq)]
pub struct SpemState {
    pub rho_hat: Vec<f64>,
    pub z: Vec<f64>,
}

/// `dρ̂_i/dt`.
pub fn spem_rhs(sig: &SubsystemSignals, variant: &ControllerVariant, gains: &GainSet) -> Result<f64> {
    let s = gains.level(sig.index)?;
    let l = &s.learning;
    let z = sig.z;
    let neural = match variant.neural_form {
        NeuralForm::SquaredNorm => sig.w / (2.0 * s.a * s.a) * sig.theta * z * sig.psi_sq,
        NeuralForm::NormPlusEps | NeuralForm::Norm => {
            sig.w * sig.theta * sig.psi_h * (sig.psi_h * z / l.eta_theta_n).tanh()
        }
    };
    let robust = (1.0 - sig.w) * sig.tau_hat_n * sig.bound * (sig.bound * z / l.eta_n).tanh();
    let correction = match variant.timing {
        Timing::FiniteTime => s.r1 * z + s.r2 * signed_pow(z, gains.m),
        Timing::FixedTime => s.r1 * signed_pow(z, gains.r) + s.r2 * signed_pow(z, gains.m),
    };
    let disturbance = sig.d_hat_n * (z / l.eta_dn).tanh();
    Ok(neural + robust + sig.g * sig.next_state + correction + disturbance)
}

/// Rates of the predictor's own robust and disturbance bounds,
/// `(dτ̂_iN/dt, dd̂_iN/dt)`.
pub fn observer_adapt_rates(
    sig: &SubsystemSignals,
    variant: &ControllerVariant,
    gains: &GainSet,
) -> Result<(f64, f64)> {
    let s = gains.level(sig.index)?;
    let l = &s.learning;
    let tau = leakage_rate(
        sig.tau_hat_n,
        l.delta_1n * drive_tau(sig.w, sig.bound, sig.z, l.eta_n),
        &gains.leak(l.delta_2n, l.delta_3n),
        variant.timing,
    );
    let d = leakage_rate(
        sig.d_hat_n,
        l.q_1n * drive_d(sig.z, l.eta_dn),
        &gains.leak(l.q_2n, l.q_3n),
        variant.timing,
    );
    Ok((tau, d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::controller::testing::{gains_with, signals};
    use crate::controller::{NeuralForm, Sharing};
    use crate::error::Error;
    use approx::assert_abs_diff_eq;

    const M1: ControllerVariant = ControllerVariant::new(Timing::FiniteTime, NeuralForm::SquaredNorm, Sharing::PerSubsystem);

    #[test]
    fn zero_error_passes_through_input() {
        let g = gains_with(|_| {});
        for v in ControllerVariant::all() {
            let mut sig = signals(1);
            sig.g = 1.3;
            sig.next_state = 0.4;
            sig.w = 0.3;
            assert_abs_diff_eq!(spem_rhs(&sig, &v, &g).unwrap(), 1.3 * 0.4, epsilon = 1e-15);
        }
    }

    #[test]
    fn squared_norm_example() {
        let g = gains_with(|s| {
            s.a = 1.0;
            s.r1 = 1.0;
            s.r2 = 1.0;
        });
        let mut sig = signals(1);
        sig.w = 1.0;
        sig.z = 0.1;
        sig.theta = 1.0;
        sig.psi_sq = 2.0;
        sig.g = 0.0;
        sig.tau_hat_n = 7.0;
        assert_abs_diff_eq!(spem_rhs(&sig, &M1, &g).unwrap(), 0.451_188_643_150_958, epsilon = 1e-12);
    }

    #[test]
    fn full_switch_removes_robust_term() {
        let g = gains_with(|_| {});
        let mut sig = signals(2);
        sig.w = 1.0;
        sig.z = 0.2;
        sig.bound = 1.0;
        let base = spem_rhs(&sig, &M1, &g).unwrap();
        sig.tau_hat_n = 50.0;
        assert_eq!(spem_rhs(&sig, &M1, &g).unwrap(), base);
        sig.w = 0.0;
        assert!(spem_rhs(&sig, &M1, &g).unwrap() > base);
    }

    #[test]
    fn adapt_rate_examples() {
        let g = gains_with(|s| {
            s.learning.delta_1n = 10.0;
            s.learning.delta_2n = 0.0;
            s.learning.delta_3n = 0.0;
            s.learning.eta_n = 1.0;
        });
        let sig = signals(1);
        assert_eq!(observer_adapt_rates(&sig, &M1, &g).unwrap(), (0.0, 0.0));
        let mut sig = signals(1);
        sig.w = 1.0;
        sig.z = 0.5;
        assert_eq!(observer_adapt_rates(&sig, &M1, &g).unwrap().0, 0.0);
        let mut sig = signals(1);
        sig.w = 0.0;
        sig.bound = 1.0;
        sig.z = 1.0;
        assert_abs_diff_eq!(observer_adapt_rates(&sig, &M1, &g).unwrap().0, 7.615_941_559_557_649, epsilon = 1e-12);
    }

    #[test]
    fn index_out_of_range() {
        let g = gains_with(|_| {});
        let sig = signals(3);
        assert!(matches!(spem_rhs(&sig, &M1, &g), Err(Error::IndexOutOfRange { .. })));
        assert!(matches!(observer_adapt_rates(&signals(0), &M1, &g), Err(Error::IndexOutOfRange { .. })));
    }
}
