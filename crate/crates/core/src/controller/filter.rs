//! Command filter producing a smoothed virtual control and its derivative.
//!
//! Realized as a second-order tracking filter with mixed fractional powers:
//!
//! `ρ̈_c = -2ω·s(ρ̇_c) - ω²·s(ρ_c - α)`, `s(x) = l1·x^{m_f} + l2·x^{r_f}`
//!
//! with odd (sign-preserving) powers. `m_f < 1` gives finite-time
//! convergence; `r_f > 1` adds the fixed-time high-order term.

use crate::controller::gains::FilterGains;
use crate::math::signed_pow;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FilterState {
    pub rho_c: f64,
    pub rho_c_dot: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CommandFilter {
    gains: FilterGains,
}

impl CommandFilter {
    pub fn new(gains: FilterGains) -> Self {
        Self { gains }
    }

    pub fn gains(&self) -> &FilterGains {
        &self.gains
    }

    #[inline]
    fn shape(&self, x: f64) -> f64 {
        let g = &self.gains;
        g.l1 * signed_pow(x, g.m_f) + g.l2 * signed_pow(x, g.r_f)
    }

    /// `(ρ̇_c, ρ̈_c)` for input `alpha_in`.
    #[inline]
    pub fn rates(&self, fs: FilterState, alpha_in: f64) -> (f64, f64) {
        let w = self.gains.omega;
        let acc = -2.0 * w * self.shape(fs.rho_c_dot) - w * w * self.shape(fs.rho_c - alpha_in);
        (fs.rho_c_dot, acc)
    }

    /// Advances the filter by `dt` with the input held constant (RK4).
    pub fn step(&self, fs: FilterState, alpha_in: f64, dt: f64) -> FilterState {
        let f = |s: FilterState| self.rates(s, alpha_in);
        let add = |s: FilterState, k: (f64, f64), h: f64| FilterState {
            rho_c: s.rho_c + h * k.0,
            rho_c_dot: s.rho_c_dot + h * k.1,
        };
        let k1 = f(fs);
        let k2 = f(add(fs, k1, 0.5 * dt));
        let k3 = f(add(fs, k2, 0.5 * dt));
        let k4 = f(add(fs, k3, dt));
        FilterState {
            rho_c: fs.rho_c + dt / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0),
            rho_c_dot: fs.rho_c_dot + dt / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1),
        }
    }
}
