//! Coupled plant/controller state stored as one flat vector so the whole
//! closed loop advances as a single ODE.

use crate::controller::filter::FilterState;
use crate::controller::NeuralForm;
use crate::learning::AdaptiveEstimates;
use crate::observer::SpemState;

/// Offsets of each signal group inside the flat state vector.
///
/// Order: `ρ`, `σ`, filter pairs `(ρ_c, ρ̇_c)` for levels `2..=n`, neural
/// estimates, `τ̂`, `d̂`, `τ̂_N`, `d̂_N`, `ρ̂`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StateLayout {
    order: usize,
    theta_len: usize,
    neural_symbol: char,
}

impl StateLayout {
    pub fn new(order: usize, shared: bool, form: NeuralForm) -> Self {
        Self {
            order,
            theta_len: if shared { 1 } else { order },
            neural_symbol: match form {
                NeuralForm::SquaredNorm => 'L',
                _ => 'N',
            },
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn theta_len(&self) -> usize {
        self.theta_len
    }

    pub fn len(&self) -> usize {
        let n = self.order;
        n + n + 2 * (n - 1) + self.theta_len + 4 * n + n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn sigma_at(&self) -> usize {
        self.order
    }
    fn filter_at(&self) -> usize {
        2 * self.order
    }
    fn theta_at(&self) -> usize {
        self.filter_at() + 2 * (self.order - 1)
    }
    fn tau_at(&self) -> usize {
        self.theta_at() + self.theta_len
    }
    fn d_at(&self) -> usize {
        self.tau_at() + self.order
    }
    fn tau_n_at(&self) -> usize {
        self.d_at() + self.order
    }
    fn d_n_at(&self) -> usize {
        self.tau_n_at() + self.order
    }
    fn rho_hat_at(&self) -> usize {
        self.d_n_at() + self.order
    }

    /// Name of the neural estimate column(s), e.g. `L_hat1` or `N_hat`.
    pub fn theta_name(&self, k: usize) -> String {
        if self.theta_len == 1 {
            format!("{}_hat", self.neural_symbol)
        } else {
            format!("{}_hat{}", self.neural_symbol, k + 1)
        }
    }

    /// Signal name of flat index `idx`, for diagnostics.
    pub fn component_name(&self, idx: usize) -> String {
        let n = self.order;
        let groups: [(usize, &str); 8] = [
            (self.rho_hat_at(), "rho_hat"),
            (self.d_n_at(), "d_hat_N"),
            (self.tau_n_at(), "tau_hat_N"),
            (self.d_at(), "d_hat"),
            (self.tau_at(), "tau_hat"),
            (self.theta_at(), ""),
            (self.filter_at(), "filter"),
            (self.sigma_at(), "sigma"),
        ];
        for (start, name) in groups {
            if idx >= start {
                let k = idx - start;
                return match name {
                    "" => self.theta_name(k),
                    "filter" => {
                        let level = k / 2 + 2;
                        if k % 2 == 0 {
                            format!("rho_c{level}")
                        } else {
                            format!("rho_c_dot{level}")
                        }
                    }
                    _ => format!("{name}{}", k + 1),
                };
            }
        }
        debug_assert!(idx < n);
        format!("rho{}", idx + 1)
    }
}

/// Full closed-loop state at time `t`. Also used for its time derivative.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemState {
    pub t: f64,
    layout: StateLayout,
    data: Vec<f64>,
}

macro_rules! group {
    ($get:ident, $get_mut:ident, $at:ident, $len:expr) => {
        pub fn $get(&self) -> &[f64] {
            let s = self.layout.$at();
            &self.data[s..s + $len(&self.layout)]
        }
        pub fn $get_mut(&mut self) -> &mut [f64] {
            let s = self.layout.$at();
            let l = $len(&self.layout);
            &mut self.data[s..s + l]
        }
    };
}

impl SystemState {
    pub fn zeros(layout: StateLayout) -> Self {
        Self { t: 0.0, layout, data: vec![0.0; layout.len()] }
    }

    pub fn layout(&self) -> &StateLayout {
        &self.layout
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn rho(&self) -> &[f64] {
        &self.data[..self.layout.order]
    }

    pub fn rho_mut(&mut self) -> &mut [f64] {
        let n = self.layout.order;
        &mut self.data[..n]
    }

    group!(sigma, sigma_mut, sigma_at, |l: &StateLayout| l.order);
    group!(theta, theta_mut, theta_at, |l: &StateLayout| l.theta_len);
    group!(tau_hat, tau_hat_mut, tau_at, |l: &StateLayout| l.order);
    group!(d_hat, d_hat_mut, d_at, |l: &StateLayout| l.order);
    group!(tau_hat_n, tau_hat_n_mut, tau_n_at, |l: &StateLayout| l.order);
    group!(d_hat_n, d_hat_n_mut, d_n_at, |l: &StateLayout| l.order);
    group!(rho_hat, rho_hat_mut, rho_hat_at, |l: &StateLayout| l.order);

    /// Filter of level `i ∈ 2..=n`.
    pub fn filter(&self, i: usize) -> FilterState {
        let s = self.layout.filter_at() + 2 * (i - 2);
        FilterState { rho_c: self.data[s], rho_c_dot: self.data[s + 1] }
    }

    pub fn set_filter(&mut self, i: usize, fs: FilterState) {
        let s = self.layout.filter_at() + 2 * (i - 2);
        self.data[s] = fs.rho_c;
        self.data[s + 1] = fs.rho_c_dot;
    }

    /// Neural estimate used by 1-based level `i`.
    #[inline]
    pub fn theta_for(&self, i: usize) -> f64 {
        let th = self.theta();
        if th.len() == 1 {
            th[0]
        } else {
            th[i - 1]
        }
    }

    pub fn estimates(&self) -> AdaptiveEstimates {
        AdaptiveEstimates {
            theta: self.theta().to_vec(),
            tau_hat: self.tau_hat().to_vec(),
            d_hat: self.d_hat().to_vec(),
            tau_hat_n: self.tau_hat_n().to_vec(),
            d_hat_n: self.d_hat_n().to_vec(),
        }
    }

    pub fn spem(&self) -> SpemState {
        let rho_hat = self.rho_hat().to_vec();
        let z = self.rho().iter().zip(&rho_hat).map(|(r, h)| r - h).collect();
        SpemState { rho_hat, z }
    }

    /// Prediction error `z_iN = ρ_i - ρ̂_i` of 1-based level `i`.
    #[inline]
    pub fn prediction_error(&self, i: usize) -> f64 {
        self.rho()[i - 1] - self.rho_hat()[i - 1]
    }

    /// First non-finite component, if any.
    pub fn first_non_finite(&self) -> Option<String> {
        self.data
            .iter()
            .position(|v| !v.is_finite())
            .map(|idx| self.layout.component_name(idx))
    }
}
