//! Strict-feedback plants `ρ̇_i = h_i(ρ̄_i) + g_i(ρ̄_i)ρ_{i+1} + d_i(t)`, with
//! `ρ_{n+1} = u`.

use crate::error::{Error, Result};

/// The part of a plant a controller is allowed to see: its input gains.
///
/// Controllers take `&dyn InputGains`, never the full model, so the unknown
/// drift `h_i` and disturbances `d_i` stay out of reach.
pub trait InputGains: Send + Sync {
    fn order(&self) -> usize;

    /// `g_i(ρ̄_i)` for 1-based level `i`.
    fn input_gain(&self, i: usize, rho: &[f64]) -> f64;
}

/// Additive disturbance acting on one state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Disturbance {
    Zero,
    /// `amplitude·sin(frequency·t)`
    Sine { amplitude: f64, frequency: f64 },
}

impl Disturbance {
    #[inline]
    pub fn at(&self, t: f64) -> f64 {
        match *self {
            Disturbance::Zero => 0.0,
            Disturbance::Sine { amplitude, frequency } => amplitude * (frequency * t).sin(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match *self {
            Disturbance::Zero => true,
            Disturbance::Sine { amplitude, .. } => amplitude == 0.0,
        }
    }
}

/// Cart-pole parameters: gravity, cart mass, pole mass, pole half-length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PendulumParams {
    pub g_e: f64,
    pub m_c: f64,
    pub m_a: f64,
    pub l_a: f64,
}

impl Default for PendulumParams {
    fn default() -> Self {
        Self { g_e: 9.81, m_c: 1.0, m_a: 0.1, l_a: 0.5 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PlantKind {
    /// Inverted pendulum on a cart, angle and angular rate as states.
    Pendulum(PendulumParams),
    /// `h ≡ 0`, `g ≡ 1`.
    IntegratorChain { order: usize },
    /// Second-order chain with `h1 = 0.1ρ1²`, `h2 = 0.1ρ1ρ2`, `g ≡ 1`.
    Oracle,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlantModel {
    kind: PlantKind,
    disturbances: Vec<Disturbance>,
}

impl PlantModel {
    /// Pendulum with disturbance `d2` on the rate equation (`d1 = 0`).
    pub fn pendulum(params: PendulumParams, d2: Disturbance) -> Result<Self> {
        for (name, v) in [("g_e", params.g_e), ("m_c", params.m_c), ("m_a", params.m_a), ("l_a", params.l_a)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Config(format!("plant.{name} must be positive (got {v})")));
            }
        }
        Ok(Self {
            kind: PlantKind::Pendulum(params),
            disturbances: vec![Disturbance::Zero, d2],
        })
    }

    pub fn integrator_chain(order: usize, disturbances: Vec<Disturbance>) -> Result<Self> {
        if order == 0 {
            return Err(Error::Config("plant.order must be at least 1".into()));
        }
        Self::with_disturbances(PlantKind::IntegratorChain { order }, order, disturbances)
    }

    pub fn oracle(disturbances: Vec<Disturbance>) -> Result<Self> {
        Self::with_disturbances(PlantKind::Oracle, 2, disturbances)
    }

    fn with_disturbances(kind: PlantKind, order: usize, mut d: Vec<Disturbance>) -> Result<Self> {
        if d.is_empty() {
            d = vec![Disturbance::Zero; order];
        }
        if d.len() != order {
            return Err(Error::DimensionMismatch { what: "disturbances", expected: order, found: d.len() });
        }
        Ok(Self { kind, disturbances: d })
    }

    pub fn kind(&self) -> &PlantKind {
        &self.kind
    }

    pub fn disturbances(&self) -> &[Disturbance] {
        &self.disturbances
    }

    pub fn order(&self) -> usize {
        self.disturbances.len()
    }

    /// Unknown drift `h_i(ρ̄_i)`, 1-based `i`.
    pub fn drift(&self, i: usize, rho: &[f64]) -> f64 {
        match &self.kind {
            PlantKind::Pendulum(p) => {
                if i == 1 {
                    0.0
                } else {
                    let (s, c) = rho[0].sin_cos();
                    let total = p.m_c + p.m_a;
                    let num = p.g_e * s - p.m_a * p.l_a * rho[1] * rho[1] * c * s / total;
                    num / pendulum_denominator(p, rho[0])
                }
            }
            PlantKind::IntegratorChain { .. } => 0.0,
            PlantKind::Oracle => match i {
                1 => 0.1 * rho[0] * rho[0],
                _ => 0.1 * rho[0] * rho[1],
            },
        }
    }

    pub fn disturbance(&self, i: usize, t: f64) -> f64 {
        self.disturbances[i - 1].at(t)
    }

    /// `ρ̇` for input `u` at time `t`.
    pub fn rhs(&self, rho: &[f64], u: f64, t: f64, out: &mut [f64]) {
        let n = self.order();
        for i in 1..=n {
            let next = if i < n { rho[i] } else { u };
            out[i - 1] = self.drift(i, rho) + self.input_gain(i, rho) * next + self.disturbance(i, t);
        }
    }
}

#[inline]
fn pendulum_denominator(p: &PendulumParams, angle: f64) -> f64 {
    let c = angle.cos();
    p.l_a * (4.0 / 3.0 - p.m_a * c * c / (p.m_c + p.m_a))
}

impl InputGains for PlantModel {
    fn order(&self) -> usize {
        self.disturbances.len()
    }

    fn input_gain(&self, i: usize, rho: &[f64]) -> f64 {
        match &self.kind {
            PlantKind::Pendulum(p) if i == 2 => {
                rho[0].cos() / (p.m_c + p.m_a) / pendulum_denominator(p, rho[0])
            }
            _ => 1.0,
        }
    }
}

/// Sample of the reference output and its derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefSample {
    pub y: f64,
    pub y_dot: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ReferenceSignal {
    /// `amplitude·sin(frequency·t)`
    Sine { amplitude: f64, frequency: f64 },
    Constant(f64),
}

impl ReferenceSignal {
    #[inline]
    pub fn sample(&self, t: f64) -> RefSample {
        match *self {
            ReferenceSignal::Sine { amplitude, frequency } => {
                let (s, c) = (frequency * t).sin_cos();
                RefSample { y: amplitude * s, y_dot: amplitude * frequency * c }
            }
            ReferenceSignal::Constant(y) => RefSample { y, y_dot: 0.0 },
        }
    }
}
