//! Classic fixed-step fourth-order Runge–Kutta.

use crate::error::{Error, Result};

/// Scratch buffers for repeated steps of one system.
#[derive(Debug, Clone)]
pub struct Rk4 {
    k: [Vec<f64>; 4],
    stage: Vec<f64>,
}

impl Rk4 {
    pub fn new(len: usize) -> Self {
        Self { k: std::array::from_fn(|_| vec![0.0; len]), stage: vec![0.0; len] }
    }

    /// Advances `y` from `t` to `t + dt` in place.
    ///
    /// `rhs(stage, t, y, dy)` is called with `stage = 0..4`; stage 0 is
    /// evaluated at `(t, y)` itself. A non-finite result is reported with
    /// the component named by `name`, and `y` is left untouched.
    pub fn step<F, N>(&mut self, t: f64, y: &mut [f64], dt: f64, mut rhs: F, name: N) -> Result<()>
    where
        F: FnMut(usize, f64, &[f64], &mut [f64]) -> Result<()>,
        N: Fn(usize) -> String,
    {
        let n = y.len();
        assert_eq!(n, self.stage.len(), "workspace sized for a different system");
        let [k1, k2, k3, k4] = &mut self.k;
        let st = &mut self.stage;

        rhs(0, t, y, k1)?;
        for j in 0..n {
            st[j] = y[j] + 0.5 * dt * k1[j];
        }
        rhs(1, t + 0.5 * dt, st, k2)?;
        for j in 0..n {
            st[j] = y[j] + 0.5 * dt * k2[j];
        }
        rhs(2, t + 0.5 * dt, st, k3)?;
        for j in 0..n {
            st[j] = y[j] + dt * k3[j];
        }
        rhs(3, t + dt, st, k4)?;
        for j in 0..n {
            st[j] = y[j] + dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
        if let Some(bad) = st.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { signal: name(bad), t: t + dt });
        }
        y.copy_from_slice(st);
        Ok(())
    }
}

/// One step of `ẏ = f(t, y)`, allocating its own workspace.
pub fn rk4_step<F>(mut f: F, t: f64, y: &[f64], dt: f64) -> Result<Vec<f64>>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    if !(dt > 0.0) {
        return Err(Error::domain("dt", "must be positive"));
    }
    let mut out = y.to_vec();
    Rk4::new(y.len()).step(
        t,
        &mut out,
        dt,
        |_, t, y, dy| {
            f(t, y, dy);
            Ok(())
        },
        |k| format!("y[{k}]"),
    )?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_rhs_keeps_state() {
        let y = rk4_step(|_, _, dy| dy.fill(0.0), 0.0, &[1.0, -2.0], 0.1).unwrap();
        assert_eq!(y, vec![1.0, -2.0]);
    }

    #[test]
    fn unit_rate() {
        let y = rk4_step(|_, _, dy| dy[0] = 1.0, 0.0, &[0.5], 0.01).unwrap();
        assert_eq!(y[0], 0.5 + 0.01);
    }

    #[test]
    fn exponential_decay() {
        let mut y = vec![1.0];
        let mut ws = Rk4::new(1);
        for k in 0..1000 {
            ws.step(k as f64 * 1e-3, &mut y, 1e-3, |_, _, y, dy| {
                dy[0] = -y[0];
                Ok(())
            }, |_| "x".into())
            .unwrap();
        }
        assert!((y[0] - (-1.0f64).exp()).abs() < 1e-9);
    }

    #[test]
    fn non_finite_is_named() {
        let err = rk4_step(|_, y, dy| dy.copy_from_slice(&[0.0, 1.0 / (y[1] - 1.0)]), 0.0, &[0.0, 1.0], 0.1).unwrap_err();
        assert_eq!(err, Error::NonFinite { signal: "y[1]".into(), t: 0.1 });
        assert!(rk4_step(|_, _, _| {}, 0.0, &[0.0], 0.0).is_err());
    }
}
