use std::f64::consts::PI;

use super::Reference;
use crate::error::{Error, Result};

/// `u(t, x) = 2νπ e^{−νπ²t} sin(πx) / (2 + e^{−νπ²t} cos(πx))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Problem1Exact {
    pub nu: f64,
}

impl Problem1Exact {
    pub fn new(nu: f64) -> Result<Self> {
        if !(nu > 0.0) {
            return Err(Error::Config(format!("viscosity must be positive, got {nu}")));
        }
        Ok(Problem1Exact { nu })
    }

    pub fn initial(&self, x: f64) -> f64 {
        2.0 * self.nu * PI * (PI * x).sin() / (2.0 + (PI * x).cos())
    }

    pub fn u(&self, t: f64, x: f64) -> f64 {
        let decay = (-self.nu * PI * PI * t).exp();
        2.0 * self.nu * PI * decay * (PI * x).sin() / (2.0 + decay * (PI * x).cos())
    }

    /// `u_t + u u_x − ν u_xx` of the closed form, with fourth-order central
    /// differences of step `delta` in both variables.
    pub fn residual_check(&self, t: f64, x: f64, delta: f64) -> f64 {
        self.residual_of(|t, x| self.u(t, x), t, x, delta)
    }

    pub(crate) fn residual_of(&self, u: impl Fn(f64, f64) -> f64, t: f64, x: f64, h: f64) -> f64 {
        let d1 = |f: &dyn Fn(f64) -> f64, s: f64| {
            (-f(s + 2.0 * h) + 8.0 * f(s + h) - 8.0 * f(s - h) + f(s - 2.0 * h)) / (12.0 * h)
        };
        let d2 = |f: &dyn Fn(f64) -> f64, s: f64| {
            (-f(s + 2.0 * h) + 16.0 * f(s + h) - 30.0 * f(s) + 16.0 * f(s - h)
                - f(s - 2.0 * h))
                / (12.0 * h * h)
        };
        let in_t = |s: f64| u(s, x);
        let in_x = |s: f64| u(t, s);
        let u_t = d1(&in_t, t);
        let u_x = d1(&in_x, x);
        let u_xx = d2(&in_x, x);
        u_t + u(t, x) * u_x - self.nu * u_xx
    }
}

impl Reference for Problem1Exact {
    fn eval(&self, t: f64, x: f64) -> Result<f64> {
        Ok(self.u(t, x))
    }
}
