use std::f64::consts::PI;

use super::quadrature::{composite, gauss_legendre};
use super::Reference;
use crate::error::{Error, Result};

const POINTS_PER_PANEL: usize = 16;

/// Cole–Hopf solution for `u₀ = −sin(πx)`:
///
/// ```text
/// u(t, x) = −∫ sin(π(x−η)) f(x−η) G(η) dη / ∫ f(x−η) G(η) dη
/// f(y) = exp(−cos(πy) / (2πν)),   G(η) = exp(−η² / (4νt))
/// ```
///
/// Both integrals run over `|η| ≤ R·√(4νt)` and share the exponent
/// `g(η) = −η²/(4νt) − cos(π(x−η))/(2πν)`, whose maximum is subtracted before
/// exponentiating (it cancels in the ratio).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Problem2Exact {
    pub nu: f64,
    /// Total quadrature nodes of the first evaluation.
    pub nodes: usize,
    /// Truncation radius in units of `√(4νt)`.
    pub radius: f64,
    /// Accepted relative change between successive node doublings.
    pub tolerance: f64,
    pub max_doublings: usize,
}

impl Problem2Exact {
    pub fn new(nu: f64) -> Result<Self> {
        Problem2Exact {
            nu,
            nodes: 512,
            radius: 10.0,
            tolerance: 1e-9,
            max_doublings: 5,
        }
        .validated()
    }

    pub fn validated(self) -> Result<Self> {
        if !(self.nu > 0.0) {
            return Err(Error::Config(format!(
                "viscosity must be positive, got {}",
                self.nu
            )));
        }
        if self.nodes < 64 || !self.nodes.is_multiple_of(POINTS_PER_PANEL) {
            return Err(Error::Config(format!(
                "quadrature node count {} must be a multiple of {POINTS_PER_PANEL} and at least 64",
                self.nodes
            )));
        }
        if !(self.radius > 0.0) || !(self.tolerance > 0.0) {
            return Err(Error::Config("quadrature radius and tolerance must be positive".into()));
        }
        Ok(self)
    }

    pub fn initial(&self, x: f64) -> f64 {
        -(PI * x).sin()
    }

    /// The ratio with a fixed number of nodes.
    pub fn ratio_with(&self, t: f64, x: f64, nodes: usize) -> f64 {
        let scale = (4.0 * self.nu * t).sqrt();
        let half = self.radius * scale;
        let rule = gauss_legendre(POINTS_PER_PANEL);
        let (etas, weights) = composite(-half, half, nodes / POINTS_PER_PANEL, &rule);
        let kappa = 1.0 / (2.0 * PI * self.nu);
        let exponents: Vec<f64> = etas
            .iter()
            .map(|&eta| -(eta / scale).powi(2) - kappa * (PI * (x - eta)).cos())
            .collect();
        let top = exponents.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let (mut num, mut den) = (0.0, 0.0);
        for ((&eta, &w), &g) in etas.iter().zip(&weights).zip(&exponents) {
            let e = w * (g - top).exp();
            num += (PI * (x - eta)).sin() * e;
            den += e;
        }
        -num / den
    }

    pub fn u(&self, t: f64, x: f64) -> Result<f64> {
        if t == 0.0 {
            return Ok(self.initial(x));
        }
        let mut nodes = self.nodes;
        let mut prev = self.ratio_with(t, x, nodes);
        let mut change = f64::INFINITY;
        for _ in 0..self.max_doublings {
            nodes *= 2;
            let next = self.ratio_with(t, x, nodes);
            change = (next - prev).abs() / next.abs().max(1e-3);
            if change <= self.tolerance {
                return Ok(next);
            }
            prev = next;
        }
        Err(Error::Quadrature { t, x, change })
    }
}

impl Reference for Problem2Exact {
    fn eval(&self, t: f64, x: f64) -> Result<f64> {
        self.u(t, x)
    }
}
