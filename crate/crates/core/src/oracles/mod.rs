//! Reference solutions used to score the networks.
//!
//! - [`Problem1Exact`]: closed form for `u₀ = 2νπ sin(πx)/(2 + cos(πx))`.
//! - [`Problem2Exact`]: Cole–Hopf integral for `u₀ = −sin(πx)`, by
//!   log-stabilized Gauss–Legendre quadrature.
//! - [`FdReference`]: the same implicit Euler scheme on a fine
//!   finite-difference grid, solved by Newton's method.

mod fd;
mod problem1;
mod problem2;
pub mod quadrature;

pub use fd::FdReference;
pub use problem1::Problem1Exact;
pub use problem2::Problem2Exact;

use crate::error::Result;
use crate::field::SolutionField;

/// A solution `u(t, x)` that can be evaluated pointwise.
pub trait Reference: Sync {
    fn eval(&self, t: f64, x: f64) -> Result<f64>;

    fn field(&self, t: f64, x: &[f64]) -> Result<SolutionField> {
        let u = x.iter().map(|&xi| self.eval(t, xi)).collect::<Result<_>>()?;
        SolutionField::new(t, x.to_vec(), u)
    }
}
