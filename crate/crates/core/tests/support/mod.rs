//! Finite-difference oracles shared by the integration and acceptance
//! suites. Everything here goes through `MlpParams::eval` or plain loss
//! values only, never through jets or the tape.
#![allow(dead_code)]

use burgers_pinn::{Architecture, MlpParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Network with every weight and bias drawn from `U(−scale, scale)`.
pub fn random_net(arch: Architecture, seed: u64, scale: f64) -> MlpParams<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = (0..arch.parameter_count())
        .map(|_| rng.gen_range(-scale..scale))
        .collect();
    MlpParams::from_vec(arch, data).unwrap()
}

/// Central first difference of `f` at `x`.
pub fn central_d1(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

/// Central second difference of `f` at `x`.
pub fn central_d2(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h)
}

/// `∂loss/∂θ_i` for every parameter by central differences.
pub fn fd_gradient(
    params: &MlpParams<f64>,
    loss: impl Fn(&MlpParams<f64>) -> f64,
    h: f64,
) -> Vec<f64> {
    let mut probe = params.clone();
    (0..params.len())
        .map(|i| {
            let base = params.as_slice()[i];
            probe.as_mut_slice()[i] = base + h;
            let up = loss(&probe);
            probe.as_mut_slice()[i] = base - h;
            let down = loss(&probe);
            probe.as_mut_slice()[i] = base;
            (up - down) / (2.0 * h)
        })
        .collect()
}

/// `|a − b| / max(|a|, |b|, floor)`.
pub fn rel_diff(a: f64, b: f64, floor: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(floor)
}

/// Largest componentwise relative difference; components are compared
/// relative to at least `1e-4 · max|reference|` so that entries many orders
/// below the gradient's scale are judged on an absolute basis.
pub fn max_rel_diff(analytic: &[f64], reference: &[f64]) -> f64 {
    let scale = reference.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let floor = (1e-4 * scale).max(1e-12);
    analytic
        .iter()
        .zip(reference)
        .map(|(&a, &b)| rel_diff(a, b, floor))
        .fold(0.0, f64::max)
}
