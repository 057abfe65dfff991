//! Physics-informed neural networks with implicit-Euler transfer learning for
//! the viscous Burgers equation
//!
//! ```text
//! u_t + u u_x = ν u_xx,   (t, x) ∈ (0, t_f] × (0, 1),   u(t, 0) = u(t, 1) = 0
//! ```
//!
//! The solution at each time level `t_k = k·h` is represented by its own
//! `1 − n×L − 1` tanh network. The network for level `k` starts from a copy of
//! the trained network for level `k − 1` and is trained on the residual of the
//! implicit Euler step
//!
//! ```text
//! R(x) = ũ_k − ũ_{k−1} − h (ν ũ_k'' − ũ_k ũ_k')
//! ```
//!
//! with the input derivatives `ũ'`, `ũ''` obtained by forward jet propagation
//! and parameter gradients by a reverse sweep over the recorded jets.
//!
//! Modules:
//! - [`autodiff`]: second-order jets and the layer tape.
//! - [`network`]: the MLP, its initialization and checkpoint format.
//! - [`optimizer`]: Adam and the thresholded training loop.
//! - [`solver`]: losses, residual and the time-stepping driver.
//! - [`oracles`]: closed-form, quadrature and finite-difference references.
//! - [`field`]: sampled solutions, relative error and their CSV format.

// `!(x > 0.0)` is used on purpose so that NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod autodiff;
pub mod error;
pub mod field;
pub mod network;
pub mod optimizer;
pub mod oracles;
mod real;
pub mod solver;

pub use autodiff::{Jet, Tape};
pub use error::{Error, Result};
pub use field::{rel_error, SolutionField};
pub use network::{Architecture, MlpParams};
pub use optimizer::{AdamConfig, AdamState, TrainOutcome, TrainSettings};
pub use real::{Precision, Real};
pub use solver::{
    InitialCondition, SampleSet, SolveOptions, SolveOutcome, SolverConfig, TimeStepRecord,
};
