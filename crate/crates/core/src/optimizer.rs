//! Adam with bias correction and a loss-threshold training loop.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::MlpParams;
use crate::real::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AdamConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        AdamConfig {
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

/// Moment estimates for one optimization problem.
#[derive(Debug, Clone)]
pub struct AdamState<T> {
    pub m: Vec<T>,
    pub v: Vec<T>,
    pub steps: u64,
    lr: T,
    beta1: T,
    beta2: T,
    eps: T,
}

impl<T: Real> AdamState<T> {
    pub fn new(n_params: usize, config: AdamConfig) -> Self {
        AdamState {
            m: vec![T::zero(); n_params],
            v: vec![T::zero(); n_params],
            steps: 0,
            lr: T::of(config.learning_rate),
            beta1: T::of(config.beta1),
            beta2: T::of(config.beta2),
            eps: T::of(config.epsilon),
        }
    }

    /// One bias-corrected Adam update of `params` in place.
    ///
    /// A non-finite gradient leaves `params` and the moments untouched and
    /// reports the first offending index (with `epoch` set to the step count).
    pub fn step(&mut self, params: &mut [T], grad: &[T]) -> Result<()> {
        if grad.len() != params.len() || grad.len() != self.m.len() {
            return Err(Error::Dimension {
                context: "adam step",
                expected: self.m.len(),
                actual: grad.len(),
            });
        }
        if let Some(index) = grad.iter().position(|g| !g.is_finite()) {
            return Err(Error::NonFiniteGradient {
                epoch: self.steps as usize,
                index,
            });
        }
        self.steps += 1;
        let one = T::one();
        let t = self.steps.min(i32::MAX as u64) as i32;
        let c1 = one - self.beta1.powi(t);
        let c2 = one - self.beta2.powi(t);
        for (((p, &g), m), v) in params
            .iter_mut()
            .zip(grad)
            .zip(self.m.iter_mut())
            .zip(self.v.iter_mut())
        {
            *m = self.beta1 * *m + (one - self.beta1) * g;
            *v = self.beta2 * *v + (one - self.beta2) * g * g;
            let m_hat = *m / c1;
            let v_hat = *v / c2;
            *p -= self.lr * m_hat / (v_hat.sqrt() + self.eps);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainSettings {
    /// Samples per gradient step; `None` means the whole sample set.
    pub batch_size: Option<usize>,
    pub max_epochs: usize,
    pub tolerance: f64,
    /// The full-sample loss is compared with the tolerance every this many
    /// epochs (and always at the cap).
    pub check_every: usize,
    pub shuffle_seed: u64,
    pub adam: AdamConfig,
}

impl Default for TrainSettings {
    fn default() -> Self {
        TrainSettings {
            batch_size: None,
            max_epochs: 50_000,
            tolerance: 1e-6,
            check_every: 1,
            shuffle_seed: 0,
            adam: AdamConfig::default(),
        }
    }
}

impl TrainSettings {
    pub fn validate(&self, n_samples: usize) -> Result<()> {
        if let Some(b) = self.batch_size {
            if b == 0 || b > n_samples {
                return Err(Error::Invalid {
                    key: "batch_size",
                    reason: format!("{b} outside 1..={n_samples}"),
                });
            }
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::Invalid {
                key: "tolerance",
                reason: format!("must be positive, got {}", self.tolerance),
            });
        }
        if self.check_every == 0 {
            return Err(Error::Invalid {
                key: "check_every",
                reason: "must be at least 1".into(),
            });
        }
        let a = &self.adam;
        if !(a.learning_rate > 0.0)
            || !(0.0..1.0).contains(&a.beta1)
            || !(0.0..1.0).contains(&a.beta2)
            || !(a.epsilon > 0.0)
        {
            return Err(Error::Invalid {
                key: "adam",
                reason: format!("{a:?}"),
            });
        }
        Ok(())
    }
}

/// A loss that is a sum of per-sample contributions.
pub trait Objective<T: Real> {
    fn n_samples(&self) -> usize;

    /// Loss over the samples in `batch` (all samples when `None`) and its
    /// parameter gradient, written into `grad`. A batch estimate is rescaled
    /// by `n_samples / batch.len()` so it is unbiased for the full loss.
    fn loss_and_grad(&mut self, params: &MlpParams<T>, batch: Option<&[usize]>, grad: &mut [T])
        -> T;

    /// Full-sample loss.
    fn loss(&mut self, params: &MlpParams<T>) -> T;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainOutcome {
    pub epochs: usize,
    /// Full-sample loss of the returned parameters.
    pub loss: f64,
    pub converged: bool,
}

/// Minimizes `objective` from `params` with a fresh Adam state.
///
/// Stops at the first checked epoch whose full-sample loss is below the
/// tolerance, or at `max_epochs`. An epoch is one pass over the samples.
pub fn train<T: Real, O: Objective<T> + ?Sized>(
    params: &mut MlpParams<T>,
    objective: &mut O,
    settings: &TrainSettings,
) -> Result<TrainOutcome> {
    let n = objective.n_samples();
    settings.validate(n)?;
    let tol = T::of(settings.tolerance);
    let mut adam = AdamState::new(params.len(), settings.adam);
    let mut grad = vec![T::zero(); params.len()];

    let finish = |epochs: usize, loss: T| TrainOutcome {
        epochs,
        loss: loss.as_f64(),
        converged: loss < tol,
    };
    let due = |epoch: usize| epoch.is_multiple_of(settings.check_every) || epoch == settings.max_epochs;

    match settings.batch_size {
        None => {
            // loss and gradient come from the same pass; the loss checked at
            // epoch e is that of the parameters after e updates
            let mut epoch = 0;
            loop {
                let loss = objective.loss_and_grad(params, None, &mut grad);
                if !loss.is_finite() {
                    return Err(Error::NonFiniteLoss { epoch });
                }
                if (due(epoch) && loss < tol) || epoch == settings.max_epochs {
                    return Ok(finish(epoch, loss));
                }
                adam.step(params.as_mut_slice(), &grad)
                    .map_err(|e| with_epoch(e, epoch))?;
                epoch += 1;
            }
        }
        Some(batch) => {
            let mut rng = ChaCha8Rng::seed_from_u64(settings.shuffle_seed);
            let mut order: Vec<usize> = (0..n).collect();
            let mut epoch = 0;
            loop {
                if due(epoch) || epoch == settings.max_epochs {
                    let loss = objective.loss(params);
                    if !loss.is_finite() {
                        return Err(Error::NonFiniteLoss { epoch });
                    }
                    if loss < tol || epoch == settings.max_epochs {
                        return Ok(finish(epoch, loss));
                    }
                }
                order.shuffle(&mut rng);
                for chunk in order.chunks(batch) {
                    let loss = objective.loss_and_grad(params, Some(chunk), &mut grad);
                    if !loss.is_finite() {
                        return Err(Error::NonFiniteLoss { epoch });
                    }
                    adam.step(params.as_mut_slice(), &grad)
                        .map_err(|e| with_epoch(e, epoch))?;
                }
                epoch += 1;
            }
        }
    }
}

fn with_epoch(e: Error, epoch: usize) -> Error {
    match e {
        Error::NonFiniteGradient { index, .. } => Error::NonFiniteGradient { epoch, index },
        other => other,
    }
}
