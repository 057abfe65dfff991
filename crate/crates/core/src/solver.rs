//! Implicit-Euler transfer learning.
//!
//! Level 0 fits the initial condition with
//! `L₀ = (1/n) Σ_s |ũ⁰(x_s) − u₀(x_s)|²` over all samples. Each later level
//! starts from a copy of the previous network and minimizes
//!
//! ```text
//! L = 1/(n−2) Σ_interior |R(x_s)|² + ½ (|ũᵏ(0)|² + |ũᵏ(1)|²)
//! R = ũᵏ − ũᵏ⁻¹ − h (ν ũᵏ_xx − ũᵏ ũᵏ_x)
//! ```
//!
//! Only the networks of the current and previous level are alive at any time.

use std::f64::consts::PI;
use std::path::PathBuf;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::autodiff::{Jet, Tape};
use crate::error::{Error, Result};
use crate::field::{rel_error, uniform_grid, SolutionField};
use crate::network::{save_checkpoint, Architecture, MlpParams};
use crate::optimizer::{train, Objective, TrainOutcome, TrainSettings};
use crate::oracles::{Problem1Exact, Problem2Exact, Reference};
use crate::real::{Precision, Real};

/// Which initial condition `u₀` to start from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum InitialCondition {
    /// `2νπ sin(πx) / (2 + cos(πx))`, closed-form solution known.
    #[serde(rename = "prob1")]
    Problem1,
    /// `−sin(πx)`, Cole–Hopf integral solution.
    #[serde(rename = "prob2")]
    Problem2,
    /// `u₀ ≡ 0`, a fixed point of the scheme.
    #[serde(rename = "zero")]
    Zero,
}

impl InitialCondition {
    pub fn eval(self, nu: f64, x: f64) -> f64 {
        match self {
            InitialCondition::Problem1 => 2.0 * nu * PI * (PI * x).sin() / (2.0 + (PI * x).cos()),
            InitialCondition::Problem2 => -(PI * x).sin(),
            InitialCondition::Zero => 0.0,
        }
    }

    pub fn default_viscosity(self) -> f64 {
        match self {
            InitialCondition::Problem2 => 0.01 / PI,
            _ => 1.0,
        }
    }

    /// The analytical reference for this initial condition, if any.
    pub fn reference(self, nu: f64) -> Result<Option<Box<dyn Reference>>> {
        Ok(match self {
            InitialCondition::Problem1 => Some(Box::new(Problem1Exact::new(nu)?)),
            InitialCondition::Problem2 => Some(Box::new(Problem2Exact::new(nu)?)),
            InitialCondition::Zero => None,
        })
    }
}

impl std::fmt::Display for InitialCondition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            InitialCondition::Problem1 => "prob1",
            InitialCondition::Problem2 => "prob2",
            InitialCondition::Zero => "zero",
        })
    }
}

impl std::str::FromStr for InitialCondition {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "prob1" => Ok(InitialCondition::Problem1),
            "prob2" => Ok(InitialCondition::Problem2),
            "zero" => Ok(InitialCondition::Zero),
            other => Err(format!("unknown problem `{other}` (expected prob1, prob2 or zero)")),
        }
    }
}

/// Every parameter of one solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    pub problem: InitialCondition,
    /// Kinematic viscosity ν; the problem's customary value when omitted.
    #[serde(default)]
    pub viscosity: Option<f64>,
    #[serde(default = "defaults::time_step")]
    pub time_step: f64,
    /// Number of implicit Euler steps; `None` runs to `t = 1`.
    #[serde(default)]
    pub steps: Option<usize>,
    #[serde(default = "defaults::samples")]
    pub samples: usize,
    #[serde(default = "defaults::architecture")]
    pub architecture: Architecture,
    #[serde(default)]
    pub train: TrainSettings,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub precision: Precision,
}

mod defaults {
    use crate::network::Architecture;

    pub fn time_step() -> f64 {
        1e-3
    }

    pub fn samples() -> usize {
        100
    }

    pub fn architecture() -> Architecture {
        Architecture {
            hidden_layers: 3,
            hidden_units: 30,
        }
    }
}

impl SolverConfig {
    pub fn new(problem: InitialCondition) -> Self {
        SolverConfig {
            problem,
            viscosity: None,
            time_step: defaults::time_step(),
            steps: None,
            samples: defaults::samples(),
            architecture: defaults::architecture(),
            train: TrainSettings::default(),
            seed: 0,
            precision: Precision::default(),
        }
    }

    pub fn nu(&self) -> f64 {
        self.viscosity
            .unwrap_or_else(|| self.problem.default_viscosity())
    }

    pub fn n_steps(&self) -> usize {
        self.steps
            .unwrap_or_else(|| (1.0 / self.time_step).round().max(1.0) as usize)
    }

    pub fn final_time(&self) -> f64 {
        self.n_steps() as f64 * self.time_step
    }

    /// Fills in every defaulted quantity.
    pub fn resolved(&self) -> Self {
        SolverConfig {
            viscosity: Some(self.nu()),
            steps: Some(self.n_steps()),
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let nu = self.nu();
        if !(nu > 0.0 && nu.is_finite()) {
            return Err(Error::Invalid {
                key: "viscosity",
                reason: format!("must be positive, got {nu}"),
            });
        }
        if !(self.time_step > 0.0 && self.time_step.is_finite()) {
            return Err(Error::Invalid {
                key: "time_step",
                reason: format!("must be positive, got {}", self.time_step),
            });
        }
        if self.n_steps() == 0 {
            return Err(Error::Invalid {
                key: "steps",
                reason: "at least one time step is required".into(),
            });
        }
        if self.samples < 3 {
            return Err(Error::Invalid {
                key: "samples",
                reason: format!(
                    "need at least 3 (both endpoints and an interior point), got {}",
                    self.samples
                ),
            });
        }
        self.architecture.validate()?;
        self.train.validate(self.samples)
    }
}

/// Equispaced training abscissae on `[0, 1]`; first and last are the
/// boundary points.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    x: Vec<f64>,
}

impl SampleSet {
    pub fn uniform(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::Config(format!("need at least 3 samples, got {n}")));
        }
        Ok(SampleSet { x: uniform_grid(n) })
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn points(&self) -> &[f64] {
        &self.x
    }

    pub fn interior(&self) -> &[f64] {
        &self.x[1..self.x.len() - 1]
    }
}

/// `L₀` over all samples.
pub fn loss_initial<T: Real>(
    params: &MlpParams<T>,
    samples: &SampleSet,
    u0: impl Fn(f64) -> f64,
) -> T {
    InitialObjective::new(samples, u0).loss(params)
}

/// `R` at `x`, with derivatives of the level-`k` network from its jet.
pub fn residual<T: Real>(
    k_net: &MlpParams<T>,
    km1_net: &MlpParams<T>,
    x: T,
    dt: T,
    nu: T,
) -> T {
    residual_of(k_net.jet(x), km1_net.eval(x), dt, nu)
}

/// `R` from the new level's jet `(u, u_x, u_xx)` and the previous value.
#[inline]
pub fn residual_of<T: Real>(jet: Jet<T>, prev: T, dt: T, nu: T) -> T {
    jet.value - prev - dt * (nu * jet.d2 - jet.value * jet.d1)
}

/// Step loss split into its interior-residual and boundary-penalty parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepLoss<T> {
    pub residual: T,
    pub boundary: T,
}

impl<T: Real> StepLoss<T> {
    pub fn total(&self) -> T {
        self.residual + self.boundary
    }
}

pub fn loss_step<T: Real>(
    k_net: &MlpParams<T>,
    km1_net: &MlpParams<T>,
    samples: &SampleSet,
    dt: f64,
    nu: f64,
) -> StepLoss<T> {
    StepObjective::new(km1_net, samples, dt, nu).parts(k_net)
}

/// `L₀` as a training objective.
pub struct InitialObjective<T: Real> {
    x: Vec<T>,
    target: Vec<T>,
    tape: Tape<T>,
}

impl<T: Real> InitialObjective<T> {
    pub fn new(samples: &SampleSet, u0: impl Fn(f64) -> f64) -> Self {
        InitialObjective {
            x: samples.points().iter().map(|&x| T::of(x)).collect(),
            target: samples.points().iter().map(|&x| T::of(u0(x))).collect(),
            tape: Tape::new(),
        }
    }
}

fn batch_weight<T: Real>(n: usize, batch: Option<&[usize]>) -> T {
    match batch {
        Some(b) => T::of(n as f64 / b.len() as f64),
        None => T::one(),
    }
}

impl<T: Real> Objective<T> for InitialObjective<T> {
    fn n_samples(&self) -> usize {
        self.x.len()
    }

    fn loss_and_grad(&mut self, params: &MlpParams<T>, batch: Option<&[usize]>, grad: &mut [T]) -> T {
        grad.fill(T::zero());
        let n = self.x.len();
        let inv_n = T::one() / T::of(n as f64);
        let scale = batch_weight::<T>(n, batch);
        let two = T::of(2.0);
        let mut loss = T::zero();
        let mut visit = |i: usize| {
            let jet = params.forward_jet(self.x[i], &mut self.tape);
            let r = jet.value - self.target[i];
            loss += inv_n * r * r;
            let seed = Jet::constant(scale * two * inv_n * r);
            self.tape
                .backward(params.as_slice(), seed, grad)
                .expect("tape recorded by forward_jet");
        };
        match batch {
            Some(b) => b.iter().for_each(|&i| visit(i)),
            None => (0..n).for_each(visit),
        }
        scale * loss
    }

    fn loss(&mut self, params: &MlpParams<T>) -> T {
        let inv_n = T::one() / T::of(self.x.len() as f64);
        let mut loss = T::zero();
        for (&x, &y) in self.x.iter().zip(&self.target) {
            let r = params.eval(x) - y;
            loss += inv_n * r * r;
        }
        loss
    }
}

/// Step loss against a frozen previous level.
pub struct StepObjective<T: Real> {
    x: Vec<T>,
    // previous level at every sample
    prev: Vec<T>,
    dt: T,
    nu: T,
    tape: Tape<T>,
}

impl<T: Real> StepObjective<T> {
    pub fn new(km1_net: &MlpParams<T>, samples: &SampleSet, dt: f64, nu: f64) -> Self {
        let x: Vec<T> = samples.points().iter().map(|&x| T::of(x)).collect();
        let prev = x.iter().map(|&x| km1_net.eval(x)).collect();
        StepObjective {
            x,
            prev,
            dt: T::of(dt),
            nu: T::of(nu),
            tape: Tape::new(),
        }
    }

    pub fn parts(&mut self, params: &MlpParams<T>) -> StepLoss<T> {
        let n = self.x.len();
        let inv_interior = T::one() / T::of((n - 2) as f64);
        let half = T::of(0.5);
        let mut res = T::zero();
        for i in 1..n - 1 {
            let jet = params.forward_jet(self.x[i], &mut self.tape);
            let r = residual_of(jet, self.prev[i], self.dt, self.nu);
            res += inv_interior * r * r;
        }
        let mut bnd = T::zero();
        for i in [0, n - 1] {
            let u = params.eval(self.x[i]);
            bnd += half * u * u;
        }
        StepLoss {
            residual: res,
            boundary: bnd,
        }
    }
}

impl<T: Real> Objective<T> for StepObjective<T> {
    fn n_samples(&self) -> usize {
        self.x.len()
    }

    fn loss_and_grad(&mut self, params: &MlpParams<T>, batch: Option<&[usize]>, grad: &mut [T]) -> T {
        grad.fill(T::zero());
        let n = self.x.len();
        let inv_interior = T::one() / T::of((n - 2) as f64);
        let scale = batch_weight::<T>(n, batch);
        let (two, half) = (T::of(2.0), T::of(0.5));
        let (dt, nu) = (self.dt, self.nu);
        let mut res = T::zero();
        let mut bnd = T::zero();
        let mut visit = |i: usize| {
            let jet = params.forward_jet(self.x[i], &mut self.tape);
            let seed = if i == 0 || i == n - 1 {
                bnd += half * jet.value * jet.value;
                Jet::constant(scale * jet.value)
            } else {
                let r = residual_of(jet, self.prev[i], dt, nu);
                res += inv_interior * r * r;
                // ∂R/∂(u, u_x, u_xx) = (1 + h u_x, h u, −h ν)
                let w = scale * two * inv_interior * r;
                Jet::new(
                    w * (T::one() + dt * jet.d1),
                    w * dt * jet.value,
                    -w * dt * nu,
                )
            };
            self.tape
                .backward(params.as_slice(), seed, grad)
                .expect("tape recorded by forward_jet");
        };
        match batch {
            Some(b) => b.iter().for_each(|&i| visit(i)),
            None => {
                // same accumulation order as `parts`
                (1..n - 1).for_each(&mut visit);
                visit(0);
                visit(n - 1);
            }
        }
        scale * (res + bnd)
    }

    fn loss(&mut self, params: &MlpParams<T>) -> T {
        self.parts(params).total()
    }
}

/// Outcome of one level's training.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeStepRecord {
    pub step: usize,
    pub t: f64,
    pub epochs: usize,
    pub loss: f64,
    pub rel_error: Option<f64>,
    pub wall_ms: u64,
    /// Whether the loss went below tolerance before the epoch cap.
    pub converged: bool,
}

/// Stateful driver holding the current and previous networks.
pub struct Solver<'r, T: Real> {
    config: SolverConfig,
    samples: SampleSet,
    reference: Option<&'r dyn Reference>,
    eval_grid: Vec<f64>,
    current: MlpParams<T>,
    step: usize,
}

impl<'r, T: Real> Solver<'r, T> {
    /// A solver whose level-0 network is freshly initialized from the seed.
    pub fn new(config: &SolverConfig, reference: Option<&'r dyn Reference>) -> Result<Self> {
        let init = MlpParams::init(config.architecture, config.seed);
        Self::with_network(config, init, reference)
    }

    /// A solver starting from given level-0 parameters.
    pub fn with_network(
        config: &SolverConfig,
        network: MlpParams<T>,
        reference: Option<&'r dyn Reference>,
    ) -> Result<Self> {
        config.validate()?;
        if network.architecture() != config.architecture {
            return Err(Error::Config(format!(
                "network is {} but the configuration asks for {}",
                network.architecture(),
                config.architecture
            )));
        }
        Ok(Solver {
            config: config.resolved(),
            samples: SampleSet::uniform(config.samples)?,
            reference,
            eval_grid: uniform_grid(1001),
            current: network,
            step: 0,
        })
    }

    /// Points used for relative errors and solution fields (default 1001).
    pub fn set_eval_points(&mut self, n: usize) -> Result<()> {
        if n < 2 {
            return Err(Error::Config(format!("evaluation grid needs at least 2 points, got {n}")));
        }
        self.eval_grid = uniform_grid(n);
        Ok(())
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    pub fn samples(&self) -> &SampleSet {
        &self.samples
    }

    pub fn network(&self) -> &MlpParams<T> {
        &self.current
    }

    /// Index of the level the current network represents.
    pub fn step(&self) -> usize {
        self.step
    }

    /// `t_k = k·h` in the configured precision.
    pub fn time(&self) -> f64 {
        (T::of(self.step as f64) * T::of(self.config.time_step)).as_f64()
    }

    fn settings(&self, step: usize) -> TrainSettings {
        TrainSettings {
            shuffle_seed: self
                .config
                .seed
                .wrapping_mul(0x9E37_79B9_7F4A_7C15)
                .wrapping_add(step as u64),
            ..self.config.train
        }
    }

    /// Current network sampled on the evaluation grid.
    pub fn field(&self) -> SolutionField {
        let net = &self.current;
        SolutionField::from_fn(self.time(), self.eval_grid.clone(), |x| {
            net.eval(T::of(x)).as_f64()
        })
    }

    fn record(&self, outcome: TrainOutcome, started: Instant) -> Result<TimeStepRecord> {
        let rel_error = match self.reference {
            Some(r) => {
                let t = self.step as f64 * self.config.time_step;
                let exact = r.field(t, &self.eval_grid)?;
                Some(rel_error(&self.field(), &exact)?)
            }
            None => None,
        };
        let rec = TimeStepRecord {
            step: self.step,
            t: self.time(),
            epochs: outcome.epochs,
            loss: outcome.loss,
            rel_error,
            wall_ms: started.elapsed().as_millis() as u64,
            converged: outcome.converged,
        };
        if !rec.converged {
            log::warn!(
                "step {} stopped at the epoch cap ({}) with loss {:e}",
                rec.step,
                rec.epochs,
                rec.loss
            );
        }
        Ok(rec)
    }

    /// Trains the level-0 network on the initial condition.
    pub fn fit_initial(&mut self) -> Result<TimeStepRecord> {
        let started = Instant::now();
        self.step = 0;
        let (problem, nu) = (self.config.problem, self.config.nu());
        let mut objective = InitialObjective::new(&self.samples, |x| problem.eval(nu, x));
        let settings = self.settings(0);
        let outcome = train(&mut self.current, &mut objective, &settings)?;
        self.record(outcome, started)
    }

    /// Transfers the current network to the next level and trains it on the
    /// implicit Euler step loss.
    pub fn advance(&mut self) -> Result<TimeStepRecord> {
        let started = Instant::now();
        let next_step = self.step + 1;
        let previous = &self.current;
        let mut next = previous.transfer();
        let mut objective = StepObjective::new(
            previous,
            &self.samples,
            self.config.time_step,
            self.config.nu(),
        );
        let outcome = train(&mut next, &mut objective, &self.settings(next_step))?;
        // the previous level is dropped here; two networks at most
        self.current = next;
        self.step = next_step;
        self.record(outcome, started)
    }
}

/// Optional outputs of [`solve`].
#[derive(Default)]
pub struct SolveOptions<'r> {
    /// Levels at which to emit a [`SolutionField`].
    pub output_steps: Vec<usize>,
    /// Evaluation grid size for fields and errors; 1001 when `None`.
    pub eval_points: Option<usize>,
    /// Reference solution for per-step relative errors.
    pub reference: Option<&'r dyn Reference>,
    /// Directory for `net_k{index}.ckpt` checkpoints after every level.
    pub checkpoint_dir: Option<PathBuf>,
}

#[derive(Debug)]
pub struct SolveOutcome {
    /// Level 0 first, then one record per completed step.
    pub records: Vec<TimeStepRecord>,
    pub fields: Vec<SolutionField>,
    /// Level and error of a run that had to stop early.
    pub failure: Option<(usize, Error)>,
}

/// Runs the whole sequence in precision `T`.
pub fn solve<T: Real>(config: &SolverConfig, options: &SolveOptions<'_>) -> Result<SolveOutcome> {
    let mut solver = Solver::<T>::new(config, options.reference)?;
    if let Some(n) = options.eval_points {
        solver.set_eval_points(n)?;
    }
    let n_steps = solver.config().n_steps();
    let mut outcome = SolveOutcome {
        records: Vec::with_capacity(n_steps + 1),
        fields: Vec::new(),
        failure: None,
    };
    for k in 0..=n_steps {
        let result = if k == 0 {
            solver.fit_initial()
        } else {
            solver.advance()
        };
        let rec = match result {
            Ok(rec) => rec,
            Err(e) => {
                outcome.failure = Some((k, e));
                break;
            }
        };
        log::info!(
            "k={} t={} epochs={} loss={:e} rel_error={:?}",
            rec.step,
            rec.t,
            rec.epochs,
            rec.loss,
            rec.rel_error
        );
        outcome.records.push(rec);
        if options.output_steps.contains(&k) {
            outcome.fields.push(solver.field());
        }
        if let Some(dir) = &options.checkpoint_dir {
            save_checkpoint(solver.network(), &dir.join(format!("net_k{k}.ckpt")))?;
        }
    }
    Ok(outcome)
}

/// [`solve`] in the precision named by the configuration.
pub fn solve_configured(config: &SolverConfig, options: &SolveOptions<'_>) -> Result<SolveOutcome> {
    match config.precision {
        Precision::F32 => solve::<f32>(config, options),
        Precision::F64 => solve::<f64>(config, options),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arch(l: usize, n: usize) -> Architecture {
        Architecture::new(l, n).unwrap()
    }

    /// Network whose output is the constant `c` (output bias only).
    fn constant_net(c: f64) -> MlpParams<f64> {
        let mut p = MlpParams::zeros(arch(1, 3));
        let last = 1;
        p.layer_mut(last).1[0] = c;
        p
    }

    #[test]
    fn loss_initial_hand_values() {
        let samples = SampleSet::uniform(3).unwrap();
        let zero = MlpParams::<f64>::zeros(arch(2, 4));
        let l0: f64 = loss_initial(&zero, &samples, |x| InitialCondition::Problem1.eval(1.0, x));
        assert!((l0 - PI * PI / 3.0).abs() < 1e-12, "{l0}");
        let c = constant_net(0.7);
        let l0: f64 = loss_initial(&c, &SampleSet::uniform(10).unwrap(), |_| 0.0);
        assert!((l0 - 0.49).abs() < 1e-15);
    }

    #[test]
    fn loss_initial_zero_when_network_matches() {
        let net = MlpParams::<f64>::init(arch(2, 5), 4);
        let samples = SampleSet::uniform(17).unwrap();
        let l0: f64 = loss_initial(&net, &samples, |x| net.eval(x));
        assert_eq!(l0, 0.0);
    }

    #[test]
    fn residual_of_zero_networks() {
        let z = MlpParams::<f64>::zeros(arch(2, 4));
        for x in [0.1, 0.5, 0.9] {
            assert_eq!(residual(&z, &z, x, 1e-3, 1.0), 0.0);
        }
        let s = SampleSet::uniform(10).unwrap();
        assert_eq!(loss_step(&z, &z, &s, 1e-3, 1.0).total(), 0.0);
    }

    #[test]
    fn residual_after_transfer_is_the_explicit_increment() {
        let net = MlpParams::<f64>::init(arch(3, 10), 9);
        let (dt, nu) = (1e-2, 0.3);
        for x in [0.2, 0.45, 0.8] {
            let j = net.jet(x);
            let expected = -dt * (nu * j.d2 - j.value * j.d1);
            let r = residual(&net, &net.transfer(), x, dt, nu);
            assert!((r - expected).abs() <= 1e-15 * expected.abs().max(1.0));
        }
    }

    #[test]
    fn constant_network_step_loss_is_two_c_squared() {
        let c = 0.3;
        let k = constant_net(c);
        let km1 = MlpParams::<f64>::zeros(arch(1, 3));
        let s = SampleSet::uniform(12).unwrap();
        let l = loss_step(&k, &km1, &s, 1e-3, 1.0);
        assert!((l.residual - c * c).abs() < 1e-15);
        assert!((l.boundary - c * c).abs() < 1e-15);
        assert!((l.total() - 2.0 * c * c).abs() < 1e-15);
    }

    #[test]
    fn objective_loss_matches_gradient_pass_bitwise() {
        let net = MlpParams::<f32>::init(arch(3, 30), 1);
        let prev = MlpParams::<f32>::init(arch(3, 30), 2);
        let s = SampleSet::uniform(50).unwrap();
        let mut obj = StepObjective::new(&prev, &s, 1e-3, 1.0);
        let mut g = vec![0.0; net.len()];
        let a = obj.loss_and_grad(&net, None, &mut g);
        let b = obj.loss(&net);
        assert_eq!(a.to_bits(), b.to_bits());
        let mut obj = InitialObjective::new(&s, |x| x.sin());
        let a = obj.loss_and_grad(&net, None, &mut g);
        assert_eq!(a.to_bits(), obj.loss(&net).to_bits());
    }

    #[test]
    fn config_validation() {
        let mut c = SolverConfig::new(InitialCondition::Problem1);
        assert!(c.validate().is_ok());
        assert_eq!(c.n_steps(), 1000);
        assert_eq!(c.nu(), 1.0);
        assert!((SolverConfig::new(InitialCondition::Problem2).nu() - 0.01 / PI).abs() < 1e-18);
        c.samples = 2;
        assert!(c.validate().is_err());
        c.samples = 100;
        c.time_step = 0.0;
        assert!(c.validate().is_err());
        c.time_step = 1e-3;
        c.viscosity = Some(-1.0);
        assert!(c.validate().is_err());
        c.viscosity = None;
        c.steps = Some(0);
        assert!(c.validate().is_err());
    }

    #[test]
    fn config_json_rejects_unknown_keys() {
        let ok: SolverConfig = serde_json::from_str(r#"{"problem": "prob1", "steps": 3}"#).unwrap();
        assert_eq!(ok.n_steps(), 3);
        assert_eq!(ok.architecture, arch(3, 30));
        let err = serde_json::from_str::<SolverConfig>(r#"{"problem": "prob1", "step": 3}"#);
        assert!(err.is_err());
        let err = serde_json::from_str::<SolverConfig>(
            r#"{"problem": "prob1", "train": {"tolerence": 1e-6}}"#,
        );
        assert!(err.is_err());
    }

    #[test]
    fn sample_set_layout() {
        let s = SampleSet::uniform(100).unwrap();
        assert_eq!(s.points()[0], 0.0);
        assert_eq!(*s.points().last().unwrap(), 1.0);
        assert_eq!(s.interior().len(), 98);
        assert!(s.points().windows(2).all(|w| w[0] < w[1]));
        assert!(SampleSet::uniform(2).is_err());
    }

    #[test]
    fn zero_initial_condition_stays_near_zero() {
        let mut cfg = SolverConfig::new(InitialCondition::Zero);
        cfg.architecture = arch(2, 8);
        cfg.samples = 20;
        cfg.steps = Some(3);
        cfg.precision = Precision::F64;
        let out = solve::<f64>(&cfg, &SolveOptions {
            output_steps: vec![3],
            ..Default::default()
        })
        .unwrap();
        assert!(out.failure.is_none());
        assert_eq!(out.records.len(), 4);
        for r in &out.records {
            assert!(r.converged && r.loss < 1e-6);
            assert!(r.rel_error.is_none());
        }
        let field = &out.fields[0];
        assert!(field.u.iter().all(|u| u.abs() < 5e-3));
        // the transferred net already satisfies the step loss
        assert!(out.records[1..].iter().all(|r| r.epochs < 100));
    }
}
