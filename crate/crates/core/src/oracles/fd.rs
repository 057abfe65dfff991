use crate::error::{Error, Result};
use crate::field::{uniform_grid, SolutionField};

/// Implicit Euler in time, second-order central differences in space, each
/// step solved by damped Newton iteration with the exact tridiagonal
/// Jacobian. Boundary nodes are pinned to zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdReference {
    /// Grid nodes on `[0, 1]`, odd so that `x = 0.5` is a node.
    pub nodes: usize,
    /// Max-norm of the Newton update at convergence.
    pub newton_tolerance: f64,
    pub max_newton_iterations: usize,
}

impl FdReference {
    pub fn new(nodes: usize) -> Result<Self> {
        FdReference {
            nodes,
            newton_tolerance: 1e-12,
            max_newton_iterations: 50,
        }
        .validated()
    }

    pub fn validated(self) -> Result<Self> {
        if self.nodes < 101 || self.nodes.is_multiple_of(2) {
            return Err(Error::Config(format!(
                "finite-difference grid needs an odd node count of at least 101, got {}",
                self.nodes
            )));
        }
        if !(self.newton_tolerance > 0.0) || self.max_newton_iterations == 0 {
            return Err(Error::Config("invalid Newton settings".into()));
        }
        Ok(self)
    }

    pub fn grid(&self) -> Vec<f64> {
        uniform_grid(self.nodes)
    }

    /// Fields at every level `t_k = k·dt`, `k = 0..=steps`.
    pub fn solve(
        &self,
        nu: f64,
        dt: f64,
        steps: usize,
        u0: impl Fn(f64) -> f64,
    ) -> Result<Vec<SolutionField>> {
        let all: Vec<usize> = (0..=steps).collect();
        self.solve_at(nu, dt, steps, u0, &all)
    }

    /// Fields at the requested levels only (in ascending level order).
    pub fn solve_at(
        &self,
        nu: f64,
        dt: f64,
        steps: usize,
        u0: impl Fn(f64) -> f64,
        keep: &[usize],
    ) -> Result<Vec<SolutionField>> {
        if !(nu > 0.0) || !(dt > 0.0) {
            return Err(Error::Config(format!(
                "viscosity and time step must be positive (got {nu}, {dt})"
            )));
        }
        let x = self.grid();
        let mut u: Vec<f64> = x.iter().map(|&xi| u0(xi)).collect();
        let n = u.len();
        u[0] = 0.0;
        u[n - 1] = 0.0;
        let mut out = Vec::new();
        if keep.contains(&0) {
            out.push(SolutionField::new(0.0, x.clone(), u.clone())?);
        }
        let mut stepper = NewtonStepper::new(n, nu, dt, *self);
        for k in 1..=steps {
            u = stepper.step(&u).map_err(|residual| Error::Newton { step: k, residual })?;
            if keep.contains(&k) {
                out.push(SolutionField::new(k as f64 * dt, x.clone(), u.clone())?);
            }
        }
        Ok(out)
    }
}

struct NewtonStepper {
    settings: FdReference,
    // dt·ν/dx² and dt/(2dx)
    diff: f64,
    adv: f64,
    lower: Vec<f64>,
    diag: Vec<f64>,
    upper: Vec<f64>,
    rhs: Vec<f64>,
    scratch: Vec<f64>,
}

impl NewtonStepper {
    fn new(n: usize, nu: f64, dt: f64, settings: FdReference) -> Self {
        let dx = 1.0 / (n - 1) as f64;
        NewtonStepper {
            settings,
            diff: dt * nu / (dx * dx),
            adv: dt / (2.0 * dx),
            lower: vec![0.0; n],
            diag: vec![0.0; n],
            upper: vec![0.0; n],
            rhs: vec![0.0; n],
            scratch: vec![0.0; n],
        }
    }

    /// `F_i = u_i − old_i − dt(ν δ²u_i − u_i δu_i)` at interior nodes.
    fn residual(&self, u: &[f64], old: &[f64], out: &mut [f64]) -> f64 {
        let n = u.len();
        out[0] = 0.0;
        out[n - 1] = 0.0;
        let mut norm: f64 = 0.0;
        for i in 1..n - 1 {
            let r = u[i] - old[i] - self.diff * (u[i + 1] - 2.0 * u[i] + u[i - 1])
                + self.adv * u[i] * (u[i + 1] - u[i - 1]);
            out[i] = r;
            norm = norm.max(r.abs());
        }
        norm
    }

    /// Returns the new level, or the last residual norm on failure.
    fn step(&mut self, old: &[f64]) -> std::result::Result<Vec<f64>, f64> {
        let n = old.len();
        let mut u = old.to_vec();
        let mut rhs = std::mem::take(&mut self.rhs);
        let mut norm = self.residual(&u, old, &mut rhs);
        for _ in 0..self.settings.max_newton_iterations {
            for i in 1..n - 1 {
                self.lower[i] = -self.diff - self.adv * u[i];
                self.diag[i] = 1.0 + 2.0 * self.diff + self.adv * (u[i + 1] - u[i - 1]);
                self.upper[i] = -self.diff + self.adv * u[i];
            }
            let delta = self.thomas(&rhs[1..n - 1]);
            let step_norm = delta.iter().fold(0.0f64, |m, d| m.max(d.abs()));

            let mut lambda = 1.0;
            let mut trial = u.clone();
            loop {
                for i in 1..n - 1 {
                    trial[i] = u[i] - lambda * delta[i - 1];
                }
                let mut trial_rhs = std::mem::take(&mut self.scratch);
                let trial_norm = self.residual(&trial, old, &mut trial_rhs);
                if trial_norm <= norm || lambda < 1e-6 {
                    self.scratch = std::mem::replace(&mut rhs, trial_rhs);
                    norm = trial_norm;
                    break;
                }
                self.scratch = trial_rhs;
                lambda *= 0.5;
            }
            std::mem::swap(&mut u, &mut trial);
            if !norm.is_finite() {
                break;
            }
            if lambda * step_norm < self.settings.newton_tolerance {
                self.rhs = rhs;
                return Ok(u);
            }
        }
        self.rhs = rhs;
        Err(norm)
    }

    /// Solves the interior tridiagonal system `J δ = r`.
    fn thomas(&self, r: &[f64]) -> Vec<f64> {
        let m = r.len();
        let (a, b, c) = (&self.lower[1..=m], &self.diag[1..=m], &self.upper[1..=m]);
        let mut cp = vec![0.0; m];
        let mut dp = vec![0.0; m];
        cp[0] = c[0] / b[0];
        dp[0] = r[0] / b[0];
        for i in 1..m {
            let denom = b[i] - a[i] * cp[i - 1];
            cp[i] = c[i] / denom;
            dp[i] = (r[i] - a[i] * dp[i - 1]) / denom;
        }
        let mut x = vec![0.0; m];
        x[m - 1] = dp[m - 1];
        for i in (0..m - 1).rev() {
            x[i] = dp[i] - cp[i] * x[i + 1];
        }
        x
    }
}
