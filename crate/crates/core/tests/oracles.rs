//! The reference solutions checked against each other and against the
//! discrete scheme the networks are trained on.

use std::f64::consts::PI;

use burgers_pinn::oracles::{FdReference, Problem1Exact, Problem2Exact, Reference};
use burgers_pinn::solver::{residual_of, Solver};
use burgers_pinn::{rel_error, Architecture, InitialCondition, Jet, SolutionField, SolverConfig};

fn l2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

#[test]
fn fd_scheme_residual_shrinks_quadratically_in_space() {
    // Levels k−1, k of the FD solution, differentiated with fourth-order
    // stencils, leave only the scheme's O(h_x²) spatial error in R.
    let nu = 1.0;
    let dt = 1e-3;
    let exact = Problem1Exact::new(nu).unwrap();
    let mut worst = Vec::new();
    for nodes in [201, 401, 801] {
        let fd = FdReference::new(nodes).unwrap();
        let levels = fd.solve(nu, dt, 2, |x| exact.initial(x)).unwrap();
        let (prev, next) = (&levels[1], &levels[2]);
        let h = 1.0 / (nodes - 1) as f64;
        let u = &next.u;
        let mut max_r: f64 = 0.0;
        // the same ten physical points for every grid
        for j in 1..10 {
            let i = j * (nodes - 1) / 10;
            let d1 = (-u[i + 2] + 8.0 * u[i + 1] - 8.0 * u[i - 1] + u[i - 2]) / (12.0 * h);
            let d2 = (-u[i + 2] + 16.0 * u[i + 1] - 30.0 * u[i] + 16.0 * u[i - 1] - u[i - 2]) / (12.0 * h * h);
            let r = residual_of(Jet::new(u[i], d1, d2), prev.u[i], dt, nu);
            max_r = max_r.max(r.abs());
        }
        worst.push(max_r);
    }
    assert!(worst[0] < 1e-5, "{worst:?}");
    for w in worst.windows(2) {
        let ratio = w[0] / w[1];
        assert!((3.5..4.5).contains(&ratio), "{worst:?}");
    }
}

#[test]
fn quadrature_agrees_with_fine_fd() {
    let nu = 0.01 / PI;
    let exact = Problem2Exact::new(nu).unwrap();
    let fd = FdReference::new(4001).unwrap();
    let dt = 1e-4;
    let fields = fd
        .solve_at(nu, dt, 10_000, |x| exact.initial(x), &[5_000, 10_000])
        .unwrap();
    let at_half = &fields[0];
    let reference = exact.field(0.5, &at_half.x).unwrap();
    let e = rel_error(at_half, &reference).unwrap();
    assert!(e < 1e-2, "t = 0.5: {e:e}");
    // pointwise at (1, 0.5)
    let mid = fields[1].u[2000];
    let q = exact.u(1.0, 0.5).unwrap();
    assert!((mid - q).abs() <= 1e-2 * q.abs().max(1e-3), "{mid} vs {q}");
}

#[test]
fn quadrature_is_converged_in_node_count() {
    let exact = Problem2Exact::new(0.01 / PI).unwrap();
    for t in [0.1, 0.4, 0.7, 1.0] {
        for x in [0.1, 0.3, 0.5, 0.7, 0.9, 0.99] {
            let a = exact.ratio_with(t, x, exact.nodes);
            let b = exact.ratio_with(t, x, 2 * exact.nodes);
            assert!((a - b).abs() <= 1e-6 * b.abs().max(1e-12), "t={t} x={x}: {a} {b}");
        }
    }
}

#[test]
fn quadrature_short_time_limit() {
    let exact = Problem2Exact::new(0.01 / PI).unwrap();
    let x = burgers_pinn::field::uniform_grid(1001);
    let f = exact.field(1e-6, &x).unwrap();
    let worst = f
        .u
        .iter()
        .zip(&x)
        .map(|(u, &x)| (u + (PI * x).sin()).abs())
        .fold(0.0, f64::max);
    assert!(worst < 1e-3, "{worst:e}");
}

#[test]
fn oracle_triangle_is_consistent() {
    // a small network two steps into Problem 1, against the exact solution
    // and the FD solution of the same scheme
    let mut cfg = SolverConfig::new(InitialCondition::Problem1);
    cfg.architecture = Architecture::new(2, 10).unwrap();
    cfg.samples = 21;
    cfg.time_step = 1e-2;
    cfg.steps = Some(2);
    cfg.train.tolerance = 1e-5;
    let mut solver = Solver::<f64>::new(&cfg, None).unwrap();
    solver.fit_initial().unwrap();
    solver.advance().unwrap();
    solver.advance().unwrap();
    let pinn = solver.field();

    let exact = Problem1Exact::new(1.0).unwrap();
    let fd = FdReference::new(1001).unwrap();
    let fd_field = fd.solve(1.0, 1e-2, 2, |x| exact.initial(x)).unwrap().pop().unwrap();
    let closed = SolutionField::from_fn(0.02, fd.grid(), |x| exact.u(0.02, x));
    assert_eq!(pinn.x, fd_field.x);

    let a = l2(&pinn.u, &closed.u);
    let b = l2(&pinn.u, &fd_field.u);
    let c = l2(&fd_field.u, &closed.u);
    let slack = 1e-12 * (a + b + c);
    assert!(a <= b + c + slack && b <= a + c + slack && c <= a + b + slack, "{a} {b} {c}");
    // the network tracks its own scheme more closely than the PDE
    assert!(b < a, "{a} {b} {c}");
}
