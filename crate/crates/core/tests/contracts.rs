//! Structural invariants of the library, checked as properties.

mod support;

use burgers_pinn::optimizer::{train, Objective};
use burgers_pinn::oracles::Problem1Exact;
use burgers_pinn::solver::{loss_step, residual, Solver, StepObjective};
use burgers_pinn::{
    rel_error, AdamConfig, AdamState, Architecture, InitialCondition, Jet, MlpParams, SampleSet,
    SolutionField, SolverConfig, TrainSettings,
};
use proptest::prelude::*;
use support::random_net;

fn arch_strategy() -> impl Strategy<Value = Architecture> {
    (1usize..=4, 1usize..=12).prop_map(|(l, n)| Architecture::new(l, n).unwrap())
}

fn bits(v: &[f64]) -> Vec<u64> {
    v.iter().map(|x| x.to_bits()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn transfer_is_bit_exact(arch in arch_strategy(), seed in any::<u64>()) {
        let net = random_net(arch, seed, 1.0);
        let copy = net.transfer();
        prop_assert_eq!(bits(net.as_slice()), bits(copy.as_slice()));
        prop_assert_eq!(copy.architecture(), arch);
    }

    #[test]
    fn init_is_reproducible(arch in arch_strategy(), seed in any::<u64>()) {
        let a = MlpParams::<f32>::init(arch, seed);
        let b = MlpParams::<f32>::init(arch, seed);
        prop_assert_eq!(a.as_slice(), b.as_slice());
        prop_assert_eq!(a.len(), arch.parameter_count());
    }

    #[test]
    fn jet_value_is_plain_forward_pass(arch in arch_strategy(), seed in any::<u64>(), x in 0.0f64..=1.0) {
        let net = random_net(arch, seed, 1.0);
        prop_assert_eq!(net.jet(x).value.to_bits(), net.eval(x).to_bits());
        prop_assert!(net.jet(x).is_finite());
    }

    #[test]
    fn affine_jets_are_linear(
        seed in any::<u64>(),
        a in -2.0f64..2.0, b in -2.0f64..2.0,
        u in prop::array::uniform3(-1.0f64..1.0),
        v in prop::array::uniform3(-1.0f64..1.0),
    ) {
        let net = random_net(Architecture::new(2, 3).unwrap(), seed, 1.0);
        let (w, bias) = net.layer(1);
        let zero = vec![0.0; bias.len()];
        let layer = burgers_pinn::autodiff::LayerRef::new(w, &zero, 3, 3).unwrap();
        let ju = [Jet::new(u[0], u[1], u[2]); 3];
        let jv = [Jet::new(v[0], v[1], v[2]); 3];
        let mixed: Vec<_> = ju.iter().zip(&jv).map(|(&p, &q)| p.scale(a) + q.scale(b)).collect();
        let lhs = burgers_pinn::autodiff::jet_affine(layer, &mixed).unwrap();
        let fu = burgers_pinn::autodiff::jet_affine(layer, &ju).unwrap();
        let fv = burgers_pinn::autodiff::jet_affine(layer, &jv).unwrap();
        for i in 0..3 {
            let rhs = fu[i].scale(a) + fv[i].scale(b);
            for (l, r) in [(lhs[i].value, rhs.value), (lhs[i].d1, rhs.d1), (lhs[i].d2, rhs.d2)] {
                prop_assert!((l - r).abs() <= 1e-12 * (1.0 + r.abs()));
            }
        }
    }

    #[test]
    fn step_loss_is_exact_sum_of_parts(
        arch in arch_strategy(), seed in any::<u64>(), n in 3usize..40,
        dt in 1e-4f64..1e-1, nu in 1e-3f64..1.0,
    ) {
        let net = random_net(arch, seed, 1.0);
        let prev = random_net(arch, seed ^ 1, 1.0);
        let samples = SampleSet::uniform(n).unwrap();
        let parts = loss_step(&net, &prev, &samples, dt, nu);
        prop_assert!(parts.residual >= 0.0 && parts.boundary >= 0.0);
        prop_assert_eq!(parts.total().to_bits(), (parts.residual + parts.boundary).to_bits());
        let mut obj = StepObjective::new(&prev, &samples, dt, nu);
        let mut grad = vec![0.0; net.len()];
        let reported = obj.loss_and_grad(&net, None, &mut grad);
        prop_assert_eq!(reported.to_bits(), parts.total().to_bits());
    }

    #[test]
    fn transferred_net_residual_is_the_explicit_increment(
        arch in arch_strategy(), seed in any::<u64>(), n in 3usize..30,
        dt in 1e-4f64..1e-1, nu in 1e-3f64..1.0,
    ) {
        let prev = random_net(arch, seed, 1.0);
        let next = prev.transfer();
        let samples = SampleSet::uniform(n).unwrap();
        let interior = samples.interior();
        let expected: f64 = interior
            .iter()
            .map(|&x| {
                let j = prev.jet(x);
                let f = nu * j.d2 - j.value * j.d1;
                dt * dt * f * f
            })
            .sum::<f64>()
            / interior.len() as f64;
        let got = loss_step(&next, &prev, &samples, dt, nu).residual;
        prop_assert!((got - expected).abs() <= 1e-12 * (1.0 + expected));
        for &x in interior {
            let j = prev.jet(x);
            let r = residual(&next, &prev, x, dt, nu);
            prop_assert!((r + dt * (nu * j.d2 - j.value * j.d1)).abs() <= 1e-12 * (1.0 + r.abs()));
        }
    }

    #[test]
    fn csv_round_trip_is_exact(
        n in prop::sample::select(vec![2usize, 3, 5, 6, 11, 21, 26, 51, 101, 201, 251, 501, 1001]),
        seed in any::<u64>(),
    ) {
        let net = random_net(Architecture::new(2, 5).unwrap(), seed, 2.0);
        let f = SolutionField::from_fn(0.25, burgers_pinn::field::uniform_grid(n), |x| net.eval(x));
        let text = f.to_csv();
        let back = SolutionField::from_csv(0.25, &text).unwrap();
        // abscissae k/(n−1) with n−1 dividing a power of ten survive 9 digits exactly
        prop_assert_eq!(&back.x, &f.x);
        prop_assert!((rel_error(&back, &f).unwrap_or(0.0)) < 1e-8);
        // once re-read, the file representation is a fixed point
        prop_assert_eq!(back.to_csv(), text.clone());
        let again = SolutionField::from_csv(0.25, &back.to_csv()).unwrap();
        if back.u.iter().any(|&u| u != 0.0) {
            prop_assert_eq!(rel_error(&again, &back).unwrap(), 0.0);
        }
    }

    #[test]
    fn adam_moments_stay_finite_and_v_nonnegative(
        grads in prop::collection::vec(prop::collection::vec(-1e6f64..1e6, 8), 1..20),
    ) {
        let mut state = AdamState::new(8, AdamConfig::default());
        let mut params = vec![0.5f64; 8];
        for (k, g) in grads.iter().enumerate() {
            state.step(&mut params, g).unwrap();
            prop_assert_eq!(state.steps, k as u64 + 1);
            prop_assert!(state.v.iter().all(|&v| v >= 0.0 && v.is_finite()));
            prop_assert!(state.m.iter().all(|m| m.is_finite()));
            prop_assert!(params.iter().all(|p| p.is_finite()));
        }
        prop_assert_eq!(state.m.len(), 8);
    }

    #[test]
    fn problem1_satisfies_the_pde(t in 0.05f64..1.0, x in 0.05f64..0.95, nu in 0.2f64..1.0) {
        let exact = Problem1Exact::new(nu).unwrap();
        prop_assert!(exact.residual_check(t, x, 1e-4).abs() < 1e-6);
        prop_assert_eq!(exact.u(t, 0.0), 0.0);
        prop_assert!(exact.u(t, 1.0).abs() < 1e-15);
    }

    #[test]
    fn sample_sets_are_ordered(n in 3usize..2000) {
        let s = SampleSet::uniform(n).unwrap();
        let p = s.points();
        prop_assert_eq!(p[0], 0.0);
        prop_assert_eq!(p[n - 1], 1.0);
        prop_assert!(p.windows(2).all(|w| w[0] < w[1]));
        prop_assert_eq!(s.interior().len(), n - 2);
    }

    #[test]
    fn parameter_count_matches_layer_shapes(arch in arch_strategy()) {
        let from_shapes: usize = arch.layer_shapes().iter().map(|(r, c)| r * c + r).sum();
        let n = arch.hidden_units;
        let formula = 2 * n + (arch.hidden_layers - 1) * (n * n + n) + (n + 1);
        prop_assert_eq!(arch.parameter_count(), formula);
        prop_assert_eq!(from_shapes, formula);
    }
}

fn small_config(seed: u64) -> SolverConfig {
    let mut cfg = SolverConfig::new(InitialCondition::Problem1);
    cfg.architecture = Architecture::new(1, 8).unwrap();
    cfg.samples = 12;
    cfg.time_step = 1e-2;
    cfg.steps = Some(3);
    cfg.seed = seed;
    cfg.train.tolerance = 1e-3;
    cfg.train.max_epochs = 20_000;
    cfg
}

#[test]
fn boundary_penalty_is_bounded_at_termination() {
    for seed in 0..3 {
        let cfg = small_config(seed);
        let mut solver = Solver::<f64>::new(&cfg, None).unwrap();
        solver.fit_initial().unwrap();
        for _ in 0..3 {
            let rec = solver.advance().unwrap();
            assert!(rec.converged, "seed {seed}: {rec:?}");
            let net = solver.network();
            let b = net.eval(0.0).powi(2) + net.eval(1.0).powi(2);
            assert!(b <= 2.0 * cfg.train.tolerance, "seed {seed}: {b:e}");
        }
    }
}

#[test]
fn mini_batch_training_reports_full_sample_loss() {
    let samples = SampleSet::uniform(12).unwrap();
    let prev = MlpParams::<f64>::init(Architecture::new(1, 8).unwrap(), 4);
    let mut net = prev.transfer();
    let mut obj = StepObjective::new(&prev, &samples, 1e-2, 1.0);
    let settings = TrainSettings {
        batch_size: Some(5),
        max_epochs: 300,
        tolerance: 1e-12,
        shuffle_seed: 9,
        ..TrainSettings::default()
    };
    let out = train(&mut net, &mut obj, &settings).unwrap();
    assert_eq!(out.loss, obj.loss(&net));
}

#[test]
fn seeded_runs_are_reproducible() {
    let run = |precision_f64: bool| {
        let cfg = small_config(7);
        if precision_f64 {
            let mut s = Solver::<f64>::new(&cfg, None).unwrap();
            let mut recs = vec![s.fit_initial().unwrap()];
            recs.push(s.advance().unwrap());
            let bits: Vec<u64> = s.network().as_slice().iter().map(|v| v.to_bits()).collect();
            (recs, bits)
        } else {
            let mut s = Solver::<f32>::new(&cfg, None).unwrap();
            let mut recs = vec![s.fit_initial().unwrap()];
            recs.push(s.advance().unwrap());
            let bits: Vec<u64> = s.network().as_slice().iter().map(|v| v.to_bits() as u64).collect();
            (recs, bits)
        }
    };
    for p in [false, true] {
        let (mut a, na) = run(p);
        let (mut b, nb) = run(p);
        assert_eq!(na, nb);
        for r in a.iter_mut().chain(b.iter_mut()) {
            r.wall_ms = 0;
        }
        assert_eq!(a, b);
    }
}

#[test]
fn record_times_are_multiples_of_the_step_in_precision() {
    let mut cfg = small_config(1);
    cfg.time_step = 0.1;
    cfg.train.max_epochs = 5;
    let mut s = Solver::<f32>::new(&cfg, None).unwrap();
    s.fit_initial().unwrap();
    for k in 1..=3u32 {
        let rec = s.advance().unwrap();
        assert_eq!(rec.t, (k as f32 * 0.1f32) as f64);
        assert!(rec.loss >= 0.0);
    }
}
