//! Jets and parameter gradients against finite-difference oracles (f64).

mod support;

use burgers_pinn::optimizer::Objective;
use burgers_pinn::solver::{loss_initial, loss_step, InitialObjective, StepObjective};
use burgers_pinn::{Architecture, InitialCondition, Jet, MlpParams, SampleSet, Tape};
use support::*;

fn arch(l: usize, n: usize) -> Architecture {
    Architecture::new(l, n).unwrap()
}

#[test]
fn jet_derivatives_match_differences() {
    for (a, trials) in [(arch(2, 10), 20), (arch(3, 30), 10)] {
        for seed in 0..trials {
            let net = random_net(a, seed, 0.5);
            for x in [0.05, 0.3, 0.5, 0.77, 0.95] {
                let jet = net.jet(x);
                let d1 = central_d1(|x| net.eval(x), x, 1e-5);
                let d2 = central_d2(|x| net.eval(x), x, 1e-4);
                assert!(rel_diff(jet.d1, d1, 1e-3) < 1e-6, "d1 {} vs {d1}", jet.d1);
                assert!(rel_diff(jet.d2, d2, 1e-3) < 1e-3, "d2 {} vs {d2}", jet.d2);
            }
        }
    }
}

#[test]
fn affine_jets_match_differences() {
    // random 3x3 affine map applied to the path a(x) = (sin x, x², e^x)
    let net = random_net(arch(1, 9), 5, 1.0);
    let (w, b) = net.layer(0);
    let w3: Vec<f64> = w.iter().take(9).cloned().collect();
    let b3: Vec<f64> = b.iter().take(3).cloned().collect();
    let layer = burgers_pinn::autodiff::LayerRef::new(&w3, &b3, 3, 3).unwrap();
    let x = 0.4f64;
    let input = [
        Jet::new(x.sin(), x.cos(), -x.sin()),
        Jet::new(x * x, 2.0 * x, 2.0),
        Jet::new(x.exp(), x.exp(), x.exp()),
    ];
    let out = burgers_pinn::autodiff::jet_affine(layer, &input).unwrap();
    for (i, o) in out.iter().enumerate() {
        let f = |x: f64| {
            let a = [x.sin(), x * x, x.exp()];
            (0..3).map(|j| w3[3 * i + j] * a[j]).sum::<f64>() + b3[i]
        };
        assert!(rel_diff(o.d1, central_d1(f, x, 1e-5), 1e-6) < 1e-6);
        assert!(rel_diff(o.d2, central_d2(f, x, 1e-4), 1e-6) < 1e-6);
    }
}

#[test]
fn initial_loss_gradient() {
    let samples = SampleSet::uniform(20).unwrap();
    let u0 = |x: f64| InitialCondition::Problem1.eval(1.0, x);
    for (a, seed) in [(arch(2, 10), 1), (arch(3, 30), 2)] {
        let net = random_net(a, seed, 0.5);
        let mut obj = InitialObjective::new(&samples, u0);
        let mut grad = vec![0.0; net.len()];
        obj.loss_and_grad(&net, None, &mut grad);
        let fd = fd_gradient(&net, |p| loss_initial::<f64>(p, &samples, u0), 1e-6);
        let err = max_rel_diff(&grad, &fd);
        assert!(err < 1e-4, "{a}: {err:e}");
    }
}

#[test]
fn step_loss_gradient() {
    let samples = SampleSet::uniform(20).unwrap();
    for (a, seed) in [(arch(2, 10), 3), (arch(3, 30), 4)] {
        let net = random_net(a, seed, 0.5);
        let prev = random_net(a, seed + 100, 0.5);
        let (dt, nu) = (1e-2, 0.7);
        let mut obj = StepObjective::new(&prev, &samples, dt, nu);
        let mut grad = vec![0.0; net.len()];
        obj.loss_and_grad(&net, None, &mut grad);
        let fd = fd_gradient(&net, |p| loss_step(p, &prev, &samples, dt, nu).total(), 1e-6);
        let err = max_rel_diff(&grad, &fd);
        assert!(err < 1e-4, "{a}: {err:e}");
    }
}

#[test]
fn mini_batch_gradients_are_rescaled_partial_sums() {
    let samples = SampleSet::uniform(10).unwrap();
    let net = random_net(arch(2, 6), 9, 0.5);
    let prev = random_net(arch(2, 6), 10, 0.5);
    let mut obj = StepObjective::new(&prev, &samples, 1e-2, 1.0);
    let n = net.len();
    let mut full = vec![0.0; n];
    obj.loss_and_grad(&net, None, &mut full);
    // two halves, each scaled by 2, average to the full gradient
    let (mut g1, mut g2) = (vec![0.0; n], vec![0.0; n]);
    let l1 = obj.loss_and_grad(&net, Some(&[0, 2, 4, 6, 8]), &mut g1);
    let l2 = obj.loss_and_grad(&net, Some(&[1, 3, 5, 7, 9]), &mut g2);
    let full_loss = obj.loss(&net);
    assert!(((l1 + l2) / 2.0 - full_loss).abs() < 1e-14);
    for i in 0..n {
        assert!(((g1[i] + g2[i]) / 2.0 - full[i]).abs() < 1e-12);
    }
}

#[test]
fn gradients_are_deterministic() {
    let net = MlpParams::<f32>::init(arch(3, 30), 1);
    let prev = MlpParams::<f32>::init(arch(3, 30), 2);
    let samples = SampleSet::uniform(100).unwrap();
    let run = || {
        let mut obj = StepObjective::new(&prev, &samples, 1e-3, 1.0);
        let mut g = vec![0.0f32; net.len()];
        obj.loss_and_grad(&net, None, &mut g);
        g.iter().map(|v| v.to_bits()).collect::<Vec<_>>()
    };
    assert_eq!(run(), run());
}

#[test]
fn tape_is_reusable_across_passes() {
    let net = random_net(arch(2, 5), 4, 0.5);
    let mut tape = Tape::new();
    let mut g1 = vec![0.0; net.len()];
    let mut g2 = vec![0.0; net.len()];
    net.forward_jet(0.9, &mut tape);
    net.forward_jet(0.2, &mut tape);
    tape.backward(net.as_slice(), Jet::new(1.0, 0.5, -0.25), &mut g1).unwrap();
    let mut fresh = Tape::new();
    net.forward_jet(0.2, &mut fresh);
    fresh.backward(net.as_slice(), Jet::new(1.0, 0.5, -0.25), &mut g2).unwrap();
    assert_eq!(g1, g2);
}
