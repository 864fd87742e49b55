#![allow(dead_code)]

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use vecsim::learner::{Batch, Maddpg, Mlp, TrainerConfig};

pub const FD_STEP: f64 = 1e-5;

/// `||a - b|| / max(||a||, ||b||)`, zero when both vanish.
pub fn relative_error(analytic: &[f64], numeric: &[f64]) -> f64 {
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let diff: Vec<f64> = analytic.iter().zip(numeric).map(|(a, n)| a - n).collect();
    let scale = norm(analytic).max(norm(numeric));
    if scale == 0.0 {
        0.0
    } else {
        norm(&diff) / scale
    }
}

/// Central differences of `f` over every parameter of `net`.
pub fn numeric_gradient(net: &Mlp, mut f: impl FnMut(&Mlp) -> f64) -> Vec<f64> {
    let base = net.flat_params();
    let mut probe = net.clone();
    let mut out = Vec::with_capacity(base.len());
    for i in 0..base.len() {
        let mut p = base.clone();
        p[i] = base[i] + FD_STEP;
        probe.set_flat_params(&p);
        let up = f(&probe);
        p[i] = base[i] - FD_STEP;
        probe.set_flat_params(&p);
        let down = f(&probe);
        out.push((up - down) / (2.0 * FD_STEP));
    }
    out
}

/// A random small multi-agent model and a batch that matches it.
pub fn small_instance(seed: u64) -> (Maddpg, Batch) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let agents = rng.random_range(1..=3);
    let obs = rng.random_range(2..=5);
    let act = rng.random_range(1..=4);
    let width = rng.random_range(3..=8);
    let cfg = TrainerConfig {
        hidden_layers: vec![width; rng.random_range(1..=2)],
        gamma: 0.9,
        ..TrainerConfig::default()
    };
    let model = Maddpg::new(agents, obs, act, &cfg, &mut rng);
    let rows = rng.random_range(1..=6);
    let mut fill = |cols: usize, lo: f64, hi: f64| {
        Array2::from_shape_fn((rows, cols), |_| rng.random_range(lo..hi))
    };
    let batch = Batch {
        states: fill(agents * obs, -1.0, 1.0),
        actions: fill(agents * act, 0.0, 1.0),
        rewards: fill(agents, -1.0, 1.0),
        next_states: fill(agents * obs, -1.0, 1.0),
    };
    (model, batch)
}

/// Worst relative error between analytic and numeric gradients of the
/// critic loss and the actor objective, over every agent of the instance.
pub fn gradient_check(seed: u64) -> (f64, f64) {
    let (model, batch) = small_instance(seed);
    let mut critic_err: f64 = 0.0;
    let mut actor_err: f64 = 0.0;
    for k in 0..model.n_agents() {
        let targets = model.td_targets(k, &batch).unwrap();
        let (_, grads) = model.critic_loss_gradient(k, &batch, &targets).unwrap();
        let numeric = numeric_gradient(&model.agents[k].critic, |net| {
            let mut m = model.clone();
            m.agents[k].critic = net.clone();
            m.critic_loss_gradient(k, &batch, &targets).unwrap().0
        });
        critic_err = critic_err.max(relative_error(&grads.flat(), &numeric));

        let grads = model.actor_gradient(k, &batch).unwrap();
        let numeric = numeric_gradient(&model.agents[k].actor, |net| {
            let mut m = model.clone();
            m.agents[k].actor = net.clone();
            m.actor_objective(k, &batch).unwrap()
        });
        actor_err = actor_err.max(relative_error(&grads.flat(), &numeric));
    }
    (critic_err, actor_err)
}
