//! Test-only oracles shared by the integration suites.

#![allow(dead_code)]

use ndarray::{Array1, Array2};
use pgdnn::nn::{InjectionScheme, Network};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const FD_STEP: f64 = 1e-5;
pub const FD_REL_TOL: f64 = 1e-5;
pub const FD_ABS_TOL: f64 = 1e-8;
pub const KINK_MARGIN: f64 = 1e-3;

/// A random network with nonzero biases plus a small random batch.
pub struct GradCase {
    pub net: Network,
    pub base: Array2<f64>,
    pub physics: Array2<f64>,
    pub target: Array1<f64>,
}

pub fn grad_case(scheme: InjectionScheme, k: usize, batch: usize, seed: u64) -> GradCase {
    let k = if scheme.is_empty() { 0 } else { k };
    let mut net = Network::init(scheme, k, seed).unwrap();
    let mut r = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    for layer in &mut net.layers {
        layer.bias.mapv_inplace(|_| r.gen_range(-0.3..0.3));
    }
    // Central differences are meaningless across a ReLU kink, so redraw the
    // batch until every hidden pre-activation is clear of zero.
    loop {
        let case = GradCase {
            net: net.clone(),
            base: Array2::from_shape_simple_fn((batch, 6), || r.gen_range(-2.0..2.0)),
            physics: Array2::from_shape_simple_fn((batch, k), || r.gen_range(-2.0..2.0)),
            target: Array1::from_shape_simple_fn(batch, || r.gen_range(-1.0..1.0)),
        };
        let cache = net.forward_batch(case.base.view(), case.physics.view()).unwrap();
        if cache.hidden_pre.iter().flatten().all(|h| h.abs() > KINK_MARGIN) {
            return case;
        }
    }
}

/// Mean squared error computed straight from the predictions, without the
/// backward path.
pub fn batch_mse(case: &GradCase, net: &Network) -> f64 {
    let p = net.predict_batch(case.base.view(), case.physics.view()).unwrap();
    let r = p - &case.target;
    r.dot(&r) / case.target.len() as f64
}

/// Central differences of the batch loss for every weight and bias, in the
/// same order as `Gradients::values`.
pub fn central_differences(case: &GradCase) -> Vec<f64> {
    let mut net = case.net.clone();
    let mut out = Vec::new();
    for j in 0..net.layers.len() {
        let (rows, cols) = net.layers[j].weights.dim();
        for r in 0..rows {
            for c in 0..cols {
                let orig = net.layers[j].weights[[r, c]];
                net.layers[j].weights[[r, c]] = orig + FD_STEP;
                let up = batch_mse(case, &net);
                net.layers[j].weights[[r, c]] = orig - FD_STEP;
                let down = batch_mse(case, &net);
                net.layers[j].weights[[r, c]] = orig;
                out.push((up - down) / (2.0 * FD_STEP));
            }
        }
        for r in 0..rows {
            let orig = net.layers[j].bias[r];
            net.layers[j].bias[r] = orig + FD_STEP;
            let up = batch_mse(case, &net);
            net.layers[j].bias[r] = orig - FD_STEP;
            let down = batch_mse(case, &net);
            net.layers[j].bias[r] = orig;
            out.push((up - down) / (2.0 * FD_STEP));
        }
    }
    out
}

/// Returns the worst (index, analytic, numeric) entry that violates the
/// mixed tolerance, if any, and the number of entries checked.
pub fn gradient_mismatch(case: &GradCase) -> (Option<(usize, f64, f64)>, usize) {
    let (_, grads) = case
        .net
        .batch_loss_and_grads(case.base.view(), case.physics.view(), case.target.view())
        .unwrap();
    let analytic: Vec<f64> = grads.values().collect();
    let numeric = central_differences(case);
    assert_eq!(analytic.len(), numeric.len());
    let mut worst: Option<(usize, f64, f64)> = None;
    let mut worst_excess = 0.0;
    for (i, (&a, &n)) in analytic.iter().zip(&numeric).enumerate() {
        let allowed = FD_ABS_TOL.max(FD_REL_TOL * a.abs().max(n.abs()));
        let excess = (a - n).abs() / allowed;
        if excess > 1.0 && excess > worst_excess {
            worst_excess = excess;
            worst = Some((i, a, n));
        }
    }
    (worst, analytic.len())
}

/// 20 cases covering all nine schemes and k = 1, 2, 3.
pub fn gradient_suite() -> Vec<(InjectionScheme, usize, u64)> {
    let schemes = InjectionScheme::studied();
    (0..20)
        .map(|i| (schemes[i % schemes.len()], 1 + i % 3, 1000 + i as u64))
        .collect()
}
