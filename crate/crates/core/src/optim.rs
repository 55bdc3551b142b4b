//! Adam with bias-corrected moments.

use ndarray::Zip;

use crate::error::{Error, Result};
use crate::nn::{Gradients, Network};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdamConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.01,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub config: AdamConfig,
    pub first_moment: Gradients,
    pub second_moment: Gradients,
    pub timestep: u64,
}

impl AdamState {
    /// Zero moments, timestep 0.
    pub fn new(net: &Network, config: AdamConfig) -> Self {
        Self {
            config,
            first_moment: Gradients::zeros_like(net),
            second_moment: Gradients::zeros_like(net),
            timestep: 0,
        }
    }

    /// One update, in place:
    ///
    /// m ← β1·m + (1−β1)·g, v ← β2·v + (1−β2)·g²,
    /// θ ← θ − α·m̂ / (√v̂ + ε) with m̂ = m/(1−β1ᵗ), v̂ = v/(1−β2ᵗ).
    pub fn step(&mut self, net: &mut Network, grads: &Gradients) -> Result<()> {
        if !grads.is_finite() {
            return Err(Error::invalid(format!(
                "non-finite gradient at Adam step {}",
                self.timestep + 1
            )));
        }
        let shapes_match = net.layers.len() == grads.layers.len()
            && net.layers.len() == self.first_moment.layers.len()
            && net.layers.iter().zip(&grads.layers).zip(&self.first_moment.layers).all(|((p, g), m)| {
                p.weights.dim() == g.weights.dim()
                    && p.bias.len() == g.bias.len()
                    && p.weights.dim() == m.weights.dim()
            });
        if !shapes_match {
            return Err(Error::Shape("gradient or moment shapes differ from parameters".into()));
        }

        self.timestep += 1;
        let AdamConfig {
            learning_rate,
            beta1,
            beta2,
            epsilon,
        } = self.config;
        let t = self.timestep as i32;
        let m_correction = 1.0 - beta1.powi(t);
        let v_correction = 1.0 - beta2.powi(t);
        let update = |theta: &mut f64, m: &mut f64, v: &mut f64, &g: &f64| {
            *m = beta1 * *m + (1.0 - beta1) * g;
            *v = beta2 * *v + (1.0 - beta2) * g * g;
            let m_hat = *m / m_correction;
            let v_hat = *v / v_correction;
            *theta -= learning_rate * m_hat / (v_hat.sqrt() + epsilon);
        };
        for (((p, g), m), v) in net
            .layers
            .iter_mut()
            .zip(&grads.layers)
            .zip(&mut self.first_moment.layers)
            .zip(&mut self.second_moment.layers)
        {
            Zip::from(&mut p.weights)
                .and(&mut m.weights)
                .and(&mut v.weights)
                .and(&g.weights)
                .for_each(update);
            Zip::from(&mut p.bias)
                .and(&mut m.bias)
                .and(&mut v.bias)
                .and(&g.bias)
                .for_each(update);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::{InjectionScheme, Layer};
    use ndarray::{array, Array2};

    /// A "network" holding one scalar parameter, to drive Adam on 1-D problems.
    fn scalar(theta: f64) -> Network {
        Network::from_layers_unchecked(
            InjectionScheme::NONE,
            0,
            vec![Layer {
                weights: Array2::from_elem((1, 1), theta),
                bias: array![0.0],
            }],
        )
    }

    fn scalar_grad(g: f64) -> Gradients {
        Gradients {
            layers: vec![Layer {
                weights: Array2::from_elem((1, 1), g),
                bias: array![0.0],
            }],
        }
    }

    #[test]
    fn init_state_is_zero() {
        let net = Network::init(InjectionScheme::of(&[2]).unwrap(), 2, 1).unwrap();
        let st = AdamState::new(&net, AdamConfig::default());
        assert_eq!(st.timestep, 0);
        assert!(st.first_moment.values().chain(st.second_moment.values()).all(|v| v == 0.0));
        for (m, p) in st.first_moment.layers.iter().zip(&net.layers) {
            assert_eq!(m.weights.dim(), p.weights.dim());
            assert_eq!(m.bias.len(), p.bias.len());
        }
    }

    #[test]
    fn first_step_by_hand() {
        let mut net = scalar(0.0);
        let mut st = AdamState::new(&net, AdamConfig::default());
        st.step(&mut net, &scalar_grad(1.0)).unwrap();
        let expected = -0.01 / (1.0 + 1e-6);
        assert!((net.layers[0].weights[[0, 0]] - expected).abs() < 1e-12);
        assert_eq!(st.timestep, 1);
    }

    #[test]
    fn zero_gradient_leaves_params() {
        let mut net = Network::init(InjectionScheme::NONE, 0, 5).unwrap();
        let before = net.clone();
        let mut st = AdamState::new(&net, AdamConfig::default());
        st.step(&mut net, &Gradients::zeros_like(&before)).unwrap();
        assert_eq!(net, before);
    }

    #[test]
    fn first_step_moves_against_gradient_by_at_most_lr() {
        let mut net = Network::init(InjectionScheme::of(&[1, 5]).unwrap(), 1, 5).unwrap();
        let before = net.clone();
        let mut grads = Gradients::zeros_like(&net);
        for (i, l) in grads.layers.iter_mut().enumerate() {
            l.weights.indexed_iter_mut().for_each(|((r, c), v)| {
                *v = ((r * 7 + c * 3 + i) % 11) as f64 - 5.0;
            });
        }
        let mut st = AdamState::new(&net, AdamConfig::default());
        st.step(&mut net, &grads).unwrap();
        for ((a, b), g) in net.layers.iter().zip(&before.layers).zip(&grads.layers) {
            for ((x, y), gv) in a.weights.iter().zip(b.weights.iter()).zip(g.weights.iter()) {
                let delta = x - y;
                assert!(delta.abs() <= 0.01 + 1e-12);
                if *gv != 0.0 {
                    assert!(delta * gv < 0.0);
                }
            }
        }
    }

    #[test]
    fn quadratic_converges() {
        let mut net = scalar(0.0);
        let mut st = AdamState::new(&net, AdamConfig::default());
        let mut steps = 0;
        while steps < 5000 {
            let theta = net.layers[0].weights[[0, 0]];
            if (theta - 3.0).abs() < 1e-3 && steps > 0 {
                break;
            }
            st.step(&mut net, &scalar_grad(2.0 * (theta - 3.0))).unwrap();
            steps += 1;
        }
        let theta = net.layers[0].weights[[0, 0]];
        assert!((theta - 3.0).abs() < 1e-3, "theta {theta} after {steps} steps");
    }

    #[test]
    fn identical_gradient_sequences_are_bitwise_identical() {
        let init = Network::init(InjectionScheme::of(&[3]).unwrap(), 2, 8).unwrap();
        let (mut a, mut b) = (init.clone(), init.clone());
        let mut sa = AdamState::new(&a, AdamConfig::default());
        let mut sb = AdamState::new(&b, AdamConfig::default());
        for k in 0..5 {
            let mut g = Gradients::zeros_like(&init);
            g.layers[2].weights.fill(0.1 * k as f64 - 0.2);
            sa.step(&mut a, &g).unwrap();
            sb.step(&mut b, &g).unwrap();
        }
        assert_eq!(a, b);
    }

    #[test]
    fn non_finite_gradient_rejected() {
        let mut net = scalar(1.0);
        let mut st = AdamState::new(&net, AdamConfig::default());
        assert!(st.step(&mut net, &scalar_grad(f64::NAN)).is_err());
        assert_eq!(st.timestep, 0);
    }
}
