//! Adam with L2 weight decay folded into the gradient (classic form;
//! decoupled decay available behind a flag).

use std::collections::HashMap;

use super::tensor::Parameter;
use super::{NnError, Result};

#[derive(Debug, Clone, Copy)]
pub struct AdamConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub weight_decay: f64,
    /// When true, decay is applied directly to the weights instead of being
    /// added to the gradient before the moment updates.
    pub decoupled_decay: bool,
}

impl Default for AdamConfig {
    fn default() -> Self {
        AdamConfig {
            lr: 0.01,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            weight_decay: 1e-4,
            decoupled_decay: false,
        }
    }
}

pub struct AdamState {
    cfg: AdamConfig,
    step: u64,
    /// First/second moment buffers, allocated only for trainable parameters.
    moments: HashMap<String, (Vec<f64>, Vec<f64>)>,
}

impl AdamState {
    pub fn new(cfg: AdamConfig) -> AdamState {
        AdamState { cfg, step: 0, moments: HashMap::new() }
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }

    pub fn has_moments_for(&self, name: &str) -> bool {
        self.moments.contains_key(name)
    }

    /// One update over all trainable parameters. Non-trainable parameters
    /// are left bit-identical. Gradients are zeroed afterward.
    pub fn step(&mut self, params: &[&Parameter]) -> Result<()> {
        self.step += 1;
        let t = self.step as i32;
        let cfg = self.cfg;
        let bc1 = 1.0 - cfg.beta1.powi(t);
        let bc2 = 1.0 - cfg.beta2.powi(t);
        for param in params {
            if !param.trainable() {
                param.zero_grad();
                continue;
            }
            let grad = param.grad_storage().borrow();
            if grad.iter().any(|g| !g.is_finite()) {
                return Err(NnError::NonFiniteGradient { name: param.name().to_string() });
            }
            let (m, v) = self
                .moments
                .entry(param.name().to_string())
                .or_insert_with(|| (vec![0.0; param.len()], vec![0.0; param.len()]));
            let mut values = param.values_storage().borrow_mut();
            for i in 0..values.len() {
                let mut g = grad[i];
                if !cfg.decoupled_decay {
                    g += cfg.weight_decay * values[i];
                }
                m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g;
                v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g * g;
                let m_hat = m[i] / bc1;
                let v_hat = v[i] / bc2;
                values[i] -= cfg.lr * m_hat / (v_hat.sqrt() + cfg.eps);
                if cfg.decoupled_decay {
                    values[i] -= cfg.lr * cfg.weight_decay * values[i];
                }
            }
            drop(values);
            drop(grad);
            param.zero_grad();
        }
        Ok(())
    }
}
