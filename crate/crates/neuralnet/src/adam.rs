//! Adam with bias correction, plus plain gradient descent.

use crate::model::Parameters;
use crate::train::TrainConfig;

/// First/second moment estimates and the step counter.
#[derive(Debug, Clone)]
pub struct AdamState {
    pub m: Parameters,
    pub v: Parameters,
    pub step: u64,
}

impl AdamState {
    pub fn new(cfg: &crate::model::ModelConfig) -> Self {
        Self {
            m: Parameters::zeros(cfg),
            v: Parameters::zeros(cfg),
            step: 0,
        }
    }
}

/// One Adam update:
///
/// ```text
/// m = b1*m + (1-b1)*g        v = b2*v + (1-b2)*g^2
/// p -= lr * (m/(1-b1^t)) / (sqrt(v/(1-b2^t)) + eps)
/// ```
pub fn adam_step(
    params: &mut Parameters,
    grads: &Parameters,
    state: &mut AdamState,
    cfg: &TrainConfig,
) {
    state.step += 1;
    let t = state.step as i32;
    let bc1 = 1.0 - cfg.beta1.powi(t);
    let bc2 = 1.0 - cfg.beta2.powi(t);

    let mut p_t = params.tensors_mut();
    let g_list = grads.named_tensors();
    let mut m_t = state.m.tensors_mut();
    let mut v_t = state.v.tensors_mut();
    for i in 0..p_t.len() {
        let p = p_t[i].data_mut();
        let g = g_list[i].1.data();
        let m = m_t[i].data_mut();
        let v = v_t[i].data_mut();
        for j in 0..p.len() {
            let gj = g[j];
            m[j] = cfg.beta1 * m[j] + (1.0 - cfg.beta1) * gj;
            v[j] = cfg.beta2 * v[j] + (1.0 - cfg.beta2) * gj * gj;
            let m_hat = m[j] / bc1;
            let v_hat = v[j] / bc2;
            p[j] -= cfg.learning_rate * m_hat / (v_hat.sqrt() + cfg.epsilon);
        }
    }
}

/// Plain full-batch gradient descent: `p -= lr * g`.
pub fn sgd_step(params: &mut Parameters, grads: &Parameters, learning_rate: f64) {
    let mut p_t = params.tensors_mut();
    let g_list = grads.named_tensors();
    for i in 0..p_t.len() {
        let p = p_t[i].data_mut();
        let g = g_list[i].1.data();
        for j in 0..p.len() {
            p[j] -= learning_rate * g[j];
        }
    }
}
