use super::tape::{Gradients, ParamStore};
use super::{Matrix, NumError};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdamConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self {
            lr: 0.001,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

/// First and second moment estimates for every parameter tensor.
#[derive(Clone, Debug)]
pub struct AdamState {
    step: u64,
    first: Vec<Matrix>,
    second: Vec<Matrix>,
}

impl AdamState {
    pub fn new(params: &ParamStore) -> Self {
        let zeros = |m: &Matrix| Matrix::zeros(m.rows(), m.cols());
        Self {
            step: 0,
            first: params.tensors().iter().map(zeros).collect(),
            second: params.tensors().iter().map(zeros).collect(),
        }
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }
}

/// One bias-corrected Adam update applied in place.
pub fn adam_step(
    params: &mut ParamStore,
    grads: &Gradients,
    state: &mut AdamState,
    config: &AdamConfig,
) -> Result<(), NumError> {
    if grads.tensors().len() != params.len() || state.first.len() != params.len() {
        return Err(NumError::Shape {
            op: "adam_step",
            expected: params.len(),
            actual: grads.tensors().len(),
        });
    }
    state.step += 1;
    let t = state.step as i32;
    let correct1 = 1.0 - config.beta1.powi(t);
    let correct2 = 1.0 - config.beta2.powi(t);

    for (i, param) in params.tensors_mut().iter_mut().enumerate() {
        let grad = &grads.tensors()[i];
        if grad.shape() != param.shape() {
            return Err(NumError::Shape {
                op: "adam_step",
                expected: param.values().len(),
                actual: grad.values().len(),
            });
        }
        let m = state.first[i].values_mut();
        let v = state.second[i].values_mut();
        for (j, w) in param.values_mut().iter_mut().enumerate() {
            let g = grad.values()[j];
            m[j] = config.beta1 * m[j] + (1.0 - config.beta1) * g;
            v[j] = config.beta2 * v[j] + (1.0 - config.beta2) * g * g;
            let m_hat = m[j] / correct1;
            let v_hat = v[j] / correct2;
            *w -= config.lr * m_hat / (v_hat.sqrt() + config.eps);
        }
    }
    Ok(())
}
