use super::{Gradients, ModelParams, NnError, PARAM_NAMES};

pub const BETA1: f64 = 0.9;
pub const BETA2: f64 = 0.999;
pub const EPSILON: f64 = 1e-8;

/// First and second moments for every parameter array, in
/// [`ModelParams::arrays`] order.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub m: Vec<Vec<f64>>,
    pub v: Vec<Vec<f64>>,
    pub t: u64,
}

impl AdamState {
    pub fn new(p: &ModelParams) -> Self {
        let zeros: Vec<Vec<f64>> = p.arrays().iter().map(|a| vec![0.0; a.len()]).collect();
        Self {
            m: zeros.clone(),
            v: zeros,
            t: 0,
        }
    }

    /// State for a single flat array, useful for scalar checks.
    pub fn for_len(n: usize) -> Self {
        Self {
            m: vec![vec![0.0; n]],
            v: vec![vec![0.0; n]],
            t: 0,
        }
    }
}

/// Bias-corrected Adam update of one array at timestep `t` (already
/// incremented).
pub fn adam_update(p: &mut [f64], g: &[f64], m: &mut [f64], v: &mut [f64], t: u64, lr: f64) {
    let bc1 = 1.0 - BETA1.powi(t as i32);
    let bc2 = 1.0 - BETA2.powi(t as i32);
    for k in 0..p.len() {
        m[k] = BETA1 * m[k] + (1.0 - BETA1) * g[k];
        v[k] = BETA2 * v[k] + (1.0 - BETA2) * g[k] * g[k];
        let m_hat = m[k] / bc1;
        let v_hat = v[k] / bc2;
        p[k] -= lr * m_hat / (v_hat.sqrt() + EPSILON);
    }
}

/// One optimizer step over every parameter array.
pub fn adam_step(
    params: &mut ModelParams,
    grads: &Gradients,
    st: &mut AdamState,
    lr: f64,
) -> Result<(), NnError> {
    let g = grads.arrays();
    {
        let p = params.arrays();
        if st.m.len() != p.len() || st.v.len() != p.len() {
            return Err(NnError::Shape("optimizer state has the wrong number of arrays".into()));
        }
        for (k, name) in PARAM_NAMES.iter().enumerate() {
            let n = p[k].len();
            if g[k].len() != n || st.m[k].len() != n || st.v[k].len() != n {
                return Err(NnError::Shape(format!("{name}: gradient or moments not congruent")));
            }
            if g[k].iter().any(|x| !x.is_finite()) {
                return Err(NnError::NonFinite(format!("gradient of {name}")));
            }
        }
    }
    st.t += 1;
    for (k, p) in params.arrays_mut().into_iter().enumerate() {
        adam_update(p, g[k], &mut st.m[k], &mut st.v[k], st.t, lr);
        if p.iter().any(|x| !x.is_finite()) {
            return Err(NnError::NonFinite(format!("update of {}", PARAM_NAMES[k])));
        }
    }
    Ok(())
}
