//! Central-difference gradient checking against the reverse-mode pass.

use rand::seq::SliceRandom;
use rand::Rng;

use super::tensor::{Parameter, Tensor};
use super::Result;

#[derive(Debug, Clone)]
pub struct GradCheckReport {
    pub max_rel_err: f64,
    pub coords_checked: usize,
    pub tol: f64,
}

impl GradCheckReport {
    pub fn pass(&self) -> bool {
        self.max_rel_err < self.tol
    }
}

/// Compare analytic gradients of the scalar `f()` with central differences.
///
/// `f` must rebuild its graph on every call and be deterministic (dropout
/// off). At most `coords_per_param` coordinates are sampled per parameter.
pub fn grad_check<F, R>(
    f: F,
    params: &[&Parameter],
    h: f64,
    tol: f64,
    coords_per_param: usize,
    rng: &mut R,
) -> Result<GradCheckReport>
where
    F: Fn() -> Result<Tensor>,
    R: Rng,
{
    for p in params {
        p.zero_grad();
    }
    let loss = f()?;
    loss.backward()?;
    let analytic: Vec<Vec<f64>> = params.iter().map(|p| p.grad()).collect();
    for p in params {
        p.zero_grad();
    }

    let mut max_rel_err: f64 = 0.0;
    let mut coords_checked = 0;
    for (pi, param) in params.iter().enumerate() {
        let mut coords: Vec<usize> = (0..param.len()).collect();
        coords.shuffle(rng);
        coords.truncate(coords_per_param);
        for idx in coords {
            param.nudge(idx, h);
            let plus = f()?.item();
            param.nudge(idx, -2.0 * h);
            let minus = f()?.item();
            param.nudge(idx, h);
            let numeric = (plus - minus) / (2.0 * h);
            let a = analytic[pi][idx];
            let rel = (a - numeric).abs() / a.abs().max(numeric.abs()).max(1e-6);
            if rel > max_rel_err {
                max_rel_err = rel;
            }
            coords_checked += 1;
        }
    }
    Ok(GradCheckReport { max_rel_err, coords_checked, tol })
}
