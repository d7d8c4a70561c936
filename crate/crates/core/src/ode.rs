//! Explicit Runge–Kutta integration with the Dormand–Prince 5(4) pair.

use crate::error::{Error, Result};

/// Step-size control settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Steps shorter than `h_min_rel · max(|t|, 1)` abort the integration.
    pub h_min_rel: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            rtol: 1e-10,
            atol: 1e-14,
            h_min_rel: 1e-14,
            max_steps: 1_000_000,
        }
    }
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
/// Fifth-order weights (equal to the last row of A: first same as last).
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
/// Difference between the fifth- and fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// One Dormand–Prince step. Returns the fifth-order solution in `y_out` and
/// the embedded error estimate in `err`.
fn dp_step<F>(f: &mut F, t: f64, y: &[f64], h: f64, k: &mut [Vec<f64>; 7], y_out: &mut [f64], err: &mut [f64])
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let n = y.len();
    let mut stage = vec![0.0; n];
    f(t, y, &mut k[0]);
    for s in 1..7 {
        for i in 0..n {
            let mut acc = y[i];
            for j in 0..s {
                acc += h * A[s][j] * k[j][i];
            }
            stage[i] = acc;
        }
        f(t + C[s] * h, &stage, &mut k[s]);
    }
    for i in 0..n {
        let mut y5 = y[i];
        let mut e = 0.0;
        for s in 0..7 {
            y5 += h * B5[s] * k[s][i];
            e += h * E[s] * k[s][i];
        }
        y_out[i] = y5;
        err[i] = e;
    }
}

/// Integrate y′ = f(t, y) from `t0` and report the state at every time in
/// `t_out` (non-decreasing, all ≥ t0). Adaptive step-size control keeps the
/// local error below `atol + rtol·|y|` componentwise.
pub fn integrate_adaptive<F>(mut f: F, t0: f64, y0: &[f64], t_out: &[f64], opts: OdeOptions) -> Result<Vec<Vec<f64>>>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let n = y0.len();
    let mut k: [Vec<f64>; 7] = std::array::from_fn(|_| vec![0.0; n]);
    let mut y = y0.to_vec();
    let mut y_new = vec![0.0; n];
    let mut err = vec![0.0; n];
    let mut t = t0;
    let mut out = Vec::with_capacity(t_out.len());
    let span = t_out.last().map_or(0.0, |&tl| tl - t0);
    let mut h = (span * 1e-3).max(1e-6 * t0.abs().max(1.0));
    let mut steps = 0usize;

    for &target in t_out {
        if target < t {
            return Err(Error::Precondition(format!(
                "output times must be non-decreasing and >= t0; got {target} after {t}"
            )));
        }
        while t < target {
            steps += 1;
            if steps > opts.max_steps {
                return Err(Error::StepSizeUnderflow { t });
            }
            let last = h >= target - t;
            let h_try = if last { target - t } else { h };
            dp_step(&mut f, t, &y, h_try, &mut k, &mut y_new, &mut err);
            let mut norm = 0.0f64;
            for i in 0..n {
                let sc = opts.atol + opts.rtol * y[i].abs().max(y_new[i].abs());
                norm = norm.max((err[i] / sc).abs());
            }
            if !norm.is_finite() {
                norm = 1e10;
            }
            if norm <= 1.0 {
                t = if last { target } else { t + h_try };
                std::mem::swap(&mut y, &mut y_new);
                let grow = if norm == 0.0 { 5.0 } else { (0.9 * norm.powf(-0.2)).clamp(0.2, 5.0) };
                if !last {
                    h = h_try * grow;
                }
            } else {
                h = h_try * (0.9 * norm.powf(-0.2)).clamp(0.1, 0.9);
            }
            if h < opts.h_min_rel * t.abs().max(1.0) {
                return Err(Error::StepSizeUnderflow { t });
            }
        }
        out.push(y.clone());
    }
    Ok(out)
}

/// Integrate with `n_steps` equal fifth-order steps from t0 to t1.
pub fn integrate_fixed<F>(mut f: F, t0: f64, y0: &[f64], t1: f64, n_steps: usize) -> Vec<f64>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let n = y0.len();
    let mut k: [Vec<f64>; 7] = std::array::from_fn(|_| vec![0.0; n]);
    let mut y = y0.to_vec();
    let mut y_new = vec![0.0; n];
    let mut err = vec![0.0; n];
    let h = (t1 - t0) / n_steps as f64;
    for s in 0..n_steps {
        dp_step(&mut f, t0 + s as f64 * h, &y, h, &mut k, &mut y_new, &mut err);
        std::mem::swap(&mut y, &mut y_new);
    }
    y
}
