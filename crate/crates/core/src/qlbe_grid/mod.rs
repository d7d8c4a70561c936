//! Momentum-representation generator on a 3D grid, acting on fixed
//! coherence-vector slices of the tracer density matrix.

mod generator;
mod grid;
mod slice;

pub use generator::GridGenerator;
pub use grid::{MomentumGrid3D, DEFAULT_NODES};
pub use slice::CoherenceSlice;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::PhysicalParams;
use crate::rates::CrossSectionModel;
use crate::vec3::Vec3;

/// Largest allowed dt times the largest loss rate on the grid.
pub const MAX_DT_LOSS_PRODUCT: f64 = 0.1;

/// Time derivative of `slice` under the collision generator, plus the free
/// phase when the slice requests it.
pub fn apply_generator(
    slice: &CoherenceSlice,
    params: &PhysicalParams,
    model: &CrossSectionModel,
) -> Result<CoherenceSlice> {
    let gen = GridGenerator::new(slice.grid, params, model, slice.k, slice.include_free_phase)?;
    let mut out = CoherenceSlice::zeros(slice.grid, slice.k, slice.include_free_phase);
    out.time = slice.time;
    gen.apply(&slice.values, &mut out.values);
    Ok(out)
}

/// Largest time step accepted by [`propagate_slice`] for this generator.
pub fn max_time_step(gen: &GridGenerator) -> f64 {
    MAX_DT_LOSS_PRODUCT / gen.max_loss()
}

/// Classical RK4 propagation of a slice from its current time to `t_final`
/// with step at most `dt` (the last step is shortened to land on `t_final`).
pub fn propagate_slice(
    slice: &CoherenceSlice,
    t_final: f64,
    dt: f64,
    params: &PhysicalParams,
) -> Result<CoherenceSlice> {
    let gen = GridGenerator::new(slice.grid, params, &CrossSectionModel::Constant, slice.k, slice.include_free_phase)?;
    propagate_with(&gen, slice, t_final, dt, |_| {})
}

/// As [`propagate_slice`] with a prebuilt generator and a callback invoked
/// after every step.
pub fn propagate_with(
    gen: &GridGenerator,
    slice: &CoherenceSlice,
    t_final: f64,
    dt: f64,
    mut on_step: impl FnMut(&CoherenceSlice),
) -> Result<CoherenceSlice> {
    if gen.grid() != slice.grid || gen.k() != slice.k {
        return Err(Error::Configuration("generator does not match the slice grid or coherence vector".into()));
    }
    let limit = max_time_step(gen);
    if !(dt > 0.0 && dt <= limit) {
        return Err(Error::Cfl { dt, limit });
    }
    let span = t_final - slice.time;
    if !(span >= 0.0 && span.is_finite()) {
        return Err(Error::Configuration(format!(
            "final time {t_final} precedes the slice time {}",
            slice.time
        )));
    }
    let steps = (span / dt).ceil() as usize;
    let mut state = slice.clone();
    if steps == 0 {
        return Ok(state);
    }
    let h = span / steps as f64;
    let len = state.values.len();
    let zero = Complex64::new(0.0, 0.0);
    let (mut k1, mut k2, mut k3, mut k4) = (vec![zero; len], vec![zero; len], vec![zero; len], vec![zero; len]);
    let mut tmp = vec![zero; len];
    let t0 = slice.time;
    for step in 0..steps {
        let y = &state.values;
        gen.apply(y, &mut k1);
        for i in 0..len {
            tmp[i] = y[i] + k1[i] * (0.5 * h);
        }
        gen.apply(&tmp, &mut k2);
        for i in 0..len {
            tmp[i] = y[i] + k2[i] * (0.5 * h);
        }
        gen.apply(&tmp, &mut k3);
        for i in 0..len {
            tmp[i] = y[i] + k3[i] * h;
        }
        gen.apply(&tmp, &mut k4);
        for i in 0..len {
            state.values[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (h / 6.0);
        }
        state.time = t0 + (step + 1) as f64 * h;
        on_step(&state);
    }
    state.time = t_final;
    Ok(state)
}

/// Instantaneous decay rate −(d/dt)‖ρ‖₁/‖ρ‖₁ of a slice holding the thermal
/// tracer profile at coherence vector `k`. The collision part alone is used:
/// the free phase rotates a real positive profile and does not change its L1
/// norm to first order.
pub fn coherence_decay_rate(k: Vec3, params: &PhysicalParams, grid: MomentumGrid3D) -> Result<f64> {
    let gen = GridGenerator::new(grid, params, &CrossSectionModel::Constant, k, false)?;
    let slice = CoherenceSlice::thermal(grid, k, params);
    let mut out = vec![Complex64::new(0.0, 0.0); grid.len()];
    gen.apply(&slice.values, &mut out);
    let norm: f64 = slice.values.iter().map(|v| v.re).sum();
    let d: f64 = out.iter().map(|v| v.re).sum();
    Ok(-d / norm)
}

/// ‖G ρ_eq‖₁ divided by the total loss flux Σ loss·ρ_eq for the
/// grid-sampled tracer Maxwellian at K = 0. Zero for exact discrete
/// stationarity.
pub fn stationarity_residual(params: &PhysicalParams, grid: MomentumGrid3D) -> Result<f64> {
    let gen = GridGenerator::new(grid, params, &CrossSectionModel::Constant, Vec3::ZERO, false)?;
    let eq = CoherenceSlice::thermal(grid, Vec3::ZERO, params);
    let mut out = vec![Complex64::new(0.0, 0.0); grid.len()];
    gen.apply(&eq.values, &mut out);
    let flux: f64 = eq.values.iter().zip(gen.loss_rates()).map(|(v, l)| v.re * l).sum();
    Ok(out.iter().map(|v| v.norm()).sum::<f64>() / flux)
}

/// Thermal average of the slice loss rate ½[M_out(P + K/2) + M_out(P − K/2)]
/// over the grid-sampled tracer Maxwellian.
pub fn thermal_loss_average(k: Vec3, params: &PhysicalParams, grid: MomentumGrid3D) -> Result<f64> {
    let gen = GridGenerator::new(grid, params, &CrossSectionModel::Constant, k, false)?;
    let slice = CoherenceSlice::thermal(grid, k, params);
    let norm: f64 = slice.values.iter().map(|v| v.re).sum();
    Ok(slice.values.iter().zip(gen.loss_rates()).map(|(v, l)| v.re * l).sum::<f64>() / norm)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> PhysicalParams {
        PhysicalParams {
            tracer_mass: 2.0,
            ..Default::default()
        }
    }

    #[test]
    fn trace_derivative_vanishes_at_k_zero() {
        let p = params();
        let g = MomentumGrid3D::for_params(11, &p).unwrap();
        let s = CoherenceSlice::gaussian(g, Vec3::new(1.0, 0.0, -0.5), 1.2).unwrap();
        let d = apply_generator(&s, &p, &CrossSectionModel::Constant).unwrap();
        assert!(d.trace().norm() < 1e-12);
    }

    #[test]
    fn single_node_derivative_is_phase_plus_loss() {
        let p = params();
        let g = MomentumGrid3D::for_params(11, &p).unwrap();
        let k = Vec3::new(0.7, -0.3, 1.1);
        let mut s = CoherenceSlice::zeros(g, k, true);
        let idx = g.index([2, -1, 3]);
        s.values[idx] = Complex64::new(0.4, -0.2);
        let gen = GridGenerator::new(g, &p, &CrossSectionModel::Constant, k, true).unwrap();
        let mut out = vec![Complex64::new(0.0, 0.0); g.len()];
        gen.apply(&s.values, &mut out);
        let pv = g.momentum(idx);
        let rate = Complex64::new(-gen.loss_rates()[idx], -pv.dot(k) / (p.tracer_mass * p.hbar));
        assert!((out[idx] - rate * s.values[idx]).norm() < 1e-15);
    }

    #[test]
    fn born_model_rejected() {
        let p = params();
        let g = MomentumGrid3D::for_params(11, &p).unwrap();
        let s = CoherenceSlice::thermal(g, Vec3::ZERO, &p);
        let model = CrossSectionModel::Born(crate::rates::BornKernel::from_fn("unit", |_| 1.0));
        assert!(matches!(apply_generator(&s, &p, &model), Err(Error::Unsupported(_))));
    }

    #[test]
    fn step_above_limit_rejected() {
        let p = params();
        let g = MomentumGrid3D::for_params(11, &p).unwrap();
        let s = CoherenceSlice::thermal(g, Vec3::ZERO, &p);
        assert!(matches!(propagate_slice(&s, 1.0, 1.0, &p), Err(Error::Cfl { .. })));
    }
}
