//! Relaxation equations for the mean momentum and mean kinetic energy of the
//! tracer, in the delta-state closure ⟨f(P)⟩ ≈ f(⟨P⟩).
//!
//! With U = P/(M v_β) and u² = βE m/M:
//!
//! dU/dt   = −A U ₁F₁(−1/2, 5/2; −U²)
//! d(u²)/dt = −2A [u² ₁F₁(−1/2, 5/2; −u²) − (3/2)(m*/M) ₁F₁(−3/2, 3/2; −u²)]
//!
//! where A = n σ_tot/(4π) (16/3) sqrt(8π/(mβ)) (m*/M). A reduces to the
//! friction coefficient η as m/M → 0, and the kinetic functions to one near
//! U = 0, which gives the diffusive-limit equations dP/dt = −ηP and
//! dE/dt = −2η(E − 3/(2β)).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::diffusive::coefficients_quiet as coefficients;
use crate::error::{Error, Result};
use crate::ode::{integrate_adaptive, OdeOptions};
use crate::params::{derive_scales, PhysicalParams};
use crate::special::{kummer_a, kummer_b};
use crate::vec3::Vec3;

/// Mean momentum and mean kinetic energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentState {
    pub momentum: Vec3,
    pub energy: f64,
}

impl MomentState {
    /// Sharp initial momentum: E = P²/(2M).
    pub fn from_momentum(p: Vec3, params: &PhysicalParams) -> Self {
        MomentState {
            momentum: p,
            energy: p.norm_sq() / (2.0 * params.tracer_mass),
        }
    }
}

/// Which right-hand side to integrate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClosureMode {
    /// Full kinetic functions.
    Exact,
    /// Diffusive limit: linear friction and relaxation to equipartition.
    Diffusive,
}

/// Rate prefactor A (1/time).
pub fn relaxation_prefactor(params: &PhysicalParams) -> f64 {
    let sc = derive_scales(params);
    params.n_gas * params.sigma_tot / (4.0 * PI)
        * (16.0 / 3.0)
        * (8.0 * PI * params.temperature / params.gas_mass).sqrt()
        * (sc.m_star / params.tracer_mass)
}

/// dU/dt at dimensionless momentum U.
pub fn i1(u: Vec3, params: &PhysicalParams) -> Vec3 {
    u * (-relaxation_prefactor(params) * kummer_a(u.norm_sq()))
}

/// d(u²)/dt at u² = βE m/M.
pub fn i2(u2: f64, params: &PhysicalParams) -> f64 {
    let sc = derive_scales(params);
    let ratio = sc.m_star / params.tracer_mass;
    -2.0 * relaxation_prefactor(params) * (u2 * kummer_a(u2) - 1.5 * ratio * kummer_b(u2))
}

/// d⟨P⟩/dt in the delta-state closure.
pub fn momentum_rhs(p: Vec3, params: &PhysicalParams) -> Vec3 {
    let scale = params.tracer_mass * derive_scales(params).v_beta;
    i1(p / scale, params) * scale
}

/// d⟨E⟩/dt in the delta-state closure.
pub fn energy_rhs(e: f64, params: &PhysicalParams) -> f64 {
    let u2 = params.beta() * e * params.mass_ratio();
    i2(u2, params) / (params.beta() * params.mass_ratio())
}

fn diffusive_rhs(state: &[f64], eta: f64, equipartition: f64, out: &mut [f64]) {
    for i in 0..3 {
        out[i] = -eta * state[i];
    }
    out[3] = -2.0 * eta * (state[3] - equipartition);
}

/// Integrate the moment equations and report the state at each of the
/// (non-decreasing, non-negative) `times`. Adaptive Dormand–Prince with
/// relative tolerance 1e-10.
pub fn integrate_moments(
    initial: MomentState,
    times: &[f64],
    params: &PhysicalParams,
    mode: ClosureMode,
) -> Result<Vec<MomentState>> {
    if initial.energy < 0.0 || !initial.energy.is_finite() || !initial.momentum.is_finite() {
        return Err(Error::Precondition(format!("invalid initial moments {initial:?}")));
    }
    let y0 = [initial.momentum.x, initial.momentum.y, initial.momentum.z, initial.energy];
    let eta = coefficients(params).eta;
    let equipartition = 1.5 * params.temperature;
    let opts = OdeOptions::default();
    let out = match mode {
        ClosureMode::Exact => integrate_adaptive(
            |_, y, d| {
                let dp = momentum_rhs(Vec3::new(y[0], y[1], y[2]), params);
                d[0] = dp.x;
                d[1] = dp.y;
                d[2] = dp.z;
                d[3] = energy_rhs(y[3].max(0.0), params);
            },
            0.0,
            &y0,
            times,
            opts,
        )?,
        ClosureMode::Diffusive => {
            integrate_adaptive(|_, y, d| diffusive_rhs(y, eta, equipartition, d), 0.0, &y0, times, opts)?
        }
    };
    Ok(out
        .into_iter()
        .map(|y| MomentState {
            momentum: Vec3::new(y[0], y[1], y[2]),
            energy: y[3],
        })
        .collect())
}

/// Closed-form solution of the diffusive-limit equations.
pub fn diffusive_solution(initial: MomentState, t: f64, params: &PhysicalParams) -> MomentState {
    let eta = coefficients(params).eta;
    let equipartition = 1.5 * params.temperature;
    MomentState {
        momentum: initial.momentum * (-eta * t).exp(),
        energy: equipartition + (initial.energy - equipartition) * (-2.0 * eta * t).exp(),
    }
}

/// Stationary mean energy of the exact closure: the root of
/// [`energy_rhs`] on (0, ∞). Returns `None` when n_gas = 0.
pub fn energy_fixed_point(params: &PhysicalParams) -> Option<f64> {
    if params.n_gas == 0.0 {
        return None;
    }
    let mut lo = 0.0;
    let mut hi = 1.5 * params.temperature;
    while energy_rhs(hi, params) > 0.0 {
        lo = hi;
        hi *= 2.0;
        if !hi.is_finite() {
            return None;
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if energy_rhs(mid, params) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}
