use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{derive_scales, PhysicalParams};
use crate::quadrature::{gauss_hermite_plane, integrate_spherical, SphericalOrders};

/// Friction and diffusion coefficients of the diffusive limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiffusionCoefficients {
    /// Friction rate η.
    pub eta: f64,
    /// Momentum diffusion D_pp = η M T.
    pub d_pp: f64,
    /// Position diffusion D_xx = η ħ²/(16 M T), the minimal value compatible
    /// with a Lindblad generator.
    pub d_xx: f64,
}

impl DiffusionCoefficients {
    /// 16 D_pp D_xx / (η ħ)², equal to one for the minimal D_xx.
    pub fn minimality_ratio(&self, hbar: f64) -> f64 {
        16.0 * self.d_pp * self.d_xx / (self.eta * self.eta * hbar * hbar)
    }
}

/// η = (16/3) n σ_tot sqrt(m T/(2π)) / M, without the validity warning.
pub(crate) fn eta_closed_form(params: &PhysicalParams) -> f64 {
    16.0 / 3.0 * params.n_gas * params.sigma_tot * (params.gas_mass * params.temperature / (2.0 * PI)).sqrt()
        / params.tracer_mass
}

/// Closed-form diffusive-limit coefficients. Logs a warning when m/M is
/// above the validity threshold.
pub fn coefficients(params: &PhysicalParams) -> DiffusionCoefficients {
    params.check_diffusive_validity();
    coefficients_quiet(params)
}

pub(crate) fn coefficients_quiet(params: &PhysicalParams) -> DiffusionCoefficients {
    let eta = eta_closed_form(params);
    let mt = params.tracer_mass * params.temperature;
    let d_pp = eta * mt;
    let ratio = params.hbar / (4.0 * mt);
    DiffusionCoefficients {
        eta,
        d_pp,
        d_xx: d_pp * ratio * ratio,
    }
}

/// η from its defining integral over momentum transfers,
/// (β/6M)(n/m)(σ_tot/4π) ∫ d³Q |Q| e^{−βQ²/8m} ∫_{Q⊥} d²p μ_β(p),
/// with the spherical product rule in Q and Gauss–Hermite on the plane.
pub fn eta_by_quadrature(params: &PhysicalParams) -> Result<f64> {
    let fine = eta_quadrature_with(params, SphericalOrders::DEFAULT, 12);
    let coarse = eta_quadrature_with(params, SphericalOrders::COARSE, 8);
    let estimate = (fine - coarse).abs();
    if estimate > 1e-9 * fine.abs() {
        return Err(Error::NumericAccuracy {
            estimate: estimate / fine.abs(),
            tolerance: 1e-9,
        });
    }
    Ok(fine)
}

fn eta_quadrature_with(params: &PhysicalParams, orders: SphericalOrders, plane_order: usize) -> f64 {
    let sc = derive_scales(params);
    let beta = params.beta();
    let m = params.gas_mass;
    let p_beta = sc.p_beta;
    let mu_peak = PI.powf(-1.5) * p_beta.powi(-3);
    // The plane integral does not depend on Q for a Maxwellian gas.
    let plane = mu_peak * gauss_hermite_plane(plane_order, p_beta, |_, _| 1.0);
    // e^{−βQ²/8m} has width 2 p_β.
    let q_max = 24.0 * p_beta;
    let radial = integrate_spherical(orders, 0.0, q_max, |q, _, _| q * (-beta * q * q / (8.0 * m)).exp());
    beta / (6.0 * params.tracer_mass) * (params.n_gas / m) * (params.sigma_tot / (4.0 * PI)) * radial * plane
}
