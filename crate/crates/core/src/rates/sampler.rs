//! Exact sampling of momentum transfers from M_in^cl(P + Q; Q) / M_out^cl(P)
//! for the constant cross-section.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;

use super::model::CrossSectionModel;
use crate::error::{Error, Result};
use crate::params::{derive_scales, rel, PhysicalParams};
use crate::vec3::Vec3;

/// Rejection-loop iteration cap.
pub const MAX_REJECTIONS: usize = 100_000;

/// One sampled binary collision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollisionEvent {
    /// Gas momentum before the collision.
    pub gas_momentum: Vec3,
    /// Momentum transferred to the tracer.
    pub transfer: Vec3,
}

/// Draw the momentum transfer Q of the next collision of a tracer with
/// momentum `p`.
pub fn sample_collision<R: Rng + ?Sized>(
    p: Vec3,
    params: &PhysicalParams,
    model: &CrossSectionModel,
    rng: &mut R,
) -> Result<Vec3> {
    sample_collision_event(p, params, model, rng).map(|e| e.transfer)
}

/// Like [`sample_collision`], also returning the incoming gas momentum.
///
/// The gas momentum p₀ is drawn from μ_β(p₀)|v₀ − V| (V = P/M) by rejection
/// from the envelope μ_β(p₀)(|v₀| + |V|), itself a two-component mixture
/// sampled exactly. The relative momentum is then rotated to a uniformly
/// random direction, which is elastic isotropic scattering.
pub fn sample_collision_event<R: Rng + ?Sized>(
    p: Vec3,
    params: &PhysicalParams,
    model: &CrossSectionModel,
    rng: &mut R,
) -> Result<CollisionEvent> {
    if !model.is_constant() {
        return Err(Error::Unsupported(
            "collision sampling is only available for the constant cross-section",
        ));
    }
    let sc = derive_scales(params);
    let m = params.gas_mass;
    let v_tracer = p / params.tracer_mass;
    let speed_tracer = v_tracer.norm();
    let mean_speed = 2.0 * sc.v_beta / PI.sqrt();
    let p_flux = mean_speed / (mean_speed + speed_tracer);
    let sigma = sc.p_beta / std::f64::consts::SQRT_2;

    for _ in 0..MAX_REJECTIONS {
        let p0 = if rng.gen::<f64>() < p_flux {
            // |p₀|/p_β has density ∝ x³ e^{-x²}: x² ~ Gamma(2, 1).
            let u1: f64 = 1.0 - rng.gen::<f64>();
            let u2: f64 = 1.0 - rng.gen::<f64>();
            let x = (-(u1 * u2).ln()).sqrt();
            unit_vector(rng) * (x * sc.p_beta)
        } else {
            Vec3::new(
                sigma * rng.sample::<f64, _>(StandardNormal),
                sigma * rng.sample::<f64, _>(StandardNormal),
                sigma * rng.sample::<f64, _>(StandardNormal),
            )
        };
        let v0 = p0 / m;
        let bound = v0.norm() + speed_tracer;
        if bound == 0.0 {
            continue;
        }
        if rng.gen::<f64>() * bound < (v0 - v_tracer).norm() {
            let b = rel(p0, p, params);
            let b_out = unit_vector(rng) * b.norm();
            return Ok(CollisionEvent {
                gas_momentum: p0,
                transfer: b - b_out,
            });
        }
    }
    Err(Error::Sampling {
        iterations: MAX_REJECTIONS,
    })
}

/// Uniformly distributed unit vector.
pub fn unit_vector<R: Rng + ?Sized>(rng: &mut R) -> Vec3 {
    let z = 2.0 * rng.gen::<f64>() - 1.0;
    let phi = 2.0 * PI * rng.gen::<f64>();
    let r = (1.0 - z * z).max(0.0).sqrt();
    Vec3::new(r * phi.cos(), r * phi.sin(), z)
}
