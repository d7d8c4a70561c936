//! Classical and quantum collision-rate kernels.
//!
//! Conventions: in `m_in_*` the momentum arguments are the tracer momenta
//! *after* the collision, so `m_in_classical(P, Q)` is the rate density for
//! a jump P − Q → P. The parallel offset entering the Maxwell–Boltzmann
//! factor is then s = (1 − m/M)|Q|/2 + (m/M) P·Q̂.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::model::CrossSectionModel;
use crate::error::{Error, Result};
use crate::params::{derive_scales, PhysicalParams};
use crate::quadrature::{gauss_hermite_plane, integrate_spherical, SphericalOrders};
use crate::special::erf;
use crate::vec3::Vec3;

/// Gauss–Hermite order for the plane integrals of the Born model.
const PLANE_ORDER: usize = 8;

/// Relative tolerance on the difference between the default and the coarse
/// spherical rule in `m_out_classical`.
pub const M_OUT_TOLERANCE: f64 = 1e-6;

fn check_transfer(q: Vec3) -> Result<f64> {
    let qn = q.norm();
    if !(qn > 0.0 && qn.is_finite()) {
        return Err(Error::Domain(format!(
            "momentum transfer must be non-zero and finite, got {q:?}"
        )));
    }
    Ok(qn)
}

/// Offset along Q̂ of the gas-momentum plane that contributes to the jump
/// ending at `p_final`.
#[inline]
fn parallel_offset(p_final: Vec3, q_hat: Vec3, q: f64, ratio: f64) -> f64 {
    0.5 * (1.0 - ratio) * q + ratio * p_final.dot(q_hat)
}

/// n m / (m*² |Q|).
#[inline]
fn kinematic_prefactor(params: &PhysicalParams, m_star: f64, q: f64) -> f64 {
    params.n_gas * params.gas_mass / (m_star * m_star * q)
}

/// ∫ d²p⊥ μ_β(p⊥ + s Q̂) |f|² over the plane perpendicular to Q̂.
fn plane_integral(s: f64, q: f64, params: &PhysicalParams, p_beta: f64, model: &CrossSectionModel) -> f64 {
    match model {
        CrossSectionModel::Constant => {
            let f2 = params.sigma_tot / (4.0 * PI);
            f2 * (-(s * s) / (p_beta * p_beta)).exp() / (PI.sqrt() * p_beta)
        }
        CrossSectionModel::Born(kernel) => {
            let f2 = kernel.eval(q);
            let norm = PI.powf(-1.5) * p_beta.powi(-3) * (-(s * s) / (p_beta * p_beta)).exp();
            // The amplitude does not depend on p⊥, so the weight carries the
            // whole integrand.
            f2 * norm * gauss_hermite_plane(PLANE_ORDER, p_beta, |_, _| 1.0)
        }
    }
}

/// Classical gain-rate density M_in^cl(P; Q) for the jump P − Q → P.
pub fn m_in_classical(
    p_final: Vec3,
    q: Vec3,
    params: &PhysicalParams,
    model: &CrossSectionModel,
) -> Result<f64> {
    let qn = check_transfer(q)?;
    let sc = derive_scales(params);
    let s = parallel_offset(p_final, q / qn, qn, params.mass_ratio());
    Ok(kinematic_prefactor(params, sc.m_star, qn) * plane_integral(s, qn, params, sc.p_beta, model))
}

/// Quantum gain-rate density M_in(P, P′; Q) coupling ρ(P − Q, P′ − Q) into
/// ρ(P, P′).
///
/// For amplitudes that do not depend on the perpendicular gas momentum (the
/// constant and Born models) the two Lindblad factors share one Gaussian in
/// p⊥ and the result is real:
/// M_in(P, P′; Q) = n m/(m*²|Q|) |f|² exp(−(s² + s′²)/(2p_β²)) / (√π p_β).
pub fn m_in_quantum(
    p: Vec3,
    p_prime: Vec3,
    q: Vec3,
    params: &PhysicalParams,
    model: &CrossSectionModel,
) -> Result<Complex64> {
    let qn = check_transfer(q)?;
    let sc = derive_scales(params);
    let ratio = params.mass_ratio();
    let q_hat = q / qn;
    let s = parallel_offset(p, q_hat, qn, ratio);
    let s_prime = parallel_offset(p_prime, q_hat, qn, ratio);
    // Geometric mean of the two diagonal plane integrals.
    let s_mean_sq = 0.5 * (s * s + s_prime * s_prime);
    let value = kinematic_prefactor(params, sc.m_star, qn)
        * plane_integral(s_mean_sq.sqrt(), qn, params, sc.p_beta, model);
    Ok(Complex64::new(value, 0.0))
}

/// Effective cross-section σ̃(P⊥, Q): the differential cross-section
/// averaged over the gas momenta in the plane through the origin
/// perpendicular to Q.
pub fn sigma_tilde(
    p_perp: Vec3,
    q: Vec3,
    params: &PhysicalParams,
    model: &CrossSectionModel,
) -> Result<f64> {
    let qn = check_transfer(q)?;
    let tol = 1e-9 * p_perp.norm() * qn;
    if p_perp.dot(q).abs() > tol {
        return Err(Error::Precondition(format!(
            "P_perp {p_perp:?} is not perpendicular to Q {q:?}"
        )));
    }
    let p_beta = derive_scales(params).p_beta;
    Ok(plane_integral(0.0, qn, params, p_beta, model))
}

/// Total collision rate M_out^cl(P) = ∫ d³Q M_in^cl(P + Q; Q), by the
/// spherical product rule about P̂.
///
/// The radial range is [ε, Q_max] with ε = 1e-6 m* v_β (the integrand is
/// O(Q) near the origin) and Q_max = 12 max(p_β, m* v_β (1 + |U|)),
/// U = P/(M v_β). The result is compared with a coarser rule and rejected
/// when the two differ by more than [`M_OUT_TOLERANCE`].
pub fn m_out_classical(p: Vec3, params: &PhysicalParams, model: &CrossSectionModel) -> Result<f64> {
    let fine = m_out_with_orders(p, params, model, SphericalOrders::DEFAULT);
    let coarse = m_out_with_orders(p, params, model, SphericalOrders::COARSE);
    let estimate = (fine - coarse).abs();
    if estimate > M_OUT_TOLERANCE * fine.abs() {
        return Err(Error::NumericAccuracy {
            estimate: estimate / fine.abs(),
            tolerance: M_OUT_TOLERANCE,
        });
    }
    Ok(fine)
}

/// [`m_out_classical`] with an explicit rule and no error check.
pub fn m_out_with_orders(
    p: Vec3,
    params: &PhysicalParams,
    model: &CrossSectionModel,
    orders: SphericalOrders,
) -> f64 {
    if params.n_gas == 0.0 {
        return 0.0;
    }
    let sc = derive_scales(params);
    let ratio = params.mass_ratio();
    let pn = p.norm();
    let u = pn / (params.tracer_mass * sc.v_beta);
    let q_min = 1e-6 * sc.m_star * sc.v_beta;
    let q_max = 12.0 * sc.p_beta.max(sc.m_star * sc.v_beta * (1.0 + u));
    integrate_spherical(orders, q_min, q_max, |r, cos_theta, _| {
        let s = 0.5 * (1.0 + ratio) * r + ratio * pn * cos_theta;
        kinematic_prefactor(params, sc.m_star, r) * plane_integral(s, r, params, sc.p_beta, model)
    })
}

/// Closed form of M_out^cl for the constant cross-section:
/// n σ_tot ⟨|v − P/M|⟩ over Maxwell–Boltzmann gas velocities,
/// n σ_tot v_β [(u + 1/(2u)) erf u + e^{−u²}/√π] with u = |P|/(M v_β).
pub fn m_out_constant(p: Vec3, params: &PhysicalParams) -> f64 {
    let sc = derive_scales(params);
    let u = p.norm() / (params.tracer_mass * sc.v_beta);
    let bracket = if u < 1e-3 {
        let u2 = u * u;
        (2.0 + u2 * (2.0 / 3.0 - u2 / 15.0)) / PI.sqrt()
    } else {
        (u + 0.5 / u) * erf(u) + (-u * u).exp() / PI.sqrt()
    };
    params.n_gas * params.sigma_tot * sc.v_beta * bracket
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rates::model::BornKernel;

    fn unit_params() -> PhysicalParams {
        PhysicalParams {
            tracer_mass: 10.0,
            ..Default::default()
        }
    }

    #[test]
    fn zero_transfer_is_a_domain_error() {
        let p = unit_params();
        let m = CrossSectionModel::Constant;
        assert!(matches!(m_in_classical(Vec3::X, Vec3::ZERO, &p, &m), Err(Error::Domain(_))));
        assert!(m_in_quantum(Vec3::X, Vec3::Y, Vec3::ZERO, &p, &m).is_err());
        assert!(sigma_tilde(Vec3::ZERO, Vec3::ZERO, &p, &m).is_err());
    }

    #[test]
    fn diagonal_quantum_equals_classical() {
        let p = unit_params();
        let m = CrossSectionModel::Constant;
        let big_p = Vec3::new(0.3, -1.2, 2.0);
        let q = Vec3::new(0.5, 0.1, -0.7);
        let c = m_in_classical(big_p, q, &p, &m).unwrap();
        let z = m_in_quantum(big_p, big_p, q, &p, &m).unwrap();
        assert_eq!(z.im, 0.0);
        assert!((z.re / c - 1.0).abs() < 1e-14);
    }

    #[test]
    fn sigma_tilde_constant_value() {
        let p = unit_params();
        let m = CrossSectionModel::Constant;
        let pb = derive_scales(&p).p_beta;
        let v = sigma_tilde(Vec3::X, Vec3::Z, &p, &m).unwrap();
        assert!((v - 1.0 / (4.0 * PI) / (PI.sqrt() * pb)).abs() < 1e-16);
        assert_eq!(v, sigma_tilde(Vec3::new(3.0, -7.0, 0.0), Vec3::Z * 2.0, &p, &m).unwrap());
        assert!(matches!(
            sigma_tilde(Vec3::new(1.0, 0.0, 1e-3), Vec3::Z, &p, &m),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn m_out_quadrature_matches_closed_form() {
        let p = unit_params();
        let m = CrossSectionModel::Constant;
        let sc = derive_scales(&p);
        for u in [0.0, 0.3, 1.0, 2.0, 5.0] {
            let big_p = Vec3::new(0.2, -0.5, 1.0).normalized().unwrap() * (u * p.tracer_mass * sc.v_beta);
            let quad = m_out_classical(big_p, &p, &m).unwrap();
            let exact = m_out_constant(big_p, &p);
            assert!((quad / exact - 1.0).abs() < 1e-9, "u = {u}: {quad} vs {exact}");
        }
    }

    #[test]
    fn m_out_closed_form_small_u_branch_is_continuous() {
        let p = unit_params();
        let sc = derive_scales(&p);
        let scale = p.tracer_mass * sc.v_beta;
        let below = m_out_constant(Vec3::Z * ((1e-3 - 1e-15) * scale), &p);
        let above = m_out_constant(Vec3::Z * ((1e-3 + 1e-15) * scale), &p);
        assert!((below / above - 1.0).abs() < 1e-12);
        let at_rest = m_out_constant(Vec3::ZERO, &p);
        assert!((at_rest - 2.0 / PI.sqrt() * sc.v_beta).abs() < 1e-15);
    }

    #[test]
    fn born_with_constant_kernel_reproduces_constant_model() {
        let p = unit_params();
        let born = CrossSectionModel::Born(BornKernel::from_fn("flat", |_| 1.0 / (4.0 * PI)));
        let c = CrossSectionModel::Constant;
        let big_p = Vec3::new(1.0, 2.0, -3.0);
        let q = Vec3::new(-0.4, 0.9, 0.2);
        let a = m_in_classical(big_p, q, &p, &born).unwrap();
        let b = m_in_classical(big_p, q, &p, &c).unwrap();
        assert!((a / b - 1.0).abs() < 1e-13);
        let a = m_out_classical(big_p, &p, &born).unwrap();
        let b = m_out_constant(big_p, &p);
        assert!((a / b - 1.0).abs() < 1e-9);
    }

    #[test]
    fn zero_density_switches_off_rates() {
        let p = PhysicalParams {
            n_gas: 0.0,
            ..unit_params()
        };
        let m = CrossSectionModel::Constant;
        assert_eq!(m_out_classical(Vec3::X, &p, &m).unwrap(), 0.0);
        assert_eq!(m_out_constant(Vec3::X, &p), 0.0);
        assert_eq!(m_in_classical(Vec3::X, Vec3::Y, &p, &m).unwrap(), 0.0);
    }
}
