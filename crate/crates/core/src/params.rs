//! Microscopic input parameters and the scales derived from them.
//!
//! Units: k_B = 1, so temperatures are energies and β = 1/T. ħ is an
//! ordinary parameter (default 1).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vec3::Vec3;

/// Above this gas-to-tracer mass ratio the diffusive-limit operations warn
/// that the small-mass-ratio expansion is no longer trustworthy.
pub const DIFFUSIVE_MASS_RATIO_LIMIT: f64 = 0.1;

/// Gas and tracer parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    /// Gas particle mass m.
    pub gas_mass: f64,
    /// Tracer mass M.
    pub tracer_mass: f64,
    /// Temperature T (energy units).
    pub temperature: f64,
    /// Gas number density. Zero is allowed and switches off all collisions.
    pub n_gas: f64,
    /// Total scattering cross-section.
    pub sigma_tot: f64,
    pub hbar: f64,
}

impl Default for PhysicalParams {
    /// m = 1, M = 100, T = 1, n_gas = 1, σ_tot = 1, ħ = 1.
    fn default() -> Self {
        PhysicalParams {
            gas_mass: 1.0,
            tracer_mass: 100.0,
            temperature: 1.0,
            n_gas: 1.0,
            sigma_tot: 1.0,
            hbar: 1.0,
        }
    }
}

impl PhysicalParams {
    /// Validated constructor.
    pub fn new(
        gas_mass: f64,
        tracer_mass: f64,
        temperature: f64,
        n_gas: f64,
        sigma_tot: f64,
        hbar: f64,
    ) -> Result<Self> {
        let p = PhysicalParams {
            gas_mass,
            tracer_mass,
            temperature,
            n_gas,
            sigma_tot,
            hbar,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        fn positive(name: &'static str, value: f64) -> Result<()> {
            if value.is_finite() && value > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidParameter {
                    name,
                    value,
                    reason: "must be finite and strictly positive",
                })
            }
        }
        positive("gas.m", self.gas_mass)?;
        positive("tracer.M", self.tracer_mass)?;
        positive("gas.T", self.temperature)?;
        positive("gas.sigma_tot", self.sigma_tot)?;
        positive("units.hbar", self.hbar)?;
        if !(self.n_gas.is_finite() && self.n_gas >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "gas.n_gas",
                value: self.n_gas,
                reason: "must be finite and non-negative",
            });
        }
        Ok(())
    }

    #[inline]
    pub fn beta(&self) -> f64 {
        1.0 / self.temperature
    }

    /// m/M.
    #[inline]
    pub fn mass_ratio(&self) -> f64 {
        self.gas_mass / self.tracer_mass
    }

    /// True when m/M is small enough for the diffusive limit. Logs a warning
    /// otherwise.
    pub fn check_diffusive_validity(&self) -> bool {
        let ratio = self.mass_ratio();
        let ok = ratio <= DIFFUSIVE_MASS_RATIO_LIMIT;
        if !ok {
            log::warn!(
                "m/M = {ratio} exceeds {DIFFUSIVE_MASS_RATIO_LIMIT}; the diffusive limit assumes m/M << 1"
            );
        }
        ok
    }

    pub fn scales(&self) -> DerivedScales {
        derive_scales(self)
    }
}

/// Characteristic scales of a parameter set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedScales {
    /// Most probable gas momentum, sqrt(2m/β).
    pub p_beta: f64,
    /// p_beta / m.
    pub v_beta: f64,
    /// Reduced mass mM/(m+M).
    pub m_star: f64,
    /// Thermal de Broglie wavelength of the tracer, sqrt(2πħ²β/M).
    pub lambda_th: f64,
    /// Thermal de Broglie wavelength of a gas particle, sqrt(2πħ²β/m).
    pub lambda_th_gas: f64,
}

pub fn derive_scales(params: &PhysicalParams) -> DerivedScales {
    let m = params.gas_mass;
    let big_m = params.tracer_mass;
    let beta = params.beta();
    let p_beta = (2.0 * m / beta).sqrt();
    let hb2 = params.hbar * params.hbar;
    DerivedScales {
        p_beta,
        v_beta: p_beta / m,
        m_star: m * big_m / (m + big_m),
        lambda_th: (2.0 * PI * hb2 * beta / big_m).sqrt(),
        lambda_th_gas: (2.0 * PI * hb2 * beta / m).sqrt(),
    }
}

/// Relative momentum of a gas particle with momentum `p` and the tracer
/// with momentum `big_p`: (m*/m) p − (m*/M) P.
#[inline]
pub fn rel(p: Vec3, big_p: Vec3, params: &PhysicalParams) -> Vec3 {
    let m = params.gas_mass;
    let big_m = params.tracer_mass;
    let m_star = m * big_m / (m + big_m);
    p * (m_star / m) - big_p * (m_star / big_m)
}

/// Maxwell–Boltzmann momentum density of the gas, normalised to one.
#[inline]
pub fn maxwell_boltzmann(p: Vec3, params: &PhysicalParams) -> f64 {
    let p_beta = (2.0 * params.gas_mass * params.temperature).sqrt();
    maxwell_boltzmann_with_width(p.norm_sq(), p_beta)
}

/// Maxwell–Boltzmann momentum density at the tracer mass, the equilibrium
/// state of the tracer.
#[inline]
pub fn tracer_maxwell_boltzmann(big_p: Vec3, params: &PhysicalParams) -> f64 {
    let width = (2.0 * params.tracer_mass * params.temperature).sqrt();
    maxwell_boltzmann_with_width(big_p.norm_sq(), width)
}

#[inline]
fn maxwell_boltzmann_with_width(p2: f64, width: f64) -> f64 {
    (-p2 / (width * width)).exp() / (PI.powf(1.5) * width.powi(3))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn scale_examples() {
        let mut p = PhysicalParams {
            gas_mass: 2.0,
            ..Default::default()
        };
        assert_eq!(derive_scales(&p).p_beta, 2.0);
        p.gas_mass = 1.0;
        p.tracer_mass = 1.0;
        assert_eq!(derive_scales(&p).m_star, 0.5);
        let s = derive_scales(&PhysicalParams::default());
        assert!((s.lambda_th - (2.0 * PI / 100.0).sqrt()).abs() < 1e-15);
        assert!((s.lambda_th - 0.250_663).abs() < 1e-6);
    }

    #[test]
    fn rel_examples() {
        let p = PhysicalParams {
            gas_mass: 1.0,
            tracer_mass: 3.0,
            ..Default::default()
        };
        let r = rel(Vec3::new(4.0, 0.0, 0.0), Vec3::new(4.0, 0.0, 0.0), &p);
        assert!((r - Vec3::new(2.0, 0.0, 0.0)).norm() < 1e-15);
        assert_eq!(rel(Vec3::ZERO, Vec3::ZERO, &p), Vec3::ZERO);

        let eq = PhysicalParams {
            gas_mass: 1.5,
            tracer_mass: 1.5,
            ..Default::default()
        };
        let a = Vec3::new(1.0, -2.0, 3.0);
        let b = Vec3::new(0.5, 0.25, -1.0);
        assert!((rel(a, b, &eq) - (a - b) / 2.0).norm() < 1e-15);
    }

    #[test]
    fn maxwell_boltzmann_peak_and_width() {
        let p = PhysicalParams::default();
        let s = derive_scales(&p);
        let peak = maxwell_boltzmann(Vec3::ZERO, &p);
        assert!((peak - PI.powf(-1.5) * s.p_beta.powi(-3)).abs() < 1e-15);
        let at_width = maxwell_boltzmann(Vec3::new(0.0, s.p_beta, 0.0), &p);
        assert!((at_width / peak - (-1.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn validation() {
        assert!(PhysicalParams::new(1.0, 1.0, 1.0, 0.0, 1.0, 1.0).is_ok());
        assert!(PhysicalParams::new(0.0, 1.0, 1.0, 1.0, 1.0, 1.0).is_err());
        assert!(PhysicalParams::new(1.0, 1.0, -1.0, 1.0, 1.0, 1.0).is_err());
        assert!(PhysicalParams::new(1.0, 1.0, 1.0, -1.0, 1.0, 1.0).is_err());
        assert!(PhysicalParams::new(1.0, 1.0, 1.0, 1.0, f64::NAN, 1.0).is_err());
    }

    #[test]
    fn diffusive_validity_threshold() {
        let mut p = PhysicalParams::default();
        assert!(p.check_diffusive_validity());
        p.tracer_mass = 2.0;
        assert!(!p.check_diffusive_validity());
    }

    proptest! {
        #[test]
        fn scale_identities(
            m in 1e-3f64..1e3,
            big_m in 1e-3f64..1e3,
            t in 1e-3f64..1e3,
            hbar in 1e-2f64..1e2,
        ) {
            let p = PhysicalParams::new(m, big_m, t, 1.0, 1.0, hbar).unwrap();
            let s = derive_scales(&p);
            let beta = p.beta();
            prop_assert!((s.p_beta * s.p_beta / (2.0 * m / beta) - 1.0).abs() < 4e-16);
            prop_assert!((s.v_beta * m / s.p_beta - 1.0).abs() < 4e-16);
            prop_assert!(s.m_star < m.min(big_m));
            prop_assert!((1.0 / s.m_star - (1.0 / m + 1.0 / big_m)).abs() * s.m_star < 1e-15);
            if m < big_m {
                prop_assert!(s.lambda_th < s.lambda_th_gas);
            }
        }
    }
}
