use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{derive_scales, PhysicalParams};
use crate::vec3::Vec3;

/// Default number of nodes per axis.
pub const DEFAULT_NODES: usize = 15;

/// Cubic momentum grid with N (odd) nodes per axis at P = ΔP·(i, j, k),
/// |i|, |j|, |k| ≤ (N − 1)/2, so the origin is a node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentumGrid3D {
    pub n: usize,
    pub p_max: f64,
}

impl MomentumGrid3D {
    pub fn new(n: usize, p_max: f64) -> Result<Self> {
        if n < 3 || n % 2 == 0 {
            return Err(Error::Configuration(format!("node count per axis must be odd and >= 3, got {n}")));
        }
        if !(p_max.is_finite() && p_max > 0.0) {
            return Err(Error::Configuration(format!("grid extent must be positive, got {p_max}")));
        }
        Ok(MomentumGrid3D { n, p_max })
    }

    /// Smallest extent allowed for `params`: 5 max(p_β, sqrt(M T)).
    pub fn minimum_extent(params: &PhysicalParams) -> f64 {
        let p_beta = derive_scales(params).p_beta;
        5.0 * p_beta.max((params.tracer_mass * params.temperature).sqrt())
    }

    /// Grid with N nodes per axis and the minimum extent.
    pub fn for_params(n: usize, params: &PhysicalParams) -> Result<Self> {
        MomentumGrid3D::new(n, Self::minimum_extent(params))
    }

    /// Check that the grid covers the thermal tracer distribution and
    /// resolves the width of the collision kernel (ΔP ≤ p_β).
    pub fn check_for(&self, params: &PhysicalParams) -> Result<()> {
        let need = Self::minimum_extent(params);
        if self.p_max < need * (1.0 - 1e-12) {
            return Err(Error::Configuration(format!(
                "grid extent {} is below 5 max(p_beta, sqrt(M T)) = {need}",
                self.p_max
            )));
        }
        let p_beta = derive_scales(params).p_beta;
        if self.spacing() > p_beta * (1.0 + 1e-12) {
            return Err(Error::Configuration(format!(
                "grid spacing {} exceeds p_beta = {p_beta}; increase the node count",
                self.spacing()
            )));
        }
        Ok(())
    }

    #[inline]
    pub fn half(&self) -> i64 {
        (self.n as i64 - 1) / 2
    }

    #[inline]
    pub fn spacing(&self) -> f64 {
        self.p_max / self.half() as f64
    }

    /// Volume element ΔP³.
    #[inline]
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(3)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Flat index of integer coordinates in [−half, half]³.
    #[inline]
    pub fn index(&self, c: [i64; 3]) -> usize {
        let h = self.half();
        let n = self.n;
        ((c[0] + h) as usize * n + (c[1] + h) as usize) * n + (c[2] + h) as usize
    }

    #[inline]
    pub fn coords(&self, idx: usize) -> [i64; 3] {
        let n = self.n;
        let h = self.half();
        [(idx / (n * n)) as i64 - h, ((idx / n) % n) as i64 - h, (idx % n) as i64 - h]
    }

    #[inline]
    pub fn momentum(&self, idx: usize) -> Vec3 {
        let c = self.coords(idx);
        Vec3::new(c[0] as f64, c[1] as f64, c[2] as f64) * self.spacing()
    }

    /// Index of the node at integer coordinates, if inside the grid.
    pub fn checked_index(&self, c: [i64; 3]) -> Option<usize> {
        let h = self.half();
        c.iter().all(|v| v.abs() <= h).then(|| self.index(c))
    }
}
