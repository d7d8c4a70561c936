use num_complex::Complex64;

use super::grid::MomentumGrid3D;
use crate::error::{Error, Result};
use crate::io::GridFile;
use crate::params::PhysicalParams;
use crate::vec3::Vec3;

/// The density matrix restricted to a fixed coherence vector K: the value at
/// node P is ρ(P + K/2, P − K/2).
#[derive(Debug, Clone, PartialEq)]
pub struct CoherenceSlice {
    pub grid: MomentumGrid3D,
    pub k: Vec3,
    pub values: Vec<Complex64>,
    pub include_free_phase: bool,
    pub time: f64,
}

impl CoherenceSlice {
    pub fn zeros(grid: MomentumGrid3D, k: Vec3, include_free_phase: bool) -> Self {
        CoherenceSlice {
            grid,
            k,
            values: vec![Complex64::new(0.0, 0.0); grid.len()],
            include_free_phase,
            time: 0.0,
        }
    }

    pub fn from_fn(
        grid: MomentumGrid3D,
        k: Vec3,
        include_free_phase: bool,
        mut f: impl FnMut(Vec3) -> Complex64,
    ) -> Self {
        let mut s = Self::zeros(grid, k, include_free_phase);
        for (idx, v) in s.values.iter_mut().enumerate() {
            *v = f(grid.momentum(idx));
        }
        s
    }

    /// Maxwell–Boltzmann profile at the tracer mass sampled on the grid and
    /// normalised to unit discrete trace.
    pub fn thermal(grid: MomentumGrid3D, k: Vec3, params: &PhysicalParams) -> Self {
        let width2 = 2.0 * params.tracer_mass * params.temperature;
        let mut s = Self::from_fn(grid, k, false, |p| Complex64::new((-p.norm_sq() / width2).exp(), 0.0));
        s.normalize();
        s
    }

    /// Isotropic Gaussian population centred at `mean` with per-axis
    /// standard deviation `sd`, normalised to unit discrete trace.
    pub fn gaussian(grid: MomentumGrid3D, mean: Vec3, sd: f64) -> Result<Self> {
        if !(sd.is_finite() && sd > 0.0) || !mean.is_finite() {
            return Err(Error::Configuration(format!("invalid Gaussian: mean {mean:?}, sd {sd}")));
        }
        let mut s = Self::from_fn(grid, Vec3::ZERO, false, |p| {
            Complex64::new((-(p - mean).norm_sq() / (2.0 * sd * sd)).exp(), 0.0)
        });
        s.normalize();
        Ok(s)
    }

    /// Σ ρ ΔP³; the trace when K = 0.
    pub fn trace(&self) -> Complex64 {
        self.values.iter().sum::<Complex64>() * self.grid.cell_volume()
    }

    /// Σ |ρ| ΔP³.
    pub fn l1_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).sum::<f64>() * self.grid.cell_volume()
    }

    /// Scale the values so that the real part of the trace is one.
    pub fn normalize(&mut self) {
        let t = self.trace().re;
        if t != 0.0 {
            for v in &mut self.values {
                *v /= t;
            }
        }
    }

    /// Mean kinetic energy Σ P²/(2M) Re ρ ΔP³ / Σ Re ρ ΔP³ of a population slice.
    pub fn mean_energy(&self, tracer_mass: f64) -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for (idx, v) in self.values.iter().enumerate() {
            let p = self.grid.momentum(idx);
            num += p.norm_sq() / (2.0 * tracer_mass) * v.re;
            den += v.re;
        }
        num / den
    }

    /// Σ |a − b| ΔP³.
    pub fn l1_distance(&self, other: &CoherenceSlice) -> f64 {
        assert_eq!(self.values.len(), other.values.len());
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm()).sum::<f64>() * self.grid.cell_volume()
    }

    pub fn to_grid_file(&self) -> GridFile {
        let n = self.grid.n;
        let r = (-self.grid.p_max, self.grid.p_max);
        GridFile {
            dims: vec![n, n, n],
            ranges: vec![r, r, r],
            time: self.time,
            k: self.k.to_array(),
            complex: true,
            values: self.values.iter().flat_map(|v| [v.re, v.im]).collect(),
        }
    }

    /// Rebuild a slice from a decoded grid file. The free-phase flag is not
    /// part of the file and is set to `false`.
    pub fn from_grid_file(file: GridFile) -> Result<Self> {
        if !file.complex || file.dims.len() != 3 {
            return Err(Error::Decode("a coherence slice is a complex rank-3 grid".into()));
        }
        let n = file.dims[0];
        if file.dims.iter().any(|&d| d != n) {
            return Err(Error::Decode(format!("slice grid must be cubic, got {:?}", file.dims)));
        }
        let (lo, hi) = file.ranges[0];
        if file.ranges.iter().any(|&r| r != (lo, hi)) || lo != -hi {
            return Err(Error::Decode("slice ranges must be symmetric and equal on every axis".into()));
        }
        let grid = MomentumGrid3D::new(n, hi).map_err(|e| Error::Decode(e.to_string()))?;
        let values = file.values.chunks_exact(2).map(|c| Complex64::new(c[0], c[1])).collect();
        Ok(CoherenceSlice {
            grid,
            k: Vec3::from(file.k),
            values,
            include_free_phase: false,
            time: file.time,
        })
    }

    pub fn encode(&self) -> Vec<u8> {
        self.to_grid_file().encode()
    }

    pub fn decode(bytes: &[u8]) -> Result<Self> {
        CoherenceSlice::from_grid_file(GridFile::decode(bytes)?)
    }
}
