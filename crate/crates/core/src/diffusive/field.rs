use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::GridFile;

/// Cell-centred phase-space grid: periodic in X over [x_min, x_max), and
/// [p_min, p_max] in P with zero-flux walls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub p_min: f64,
    pub p_max: f64,
    pub nx: usize,
    pub np: usize,
}

impl PhaseGrid {
    pub fn new(x_range: (f64, f64), p_range: (f64, f64), nx: usize, np: usize) -> Result<Self> {
        let g = PhaseGrid {
            x_min: x_range.0,
            x_max: x_range.1,
            p_min: p_range.0,
            p_max: p_range.1,
            nx,
            np,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        let ok_range = |a: f64, b: f64| a.is_finite() && b.is_finite() && a < b;
        if !ok_range(self.x_min, self.x_max) || !ok_range(self.p_min, self.p_max) {
            return Err(Error::Configuration(format!("invalid phase-space ranges {self:?}")));
        }
        if self.nx < 2 || self.np < 3 {
            return Err(Error::Configuration(format!(
                "phase-space grid needs nx >= 2 and np >= 3, got {} x {}",
                self.nx, self.np
            )));
        }
        Ok(())
    }

    #[inline]
    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / self.nx as f64
    }

    #[inline]
    pub fn dp(&self) -> f64 {
        (self.p_max - self.p_min) / self.np as f64
    }

    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        self.x_min + (i as f64 + 0.5) * self.dx()
    }

    #[inline]
    pub fn p(&self, j: usize) -> f64 {
        self.p_min + (j as f64 + 0.5) * self.dp()
    }

    pub fn len(&self) -> usize {
        self.nx * self.np
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// First and second moments of a phase-space distribution.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PhaseMoments {
    pub mean_x: f64,
    pub mean_p: f64,
    pub var_x: f64,
    pub var_p: f64,
    pub cov_xp: f64,
}

/// Wigner function W(X, P) on a [`PhaseGrid`], stored row-major with X
/// slowest: `values[i * np + j]` is W(x_i, p_j).
#[derive(Debug, Clone, PartialEq)]
pub struct WignerField {
    pub grid: PhaseGrid,
    pub values: Vec<f64>,
    pub time: f64,
}

impl WignerField {
    pub fn zeros(grid: PhaseGrid) -> Self {
        WignerField {
            grid,
            values: vec![0.0; grid.len()],
            time: 0.0,
        }
    }

    /// Sample `f(x, p)` at the cell centres.
    pub fn from_fn(grid: PhaseGrid, mut f: impl FnMut(f64, f64) -> f64) -> Self {
        let mut w = WignerField::zeros(grid);
        for i in 0..grid.nx {
            let x = grid.x(i);
            for j in 0..grid.np {
                w.values[i * grid.np + j] = f(x, grid.p(j));
            }
        }
        w
    }

    /// Normalised Gaussian with the given moments, sampled on the grid and
    /// rescaled to unit discrete mass.
    pub fn gaussian(grid: PhaseGrid, m: PhaseMoments) -> Result<Self> {
        let det = m.var_x * m.var_p - m.cov_xp * m.cov_xp;
        if !(m.var_x > 0.0 && m.var_p > 0.0 && det > 0.0) {
            return Err(Error::Precondition(format!("covariance is not positive definite: {m:?}")));
        }
        let mut w = WignerField::from_fn(grid, |x, p| {
            let dx = x - m.mean_x;
            let dp = p - m.mean_p;
            let q = (m.var_p * dx * dx - 2.0 * m.cov_xp * dx * dp + m.var_x * dp * dp) / det;
            (-0.5 * q).exp()
        });
        w.normalize();
        Ok(w)
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.grid.np + j]
    }

    pub fn mass(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.dx() * self.grid.dp()
    }

    pub fn normalize(&mut self) {
        let mass = self.mass();
        if mass > 0.0 {
            for v in &mut self.values {
                *v /= mass;
            }
        }
    }

    pub fn moments(&self) -> PhaseMoments {
        let g = &self.grid;
        let (mut s0, mut sx, mut sp, mut sxx, mut spp, mut sxp) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
        for i in 0..g.nx {
            let x = g.x(i);
            for j in 0..g.np {
                let p = g.p(j);
                let w = self.at(i, j);
                s0 += w;
                sx += w * x;
                sp += w * p;
                sxx += w * x * x;
                spp += w * p * p;
                sxp += w * x * p;
            }
        }
        let mean_x = sx / s0;
        let mean_p = sp / s0;
        PhaseMoments {
            mean_x,
            mean_p,
            var_x: sxx / s0 - mean_x * mean_x,
            var_p: spp / s0 - mean_p * mean_p,
            cov_xp: sxp / s0 - mean_x * mean_p,
        }
    }

    /// Fraction of the mass in the outermost P cells.
    pub fn boundary_mass_fraction(&self) -> f64 {
        let g = &self.grid;
        let edge: f64 = (0..g.nx).map(|i| self.at(i, 0).abs() + self.at(i, g.np - 1).abs()).sum();
        let total: f64 = self.values.iter().map(|v| v.abs()).sum();
        if total == 0.0 {
            0.0
        } else {
            edge / total
        }
    }

    /// Rows (x, p, W) for CSV export.
    pub fn csv_rows(&self) -> impl Iterator<Item = Vec<f64>> + '_ {
        let g = self.grid;
        (0..g.nx).flat_map(move |i| (0..g.np).map(move |j| vec![g.x(i), g.p(j), self.at(i, j)]))
    }

    pub fn to_grid_file(&self) -> GridFile {
        GridFile {
            dims: vec![self.grid.nx, self.grid.np],
            ranges: vec![(self.grid.x_min, self.grid.x_max), (self.grid.p_min, self.grid.p_max)],
            time: self.time,
            k: [0.0; 3],
            complex: false,
            values: self.values.clone(),
        }
    }

    pub fn from_grid_file(file: GridFile) -> Result<Self> {
        if file.complex || file.dims.len() != 2 {
            return Err(Error::Decode("a Wigner field is a real rank-2 grid".into()));
        }
        let grid = PhaseGrid::new(file.ranges[0], file.ranges[1], file.dims[0], file.dims[1])
            .map_err(|e| Error::Decode(e.to_string()))?;
        Ok(WignerField {
            grid,
            values: file.values,
            time: file.time,
        })
    }

    pub fn encode(&self) -> Vec<u8> {
        self.to_grid_file().encode()
    }

    pub fn decode(bytes: &[u8]) -> Result<Self> {
        WignerField::from_grid_file(GridFile::decode(bytes)?)
    }
}
