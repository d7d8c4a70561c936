//! Phase-space Fokker–Planck solvers of the diffusive limit,
//!
//! ∂W/∂t = η ∂_P(P W) + D_pp ∂²_P W + D_xx ∂²_X W − (P/M) ∂_X W,
//!
//! on a grid periodic in X with zero-flux walls in P.
//!
//! Strang splitting: the X part is solved exactly per Fourier mode; the P
//! part is a conservative finite-volume scheme advanced with the two-stage
//! strong-stability-preserving Runge–Kutta method. The P flux is written
//! in terms of W/G, G ∝ exp(−P²/(2 D_pp/η)) the equilibrium profile,
//!
//! J_{j+½} = −(D_pp/ΔP) G(P_{j+½}) (W_{j+1}/G_{j+1} − W_j/G_j),
//!
//! which leaves the sampled equilibrium exactly stationary, conserves mass
//! to round-off and has non-negative off-diagonal couplings, so the scheme
//! is positivity preserving under the step-size limit.

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;

use super::coefficients::DiffusionCoefficients;
use super::field::WignerField;
use crate::error::{Error, Result};

/// Minimum number of P cells per equilibrium standard deviation sqrt(D_pp/η).
pub const MIN_CELLS_PER_WIDTH: f64 = 2.0;
/// Minimum P half-width in equilibrium standard deviations.
pub const MIN_HALF_WIDTH: f64 = 6.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FpOptions {
    /// Time step. `None` picks half the stability limit.
    pub dt: Option<f64>,
    /// Include the −(P/M) ∂_X W streaming term.
    pub free_streaming: bool,
    /// Largest tolerated mass fraction in the outermost P cells.
    pub leakage_tolerance: f64,
}

impl Default for FpOptions {
    fn default() -> Self {
        FpOptions {
            dt: None,
            free_streaming: true,
            leakage_tolerance: 1e-6,
        }
    }
}

/// Reusable solver for one grid and one set of coefficients.
pub struct FokkerPlanckSolver {
    grid: super::field::PhaseGrid,
    coeffs: DiffusionCoefficients,
    tracer_mass: f64,
    opts: FpOptions,
    /// Couplings across interior face j: the flux divided by ΔP is
    /// `up[j] W_j − down[j] W_{j+1}`.
    up: Vec<f64>,
    down: Vec<f64>,
    limit: f64,
    fft: Arc<dyn Fft<f64>>,
    ifft: Arc<dyn Fft<f64>>,
    wavenumbers: Vec<f64>,
}

impl FokkerPlanckSolver {
    pub fn new(
        grid: super::field::PhaseGrid,
        coeffs: DiffusionCoefficients,
        tracer_mass: f64,
        opts: FpOptions,
    ) -> Result<Self> {
        grid.validate()?;
        let DiffusionCoefficients { eta, d_pp, d_xx } = coeffs;
        if !(eta >= 0.0 && d_pp >= 0.0 && d_xx >= 0.0 && tracer_mass > 0.0) {
            return Err(Error::Configuration(format!(
                "coefficients must be non-negative and the mass positive: {coeffs:?}, M = {tracer_mass}"
            )));
        }
        let dp = grid.dp();
        // inverse equilibrium variance η/D_pp (zero: flat equilibrium)
        let inv_var = if d_pp > 0.0 { eta / d_pp } else { 0.0 };
        if inv_var > 0.0 {
            let width = inv_var.recip().sqrt();
            if width / dp < MIN_CELLS_PER_WIDTH {
                return Err(Error::Configuration(format!(
                    "P spacing {dp} does not resolve the equilibrium width {width}: need at least {MIN_CELLS_PER_WIDTH} cells per width (increase np)"
                )));
            }
            let need = MIN_HALF_WIDTH * width * (1.0 - 1e-12);
            if -grid.p_min < need || grid.p_max < need {
                return Err(Error::Configuration(format!(
                    "P range [{}, {}] must cover ±{MIN_HALF_WIDTH} equilibrium widths (±{})",
                    grid.p_min,
                    grid.p_max,
                    MIN_HALF_WIDTH * width
                )));
            }
        }
        let kappa = d_pp / dp * (dp * dp * inv_var / 8.0).exp();
        let mut up = Vec::with_capacity(grid.np - 1);
        let mut down = Vec::with_capacity(grid.np - 1);
        for j in 0..grid.np - 1 {
            let p_face = grid.p_min + (j + 1) as f64 * dp;
            let z = -p_face * dp * inv_var;
            up.push(kappa * (0.5 * z).exp() / dp);
            down.push(kappa * (-0.5 * z).exp() / dp);
        }
        let mut diag_max = 0.0f64;
        for j in 0..grid.np {
            let out_up = if j + 1 < grid.np { up[j] } else { 0.0 };
            let out_down = if j > 0 { down[j - 1] } else { 0.0 };
            diag_max = diag_max.max(out_up + out_down);
        }
        let limit = if diag_max > 0.0 { 1.0 / diag_max } else { f64::INFINITY };
        if let Some(dt) = opts.dt {
            if !(dt > 0.0) {
                return Err(Error::Configuration(format!("time step must be positive, got {dt}")));
            }
            if dt > limit {
                return Err(Error::Cfl { dt, limit });
            }
        }
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(grid.nx);
        let ifft = planner.plan_fft_inverse(grid.nx);
        let length = grid.x_max - grid.x_min;
        let wavenumbers = (0..grid.nx)
            .map(|m| {
                let signed = if m <= grid.nx / 2 { m as f64 } else { m as f64 - grid.nx as f64 };
                2.0 * PI * signed / length
            })
            .collect();
        Ok(FokkerPlanckSolver {
            grid,
            coeffs,
            tracer_mass,
            opts,
            up,
            down,
            limit,
            fft,
            ifft,
            wavenumbers,
        })
    }

    /// Largest stable time step of the P substep.
    pub fn stability_limit(&self) -> f64 {
        self.limit
    }

    /// Time step used by [`advance`](Self::advance) for a given duration.
    pub fn step_count(&self, duration: f64) -> usize {
        let dt_max = self.opts.dt.unwrap_or(0.5 * self.limit);
        if duration <= 0.0 {
            0
        } else if dt_max.is_finite() {
            ((duration / dt_max) * (1.0 - 1e-12)).ceil().max(1.0) as usize
        } else {
            1
        }
    }

    /// Advance `w` by `duration`.
    pub fn advance(&self, w: &mut WignerField, duration: f64) -> Result<()> {
        if w.grid != self.grid {
            return Err(Error::Precondition("field and solver grids differ".into()));
        }
        if !(duration >= 0.0) {
            return Err(Error::Precondition(format!("negative duration {duration}")));
        }
        let n = self.step_count(duration);
        if n == 0 {
            return Ok(());
        }
        let dt = duration / n as f64;
        let mut scratch = Scratch::new(&self.grid);
        for _ in 0..n {
            self.step_with(w, dt, &mut scratch);
            let leak = w.boundary_mass_fraction();
            if leak > self.opts.leakage_tolerance {
                return Err(Error::DomainTooSmall {
                    leakage: leak,
                    tolerance: self.opts.leakage_tolerance,
                });
            }
        }
        w.time += duration;
        Ok(())
    }

    /// One Strang step of length `dt` (no stability or leakage check).
    pub fn step(&self, w: &mut WignerField, dt: f64) {
        let mut scratch = Scratch::new(&self.grid);
        self.step_with(w, dt, &mut scratch);
    }

    fn step_with(&self, w: &mut WignerField, dt: f64, s: &mut Scratch) {
        self.x_flow(&mut w.values, 0.5 * dt, s);
        self.p_flow(&mut w.values, dt, s);
        self.x_flow(&mut w.values, 0.5 * dt, s);
    }

    fn x_active(&self) -> bool {
        self.coeffs.d_xx > 0.0 || self.opts.free_streaming
    }

    /// Exact evolution under D_xx ∂²_X − (P/M) ∂_X for time `tau`.
    fn x_flow(&self, values: &mut [f64], tau: f64, s: &mut Scratch) {
        if !self.x_active() {
            return;
        }
        let g = &self.grid;
        let nyquist = if g.nx % 2 == 0 { Some(g.nx / 2) } else { None };
        let scale = 1.0 / g.nx as f64;
        for j in 0..g.np {
            let v = if self.opts.free_streaming { g.p(j) / self.tracer_mass } else { 0.0 };
            for i in 0..g.nx {
                s.column[i] = Complex64::new(values[i * g.np + j], 0.0);
            }
            self.fft.process(&mut s.column);
            for (m, c) in s.column.iter_mut().enumerate() {
                let k = self.wavenumbers[m];
                let damp = (-self.coeffs.d_xx * k * k * tau).exp();
                let phase = -k * v * tau;
                *c *= if Some(m) == nyquist {
                    Complex64::new(damp * phase.cos(), 0.0)
                } else {
                    Complex64::from_polar(damp, phase)
                };
            }
            self.ifft.process(&mut s.column);
            for i in 0..g.nx {
                values[i * g.np + j] = s.column[i].re * scale;
            }
        }
    }

    /// dW/dt of the P part for one X row.
    fn p_rate(&self, row: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        for j in 0..row.len() - 1 {
            let flux = self.up[j] * row[j] - self.down[j] * row[j + 1];
            out[j] -= flux;
            out[j + 1] += flux;
        }
    }

    fn p_flow(&self, values: &mut [f64], dt: f64, s: &mut Scratch) {
        if self.coeffs.d_pp == 0.0 && self.coeffs.eta == 0.0 {
            return;
        }
        let np = self.grid.np;
        for row in values.chunks_exact_mut(np) {
            self.p_rate(row, &mut s.k1);
            for j in 0..np {
                s.stage[j] = row[j] + dt * s.k1[j];
            }
            self.p_rate(&s.stage, &mut s.k2);
            for j in 0..np {
                row[j] = 0.5 * row[j] + 0.5 * (s.stage[j] + dt * s.k2[j]);
            }
        }
    }

    /// Full generator applied to `w`: the instantaneous time derivative.
    pub fn time_derivative(&self, w: &WignerField) -> Vec<f64> {
        let g = &self.grid;
        let mut out = vec![0.0; g.len()];
        let mut s = Scratch::new(g);
        for (row, o) in w.values.chunks_exact(g.np).zip(out.chunks_exact_mut(g.np)) {
            self.p_rate(row, o);
        }
        if self.x_active() {
            let scale = 1.0 / g.nx as f64;
            for j in 0..g.np {
                let v = if self.opts.free_streaming { g.p(j) / self.tracer_mass } else { 0.0 };
                for i in 0..g.nx {
                    s.column[i] = Complex64::new(w.values[i * g.np + j], 0.0);
                }
                self.fft.process(&mut s.column);
                for (m, c) in s.column.iter_mut().enumerate() {
                    let k = self.wavenumbers[m];
                    let k_odd = if g.nx % 2 == 0 && m == g.nx / 2 { 0.0 } else { k };
                    *c *= Complex64::new(-self.coeffs.d_xx * k * k, -k_odd * v);
                }
                self.ifft.process(&mut s.column);
                for i in 0..g.nx {
                    out[i * g.np + j] += s.column[i].re * scale;
                }
            }
        }
        out
    }
}

struct Scratch {
    column: Vec<Complex64>,
    k1: Vec<f64>,
    k2: Vec<f64>,
    stage: Vec<f64>,
}

impl Scratch {
    fn new(g: &super::field::PhaseGrid) -> Self {
        Scratch {
            column: vec![Complex64::new(0.0, 0.0); g.nx],
            k1: vec![0.0; g.np],
            k2: vec![0.0; g.np],
            stage: vec![0.0; g.np],
        }
    }
}

/// Evolve `w0` to time `t_final` under the quantum Fokker–Planck equation
/// (with position diffusion D_xx).
pub fn evolve_quantum_fp(
    w0: &WignerField,
    t_final: f64,
    coeffs: &DiffusionCoefficients,
    tracer_mass: f64,
    opts: &FpOptions,
) -> Result<WignerField> {
    let solver = FokkerPlanckSolver::new(w0.grid, *coeffs, tracer_mass, *opts)?;
    let mut w = w0.clone();
    solver.advance(&mut w, t_final - w0.time)?;
    Ok(w)
}

/// Evolve `w0` to time `t_final` under the classical Fokker–Planck equation
/// (no position diffusion).
pub fn evolve_classical_fp(
    w0: &WignerField,
    t_final: f64,
    coeffs: &DiffusionCoefficients,
    tracer_mass: f64,
    opts: &FpOptions,
) -> Result<WignerField> {
    let classical = DiffusionCoefficients { d_xx: 0.0, ..*coeffs };
    evolve_quantum_fp(w0, t_final, &classical, tracer_mass, opts)
}
