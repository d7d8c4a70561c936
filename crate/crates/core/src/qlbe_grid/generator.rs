//! Matrix-free momentum-representation generator on a [`MomentumGrid3D`].
//!
//! For a slice at coherence vector K (values ρ(P + K/2, P − K/2)) the
//! generator is
//!
//! (Gρ)(P) = Σ_{P″ ≠ P} w(P″) M_in(P + K/2, P − K/2; P − P″) ρ(P″) ΔP³
//!           − ½[M_out(P + K/2) + M_out(P − K/2)] ρ(P)
//!           − (i/ħ)(P·K/M) ρ(P).
//!
//! The source weight w(P″) = M_out(P″)/D(P″), with D(P″) the discrete
//! out-rate Σ_{P ≠ P″} M_in^cl(P; P − P″) ΔP³ over the grid, rebalances the
//! gain so that every unit of probability lost from a node is redistributed
//! within the grid: at K = 0 the trace is conserved exactly.
//!
//! For the constant cross-section M_in(P + K/2, P − K/2; Q) factorises into
//! M_in^cl(P; Q) exp(−((m/M) K·Q̂)²/(4 p_β²)), so M_in^cl is tabulated once
//! by |j|² and i·j for integer node coordinates i and offsets j.

use num_complex::Complex64;
use rayon::prelude::*;

use super::grid::MomentumGrid3D;
use crate::error::{Error, Result};
use crate::params::{derive_scales, PhysicalParams};
use crate::rates::{m_out_constant, CrossSectionModel};
use crate::vec3::Vec3;

pub struct GridGenerator {
    grid: MomentumGrid3D,
    k: Vec3,
    include_free_phase: bool,
    /// M_in^cl ΔP³ by (|j|², i·j + dot_offset).
    table: Vec<f64>,
    dot_offset: i64,
    dot_len: usize,
    /// Coherence factor by offset j, indexed over [−2h, 2h]³.
    coherence: Vec<f64>,
    /// Source weights w(P″).
    weight: Vec<f64>,
    loss: Vec<f64>,
    phase: Vec<f64>,
}

impl GridGenerator {
    pub fn new(
        grid: MomentumGrid3D,
        params: &PhysicalParams,
        model: &CrossSectionModel,
        k: Vec3,
        include_free_phase: bool,
    ) -> Result<Self> {
        if !model.is_constant() {
            return Err(Error::Unsupported("the momentum-grid generator supports only the constant cross-section"));
        }
        if !k.is_finite() {
            return Err(Error::Configuration(format!("coherence vector must be finite, got {k:?}")));
        }
        grid.check_for(params)?;
        let sc = derive_scales(params);
        let ratio = params.mass_ratio();
        let h = grid.half();
        let dp = grid.spacing();
        let vol = grid.cell_volume();
        let p_beta2 = sc.p_beta * sc.p_beta;

        let j2_max = 3 * (2 * h) * (2 * h);
        let dot_offset = 6 * h * h;
        let dot_len = (2 * dot_offset + 1) as usize;
        let prefactor = params.n_gas * params.gas_mass / (sc.m_star * sc.m_star) * params.sigma_tot
            / (4.0 * std::f64::consts::PI)
            / (std::f64::consts::PI.sqrt() * sc.p_beta)
            * vol;
        let mut table = vec![0.0; (j2_max as usize + 1) * dot_len];
        for j2 in 1..=j2_max {
            let jn = (j2 as f64).sqrt();
            let q = dp * jn;
            for d in -dot_offset..=dot_offset {
                let s = 0.5 * (1.0 - ratio) * q + ratio * dp * d as f64 / jn;
                table[j2 as usize * dot_len + (d + dot_offset) as usize] =
                    prefactor / q * (-(s * s) / p_beta2).exp();
            }
        }

        let span = (4 * h + 1) as usize;
        let mut coherence = vec![1.0; span * span * span];
        for (idx, c) in coherence.iter_mut().enumerate() {
            let j = [
                (idx / (span * span)) as i64 - 2 * h,
                ((idx / span) % span) as i64 - 2 * h,
                (idx % span) as i64 - 2 * h,
            ];
            let jv = Vec3::new(j[0] as f64, j[1] as f64, j[2] as f64);
            if let Some(jhat) = jv.normalized() {
                let a = ratio * k.dot(jhat);
                *c = (-(a * a) / (4.0 * p_beta2)).exp();
            }
        }

        let mut gen = GridGenerator {
            grid,
            k,
            include_free_phase,
            table,
            dot_offset,
            dot_len,
            coherence,
            weight: vec![0.0; grid.len()],
            loss: Vec::with_capacity(grid.len()),
            phase: Vec::with_capacity(grid.len()),
        };

        // Discrete out-rate of every source node (K = 0 kernel).
        let out_rate: Vec<f64> = (0..grid.len())
            .into_par_iter()
            .map(|src| {
                let s = grid.coords(src);
                let mut acc = 0.0;
                for tx in -h..=h {
                    for ty in -h..=h {
                        for tz in -h..=h {
                            let j = [tx - s[0], ty - s[1], tz - s[2]];
                            if j == [0, 0, 0] {
                                continue;
                            }
                            acc += gen.kernel([tx, ty, tz], j);
                        }
                    }
                }
                acc
            })
            .collect();
        for (idx, w) in gen.weight.iter_mut().enumerate() {
            let m_out = m_out_constant(grid.momentum(idx), params);
            *w = if out_rate[idx] > 0.0 { m_out / out_rate[idx] } else { 0.0 };
        }
        for idx in 0..grid.len() {
            let p = grid.momentum(idx);
            gen.loss
                .push(0.5 * (m_out_constant(p + k * 0.5, params) + m_out_constant(p - k * 0.5, params)));
            gen.phase.push(p.dot(k) / (params.tracer_mass * params.hbar));
        }
        Ok(gen)
    }

    pub fn grid(&self) -> MomentumGrid3D {
        self.grid
    }

    pub fn k(&self) -> Vec3 {
        self.k
    }

    /// Largest loss rate on the grid.
    pub fn max_loss(&self) -> f64 {
        self.loss.iter().cloned().fold(0.0, f64::max)
    }

    /// Loss rate ½[M_out(P + K/2) + M_out(P − K/2)] at each node.
    pub fn loss_rates(&self) -> &[f64] {
        &self.loss
    }

    /// M_in^cl(P_target; Q) ΔP³ for target coordinates `t` and offset `j`
    /// (non-zero).
    #[inline]
    fn kernel(&self, t: [i64; 3], j: [i64; 3]) -> f64 {
        let j2 = j[0] * j[0] + j[1] * j[1] + j[2] * j[2];
        let dot = t[0] * j[0] + t[1] * j[1] + t[2] * j[2];
        self.table[j2 as usize * self.dot_len + (dot + self.dot_offset) as usize]
    }

    #[inline]
    fn coherence_index(&self, j: [i64; 3]) -> usize {
        let h2 = 2 * self.grid.half();
        let span = (2 * h2 + 1) as usize;
        ((j[0] + h2) as usize * span + (j[1] + h2) as usize) * span + (j[2] + h2) as usize
    }

    /// Gain part only.
    pub fn apply_gain(&self, rho: &[Complex64], out: &mut [Complex64]) {
        let g = self.grid;
        let h = g.half();
        let source: Vec<Complex64> = rho.iter().zip(&self.weight).map(|(r, w)| r * w).collect();
        out.par_iter_mut().enumerate().for_each(|(idx, o)| {
            let t = g.coords(idx);
            let mut acc = Complex64::new(0.0, 0.0);
            for sx in -h..=h {
                for sy in -h..=h {
                    let row = g.index([sx, sy, -h]);
                    for sz in -h..=h {
                        let j = [t[0] - sx, t[1] - sy, t[2] - sz];
                        if j == [0, 0, 0] {
                            continue;
                        }
                        let w = self.kernel(t, j) * self.coherence[self.coherence_index(j)];
                        acc += source[row + (sz + h) as usize] * w;
                    }
                }
            }
            *o = acc;
        });
    }

    /// out = G rho.
    pub fn apply(&self, rho: &[Complex64], out: &mut [Complex64]) {
        assert_eq!(rho.len(), self.grid.len());
        assert_eq!(out.len(), self.grid.len());
        self.apply_gain(rho, out);
        for idx in 0..rho.len() {
            let mut rate = Complex64::new(-self.loss[idx], 0.0);
            if self.include_free_phase {
                rate.im -= self.phase[idx];
            }
            out[idx] += rate * rho[idx];
        }
    }
}
