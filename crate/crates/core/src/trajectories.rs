//! Event-driven Monte Carlo of the classical linear Boltzmann dynamics.
//!
//! Between collisions the tracer momentum is constant, so the waiting time
//! to the next collision is exactly exponential with rate M_out^cl(P). The
//! momentum transfer is drawn with the exact collision sampler.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diffusive::coefficients_quiet;
use crate::error::{Error, Result};
use crate::io::write_csv;
use crate::params::PhysicalParams;
use crate::rates::{m_out_constant, sample_collision, CrossSectionModel};
use crate::vec3::Vec3;

/// Piecewise-constant momentum history: `events[k] = (t_k, P_k)` with P_k
/// the momentum on [t_k, t_{k+1}). The first entry is (0, P0).
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub events: Vec<(f64, Vec3)>,
    pub t_max: f64,
}

impl Trajectory {
    pub fn momentum_at(&self, t: f64) -> Vec3 {
        let k = self.events.partition_point(|e| e.0 <= t);
        self.events[k.saturating_sub(1)].1
    }

    /// Number of collisions.
    pub fn collisions(&self) -> usize {
        self.events.len() - 1
    }

    /// (1/t_max) ∫₀^t_max f(P(t)) dt.
    pub fn time_average(&self, mut f: impl FnMut(Vec3) -> f64) -> f64 {
        let mut acc = 0.0;
        for (k, &(t, p)) in self.events.iter().enumerate() {
            let end = self.events.get(k + 1).map_or(self.t_max, |e| e.0);
            acc += f(p) * (end - t);
        }
        acc / self.t_max
    }
}

/// Simulation switches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SimulationOptions {
    /// Record collision times but keep the momentum at P0. Used to test the
    /// waiting-time statistics.
    pub freeze_momentum: bool,
}

/// One trajectory from `p0` up to `t_max`.
pub fn simulate_trajectory<R: Rng + ?Sized>(
    p0: Vec3,
    t_max: f64,
    params: &PhysicalParams,
    rng: &mut R,
) -> Result<Trajectory> {
    simulate_trajectory_with(p0, t_max, params, SimulationOptions::default(), rng)
}

pub fn simulate_trajectory_with<R: Rng + ?Sized>(
    p0: Vec3,
    t_max: f64,
    params: &PhysicalParams,
    opts: SimulationOptions,
    rng: &mut R,
) -> Result<Trajectory> {
    if !(t_max > 0.0 && t_max.is_finite()) {
        return Err(Error::Precondition(format!("t_max must be positive and finite, got {t_max}")));
    }
    let mut events = vec![(0.0, p0)];
    let mut t = 0.0;
    let mut p = p0;
    loop {
        let rate = m_out_constant(p, params);
        if rate <= 0.0 {
            break;
        }
        t += exponential(rng) / rate;
        if t >= t_max {
            break;
        }
        if !opts.freeze_momentum {
            p += sample_collision(p, params, &CrossSectionModel::Constant, rng)?;
        }
        events.push((t, p));
    }
    Ok(Trajectory { events, t_max })
}

/// Momentum of one trajectory sampled at the non-decreasing `times`,
/// without storing the full history.
pub fn sample_path<R: Rng + ?Sized>(
    p0: Vec3,
    times: &[f64],
    params: &PhysicalParams,
    rng: &mut R,
) -> Result<Vec<Vec3>> {
    let mut out = Vec::with_capacity(times.len());
    let mut p = p0;
    let mut rate = m_out_constant(p, params);
    let mut next = if rate > 0.0 { exponential(rng) / rate } else { f64::INFINITY };
    for &target in times {
        while next <= target {
            p += sample_collision(p, params, &CrossSectionModel::Constant, rng)?;
            rate = m_out_constant(p, params);
            next += if rate > 0.0 { exponential(rng) / rate } else { f64::INFINITY };
        }
        out.push(p);
    }
    Ok(out)
}

#[inline]
fn exponential<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    -(1.0 - rng.gen::<f64>()).ln()
}

/// Distribution of the initial tracer momentum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum InitialMomentum {
    /// Every trajectory starts at the same momentum.
    Delta(Vec3),
    /// Thermal equilibrium at the tracer mass: each component N(0, M T).
    Thermal,
}

impl InitialMomentum {
    pub fn sample<R: Rng + ?Sized>(&self, params: &PhysicalParams, rng: &mut R) -> Vec3 {
        match *self {
            InitialMomentum::Delta(p) => p,
            InitialMomentum::Thermal => {
                let s = (params.tracer_mass * params.temperature).sqrt();
                Vec3::new(
                    s * rng.sample::<f64, _>(StandardNormal),
                    s * rng.sample::<f64, _>(StandardNormal),
                    s * rng.sample::<f64, _>(StandardNormal),
                )
            }
        }
    }
}

/// The random stream of trajectory `index` under `root_seed`.
pub fn trajectory_rng(root_seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(root_seed);
    rng.set_stream(index);
    rng
}

/// `n` geometrically spaced times from `lo` to `hi`.
pub fn geometric_time_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && n >= 2, "invalid geometric grid");
    let ratio = (hi / lo).ln() / (n - 1) as f64;
    (0..n)
        .map(|i| if i == n - 1 { hi } else { lo * (ratio * i as f64).exp() })
        .collect()
}

/// Default statistics grid: 64 geometric points from 0.01/η to 10/η.
pub fn default_time_grid(params: &PhysicalParams) -> Result<Vec<f64>> {
    let eta = coefficients_quiet(params).eta;
    if eta <= 0.0 {
        return Err(Error::Precondition(
            "the default time grid is in units of 1/eta, which is infinite at zero density".into(),
        ));
    }
    Ok(geometric_time_grid(0.01 / eta, 10.0 / eta, 64))
}

/// Per-time ensemble statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleStats {
    pub times: Vec<f64>,
    pub mean_momentum: Vec<Vec3>,
    pub mean_energy: Vec<f64>,
    /// Sample covariance of the momentum (unbiased), row-major 3×3.
    pub covariance: Vec<[[f64; 3]; 3]>,
    pub stderr_momentum: Vec<Vec3>,
    pub stderr_energy: Vec<f64>,
    pub n_traj: usize,
    pub root_seed: u64,
}

impl EnsembleStats {
    pub const CSV_HEADER: [&'static str; 15] = [
        "t", "Px", "Py", "Pz", "E", "var_xx", "var_yy", "var_zz", "cov_xy", "cov_xz", "cov_yz", "se_Px",
        "se_Py", "se_Pz", "se_E",
    ];

    pub fn write_csv(&self, w: impl std::io::Write) -> Result<()> {
        let rows = (0..self.times.len()).map(|k| {
            let m = self.mean_momentum[k];
            let c = self.covariance[k];
            let s = self.stderr_momentum[k];
            vec![
                self.times[k],
                m.x,
                m.y,
                m.z,
                self.mean_energy[k],
                c[0][0],
                c[1][1],
                c[2][2],
                c[0][1],
                c[0][2],
                c[1][2],
                s.x,
                s.y,
                s.z,
                self.stderr_energy[k],
            ]
        });
        write_csv(w, &Self::CSV_HEADER, rows)
    }
}

/// Run `n_traj` independent trajectories and collect moment statistics at
/// `times`. Trajectory i uses stream i of a ChaCha8 generator seeded with
/// `root_seed`, and the reduction runs in index order, so the result is
/// bit-identical for a given seed regardless of thread count.
pub fn ensemble_moments(
    initial: &InitialMomentum,
    n_traj: usize,
    times: &[f64],
    params: &PhysicalParams,
    root_seed: u64,
) -> Result<EnsembleStats> {
    if n_traj < 2 {
        return Err(Error::Precondition(format!("need at least two trajectories, got {n_traj}")));
    }
    if times.windows(2).any(|w| w[1] < w[0]) || times.first().is_some_and(|&t| t < 0.0) {
        return Err(Error::Precondition("time grid must be non-negative and non-decreasing".into()));
    }
    let paths: Vec<Vec<Vec3>> = (0..n_traj as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = trajectory_rng(root_seed, i);
            let p0 = initial.sample(params, &mut rng);
            sample_path(p0, times, params, &mut rng)
        })
        .collect::<Result<_>>()?;

    let n = n_traj as f64;
    let two_m = 2.0 * params.tracer_mass;
    let nt = times.len();
    let mut stats = EnsembleStats {
        times: times.to_vec(),
        mean_momentum: Vec::with_capacity(nt),
        mean_energy: Vec::with_capacity(nt),
        covariance: Vec::with_capacity(nt),
        stderr_momentum: Vec::with_capacity(nt),
        stderr_energy: Vec::with_capacity(nt),
        n_traj,
        root_seed,
    };
    for k in 0..nt {
        let mut mean = Vec3::ZERO;
        let mut e_mean = 0.0;
        for path in &paths {
            mean += path[k];
            e_mean += path[k].norm_sq() / two_m;
        }
        mean = mean / n;
        e_mean /= n;
        let mut cov = [[0.0; 3]; 3];
        let mut e_var = 0.0;
        for path in &paths {
            let d = (path[k] - mean).to_array();
            for a in 0..3 {
                for b in 0..3 {
                    cov[a][b] += d[a] * d[b];
                }
            }
            let de = path[k].norm_sq() / two_m - e_mean;
            e_var += de * de;
        }
        for row in &mut cov {
            for v in row.iter_mut() {
                *v /= n - 1.0;
            }
        }
        e_var /= n - 1.0;
        stats.mean_momentum.push(mean);
        stats.mean_energy.push(e_mean);
        stats.stderr_momentum.push(Vec3::new(
            (cov[0][0] / n).sqrt(),
            (cov[1][1] / n).sqrt(),
            (cov[2][2] / n).sqrt(),
        ));
        stats.stderr_energy.push((e_var / n).sqrt());
        stats.covariance.push(cov);
    }
    Ok(stats)
}
