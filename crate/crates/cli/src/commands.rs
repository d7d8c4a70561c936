use anyhow::Context;
use qlbe_core::config::{FpMode, McInitial, QlbeMode, RateModel, RunConfig};
use qlbe_core::diffusive::{
    coefficients, eta_by_quadrature, gaussian_moment_oracle, FokkerPlanckSolver, FpOptions, OracleTerms, PhaseGrid,
    PhaseMoments, WignerField,
};
use qlbe_core::io::write_csv;
use qlbe_core::moments::{diffusive_solution, integrate_moments, ClosureMode, MomentState};
use qlbe_core::qlbe_grid::{
    coherence_decay_rate, max_time_step, propagate_with, stationarity_residual, thermal_loss_average,
    CoherenceSlice, GridGenerator, MomentumGrid3D,
};
use qlbe_core::rates::{
    m_in_classical, m_out_classical, m_out_constant, BornKernel, CrossSectionModel, TabulatedKernel,
};
use qlbe_core::trajectories::{ensemble_moments, geometric_time_grid, InitialMomentum};
use qlbe_core::params::DIFFUSIVE_MASS_RATIO_LIMIT;
use qlbe_core::{derive_scales, Error, PhysicalParams, Vec3};
use serde_json::{json, Value};

use crate::output::OutputDir;

/// Largest tolerated trace drift in momentum-grid thermalisation runs.
const TRACE_TOLERANCE: f64 = 1e-8;

fn eta_of(params: &PhysicalParams) -> anyhow::Result<f64> {
    let eta = coefficients(params).eta;
    if eta <= 0.0 {
        return Err(Error::Configuration("times are in units of 1/eta, which is infinite for n_gas = 0".into()).into());
    }
    Ok(eta)
}

pub fn coefficients_report(cfg: &RunConfig) -> anyhow::Result<Value> {
    let p = &cfg.params;
    let c = coefficients(p);
    let eta_quad = eta_by_quadrature(p)?;
    let ratio = p.mass_ratio();
    let valid = ratio <= DIFFUSIVE_MASS_RATIO_LIMIT;
    let mut warnings = Vec::new();
    if p.n_gas == 0.0 {
        warnings.push("n_gas = 0: all collision rates and coefficients vanish".to_string());
    }
    if !valid {
        warnings.push(format!(
            "m/M = {ratio} exceeds {DIFFUSIVE_MASS_RATIO_LIMIT}: the diffusive-limit expansion is not reliable"
        ));
    }
    for w in &warnings {
        log::warn!("{w}");
    }
    // 0/0 when n_gas = 0; report the identity value of the minimal D_xx.
    let minimality = if c.eta > 0.0 { c.minimality_ratio(p.hbar) } else { 1.0 };
    Ok(json!({
        "eta": c.eta,
        "eta_quadrature": eta_quad,
        "d_pp": c.d_pp,
        "d_xx": c.d_xx,
        "minimality_ratio": minimality,
        "mass_ratio": ratio,
        "diffusive_valid": valid,
        "warnings": warnings,
    }))
}

pub fn cmd_coefficients(cfg: &RunConfig) -> anyhow::Result<Value> {
    let r = coefficients_report(cfg)?;
    println!("eta (closed form)   {:.10e}", r["eta"].as_f64().unwrap_or(f64::NAN));
    println!("eta (quadrature)    {:.10e}", r["eta_quadrature"].as_f64().unwrap_or(f64::NAN));
    println!("D_pp                {:.10e}", r["d_pp"].as_f64().unwrap_or(f64::NAN));
    println!("D_xx                {:.10e}", r["d_xx"].as_f64().unwrap_or(f64::NAN));
    println!("16 D_pp D_xx/(eta hbar)^2  {:.12}", r["minimality_ratio"].as_f64().unwrap_or(f64::NAN));
    println!("m/M                 {}", r["mass_ratio"]);
    println!("diffusive limit valid  {}", r["diffusive_valid"]);
    for w in r["warnings"].as_array().into_iter().flatten() {
        println!("warning: {}", w.as_str().unwrap_or_default());
    }
    Ok(r)
}

pub fn relax(cfg: &RunConfig, out: &OutputDir) -> anyhow::Result<Value> {
    let p = &cfg.params;
    let eta = eta_of(p)?;
    let times = geometric_time_grid(cfg.mc.t_min / eta, cfg.mc.t_max / eta, cfg.mc.n_times);
    let sc = derive_scales(p);
    let (initial, start) = match cfg.mc.initial {
        McInitial::Delta => {
            let p0 = Vec3::Z * (cfg.mc.u0 * p.tracer_mass * sc.v_beta);
            (InitialMomentum::Delta(p0), MomentState::from_momentum(p0, p))
        }
        McInitial::Thermal => (
            InitialMomentum::Thermal,
            MomentState {
                momentum: Vec3::ZERO,
                energy: 1.5 * p.temperature,
            },
        ),
    };
    let stats = ensemble_moments(&initial, cfg.mc.n_traj, &times, p, cfg.run.seed)?;
    stats.write_csv(out.writer("relax_mc.csv")?)?;

    let exact = integrate_moments(start, &times, p, ClosureMode::Exact)?;
    let diffusive = integrate_moments(start, &times, p, ClosureMode::Diffusive)?;
    write_csv(
        out.writer("relax_ode.csv")?,
        &["t", "Pz_exact", "E_exact", "Pz_diffusive", "E_diffusive"],
        times.iter().enumerate().map(|(k, &t)| {
            vec![t, exact[k].momentum.z, exact[k].energy, diffusive[k].momentum.z, diffusive[k].energy]
        }),
    )?;
    write_csv(
        out.writer("relax_analytic.csv")?,
        &["t", "Pz", "E"],
        times.iter().map(|&t| {
            let s = diffusive_solution(start, t, p);
            vec![t, s.momentum.z, s.energy]
        }),
    )?;
    let last = times.len() - 1;
    Ok(json!({
        "eta": eta,
        "n_traj": cfg.mc.n_traj,
        "final_time": times[last],
        "final_mean_pz": stats.mean_momentum[last].z,
        "final_mean_energy": stats.mean_energy[last],
        "final_stderr_energy": stats.stderr_energy[last],
        "final_exact_energy": exact[last].energy,
    }))
}

pub fn fp(cfg: &RunConfig, out: &OutputDir) -> anyhow::Result<Value> {
    let p = &cfg.params;
    let c = coefficients(p);
    let eta = eta_of(p)?;
    let f = &cfg.fp;
    let width = (p.tracer_mass * p.temperature).sqrt();
    let grid = PhaseGrid::new(
        (-f.x_max, f.x_max),
        (-f.p_half_width * width, f.p_half_width * width),
        f.nx,
        f.np,
    )?;
    let start = PhaseMoments {
        mean_x: f.mean_x,
        mean_p: f.mean_p * width,
        var_x: f.var_x,
        var_p: f.var_p * width * width,
        cov_xp: f.cov_xp * width,
    };
    let w0 = WignerField::gaussian(grid, start)?;
    let opts = FpOptions {
        dt: (f.dt > 0.0).then(|| f.dt / eta),
        free_streaming: f.free_streaming,
        ..FpOptions::default()
    };
    let modes: &[(&str, bool)] = match f.mode {
        FpMode::Quantum => &[("quantum", true)],
        FpMode::Classical => &[("classical", false)],
        FpMode::Both => &[("quantum", true), ("classical", false)],
    };
    let intervals = f.snapshots.max(1);
    let t_final = f.t_final / eta;
    let mut summary = serde_json::Map::new();
    for &(name, quantum) in modes {
        let coeffs = if quantum { c } else { qlbe_core::diffusive::DiffusionCoefficients { d_xx: 0.0, ..c } };
        let solver = FokkerPlanckSolver::new(grid, coeffs, p.tracer_mass, opts)
            .with_context(|| format!("setting up the {name} solver (adjust fp.nx, fp.np, fp.p_half_width or fp.dt)"))?;
        let terms = OracleTerms {
            quantum,
            free_streaming: f.free_streaming,
        };
        let start = w0.moments();
        let mut w = w0.clone();
        let mut rows = Vec::new();
        let mut max_err = 0.0f64;
        for k in 0..=intervals {
            let t = t_final * k as f64 / intervals as f64;
            let duration = t - w.time;
            solver
                .advance(&mut w, duration)
                .with_context(|| format!("{name} run (widen fp.x_max or fp.p_half_width)"))?;
            w.time = t;
            out.write_bytes(&format!("fp_{name}_{k:04}.grid"), &w.encode())?;
            let m = w.moments();
            let o = gaussian_moment_oracle(start, t, &coeffs, p.tracer_mass, terms);
            let errs = [
                (m.mean_x - o.mean_x).abs() / o.mean_x.abs().max(o.var_x.sqrt()),
                (m.mean_p - o.mean_p).abs() / o.mean_p.abs().max(o.var_p.sqrt()),
                (m.var_x - o.var_x).abs() / o.var_x,
                (m.var_p - o.var_p).abs() / o.var_p,
                (m.cov_xp - o.cov_xp).abs() / (o.var_x * o.var_p).sqrt(),
            ];
            max_err = errs.iter().cloned().fold(max_err, f64::max);
            rows.push(vec![
                t, w.mass(), m.mean_x, m.mean_p, m.var_x, m.var_p, m.cov_xp, o.mean_x, o.mean_p, o.var_x, o.var_p,
                o.cov_xp,
            ]);
        }
        write_csv(
            out.writer(&format!("fp_{name}_moments.csv"))?,
            &[
                "t", "mass", "mean_x", "mean_p", "var_x", "var_p", "cov_xp", "oracle_mean_x", "oracle_mean_p",
                "oracle_var_x", "oracle_var_p", "oracle_cov_xp",
            ],
            rows,
        )?;
        summary.insert(
            name.to_string(),
            json!({
                "mass_error": (w.mass() - 1.0).abs(),
                "max_relative_moment_error": max_err,
                "steps": solver.step_count(t_final),
            }),
        );
    }
    Ok(Value::Object(summary))
}

pub fn qlbe(cfg: &RunConfig, out: &OutputDir) -> anyhow::Result<Value> {
    let p = &cfg.params;
    let q = &cfg.qlbe;
    let grid = MomentumGrid3D::for_params(q.nodes, p)?;
    grid.check_for(p).context("qlbe grid (raise qlbe.nodes or lower tracer.M/gas.m)")?;
    match q.mode {
        QlbeMode::Thermalize => {
            let width = (p.tracer_mass * p.temperature).sqrt();
            let s0 = CoherenceSlice::gaussian(grid, Vec3::Z * (q.mean_pz * width), q.sd * width)?;
            let eq = CoherenceSlice::thermal(grid, Vec3::ZERO, p);
            let gen = GridGenerator::new(grid, p, &CrossSectionModel::Constant, Vec3::ZERO, false)?;
            let dt = if q.dt > 0.0 { q.dt } else { max_time_step(&gen) };
            let intervals = q.snapshots.max(1);
            let mut rows = Vec::new();
            let mut max_trace_err = 0.0f64;
            let mut min_value = f64::INFINITY;
            let mut diag = |s: &CoherenceSlice| {
                let tr = s.trace().re;
                let min = s.values.iter().map(|v| v.re).fold(f64::INFINITY, f64::min);
                max_trace_err = max_trace_err.max((tr - 1.0).abs());
                min_value = min_value.min(min);
                rows.push(vec![s.time, tr, (tr - 1.0).abs(), min, s.mean_energy(p.tracer_mass), s.l1_distance(&eq)]);
            };
            diag(&s0);
            out.write_bytes("qlbe_slice_0000.grid", &s0.encode())?;
            let mut s = s0;
            for k in 1..=intervals {
                let t = q.t_final * k as f64 / intervals as f64;
                s = propagate_with(&gen, &s, t, dt, &mut diag)?;
                out.write_bytes(&format!("qlbe_slice_{k:04}.grid"), &s.encode())?;
            }
            write_csv(
                out.writer("qlbe_diagnostics.csv")?,
                &["t", "trace", "trace_error", "min_value", "mean_energy", "l1_to_equilibrium"],
                rows,
            )?;
            if max_trace_err > TRACE_TOLERANCE {
                return Err(Error::NumericAccuracy {
                    estimate: max_trace_err,
                    tolerance: TRACE_TOLERANCE,
                }
                .into());
            }
            Ok(json!({
                "nodes": q.nodes,
                "dt": dt,
                "max_trace_error": max_trace_err,
                "min_value": min_value,
                "final_mean_energy": s.mean_energy(p.tracer_mass),
                "final_l1_to_equilibrium": s.l1_distance(&eq),
                "equilibrium_residual": stationarity_residual(p, grid)?,
            }))
        }
        QlbeMode::Ladder => {
            let p_beta = derive_scales(p).p_beta;
            let dir = q.k_dir.normalized().context("qlbe.k_dir must be non-zero")?;
            let mut rows = Vec::new();
            for &f in &q.k_ladder {
                let k = dir * (f * p_beta);
                let rate = coherence_decay_rate(k, p, grid)?;
                let loss = thermal_loss_average(k, p, grid)?;
                rows.push(vec![f, k.norm(), rate, loss]);
            }
            let monotone = rows.windows(2).all(|w| w[1][2] > w[0][2]);
            let rates: Vec<f64> = rows.iter().map(|r| r[2]).collect();
            write_csv(
                out.writer("qlbe_ladder.csv")?,
                &["k_over_p_beta", "k", "decay_rate", "thermal_loss"],
                rows,
            )?;
            Ok(json!({ "nodes": q.nodes, "rates": rates, "monotone": monotone }))
        }
    }
}

pub fn rates(cfg: &RunConfig, out: &OutputDir) -> anyhow::Result<Value> {
    let p = &cfg.params;
    let r = &cfg.rates;
    let model = match r.model {
        RateModel::Constant => CrossSectionModel::Constant,
        RateModel::Born => {
            let text = std::fs::read_to_string(&r.born_table)
                .with_context(|| format!("reading rates.born_table {}", r.born_table))?;
            CrossSectionModel::Born(BornKernel::tabulated(TabulatedKernel::parse(&text)?))
        }
    };
    let p_max = if r.p_max > 0.0 { r.p_max } else { MomentumGrid3D::minimum_extent(p) };
    let n = r.n_points;
    let mut out_rows = Vec::with_capacity(n);
    for i in 0..n {
        let pz = p_max * i as f64 / (n - 1) as f64;
        let v = Vec3::Z * pz;
        let quad = m_out_classical(v, p, &model)?;
        let closed = if model.is_constant() { m_out_constant(v, p) } else { f64::NAN };
        out_rows.push(vec![pz, quad, closed]);
    }
    write_csv(out.writer("rates_m_out.csv")?, &["P", "m_out_quadrature", "m_out_closed_form"], out_rows)?;

    let thermal = Vec3::Z * (p.tracer_mass * p.temperature).sqrt();
    let mut in_rows = Vec::with_capacity(n);
    for i in 1..=n {
        let qz = p_max * i as f64 / n as f64;
        let q = Vec3::Z * qz;
        in_rows.push(vec![
            qz,
            m_in_classical(Vec3::ZERO, q, p, &model)?,
            m_in_classical(thermal, q, p, &model)?,
        ]);
    }
    write_csv(out.writer("rates_m_in.csv")?, &["Q", "m_in_P0", "m_in_P_thermal"], in_rows)?;
    Ok(json!({
        "p_max": p_max,
        "n_points": n,
        "m_out_at_rest": m_out_classical(Vec3::ZERO, p, &model)?,
    }))
}
