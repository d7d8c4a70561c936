//! Run configuration: flat `section.key = value` text.
//!
//! Blank lines and `#` comments are ignored. Every key is optional; unknown
//! and repeated keys are errors reported with their line number. The echo
//! produced by [`RunConfig::to_text`] lists every key, defaults included,
//! and parses back to an identical configuration.

use std::collections::HashSet;
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::PhysicalParams;
use crate::vec3::Vec3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum McInitial {
    Delta,
    Thermal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FpMode {
    Quantum,
    Classical,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum QlbeMode {
    Thermalize,
    Ladder,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RateModel {
    Constant,
    Born,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSettings {
    pub seed: u64,
    /// Worker threads; 0 means the available parallelism.
    pub workers: usize,
}

/// Monte Carlo relaxation run. Times are in units of 1/η.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McSettings {
    pub n_traj: usize,
    pub initial: McInitial,
    /// Initial |P| along z in units of M v_β (delta start).
    pub u0: f64,
    pub t_min: f64,
    pub t_max: f64,
    pub n_times: usize,
}

/// Phase-space Fokker–Planck run. Momenta in units of sqrt(M T), times in
/// units of 1/η, positions absolute.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FpSettings {
    pub mode: FpMode,
    pub nx: usize,
    pub np: usize,
    pub x_max: f64,
    pub p_half_width: f64,
    pub t_final: f64,
    /// Time step in units of 1/η; 0 selects half the stability limit.
    pub dt: f64,
    pub snapshots: usize,
    pub free_streaming: bool,
    pub mean_x: f64,
    pub mean_p: f64,
    pub var_x: f64,
    pub var_p: f64,
    pub cov_xp: f64,
}

/// Momentum-grid run. Initial momenta in units of sqrt(M T), coherence
/// vectors in units of p_β, times absolute.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QlbeSettings {
    pub mode: QlbeMode,
    pub nodes: usize,
    pub t_final: f64,
    /// Time step; 0 selects the largest allowed step.
    pub dt: f64,
    pub snapshots: usize,
    pub mean_pz: f64,
    pub sd: f64,
    pub k_ladder: Vec<f64>,
    pub k_dir: Vec3,
}

/// Rate tabulation. Momenta absolute; 0 selects 5 max(p_β, sqrt(M T)).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatesSettings {
    pub model: RateModel,
    pub born_table: String,
    pub n_points: usize,
    pub p_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub params: PhysicalParams,
    pub run: RunSettings,
    pub mc: McSettings,
    pub fp: FpSettings,
    pub qlbe: QlbeSettings,
    pub rates: RatesSettings,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            params: PhysicalParams::default(),
            run: RunSettings { seed: 1, workers: 0 },
            mc: McSettings {
                n_traj: 10_000,
                initial: McInitial::Delta,
                u0: 2.0,
                t_min: 0.01,
                t_max: 10.0,
                n_times: 64,
            },
            fp: FpSettings {
                mode: FpMode::Both,
                nx: 128,
                np: 128,
                x_max: 60.0,
                p_half_width: 6.0,
                t_final: 2.0,
                dt: 0.0,
                snapshots: 4,
                free_streaming: true,
                mean_x: -2.0,
                mean_p: 1.0,
                var_x: 9.0,
                var_p: 0.5,
                cov_xp: 0.0,
            },
            qlbe: QlbeSettings {
                mode: QlbeMode::Thermalize,
                nodes: 15,
                t_final: 2.0,
                dt: 0.0,
                snapshots: 4,
                mean_pz: 1.5,
                sd: 0.7,
                k_ladder: vec![0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 20.0],
                k_dir: Vec3::new(1.0, 2.0, 3.0),
            },
            rates: RatesSettings {
                model: RateModel::Constant,
                born_table: String::new(),
                n_points: 64,
                p_max: 0.0,
            },
        }
    }
}

/// Every key in echo order.
pub const KEYS: &[&str] = &[
    "gas.m",
    "gas.T",
    "gas.n_gas",
    "gas.sigma_tot",
    "tracer.M",
    "units.hbar",
    "run.seed",
    "run.workers",
    "mc.n_traj",
    "mc.initial",
    "mc.u0",
    "mc.t_min",
    "mc.t_max",
    "mc.n_times",
    "fp.mode",
    "fp.nx",
    "fp.np",
    "fp.x_max",
    "fp.p_half_width",
    "fp.t_final",
    "fp.dt",
    "fp.snapshots",
    "fp.free_streaming",
    "fp.mean_x",
    "fp.mean_p",
    "fp.var_x",
    "fp.var_p",
    "fp.cov_xp",
    "qlbe.mode",
    "qlbe.nodes",
    "qlbe.t_final",
    "qlbe.dt",
    "qlbe.snapshots",
    "qlbe.mean_pz",
    "qlbe.sd",
    "qlbe.k_ladder",
    "qlbe.k_dir",
    "rates.model",
    "rates.born_table",
    "rates.n_points",
    "rates.p_max",
];

fn parse_f64(v: &str) -> std::result::Result<f64, String> {
    let x: f64 = v.parse().map_err(|_| format!("expected a number, got `{v}`"))?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(format!("expected a finite number, got `{v}`"))
    }
}

fn parse_int<T: std::str::FromStr>(v: &str) -> std::result::Result<T, String> {
    v.parse().map_err(|_| format!("expected a non-negative integer, got `{v}`"))
}

fn parse_bool(v: &str) -> std::result::Result<bool, String> {
    match v {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(format!("expected true or false, got `{v}`")),
    }
}

fn parse_list(v: &str) -> std::result::Result<Vec<f64>, String> {
    v.split(',').map(|s| parse_f64(s.trim())).collect()
}

fn parse_choice<T: Copy>(v: &str, options: &[(&str, T)]) -> std::result::Result<T, String> {
    options.iter().find(|(name, _)| *name == v).map(|&(_, t)| t).ok_or_else(|| {
        let names: Vec<&str> = options.iter().map(|(n, _)| *n).collect();
        format!("expected one of {}, got `{v}`", names.join(", "))
    })
}

const MC_INITIAL: &[(&str, McInitial)] = &[("delta", McInitial::Delta), ("thermal", McInitial::Thermal)];
const FP_MODE: &[(&str, FpMode)] = &[
    ("quantum", FpMode::Quantum),
    ("classical", FpMode::Classical),
    ("both", FpMode::Both),
];
const QLBE_MODE: &[(&str, QlbeMode)] = &[("thermalize", QlbeMode::Thermalize), ("ladder", QlbeMode::Ladder)];
const RATE_MODEL: &[(&str, RateModel)] = &[("constant", RateModel::Constant), ("born", RateModel::Born)];

fn choice_name<T: PartialEq>(v: T, options: &[(&'static str, T)]) -> &'static str {
    options.iter().find(|(_, t)| *t == v).map(|(n, _)| *n).unwrap_or("?")
}

fn fmt_list(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(", ")
}

impl RunConfig {
    /// Parse configuration text on top of the defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        let mut seen = HashSet::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| Error::Config {
                line,
                message: format!("expected `key = value`, got `{content}`"),
            })?;
            let key = key.trim();
            if !seen.insert(key.to_string()) && KEYS.contains(&key) {
                return Err(Error::Config {
                    line,
                    message: format!("duplicate key `{key}`"),
                });
            }
            cfg.set(key, value.trim()).map_err(|message| Error::Config { line, message })?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Set one key from its textual value.
    pub fn set(&mut self, key: &str, v: &str) -> std::result::Result<(), String> {
        let err = |e: String| format!("`{key}`: {e}");
        match key {
            "gas.m" => self.params.gas_mass = parse_f64(v).map_err(err)?,
            "gas.T" => self.params.temperature = parse_f64(v).map_err(err)?,
            "gas.n_gas" => self.params.n_gas = parse_f64(v).map_err(err)?,
            "gas.sigma_tot" => self.params.sigma_tot = parse_f64(v).map_err(err)?,
            "tracer.M" => self.params.tracer_mass = parse_f64(v).map_err(err)?,
            "units.hbar" => self.params.hbar = parse_f64(v).map_err(err)?,
            "run.seed" => self.run.seed = parse_int(v).map_err(err)?,
            "run.workers" => self.run.workers = parse_int(v).map_err(err)?,
            "mc.n_traj" => self.mc.n_traj = parse_int(v).map_err(err)?,
            "mc.initial" => self.mc.initial = parse_choice(v, MC_INITIAL).map_err(err)?,
            "mc.u0" => self.mc.u0 = parse_f64(v).map_err(err)?,
            "mc.t_min" => self.mc.t_min = parse_f64(v).map_err(err)?,
            "mc.t_max" => self.mc.t_max = parse_f64(v).map_err(err)?,
            "mc.n_times" => self.mc.n_times = parse_int(v).map_err(err)?,
            "fp.mode" => self.fp.mode = parse_choice(v, FP_MODE).map_err(err)?,
            "fp.nx" => self.fp.nx = parse_int(v).map_err(err)?,
            "fp.np" => self.fp.np = parse_int(v).map_err(err)?,
            "fp.x_max" => self.fp.x_max = parse_f64(v).map_err(err)?,
            "fp.p_half_width" => self.fp.p_half_width = parse_f64(v).map_err(err)?,
            "fp.t_final" => self.fp.t_final = parse_f64(v).map_err(err)?,
            "fp.dt" => self.fp.dt = parse_f64(v).map_err(err)?,
            "fp.snapshots" => self.fp.snapshots = parse_int(v).map_err(err)?,
            "fp.free_streaming" => self.fp.free_streaming = parse_bool(v).map_err(err)?,
            "fp.mean_x" => self.fp.mean_x = parse_f64(v).map_err(err)?,
            "fp.mean_p" => self.fp.mean_p = parse_f64(v).map_err(err)?,
            "fp.var_x" => self.fp.var_x = parse_f64(v).map_err(err)?,
            "fp.var_p" => self.fp.var_p = parse_f64(v).map_err(err)?,
            "fp.cov_xp" => self.fp.cov_xp = parse_f64(v).map_err(err)?,
            "qlbe.mode" => self.qlbe.mode = parse_choice(v, QLBE_MODE).map_err(err)?,
            "qlbe.nodes" => self.qlbe.nodes = parse_int(v).map_err(err)?,
            "qlbe.t_final" => self.qlbe.t_final = parse_f64(v).map_err(err)?,
            "qlbe.dt" => self.qlbe.dt = parse_f64(v).map_err(err)?,
            "qlbe.snapshots" => self.qlbe.snapshots = parse_int(v).map_err(err)?,
            "qlbe.mean_pz" => self.qlbe.mean_pz = parse_f64(v).map_err(err)?,
            "qlbe.sd" => self.qlbe.sd = parse_f64(v).map_err(err)?,
            "qlbe.k_ladder" => self.qlbe.k_ladder = parse_list(v).map_err(err)?,
            "qlbe.k_dir" => {
                let l = parse_list(v).map_err(err)?;
                if l.len() != 3 {
                    return Err(err(format!("expected three components, got {}", l.len())));
                }
                self.qlbe.k_dir = Vec3::new(l[0], l[1], l[2]);
            }
            "rates.model" => self.rates.model = parse_choice(v, RATE_MODEL).map_err(err)?,
            "rates.born_table" => self.rates.born_table = v.to_string(),
            "rates.n_points" => self.rates.n_points = parse_int(v).map_err(err)?,
            "rates.p_max" => self.rates.p_max = parse_f64(v).map_err(err)?,
            _ => return Err(format!("unknown key `{key}`")),
        }
        Ok(())
    }

    /// Textual value of one key, in the form accepted by [`RunConfig::set`].
    pub fn get(&self, key: &str) -> Option<String> {
        let f = |x: f64| format!("{x:?}");
        Some(match key {
            "gas.m" => f(self.params.gas_mass),
            "gas.T" => f(self.params.temperature),
            "gas.n_gas" => f(self.params.n_gas),
            "gas.sigma_tot" => f(self.params.sigma_tot),
            "tracer.M" => f(self.params.tracer_mass),
            "units.hbar" => f(self.params.hbar),
            "run.seed" => self.run.seed.to_string(),
            "run.workers" => self.run.workers.to_string(),
            "mc.n_traj" => self.mc.n_traj.to_string(),
            "mc.initial" => choice_name(self.mc.initial, MC_INITIAL).into(),
            "mc.u0" => f(self.mc.u0),
            "mc.t_min" => f(self.mc.t_min),
            "mc.t_max" => f(self.mc.t_max),
            "mc.n_times" => self.mc.n_times.to_string(),
            "fp.mode" => choice_name(self.fp.mode, FP_MODE).into(),
            "fp.nx" => self.fp.nx.to_string(),
            "fp.np" => self.fp.np.to_string(),
            "fp.x_max" => f(self.fp.x_max),
            "fp.p_half_width" => f(self.fp.p_half_width),
            "fp.t_final" => f(self.fp.t_final),
            "fp.dt" => f(self.fp.dt),
            "fp.snapshots" => self.fp.snapshots.to_string(),
            "fp.free_streaming" => self.fp.free_streaming.to_string(),
            "fp.mean_x" => f(self.fp.mean_x),
            "fp.mean_p" => f(self.fp.mean_p),
            "fp.var_x" => f(self.fp.var_x),
            "fp.var_p" => f(self.fp.var_p),
            "fp.cov_xp" => f(self.fp.cov_xp),
            "qlbe.mode" => choice_name(self.qlbe.mode, QLBE_MODE).into(),
            "qlbe.nodes" => self.qlbe.nodes.to_string(),
            "qlbe.t_final" => f(self.qlbe.t_final),
            "qlbe.dt" => f(self.qlbe.dt),
            "qlbe.snapshots" => self.qlbe.snapshots.to_string(),
            "qlbe.mean_pz" => f(self.qlbe.mean_pz),
            "qlbe.sd" => f(self.qlbe.sd),
            "qlbe.k_ladder" => fmt_list(&self.qlbe.k_ladder),
            "qlbe.k_dir" => fmt_list(&self.qlbe.k_dir.to_array()),
            "rates.model" => choice_name(self.rates.model, RATE_MODEL).into(),
            "rates.born_table" => self.rates.born_table.clone(),
            "rates.n_points" => self.rates.n_points.to_string(),
            "rates.p_max" => f(self.rates.p_max),
            _ => return None,
        })
    }

    /// Apply `key=value` overrides (command-line style).
    pub fn apply_overrides<'a>(&mut self, overrides: impl IntoIterator<Item = &'a str>) -> Result<()> {
        for o in overrides {
            let (k, v) = o
                .split_once('=')
                .ok_or_else(|| Error::Configuration(format!("override `{o}` is not of the form key=value")))?;
            self.set(k.trim(), v.trim()).map_err(Error::Configuration)?;
        }
        self.validate()
    }

    /// Range checks that do not depend on the workflow.
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        let bad = |m: String| Err(Error::Configuration(m));
        if self.mc.n_traj < 2 {
            return bad(format!("mc.n_traj must be at least 2, got {}", self.mc.n_traj));
        }
        if !(self.mc.t_min > 0.0 && self.mc.t_max > self.mc.t_min) || self.mc.n_times < 2 {
            return bad("mc time grid needs 0 < t_min < t_max and n_times >= 2".into());
        }
        if self.fp.nx < 2 || self.fp.np < 2 || self.fp.x_max <= 0.0 || self.fp.p_half_width <= 0.0 {
            return bad("fp grid needs nx, np >= 2 and positive extents".into());
        }
        if self.fp.t_final < 0.0 || self.fp.dt < 0.0 || self.fp.var_x <= 0.0 || self.fp.var_p <= 0.0 {
            return bad("fp needs t_final >= 0, dt >= 0 and positive variances".into());
        }
        if self.fp.cov_xp * self.fp.cov_xp >= self.fp.var_x * self.fp.var_p {
            return bad("fp initial covariance matrix must be positive definite".into());
        }
        if self.qlbe.t_final < 0.0 || self.qlbe.dt < 0.0 || self.qlbe.sd <= 0.0 {
            return bad("qlbe needs t_final >= 0, dt >= 0 and sd > 0".into());
        }
        if self.qlbe.k_dir.normalized().is_none() {
            return bad("qlbe.k_dir must be non-zero".into());
        }
        if self.qlbe.k_ladder.iter().any(|&k| k < 0.0) {
            return bad("qlbe.k_ladder entries must be non-negative".into());
        }
        if self.rates.n_points < 2 || self.rates.p_max < 0.0 {
            return bad("rates needs n_points >= 2 and p_max >= 0".into());
        }
        if self.rates.model == RateModel::Born && self.rates.born_table.is_empty() {
            return bad("rates.model = born needs rates.born_table".into());
        }
        Ok(())
    }

    /// Every key with its resolved value, grouped by section.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut section = "";
        for key in KEYS {
            let s = key.split('.').next().unwrap_or("");
            if s != section {
                if !section.is_empty() {
                    out.push('\n');
                }
                section = s;
            }
            let _ = writeln!(out, "{key} = {}", self.get(key).unwrap_or_default());
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn defaults_round_trip() {
        let cfg = RunConfig::default();
        assert_eq!(RunConfig::parse(&cfg.to_text()).unwrap(), cfg);
        assert!(KEYS.iter().all(|k| cfg.get(k).is_some()));
    }

    #[test]
    fn parses_values_and_comments() {
        let text = "# unit gas\ngas.m = 2.5\n\ntracer.M=50 # heavy\nqlbe.k_dir = 0, 0, 1\nfp.mode = classical\n";
        let cfg = RunConfig::parse(text).unwrap();
        assert_eq!(cfg.params.gas_mass, 2.5);
        assert_eq!(cfg.params.tracer_mass, 50.0);
        assert_eq!(cfg.qlbe.k_dir, Vec3::Z);
        assert_eq!(cfg.fp.mode, FpMode::Classical);
    }

    #[test]
    fn diagnostics_carry_line_numbers() {
        let e = RunConfig::parse("gas.m = 1\n\ngas.mass = 2\n").unwrap_err();
        assert!(matches!(e, Error::Config { line: 3, .. }), "{e}");
        let e = RunConfig::parse("gas.m = 1\ngas.m = 2\n").unwrap_err();
        assert!(matches!(e, Error::Config { line: 2, .. }), "{e}");
        let e = RunConfig::parse("gas.m 1\n").unwrap_err();
        assert!(matches!(e, Error::Config { line: 1, .. }));
        let e = RunConfig::parse("fp.mode = sideways\n").unwrap_err();
        assert!(e.to_string().contains("fp.mode"));
    }

    #[test]
    fn invalid_physics_is_rejected() {
        assert!(RunConfig::parse("gas.T = -1\n").unwrap_err().is_config());
        assert!(RunConfig::parse("gas.m = nan\n").is_err());
        assert!(RunConfig::parse("gas.n_gas = 0\n").is_ok());
    }

    #[test]
    fn overrides_apply_after_file() {
        let mut cfg = RunConfig::parse("mc.n_traj = 100\n").unwrap();
        cfg.apply_overrides(["mc.n_traj=50", "run.seed = 9"]).unwrap();
        assert_eq!((cfg.mc.n_traj, cfg.run.seed), (50, 9));
        assert!(cfg.apply_overrides(["nonsense"]).is_err());
    }

    proptest! {
        #[test]
        fn echo_round_trips(m in 0.01f64..100.0, big in 1.0f64..1e4, seed in any::<u64>(),
                            ladder in proptest::collection::vec(0.0f64..50.0, 1..6)) {
            let mut cfg = RunConfig::default();
            cfg.params.gas_mass = m;
            cfg.params.tracer_mass = big;
            cfg.run.seed = seed;
            cfg.qlbe.k_ladder = ladder;
            prop_assert_eq!(RunConfig::parse(&cfg.to_text()).unwrap(), cfg);
        }

        #[test]
        fn parser_never_panics(text in "\\PC{0,200}") {
            let _ = RunConfig::parse(&text);
        }
    }
}
