use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use qlbe_core::config::RunConfig;

mod commands;
mod output;

/// Tracer-in-gas collision dynamics: rates, Monte Carlo relaxation,
/// diffusive-limit phase-space solvers and momentum-grid propagation.
#[derive(Parser, Debug)]
#[command(name = "qlbe", version)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct GlobalArgs {
    /// Configuration file (`section.key = value` lines).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Root random seed (overrides run.seed).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; 0 uses the available parallelism (overrides run.workers).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Override any configuration key, e.g. `--set gas.T=2`. Repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Friction and diffusion coefficients of the diffusive limit.
    Coefficients,
    /// Monte Carlo momentum and energy relaxation with the moment equations.
    Relax {
        #[arg(long)]
        n_traj: Option<usize>,
        /// Initial |P| in units of M v_beta.
        #[arg(long)]
        u0: Option<f64>,
    },
    /// Quantum and classical Fokker-Planck evolution of a Gaussian Wigner function.
    Fp {
        #[arg(long)]
        nx: Option<usize>,
        #[arg(long)]
        np: Option<usize>,
        /// quantum, classical or both.
        #[arg(long)]
        mode: Option<String>,
    },
    /// Momentum-grid thermalisation run or coherence decay-rate scan.
    Qlbe {
        /// Nodes per axis (odd).
        #[arg(long)]
        nodes: Option<usize>,
        /// thermalize or ladder.
        #[arg(long)]
        mode: Option<String>,
    },
    /// Tabulate the collision rates.
    Rates {
        #[arg(long)]
        n_points: Option<usize>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Coefficients => "coefficients",
            Command::Relax { .. } => "relax",
            Command::Fp { .. } => "fp",
            Command::Qlbe { .. } => "qlbe",
            Command::Rates { .. } => "rates",
        }
    }

    /// Subcommand flags as `key=value` overrides.
    fn overrides(&self) -> Vec<String> {
        let mut o = Vec::new();
        let mut push = |k: &str, v: Option<String>| {
            if let Some(v) = v {
                o.push(format!("{k}={v}"));
            }
        };
        match self {
            Command::Coefficients => {}
            Command::Relax { n_traj, u0 } => {
                push("mc.n_traj", n_traj.map(|v| v.to_string()));
                push("mc.u0", u0.map(|v| format!("{v:?}")));
            }
            Command::Fp { nx, np, mode } => {
                push("fp.nx", nx.map(|v| v.to_string()));
                push("fp.np", np.map(|v| v.to_string()));
                push("fp.mode", mode.clone());
            }
            Command::Qlbe { nodes, mode } => {
                push("qlbe.nodes", nodes.map(|v| v.to_string()));
                push("qlbe.mode", mode.clone());
            }
            Command::Rates { n_points } => push("rates.n_points", n_points.map(|v| v.to_string())),
        }
        o
    }
}

fn load_config(cli: &Cli) -> anyhow::Result<RunConfig> {
    let mut cfg = match &cli.global.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            RunConfig::parse(&text).with_context(|| format!("in {}", path.display()))?
        }
        None => RunConfig::default(),
    };
    let mut overrides = cli.global.overrides.clone();
    if let Some(seed) = cli.global.seed {
        overrides.push(format!("run.seed={seed}"));
    }
    if let Some(w) = cli.global.workers {
        overrides.push(format!("run.workers={w}"));
    }
    overrides.extend(cli.command.overrides());
    cfg.apply_overrides(overrides.iter().map(String::as_str))?;
    Ok(cfg)
}

fn run(cli: &Cli) -> anyhow::Result<()> {
    let cfg = load_config(cli)?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.run.workers)
        .build_global()
        .context("starting the worker pool")?;
    let out = output::OutputDir::create(&cli.global.out)?;
    out.write_text("config.txt", &cfg.to_text())?;
    let results = match cli.command {
        Command::Coefficients => commands::cmd_coefficients(&cfg)?,
        Command::Relax { .. } => commands::relax(&cfg, &out)?,
        Command::Fp { .. } => commands::fp(&cfg, &out)?,
        Command::Qlbe { .. } => commands::qlbe(&cfg, &out)?,
        Command::Rates { .. } => commands::rates(&cfg, &out)?,
    };
    out.write_summary(cli.command.name(), &cfg, results)?;
    Ok(())
}

/// 2 for configuration errors, 3 for numerical-tolerance failures, 1 otherwise.
fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<qlbe_core::Error>() {
            if e.is_config() {
                return 2;
            }
            if e.is_numeric() {
                return 3;
            }
        }
        if cause.downcast_ref::<clap::Error>().is_some() {
            return 2;
        }
    }
    1
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
