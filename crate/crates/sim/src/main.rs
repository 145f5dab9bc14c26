//! `leapfrog`: command-line driver.
//!
//! Exit codes: 0 success, 1 failed check or I/O error, 2 configuration error,
//! 3 blow-up, 4 step-size estimate did not converge.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use leapfrog_core::elastic2d::MaterialParams;
use leapfrog_core::processes::ViscoplasticParams;
use leapfrog_core::relaxation::maxwell_order;
use leapfrog_sim::convergence::run_convergence;
use leapfrog_sim::scenarios::{preset, PRESETS};
use leapfrog_sim::{convergence_study, run, RunOptions, RunStatus, ScenarioConfig, SimError, Simulation};

#[derive(Parser)]
#[command(name = "leapfrog", version, about = "Leap-frog elastodynamics with internal variables")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write energy, snapshots, adhesive history and a manifest.
    Run(Scenario),
    /// Estimate the largest stable step for a scenario.
    Cfl(Scenario),
    /// Refinement study of a smooth elastic pulse.
    Converge {
        #[arg(long, default_value_t = 3)]
        levels: usize,
    },
    /// 0D Maxwell shear relaxation at τ and τ/2.
    Relax {
        #[arg(long, default_value_t = 0.05)]
        tau: f64,
    },
    /// Run a scenario with the energy audit only and check the balance.
    Audit(Scenario),
}

#[derive(Args)]
struct Scenario {
    /// Scenario file (TOML).
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Built-in scenario instead of a file.
    #[arg(long)]
    preset: Option<String>,
    /// Output directory, created if missing. Defaults to `[output] dir` or `out`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Grid override, `NXxNY`.
    #[arg(long, value_parser = parse_grid)]
    grid: Option<(usize, usize)>,
    /// Step as a fraction of the estimated bound; replaces an explicit tau.
    #[arg(long)]
    tau_factor: Option<f64>,
    /// Final time.
    #[arg(long)]
    duration: Option<f64>,
    /// Snapshot times, comma separated.
    #[arg(long, value_delimiter = ',')]
    snapshots: Option<Vec<f64>>,
    /// Also write `.vti` snapshots.
    #[arg(long)]
    vti: bool,
    #[arg(long)]
    seed: Option<u64>,
    /// Accept steps beyond the stability bound.
    #[arg(long)]
    allow_unstable: bool,
}

fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(['x', 'X']).ok_or("expected NXxNY")?;
    Ok((
        a.trim().parse().map_err(|e| format!("{e}"))?,
        b.trim().parse().map_err(|e| format!("{e}"))?,
    ))
}

impl Scenario {
    fn resolve(&self) -> Result<ScenarioConfig, SimError> {
        let mut cfg = match (&self.config, &self.preset) {
            (Some(path), _) => ScenarioConfig::load(path)?,
            (None, Some(name)) => preset(name).ok_or_else(|| {
                SimError::Config(format!("unknown preset '{name}', expected one of {}", PRESETS.join(", ")))
            })?,
            (None, None) => return Err(SimError::Config("give --config or --preset".into())),
        };
        if let Some((nx, ny)) = self.grid {
            // keep the physical domain, change the resolution
            cfg.domain.nx = nx;
            cfg.domain.ny = ny;
        }
        if let Some(f) = self.tau_factor {
            cfg.time.cfl_factor = Some(f);
            cfg.time.tau = None;
        }
        if let Some(t) = self.duration {
            cfg.time.duration = t;
            cfg.output.snapshots.retain(|&s| s <= t);
        }
        if let Some(s) = &self.snapshots {
            cfg.output.snapshots = s.clone();
        }
        if self.vti {
            cfg.output.vti = true;
        }
        if let Some(seed) = self.seed {
            cfg.time.seed = seed;
        }
        if self.allow_unstable {
            cfg.time.allow_unstable = true;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn out_dir(&self, cfg: &ScenarioConfig) -> PathBuf {
        self.out
            .clone()
            .or_else(|| cfg.output.dir.clone())
            .unwrap_or_else(|| PathBuf::from("out"))
    }
}

fn cmd_run(s: &Scenario, ledger_only: bool) -> Result<ExitCode, SimError> {
    let cfg = s.resolve()?;
    let sim = Simulation::new(&cfg)?;
    let out = s.out_dir(&cfg);
    std::fs::create_dir_all(&out).map_err(|e| SimError::io(&out, e))?;
    std::fs::write(out.join("scenario.toml"), cfg.to_toml()).map_err(|e| SimError::io(&out, e))?;
    let summary = run(
        &sim,
        &RunOptions {
            out_dir: Some(out.clone()),
            ledger_only,
        },
    )?;
    println!(
        "steps={} t={} tau={} status={}",
        summary.steps_done,
        summary.final_time,
        summary.step.tau,
        summary.manifest.get("status").unwrap_or("?")
    );
    if let Some(t) = summary.first_rupture {
        println!("first_rupture={t} ruptured={}/{}", summary.ruptured_segments, summary.segments);
    }
    if let RunStatus::BlowUp { step, field, magnitude } = summary.status {
        eprintln!("blow-up at step {step}: |{field}| = {magnitude:e}");
        return Ok(ExitCode::from(3));
    }
    if ledger_only {
        let worst = summary.max_relative_imbalance();
        let monotone = summary.dissipation_monotone();
        println!("max_relative_imbalance={worst:e} dissipation_monotone={monotone}");
        if !(worst <= 1e-8 && monotone) {
            return Ok(ExitCode::from(1));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_cfl(s: &Scenario) -> Result<ExitCode, SimError> {
    let cfg = s.resolve()?;
    let sim = Simulation::new(&cfg)?;
    let est = sim.estimate()?;
    let tau = match (cfg.time.tau, cfg.time.cfl_factor) {
        (Some(t), _) => t,
        (None, Some(f)) => f * est.tau_max,
        (None, None) => unreachable!("validated"),
    };
    println!("tau_max={} eta={} ratio_to_config={}", est.tau_max, est.eta, tau / est.tau_max);
    println!(
        "tau_critical={} mu_max={} a_min={} iterations={}",
        est.tau_critical,
        est.mu_max,
        est.a_min(tau),
        est.iterations
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_converge(levels: usize) -> Result<ExitCode, SimError> {
    let report = run_convergence(&convergence_study(levels)?)?;
    for (l, h) in report.h.iter().enumerate() {
        let e = report.errors_vs_finest.get(l).map_or("-".to_string(), |e| format!("{e:e}"));
        let d = report.differences.get(l).map_or("-".to_string(), |d| format!("{d:e}"));
        println!("level={l} h={h} error_vs_finest={e} difference_to_next={d}");
    }
    let order = report.observed_order();
    println!("observed_order={order}");
    Ok(if (1.7..=2.2).contains(&order) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_relax(tau: f64) -> Result<ExitCode, SimError> {
    let c = MaterialParams::new(1.66, 1.0, 1.0)?.elasticity();
    let params = ViscoplasticParams {
        yield_stress: 0.0,
        viscosity: 1.0,
        hardening: 0.0,
    };
    let (e1, e2, order) = maxwell_order(&c, &params, 0.01, tau, 2.0);
    println!("error_tau={e1:e} error_half_tau={e2:e} order={order}");
    Ok(if (1.7..=2.3).contains(&order) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(s) => cmd_run(s, false),
        Command::Audit(s) => cmd_run(s, true),
        Command::Cfl(s) => cmd_cfl(s),
        Command::Converge { levels } => cmd_converge(*levels),
        Command::Relax { tau } => cmd_relax(*tau),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
