//! Runs a compiled scenario, streaming the ledger, snapshots and adhesive history.

use std::ops::ControlFlow;
use std::path::{Path, PathBuf};

use leapfrog_core::processes::ruptured;
use leapfrog_core::{EnergyLedger, Error as CoreError, LeapFrog, StaggeredState};

use crate::io::{write_snapshot, AlphaWriter, EnergyWriter, Manifest};
use crate::scenarios::{Simulation, StepChoice};
use crate::SimError;

#[derive(Debug, Clone, PartialEq)]
pub enum RunStatus {
    Completed,
    BlowUp { step: u64, field: &'static str, magnitude: f64 },
    /// The monitor asked to stop.
    Stopped,
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub step: StepChoice,
    pub status: RunStatus,
    pub steps_done: u64,
    pub final_time: f64,
    pub ledger: Vec<EnergyLedger>,
    /// Time of the first step at which some adhesive segment is fully debonded.
    pub first_rupture: Option<f64>,
    pub segments: usize,
    pub ruptured_segments: usize,
    /// Segments with `α < 1` at the end.
    pub damaged_segments: usize,
    /// `(k, t)` of the snapshots taken.
    pub snapshots: Vec<(u64, f64)>,
    pub manifest: Manifest,
}

impl RunSummary {
    pub fn blew_up(&self) -> bool {
        matches!(self.status, RunStatus::BlowUp { .. })
    }

    /// Largest per-step `|imbalance| / scale`.
    pub fn max_relative_imbalance(&self) -> f64 {
        self.ledger
            .iter()
            .filter(|r| r.scale() > 0.0)
            .map(|r| r.imbalance.abs() / r.scale())
            .fold(0.0, f64::max)
    }

    pub fn min_a_coeff(&self) -> f64 {
        self.ledger.iter().map(|r| r.a_coeff).fold(f64::INFINITY, f64::min)
    }

    pub fn dissipation_monotone(&self) -> bool {
        self.ledger.windows(2).all(|w| w[1].dissipated_cum >= w[0].dissipated_cum)
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Output directory; nothing is written when `None`.
    pub out_dir: Option<PathBuf>,
    /// Skips snapshots and the adhesive history (energy and manifest are still written).
    pub ledger_only: bool,
}

/// Step at which the snapshot for time `t` is taken; `v^k` approximates the velocity
/// at `kτ`.
pub fn snapshot_step(t: f64, tau: f64) -> u64 {
    if t <= 0.0 {
        0
    } else {
        (t / tau).round() as u64
    }
}

/// Runs `sim` to its final time. `monitor` sees each new state; breaking stops the run.
pub fn run_with<M>(sim: &Simulation, options: &RunOptions, mut monitor: M) -> Result<RunSummary, SimError>
where
    M: FnMut(&StaggeredState, &EnergyLedger) -> ControlFlow<()>,
{
    let choice = sim.choose_step()?;
    let tau = choice.tau;
    let n_steps = sim.steps(tau);
    let cfg = &sim.config;
    let out = options.out_dir.as_deref();
    if let Some(dir) = out {
        std::fs::create_dir_all(dir).map_err(|e| SimError::io(dir, e))?;
    }
    let write_fields = out.is_some() && !options.ledger_only;
    let adhesive = sim.process.adhesive();

    let mut manifest = base_manifest(sim, &choice, n_steps);
    let mut energy = out
        .map(|d| EnergyWriter::create(&d.join("energy.csv")).map_err(|e| SimError::io(d, e)))
        .transpose()?;
    let mut alpha = match (adhesive, write_fields) {
        (Some(_), true) => {
            let d = out.unwrap();
            Some(AlphaWriter::create(&d.join("alpha.csv")).map_err(|e| SimError::io(d, e))?)
        }
        _ => None,
    };

    let mut snap_steps: Vec<u64> = cfg.output.snapshots.iter().map(|&t| snapshot_step(t, tau).min(n_steps)).collect();
    snap_steps.sort_unstable();
    snap_steps.dedup();
    let mut snapshots = Vec::new();

    let mut state = sim.initial_state(tau)?;
    let layout = sim.layout();
    let write_alpha = |w: &mut AlphaWriter, s: &StaggeredState| -> std::io::Result<()> {
        let p = adhesive.unwrap();
        for (i, &a) in s.z.iter().enumerate() {
            w.row(s.t, i, a, p.segment_stress(&s.sigma, i))?;
        }
        Ok(())
    };
    let io_err = |e: std::io::Error| SimError::io(out.unwrap_or(Path::new(".")), e);
    if let Some(w) = alpha.as_mut() {
        write_alpha(w, &state).map_err(io_err)?;
    }
    if snap_steps.first() == Some(&0) {
        if write_fields {
            write_snapshot(out.unwrap(), 0, layout, &state.v, cfg.output.csv, cfg.output.vti).map_err(io_err)?;
        }
        snapshots.push((0, 0.0));
    }

    let mut stepper = LeapFrog::new(&sim.ops, sim.process.as_dyn(), &sim.load, tau)?;
    let mut ledger = Vec::with_capacity(n_steps as usize);
    let mut first_rupture = None;
    let mut status = RunStatus::Completed;
    let mut next = state.clone();
    while state.k < n_steps {
        next.clone_from(&state);
        let row = match stepper.step(&mut next) {
            Ok(row) => row,
            Err(CoreError::BlowUp { step, field, magnitude }) => {
                status = RunStatus::BlowUp { step, field, magnitude };
                break;
            }
            Err(e) => return Err(e.into()),
        };
        let alpha_changed = next.z != state.z;
        std::mem::swap(&mut state, &mut next);
        ledger.push(row);
        if let Some(w) = energy.as_mut() {
            w.row(&row).map_err(io_err)?;
        }
        if adhesive.is_some() && first_rupture.is_none() && ruptured(&state.z) > 0 {
            first_rupture = Some(state.t);
            log::info!("first segment debonded at t = {}", state.t);
        }
        if let Some(w) = alpha.as_mut() {
            if alpha_changed || state.k % cfg.output.alpha_every == 0 || state.k == n_steps {
                write_alpha(w, &state).map_err(io_err)?;
            }
        }
        if snap_steps.binary_search(&state.k).is_ok() {
            if write_fields {
                write_snapshot(out.unwrap(), state.k, layout, &state.v, cfg.output.csv, cfg.output.vti)
                    .map_err(io_err)?;
            }
            snapshots.push((state.k, state.t));
        }
        if monitor(&state, &row).is_break() {
            status = RunStatus::Stopped;
            break;
        }
    }
    if let Some(w) = energy {
        w.finish().map_err(io_err)?;
    }
    if let Some(w) = alpha {
        w.finish().map_err(io_err)?;
    }

    let segments = state.z.len() * adhesive.is_some() as usize;
    let ruptured_segments = if adhesive.is_some() { ruptured(&state.z) } else { 0 };
    let damaged_segments = if adhesive.is_some() {
        state.z.iter().filter(|&&a| a < 1.0).count()
    } else {
        0
    };
    let mut summary = RunSummary {
        step: choice,
        status,
        steps_done: state.k,
        final_time: state.t,
        ledger,
        first_rupture,
        segments,
        ruptured_segments,
        damaged_segments,
        snapshots,
        manifest: Manifest::new(),
    };
    finish_manifest(&mut manifest, &summary);
    if let Some(d) = out {
        manifest.write(&d.join("manifest.txt")).map_err(|e| SimError::io(d, e))?;
    }
    summary.manifest = manifest;
    Ok(summary)
}

pub fn run(sim: &Simulation, options: &RunOptions) -> Result<RunSummary, SimError> {
    run_with(sim, options, |_, _| ControlFlow::Continue(()))
}

fn base_manifest(sim: &Simulation, choice: &StepChoice, n_steps: u64) -> Manifest {
    let cfg = &sim.config;
    let mut m = Manifest::new();
    let d = cfg.domain;
    m.set("lx", d.lx);
    m.set("ly", d.ly);
    m.set("nx", d.nx);
    m.set("ny", d.ny);
    m.set("h", d.h());
    m.set("bulk_modulus", cfg.material.bulk_modulus);
    m.set("shear_modulus", cfg.material.shear_modulus);
    m.set("density", cfg.material.density);
    let (vp, vs) = leapfrog_core::elastic2d::wave_speeds(&sim.layout().material);
    m.set("p_wave_speed", vp);
    m.set("s_wave_speed", vs);
    match &cfg.process {
        crate::config::ProcessConfig::Null => m.set("process", "null"),
        crate::config::ProcessConfig::Viscoplastic {
            yield_stress,
            viscosity,
            hardening,
        } => {
            m.set("process", "viscoplastic");
            m.set("yield_stress", yield_stress);
            m.set("viscosity", viscosity);
            m.set("hardening", hardening);
        }
        crate::config::ProcessConfig::Adhesive {
            toughness,
            viscosity,
            healing,
            reading,
            band_fraction,
            band_stiffness,
        } => {
            m.set("process", "adhesive");
            m.set("toughness", toughness);
            m.set("adhesive_viscosity", viscosity);
            m.set("healing", healing);
            m.set("threshold_reading", format!("{reading:?}").to_lowercase());
            m.set("band_fraction", band_fraction);
            m.set("band_stiffness", format!("{band_stiffness:?}"));
            if let Some(b) = sim.layout().band {
                m.set("band_first_segment", b.first);
                m.set("band_segments", b.count);
            }
        }
    }
    m.set("loading", cfg.loading.tag());
    match cfg.loading {
        crate::config::LoadingConfig::RampNormal { amplitude, side }
        | crate::config::LoadingConfig::RampTangential { amplitude, side } => {
            m.set("load_amplitude", amplitude);
            m.set("load_side", format!("{side:?}").to_lowercase());
        }
        _ => {}
    }
    m.set("duration", cfg.time.duration);
    m.set("tau", choice.tau);
    if let Some(f) = cfg.time.cfl_factor {
        m.set("cfl_factor", f);
    }
    m.set("eta", cfg.time.eta);
    m.set("allow_unstable", cfg.time.allow_unstable);
    m.set("seed", cfg.time.seed);
    match choice.estimate {
        Some(e) => {
            m.set("tau_max", e.tau_max);
            m.set("tau_critical", e.tau_critical);
            m.set("a_min", e.a_min(choice.tau));
            m.set("estimate_iterations", e.iterations);
        }
        None => m.set("tau_max", "unavailable"),
    }
    m.set("steps_planned", n_steps);
    m
}

fn finish_manifest(m: &mut Manifest, s: &RunSummary) {
    match &s.status {
        RunStatus::Completed => m.set("status", "completed"),
        RunStatus::Stopped => m.set("status", "stopped"),
        RunStatus::BlowUp { step, field, magnitude } => {
            m.set("status", "blow_up");
            m.set("failed_step", step);
            m.set("failed_field", field);
            m.set("failed_magnitude", magnitude);
        }
    }
    m.set("steps_done", s.steps_done);
    m.set("final_time", s.final_time);
    if let Some(last) = s.ledger.last() {
        m.set("final_twisted_kinetic", last.twisted_kinetic);
        m.set("final_stored", last.stored);
        m.set("final_dissipated", last.dissipated_cum);
        m.set("final_work", last.work_cum);
        m.set("max_relative_imbalance", s.max_relative_imbalance());
        m.set("min_a_coeff", s.min_a_coeff());
    }
    if s.segments > 0 {
        m.set("segments", s.segments);
        m.set("ruptured_segments", s.ruptured_segments);
        m.set("damaged_segments", s.damaged_segments);
        m.set(
            "first_rupture_time",
            s.first_rupture.map_or("none".to_string(), |t| t.to_string()),
        );
    }
    let snaps: Vec<String> = s.snapshots.iter().map(|(k, _)| k.to_string()).collect();
    m.set("snapshot_steps", snaps.join(","));
}
