//! Preset experiments and their compilation into operators, process and loads.

use leapfrog_core::elastic2d::{
    AdhesiveBand, BoundarySpec, Elastic2d, ElasticLayout, Grid2D, MaterialParams, Side, TractionPatch,
};
use leapfrog_core::processes::{
    AdhesiveParams, AdhesiveProcess, NullProcess, ThresholdReading, ViscoplasticParams, ViscoplasticProcess,
};
use leapfrog_core::{
    estimate_tau_max, CflEstimate, DofVector, InternalProcess, EstimatorConfig, SeparableLoad, SpaceTag,
    StaggeredState, SystemOps, TimeProfile,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::*;
use crate::SimError;

/// Snapshot times of the delamination figures.
pub const REFERENCE_SNAPSHOTS: [f64; 5] = [20.2073, 21.6506, 23.094, 23.8197, 24.630];
pub const REFERENCE_TAU: f64 = 0.0144;

fn delamination(n: usize, loading: LoadingConfig) -> ScenarioConfig {
    ScenarioConfig {
        domain: DomainConfig {
            lx: 10.0,
            ly: 10.0,
            nx: n,
            ny: n,
        },
        material: MaterialConfig {
            bulk_modulus: 1.66,
            shear_modulus: 1.0,
            density: 1.0,
        },
        process: ProcessConfig::Adhesive {
            toughness: 2.57e-5,
            viscosity: 0.0,
            healing: false,
            reading: Reading::Activation,
            band_fraction: 0.1,
            band_stiffness: [[0.5, 0.0], [0.0, 0.5]],
        },
        loading,
        time: TimeConfig {
            duration: 51.0,
            tau: Some(REFERENCE_TAU),
            cfl_factor: None,
            eta: leapfrog_core::DEFAULT_ETA,
            // 0.0144 lies between τ_max(η = 0.1) and the critical step at this grid
            allow_unstable: true,
            seed: 0,
        },
        output: OutputConfig {
            snapshots: REFERENCE_SNAPSHOTS.to_vec(),
            ..OutputConfig::default()
        },
    }
}

/// Opening-dominated delamination: a slowly growing normal pull on the top side of
/// a square glued along the middle of its bottom side.
pub fn mode_i() -> ScenarioConfig {
    delamination(
        400,
        LoadingConfig::RampNormal {
            amplitude: 0.005,
            side: SideName::Top,
        },
    )
}

/// As [`mode_i`] with the top traction tangential.
pub fn mode_ii() -> ScenarioConfig {
    delamination(
        400,
        LoadingConfig::RampTangential {
            amplitude: 0.005,
            side: SideName::Top,
        },
    )
}

/// Coarse variant (`h = 0.1`) with the step taken from the stability estimate.
pub fn desk(mut cfg: ScenarioConfig) -> ScenarioConfig {
    cfg.domain.nx = 100;
    cfg.domain.ny = 100;
    cfg.time.tau = None;
    cfg.time.cfl_factor = Some(0.9);
    cfg.time.allow_unstable = false;
    cfg
}

/// Elastic square at rest with no loads.
pub fn quiescent(n: usize) -> ScenarioConfig {
    let mut cfg = desk(mode_i());
    cfg.domain.nx = n;
    cfg.domain.ny = n;
    cfg.process = ProcessConfig::Null;
    cfg.loading = LoadingConfig::None;
    cfg.time.duration = 10.0;
    cfg.output.snapshots.clear();
    cfg
}

/// Named presets for the command line.
pub fn preset(name: &str) -> Option<ScenarioConfig> {
    Some(match name {
        "mode_i" => mode_i(),
        "mode_ii" => mode_ii(),
        "mode_i_desk" => desk(mode_i()),
        "mode_ii_desk" => desk(mode_ii()),
        "quiescent" => quiescent(50),
        _ => return None,
    })
}

pub const PRESETS: [&str; 5] = ["mode_i", "mode_ii", "mode_i_desk", "mode_ii_desk", "quiescent"];

/// Elastic runs of a smooth velocity pulse on grids `h, h/2, h/4, …` with the step
/// proportional to `h`. The coarsest grid is 32×32 on `(0, 10)²`.
pub fn convergence_study(levels: usize) -> Result<Vec<ScenarioConfig>, SimError> {
    if levels < 3 {
        return Err(SimError::Config(format!("a convergence study needs at least 3 levels, got {levels}")));
    }
    let base = quiescent(32);
    // τ/h = 0.32, a bit over half of h/v_p
    let tau0 = 0.1;
    Ok((0..levels)
        .map(|l| {
            let mut cfg = base.clone();
            let n = 32 << l;
            cfg.domain.nx = n;
            cfg.domain.ny = n;
            cfg.loading = LoadingConfig::Pulse {
                center: [5.0, 5.0],
                width: 1.0,
                amplitude: [0.6, 0.8],
            };
            cfg.time.duration = 2.0;
            cfg.time.tau = Some(tau0 / (1 << l) as f64);
            cfg.time.cfl_factor = None;
            cfg
        })
        .collect())
}

/// The internal process of a scenario.
#[derive(Debug, Clone)]
pub enum Process {
    Null(NullProcess),
    Viscoplastic(ViscoplasticProcess),
    Adhesive(AdhesiveProcess),
}

impl Process {
    pub fn as_dyn(&self) -> &dyn InternalProcess {
        match self {
            Process::Null(p) => p,
            Process::Viscoplastic(p) => p,
            Process::Adhesive(p) => p,
        }
    }

    pub fn adhesive(&self) -> Option<&AdhesiveProcess> {
        match self {
            Process::Adhesive(p) => Some(p),
            _ => None,
        }
    }
}

/// A scenario compiled into solver objects.
#[derive(Debug)]
pub struct Simulation {
    pub config: ScenarioConfig,
    pub ops: Elastic2d,
    pub process: Process,
    pub load: SeparableLoad,
    pub v0: Vec<f64>,
}

/// Step size chosen for a run.
#[derive(Debug, Clone, Copy)]
pub struct StepChoice {
    pub tau: f64,
    pub estimate: Option<CflEstimate>,
}

impl Simulation {
    pub fn new(config: &ScenarioConfig) -> Result<Self, SimError> {
        config.validate()?;
        let d = config.domain;
        let grid = Grid2D::new(d.nx, d.ny, d.h())?;
        let m = config.material;
        let material = MaterialParams::new(m.bulk_modulus, m.shear_modulus, m.density)?;
        let band = match config.process {
            ProcessConfig::Adhesive {
                band_fraction,
                band_stiffness,
                ..
            } => Some(AdhesiveBand::centered(&grid, band_fraction, band_stiffness)?),
            _ => None,
        };
        let ramp = |amplitude: f64| TimeProfile::ramp(amplitude / config.time.duration);
        let tractions = match config.loading {
            LoadingConfig::RampNormal { amplitude, side } => {
                let side = Side::from(side);
                vec![TractionPatch::whole_side(&grid, side, side.normal(), ramp(amplitude))]
            }
            LoadingConfig::RampTangential { amplitude, side } => {
                let side = Side::from(side);
                vec![TractionPatch::whole_side(&grid, side, side.tangent(), ramp(amplitude))]
            }
            _ => Vec::new(),
        };
        let boundary = BoundarySpec {
            adhesive: band,
            tractions,
        };
        boundary.validate(&grid)?;
        let layout = ElasticLayout::new(grid, material, band)?;
        let ops = Elastic2d::new(layout.clone());
        // The last step may end up to one τ past the final time; the profiles just
        // continue there instead of being clamped.
        let load = boundary.load_program(&grid, f64::INFINITY);
        let process = match config.process {
            ProcessConfig::Null => Process::Null(NullProcess::new(layout)),
            ProcessConfig::Viscoplastic {
                yield_stress,
                viscosity,
                hardening,
            } => Process::Viscoplastic(ViscoplasticProcess::new(
                layout,
                ViscoplasticParams {
                    yield_stress,
                    viscosity,
                    hardening,
                },
            )?),
            ProcessConfig::Adhesive {
                toughness,
                viscosity,
                healing,
                reading,
                ..
            } => Process::Adhesive(AdhesiveProcess::new(
                layout,
                AdhesiveParams {
                    toughness,
                    viscosity,
                    healing,
                    reading: match reading {
                        Reading::Activation => ThresholdReading::Activation,
                        Reading::Literal => ThresholdReading::Literal,
                    },
                },
            )?),
        };
        let v0 = initial_velocity(config, &grid);
        Ok(Self {
            config: config.clone(),
            ops,
            process,
            load,
            v0,
        })
    }

    pub fn grid(&self) -> &Grid2D {
        self.ops.grid()
    }

    pub fn layout(&self) -> &ElasticLayout {
        self.ops.layout()
    }

    pub fn estimate(&self) -> Result<CflEstimate, SimError> {
        let cfg = EstimatorConfig {
            seed: self.config.time.seed,
            ..EstimatorConfig::default()
        };
        Ok(estimate_tau_max(&self.ops, self.process.as_dyn(), self.config.time.eta, &cfg)?)
    }

    /// Resolves the step: `cfl_factor · τ_max`, or the explicit `tau` checked against
    /// `τ_max` unless `allow_unstable` is set.
    pub fn choose_step(&self) -> Result<StepChoice, SimError> {
        let t = &self.config.time;
        match (t.tau, t.cfl_factor) {
            (_, Some(f)) => {
                let est = self.estimate()?;
                Ok(StepChoice {
                    tau: f * est.tau_max,
                    estimate: Some(est),
                })
            }
            (Some(tau), None) => {
                let estimate = match self.estimate() {
                    Ok(e) => Some(e),
                    Err(e) if t.allow_unstable => {
                        log::warn!("stability estimate unavailable: {e}");
                        None
                    }
                    Err(e) => return Err(e),
                };
                if let Some(est) = estimate {
                    if tau > est.tau_max && !t.allow_unstable {
                        return Err(SimError::Config(format!(
                            "tau = {tau} exceeds tau_max = {} (eta = {}); set allow_unstable to run anyway",
                            est.tau_max, est.eta
                        )));
                    }
                }
                Ok(StepChoice { tau, estimate })
            }
            (None, None) => unreachable!("validated"),
        }
    }

    /// Number of steps needed to cover the final time; the last one may end past it.
    pub fn steps(&self, tau: f64) -> u64 {
        (self.config.time.duration / tau - 1e-9).ceil() as u64
    }

    /// State before the first step.
    pub fn initial_state(&self, tau: f64) -> Result<StaggeredState, SimError> {
        let rest = StaggeredState::at_rest(&self.ops, self.process.as_dyn());
        Ok(StaggeredState::start(
            &self.ops,
            &self.load,
            tau,
            rest.sigma,
            DofVector::from_vec(SpaceTag::H, self.v0.clone()),
            rest.z,
            DofVector::zeros(SpaceTag::H, self.ops.velocity_len()),
        )?)
    }
}

fn initial_velocity(config: &ScenarioConfig, grid: &Grid2D) -> Vec<f64> {
    let mut v = vec![0.0; 2 * grid.cell_count()];
    match config.loading {
        LoadingConfig::Pulse {
            center,
            width,
            amplitude,
        } => {
            for j in 0..grid.ny {
                for i in 0..grid.nx {
                    let [x, y] = grid.cell_center(i, j);
                    let r2 = (x - center[0]).powi(2) + (y - center[1]).powi(2);
                    let g = (-r2 / (width * width)).exp();
                    let c = grid.cell_index(i, j);
                    v[2 * c] = amplitude[0] * g;
                    v[2 * c + 1] = amplitude[1] * g;
                }
            }
        }
        LoadingConfig::Translation { velocity } => {
            for c in v.chunks_exact_mut(2) {
                c.copy_from_slice(&velocity);
            }
        }
        LoadingConfig::RandomVelocity { amplitude } => {
            let mut rng = ChaCha8Rng::seed_from_u64(config.time.seed);
            v.iter_mut().for_each(|x| *x = amplitude * rng.gen_range(-1.0..=1.0));
        }
        _ => {}
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_resolution_setup() {
        let cfg = mode_i();
        assert_eq!((cfg.domain.nx, cfg.domain.ny), (400, 400));
        assert_eq!(cfg.domain.h(), 0.025);
        assert_eq!(cfg.time.tau, Some(0.0144));
        assert_eq!(cfg.time.duration, 51.0);
        for t in REFERENCE_SNAPSHOTS {
            assert!(cfg.output.snapshots.contains(&t));
        }
        assert!(mode_ii().output.snapshots.contains(&21.6506));
        let sim = Simulation::new(&cfg).unwrap();
        assert_eq!(sim.layout().segment_count(), 40);
        let band = sim.layout().band.unwrap();
        assert_eq!((band.first, band.count), (180, 40));
        assert_eq!(sim.steps(REFERENCE_TAU), 3542);
    }

    #[test]
    fn desk_preset() {
        let sim = Simulation::new(&desk(mode_i())).unwrap();
        assert_eq!(sim.grid().nx, 100);
        assert_eq!(sim.grid().h, 0.1);
        assert_eq!(sim.layout().segment_count(), 10);
    }

    #[test]
    fn convergence_levels() {
        assert!(matches!(convergence_study(1), Err(SimError::Config(_))));
        assert!(convergence_study(2).is_err());
        let levels = convergence_study(4).unwrap();
        let n: Vec<usize> = levels.iter().map(|c| c.domain.nx).collect();
        assert_eq!(n, [32, 64, 128, 256]);
        let ratio: Vec<f64> = levels.iter().map(|c| c.time.tau.unwrap() / c.domain.h()).collect();
        assert!(ratio.iter().all(|r| (r - ratio[0]).abs() < 1e-12));
    }

    #[test]
    fn ramp_reaches_amplitude_at_final_time() {
        use leapfrog_core::LoadProgram;
        let mut cfg = quiescent(4);
        cfg.loading = LoadingConfig::RampNormal {
            amplitude: 0.5,
            side: SideName::Top,
        };
        let sim = Simulation::new(&cfg).unwrap();
        let mut f = vec![0.0; sim.ops.velocity_len()];
        sim.load.force(cfg.time.duration, &mut f);
        let h = cfg.domain.h();
        // top row of cells pulled upwards with h·g
        for i in 0..4 {
            let c = sim.grid().cell_index(i, 3);
            assert_eq!(f[2 * c], 0.0);
            assert!((f[2 * c + 1] - 0.5 * h).abs() < 1e-15);
        }
        assert_eq!(f.iter().filter(|x| **x != 0.0).count(), 4);
    }

    #[test]
    fn initial_data() {
        let mut cfg = quiescent(6);
        cfg.loading = LoadingConfig::Translation { velocity: [0.3, -0.1] };
        let sim = Simulation::new(&cfg).unwrap();
        assert!(sim.v0.chunks(2).all(|c| c == [0.3, -0.1]));
        cfg.loading = LoadingConfig::RandomVelocity { amplitude: 2.0 };
        let a = Simulation::new(&cfg).unwrap().v0;
        assert_eq!(a, Simulation::new(&cfg).unwrap().v0);
        assert!(a.iter().all(|v| v.abs() <= 2.0));
        cfg.time.seed = 1;
        assert_ne!(a, Simulation::new(&cfg).unwrap().v0);
    }

    #[test]
    fn step_choice() {
        let sim = Simulation::new(&quiescent(10)).unwrap();
        let c = sim.choose_step().unwrap();
        let est = c.estimate.unwrap();
        assert!((c.tau - 0.9 * est.tau_max).abs() < 1e-15);
        let mut cfg = quiescent(10);
        cfg.time.cfl_factor = None;
        cfg.time.tau = Some(1.01 * est.tau_max);
        assert!(matches!(Simulation::new(&cfg).unwrap().choose_step(), Err(SimError::Config(_))));
        cfg.time.allow_unstable = true;
        assert!(Simulation::new(&cfg).unwrap().choose_step().is_ok());
    }
}
