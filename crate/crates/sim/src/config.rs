//! Scenario files: TOML with the sections `[domain]`, `[material]`, `[process]`,
//! `[loading]`, `[time]` and `[output]`. Unknown keys are rejected.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::SimError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub domain: DomainConfig,
    pub material: MaterialConfig,
    pub process: ProcessConfig,
    pub loading: LoadingConfig,
    pub time: TimeConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

/// Rectangle `(0, lx) × (0, ly)` cut into `nx × ny` square cells.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainConfig {
    pub lx: f64,
    pub ly: f64,
    pub nx: usize,
    pub ny: usize,
}

impl DomainConfig {
    pub fn h(&self) -> f64 {
        self.lx / self.nx as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialConfig {
    pub bulk_modulus: f64,
    pub shear_modulus: f64,
    pub density: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reading {
    #[default]
    Activation,
    Literal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProcessConfig {
    Null,
    Viscoplastic {
        yield_stress: f64,
        viscosity: f64,
        #[serde(default)]
        hardening: f64,
    },
    Adhesive {
        toughness: f64,
        /// Viscosity `ε₁` of the debonding rate; zero gives rate-independent rupture.
        #[serde(default)]
        viscosity: f64,
        #[serde(default)]
        healing: bool,
        #[serde(default)]
        reading: Reading,
        /// Fraction of the bottom side, centred, that is glued.
        band_fraction: f64,
        /// Adhesive stiffness `𝔹`, row-major.
        band_stiffness: [[f64; 2]; 2],
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SideName {
    Bottom,
    Right,
    Top,
    Left,
}

impl From<SideName> for leapfrog_core::elastic2d::Side {
    fn from(s: SideName) -> Self {
        use leapfrog_core::elastic2d::Side;
        match s {
            SideName::Bottom => Side::Bottom,
            SideName::Right => Side::Right,
            SideName::Top => Side::Top,
            SideName::Left => Side::Left,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LoadingConfig {
    /// Quiescent start, no loads.
    None,
    /// Traction `amplitude · t/T` along the outward normal of `side`.
    RampNormal { amplitude: f64, side: SideName },
    /// Traction `amplitude · t/T` along the counter-clockwise tangent of `side`.
    RampTangential { amplitude: f64, side: SideName },
    /// Initial velocity `amplitude · exp(-|x - center|²/width²)`, no loads.
    Pulse {
        center: [f64; 2],
        width: f64,
        amplitude: [f64; 2],
    },
    /// Uniform initial velocity, no loads.
    Translation { velocity: [f64; 2] },
    /// Independent uniform initial velocities in `[-amplitude, amplitude]`, drawn
    /// from the seed in `[time]`.
    RandomVelocity { amplitude: f64 },
}

impl LoadingConfig {
    pub fn tag(&self) -> &'static str {
        match self {
            LoadingConfig::None => "none",
            LoadingConfig::RampNormal { .. } => "ramp_normal",
            LoadingConfig::RampTangential { .. } => "ramp_tangential",
            LoadingConfig::Pulse { .. } => "pulse",
            LoadingConfig::Translation { .. } => "translation",
            LoadingConfig::RandomVelocity { .. } => "random_velocity",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    /// Final time `T`.
    pub duration: f64,
    /// Explicit step; exclusive with `cfl_factor`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    /// Step as a fraction of the estimated `τ_max`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cfl_factor: Option<f64>,
    #[serde(default = "default_eta")]
    pub eta: f64,
    /// Permits steps beyond `τ_max`.
    #[serde(default)]
    pub allow_unstable: bool,
    #[serde(default)]
    pub seed: u64,
}

fn default_eta() -> f64 {
    leapfrog_core::DEFAULT_ETA
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    #[serde(default)]
    pub snapshots: Vec<f64>,
    #[serde(default = "yes")]
    pub csv: bool,
    #[serde(default)]
    pub vti: bool,
    /// Write adhesive rows every this many steps, and on every step where some `α` changes.
    #[serde(default = "default_alpha_every")]
    pub alpha_every: u64,
}

fn yes() -> bool {
    true
}

fn default_alpha_every() -> u64 {
    10
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: None,
            snapshots: Vec::new(),
            csv: true,
            vti: false,
            alpha_every: default_alpha_every(),
        }
    }
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self, SimError> {
        let cfg: Self = toml::from_str(text).map_err(|e| SimError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, SimError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| SimError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario configs always serialise")
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |msg: String| Err(SimError::Config(msg));
        let d = &self.domain;
        if d.nx < 2 || d.ny < 2 {
            return bad(format!("grid needs at least 2x2 cells, got {}x{}", d.nx, d.ny));
        }
        if !(d.lx > 0.0 && d.ly > 0.0) {
            return bad(format!("domain lengths must be positive, got {} x {}", d.lx, d.ly));
        }
        let (hx, hy) = (d.lx / d.nx as f64, d.ly / d.ny as f64);
        if (hx - hy).abs() > 1e-9 * hx {
            return bad(format!("cells must be square: h_x = {hx}, h_y = {hy}"));
        }
        let t = &self.time;
        if !(t.duration > 0.0 && t.duration.is_finite()) {
            return bad(format!("duration must be positive, got {}", t.duration));
        }
        match (t.tau, t.cfl_factor) {
            (Some(_), Some(_)) => return bad("give either tau or cfl_factor, not both".into()),
            (None, None) => return bad("give tau or cfl_factor".into()),
            (Some(tau), None) if !(tau > 0.0 && tau.is_finite()) => return bad(format!("tau must be positive, got {tau}")),
            (None, Some(f)) if !(f > 0.0 && (f <= 1.0 || t.allow_unstable)) => {
                return bad(format!("cfl_factor must lie in (0, 1] without allow_unstable, got {f}"))
            }
            _ => {}
        }
        if !(t.eta > 0.0 && t.eta < 4.0) {
            return bad(format!("eta must lie in (0, 4), got {}", t.eta));
        }
        if let Some(s) = self.output.snapshots.iter().find(|s| !(**s >= 0.0 && **s <= t.duration)) {
            return bad(format!("snapshot time {s} outside [0, {}]", t.duration));
        }
        if self.output.alpha_every == 0 {
            return bad("alpha_every must be at least 1".into());
        }
        if let LoadingConfig::Pulse { width, .. } = self.loading {
            if !(width > 0.0) {
                return bad(format!("pulse width must be positive, got {width}"));
            }
        }
        Ok(())
    }
}
