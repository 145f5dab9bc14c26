//! Adhesive delamination on the bonded band.
//!
//! Per segment of length `h`: `Φ = h(½α ς·𝔹⁻¹ς + φ(α))` with `α ∈ [0, 1]`, and
//! `Ψ(α̇) = h ε₁ α̇²` for `α̇ ≤ 0`. Without healing a positive rate is forbidden; with
//! healing it costs `h α̇²/ε₁`.

use alloc::format;

use crate::elastic2d::ElasticLayout;
use crate::process::InternalProcess;
use crate::{Error, Result};

use super::{segment_energy_density, segment_gradient};

/// How the toughness `𝔤` enters the stored energy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ThresholdReading {
    /// `φ(α) = 𝔤(1-α)`: debonding costs `𝔤` per unit length, so damage starts once
    /// `½ς·𝔹⁻¹ς > 𝔤`.
    #[default]
    Activation,
    /// `φ(α) = 𝔤α` taken literally: the driving force is `½ς·𝔹⁻¹ς + 𝔤 > 0`, so any
    /// loaded segment debonds at once when `ε₁ = 0`.
    Literal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdhesiveParams {
    pub toughness: f64,
    pub viscosity: f64,
    pub healing: bool,
    pub reading: ThresholdReading,
}

impl AdhesiveParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.toughness >= 0.0 && self.toughness.is_finite()) {
            return Err(Error::Config(format!("fracture toughness must be non-negative, got {}", self.toughness)));
        }
        if !(self.viscosity >= 0.0 && self.viscosity.is_finite()) {
            return Err(Error::Config(format!("adhesive viscosity must be non-negative, got {}", self.viscosity)));
        }
        if self.healing && self.viscosity == 0.0 {
            return Err(Error::Config("healing needs a positive adhesive viscosity".into()));
        }
        Ok(())
    }

    /// `∂Φ/∂α` per unit length for an elastic energy density `e = ½ς·𝔹⁻¹ς`.
    #[inline]
    pub fn driving_force(&self, energy_density: f64) -> f64 {
        match self.reading {
            ThresholdReading::Activation => energy_density - self.toughness,
            ThresholdReading::Literal => energy_density + self.toughness,
        }
    }

    #[inline]
    fn phi_alpha(&self, alpha: f64) -> f64 {
        match self.reading {
            ThresholdReading::Activation => self.toughness * (1.0 - alpha),
            ThresholdReading::Literal => self.toughness * alpha,
        }
    }

    /// `Ψ` per unit length.
    pub fn dissipation_potential(&self, rate: f64) -> f64 {
        if rate <= 0.0 {
            self.viscosity * rate * rate
        } else if self.healing {
            rate * rate / self.viscosity
        } else {
            f64::INFINITY
        }
    }
}

/// Local flow rule for one segment with driving force `d` (see
/// [`AdhesiveParams::driving_force`]). `Φ` is affine in `α`, so the midpoint rule
/// sees the constant slope `d`.
pub fn adhesive_flow_rule(params: &AdhesiveParams, d: f64, alpha_old: f64, tau: f64) -> f64 {
    if d > 0.0 {
        if params.viscosity == 0.0 {
            0.0
        } else {
            (alpha_old - tau * d / (2.0 * params.viscosity)).clamp(0.0, alpha_old)
        }
    } else if d < 0.0 && params.healing {
        (alpha_old - 0.5 * tau * d * params.viscosity).clamp(alpha_old, 1.0)
    } else {
        alpha_old
    }
}

#[derive(Debug, Clone)]
pub struct AdhesiveProcess {
    layout: ElasticLayout,
    params: AdhesiveParams,
}

impl AdhesiveProcess {
    pub fn new(layout: ElasticLayout, params: AdhesiveParams) -> Result<Self> {
        params.validate()?;
        if layout.band.is_none() {
            return Err(Error::Config("adhesive process needs an adhesive band".into()));
        }
        Ok(Self { layout, params })
    }

    pub fn params(&self) -> &AdhesiveParams {
        &self.params
    }

    fn segments(&self) -> usize {
        self.layout.segment_count()
    }

    /// `(ςx, ςy)` of segment `k`.
    pub fn segment_stress(&self, sigma: &[f64], k: usize) -> [f64; 2] {
        super::segment_stress(&self.layout, sigma, k)
    }
}

impl InternalProcess for AdhesiveProcess {
    fn stress_len(&self) -> usize {
        self.layout.stress_len()
    }

    fn internal_len(&self) -> usize {
        self.segments()
    }

    fn phi(&self, sigma: &[f64], z: &[f64]) -> f64 {
        let h = self.layout.grid.h;
        let seg: f64 = (0..self.segments())
            .map(|k| h * (z[k] * segment_energy_density(&self.layout, sigma, k) + self.params.phi_alpha(z[k])))
            .sum();
        self.layout.bulk_energy(sigma) + seg
    }

    fn phi_sigma_prime(&self, sigma: &[f64], z: &[f64], out: &mut [f64]) {
        self.layout.bulk_energy_gradient(sigma, out);
        segment_gradient(&self.layout, sigma, |k| z[k], out);
    }

    fn phi_z_prime(&self, sigma: &[f64], _z: &[f64], out: &mut [f64]) {
        let h = self.layout.grid.h;
        for (k, o) in out.iter_mut().enumerate() {
            *o = h * self.params.driving_force(segment_energy_density(&self.layout, sigma, k));
        }
    }

    fn dissipation_potential(&self, _z: &[f64], z_rate: &[f64]) -> f64 {
        let h = self.layout.grid.h;
        z_rate.iter().map(|&r| h * self.params.dissipation_potential(r)).sum()
    }

    fn solve_flow_rule(&self, sigma: &[f64], z_old: &[f64], tau: f64, z_new: &mut [f64]) -> Result<()> {
        for k in 0..self.segments() {
            let d = self.params.driving_force(segment_energy_density(&self.layout, sigma, k));
            let a = z_old[k];
            if !(0.0..=1.0).contains(&a) {
                return Err(Error::Process {
                    step: 0,
                    reason: format!("adhesive variable {a} of segment {k} left [0, 1]"),
                });
            }
            z_new[k] = adhesive_flow_rule(&self.params, d, a, tau);
        }
        Ok(())
    }

    /// The released energy `Φ(Σ, α_old) - Φ(Σ, α_new)`. It equals `τΞ` when the rate
    /// is interior and bounds it from above when the constraint is active.
    fn dissipation_increment(&self, sigma: &[f64], z_old: &[f64], z_new: &[f64], _tau: f64) -> f64 {
        let h = self.layout.grid.h;
        (0..self.segments())
            .map(|k| {
                let d = self.params.driving_force(segment_energy_density(&self.layout, sigma, k));
                h * d * (z_old[k] - z_new[k])
            })
            .sum()
    }

    fn stiffest_state(&self, z: &mut [f64]) {
        z.iter_mut().for_each(|a| *a = 1.0);
    }
}

/// Count of segments with `α = 0`.
pub fn ruptured(z: &[f64]) -> usize {
    z.iter().filter(|&&a| a == 0.0).count()
}
