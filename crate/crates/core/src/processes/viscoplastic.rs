//! Viscoplastic creep with isotropic hardening.
//!
//! Per node: `Φ = w(½σ·C⁻¹σ - σ·π + ½π·(C + C₂)π)` and
//! `Ψ(ṗ) = w(σ_Y |dev ṗ| + ½D |ṗ|²)`. Without hardening the plastic strain is kept
//! trace-free. Tensors are stored in Voigt form; `π` uses engineering shear.

use alloc::format;

use crate::elastic2d::{ElasticLayout, Elasticity};
use crate::math;
use crate::process::InternalProcess;
use crate::{Error, Result};

use super::{check_stress_len, segment_energy_density, segment_gradient};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ViscoplasticParams {
    pub yield_stress: f64,
    pub viscosity: f64,
    pub hardening: f64,
}

impl ViscoplasticParams {
    pub fn validate(&self) -> Result<()> {
        let nonneg = |x: f64| x >= 0.0 && x.is_finite();
        if !(nonneg(self.yield_stress) && nonneg(self.viscosity) && nonneg(self.hardening)) {
            return Err(Error::Config(format!("viscoplastic parameters must be non-negative: {self:?}")));
        }
        if self.yield_stress > 0.0 && self.viscosity == 0.0 {
            return Err(Error::Config(
                "a positive yield stress needs a positive viscosity (rate-independent plasticity is not supported)".into(),
            ));
        }
        Ok(())
    }
}

/// Tensor norm of an engineering-shear strain vector.
#[inline]
fn strain_norm(e: [f64; 3]) -> f64 {
    math::sqrt(e[0] * e[0] + e[1] * e[1] + 0.5 * e[2] * e[2])
}

/// `(C + C₂)π`, a stress vector.
#[inline]
fn hardened_stress(c: &Elasticity, params: &ViscoplasticParams, pi: [f64; 3]) -> [f64; 3] {
    let s = c.stress(pi);
    let c2 = params.hardening;
    [s[0] + c2 * pi[0], s[1] + c2 * pi[1], s[2] + 0.5 * c2 * pi[2]]
}

/// Energy per unit weight at one node.
pub fn plastic_energy(c: &Elasticity, params: &ViscoplasticParams, sigma: [f64; 3], pi: [f64; 3]) -> f64 {
    let e = c.strain(sigma);
    let hp = hardened_stress(c, params, pi);
    let dot = |a: [f64; 3], b: [f64; 3]| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    0.5 * dot(sigma, e) - dot(sigma, pi) + 0.5 * dot(hp, pi)
}

/// `∂Φ/∂π` per unit weight: `(C + C₂)π - σ`.
pub fn plastic_energy_gradient(c: &Elasticity, params: &ViscoplasticParams, sigma: [f64; 3], pi: [f64; 3]) -> [f64; 3] {
    let hp = hardened_stress(c, params, pi);
    [hp[0] - sigma[0], hp[1] - sigma[1], hp[2] - sigma[2]]
}

/// `Ψ` per unit weight; `+∞` for a rate with a trace when there is no hardening.
pub fn plastic_dissipation_potential(params: &ViscoplasticParams, rate: [f64; 3]) -> f64 {
    let mean = 0.5 * (rate[0] + rate[1]);
    let norm = strain_norm(rate);
    if params.hardening == 0.0 && mean.abs() > 1e-12 * (norm + f64::MIN_POSITIVE) {
        return f64::INFINITY;
    }
    let dev = [rate[0] - mean, rate[1] - mean, rate[2]];
    params.yield_stress * strain_norm(dev) + 0.5 * params.viscosity * norm * norm
}

/// Dissipation rate `σ_Y |dev ṗ| + D |ṗ|²` per unit weight.
fn dissipation_rate(params: &ViscoplasticParams, rate: [f64; 3]) -> f64 {
    let mean = 0.5 * (rate[0] + rate[1]);
    let dev = [rate[0] - mean, rate[1] - mean, rate[2]];
    let n = strain_norm(rate);
    params.yield_stress * strain_norm(dev) + params.viscosity * n * n
}

/// Local midpoint flow rule: returns `π_new` from `σ^{k+1}` and `π_old`.
///
/// With `r = σ - (C + C₂)π_old`, the deviatoric rate is the shrinkage
/// `max(|dev r| - σ_Y, 0)/(D + τm/2) · dev r/|dev r|`, `m = 2G + c₂`; the spherical
/// rate (only with hardening) is `sph r/(D + τ m_s/2)`, `m_s = 2λ + 2G + c₂`.
pub fn viscoplastic_flow_rule(
    c: &Elasticity,
    params: &ViscoplasticParams,
    sigma: [f64; 3],
    pi_old: [f64; 3],
    tau: f64,
) -> [f64; 3] {
    let hp = hardened_stress(c, params, pi_old);
    let r = [sigma[0] - hp[0], sigma[1] - hp[1], sigma[2] - hp[2]];
    let mean = 0.5 * (r[0] + r[1]);
    // stress-like deviator; its tensor norm counts the shear twice
    let q = [r[0] - mean, r[1] - mean, r[2]];
    let q_norm = math::sqrt(q[0] * q[0] + q[1] * q[1] + 2.0 * q[2] * q[2]);
    let m = 2.0 * c.shear + params.hardening;
    let big_m = params.viscosity + 0.5 * tau * m;
    let mut rate = [0.0; 3];
    if q_norm > params.yield_stress && big_m > 0.0 {
        let f = (q_norm - params.yield_stress) / (big_m * q_norm);
        rate = [f * q[0], f * q[1], 2.0 * f * q[2]];
    }
    if params.hardening > 0.0 {
        let ms = 2.0 * c.lambda + 2.0 * c.shear + params.hardening;
        let s = mean / (params.viscosity + 0.5 * tau * ms);
        rate[0] += s;
        rate[1] += s;
    }
    [pi_old[0] + tau * rate[0], pi_old[1] + tau * rate[1], pi_old[2] + tau * rate[2]]
}

/// Viscoplastic process with the plastic strain collocated at the stress nodes.
#[derive(Debug, Clone)]
pub struct ViscoplasticProcess {
    layout: ElasticLayout,
    params: ViscoplasticParams,
}

impl ViscoplasticProcess {
    pub fn new(layout: ElasticLayout, params: ViscoplasticParams) -> Result<Self> {
        params.validate()?;
        Ok(Self { layout, params })
    }

    pub fn params(&self) -> &ViscoplasticParams {
        &self.params
    }

    fn node_count(&self) -> usize {
        self.layout.grid.node_count()
    }

    #[inline]
    fn weight(&self, n: usize) -> f64 {
        let g = &self.layout.grid;
        g.node_weight(n % (g.nx + 1), n / (g.nx + 1))
    }
}

#[inline]
fn triple(v: &[f64], n: usize) -> [f64; 3] {
    [v[3 * n], v[3 * n + 1], v[3 * n + 2]]
}

impl InternalProcess for ViscoplasticProcess {
    fn stress_len(&self) -> usize {
        self.layout.stress_len()
    }

    fn internal_len(&self) -> usize {
        3 * self.node_count()
    }

    fn phi(&self, sigma: &[f64], z: &[f64]) -> f64 {
        check_stress_len(&self.layout, sigma);
        let c = self.layout.elasticity();
        let bulk = math::pairwise_sum(self.node_count(), &|n| {
            self.weight(n) * plastic_energy(c, &self.params, triple(sigma, n), triple(z, n))
        });
        let h = self.layout.grid.h;
        let seg: f64 = (0..self.layout.segment_count())
            .map(|k| h * segment_energy_density(&self.layout, sigma, k))
            .sum();
        bulk + seg
    }

    fn phi_sigma_prime(&self, sigma: &[f64], z: &[f64], out: &mut [f64]) {
        let c = self.layout.elasticity();
        for n in 0..self.node_count() {
            let w = self.weight(n);
            let e = c.strain(triple(sigma, n));
            for a in 0..3 {
                out[3 * n + a] = w * (e[a] - z[3 * n + a]);
            }
        }
        segment_gradient(&self.layout, sigma, |_| 1.0, out);
    }

    fn phi_z_prime(&self, sigma: &[f64], z: &[f64], out: &mut [f64]) {
        let c = self.layout.elasticity();
        for n in 0..self.node_count() {
            let w = self.weight(n);
            let g = plastic_energy_gradient(c, &self.params, triple(sigma, n), triple(z, n));
            for a in 0..3 {
                out[3 * n + a] = w * g[a];
            }
        }
    }

    fn dissipation_potential(&self, _z: &[f64], z_rate: &[f64]) -> f64 {
        math::pairwise_sum(self.node_count(), &|n| {
            self.weight(n) * plastic_dissipation_potential(&self.params, triple(z_rate, n))
        })
    }

    fn solve_flow_rule(&self, sigma: &[f64], z_old: &[f64], tau: f64, z_new: &mut [f64]) -> Result<()> {
        let c = self.layout.elasticity();
        for n in 0..self.node_count() {
            let p = viscoplastic_flow_rule(c, &self.params, triple(sigma, n), triple(z_old, n), tau);
            z_new[3 * n..3 * n + 3].copy_from_slice(&p);
        }
        Ok(())
    }

    fn dissipation_increment(&self, _sigma: &[f64], z_old: &[f64], z_new: &[f64], tau: f64) -> f64 {
        let inv = 1.0 / tau;
        tau * math::pairwise_sum(self.node_count(), &|n| {
            let rate = [
                (z_new[3 * n] - z_old[3 * n]) * inv,
                (z_new[3 * n + 1] - z_old[3 * n + 1]) * inv,
                (z_new[3 * n + 2] - z_old[3 * n + 2]) * inv,
            ];
            self.weight(n) * dissipation_rate(&self.params, rate)
        })
    }

    fn stiffest_state(&self, z: &mut [f64]) {
        z.iter_mut().for_each(|x| *x = 0.0);
    }
}
