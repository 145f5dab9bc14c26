//! Zero-dimensional Maxwell relaxation: a single material point held at fixed total
//! shear strain while the plastic strain creeps, integrated with the same midpoint
//! flow rule the field solver uses.

use alloc::vec::Vec;

use crate::elastic2d::Elasticity;
use crate::math;
use crate::processes::{viscoplastic_flow_rule, ViscoplasticParams};

/// Shear stress history `σ_xy(t_k)`, `t_k = kτ`, for total engineering shear strain
/// `gamma` applied at `t = 0`.
pub fn maxwell_relaxation(c: &Elasticity, params: &ViscoplasticParams, gamma: f64, tau: f64, t_end: f64) -> Vec<(f64, f64)> {
    let steps = libm::round(t_end / tau) as usize;
    let mut pi = [0.0; 3];
    let mut out = Vec::with_capacity(steps + 1);
    let stress = |pi: [f64; 3]| c.shear * (gamma - pi[2]);
    out.push((0.0, stress(pi)));
    for k in 1..=steps {
        // proto-stress of the frozen total strain
        let sigma = c.stress([0.0, 0.0, gamma]);
        pi = viscoplastic_flow_rule(c, params, sigma, pi, tau);
        out.push((k as f64 * tau, stress(pi)));
    }
    out
}

/// Exact shear stress `G γ exp(-2Gt/D)` of the viscous (`σ_Y = 0`, no hardening) case.
pub fn maxwell_exact(c: &Elasticity, params: &ViscoplasticParams, gamma: f64, t: f64) -> f64 {
    c.shear * gamma * math::exp(-2.0 * c.shear * t / params.viscosity)
}

/// Maximum error against [`maxwell_exact`] over the history.
pub fn maxwell_error(c: &Elasticity, params: &ViscoplasticParams, gamma: f64, tau: f64, t_end: f64) -> f64 {
    maxwell_relaxation(c, params, gamma, tau, t_end)
        .iter()
        .map(|&(t, s)| (s - maxwell_exact(c, params, gamma, t)).abs())
        .fold(0.0, f64::max)
}

/// Observed order `log2(e(τ)/e(τ/2))`.
pub fn maxwell_order(c: &Elasticity, params: &ViscoplasticParams, gamma: f64, tau: f64, t_end: f64) -> (f64, f64, f64) {
    let e1 = maxwell_error(c, params, gamma, tau, t_end);
    let e2 = maxwell_error(c, params, gamma, 0.5 * tau, t_end);
    (e1, e2, math::ln(e1 / e2) / core::f64::consts::LN_2)
}
