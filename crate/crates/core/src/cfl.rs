//! Time-step bound from the discrete operator.
//!
//! The scheme stays energy-stable when `2Φ(Σ, z) ≥ τ²/(4-η) <E^*S, M⁻¹E^*S>` with
//! `S = C^* Φ'_Σ(Σ, z)` for all `Σ`. With `Φ(·, z)` quadratic the sharp constant is the
//! largest eigenvalue `μ` of `A = K Q`, `K = C E M⁻¹ E^* C^*`, `Q = Φ''_Σ`, taken at
//! the stiffest internal state, and `τ_max = sqrt((4-η)/μ)`.
//!
//! `A` is self-adjoint in the energy product `<x, y>_Q = <Qx, y>`, so Lanczos in that
//! product applies. Its largest Ritz value increases towards `μ` from below and
//! converges much faster than plain power iteration, which stalls on the clustered
//! top of the spectrum of fine grids.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::math;
use crate::ops::SystemOps;
use crate::process::InternalProcess;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorConfig {
    /// Relative accuracy of the eigenvalue estimate.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Seed of the random start vector.
    pub seed: u64,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        Self {
            tolerance: 1e-6,
            max_iterations: 3000,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CflEstimate {
    /// Largest stable step with margin `eta`.
    pub tau_max: f64,
    /// Stability limit without margin, `2/sqrt(μ)`.
    pub tau_critical: f64,
    pub eta: f64,
    /// Largest eigenvalue of the step operator.
    pub mu_max: f64,
    pub iterations: usize,
}

impl CflEstimate {
    /// Lower bound on the energy coefficient `a` at step `tau` (may be negative).
    pub fn a_min(&self, tau: f64) -> f64 {
        1.0 - tau * tau * self.mu_max / 4.0
    }
}

/// Ritz values must stay put over this many iterations before the estimate is accepted.
const STALL_WINDOW: usize = 8;

/// Estimates the largest admissible time step; see the module docs.
pub fn estimate_tau_max<O, P>(ops: &O, process: &P, eta: f64, config: &EstimatorConfig) -> Result<CflEstimate>
where
    O: SystemOps + ?Sized,
    P: InternalProcess + ?Sized,
{
    if !(eta > 0.0 && eta < 4.0) {
        return Err(Error::Config(alloc::format!("eta must lie in (0, 4), got {eta}")));
    }
    let ns = ops.stress_len();
    let nh = ops.velocity_len();
    let mut z = vec![0.0; process.internal_len()];
    process.stiffest_state(&mut z);
    let zero = vec![0.0; ns];
    let mut offset = vec![0.0; ns];
    process.phi_sigma_prime(&zero, &z, &mut offset);
    // Q x without the affine part of Φ'_Σ
    let apply_q = |x: &[f64], out: &mut [f64]| {
        process.phi_sigma_prime(x, &z, out);
        out.iter_mut().zip(&offset).for_each(|(o, c)| *o -= c);
    };

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut q: Vec<f64> = (0..ns).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mut qq = vec![0.0; ns];
    apply_q(&q, &mut qq);
    let norm2 = math::dot(&q, &qq);
    if !(norm2 > 0.0) {
        return Err(Error::Estimation {
            iterations: 0,
            bracket: (f64::NAN, norm2),
        });
    }
    let s = 1.0 / math::sqrt(norm2);
    q.iter_mut().for_each(|x| *x *= s);
    qq.iter_mut().for_each(|x| *x *= s);

    let mut q_prev = vec![0.0; ns];
    let mut w = vec![0.0; ns];
    let mut qw = vec![0.0; ns];
    let mut scratch = vec![0.0; ns];
    let mut strain = vec![0.0; ns];
    let mut force = vec![0.0; nh];
    let mut accel = vec![0.0; nh];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut ritz: Vec<f64> = Vec::new();

    for it in 1..=config.max_iterations {
        // w = K Q q; <w, q>_Q = <E^*C^*Qq, M⁻¹E^*C^*Qq>
        ops.apply_force(&qq, &mut force, &mut scratch);
        ops.apply_mass_inverse(&force, &mut accel);
        let a = math::dot(&force, &accel);
        ops.apply_e(&accel, &mut strain);
        ops.apply_c(&strain, &mut w);
        let b_prev = beta.last().copied().unwrap_or(0.0);
        for i in 0..ns {
            w[i] -= a * q[i] + b_prev * q_prev[i];
        }
        alpha.push(a);
        let theta = largest_tridiagonal_eigenvalue(&alpha, &beta);
        if !(theta.is_finite() && theta > 0.0) {
            return Err(Error::Estimation {
                iterations: it,
                bracket: (ritz.last().copied().unwrap_or(f64::NAN), theta),
            });
        }
        ritz.push(theta);

        apply_q(&w, &mut qw);
        let b2 = math::dot(&w, &qw);
        // an invariant subspace has been found: the Ritz value is exact
        if !(b2 > (1e-14 * theta) * (1e-14 * theta)) {
            return Ok(finish(theta, eta, it));
        }
        if ritz.len() > STALL_WINDOW {
            let old = ritz[ritz.len() - 1 - STALL_WINDOW];
            if theta - old <= 0.1 * config.tolerance * theta {
                return Ok(finish(theta, eta, it));
            }
        }
        let b = math::sqrt(b2);
        beta.push(b);
        let inv = 1.0 / b;
        core::mem::swap(&mut q_prev, &mut q);
        for i in 0..ns {
            q[i] = w[i] * inv;
            qq[i] = qw[i] * inv;
        }
    }
    let n = ritz.len();
    Err(Error::Estimation {
        iterations: config.max_iterations,
        bracket: (ritz[n.saturating_sub(2)], ritz[n - 1]),
    })
}

fn finish(mu: f64, eta: f64, iterations: usize) -> CflEstimate {
    CflEstimate {
        tau_max: math::sqrt((4.0 - eta) / mu),
        tau_critical: 2.0 / math::sqrt(mu),
        eta,
        mu_max: mu,
        iterations,
    }
}

/// Number of eigenvalues below `x` of the symmetric tridiagonal matrix with diagonal
/// `a` and off-diagonal `b` (Sturm count via the LDLᵀ pivots).
fn count_below(a: &[f64], b: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut d = 1.0;
    for i in 0..a.len() {
        d = a[i] - x - if i == 0 { 0.0 } else { b[i - 1] * b[i - 1] / d };
        if d == 0.0 {
            d = -f64::EPSILON * (a[i].abs() + x.abs() + f64::MIN_POSITIVE);
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

/// Largest eigenvalue by bisection inside the Gershgorin interval.
fn largest_tridiagonal_eigenvalue(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len();
    let b = &b[..n - 1];
    let radius = |i: usize| {
        let left = if i > 0 { b[i - 1].abs() } else { 0.0 };
        let right = if i + 1 < n { b[i].abs() } else { 0.0 };
        left + right
    };
    let mut lo = (0..n).map(|i| a[i] - radius(i)).fold(f64::INFINITY, f64::min);
    let mut hi = (0..n).map(|i| a[i] + radius(i)).fold(f64::NEG_INFINITY, f64::max);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= 4.0 * f64::EPSILON * hi.abs() {
            break;
        }
        if count_below(a, b, mid) == n {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tridiagonal_extremes() {
        // 1D Laplacian: eigenvalues 2 - 2cos(kπ/(n+1))
        let n = 50;
        let a = vec![2.0; n];
        let b = vec![-1.0; n - 1];
        let exact = 2.0 - 2.0 * libm::cos(n as f64 * core::f64::consts::PI / (n + 1) as f64);
        assert!((largest_tridiagonal_eigenvalue(&a, &b) - exact).abs() < 1e-12);
        assert_eq!(largest_tridiagonal_eigenvalue(&[3.5], &[]), 3.5);
        // zero couplings split the matrix into blocks
        let v = largest_tridiagonal_eigenvalue(&[1.0, 5.0, 2.0], &[0.0, 0.0]);
        assert!((v - 5.0).abs() < 1e-13);
    }

    #[test]
    fn sturm_count_matches_known_spectrum() {
        // [[2, 1], [1, 2]] has eigenvalues 1 and 3
        let (a, b) = ([2.0, 2.0], [1.0]);
        assert_eq!(count_below(&a, &b, 0.5), 0);
        assert_eq!(count_below(&a, &b, 2.0), 1);
        assert_eq!(count_below(&a, &b, 3.5), 2);
    }
}
