//! Internal-variable processes: stored energy `Φ(Σ, z)`, its partial derivatives,
//! and the local flow rule solved once per step.

use crate::Result;

/// A process couples the proto-stress `Σ` with an internal variable `z`.
///
/// `phi_sigma_prime` and `phi_z_prime` return raw gradients of `phi` with respect to
/// the coefficient vectors (quadrature weights included), so that for every process
/// `phi(Σ + δΣ, z) - phi(Σ, z) ≈ <phi_sigma_prime(Σ, z), δΣ>`.
pub trait InternalProcess {
    fn stress_len(&self) -> usize;

    /// Length of the internal variable; zero for purely elastic processes.
    fn internal_len(&self) -> usize;

    fn phi(&self, sigma: &[f64], z: &[f64]) -> f64;

    fn phi_sigma_prime(&self, sigma: &[f64], z: &[f64], out: &mut [f64]);

    fn phi_z_prime(&self, sigma: &[f64], z: &[f64], out: &mut [f64]);

    /// A difference quotient `Φ°` with `<Φ°, z - z̃> = Φ(Σ, z) - Φ(Σ, z̃)`.
    ///
    /// The default evaluates `phi_z_prime` at the midpoint, which is exact when
    /// `Φ(Σ, ·)` is at most quadratic. Processes with other energies override it.
    fn phi_z_quotient(&self, sigma: &[f64], z: &[f64], z_tilde: &[f64], out: &mut [f64]) {
        let mid: alloc::vec::Vec<f64> = z.iter().zip(z_tilde).map(|(a, b)| 0.5 * (a + b)).collect();
        self.phi_z_prime(sigma, &mid, out);
    }

    /// Dissipation potential `Ψ(ż)`, possibly `+∞`. `z` is the state it is
    /// evaluated at, for processes whose dissipation depends on the state.
    fn dissipation_potential(&self, z: &[f64], z_rate: &[f64]) -> f64;

    /// Solves the incremental flow rule for `z_new` given `Σ^{k+1}` and `z^k`.
    fn solve_flow_rule(&self, sigma: &[f64], z_old: &[f64], tau: f64, z_new: &mut [f64]) -> Result<()>;

    /// Energy dissipated over one step, non-negative.
    fn dissipation_increment(&self, sigma: &[f64], z_old: &[f64], z_new: &[f64], tau: f64) -> f64;

    /// The state of `z` making `Φ(·, z)` stiffest, used for the step-size bound.
    fn stiffest_state(&self, z: &mut [f64]);

    /// Initial internal state for a fresh run.
    fn initial_state(&self, z: &mut [f64]) {
        self.stiffest_state(z);
    }
}

/// `Φ(Σ, z_old) - Φ(Σ, z_new)`: the energy released by the flow rule at frozen `Σ`.
pub fn energy_release<P: InternalProcess + ?Sized>(process: &P, sigma: &[f64], z_old: &[f64], z_new: &[f64]) -> f64 {
    process.phi(sigma, z_old) - process.phi(sigma, z_new)
}
