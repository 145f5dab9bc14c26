//! Operators a spatial discretisation has to supply to the integrator.
//!
//! All pairings are plain Euclidean sums over coefficients. Quadrature weights live
//! in the stored energy (see [`InternalProcess::phi_sigma_prime`](crate::InternalProcess)),
//! so `apply_e_adjoint` and `apply_c_adjoint` are exact matrix transposes.

/// Linear operators of a discretised system.
///
/// Lengths: velocities live in `H` (`velocity_len`), strain-like and proto-stress
/// vectors share the layout of `S` (`stress_len`).
pub trait SystemOps {
    fn velocity_len(&self) -> usize;

    fn stress_len(&self) -> usize;

    /// Strain-like field from a velocity field.
    fn apply_e(&self, v: &[f64], out: &mut [f64]);

    /// Transpose of [`apply_e`](Self::apply_e): generalized stress to force.
    fn apply_e_adjoint(&self, s: &[f64], out: &mut [f64]);

    /// Proto-stress from a strain-like field.
    fn apply_c(&self, e: &[f64], out: &mut [f64]);

    /// Transpose of [`apply_c`](Self::apply_c).
    fn apply_c_adjoint(&self, s: &[f64], out: &mut [f64]);

    /// Diagonal (lumped) mass; entries must be positive.
    fn mass_diagonal(&self) -> &[f64];

    fn apply_mass_inverse(&self, f: &[f64], out: &mut [f64]) {
        for ((o, fi), m) in out.iter_mut().zip(f).zip(self.mass_diagonal()) {
            *o = fi / m;
        }
    }

    /// `sigma += scale * C E v`. `strain` and `stress` are scratch buffers of `stress_len`.
    fn accumulate_stress_rate(
        &self,
        v: &[f64],
        scale: f64,
        sigma: &mut [f64],
        strain: &mut [f64],
        stress: &mut [f64],
    ) {
        self.apply_e(v, strain);
        self.apply_c(strain, stress);
        for (s, r) in sigma.iter_mut().zip(stress.iter()) {
            *s += scale * r;
        }
    }

    /// `out = E^* C^* dual`. `scratch` has `stress_len`.
    fn apply_force(&self, dual: &[f64], out: &mut [f64], scratch: &mut [f64]) {
        self.apply_c_adjoint(dual, scratch);
        self.apply_e_adjoint(scratch, out);
    }
}

impl<T: SystemOps + ?Sized> SystemOps for &T {
    fn velocity_len(&self) -> usize {
        (**self).velocity_len()
    }
    fn stress_len(&self) -> usize {
        (**self).stress_len()
    }
    fn apply_e(&self, v: &[f64], out: &mut [f64]) {
        (**self).apply_e(v, out)
    }
    fn apply_e_adjoint(&self, s: &[f64], out: &mut [f64]) {
        (**self).apply_e_adjoint(s, out)
    }
    fn apply_c(&self, e: &[f64], out: &mut [f64]) {
        (**self).apply_c(e, out)
    }
    fn apply_c_adjoint(&self, s: &[f64], out: &mut [f64]) {
        (**self).apply_c_adjoint(s, out)
    }
    fn mass_diagonal(&self) -> &[f64] {
        (**self).mass_diagonal()
    }
    fn apply_mass_inverse(&self, f: &[f64], out: &mut [f64]) {
        (**self).apply_mass_inverse(f, out)
    }
    fn accumulate_stress_rate(
        &self,
        v: &[f64],
        scale: f64,
        sigma: &mut [f64],
        strain: &mut [f64],
        stress: &mut [f64],
    ) {
        (**self).accumulate_stress_rate(v, scale, sigma, strain, stress)
    }
    fn apply_force(&self, dual: &[f64], out: &mut [f64], scratch: &mut [f64]) {
        (**self).apply_force(dual, out, scratch)
    }
}
