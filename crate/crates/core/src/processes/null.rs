use crate::elastic2d::ElasticLayout;
use crate::process::InternalProcess;
use crate::Result;

use super::{check_stress_len, segment_energy_density, segment_gradient};

/// Linear elasticity without internal variable; adhesive segments, if any, are
/// intact springs.
#[derive(Debug, Clone)]
pub struct NullProcess {
    layout: ElasticLayout,
}

impl NullProcess {
    pub fn new(layout: ElasticLayout) -> Self {
        Self { layout }
    }

    pub fn layout(&self) -> &ElasticLayout {
        &self.layout
    }
}

impl InternalProcess for NullProcess {
    fn stress_len(&self) -> usize {
        self.layout.stress_len()
    }

    fn internal_len(&self) -> usize {
        0
    }

    fn phi(&self, sigma: &[f64], _z: &[f64]) -> f64 {
        check_stress_len(&self.layout, sigma);
        let h = self.layout.grid.h;
        let seg: f64 = (0..self.layout.segment_count())
            .map(|k| h * segment_energy_density(&self.layout, sigma, k))
            .sum();
        self.layout.bulk_energy(sigma) + seg
    }

    fn phi_sigma_prime(&self, sigma: &[f64], _z: &[f64], out: &mut [f64]) {
        self.layout.bulk_energy_gradient(sigma, out);
        segment_gradient(&self.layout, sigma, |_| 1.0, out);
    }

    fn phi_z_prime(&self, _sigma: &[f64], _z: &[f64], _out: &mut [f64]) {}

    fn dissipation_potential(&self, _z: &[f64], _z_rate: &[f64]) -> f64 {
        0.0
    }

    fn solve_flow_rule(&self, _sigma: &[f64], _z_old: &[f64], _tau: f64, _z_new: &mut [f64]) -> Result<()> {
        Ok(())
    }

    fn dissipation_increment(&self, _sigma: &[f64], _z_old: &[f64], _z_new: &[f64], _tau: f64) -> f64 {
        0.0
    }

    fn stiffest_state(&self, _z: &mut [f64]) {}
}
