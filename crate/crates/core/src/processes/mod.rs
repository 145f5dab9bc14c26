//! Shipped internal processes for the 2D discretisation.
//!
//! Each process stores the bulk energy `Σ_nodes w ½σ·C⁻¹σ` (plus its own terms) and
//! gives adhesive segments the energy `h ½γ ς·𝔹⁻¹ς`, with `γ = 1` unless the process
//! damages the adhesive.

mod adhesive;
mod null;
mod viscoplastic;

pub use adhesive::{adhesive_flow_rule, ruptured, AdhesiveParams, AdhesiveProcess, ThresholdReading};
pub use null::NullProcess;
pub use viscoplastic::{
    plastic_dissipation_potential, plastic_energy, plastic_energy_gradient, viscoplastic_flow_rule,
    ViscoplasticParams, ViscoplasticProcess,
};

use crate::elastic2d::ElasticLayout;

#[inline]
pub(crate) fn segment_stress(layout: &ElasticLayout, sigma: &[f64], k: usize) -> [f64; 2] {
    let off = layout.segment_offset();
    [sigma[off + 2 * k], sigma[off + 2 * k + 1]]
}

/// `½ ς·𝔹⁻¹ς` for segment `k`.
#[inline]
pub(crate) fn segment_energy_density(layout: &ElasticLayout, sigma: &[f64], k: usize) -> f64 {
    let c = layout.band.expect("adhesive band").compliance();
    let s = segment_stress(layout, sigma, k);
    0.5 * (s[0] * (c[0][0] * s[0] + c[0][1] * s[1]) + s[1] * (c[1][0] * s[0] + c[1][1] * s[1]))
}

/// Writes `h γ_k 𝔹⁻¹ς_k` into the segment block.
pub(crate) fn segment_gradient(layout: &ElasticLayout, sigma: &[f64], gamma: impl Fn(usize) -> f64, out: &mut [f64]) {
    let Some(band) = layout.band else { return };
    let c = band.compliance();
    let off = layout.segment_offset();
    let h = layout.grid.h;
    for k in 0..band.count {
        let s = segment_stress(layout, sigma, k);
        let g = h * gamma(k);
        out[off + 2 * k] = g * (c[0][0] * s[0] + c[0][1] * s[1]);
        out[off + 2 * k + 1] = g * (c[1][0] * s[0] + c[1][1] * s[1]);
    }
}

pub(crate) fn check_stress_len(layout: &ElasticLayout, sigma: &[f64]) {
    debug_assert_eq!(sigma.len(), layout.stress_len());
}
