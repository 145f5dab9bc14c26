//! Rotated staggered-grid operators.
//!
//! At a node every derivative is the mean of the differences across the adjacent
//! cell pairs that exist: two pairs inside the domain, one on an edge, none at a
//! corner. Each pair difference is `(v_a - v_b)/h`, so every pair carries the same
//! weight `h/2` in the transposed operator, which is a discrete negative divergence.
//!
//! Layout of proto-stress vectors: `[σxx, σyy, σxy]` per node (row-major, `x` fastest),
//! followed by `[ςx, ςy]` per adhesive segment. Velocities: `[vx, vy]` per cell.

use alloc::vec;
use alloc::vec::Vec;

use super::grid::{AdhesiveBand, BoundarySpec, Grid2D, Side};
use super::material::{Elasticity, MaterialParams};
use crate::ops::SystemOps;
use crate::Result;

/// Everything needed to interpret a coefficient vector.
#[derive(Debug, Clone, PartialEq)]
pub struct ElasticLayout {
    pub grid: Grid2D,
    pub material: MaterialParams,
    pub band: Option<AdhesiveBand>,
    elasticity: Elasticity,
}

impl ElasticLayout {
    pub fn new(grid: Grid2D, material: MaterialParams, band: Option<AdhesiveBand>) -> Result<Self> {
        grid.validate()?;
        material.validate()?;
        if let Some(b) = &band {
            b.validate(&grid)?;
        }
        Ok(Self {
            grid,
            material,
            band,
            elasticity: material.elasticity(),
        })
    }

    pub fn elasticity(&self) -> &Elasticity {
        &self.elasticity
    }

    pub fn segment_count(&self) -> usize {
        self.band.map_or(0, |b| b.count)
    }

    /// Offset of the adhesive block in a proto-stress vector.
    pub fn segment_offset(&self) -> usize {
        3 * self.grid.node_count()
    }

    pub fn stress_len(&self) -> usize {
        self.segment_offset() + 2 * self.segment_count()
    }

    pub fn velocity_len(&self) -> usize {
        2 * self.grid.cell_count()
    }

    /// Cell index carrying the trace of adhesive segment `s`.
    pub fn segment_cell(&self, s: usize) -> usize {
        let band = self.band.expect("no adhesive band");
        let (i, j) = self.grid.segment_cell(Side::Bottom, band.first + s);
        self.grid.cell_index(i, j)
    }

    /// Velocity gradient `[∂x vx, ∂y vx, ∂x vy, ∂y vy]` at node `(i, j)`.
    #[inline]
    pub fn velocity_gradient(&self, v: &[f64], i: usize, j: usize) -> [f64; 4] {
        let g = &self.grid;
        let (nx, ny) = (g.nx, g.ny);
        let cell = |ci: usize, cj: usize| 2 * (cj * nx + ci);
        let (left, right, below, above) = (i > 0, i < nx, j > 0, j < ny);
        let (mut xx, mut xy, mut yx, mut yy) = (0.0, 0.0, 0.0, 0.0);
        let (mut npx, mut npy) = (0u32, 0u32);
        if left && right {
            if below {
                let (a, b) = (cell(i, j - 1), cell(i - 1, j - 1));
                xx += v[a] - v[b];
                yx += v[a + 1] - v[b + 1];
                npx += 1;
            }
            if above {
                let (a, b) = (cell(i, j), cell(i - 1, j));
                xx += v[a] - v[b];
                yx += v[a + 1] - v[b + 1];
                npx += 1;
            }
        }
        if below && above {
            if left {
                let (a, b) = (cell(i - 1, j), cell(i - 1, j - 1));
                xy += v[a] - v[b];
                yy += v[a + 1] - v[b + 1];
                npy += 1;
            }
            if right {
                let (a, b) = (cell(i, j), cell(i, j - 1));
                xy += v[a] - v[b];
                yy += v[a + 1] - v[b + 1];
                npy += 1;
            }
        }
        let cx = if npx > 0 { 1.0 / (npx as f64 * g.h) } else { 0.0 };
        let cy = if npy > 0 { 1.0 / (npy as f64 * g.h) } else { 0.0 };
        [cx * xx, cy * xy, cx * yx, cy * yy]
    }

    /// Transpose of [`velocity_gradient`](Self::velocity_gradient): adds the contribution
    /// of the dual gradient `d = [dxx, dxy, dyx, dyy]` at node `(i, j)` to `out`.
    #[inline]
    fn scatter_gradient(&self, d: [f64; 4], i: usize, j: usize, out: &mut [f64]) {
        let g = &self.grid;
        let (nx, ny) = (g.nx, g.ny);
        let cell = |ci: usize, cj: usize| 2 * (cj * nx + ci);
        let (left, right, below, above) = (i > 0, i < nx, j > 0, j < ny);
        let npx = if left && right { below as u32 + above as u32 } else { 0 };
        let npy = if below && above { left as u32 + right as u32 } else { 0 };
        if npx > 0 {
            let cx = 1.0 / (npx as f64 * g.h);
            let (fx, fy) = (cx * d[0], cx * d[2]);
            let mut pair = |a: usize, b: usize| {
                out[a] += fx;
                out[a + 1] += fy;
                out[b] -= fx;
                out[b + 1] -= fy;
            };
            if below {
                pair(cell(i, j - 1), cell(i - 1, j - 1));
            }
            if above {
                pair(cell(i, j), cell(i - 1, j));
            }
        }
        if npy > 0 {
            let cy = 1.0 / (npy as f64 * g.h);
            let (fx, fy) = (cy * d[1], cy * d[3]);
            let mut pair = |a: usize, b: usize| {
                out[a] += fx;
                out[a + 1] += fy;
                out[b] -= fx;
                out[b + 1] -= fy;
            };
            if left {
                pair(cell(i - 1, j), cell(i - 1, j - 1));
            }
            if right {
                pair(cell(i, j), cell(i, j - 1));
            }
        }
    }

    /// Engineering strain `(e_xx, e_yy, γ_xy)` at node `(i, j)`.
    #[inline]
    pub fn strain_at(&self, v: &[f64], i: usize, j: usize) -> [f64; 3] {
        let [xx, xy, yx, yy] = self.velocity_gradient(v, i, j);
        [xx, yy, xy + yx]
    }

    /// Nodal strain energy `Σ w ½ σ·C⁻¹σ` of the bulk block.
    pub fn bulk_energy(&self, sigma: &[f64]) -> f64 {
        let g = &self.grid;
        crate::math::pairwise_sum(g.node_count(), &|n| {
            let (i, j) = (n % (g.nx + 1), n / (g.nx + 1));
            let s = [sigma[3 * n], sigma[3 * n + 1], sigma[3 * n + 2]];
            let e = self.elasticity.strain(s);
            0.5 * g.node_weight(i, j) * (s[0] * e[0] + s[1] * e[1] + s[2] * e[2])
        })
    }

    /// `w C⁻¹σ` per node into the bulk block of `out`.
    pub fn bulk_energy_gradient(&self, sigma: &[f64], out: &mut [f64]) {
        let g = &self.grid;
        for j in 0..=g.ny {
            for i in 0..=g.nx {
                let n = g.node_index(i, j);
                let w = g.node_weight(i, j);
                let e = self
                    .elasticity
                    .strain([sigma[3 * n], sigma[3 * n + 1], sigma[3 * n + 2]]);
                out[3 * n] = w * e[0];
                out[3 * n + 1] = w * e[1];
                out[3 * n + 2] = w * e[2];
            }
        }
    }
}

/// The 2D discretisation as [`SystemOps`].
#[derive(Debug, Clone)]
pub struct Elastic2d {
    layout: ElasticLayout,
    mass: Vec<f64>,
}

impl Elastic2d {
    pub fn new(layout: ElasticLayout) -> Self {
        let h = layout.grid.h;
        let mass = vec![layout.material.density * h * h; layout.velocity_len()];
        Self { layout, mass }
    }

    pub fn from_parts(grid: Grid2D, material: MaterialParams, boundary: &BoundarySpec) -> Result<Self> {
        boundary.validate(&grid)?;
        Ok(Self::new(ElasticLayout::new(grid, material, boundary.adhesive)?))
    }

    pub fn layout(&self) -> &ElasticLayout {
        &self.layout
    }

    pub fn grid(&self) -> &Grid2D {
        &self.layout.grid
    }

    /// Total momentum `Σ m v` per component.
    pub fn momentum(&self, v: &[f64]) -> [f64; 2] {
        let n = v.len() / 2;
        let mx = crate::math::pairwise_sum(n, &|c| self.mass[2 * c] * v[2 * c]);
        let my = crate::math::pairwise_sum(n, &|c| self.mass[2 * c + 1] * v[2 * c + 1]);
        [mx, my]
    }
}

impl SystemOps for Elastic2d {
    fn velocity_len(&self) -> usize {
        self.layout.velocity_len()
    }

    fn stress_len(&self) -> usize {
        self.layout.stress_len()
    }

    fn apply_e(&self, v: &[f64], out: &mut [f64]) {
        let l = &self.layout;
        let g = &l.grid;
        for j in 0..=g.ny {
            for i in 0..=g.nx {
                let n = g.node_index(i, j);
                let e = l.strain_at(v, i, j);
                out[3 * n..3 * n + 3].copy_from_slice(&e);
            }
        }
        let off = l.segment_offset();
        for s in 0..l.segment_count() {
            let c = l.segment_cell(s);
            out[off + 2 * s] = -v[2 * c];
            out[off + 2 * s + 1] = -v[2 * c + 1];
        }
    }

    fn apply_e_adjoint(&self, s: &[f64], out: &mut [f64]) {
        let l = &self.layout;
        let g = &l.grid;
        out.iter_mut().for_each(|o| *o = 0.0);
        for j in 0..=g.ny {
            for i in 0..=g.nx {
                let n = g.node_index(i, j);
                let (sxx, syy, sxy) = (s[3 * n], s[3 * n + 1], s[3 * n + 2]);
                l.scatter_gradient([sxx, sxy, sxy, syy], i, j, out);
            }
        }
        let off = l.segment_offset();
        for k in 0..l.segment_count() {
            let c = l.segment_cell(k);
            out[2 * c] -= s[off + 2 * k];
            out[2 * c + 1] -= s[off + 2 * k + 1];
        }
    }

    fn apply_c(&self, e: &[f64], out: &mut [f64]) {
        let l = &self.layout;
        let c = l.elasticity();
        let nn = l.grid.node_count();
        for n in 0..nn {
            let s = c.stress([e[3 * n], e[3 * n + 1], e[3 * n + 2]]);
            out[3 * n..3 * n + 3].copy_from_slice(&s);
        }
        if let Some(band) = &l.band {
            let off = l.segment_offset();
            let b = band.stiffness;
            for k in 0..band.count {
                let (x, y) = (e[off + 2 * k], e[off + 2 * k + 1]);
                out[off + 2 * k] = b[0][0] * x + b[0][1] * y;
                out[off + 2 * k + 1] = b[1][0] * x + b[1][1] * y;
            }
        }
    }

    fn apply_c_adjoint(&self, s: &[f64], out: &mut [f64]) {
        let l = &self.layout;
        let c = l.elasticity();
        let nn = l.grid.node_count();
        // the Voigt stiffness is symmetric
        for n in 0..nn {
            let r = c.stress([s[3 * n], s[3 * n + 1], s[3 * n + 2]]);
            out[3 * n..3 * n + 3].copy_from_slice(&r);
        }
        if let Some(band) = &l.band {
            let off = l.segment_offset();
            let b = band.stiffness;
            for k in 0..band.count {
                let (x, y) = (s[off + 2 * k], s[off + 2 * k + 1]);
                out[off + 2 * k] = b[0][0] * x + b[1][0] * y;
                out[off + 2 * k + 1] = b[0][1] * x + b[1][1] * y;
            }
        }
    }

    fn mass_diagonal(&self) -> &[f64] {
        &self.mass
    }

    fn accumulate_stress_rate(
        &self,
        v: &[f64],
        scale: f64,
        sigma: &mut [f64],
        _strain: &mut [f64],
        _stress: &mut [f64],
    ) {
        let l = &self.layout;
        let g = &l.grid;
        let c = l.elasticity();
        for j in 0..=g.ny {
            for i in 0..=g.nx {
                let n = g.node_index(i, j);
                let s = c.stress(l.strain_at(v, i, j));
                sigma[3 * n] += scale * s[0];
                sigma[3 * n + 1] += scale * s[1];
                sigma[3 * n + 2] += scale * s[2];
            }
        }
        if let Some(band) = &l.band {
            let off = l.segment_offset();
            let b = band.stiffness;
            for k in 0..band.count {
                let cell = l.segment_cell(k);
                let (x, y) = (-v[2 * cell], -v[2 * cell + 1]);
                sigma[off + 2 * k] += scale * (b[0][0] * x + b[0][1] * y);
                sigma[off + 2 * k + 1] += scale * (b[1][0] * x + b[1][1] * y);
            }
        }
    }

    fn apply_force(&self, dual: &[f64], out: &mut [f64], scratch: &mut [f64]) {
        self.apply_c_adjoint(dual, scratch);
        self.apply_e_adjoint(scratch, out);
    }
}

/// `ς̇ = 𝔹(u̇_D - v_trace)` per adhesive segment.
pub fn adhesive_proto_stress_rate(layout: &ElasticLayout, v: &[f64], support_velocity: [f64; 2]) -> Vec<[f64; 2]> {
    let Some(band) = layout.band else {
        return Vec::new();
    };
    let b = band.stiffness;
    (0..band.count)
        .map(|k| {
            let c = layout.segment_cell(k);
            let x = support_velocity[0] - v[2 * c];
            let y = support_velocity[1] - v[2 * c + 1];
            [b[0][0] * x + b[0][1] * y, b[1][0] * x + b[1][1] * y]
        })
        .collect()
}
