//! Uniform grid, boundary segments and their conditions.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::load::{SeparableLoad, TimeProfile};
use crate::{Error, Result};

/// `nx × ny` square cells of size `h`. Velocities live at cell centres, stresses at
/// the `(nx+1) × (ny+1)` nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid2D {
    pub nx: usize,
    pub ny: usize,
    pub h: f64,
    pub origin: [f64; 2],
}

impl Grid2D {
    pub fn new(nx: usize, ny: usize, h: f64) -> Result<Self> {
        let g = Self {
            nx,
            ny,
            h,
            origin: [0.0, 0.0],
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.nx < 2 || self.ny < 2 {
            return Err(Error::Config(format!("grid needs at least 2x2 cells, got {}x{}", self.nx, self.ny)));
        }
        if !(self.h > 0.0 && self.h.is_finite()) {
            return Err(Error::Config(format!("mesh size must be positive, got {}", self.h)));
        }
        Ok(())
    }

    pub fn cell_count(&self) -> usize {
        self.nx * self.ny
    }

    pub fn node_count(&self) -> usize {
        (self.nx + 1) * (self.ny + 1)
    }

    #[inline]
    pub fn cell_index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    #[inline]
    pub fn node_index(&self, i: usize, j: usize) -> usize {
        j * (self.nx + 1) + i
    }

    pub fn cell_center(&self, i: usize, j: usize) -> [f64; 2] {
        [
            self.origin[0] + (i as f64 + 0.5) * self.h,
            self.origin[1] + (j as f64 + 0.5) * self.h,
        ]
    }

    pub fn node_position(&self, i: usize, j: usize) -> [f64; 2] {
        [self.origin[0] + i as f64 * self.h, self.origin[1] + j as f64 * self.h]
    }

    /// Lumped quadrature weight: `h²` inside, `h²/2` on edges, `h²/4` at corners.
    #[inline]
    pub fn node_weight(&self, i: usize, j: usize) -> f64 {
        let fx = if i == 0 || i == self.nx { 0.5 } else { 1.0 };
        let fy = if j == 0 || j == self.ny { 0.5 } else { 1.0 };
        fx * fy * self.h * self.h
    }

    pub fn segment_count(&self, side: Side) -> usize {
        match side {
            Side::Bottom | Side::Top => self.nx,
            Side::Left | Side::Right => self.ny,
        }
    }

    /// Cell adjacent to boundary segment `s` of `side`.
    pub fn segment_cell(&self, side: Side, s: usize) -> (usize, usize) {
        match side {
            Side::Bottom => (s, 0),
            Side::Top => (s, self.ny - 1),
            Side::Left => (0, s),
            Side::Right => (self.nx - 1, s),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Bottom,
    Right,
    Top,
    Left,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::Bottom, Side::Right, Side::Top, Side::Left];

    /// Outward unit normal.
    pub fn normal(&self) -> [f64; 2] {
        match self {
            Side::Bottom => [0.0, -1.0],
            Side::Right => [1.0, 0.0],
            Side::Top => [0.0, 1.0],
            Side::Left => [-1.0, 0.0],
        }
    }

    /// Unit tangent, counter-clockwise along the boundary.
    pub fn tangent(&self) -> [f64; 2] {
        let n = self.normal();
        [-n[1], n[0]]
    }
}

/// Contiguous run of bottom segments glued to a rigid support by an elastic adhesive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdhesiveBand {
    pub first: usize,
    pub count: usize,
    /// Symmetric positive definite 2×2 stiffness.
    pub stiffness: [[f64; 2]; 2],
}

impl AdhesiveBand {
    /// The central `fraction` of the bottom side.
    pub fn centered(grid: &Grid2D, fraction: f64, stiffness: [[f64; 2]; 2]) -> Result<Self> {
        if !(fraction > 0.0 && fraction <= 1.0) {
            return Err(Error::Config(format!("adhesive band fraction must lie in (0, 1], got {fraction}")));
        }
        let count = (libm::round(grid.nx as f64 * fraction) as usize).max(1);
        let first = (grid.nx - count) / 2;
        let band = Self {
            first,
            count,
            stiffness,
        };
        band.validate(grid)?;
        Ok(band)
    }

    pub fn validate(&self, grid: &Grid2D) -> Result<()> {
        if self.count == 0 || self.first + self.count > grid.nx {
            return Err(Error::Config(format!(
                "adhesive band [{}, {}) does not fit the bottom side of {} segments",
                self.first,
                self.first + self.count,
                grid.nx
            )));
        }
        let [[a, b], [c, d]] = self.stiffness;
        if b != c || !(a > 0.0) || !(a * d - b * c > 0.0) {
            return Err(Error::Config("adhesive stiffness must be symmetric positive definite".into()));
        }
        Ok(())
    }

    pub fn compliance(&self) -> [[f64; 2]; 2] {
        let [[a, b], [c, d]] = self.stiffness;
        let inv = 1.0 / (a * d - b * c);
        [[d * inv, -b * inv], [-c * inv, a * inv]]
    }

    pub fn contains(&self, s: usize) -> bool {
        s >= self.first && s < self.first + self.count
    }
}

/// A prescribed traction `profile(t) · direction` on a run of segments.
#[derive(Debug, Clone, PartialEq)]
pub struct TractionPatch {
    pub side: Side,
    pub first: usize,
    pub count: usize,
    pub direction: [f64; 2],
    pub profile: TimeProfile,
}

impl TractionPatch {
    pub fn whole_side(grid: &Grid2D, side: Side, direction: [f64; 2], profile: TimeProfile) -> Self {
        Self {
            side,
            first: 0,
            count: grid.segment_count(side),
            direction,
            profile,
        }
    }
}

/// Condition on one boundary segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SegmentCondition {
    /// Traction; `None` for the traction-free default.
    Traction(Option<usize>),
    /// Adhesive, with the index into the band.
    Adhesive(usize),
}

/// Boundary conditions. Segments not covered by a patch or the band are traction-free.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BoundarySpec {
    pub adhesive: Option<AdhesiveBand>,
    pub tractions: Vec<TractionPatch>,
}

impl BoundarySpec {
    pub fn free() -> Self {
        Self::default()
    }

    pub fn validate(&self, grid: &Grid2D) -> Result<()> {
        if let Some(band) = &self.adhesive {
            band.validate(grid)?;
        }
        for side in Side::ALL {
            let n = grid.segment_count(side);
            let mut taken = vec![false; n];
            if let (Side::Bottom, Some(band)) = (side, &self.adhesive) {
                taken[band.first..band.first + band.count].iter_mut().for_each(|t| *t = true);
            }
            for p in self.tractions.iter().filter(|p| p.side == side) {
                if p.first + p.count > n {
                    return Err(Error::Config(format!("traction patch on {side:?} exceeds its {n} segments")));
                }
                for t in &mut taken[p.first..p.first + p.count] {
                    if *t {
                        return Err(Error::Config(format!("boundary segment on {side:?} has two conditions")));
                    }
                    *t = true;
                }
            }
        }
        Ok(())
    }

    pub fn condition(&self, side: Side, s: usize) -> SegmentCondition {
        if side == Side::Bottom {
            if let Some(band) = &self.adhesive {
                if band.contains(s) {
                    return SegmentCondition::Adhesive(s - band.first);
                }
            }
        }
        let patch = self
            .tractions
            .iter()
            .position(|p| p.side == side && s >= p.first && s < p.first + p.count);
        SegmentCondition::Traction(patch)
    }

    /// Loads induced by the traction patches: each segment passes `h·g(t)` to its cell.
    pub fn load_program(&self, grid: &Grid2D, horizon: f64) -> SeparableLoad {
        let nh = 2 * grid.cell_count();
        let ns = 3 * grid.node_count() + 2 * self.adhesive.map_or(0, |b| b.count);
        let mut load = SeparableLoad::new(horizon, nh, ns);
        for p in &self.tractions {
            let mut pattern = vec![0.0; nh];
            for s in p.first..p.first + p.count {
                let (i, j) = grid.segment_cell(p.side, s);
                let c = grid.cell_index(i, j);
                pattern[2 * c] += grid.h * p.direction[0];
                pattern[2 * c + 1] += grid.h * p.direction[1];
            }
            load = load.with_force(p.profile, pattern);
        }
        load
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_area() {
        let g = Grid2D::new(7, 5, 0.3).unwrap();
        let mut total = 0.0;
        for j in 0..=g.ny {
            for i in 0..=g.nx {
                total += g.node_weight(i, j);
            }
        }
        assert!((total - 7.0 * 5.0 * 0.09).abs() < 1e-12);
    }

    #[test]
    fn fine_band_has_forty_segments() {
        let g = Grid2D::new(400, 400, 0.025).unwrap();
        let b = AdhesiveBand::centered(&g, 0.1, [[0.5, 0.0], [0.0, 0.5]]).unwrap();
        assert_eq!(b.count, 40);
        assert_eq!(b.first, 180);
        let c = b.compliance();
        assert_eq!(c, [[2.0, 0.0], [0.0, 2.0]]);
    }

    #[test]
    fn overlapping_conditions_rejected() {
        let g = Grid2D::new(10, 10, 1.0).unwrap();
        let band = AdhesiveBand::centered(&g, 0.2, [[1.0, 0.0], [0.0, 1.0]]).unwrap();
        let spec = BoundarySpec {
            adhesive: Some(band),
            tractions: alloc::vec![TractionPatch::whole_side(&g, Side::Bottom, [0.0, 1.0], TimeProfile::Constant(1.0))],
        };
        assert!(spec.validate(&g).is_err());
        let ok = BoundarySpec {
            adhesive: Some(band),
            tractions: alloc::vec![TractionPatch::whole_side(&g, Side::Top, [0.0, 1.0], TimeProfile::Constant(1.0))],
        };
        ok.validate(&g).unwrap();
        assert_eq!(ok.condition(Side::Bottom, 4), SegmentCondition::Adhesive(0));
        assert_eq!(ok.condition(Side::Bottom, 0), SegmentCondition::Traction(None));
        assert_eq!(ok.condition(Side::Top, 3), SegmentCondition::Traction(Some(0)));
    }

    #[test]
    fn traction_load_totals() {
        let g = Grid2D::new(4, 3, 0.5).unwrap();
        let spec = BoundarySpec {
            adhesive: None,
            tractions: alloc::vec![TractionPatch::whole_side(&g, Side::Top, [0.0, 2.0], TimeProfile::Constant(1.0))],
        };
        let load = spec.load_program(&g, 1.0);
        let mut f = vec![0.0; 2 * g.cell_count()];
        crate::load::LoadProgram::force(&load, 0.5, &mut f);
        let fy: f64 = f.iter().skip(1).step_by(2).sum();
        // traction 2 over a side of length 2
        assert!((fy - 4.0).abs() < 1e-14);
    }
}
