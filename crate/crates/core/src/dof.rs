//! Flat coefficient vectors tagged with the space they belong to.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Deref, DerefMut};

use crate::math;

/// Which abstract space a [`DofVector`] lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpaceTag {
    /// Velocities / displacements.
    H,
    /// Proto-stresses.
    S,
    /// Internal variables.
    Z,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DofVector {
    coefficients: Vec<f64>,
    space: SpaceTag,
}

impl DofVector {
    pub fn zeros(space: SpaceTag, len: usize) -> Self {
        Self {
            coefficients: vec![0.0; len],
            space,
        }
    }

    pub fn from_vec(space: SpaceTag, coefficients: Vec<f64>) -> Self {
        Self {
            coefficients,
            space,
        }
    }

    pub fn space(&self) -> SpaceTag {
        self.space
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.coefficients
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.coefficients
    }

    pub fn dot(&self, other: &DofVector) -> f64 {
        debug_assert_eq!(self.space, other.space);
        math::dot(&self.coefficients, &other.coefficients)
    }

    pub fn norm(&self) -> f64 {
        math::norm(&self.coefficients)
    }

    /// `self += a * x`
    pub fn axpy(&mut self, a: f64, x: &[f64]) {
        debug_assert_eq!(self.len(), x.len());
        for (y, xi) in self.coefficients.iter_mut().zip(x) {
            *y += a * xi;
        }
    }

    pub fn fill(&mut self, value: f64) {
        self.coefficients.iter_mut().for_each(|c| *c = value);
    }

    pub fn is_finite(&self) -> bool {
        self.coefficients.iter().all(|c| c.is_finite())
    }
}

impl Deref for DofVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.coefficients
    }
}

impl DerefMut for DofVector {
    fn deref_mut(&mut self) -> &mut [f64] {
        &mut self.coefficients
    }
}
