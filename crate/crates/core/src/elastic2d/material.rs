//! Isotropic plane-strain material.

use crate::{math, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaterialParams {
    pub bulk_modulus: f64,
    pub shear_modulus: f64,
    pub density: f64,
}

impl MaterialParams {
    pub fn new(bulk_modulus: f64, shear_modulus: f64, density: f64) -> Result<Self> {
        let m = Self {
            bulk_modulus,
            shear_modulus,
            density,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |x: f64| x > 0.0 && x.is_finite();
        if ok(self.bulk_modulus) && ok(self.shear_modulus) && ok(self.density) {
            Ok(())
        } else {
            Err(Error::Config(alloc::format!(
                "material moduli and density must be positive: K = {}, G = {}, rho = {}",
                self.bulk_modulus,
                self.shear_modulus,
                self.density
            )))
        }
    }

    /// `λ = K - 2G/3`.
    pub fn lame_lambda(&self) -> f64 {
        self.bulk_modulus - 2.0 * self.shear_modulus / 3.0
    }

    pub fn wave_speeds(&self) -> (f64, f64) {
        wave_speeds(self)
    }

    pub fn elasticity(&self) -> Elasticity {
        Elasticity::new(self.lame_lambda(), self.shear_modulus)
    }
}

/// `(v_p, v_s) = (sqrt((K + 4G/3)/ρ), sqrt(G/ρ))`.
pub fn wave_speeds(m: &MaterialParams) -> (f64, f64) {
    (
        math::sqrt((m.bulk_modulus + 4.0 * m.shear_modulus / 3.0) / m.density),
        math::sqrt(m.shear_modulus / m.density),
    )
}

/// Isotropic stiffness acting on Voigt vectors.
///
/// Strains are `(e_xx, e_yy, γ_xy)` with engineering shear `γ = 2 e_xy`, stresses
/// `(σ_xx, σ_yy, σ_xy)`, so `σ · e` is the tensor contraction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Elasticity {
    pub lambda: f64,
    pub shear: f64,
    inv_det: f64,
}

impl Elasticity {
    pub fn new(lambda: f64, shear: f64) -> Self {
        let a = lambda + 2.0 * shear;
        Self {
            lambda,
            shear,
            inv_det: 1.0 / (a * a - lambda * lambda),
        }
    }

    #[inline]
    pub fn stress(&self, e: [f64; 3]) -> [f64; 3] {
        let tr = e[0] + e[1];
        [
            self.lambda * tr + 2.0 * self.shear * e[0],
            self.lambda * tr + 2.0 * self.shear * e[1],
            self.shear * e[2],
        ]
    }

    #[inline]
    pub fn strain(&self, s: [f64; 3]) -> [f64; 3] {
        let a = self.lambda + 2.0 * self.shear;
        let b = self.lambda;
        [
            (a * s[0] - b * s[1]) * self.inv_det,
            (a * s[1] - b * s[0]) * self.inv_det,
            s[2] / self.shear,
        ]
    }

    pub fn voigt(&self) -> [[f64; 3]; 3] {
        let a = self.lambda + 2.0 * self.shear;
        [[a, self.lambda, 0.0], [self.lambda, a, 0.0], [0.0, 0.0, self.shear]]
    }
}
