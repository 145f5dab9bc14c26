//! Time-dependent loading: bulk/surface forces `F(t)` acting on velocities and
//! proto-stress loads `G(t)` entering the stress update through `dG/dt`.

use alloc::vec::Vec;
use core::sync::atomic::{AtomicBool, Ordering};

use crate::math;

/// Scalar amplitude of a load pattern, with a closed-form time integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeProfile {
    Zero,
    Constant(f64),
    /// `offset + slope * t`
    Affine { offset: f64, slope: f64 },
    /// `before` for `t < at`, `after` otherwise.
    Step { at: f64, before: f64, after: f64 },
    /// `amplitude * sin(omega * t + phase)`
    Sine { amplitude: f64, omega: f64, phase: f64 },
}

impl TimeProfile {
    pub fn ramp(slope: f64) -> Self {
        TimeProfile::Affine { offset: 0.0, slope }
    }

    pub fn value(&self, t: f64) -> f64 {
        match *self {
            TimeProfile::Zero => 0.0,
            TimeProfile::Constant(c) => c,
            TimeProfile::Affine { offset, slope } => offset + slope * t,
            TimeProfile::Step { at, before, after } => {
                if t < at {
                    before
                } else {
                    after
                }
            }
            TimeProfile::Sine {
                amplitude,
                omega,
                phase,
            } => amplitude * math::sin(omega * t + phase),
        }
    }

    /// Exact `∫_{t0}^{t1} value(t) dt`.
    pub fn integral(&self, t0: f64, t1: f64) -> f64 {
        match *self {
            TimeProfile::Zero => 0.0,
            TimeProfile::Constant(c) => c * (t1 - t0),
            TimeProfile::Affine { offset, slope } => {
                offset * (t1 - t0) + 0.5 * slope * (t1 * t1 - t0 * t0)
            }
            TimeProfile::Step { at, before, after } => {
                let split = at.clamp(t0, t1);
                before * (split - t0) + after * (t1 - split)
            }
            TimeProfile::Sine {
                amplitude,
                omega,
                phase,
            } => {
                if omega == 0.0 {
                    amplitude * math::sin(phase) * (t1 - t0)
                } else {
                    amplitude / omega * (math::cos(omega * t0 + phase) - math::cos(omega * t1 + phase))
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, TimeProfile::Zero)
            || matches!(self, TimeProfile::Constant(c) if *c == 0.0)
            || matches!(self, TimeProfile::Affine { offset, slope } if *offset == 0.0 && *slope == 0.0)
    }

    pub fn is_constant(&self) -> bool {
        match *self {
            TimeProfile::Zero | TimeProfile::Constant(_) => true,
            TimeProfile::Affine { slope, .. } => slope == 0.0,
            TimeProfile::Step { before, after, .. } => before == after,
            TimeProfile::Sine {
                amplitude, omega, ..
            } => amplitude == 0.0 || omega == 0.0,
        }
    }
}

/// Loading program over `[0, horizon]`.
pub trait LoadProgram {
    /// End of the time interval the program is defined on.
    fn horizon(&self) -> f64;

    /// `F(t)` into `out` (velocity space).
    fn force(&self, t: f64, out: &mut [f64]);

    /// `(1/(t1-t0)) ∫_{t0}^{t1} F(t) dt` into `out`.
    fn force_average(&self, t0: f64, t1: f64, out: &mut [f64]);

    /// `G(t)` into `out` (proto-stress space).
    fn proto_load(&self, t: f64, out: &mut [f64]);

    /// True when `G` does not depend on time, so `dG/dt` vanishes.
    fn proto_load_is_static(&self) -> bool {
        false
    }

    fn force_is_constant(&self) -> bool {
        false
    }
}

/// A sum of fixed spatial patterns scaled by [`TimeProfile`]s:
/// `F(t) = Σ a_i(t) f_i` and `G(t) = Σ b_j(t) g_j`.
#[derive(Debug)]
pub struct SeparableLoad {
    horizon: f64,
    velocity_len: usize,
    stress_len: usize,
    force_terms: Vec<(TimeProfile, Vec<f64>)>,
    proto_terms: Vec<(TimeProfile, Vec<f64>)>,
    clamp_reported: AtomicBool,
}

impl SeparableLoad {
    pub fn new(horizon: f64, velocity_len: usize, stress_len: usize) -> Self {
        Self {
            horizon,
            velocity_len,
            stress_len,
            force_terms: Vec::new(),
            proto_terms: Vec::new(),
            clamp_reported: AtomicBool::new(false),
        }
    }

    /// A program with `F ≡ 0` and `G ≡ 0`.
    pub fn none(horizon: f64, velocity_len: usize, stress_len: usize) -> Self {
        Self::new(horizon, velocity_len, stress_len)
    }

    pub fn with_force(mut self, profile: TimeProfile, pattern: Vec<f64>) -> Self {
        assert_eq!(pattern.len(), self.velocity_len, "force pattern length");
        self.force_terms.push((profile, pattern));
        self
    }

    pub fn with_proto_load(mut self, profile: TimeProfile, pattern: Vec<f64>) -> Self {
        assert_eq!(pattern.len(), self.stress_len, "proto-load pattern length");
        self.proto_terms.push((profile, pattern));
        self
    }

    pub fn velocity_len(&self) -> usize {
        self.velocity_len
    }

    pub fn stress_len(&self) -> usize {
        self.stress_len
    }

    fn clamp(&self, t: f64) -> f64 {
        if t > self.horizon {
            if !self.clamp_reported.swap(true, Ordering::Relaxed) {
                log::warn!(
                    "load evaluated at t = {t} beyond the program horizon {}; clamping",
                    self.horizon
                );
            }
            self.horizon
        } else {
            t
        }
    }
}

fn superpose(terms: &[(TimeProfile, Vec<f64>)], out: &mut [f64], coeff: impl Fn(&TimeProfile) -> f64) {
    out.iter_mut().for_each(|o| *o = 0.0);
    for (profile, pattern) in terms {
        let a = coeff(profile);
        if a != 0.0 {
            for (o, p) in out.iter_mut().zip(pattern) {
                *o += a * p;
            }
        }
    }
}

impl LoadProgram for SeparableLoad {
    fn horizon(&self) -> f64 {
        self.horizon
    }

    fn force(&self, t: f64, out: &mut [f64]) {
        let t = self.clamp(t);
        superpose(&self.force_terms, out, |p| p.value(t));
    }

    fn force_average(&self, t0: f64, t1: f64, out: &mut [f64]) {
        let len = t1 - t0;
        if t1 <= self.horizon {
            superpose(&self.force_terms, out, |p| p.integral(t0, t1) / len);
            return;
        }
        // Past the horizon the program is frozen at its final value.
        let _ = self.clamp(t1);
        let h = self.horizon;
        let inside_end = h.max(t0);
        superpose(&self.force_terms, out, |p| {
            let inside = if t0 < h { p.integral(t0, h) } else { 0.0 };
            (inside + p.value(h) * (t1 - inside_end)) / len
        });
    }

    fn proto_load(&self, t: f64, out: &mut [f64]) {
        let t = self.clamp(t);
        superpose(&self.proto_terms, out, |p| p.value(t));
    }

    fn proto_load_is_static(&self) -> bool {
        self.proto_terms.iter().all(|(p, _)| p.is_constant())
    }

    fn force_is_constant(&self) -> bool {
        self.force_terms.iter().all(|(p, _)| p.is_constant())
    }
}
