//! The three-step staggered scheme.
//!
//! One step advances `(Σ^k, v^k, z^k)` to `(Σ^{k+1}, v^{k+1}, z^{k+1})`:
//!
//! 1. `Σ^{k+1} = Σ^k + τ (C E v^k + D^k)`,
//! 2. `z^{k+1}` from the local flow rule at frozen `Σ^{k+1}`,
//! 3. `v^{k+1} = v^k + τ M⁻¹ (F^{k+1} - E^* C^* Φ'_Σ(Σ^{k+1}, z^{k+1}))`, `u^{k+1} = u^k + τ v^{k+1}`.
//!
//! `F^{k+1}` is the load averaged over `[kτ, (k+1)τ]` and `D^k` a central difference of
//! `G` at the staggered instants. The stress carried in the state at level `k` is thus
//! "half a step ahead" of the velocity.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::ControlFlow;

use crate::dof::{DofVector, SpaceTag};
use crate::load::LoadProgram;
use crate::math;
use crate::ops::SystemOps;
use crate::process::InternalProcess;
use crate::{Error, Result, BLOW_UP_THRESHOLD};

/// Integrator state at level `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct StaggeredState {
    /// Proto-stress produced by the latest stress update.
    pub sigma: DofVector,
    pub v: DofVector,
    pub z: DofVector,
    /// Displacement, `u^0 + τ Σ_j v^j`. With `v^k ≈ v(kτ)` this is first order
    /// at `t = kτ`; see [`StaggeredState::displacement_at_level`].
    pub u: DofVector,
    pub k: u64,
    pub t: f64,
}

impl StaggeredState {
    pub fn zeros(velocity_len: usize, stress_len: usize, internal_len: usize) -> Self {
        Self {
            sigma: DofVector::zeros(SpaceTag::S, stress_len),
            v: DofVector::zeros(SpaceTag::H, velocity_len),
            z: DofVector::zeros(SpaceTag::Z, internal_len),
            u: DofVector::zeros(SpaceTag::H, velocity_len),
            k: 0,
            t: 0.0,
        }
    }

    /// A quiescent state with the process in its initial configuration.
    pub fn at_rest<O, P>(ops: &O, process: &P) -> Self
    where
        O: SystemOps + ?Sized,
        P: InternalProcess + ?Sized,
    {
        let mut s = Self::zeros(ops.velocity_len(), ops.stress_len(), process.internal_len());
        process.initial_state(&mut s.z);
        s
    }

    /// Prepares the state for the first step from data at `t = 0`.
    ///
    /// The stored stress is chosen so that the first regular step produces the
    /// half-step value of [`init_half_step`]; it is not a physical stress.
    #[allow(clippy::too_many_arguments)]
    pub fn start<O, L>(
        ops: &O,
        program: &L,
        tau: f64,
        sigma0: DofVector,
        v0: DofVector,
        z0: DofVector,
        u0: DofVector,
    ) -> Result<Self>
    where
        O: SystemOps + ?Sized,
        L: LoadProgram + ?Sized,
    {
        check_len("displacement", v0.len(), u0.len())?;
        let half = init_half_step(&sigma0, &v0, tau, ops, program)?;
        let d0 = difference_load_g(program, 0, tau, ops.stress_len());
        let mut rate = vec![0.0; ops.stress_len()];
        let mut strain = vec![0.0; ops.stress_len()];
        let mut sigma = half;
        ops.apply_e(&v0, &mut strain);
        ops.apply_c(&strain, &mut rate);
        for ((s, r), d) in sigma.iter_mut().zip(rate.iter()).zip(d0.iter()) {
            *s -= tau * (r + d);
        }
        Ok(Self {
            sigma,
            v: v0,
            z: z0,
            u: u0,
            k: 0,
            t: 0.0,
        })
    }

    /// Second-order displacement at `t = kτ`: `u^k - τ(v^k - v^0)/2`, i.e. the
    /// trapezoidal sum of the velocities instead of the rectangle sum kept in `u`.
    pub fn displacement_at_level(&self, v0: &[f64], tau: f64) -> DofVector {
        let u = self
            .u
            .iter()
            .zip(self.v.iter())
            .zip(v0)
            .map(|((u, v), w)| u - 0.5 * tau * (v - w))
            .collect();
        DofVector::from_vec(SpaceTag::H, u)
    }
}

/// One row of the energy audit, evaluated after a step.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EnergyLedger {
    pub k: u64,
    pub t: f64,
    /// `½<M v^{k+1}, v^k>`
    pub twisted_kinetic: f64,
    /// `Φ(Σ^{k+1}, z^{k+1})`
    pub stored: f64,
    pub dissipated_cum: f64,
    pub work_cum: f64,
    /// `1 - τ²/8 · <E^*S, M⁻¹E^*S> / Φ`; the twisted energy controls `a·Φ` from below.
    pub a_coeff: f64,
    /// Residual of the discrete energy balance over the step (zero for the first row).
    pub imbalance: f64,
}

impl EnergyLedger {
    pub fn total(&self) -> f64 {
        self.twisted_kinetic + self.stored
    }

    /// Magnitude the imbalance should be compared against.
    pub fn scale(&self) -> f64 {
        self.total()
            .abs()
            .max(self.dissipated_cum.abs())
            .max(self.work_cum.abs())
    }
}

/// Running maxima of the field norms.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Bounds {
    pub v: f64,
    pub sigma: f64,
    pub z: f64,
}

impl Bounds {
    fn observe(&mut self, state: &StaggeredState) {
        self.v = self.v.max(state.v.norm());
        self.sigma = self.sigma.max(state.sigma.norm());
        self.z = self.z.max(state.z.norm());
    }
}

/// Result of [`run`]. On failure `error` is set and `state` holds the last good state.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub state: StaggeredState,
    pub ledger: Vec<EnergyLedger>,
    pub bounds: Bounds,
    pub error: Option<Error>,
}

/// What the stepper remembers from the previous step for the audit.
#[derive(Debug, Clone)]
struct Carry {
    dual: Vec<f64>,
    load: Vec<f64>,
    energy: f64,
}

/// Stateful stepper holding scratch buffers and the audit history.
pub struct LeapFrog<'a, O: ?Sized, P: ?Sized, L: ?Sized> {
    ops: &'a O,
    process: &'a P,
    program: &'a L,
    tau: f64,
    audit: bool,
    strain: Vec<f64>,
    stress: Vec<f64>,
    load_s: Vec<f64>,
    dual: Vec<f64>,
    dual_old_z: Vec<f64>,
    force: Vec<f64>,
    load_h: Vec<f64>,
    sigma_old: Vec<f64>,
    v_old: Vec<f64>,
    z_old: Vec<f64>,
    carry: Option<Carry>,
    dissipated_cum: f64,
    work_cum: f64,
}

impl<'a, O, P, L> LeapFrog<'a, O, P, L>
where
    O: SystemOps + ?Sized,
    P: InternalProcess + ?Sized,
    L: LoadProgram + ?Sized,
{
    pub fn new(ops: &'a O, process: &'a P, program: &'a L, tau: f64) -> Result<Self> {
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::Config(alloc::format!("time step must be positive, got {tau}")));
        }
        check_len("process stress layout", ops.stress_len(), process.stress_len())?;
        if !program.force_is_constant() {
            log::info!("time-dependent force: the a-priori stability bound assumes constant loads");
        }
        let ns = ops.stress_len();
        let nh = ops.velocity_len();
        let nz = process.internal_len();
        Ok(Self {
            ops,
            process,
            program,
            tau,
            audit: true,
            strain: vec![0.0; ns],
            stress: vec![0.0; ns],
            load_s: vec![0.0; ns],
            dual: vec![0.0; ns],
            dual_old_z: vec![0.0; ns],
            force: vec![0.0; nh],
            load_h: vec![0.0; nh],
            sigma_old: vec![0.0; ns],
            v_old: vec![0.0; nh],
            z_old: vec![0.0; nz],
            carry: None,
            dissipated_cum: 0.0,
            work_cum: 0.0,
        })
    }

    /// Disables the energy audit; [`step`](Self::step) then returns a ledger with only
    /// `k` and `t` filled in.
    pub fn without_audit(mut self) -> Self {
        self.audit = false;
        self
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    fn check_state(&self, state: &StaggeredState) -> Result<()> {
        check_len("stress", self.ops.stress_len(), state.sigma.len())?;
        check_len("velocity", self.ops.velocity_len(), state.v.len())?;
        check_len("displacement", self.ops.velocity_len(), state.u.len())?;
        check_len("internal variable", self.process.internal_len(), state.z.len())
    }

    /// Advances `state` by one step and returns the audit row for the new level.
    pub fn step(&mut self, state: &mut StaggeredState) -> Result<EnergyLedger> {
        self.check_state(state)?;
        let tau = self.tau;
        let k = state.k;
        let ops = self.ops;
        let process = self.process;

        // (1) stress update
        fill_difference_load_g(self.program, k, tau, &mut self.load_s);
        self.sigma_old.copy_from_slice(&state.sigma);
        ops.accumulate_stress_rate(&state.v, tau, &mut state.sigma, &mut self.strain, &mut self.stress);
        for (s, d) in state.sigma.iter_mut().zip(&self.load_s) {
            *s += tau * d;
        }
        check_finite(&state.sigma, k + 1, "sigma")?;

        // (2) internal variable
        self.z_old.copy_from_slice(&state.z);
        if !self.z_old.is_empty() {
            process
                .solve_flow_rule(&state.sigma, &self.z_old, tau, &mut state.z)
                .map_err(|e| match e {
                    Error::Process { reason, .. } => Error::Process { step: k + 1, reason },
                    other => other,
                })?;
            check_finite(&state.z, k + 1, "z")?;
        }

        // (3) momentum
        process.phi_sigma_prime(&state.sigma, &state.z, &mut self.dual);
        ops.apply_force(&self.dual, &mut self.force, &mut self.stress);
        self.program
            .force_average(k as f64 * tau, (k + 1) as f64 * tau, &mut self.load_h);
        self.v_old.copy_from_slice(&state.v);
        let mass = ops.mass_diagonal();
        for i in 0..state.v.len() {
            state.v[i] += tau * (self.load_h[i] - self.force[i]) / mass[i];
        }
        check_finite(&state.v, k + 1, "v")?;
        state.u.axpy(tau, &state.v);
        check_finite(&state.u, k + 1, "u")?;

        state.k = k + 1;
        state.t = state.k as f64 * tau;

        if !self.audit {
            return Ok(EnergyLedger {
                k: state.k,
                t: state.t,
                ..EnergyLedger::default()
            });
        }
        Ok(self.audit_step(state))
    }

    fn audit_step(&mut self, state: &StaggeredState) -> EnergyLedger {
        let tau = self.tau;
        let process = self.process;
        let mass = self.ops.mass_diagonal();

        let twisted = 0.5 * math::weighted_dot(&state.v, mass, &self.v_old);
        let stored = process.phi(&state.sigma, &state.z);
        let energy = twisted + stored;
        let x = math::pairwise_sum(self.force.len(), &|i| self.force[i] * self.force[i] / mass[i]);
        let a_coeff = if x == 0.0 {
            1.0
        } else if stored > 0.0 {
            1.0 - tau * tau * x / (8.0 * stored)
        } else {
            f64::NEG_INFINITY
        };

        let z_changed = state.z.as_slice() != self.z_old.as_slice();
        let (dissipated, split) = if z_changed {
            let d = process.dissipation_increment(&state.sigma, &self.z_old, &state.z, tau);
            process.phi_sigma_prime(&state.sigma, &self.z_old, &mut self.dual_old_z);
            let n = state.sigma.len();
            let split = -0.5
                * math::pairwise_sum(n, &|i| {
                    (self.dual[i] - self.dual_old_z[i]) * (state.sigma[i] - self.sigma_old[i])
                });
            (d, split)
        } else {
            (0.0, 0.0)
        };
        self.dissipated_cum += dissipated;

        let imbalance = match self.carry.as_mut() {
            Some(carry) => {
                let nh = self.load_h.len();
                let ns = self.dual.len();
                let work = tau
                    * math::pairwise_sum(nh, &|i| {
                        0.5 * (self.load_h[i] + carry.load[i]) * self.v_old[i]
                    })
                    + tau
                        * math::pairwise_sum(ns, &|i| {
                            0.5 * (self.dual[i] + carry.dual[i]) * self.load_s[i]
                        });
                self.work_cum += work;
                let r = (energy - carry.energy) + dissipated - work - split;
                carry.dual.copy_from_slice(&self.dual);
                carry.load.copy_from_slice(&self.load_h);
                carry.energy = energy;
                r
            }
            None => {
                self.carry = Some(Carry {
                    dual: self.dual.clone(),
                    load: self.load_h.clone(),
                    energy,
                });
                0.0
            }
        };

        EnergyLedger {
            k: state.k,
            t: state.t,
            twisted_kinetic: twisted,
            stored,
            dissipated_cum: self.dissipated_cum,
            work_cum: self.work_cum,
            a_coeff,
            imbalance,
        }
    }
}

fn check_len(what: &'static str, expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::Dimension { what, expected, got })
    }
}

fn check_finite(values: &[f64], step: u64, field: &'static str) -> Result<()> {
    match math::max_abs_finite(values) {
        Some(m) if m <= BLOW_UP_THRESHOLD => Ok(()),
        Some(m) => Err(Error::BlowUp {
            step,
            field,
            magnitude: m,
        }),
        None => Err(Error::BlowUp {
            step,
            field,
            magnitude: f64::INFINITY,
        }),
    }
}

/// `(1/τ) ∫_{kτ}^{(k+1)τ} F(t) dt`.
pub fn average_load_f<L: LoadProgram + ?Sized>(program: &L, k: u64, tau: f64, len: usize) -> DofVector {
    let mut out = DofVector::zeros(SpaceTag::H, len);
    program.force_average(k as f64 * tau, (k + 1) as f64 * tau, &mut out);
    out
}

fn fill_difference_load_g<L: LoadProgram + ?Sized>(program: &L, k: u64, tau: f64, out: &mut [f64]) {
    if program.proto_load_is_static() {
        out.iter_mut().for_each(|x| *x = 0.0);
        return;
    }
    let (t0, t1, scale) = if k == 0 {
        (0.0, 0.5 * tau, 2.0 / tau)
    } else {
        ((k as f64 - 0.5) * tau, (k as f64 + 0.5) * tau, 1.0 / tau)
    };
    let mut before = vec![0.0; out.len()];
    program.proto_load(t0, &mut before);
    program.proto_load(t1, out);
    for (o, b) in out.iter_mut().zip(&before) {
        *o = (*o - b) * scale;
    }
}

/// `D^k = (G((k+½)τ) - G((k-½)τ))/τ`; for `k = 0` the one-sided `2(G(τ/2) - G(0))/τ`.
pub fn difference_load_g<L: LoadProgram + ?Sized>(program: &L, k: u64, tau: f64, len: usize) -> DofVector {
    let mut out = DofVector::zeros(SpaceTag::S, len);
    fill_difference_load_g(program, k, tau, &mut out);
    out
}

/// `Σ^{1/2} = Σ^0 + (τ/2) C E v^0 + G(τ/2) - G(0)`.
///
/// The load increment equals `(τ/2) dG/dt(0)` whenever `G` is affine on `[0, τ/2]`.
pub fn init_half_step<O, L>(
    sigma0: &[f64],
    v0: &[f64],
    tau: f64,
    ops: &O,
    program: &L,
) -> Result<DofVector>
where
    O: SystemOps + ?Sized,
    L: LoadProgram + ?Sized,
{
    check_len("initial stress", ops.stress_len(), sigma0.len())?;
    check_len("initial velocity", ops.velocity_len(), v0.len())?;
    let n = ops.stress_len();
    let mut out = DofVector::from_vec(SpaceTag::S, sigma0.to_vec());
    let mut strain = vec![0.0; n];
    let mut stress = vec![0.0; n];
    ops.accumulate_stress_rate(v0, 0.5 * tau, &mut out, &mut strain, &mut stress);
    if !program.proto_load_is_static() {
        let mut g0 = vec![0.0; n];
        let mut g1 = vec![0.0; n];
        program.proto_load(0.0, &mut g0);
        program.proto_load(0.5 * tau, &mut g1);
        for i in 0..n {
            out[i] += g1[i] - g0[i];
        }
    }
    Ok(out)
}

/// Single step without keeping a stepper around.
pub fn step<O, P, L>(state: &StaggeredState, ops: &O, process: &P, program: &L, tau: f64) -> Result<StaggeredState>
where
    O: SystemOps + ?Sized,
    P: InternalProcess + ?Sized,
    L: LoadProgram + ?Sized,
{
    let mut next = state.clone();
    LeapFrog::new(ops, process, program, tau)?
        .without_audit()
        .step(&mut next)?;
    Ok(next)
}

/// Runs `n_steps` steps. `monitor` sees every new state with its ledger row and may
/// stop the run early by returning `ControlFlow::Break`.
pub fn run<O, P, L, M>(
    state: StaggeredState,
    ops: &O,
    process: &P,
    program: &L,
    tau: f64,
    n_steps: u64,
    mut monitor: M,
) -> RunOutput
where
    O: SystemOps + ?Sized,
    P: InternalProcess + ?Sized,
    L: LoadProgram + ?Sized,
    M: FnMut(&StaggeredState, &EnergyLedger) -> ControlFlow<()>,
{
    let mut state = state;
    let mut bounds = Bounds::default();
    bounds.observe(&state);
    let mut ledger = Vec::with_capacity(n_steps as usize);
    let mut stepper = match LeapFrog::new(ops, process, program, tau) {
        Ok(s) => s,
        Err(e) => {
            return RunOutput {
                state,
                ledger,
                bounds,
                error: Some(e),
            }
        }
    };
    let mut scratch = state.clone();
    for _ in 0..n_steps {
        scratch.clone_from(&state);
        match stepper.step(&mut scratch) {
            Ok(row) => {
                core::mem::swap(&mut state, &mut scratch);
                bounds.observe(&state);
                ledger.push(row);
                if monitor(&state, &row).is_break() {
                    break;
                }
            }
            Err(e) => {
                return RunOutput {
                    state,
                    ledger,
                    bounds,
                    error: Some(e),
                }
            }
        }
    }
    RunOutput {
        state,
        ledger,
        bounds,
        error: None,
    }
}

/// Instantaneous energy terms of `state` given the previous velocity. Cumulative
/// columns and the imbalance need the step history and are left at zero; use
/// [`LeapFrog`] for the full ledger.
pub fn energy_report<O, P>(prev_v: &[f64], state: &StaggeredState, ops: &O, process: &P, tau: f64) -> EnergyLedger
where
    O: SystemOps + ?Sized,
    P: InternalProcess + ?Sized,
{
    let mass = ops.mass_diagonal();
    let twisted = 0.5 * math::weighted_dot(&state.v, mass, prev_v);
    let stored = process.phi(&state.sigma, &state.z);
    let mut dual = vec![0.0; ops.stress_len()];
    let mut scratch = vec![0.0; ops.stress_len()];
    let mut force = vec![0.0; ops.velocity_len()];
    process.phi_sigma_prime(&state.sigma, &state.z, &mut dual);
    ops.apply_force(&dual, &mut force, &mut scratch);
    let x = math::pairwise_sum(force.len(), &|i| force[i] * force[i] / mass[i]);
    let a_coeff = if x == 0.0 {
        1.0
    } else if stored > 0.0 {
        1.0 - tau * tau * x / (8.0 * stored)
    } else {
        f64::NEG_INFINITY
    };
    EnergyLedger {
        k: state.k,
        t: state.t,
        twisted_kinetic: twisted,
        stored,
        a_coeff,
        ..EnergyLedger::default()
    }
}

/// Displacement form of plain elastodynamics:
/// `u^{k+1} = 2u^k - u^{k-1} + τ² M⁻¹ (F(kτ) - E^* C^* Φ'_Σ(C E u^k))`.
///
/// `process` supplies the elastic energy and must not carry an internal variable.
#[allow(clippy::too_many_arguments)]
pub fn central_difference_step<O, P, L>(
    u_prev: &[f64],
    u_curr: &[f64],
    ops: &O,
    process: &P,
    program: &L,
    k: u64,
    tau: f64,
) -> Result<DofVector>
where
    O: SystemOps + ?Sized,
    P: InternalProcess + ?Sized,
    L: LoadProgram + ?Sized,
{
    if process.internal_len() != 0 {
        return Err(Error::Config("central-difference scheme needs a process without internal variables".into()));
    }
    let nh = ops.velocity_len();
    let ns = ops.stress_len();
    check_len("previous displacement", nh, u_prev.len())?;
    check_len("current displacement", nh, u_curr.len())?;
    let mut sigma = vec![0.0; ns];
    let mut strain = vec![0.0; ns];
    let mut scratch = vec![0.0; ns];
    ops.accumulate_stress_rate(u_curr, 1.0, &mut sigma, &mut strain, &mut scratch);
    let mut dual = vec![0.0; ns];
    process.phi_sigma_prime(&sigma, &[], &mut dual);
    let mut force = vec![0.0; nh];
    ops.apply_force(&dual, &mut force, &mut scratch);
    let mut load = vec![0.0; nh];
    program.force(k as f64 * tau, &mut load);
    let mass = ops.mass_diagonal();
    let next: Vec<f64> = (0..nh)
        .map(|i| 2.0 * u_curr[i] - u_prev[i] + tau * tau * (load[i] - force[i]) / mass[i])
        .collect();
    check_finite(&next, k + 1, "u")?;
    Ok(DofVector::from_vec(SpaceTag::H, next))
}
