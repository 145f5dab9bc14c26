//! Long-run invariants of the scheme without dissipation, and the energy audit with it.

mod common;

use std::ops::ControlFlow;

use common::*;
use leapfrog_core::elastic2d::{BoundarySpec, Elastic2d, Grid2D, Side, TractionPatch};
use leapfrog_core::processes::{
    ruptured, AdhesiveParams, AdhesiveProcess, NullProcess, ThresholdReading, ViscoplasticParams, ViscoplasticProcess,
};
use leapfrog_core::{
    central_difference_step, estimate_tau_max, run, DofVector, InternalProcess, LeapFrog, EstimatorConfig,
    SeparableLoad, SpaceTag, StaggeredState, SystemOps, TimeProfile,
};

fn tau_for(ops: &Elastic2d, process: &dyn InternalProcess, factor: f64) -> f64 {
    factor * estimate_tau_max(ops, process, 0.1, &EstimatorConfig::default()).unwrap().tau_max
}

#[test]
fn free_body_conserves_twisted_energy_and_momentum() {
    let ops = free_ops(40, 40, 0.25);
    let process = NullProcess::new(ops.layout().clone());
    let tau = tau_for(&ops, &process, 0.9);
    let load = SeparableLoad::none(1e3, ops.velocity_len(), ops.stress_len());
    let mut rng = rng(31);
    let mut v0 = random(&mut rng, ops.velocity_len(), 1.0);
    // a nonzero mean so the momentum check is not trivially about zero
    for (i, v) in v0.iter_mut().enumerate() {
        *v += if i % 2 == 0 { 0.3 } else { -0.2 };
    }
    let sigma0 = random(&mut rng, ops.stress_len(), 0.5);
    let state = StaggeredState::start(
        &ops,
        &load,
        tau,
        DofVector::from_vec(SpaceTag::S, sigma0),
        DofVector::from_vec(SpaceTag::H, v0.clone()),
        DofVector::zeros(SpaceTag::Z, 0),
        DofVector::zeros(SpaceTag::H, ops.velocity_len()),
    )
    .unwrap();
    let p0 = ops.momentum(&v0);
    let m = ops.mass_diagonal()[0];
    let p_scale: f64 = v0.iter().map(|v| m * v.abs()).sum();
    let mut worst_p = 0.0f64;
    let out = run(state, &ops, &process, &load, tau, 1000, |s, _| {
        let p = ops.momentum(&s.v);
        worst_p = worst_p.max((p[0] - p0[0]).abs()).max((p[1] - p0[1]).abs());
        ControlFlow::Continue(())
    });
    assert!(out.error.is_none());
    let e0 = out.ledger[0].total();
    let drift = out.ledger.iter().map(|r| (r.total() - e0).abs()).fold(0.0, f64::max);
    assert!(drift <= 1e-10 * e0.abs(), "energy drift {drift} of {e0}");
    assert!(worst_p <= 1e-12 * p_scale, "momentum drift {worst_p} of {p_scale}");
    assert!(out.ledger.iter().all(|r| r.imbalance.abs() <= 1e-10 * r.scale()));
}

#[test]
fn intact_adhesive_exchanges_energy_without_loss() {
    let layout = banded_layout(12, 12, 0.5, 0.5);
    let ops = Elastic2d::new(layout.clone());
    let params = AdhesiveParams {
        toughness: 1e6,
        viscosity: 0.0,
        healing: false,
        reading: ThresholdReading::Activation,
    };
    let process = AdhesiveProcess::new(layout, params).unwrap();
    let tau = tau_for(&ops, &process, 0.9);
    let load = SeparableLoad::none(1e3, ops.velocity_len(), ops.stress_len());
    let mut rng = rng(32);
    let mut state = StaggeredState::at_rest(&ops, &process);
    let v0 = DofVector::from_vec(SpaceTag::H, random(&mut rng, ops.velocity_len(), 1.0));
    state = StaggeredState::start(&ops, &load, tau, state.sigma, v0, state.z, state.u).unwrap();
    let out = run(state, &ops, &process, &load, tau, 2000, |_, _| ControlFlow::Continue(()));
    assert!(out.error.is_none());
    assert_eq!(ruptured(&out.state.z), 0);
    let e0 = out.ledger[0].total();
    for r in &out.ledger {
        assert!((r.total() - e0).abs() <= 1e-9 * e0, "step {}: {} vs {e0}", r.k, r.total());
        assert_eq!(r.dissipated_cum, 0.0);
    }
}

fn pulled_block(nx: usize, h: f64, toughness: f64) -> (Elastic2d, AdhesiveProcess, SeparableLoad) {
    let grid = Grid2D::new(nx, nx, h).unwrap();
    let band = leapfrog_core::elastic2d::AdhesiveBand::centered(&grid, 0.5, [[0.5, 0.0], [0.0, 0.5]]).unwrap();
    let boundary = BoundarySpec {
        adhesive: Some(band),
        tractions: vec![TractionPatch::whole_side(&grid, Side::Top, [0.0, 1.0], TimeProfile::ramp(0.02))],
    };
    let ops = Elastic2d::from_parts(grid, reference_material(), &boundary).unwrap();
    let load = boundary.load_program(&grid, 1e3);
    let params = AdhesiveParams {
        toughness,
        viscosity: 0.0,
        healing: false,
        reading: ThresholdReading::Activation,
    };
    let process = AdhesiveProcess::new(ops.layout().clone(), params).unwrap();
    (ops, process, load)
}

#[test]
fn rupture_releases_exactly_the_dissipated_energy() {
    let (ops, process, load) = pulled_block(16, 0.5, 1e-4);
    let tau = tau_for(&ops, &process, 0.9);
    let mut stepper = LeapFrog::new(&ops, &process, &load, tau).unwrap();
    let mut state = StaggeredState::at_rest(&ops, &process);
    let mut ruptures = 0;
    let mut prev_diss = 0.0;
    for _ in 0..4000 {
        let before = state.clone();
        let row = stepper.step(&mut state).unwrap();
        let jump = row.dissipated_cum - prev_diss;
        prev_diss = row.dissipated_cum;
        assert!(row.imbalance.abs() <= 1e-10 * row.scale().max(1e-30), "step {}: {}", row.k, row.imbalance);
        if state.z != before.z {
            ruptures += 1;
            let released = process.phi(&state.sigma, &before.z) - process.phi(&state.sigma, &state.z);
            assert!(jump > 0.0);
            // both sides are differences of O(Φ) quantities
            let phi = process.phi(&state.sigma, &before.z);
            assert!((jump - released).abs() <= 1e-12 * phi, "{jump} vs {released}");
        } else {
            assert_eq!(jump, 0.0);
        }
        if ruptured(&state.z) == state.z.len() {
            break;
        }
    }
    assert!(ruptures > 0, "the band never debonded");
}

#[test]
fn viscoplastic_ledger_balances() {
    let grid = Grid2D::new(16, 16, 0.5).unwrap();
    let boundary = BoundarySpec {
        adhesive: None,
        tractions: vec![TractionPatch::whole_side(&grid, Side::Top, [0.3, 1.0], TimeProfile::ramp(0.05))],
    };
    let ops = Elastic2d::from_parts(grid, reference_material(), &boundary).unwrap();
    let load = boundary.load_program(&grid, 1e3);
    let params = ViscoplasticParams {
        yield_stress: 0.02,
        viscosity: 0.5,
        hardening: 0.1,
    };
    let process = ViscoplasticProcess::new(ops.layout().clone(), params).unwrap();
    let tau = tau_for(&ops, &process, 0.9);
    let state = StaggeredState::at_rest(&ops, &process);
    let out = run(state, &ops, &process, &load, tau, 1500, |_, _| ControlFlow::Continue(()));
    assert!(out.error.is_none());
    let last = out.ledger.last().unwrap();
    assert!(last.dissipated_cum > 0.0, "no plastic flow");
    assert!(last.work_cum > 0.0);
    for r in &out.ledger {
        assert!(r.imbalance.abs() <= 1e-10 * r.scale().max(1e-30), "step {}: {}", r.k, r.imbalance);
        assert!(r.a_coeff > 0.0);
    }
}

#[test]
fn central_difference_agrees_with_leap_frog_displacement() {
    let ops = free_ops(10, 10, 0.5);
    let process = NullProcess::new(ops.layout().clone());
    let tau = tau_for(&ops, &process, 0.8);
    let load = SeparableLoad::none(1e3, ops.velocity_len(), ops.stress_len());
    let mut rng = rng(33);
    let v0 = random(&mut rng, ops.velocity_len(), 1.0);
    // with Σ^0 = 0 the stress after step k is C E (u^k + τ/2 v^0); starting the
    // displacement at τ/2 v^0 makes u^k exactly the central-difference iterate
    let u0: Vec<f64> = v0.iter().map(|v| 0.5 * tau * v).collect();
    let state = StaggeredState::start(
        &ops,
        &load,
        tau,
        DofVector::zeros(SpaceTag::S, ops.stress_len()),
        DofVector::from_vec(SpaceTag::H, v0),
        DofVector::zeros(SpaceTag::Z, 0),
        DofVector::from_vec(SpaceTag::H, u0),
    )
    .unwrap();
    let mut us = vec![state.u.to_vec()];
    let out = run(state, &ops, &process, &load, tau, 200, |s, _| {
        us.push(s.u.to_vec());
        ControlFlow::Continue(())
    });
    assert!(out.error.is_none());
    let scale = us.iter().flatten().fold(0.0f64, |a, b| a.max(b.abs()));
    let mut prev = us[0].clone();
    let mut curr = us[1].clone();
    for k in 1..us.len() - 1 {
        let next = central_difference_step(&prev, &curr, &ops, &process, &load, k as u64, tau).unwrap();
        let err = next.iter().zip(&us[k + 1]).fold(0.0f64, |a, (x, y)| a.max((x - y).abs()));
        assert!(err <= 1e-11 * scale, "step {k}: {err}");
        prev = curr;
        curr = next.to_vec();
    }
}
