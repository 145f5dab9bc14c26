//! Empirical convergence from a sequence of uniformly refined runs.

use std::ops::ControlFlow;

use leapfrog_core::run as core_run;

use crate::config::ScenarioConfig;
use crate::scenarios::Simulation;
use crate::SimError;

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub h: Vec<f64>,
    /// `‖v_l - R v_finest‖` on level `l`, for all but the finest level.
    pub errors_vs_finest: Vec<f64>,
    /// `log2` ratios of consecutive entries of `errors_vs_finest`.
    pub orders_vs_finest: Vec<f64>,
    /// `‖v_l - R v_{l+1}‖` on level `l`.
    pub differences: Vec<f64>,
    /// `log2(d_l / d_{l+1})`; the Richardson estimate of the order, which does not
    /// assume the finest run is exact.
    pub richardson_orders: Vec<f64>,
}

impl ConvergenceReport {
    pub fn observed_order(&self) -> f64 {
        *self.richardson_orders.last().expect("at least three levels")
    }
}

/// Velocity at the final time, which the scheme carries at integer levels.
fn final_velocity(cfg: &ScenarioConfig) -> Result<(Vec<f64>, usize), SimError> {
    let sim = Simulation::new(cfg)?;
    let tau = cfg
        .time
        .tau
        .ok_or_else(|| SimError::Config("convergence levels need an explicit tau".into()))?;
    let n = sim.steps(tau);
    let state = sim.initial_state(tau)?;
    let out = core_run(state, &sim.ops, sim.process.as_dyn(), &sim.load, tau, n, |_, _| {
        ControlFlow::Continue(())
    });
    if let Some(e) = out.error {
        return Err(e.into());
    }
    Ok((out.state.v.to_vec(), cfg.domain.nx))
}

/// Averages 2×2 blocks of cell vectors: `n×n` cells to `n/2 × n/2`.
pub fn restrict(u: &[f64], n: usize) -> Vec<f64> {
    let m = n / 2;
    let mut out = vec![0.0; 2 * m * m];
    for j in 0..m {
        for i in 0..m {
            for c in 0..2 {
                let mut s = 0.0;
                for (di, dj) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
                    s += u[2 * ((2 * j + dj) * n + 2 * i + di) + c];
                }
                out[2 * (j * m + i) + c] = 0.25 * s;
            }
        }
    }
    out
}

fn l2_distance(a: &[f64], b: &[f64], h: f64) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt() * h
}

/// Runs the levels (coarsest first, each refining the previous by 2) and compares the
/// final velocities.
pub fn run_convergence(levels: &[ScenarioConfig]) -> Result<ConvergenceReport, SimError> {
    if levels.len() < 3 {
        return Err(SimError::Config("a convergence study needs at least 3 levels".into()));
    }
    for w in levels.windows(2) {
        if w[1].domain.nx != 2 * w[0].domain.nx || w[1].domain.ny != 2 * w[0].domain.ny {
            return Err(SimError::Config("each level must refine the previous one by 2".into()));
        }
        if w[0].domain.nx != w[0].domain.ny {
            return Err(SimError::Config("convergence levels must use square grids".into()));
        }
    }
    let runs: Vec<(Vec<f64>, usize)> = levels.iter().map(final_velocity).collect::<Result<_, _>>()?;
    let h: Vec<f64> = levels.iter().map(|c| c.domain.h()).collect();

    let finest = runs.len() - 1;
    let mut errors_vs_finest = Vec::new();
    for l in 0..finest {
        let mut r = runs[finest].0.clone();
        let mut n = runs[finest].1;
        while n > runs[l].1 {
            r = restrict(&r, n);
            n /= 2;
        }
        errors_vs_finest.push(l2_distance(&runs[l].0, &r, h[l]));
    }
    let differences: Vec<f64> = (0..finest)
        .map(|l| l2_distance(&runs[l].0, &restrict(&runs[l + 1].0, runs[l + 1].1), h[l]))
        .collect();
    let orders = |e: &[f64]| e.windows(2).map(|w| (w[0] / w[1]).log2()).collect::<Vec<_>>();
    Ok(ConvergenceReport {
        orders_vs_finest: orders(&errors_vs_finest),
        richardson_orders: orders(&differences),
        h,
        errors_vs_finest,
        differences,
    })
}
