//! Wavefield diagnostics at the nodes: divergence, rotation, speed.

use alloc::vec::Vec;

use super::operators::ElasticLayout;
use crate::math;

/// Node fields, row-major with `x` fastest.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct NodeFields {
    pub vnorm: Vec<f64>,
    pub div: Vec<f64>,
    pub rot: Vec<f64>,
}

/// `div v = ∂x vx + ∂y vy` and `rot v = ∂x vy - ∂y vx` with the stencil of `apply_e`.
pub fn helmholtz(layout: &ElasticLayout, v: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let g = &layout.grid;
    let mut div = Vec::with_capacity(g.node_count());
    let mut rot = Vec::with_capacity(g.node_count());
    for j in 0..=g.ny {
        for i in 0..=g.nx {
            let [xx, xy, yx, yy] = layout.velocity_gradient(v, i, j);
            div.push(xx + yy);
            rot.push(yx - xy);
        }
    }
    (div, rot)
}

/// `|v|` at nodes, from the mean of the adjacent cell velocities.
pub fn node_speed(layout: &ElasticLayout, v: &[f64]) -> Vec<f64> {
    let g = &layout.grid;
    let mut out = Vec::with_capacity(g.node_count());
    for j in 0..=g.ny {
        for i in 0..=g.nx {
            let (mut sx, mut sy, mut n) = (0.0, 0.0, 0.0);
            for cj in j.saturating_sub(1)..(j + 1).min(g.ny) {
                for ci in i.saturating_sub(1)..(i + 1).min(g.nx) {
                    let c = g.cell_index(ci, cj);
                    sx += v[2 * c];
                    sy += v[2 * c + 1];
                    n += 1.0;
                }
            }
            out.push(math::hypot(sx / n, sy / n));
        }
    }
    out
}

pub fn node_fields(layout: &ElasticLayout, v: &[f64]) -> NodeFields {
    let (div, rot) = helmholtz(layout, v);
    NodeFields {
        vnorm: node_speed(layout, v),
        div,
        rot,
    }
}
