#![allow(dead_code)]

use leapfrog_core::elastic2d::{AdhesiveBand, BoundarySpec, Elastic2d, ElasticLayout, Grid2D, MaterialParams};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn reference_material() -> MaterialParams {
    MaterialParams::new(1.66, 1.0, 1.0).unwrap()
}

pub fn free_ops(nx: usize, ny: usize, h: f64) -> Elastic2d {
    Elastic2d::from_parts(Grid2D::new(nx, ny, h).unwrap(), reference_material(), &BoundarySpec::free()).unwrap()
}

pub fn banded_layout(nx: usize, ny: usize, h: f64, fraction: f64) -> ElasticLayout {
    let grid = Grid2D::new(nx, ny, h).unwrap();
    let band = AdhesiveBand::centered(&grid, fraction, [[0.5, 0.0], [0.0, 0.5]]).unwrap();
    ElasticLayout::new(grid, reference_material(), Some(band)).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> Vec<f64> {
    (0..n).map(|_| scale * rng.gen_range(-1.0..1.0)).collect()
}

/// Strain operator assembled entry by entry from the pair description: at a node,
/// each derivative averages `(v_a - v_b)/h` over the neighbouring cell pairs that
/// exist; adhesive segments read minus the trace cell velocity.
pub fn dense_e(layout: &ElasticLayout) -> DMatrix<f64> {
    let g = &layout.grid;
    let (nx, ny, h) = (g.nx, g.ny, g.h);
    let ns = layout.stress_len();
    let nh = layout.velocity_len();
    let mut e = DMatrix::zeros(ns, nh);
    let cell = |i: usize, j: usize| j * nx + i;
    for j in 0..=ny {
        for i in 0..=nx {
            let n = j * (nx + 1) + i;
            // horizontal pairs (right, left) in the rows below/above the node
            let mut xpairs = vec![];
            if i >= 1 && i < nx {
                if j >= 1 {
                    xpairs.push((cell(i, j - 1), cell(i - 1, j - 1)));
                }
                if j < ny {
                    xpairs.push((cell(i, j), cell(i - 1, j)));
                }
            }
            let mut ypairs = vec![];
            if j >= 1 && j < ny {
                if i >= 1 {
                    ypairs.push((cell(i - 1, j), cell(i - 1, j - 1)));
                }
                if i < nx {
                    ypairs.push((cell(i, j), cell(i, j - 1)));
                }
            }
            for &(a, b) in &xpairs {
                let c = 1.0 / (xpairs.len() as f64 * h);
                // e_xx <- ∂x vx, γ <- ∂x vy
                e[(3 * n, 2 * a)] += c;
                e[(3 * n, 2 * b)] -= c;
                e[(3 * n + 2, 2 * a + 1)] += c;
                e[(3 * n + 2, 2 * b + 1)] -= c;
            }
            for &(a, b) in &ypairs {
                let c = 1.0 / (ypairs.len() as f64 * h);
                e[(3 * n + 1, 2 * a + 1)] += c;
                e[(3 * n + 1, 2 * b + 1)] -= c;
                e[(3 * n + 2, 2 * a)] += c;
                e[(3 * n + 2, 2 * b)] -= c;
            }
        }
    }
    if let Some(band) = layout.band {
        let off = 3 * g.node_count();
        for k in 0..band.count {
            let c = cell(band.first + k, 0);
            e[(off + 2 * k, 2 * c)] = -1.0;
            e[(off + 2 * k + 1, 2 * c + 1)] = -1.0;
        }
    }
    e
}

/// Block-diagonal stiffness `C` (Voigt per node, `𝔹` per segment).
pub fn dense_c(layout: &ElasticLayout) -> DMatrix<f64> {
    let m = layout.material;
    let lambda = m.bulk_modulus - 2.0 * m.shear_modulus / 3.0;
    let g = m.shear_modulus;
    let ns = layout.stress_len();
    let mut c = DMatrix::zeros(ns, ns);
    for n in 0..layout.grid.node_count() {
        let b = 3 * n;
        c[(b, b)] = lambda + 2.0 * g;
        c[(b + 1, b + 1)] = lambda + 2.0 * g;
        c[(b, b + 1)] = lambda;
        c[(b + 1, b)] = lambda;
        c[(b + 2, b + 2)] = g;
    }
    if let Some(band) = layout.band {
        let off = 3 * layout.grid.node_count();
        for k in 0..band.count {
            for a in 0..2 {
                for bb in 0..2 {
                    c[(off + 2 * k + a, off + 2 * k + bb)] = band.stiffness[a][bb];
                }
            }
        }
    }
    c
}

/// Hessian of the stored energy at the intact state: `w C⁻¹` per node, `h 𝔹⁻¹` per segment.
pub fn dense_q(layout: &ElasticLayout) -> DMatrix<f64> {
    let c = dense_c(layout);
    let ns = layout.stress_len();
    let mut q = DMatrix::zeros(ns, ns);
    let g = &layout.grid;
    for j in 0..=g.ny {
        for i in 0..=g.nx {
            let n = g.node_index(i, j);
            let block = c.view((3 * n, 3 * n), (3, 3)).into_owned().try_inverse().unwrap();
            let w = g.node_weight(i, j);
            q.view_mut((3 * n, 3 * n), (3, 3)).copy_from(&(block * w));
        }
    }
    if let Some(band) = layout.band {
        let off = 3 * g.node_count();
        for k in 0..band.count {
            let b = off + 2 * k;
            let block = c.view((b, b), (2, 2)).into_owned().try_inverse().unwrap();
            q.view_mut((b, b), (2, 2)).copy_from(&(block * g.h));
        }
    }
    q
}
