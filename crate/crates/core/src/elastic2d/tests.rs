use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::ops::SystemOps;

fn ops(nx: usize, ny: usize, h: f64, band: bool) -> Elastic2d {
    let grid = Grid2D::new(nx, ny, h).unwrap();
    let material = MaterialParams::new(1.66, 1.0, 1.0).unwrap();
    let band = band.then(|| AdhesiveBand::centered(&grid, 0.4, [[0.5, 0.1], [0.1, 0.7]]).unwrap());
    Elastic2d::new(ElasticLayout::new(grid, material, band).unwrap())
}

fn random(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

fn field(o: &Elastic2d, f: impl Fn([f64; 2]) -> [f64; 2]) -> Vec<f64> {
    let g = o.grid();
    let mut v = vec![0.0; o.velocity_len()];
    for j in 0..g.ny {
        for i in 0..g.nx {
            let c = g.cell_index(i, j);
            let val = f(g.cell_center(i, j));
            v[2 * c] = val[0];
            v[2 * c + 1] = val[1];
        }
    }
    v
}

fn interior_nodes(g: &Grid2D) -> impl Iterator<Item = (usize, usize)> + '_ {
    (1..g.ny).flat_map(move |j| (1..g.nx).map(move |i| (i, j)))
}

#[test]
fn rigid_translation_has_no_strain() {
    let o = ops(6, 5, 0.3, false);
    let v = field(&o, |_| [0.4, -1.1]);
    let mut e = vec![0.0; o.stress_len()];
    o.apply_e(&v, &mut e);
    assert!(e.iter().all(|x| x.abs() < 1e-14));
}

#[test]
fn affine_field_is_exact_inside() {
    let o = ops(6, 5, 0.3, false);
    let v = field(&o, |p| [p[0], 0.0]);
    let mut e = vec![0.0; o.stress_len()];
    o.apply_e(&v, &mut e);
    for (i, j) in interior_nodes(o.grid()) {
        let n = o.grid().node_index(i, j);
        assert!((e[3 * n] - 1.0).abs() < 1e-13);
        assert!(e[3 * n + 1].abs() < 1e-13);
        assert!(e[3 * n + 2].abs() < 1e-13);
    }
    let w = field(&o, |p| [2.0 * p[1] - p[0], 3.0 * p[0] + 0.5 * p[1]]);
    o.apply_e(&w, &mut e);
    for (i, j) in interior_nodes(o.grid()) {
        let n = o.grid().node_index(i, j);
        assert!((e[3 * n] + 1.0).abs() < 1e-12);
        assert!((e[3 * n + 1] - 0.5).abs() < 1e-12);
        assert!((e[3 * n + 2] - 5.0).abs() < 1e-12);
    }
}

#[test]
fn single_cell_stencil() {
    let h = 0.5;
    let o = ops(5, 5, h, false);
    let g = *o.grid();
    let mut v = vec![0.0; o.velocity_len()];
    let (ci, cj) = (2, 2);
    v[2 * g.cell_index(ci, cj)] = 1.0;
    let mut e = vec![0.0; o.stress_len()];
    o.apply_e(&v, &mut e);
    let q = 1.0 / (2.0 * h);
    // (node, e_xx, γ_xy): the cell is NE, NW, SE, SW of its four corners
    let expected = [
        ((ci, cj), q, q),
        ((ci + 1, cj), -q, q),
        ((ci, cj + 1), q, -q),
        ((ci + 1, cj + 1), -q, -q),
    ];
    for j in 0..=g.ny {
        for i in 0..=g.nx {
            let n = g.node_index(i, j);
            let got = [e[3 * n], e[3 * n + 1], e[3 * n + 2]];
            match expected.iter().find(|(node, _, _)| *node == (i, j)) {
                Some(&(_, exx, gxy)) => assert_eq!(got, [exx, 0.0, gxy]),
                None => assert_eq!(got, [0.0; 3]),
            }
        }
    }
}

#[test]
fn adjoint_consistency() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for band in [false, true] {
        let o = ops(9, 7, 0.2, band);
        for _ in 0..100 {
            let v = random(&mut rng, o.velocity_len());
            let s = random(&mut rng, o.stress_len());
            let mut ev = vec![0.0; o.stress_len()];
            let mut ets = vec![0.0; o.velocity_len()];
            o.apply_e(&v, &mut ev);
            o.apply_e_adjoint(&s, &mut ets);
            let lhs = crate::math::dot(&ev, &s);
            let rhs = crate::math::dot(&v, &ets);
            let scale = crate::math::norm(&v) * crate::math::norm(&s);
            assert!((lhs - rhs).abs() <= 1e-12 * scale);

            let e = random(&mut rng, o.stress_len());
            let mut ce = vec![0.0; o.stress_len()];
            let mut cts = vec![0.0; o.stress_len()];
            o.apply_c(&e, &mut ce);
            o.apply_c_adjoint(&s, &mut cts);
            let lhs = crate::math::dot(&ce, &s);
            let rhs = crate::math::dot(&e, &cts);
            assert!((lhs - rhs).abs() <= 1e-12 * crate::math::norm(&e) * crate::math::norm(&s));
        }
    }
}

#[test]
fn stiffness_is_positive() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let o = ops(4, 4, 1.0, true);
    for _ in 0..100 {
        let e = random(&mut rng, o.stress_len());
        let mut ce = vec![0.0; o.stress_len()];
        o.apply_c(&e, &mut ce);
        assert!(crate::math::dot(&ce, &e) > 0.0);
    }
}

#[test]
fn uniform_stress_gives_surface_forces() {
    // E^T of a constant weighted stress w·σ equals h σ·n summed over a cell's boundary faces.
    let h = 0.25;
    let o = ops(6, 5, h, false);
    let g = *o.grid();
    let sigma = [0.7, -0.4, 0.3];
    let mut s = vec![0.0; o.stress_len()];
    for j in 0..=g.ny {
        for i in 0..=g.nx {
            let n = g.node_index(i, j);
            let w = g.node_weight(i, j);
            for a in 0..3 {
                s[3 * n + a] = w * sigma[a];
            }
        }
    }
    let mut f = vec![0.0; o.velocity_len()];
    o.apply_e_adjoint(&s, &mut f);
    let traction = |n: [f64; 2]| [sigma[0] * n[0] + sigma[2] * n[1], sigma[2] * n[0] + sigma[1] * n[1]];
    let mut total = [0.0; 2];
    for j in 0..g.ny {
        for i in 0..g.nx {
            let mut expected = [0.0; 2];
            let faces = [
                (j == 0, Side::Bottom),
                (j + 1 == g.ny, Side::Top),
                (i == 0, Side::Left),
                (i + 1 == g.nx, Side::Right),
            ];
            for (on, side) in faces {
                if on {
                    let t = traction(side.normal());
                    expected[0] += h * t[0];
                    expected[1] += h * t[1];
                }
            }
            let c = g.cell_index(i, j);
            assert!((f[2 * c] - expected[0]).abs() < 1e-14, "cell ({i},{j})");
            assert!((f[2 * c + 1] - expected[1]).abs() < 1e-14, "cell ({i},{j})");
            total[0] += f[2 * c];
            total[1] += f[2 * c + 1];
        }
    }
    // the closed boundary integral of a constant traction vanishes
    assert!(total[0].abs() < 1e-12 && total[1].abs() < 1e-12);
}

#[test]
fn helmholtz_of_linear_fields() {
    let o = ops(6, 6, 0.5, false);
    let l = o.layout();
    let (div, rot) = helmholtz(l, &field(&o, |p| [p[0], p[1]]));
    let (div2, rot2) = helmholtz(l, &field(&o, |p| [-p[1], p[0]]));
    for (i, j) in interior_nodes(o.grid()) {
        let n = o.grid().node_index(i, j);
        assert!((div[n] - 2.0).abs() < 1e-13 && rot[n].abs() < 1e-13);
        assert!(div2[n].abs() < 1e-13 && (rot2[n] - 2.0).abs() < 1e-13);
    }
    let speed = node_speed(l, &field(&o, |_| [3.0, 4.0]));
    assert!(speed.iter().all(|s| (s - 5.0).abs() < 1e-14));
}

#[test]
fn adhesive_rate_example() {
    let grid = Grid2D::new(10, 4, 1.0).unwrap();
    let band = AdhesiveBand::centered(&grid, 0.2, [[0.5, 0.0], [0.0, 0.5]]).unwrap();
    let layout = ElasticLayout::new(grid, MaterialParams::new(1.66, 1.0, 1.0).unwrap(), Some(band)).unwrap();
    let mut v = vec![0.0; layout.velocity_len()];
    assert_eq!(adhesive_proto_stress_rate(&layout, &v, [0.0, 0.0]), vec![[0.0, 0.0]; 2]);
    for k in 0..2 {
        v[2 * layout.segment_cell(k) + 1] = 1.0;
    }
    assert_eq!(adhesive_proto_stress_rate(&layout, &v, [0.0, 0.0]), vec![[0.0, -0.5]; 2]);
}

#[test]
fn fused_rate_matches_composition() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let o = ops(7, 6, 0.3, true);
    let v = random(&mut rng, o.velocity_len());
    let base = random(&mut rng, o.stress_len());
    let mut e = vec![0.0; o.stress_len()];
    let mut ce = vec![0.0; o.stress_len()];
    o.apply_e(&v, &mut e);
    o.apply_c(&e, &mut ce);
    let mut fused = base.clone();
    o.accumulate_stress_rate(&v, 0.3, &mut fused, &mut e, &mut ce.clone());
    for i in 0..base.len() {
        assert!((fused[i] - (base[i] + 0.3 * ce[i])).abs() < 1e-14);
    }
}
