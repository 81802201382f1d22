mod common;

use common::*;
use midepth::centerpoint::unimodular_reduce;
use midepth::hull::{
    erode_by_cube, hull_of_points, minkowski_sum_cube, project_to_integer_space, vertex_enumerate, HPolytope,
    MixedBody,
};
use midepth::measure::{fiber_volume, lattice_points, slice_value, SliceScale};
use midepth::necessity::BallFiberBody;
use proptest::prelude::*;
use rand::Rng;

fn solve3(m: [[f64; 3]; 3], b: [f64; 3]) -> Option<[f64; 3]> {
    let det = |m: [[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det(m);
    if d.abs() < 1e-9 {
        return None;
    }
    let mut out = [0.0; 3];
    for (c, o) in out.iter_mut().enumerate() {
        let mut mc = m;
        for r in 0..3 {
            mc[r][c] = b[r];
        }
        *o = det(mc) / d;
    }
    Some(out)
}

#[test]
fn vertices_match_triple_intersections() {
    let mut r = rng(11);
    let mut checked = 0;
    while checked < 20 {
        let rows: Vec<Vec<f64>> = (0..10)
            .map(|_| {
                let v: Vec<f64> = (0..3).map(|_| r.gen_range(-1.0..1.0)).collect();
                let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                v.into_iter().map(|x| x / n).collect()
            })
            .collect();
        let b: Vec<f64> = (0..10).map(|_| r.gen_range(0.5..2.0)).collect();
        let Ok(p) = HPolytope::new(rows.clone(), b.clone()) else { continue };
        checked += 1;
        let mut oracle: Vec<[f64; 3]> = Vec::new();
        for i in 0..10 {
            for j in i + 1..10 {
                for k in j + 1..10 {
                    let m = [
                        [rows[i][0], rows[i][1], rows[i][2]],
                        [rows[j][0], rows[j][1], rows[j][2]],
                        [rows[k][0], rows[k][1], rows[k][2]],
                    ];
                    if let Some(x) = solve3(m, [b[i], b[j], b[k]]) {
                        if inside(&rows, &b, &x, 1e-9) && !oracle.iter().any(|o| (0..3).all(|t| (o[t] - x[t]).abs() < 1e-7)) {
                            oracle.push(x);
                        }
                    }
                }
            }
        }
        let got = vertex_enumerate(&p).unwrap();
        assert_eq!(got.vertices().len(), oracle.len());
        for v in got.vertices() {
            assert!(oracle.iter().any(|o| (0..3).all(|t| (o[t] - v[t]).abs() < 1e-7)), "{v:?}");
        }
    }
}

#[test]
fn projection_matches_hull_of_projected_vertices() {
    let mut r = rng(5);
    for _ in 0..10 {
        let pts: Vec<Vec<f64>> = (0..9).map(|_| (0..3).map(|_| r.gen_range(-2.0..2.0)).collect()).collect();
        let c = MixedBody::polytope(2, 1, hull_of_points(&pts).unwrap()).unwrap();
        let k = project_to_integer_space(&c).unwrap();
        let shadow: Vec<Vec<f64>> = pts.iter().map(|p| p[..2].to_vec()).collect();
        let oracle = convex_hull_2d(&shadow);
        let (area, _) = shoelace(&oracle);
        assert!((midepth::measure::volume(&k).unwrap() - area).abs() < 1e-9);
        for v in &oracle {
            assert!(k.max_violation(&[v[0], v[1]]).abs() < 1e-9);
        }
    }
}

#[test]
fn triangle_plus_cube_against_monte_carlo() {
    let tri = hull_of_points(&[vec![0.0, 0.0], vec![2.0, 0.0], vec![0.5, 1.5]]).unwrap();
    let sum = minkowski_sum_cube(&vertex_enumerate(&tri).unwrap(), 0.5).unwrap().to_hpolytope().unwrap();
    let exact = midepth::measure::volume(&sum).unwrap();
    let (est, se) = mc_volume(&sum, &[-1.0, -1.0], &[3.0, 2.5], 400_000, 2);
    assert!((exact - est).abs() < 4.0 * se, "{exact} vs {est} ± {se}");
    // Same area from the polygon oracle on the vertices of the sum.
    let sv = vertex_enumerate(&sum).unwrap();
    let (area, _) = shoelace(&convex_hull_2d(sv.vertices()));
    assert!((exact - area).abs() < 1e-9);
}

#[test]
fn ball_fiber_radius_at_center_column() {
    let b = MixedBody::ball_fiber(BallFiberBody::new(1, 1, 3).unwrap());
    assert!((slice_value(&b, &[3.0], SliceScale::BallRadius).unwrap() - 5.0 / 6.0).abs() < 1e-15);
    // The largest radius over the lattice is 1 − 1/(2k).
    let best = (1..=6).map(|z| slice_value(&b, &[z as f64], SliceScale::BallRadius).unwrap()).fold(0.0, f64::max);
    assert!((best - (1.0 - 1.0 / 6.0)).abs() < 1e-15);
}

fn shear(seed: u64, n: usize) -> Vec<Vec<i64>> {
    let mut r = rng(seed);
    let mut u: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
    for _ in 0..3 {
        let i = r.gen_range(0..n);
        let j = r.gen_range(0..n);
        if i == j {
            continue;
        }
        let f = r.gen_range(-2..=2);
        let row = u[j].clone();
        for (x, y) in u[i].iter_mut().zip(row) {
            *x += f * y;
        }
    }
    u
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn vertex_round_trip_preserves_membership(pts in cloud(3, 5, 10), seed in any::<u64>()) {
        let Some(p) = body_of(&pts) else { return Ok(()) };
        let q = hull_of_points(vertex_enumerate(&p).unwrap().vertices()).unwrap();
        let mut r = rng(seed);
        for _ in 0..1000 {
            let y: Vec<f64> = (0..3).map(|_| r.gen_range(-3.5..3.5)).collect();
            let (vp, vq) = (p.max_violation(&y), q.max_violation(&y));
            if vp.abs() > 1e-7 {
                prop_assert_eq!(vp <= 0.0, vq <= 1e-9, "{:?}", y);
            }
        }
    }

    #[test]
    fn erosion_plus_cube_stays_inside(pts in cloud(2, 4, 9), rad in 0.05f64..0.5, seed in any::<u64>()) {
        let Some(p) = body_of(&pts) else { return Ok(()) };
        let e = erode_by_cube(&p, rad);
        let mut r = rng(seed);
        for _ in 0..500 {
            let z: Vec<f64> = (0..2).map(|_| r.gen_range(-3.0..3.0)).collect();
            if e.max_violation(&z) > 0.0 {
                continue;
            }
            for mask in 0..4 {
                let c = [z[0] + if mask & 1 == 1 { rad } else { -rad }, z[1] + if mask & 2 == 2 { rad } else { -rad }];
                prop_assert!(inside(p.rows(), p.offsets(), &c, 1e-9));
            }
        }
    }

    #[test]
    fn slice_roots_are_midpoint_concave(pts in cloud(3, 6, 12), two_d in any::<bool>()) {
        let Some(p) = body_of(&pts) else { return Ok(()) };
        let (n, d) = if two_d { (1, 2) } else { (2, 1) };
        let b = MixedBody::polytope(n, d, p.clone()).unwrap();
        let k = project_to_integer_space(&b).unwrap();
        for z in lattice_points(&k).unwrap() {
            let zf: Vec<f64> = z.iter().map(|&v| v as f64).collect();
            for axis in 0..n {
                let mut lo = zf.clone();
                let mut hi = zf.clone();
                lo[axis] -= 1.0;
                hi[axis] += 1.0;
                if k.max_violation(&lo) > 0.0 || k.max_violation(&hi) > 0.0 {
                    continue;
                }
                let g = |y: &[f64]| fiber_volume(&b.fiber(y)).unwrap().powf(1.0 / d as f64);
                prop_assert!(g(&zf) >= 0.5 * (g(&lo) + g(&hi)) - 1e-6);
            }
        }
    }

    #[test]
    fn unimodular_maps_keep_fiber_volumes(pts in cloud(3, 6, 10), seed in any::<u64>()) {
        let Some(p) = body_of(&pts) else { return Ok(()) };
        let c = MixedBody::polytope(2, 1, p).unwrap();
        let u = shear(seed, 2);
        let (ct, _) = unimodular_reduce(&c, &u).unwrap();
        let vols = |b: &MixedBody| {
            let mut v: Vec<f64> = midepth::measure::mixed_integer_volume(b).unwrap().fibers.iter().map(|f| f.volume).filter(|v| *v > 1e-9).collect();
            v.sort_by(|a, b| a.partial_cmp(b).unwrap());
            v
        };
        let (a, b) = (vols(&c), vols(&ct));
        prop_assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-7);
        }
    }
}
