//! Oracles and generators shared by the integration tests. Nothing here calls
//! into the geometry of the crate under test except to build inputs.
#![allow(dead_code)]

use midepth::hull::{hull_of_points, HPolytope, MixedBody};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Point clouds in `[-3, 3]^dim`.
pub fn cloud(dim: usize, min: usize, max: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(-3.0f64..3.0, dim), min..=max)
}

/// Hull of a cloud, or `None` when it is too flat to be a body.
pub fn body_of(points: &[Vec<f64>]) -> Option<HPolytope> {
    let p = hull_of_points(points).ok()?;
    (midepth::measure::volume(&p).ok()? > 1e-3).then_some(p)
}

/// Andrew's monotone chain; counterclockwise, no repeated endpoint.
pub fn convex_hull_2d(points: &[Vec<f64>]) -> Vec<[f64; 2]> {
    let mut p: Vec<[f64; 2]> = points.iter().map(|q| [q[0], q[1]]).collect();
    p.sort_by(|a, b| a.partial_cmp(b).unwrap());
    p.dedup();
    if p.len() < 3 {
        return p;
    }
    let cross = |o: [f64; 2], a: [f64; 2], b: [f64; 2]| (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    let mut lower: Vec<[f64; 2]> = Vec::new();
    for &q in &p {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], q) <= 0.0 {
            lower.pop();
        }
        lower.push(q);
    }
    let mut upper: Vec<[f64; 2]> = Vec::new();
    for &q in p.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], q) <= 0.0 {
            upper.pop();
        }
        upper.push(q);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Area and centroid of a counterclockwise polygon.
pub fn shoelace(poly: &[[f64; 2]]) -> (f64, [f64; 2]) {
    let mut a = 0.0;
    let mut cx = 0.0;
    let mut cy = 0.0;
    for i in 0..poly.len() {
        let p = poly[i];
        let q = poly[(i + 1) % poly.len()];
        let w = p[0] * q[1] - q[0] * p[1];
        a += w;
        cx += (p[0] + q[0]) * w;
        cy += (p[1] + q[1]) * w;
    }
    let area = a / 2.0;
    if area.abs() < 1e-300 {
        return (0.0, [0.0, 0.0]);
    }
    (area, [cx / (6.0 * area), cy / (6.0 * area)])
}

/// Membership straight from the inequalities.
pub fn inside(a: &[Vec<f64>], b: &[f64], y: &[f64], tol: f64) -> bool {
    a.iter().zip(b).all(|(row, bi)| row.iter().zip(y).map(|(r, v)| r * v).sum::<f64>() <= bi + tol)
}

/// Hit-count volume over a box with its standard error.
pub fn mc_volume(p: &HPolytope, lo: &[f64], hi: &[f64], samples: usize, seed: u64) -> (f64, f64) {
    let mut r = rng(seed);
    let box_vol: f64 = lo.iter().zip(hi).map(|(l, h)| h - l).product();
    let mut hits = 0usize;
    for _ in 0..samples {
        let y: Vec<f64> = lo.iter().zip(hi).map(|(l, h)| r.gen_range(*l..*h)).collect();
        if inside(p.rows(), p.offsets(), &y, 0.0) {
            hits += 1;
        }
    }
    let f = hits as f64 / samples as f64;
    (box_vol * f, box_vol * (f * (1.0 - f) / samples as f64).sqrt())
}

/// Every integer point of `[lo, hi]` satisfying the inequalities.
pub fn brute_lattice(a: &[Vec<f64>], b: &[f64], lo: &[i64], hi: &[i64], tol: f64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut z = lo.to_vec();
    loop {
        let y: Vec<f64> = z.iter().map(|&v| v as f64).collect();
        if inside(a, b, &y, tol) {
            out.push(z.clone());
        }
        let mut i = z.len();
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if z[i] < hi[i] {
                z[i] += 1;
                for (j, v) in z.iter_mut().enumerate().skip(i + 1) {
                    *v = lo[j];
                }
                break;
            }
        }
    }
}

/// Fiber length of an `n = d = 1` polytope body at integer `z`: intersect
/// the intervals cut out by each row.
pub fn fiber_interval(p: &HPolytope, z: f64) -> Option<(f64, f64)> {
    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    for (row, &b) in p.rows().iter().zip(p.offsets()) {
        let rhs = b - row[0] * z;
        if row[1].abs() < 1e-12 {
            if rhs < -1e-9 {
                return None;
            }
        } else if row[1] > 0.0 {
            hi = hi.min(rhs / row[1]);
        } else {
            lo = lo.max(rhs / row[1]);
        }
    }
    (hi >= lo).then_some((lo, hi))
}

/// Random `n = d = 1` polytope body whose projection is exactly `[z0 − k, z0 + k]`.
pub fn planar_body(seed: u64, z0: f64, k: f64, extra: usize) -> MixedBody {
    let mut r = rng(seed);
    let mut pts = vec![vec![z0 - k, r.gen_range(-1.0..1.0)], vec![z0 + k, r.gen_range(-1.0..1.0)]];
    pts.push(vec![z0 + r.gen_range(-k..k), r.gen_range(1.5..3.0)]);
    pts.push(vec![z0 + r.gen_range(-k..k), r.gen_range(-3.0..-1.5)]);
    for _ in 0..extra {
        pts.push(vec![z0 + r.gen_range(-k..k), r.gen_range(-2.0..2.0)]);
    }
    MixedBody::polytope(1, 1, hull_of_points(&pts).unwrap()).unwrap()
}
