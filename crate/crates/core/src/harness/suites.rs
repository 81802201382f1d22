use rand::Rng;

use super::{aggregate, random_polytope, InstanceKind, InstanceSpec, PropertyResult, Tally};
use crate::centerpoint::{centroid_round, find_box};
use crate::depth::{bisection_witness, Side};
use crate::hull::{
    erode_by_cube, minkowski_sum_cube, project_to_integer_space, vertex_enumerate, vertices_with_facets, HPolytope,
    Halfspace, MixedBody, Shape,
};
use crate::linalg::{dot, norm_inf};
use crate::measure::{body_volume, centroid, lattice_points, mixed_integer_volume, triangulate, volume, Simplex};
use crate::rng::{self, unit_vector};
use crate::{Error, Result, TAU_FEAS, TAU_NUM};

fn trials_of(trials: usize) -> Vec<u64> {
    (0..trials as u64).collect()
}

/// `(1−1/2k)^{n+d} vol ≤ H_d ≤ (1+1/2k)^{n+d} vol` with `k` the inscribed
/// cube radius of the projection. Instances with `k ≤ ½` are skipped.
pub fn check_comparison(spec: &InstanceSpec, trials: usize) -> Result<PropertyResult> {
    let outcomes = crate::par_map(trials_of(trials), |t| {
        let body = spec.generate(t)?;
        comparison_tally(&body)
    });
    Ok(aggregate(format!("comparison/{}/n{}d{}", spec.kind.name(), spec.n, spec.d), spec.seed, outcomes))
}

pub(crate) fn comparison_tally(body: &MixedBody) -> Result<Tally> {
    let (_, k) = find_box(&project_to_integer_space(body)?)?;
    if k <= 0.5 + TAU_FEAS {
        return Ok(Tally::skipped());
    }
    let m = body.dim() as i32;
    let vol = body_volume(body)?;
    let h = mixed_integer_volume(body)?.total;
    let lower = (1.0 - 0.5 / k).powi(m) * vol;
    let upper = (1.0 + 0.5 / k).powi(m) * vol;
    let mut t = Tally::default();
    let scale = 1.0 + h;
    t.record((h - lower) / scale, TAU_NUM);
    t.record((upper - h) / scale, TAU_NUM);
    Ok(t)
}

/// `vol(A ⊖ Q) ≤ #(A ∩ Zⁿ) ≤ vol(A + Q)` for random polytopes `A ⊂ ℝⁿ`.
///
/// `simplex_product` draws simplices, `box` boxes, `ball_fiber` the cube
/// projection of the ball-fiber family and `random_polytope` point hulls.
pub fn check_lattice_sandwich(spec: &InstanceSpec, trials: usize) -> Result<PropertyResult> {
    let n = spec.n;
    if n > 3 {
        return Err(Error::ParameterDomain(format!("lattice sandwich needs n ≤ 3, got {n}")));
    }
    let outcomes = crate::par_map(trials_of(trials), |t| {
        let mut r = rng::stream(spec.seed, t);
        let scale = spec.k_target * r.gen_range(1.0..2.0);
        let a = match spec.kind {
            InstanceKind::SimplexProduct => random_polytope(&mut r, n, n + 1, scale)?,
            InstanceKind::RandomPolytope => {
                let count = r.gen_range(n + 2..=12);
                random_polytope(&mut r, n, count, scale)?
            }
            InstanceKind::Box | InstanceKind::BallFiber => {
                project_to_integer_space(&spec.generate_with(&mut r)?)?
            }
        };
        sandwich_tally(&a)
    });
    Ok(aggregate(format!("sandwich/{}/n{n}", spec.kind.name()), spec.seed, outcomes))
}

fn sandwich_tally(a: &HPolytope) -> Result<Tally> {
    let count = lattice_points(a)?.len() as f64;
    let lower = match volume(&erode_by_cube(a, 0.5)) {
        Err(Error::DegenerateDimension) => 0.0,
        other => other?,
    };
    let grown = minkowski_sum_cube(&vertex_enumerate(a)?, 0.5)?.to_hpolytope()?;
    let upper = volume(&grown)?;
    let mut t = Tally::default();
    t.record((count - lower) / (1.0 + count), TAU_NUM);
    t.record((upper - count) / (1.0 + count), TAU_NUM);
    Ok(t)
}

/// Smallest `vol(D ∩ H)/vol(D)` over halfspaces through the centroid with
/// normals `±` every facet normal and `±` `dirs` random directions.
pub fn min_centroid_ratio(p: &HPolytope, dirs: usize, seed: u64) -> Result<f64> {
    let simplices = triangulate(p)?;
    if simplices.is_empty() {
        return Err(Error::DegenerateDimension);
    }
    let total: f64 = simplices.iter().map(Simplex::volume).sum();
    let c = centroid(p)?;
    let mut r = rng::stream(seed, 0);
    let normals: Vec<Vec<f64>> = p
        .rows()
        .iter()
        .cloned()
        .chain((0..dirs).map(|_| unit_vector(&mut r, p.dim())))
        .collect();
    let mut best = f64::INFINITY;
    for a in normals {
        let h = Halfspace::through(a, &c)?;
        let cut: f64 = simplices.iter().map(|s| s.cut_volume(&h)).sum();
        best = best.min(cut / total).min((total - cut) / total);
    }
    Ok(best)
}

/// Centroid halfspaces of random polytopes in ℝ^dim keep at least
/// `(dim/(dim+1))^dim` of the volume.
pub fn check_grunbaum(dim: usize, trials: usize, dirs: usize, seed: u64) -> Result<PropertyResult> {
    if !(1..=4).contains(&dim) {
        return Err(Error::ParameterDomain(format!("dimension must be in 1..=4, got {dim}")));
    }
    let floor = (dim as f64 / (dim as f64 + 1.0)).powi(dim as i32);
    let outcomes = crate::par_map(trials_of(trials), |t| {
        let mut r = rng::stream(seed, t);
        let count = r.gen_range(dim + 2..=12);
        let p = random_polytope(&mut r, dim, count, 1.0)?;
        let ratio = min_centroid_ratio(&p, dirs, r.gen())?;
        let mut tally = Tally::default();
        tally.record(ratio - floor, TAU_NUM);
        Ok(tally)
    });
    Ok(aggregate(format!("grunbaum/dim{dim}"), seed, outcomes))
}

/// Random polytopes in dimensions 1–4 cut through random interior points;
/// the bisection witness is re-verified on every vertex.
pub fn check_bisection(trials: usize, seed: u64) -> Result<PropertyResult> {
    let outcomes = crate::par_map(trials_of(trials), |t| {
        let mut r = rng::stream(seed, t);
        let dim = r.gen_range(1..=4usize);
        let count = r.gen_range(dim + 2..=12);
        let p = random_polytope(&mut r, dim, count, 1.0)?;
        let verts = vertex_enumerate(&p)?;
        let a = unit_vector(&mut r, dim);
        let (hi, lo) = verts.vertices().iter().fold((f64::NEG_INFINITY, f64::INFINITY), |(h, l), v| {
            let s = dot(&a, v);
            (h.max(s), l.min(s))
        });
        let theta = 0.5 * (hi + lo);
        // Every fourth instance exercises the tie c = θ.
        let c = if t % 4 == 3 {
            theta
        } else {
            let w: Vec<f64> = verts.vertices().iter().map(|_| r.gen_range(0.0..1.0)).collect();
            let sum: f64 = w.iter().sum();
            let y = verts.vertices().iter().zip(&w).fold(vec![0.0; dim], |mut acc, (v, wi)| {
                acc.iter_mut().zip(v).for_each(|(a, x)| *a += wi / sum * x);
                acc
            });
            dot(&a, &y)
        };
        let h = Halfspace::new(a, c)?;
        let w = bisection_witness(&p, &h)?;
        let mut tally = Tally::default();
        let scale = 1.0 + hi.abs().max(lo.abs());
        // At c = θ both sides work; away from it the c ≤ θ rule decides.
        let want = if h.offset() <= w.theta { Side::H } else { Side::HBar };
        let tie = (h.offset() - w.theta).abs() <= TAU_FEAS * scale;
        tally.agree(w.side == want || tie, h.offset() - w.theta);
        for v in verts.vertices() {
            let q: Vec<f64> = v.iter().zip(&w.translate).map(|(x, t)| 0.5 * x + t).collect();
            let side = match w.side {
                Side::H => h.value(&q),
                Side::HBar => -h.value(&q),
            };
            tally.record(side.min(-p.max_violation(&q)) / scale, TAU_FEAS);
        }
        Ok(tally)
    });
    Ok(aggregate("bisection", seed, outcomes))
}

/// Centroid rounding on random polytope bodies, with the certificate's
/// numbers recomputed from `C′` alone.
pub fn check_centroid_rounding(spec: &InstanceSpec, trials: usize) -> Result<PropertyResult> {
    if spec.kind == InstanceKind::BallFiber {
        return Err(Error::ParameterDomain("centroid rounding needs polytope instances".into()));
    }
    let outcomes = crate::par_map(trials_of(trials), |t| {
        let body = spec.generate(t)?;
        rounding_tally(&body)
    });
    Ok(aggregate(format!("rounding/{}/n{}d{}", spec.kind.name(), spec.n, spec.d), spec.seed, outcomes))
}

fn rounding_tally(body: &MixedBody) -> Result<Tally> {
    let (z0, k) = find_box(&project_to_integer_space(body)?)?;
    if k <= 0.5 + TAU_FEAS {
        return Ok(Tally::skipped());
    }
    let (n, m) = (body.n, body.dim());
    let cert = centroid_round(body, &z0, k)?;
    let p = body.as_polytope().ok_or(Error::DegenerateDimension)?;
    let mut t = Tally::default();

    let y = centroid(&cert.c_prime)?;
    let offset = y[..n].iter().zip(&cert.z_star).map(|(a, &b)| (a - b as f64).abs()).fold(0.0, f64::max);
    t.record(1e-9 * (1.0 + norm_inf(&y)) - offset, 0.0);

    let want = (1.0 - cert.epsilon).powi(m as i32) * volume(p)?;
    t.record(1e-9 - (volume(&cert.c_prime)? / want - 1.0).abs(), 0.0);

    // Every vertex of C′ lies in C.
    for v in vertices_with_facets(&cert.c_prime) {
        t.record(-p.max_violation(&v.point), TAU_FEAS);
    }

    // The projection of C′ still holds a cube of radius k − ½.
    let proj = project_to_integer_space(&MixedBody { n, d: body.d, shape: Shape::Polytope(cert.c_prime.clone()) })?;
    let (_, k_prime) = find_box(&proj)?;
    t.record(k_prime - (k - 0.5), TAU_FEAS * (1.0 + k));

    t.agree(body.contains_mixed(&cert.y_star, TAU_FEAS), 1.0);
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comparison_on_a_box() {
        let b = MixedBody::cube(2, 1, &[0.5, 0.5, 0.0], &[6.5, 6.5, 1.0]).unwrap();
        let t = comparison_tally(&b).unwrap();
        assert_eq!((t.checks, t.failures), (2, 0));
        // Slack of the lower side: (36 − (5/6)³·36)/37.
        let lower = (5.0f64 / 6.0).powi(3) * 36.0;
        assert!((t.worst - (36.0 - lower) / 37.0).abs() < 1e-9);
    }

    #[test]
    fn unit_cube_is_skipped() {
        let b = MixedBody::cube(1, 1, &[0.0; 2], &[1.0; 2]).unwrap();
        assert!(comparison_tally(&b).unwrap().skipped);
    }

    #[test]
    fn sandwich_on_a_square() {
        let a = HPolytope::cube(&[-2.2, -2.2], &[2.2, 2.2]);
        let t = sandwich_tally(&a).unwrap();
        assert_eq!(t.failures, 0);
        // 11.56 ≤ 25 ≤ 29.16; the upper side is tighter.
        assert!((t.worst - (29.16 - 25.0) / 26.0).abs() < 1e-9);
    }

    #[test]
    fn interval_ratio_is_one_half() {
        let p = HPolytope::cube(&[-0.3], &[2.0]);
        assert!((min_centroid_ratio(&p, 10, 0).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn triangle_attains_four_ninths() {
        let p = crate::hull::hull_of_points(&[vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let r = min_centroid_ratio(&p, 50, 0).unwrap();
        assert!((r - 4.0 / 9.0).abs() < 1e-12, "{r}");
    }

    #[test]
    fn small_suites_pass() {
        assert!(check_grunbaum(3, 4, 50, 1).unwrap().passed());
        assert!(check_bisection(12, 2).unwrap().passed());
        let s = InstanceSpec::new(InstanceKind::RandomPolytope, 2, 1, 0.75, 3).unwrap();
        assert!(check_comparison(&s, 4).unwrap().passed());
        let r = check_centroid_rounding(&s, 4).unwrap();
        assert!(r.passed(), "{r:?}");
    }
}
