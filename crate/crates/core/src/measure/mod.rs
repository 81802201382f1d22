//! Volumes, centroids, lattice points and the mixed-integer volume
//! `H_d(S) = Σ_z vol_d(S_z)`.

mod levels;
mod triangulate;

pub use levels::{layer_cake_check, level_count, level_set, slice_value, LayerCakeReport, LevelSet, LevelSetProfile, SliceScale};
pub use triangulate::{triangulate, Simplex};

use rand::Rng;
use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use crate::hull::{FiberBody, HPolytope, Halfspace, MixedBody, Shape};
use crate::linalg::factorial;
use crate::{rng, Error, Result, TAU_FEAS};

/// Cell budget for integer bounding boxes.
pub const LATTICE_BUDGET: u128 = 10_000_000;

/// Exact volume of a bounded H-polytope; 0 when empty.
pub fn volume(p: &HPolytope) -> Result<f64> {
    Ok(triangulate(p)?.iter().map(Simplex::volume).sum())
}

/// Centroid of a full-dimensional polytope.
pub fn centroid(p: &HPolytope) -> Result<Vec<f64>> {
    let simplices = triangulate(p)?;
    if simplices.is_empty() {
        return Err(Error::DegenerateDimension);
    }
    let mut acc = vec![0.0; p.dim()];
    let mut total = 0.0;
    for s in &simplices {
        let v = s.volume();
        for (a, c) in acc.iter_mut().zip(s.centroid()) {
            *a += v * c;
        }
        total += v;
    }
    acc.iter_mut().for_each(|a| *a /= total);
    Ok(acc)
}

/// Volume of the unit ball in ℝᵈ, `π^{d/2}/Γ(d/2+1)`.
pub fn unit_ball_volume(d: usize) -> f64 {
    ln_unit_ball_volume(d).exp()
}

pub fn ln_unit_ball_volume(d: usize) -> f64 {
    let h = d as f64 / 2.0;
    h * std::f64::consts::PI.ln() - ln_gamma(h + 1.0)
}

pub fn fiber_volume(f: &FiberBody) -> Result<f64> {
    match f {
        FiberBody::Empty => Ok(0.0),
        FiberBody::Ball { d, radius } => Ok(unit_ball_volume(*d) * radius.powi(*d as i32)),
        FiberBody::Polytope(p) => match volume(p) {
            Err(Error::DegenerateDimension) => Ok(0.0),
            other => other,
        },
    }
}

/// Lebesgue volume `vol_{n+d}` of a mixed body.
pub fn body_volume(b: &MixedBody) -> Result<f64> {
    match &b.shape {
        Shape::Polytope(p) => volume(p),
        Shape::BallFiber(bf) => {
            // ∫ v_d (1 − ‖u‖∞/k)^d du over the cube of radius k.
            let (n, d) = (bf.n, bf.d);
            let k = bf.k as f64;
            Ok(unit_ball_volume(d) * (2.0 * k).powi(n as i32) * factorial(n) * factorial(d) / factorial(n + d))
        }
    }
}

/// All integer points in `[lo, hi]`, lexicographic with the last coordinate fastest.
pub fn integer_box(lo: &[i64], hi: &[i64]) -> Result<Vec<Vec<i64>>> {
    let mut cells: u128 = 1;
    for (l, h) in lo.iter().zip(hi) {
        if h < l {
            return Ok(vec![]);
        }
        cells = cells.saturating_mul((h - l + 1) as u128);
    }
    if cells > LATTICE_BUDGET {
        return Err(Error::TooLarge { cells, budget: LATTICE_BUDGET });
    }
    let mut out = Vec::with_capacity(cells as usize);
    let mut z = lo.to_vec();
    loop {
        out.push(z.clone());
        let mut i = z.len();
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            if z[i] < hi[i] {
                z[i] += 1;
                break;
            }
            z[i] = lo[i];
        }
    }
}

/// Integer points of `p`, boundary points within `TAU_FEAS` included.
pub fn lattice_points(p: &HPolytope) -> Result<Vec<Vec<i64>>> {
    let Some((lo, hi)) = p.bounding_box()? else {
        return Ok(vec![]);
    };
    let lo: Vec<i64> = lo.iter().map(|v| (v - TAU_FEAS).ceil() as i64).collect();
    let hi: Vec<i64> = hi.iter().map(|v| (v + TAU_FEAS).floor() as i64).collect();
    Ok(integer_box(&lo, &hi)?
        .into_iter()
        .filter(|z| p.contains(&as_f64(z), TAU_FEAS))
        .collect())
}

pub fn as_f64(z: &[i64]) -> Vec<f64> {
    z.iter().map(|&v| v as f64).collect()
}

/// One summand of the mixed-integer volume.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LatticeFiber {
    pub z: Vec<i64>,
    pub volume: f64,
    #[serde(skip)]
    pub body: FiberBody,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MiVolumeReport {
    pub total: f64,
    /// Fibers of positive volume, in lexicographic order of `z`.
    pub fibers: Vec<LatticeFiber>,
    /// Number of lattice points with a nonempty fiber.
    pub lattice_count: usize,
}

pub fn mixed_integer_volume(b: &MixedBody) -> Result<MiVolumeReport> {
    let (lo, hi) = b.integer_bounding_box()?;
    let zs = integer_box(&lo, &hi)?;
    let results: Vec<Result<Option<LatticeFiber>>> = crate::par_map(zs, |z| {
            let body = b.fiber(&as_f64(&z));
            if body.is_empty() {
                return Ok(None);
            }
            let volume = fiber_volume(&body)?;
            Ok(Some(LatticeFiber { z, volume, body }))
    });
    let mut fibers = Vec::new();
    let mut lattice_count = 0;
    for r in results {
        if let Some(f) = r? {
            lattice_count += 1;
            if f.volume > 0.0 {
                fibers.push(f);
            }
        }
    }
    let total = fibers.iter().map(|f| f.volume).sum();
    Ok(MiVolumeReport { total, fibers, lattice_count })
}

/// `H_d(S ∩ H)` for a polytope body.
pub fn mixed_integer_volume_cut(p: &HPolytope, n: usize, d: usize, h: &Halfspace) -> Result<f64> {
    let cut = MixedBody { n, d, shape: Shape::Polytope(p.intersect_halfspace(h)) };
    // The cut body can be empty; report 0 rather than failing the LP box.
    match mixed_integer_volume(&cut) {
        Ok(r) => Ok(r.total),
        Err(Error::DegenerateDimension) => Ok(0.0),
        Err(e) => Err(e),
    }
}

/// Hit-count estimate over the bounding box: `(estimate, standard error)`.
pub fn monte_carlo_volume(p: &HPolytope, samples: usize, seed: u64) -> Result<(f64, f64)> {
    let Some((lo, hi)) = p.bounding_box()? else {
        return Ok((0.0, 0.0));
    };
    let box_vol: f64 = lo.iter().zip(&hi).map(|(l, h)| h - l).product();
    let mut r = rng::stream(seed, 0);
    let mut y = vec![0.0; p.dim()];
    let mut hits = 0usize;
    for _ in 0..samples {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = r.gen_range(lo[i]..=hi[i]);
        }
        if p.contains(&y, 0.0) {
            hits += 1;
        }
    }
    let frac = hits as f64 / samples as f64;
    let se = box_vol * (frac * (1.0 - frac) / samples as f64).sqrt();
    Ok((box_vol * frac, se))
}
