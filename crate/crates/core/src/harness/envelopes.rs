//! The symmetrized body `E = {(z, x) : z ∈ K, ‖x‖₂ ≤ g(z)}` with
//! `g = vol_d(B_z)^{1/d}`, its dilation containments about the center `c`
//! of an inscribed cube, and the envelope level identities
//! `{g₊ ≥ s} = L_s + Q`, `{g₋ ≥ s} = L_s ⊖ Q` with `Q = [−½, ½]ⁿ`.

use rand::Rng;
use serde::Serialize;

use super::{aggregate, PropertyResult, Tally};
use crate::centerpoint::find_box;
use crate::hull::{project_to_integer_space, MixedBody, Shape};
use crate::linalg::norm2;
use crate::lp::{self, LpOutcome};
use crate::measure::{level_set, slice_value, LevelSet, SliceScale};
use crate::rng::{self, unit_vector};
use crate::{Error, Result, TAU_FEAS, TAU_NUM};

fn g(b: &MixedBody, z: &[f64]) -> Result<f64> {
    slice_value(b, z, SliceScale::VolumeRoot)
}

/// `g₋(z) = inf_{q∈Q} g(z+q)` and `g₊(z) = sup_{q∈Q} g(z−q)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnvelopeBounds {
    pub lower: f64,
    pub upper: f64,
    /// A point of `z + Q` where `upper` is attained.
    pub argmax: Vec<f64>,
}

/// Corners, then face centers, then the center of `z + Q`.
fn cube_points(z: &[f64]) -> Vec<Vec<f64>> {
    let n = z.len();
    let mut pts = Vec::with_capacity((1 << n) + 2 * n + 1);
    for mask in 0..1usize << n {
        pts.push(z.iter().enumerate().map(|(i, v)| if mask >> i & 1 == 1 { v + 0.5 } else { v - 0.5 }).collect());
    }
    for i in 0..n {
        for s in [-0.5, 0.5] {
            let mut p = z.to_vec();
            p[i] += s;
            pts.push(p);
        }
    }
    pts.push(z.to_vec());
    pts
}

/// The infimum is exact: `g` is concave on `K` and zero off it, so its
/// minimum over a cube sits at a corner. The supremum is exact for
/// ball fibers (clamp the center) and for `d = 1` (a linear program); for
/// `d ≥ 2` polytopes it is a pattern search started at the best cube point.
pub fn envelope_bounds(b: &MixedBody, z: &[f64]) -> Result<EnvelopeBounds> {
    if z.len() != b.n {
        return Err(Error::InvalidInput(format!("point has length {}, expected {}", z.len(), b.n)));
    }
    let pts = cube_points(z);
    let vals: Vec<f64> = pts.iter().map(|p| g(b, p)).collect::<Result<_>>()?;
    let lower = vals.iter().copied().fold(f64::INFINITY, f64::min);
    let (best_i, best) = vals.iter().enumerate().fold((0, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
    let (argmax, upper) = match &b.shape {
        Shape::BallFiber(bf) => {
            let w: Vec<f64> = bf.center().iter().zip(z).map(|(c, zi)| c.clamp(zi - 0.5, zi + 0.5)).collect();
            let v = g(b, &w)?;
            (w, v)
        }
        Shape::Polytope(_) if b.d == 1 => match longest_fiber(b, z)? {
            Some((w, _)) => {
                let v = g(b, &w)?;
                if v >= best { (w, v) } else { (pts[best_i].clone(), best) }
            }
            None => (pts[best_i].clone(), best),
        },
        Shape::Polytope(_) => pattern_search(b, z, pts[best_i].clone(), best)?,
    };
    Ok(EnvelopeBounds { lower, upper, argmax })
}

/// `max x₂ − x₁` over `w ∈ z + Q` with `(w, x₁), (w, x₂) ∈ B`, for `d = 1`.
fn longest_fiber(b: &MixedBody, z: &[f64]) -> Result<Option<(Vec<f64>, f64)>> {
    let p = b.as_polytope().ok_or(Error::DegenerateDimension)?;
    let n = b.n;
    let mut rows = Vec::with_capacity(2 * p.n_rows());
    let mut rhs = Vec::with_capacity(2 * p.n_rows());
    for (a, &bi) in p.rows().iter().zip(p.offsets()) {
        for slot in 0..2 {
            let mut r = a[..n].to_vec();
            r.extend(if slot == 0 { [a[n], 0.0] } else { [0.0, a[n]] });
            rows.push(r);
            rhs.push(bi);
        }
    }
    let mut c = vec![0.0; n + 2];
    c[n] = -1.0;
    c[n + 1] = 1.0;
    let mut bounds: Vec<(f64, f64)> = z.iter().map(|v| (v - 0.5, v + 0.5)).collect();
    bounds.extend([(f64::NEG_INFINITY, f64::INFINITY); 2]);
    match lp::maximize_bounded(&c, &bounds, &rows, &rhs)? {
        LpOutcome::Optimal { x, value } => Ok(Some((x[..n].to_vec(), value))),
        LpOutcome::Infeasible => Ok(None),
        LpOutcome::Unbounded => Err(Error::Unbounded(vec![])),
    }
}

fn pattern_search(b: &MixedBody, z: &[f64], mut x: Vec<f64>, mut best: f64) -> Result<(Vec<f64>, f64)> {
    let n = z.len();
    let mut dirs: Vec<Vec<f64>> = Vec::new();
    for i in 0..n {
        for s in [-1.0, 1.0] {
            let mut v = vec![0.0; n];
            v[i] = s;
            dirs.push(v);
        }
        for j in i + 1..n {
            for (si, sj) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                let mut v = vec![0.0; n];
                v[i] = si;
                v[j] = sj;
                dirs.push(v);
            }
        }
    }
    let mut step = 0.25;
    let mut evals = 0;
    while step > 1e-8 && evals < 4000 {
        let mut moved = false;
        for dir in &dirs {
            let cand: Vec<f64> = x
                .iter()
                .zip(dir)
                .zip(z)
                .map(|((xi, di), zi)| (xi + step * di).clamp(zi - 0.5, zi + 0.5))
                .collect();
            let v = g(b, &cand)?;
            evals += 1;
            if v > best {
                x = cand;
                best = v;
                moved = true;
                break;
            }
        }
        if !moved {
            step *= 0.5;
        }
    }
    Ok((x, best))
}

/// Is `z ∈ L_s + Q`, decided from the level set's own geometry where it has one.
fn in_thickened(level: &LevelSet, z: &[f64], env: &EnvelopeBounds) -> Result<bool> {
    match level {
        LevelSet::Empty => Ok(false),
        LevelSet::Cube { center, half_width } => {
            Ok(z.iter().zip(center).all(|(a, c)| (a - c).abs() <= half_width + 0.5 + TAU_FEAS))
        }
        LevelSet::Pointwise { .. } => {
            if level.contains(&env.argmax)? {
                return Ok(true);
            }
            for p in cube_points(z) {
                if level.contains(&p)? {
                    return Ok(true);
                }
            }
            Ok(false)
        }
    }
}

/// Is `z ∈ L_s ⊖ Q`: every corner of `z + Q` lies in the convex set `L_s`.
fn in_eroded(level: &LevelSet, z: &[f64]) -> Result<bool> {
    for p in cube_points(z).iter().take(1 << z.len()) {
        if !level.contains(p)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Uniform point of `K` with a nonempty fiber, by rejection from `[lo, hi]`.
fn sample_base<R: Rng>(b: &MixedBody, r: &mut R, lo: &[f64], hi: &[f64]) -> Result<Option<(Vec<f64>, f64)>> {
    for _ in 0..256 {
        let z = rng::uniform_in_box(r, lo, hi);
        let gz = g(b, &z)?;
        if gz > 0.0 {
            return Ok(Some((z, gz)));
        }
    }
    Ok(None)
}

pub(crate) fn envelope_tally(b: &MixedBody, samples: usize, seed: u64) -> Result<Tally> {
    let (c, k) = find_box(&project_to_integer_space(b)?)?;
    if k <= 0.5 + TAU_FEAS {
        return Err(Error::ParameterDomain(format!("inscribed cube radius {k} is not above 1/2")));
    }
    let eps = 0.5 / k;
    let (lo, hi) = project_to_integer_space(b)?.bounding_box()?.ok_or(Error::DegenerateDimension)?;
    let wide_lo: Vec<f64> = lo.iter().map(|v| v - 1.0).collect();
    let wide_hi: Vec<f64> = hi.iter().map(|v| v + 1.0).collect();
    let g_top = match &b.shape {
        Shape::BallFiber(_) => g(b, &c)?,
        Shape::Polytope(_) => {
            let mut r = rng::stream(seed, u64::MAX);
            let mut m = g(b, &c)?;
            for _ in 0..64 {
                m = m.max(g(b, &rng::uniform_in_box(&mut r, &lo, &hi))?);
            }
            m
        }
    };
    let d = b.d as f64;

    let per_sample = crate::par_map((0..samples as u64).collect(), |i| -> Result<Tally> {
        let mut r = rng::stream(seed, i);
        let mut t = Tally::default();
        if let Some((z, gz)) = sample_base(b, &mut r, &lo, &hi)? {
            // Half the points sit on the boundary of E, where the containments are tight.
            let frac = if i % 2 == 0 { 1.0 } else { r.gen::<f64>().powf(1.0 / d) };
            let x: Vec<f64> = unit_vector(&mut r, b.d).into_iter().map(|u| u * gz * frac).collect();
            let rho = norm2(&x);
            let scale = 1.0 + gz;

            // (1−ε)p ∈ E ⊖ (Q × 0).
            let zs: Vec<f64> = z.iter().zip(&c).map(|(zi, ci)| ci + (1.0 - eps) * (zi - ci)).collect();
            let inner = envelope_bounds(b, &zs)?.lower;
            t.record((inner - (1.0 - eps) * rho) / scale, TAU_NUM);

            // p + (q, 0) ∈ (1+ε)E for a random q and a random corner of Q.
            let q_in: Vec<f64> = (0..b.n).map(|_| r.gen_range(-0.5..=0.5)).collect();
            let q_corner: Vec<f64> = (0..b.n).map(|_| if r.gen::<bool>() { 0.5 } else { -0.5 }).collect();
            for q in [q_in, q_corner] {
                let w: Vec<f64> = z.iter().zip(&q).zip(&c).map(|((zi, qi), ci)| ci + (zi + qi - ci) / (1.0 + eps)).collect();
                t.record((g(b, &w)? - rho / (1.0 + eps)) / scale, TAU_NUM);
            }
        }

        // Level identities at a random (z, s), z possibly outside K.
        let z = rng::uniform_in_box(&mut r, &wide_lo, &wide_hi);
        let s = r.gen_range(1e-6..=1.1 * g_top.max(1e-6));
        let env = envelope_bounds(b, &z)?;
        let level = level_set(b, s, SliceScale::VolumeRoot)?;
        let band = TAU_NUM * (1.0 + s);
        let eroded = in_eroded(&level, &z)?;
        t.agree((env.lower >= s) == eroded || (env.lower - s).abs() <= band, env.lower - s);
        let thick = in_thickened(&level, &z, &env)?;
        t.agree((env.upper >= s) == thick || (env.upper - s).abs() <= band, env.upper - s);
        Ok(t)
    });
    let mut total = Tally::default();
    for t in per_sample {
        total.merge(t?);
    }
    Ok(total)
}

/// Samples `E`, checks `(1−ε)E ⊆ E ⊖ (Q×0)` and `E + (Q×0) ⊆ (1+ε)E` after
/// centering on the inscribed cube, and compares both envelope level sets
/// with the thickened and eroded superlevel sets.
pub fn check_envelopes(b: &MixedBody, samples: usize, seed: u64) -> Result<PropertyResult> {
    let t = envelope_tally(b, samples, seed)?;
    Ok(aggregate("envelopes", seed, vec![Ok(t)]))
}
