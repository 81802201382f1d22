//! Superlevel sets `L_s = {z : g(z) ≥ s}` of the slice function and the
//! layer-cake identities for counting and Lebesgue measure.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{as_f64, body_volume, fiber_volume, mixed_integer_volume, unit_ball_volume};
use crate::hull::{FiberBody, MixedBody, Shape};
use crate::{rng, Error, Result, TAU_FEAS};

/// How a fiber is turned into a slice value.
///
/// `VolumeRoot` is `vol_d(B_z)^{1/d}`, the function whose layer cake gives the
/// mixed-integer volume directly. `BallRadius` is the radius of the ball with
/// the fiber's volume, `(vol_d(B_z)/v_d)^{1/d}`, which equals `t(z)` on
/// ball fibers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SliceScale {
    VolumeRoot,
    BallRadius,
}

/// Slice value `g(z)` at a real point `z`.
pub fn slice_value(b: &MixedBody, z: &[f64], scale: SliceScale) -> Result<f64> {
    let fib = b.fiber(z);
    let d = b.d as f64;
    if let (FiberBody::Ball { d: bd, radius }, SliceScale::BallRadius) = (&fib, scale) {
        debug_assert_eq!(*bd, b.d);
        return Ok(*radius);
    }
    let v = fiber_volume(&fib)?;
    Ok(match scale {
        SliceScale::VolumeRoot => v.powf(1.0 / d),
        SliceScale::BallRadius => (v / unit_ball_volume(b.d)).powf(1.0 / d),
    })
}

/// A membership-testable superlevel set.
#[derive(Debug, Clone, PartialEq)]
pub enum LevelSet {
    /// `{z : ‖z − center‖∞ ≤ half_width}`.
    Cube { center: Vec<f64>, half_width: f64 },
    /// Membership decided by evaluating the slice value.
    Pointwise { body: MixedBody, s: f64, scale: SliceScale },
    Empty,
}

impl LevelSet {
    pub fn contains(&self, z: &[f64]) -> Result<bool> {
        match self {
            LevelSet::Empty => Ok(false),
            LevelSet::Cube { center, half_width } => Ok(z
                .iter()
                .zip(center)
                .all(|(a, c)| (a - c).abs() <= half_width + TAU_FEAS)),
            LevelSet::Pointwise { body, s, scale } => Ok(slice_value(body, z, *scale)? >= s - TAU_FEAS),
        }
    }
}

pub fn level_set(b: &MixedBody, s: f64, scale: SliceScale) -> Result<LevelSet> {
    if !(s > 0.0) {
        return Err(Error::ParameterDomain(format!("level must be positive, got {s}")));
    }
    match &b.shape {
        Shape::BallFiber(bf) => {
            let top = match scale {
                SliceScale::BallRadius => 1.0,
                SliceScale::VolumeRoot => unit_ball_volume(b.d).powf(1.0 / b.d as f64),
            };
            if s > top {
                return Ok(LevelSet::Empty);
            }
            Ok(LevelSet::Cube { center: bf.center(), half_width: bf.k as f64 * (1.0 - s / top) })
        }
        Shape::Polytope(_) => Ok(LevelSet::Pointwise { body: b.clone(), s, scale }),
    }
}

/// Sizes of `L_s` on a level grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelSetProfile {
    pub levels: Vec<f64>,
    /// Monte Carlo estimates of `vol_n(L_s)`.
    pub volumes: Vec<f64>,
    pub counts: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LayerCakeReport {
    /// Midpoint rule for `d ∫ s^{d−1} #(L_s ∩ Zⁿ) ds`.
    pub counting_integral: f64,
    pub mi_volume: f64,
    pub counting_residual: f64,
    /// Midpoint rule for `d ∫ s^{d−1} vol_n(L_s) ds` with sampled level volumes.
    pub continuous_integral: f64,
    pub lebesgue_volume: f64,
    pub continuous_residual: f64,
    /// Sampling standard error of `continuous_integral`.
    pub continuous_stderr: f64,
    pub profile: LevelSetProfile,
}

/// Checks both layer-cake identities with `g = vol_d^{1/d}` on a grid of
/// `grid` levels, using `samples` uniform points of the projection box for
/// the continuous side.
pub fn layer_cake_check(b: &MixedBody, grid: usize, samples: usize, seed: u64) -> Result<LayerCakeReport> {
    if grid < 64 {
        return Err(Error::ParameterDomain(format!("grid must be at least 64, got {grid}")));
    }
    if samples == 0 {
        return Err(Error::ParameterDomain("need at least one sample".into()));
    }
    let d = b.d as f64;
    let mi = mixed_integer_volume(b)?;
    let lattice_g: Vec<f64> = mi.fibers.iter().map(|f| f.volume.powf(1.0 / d)).collect();

    let (lo, hi) = projection_box(b)?;
    let box_vol: f64 = lo.iter().zip(&hi).map(|(l, h)| h - l).product();
    let sample_g: Vec<f64> = crate::par_map((0..samples).collect(), |i| {
            let mut r = rng::stream(seed, i as u64);
            let z: Vec<f64> = lo.iter().zip(&hi).map(|(l, h)| r.gen_range(*l..=*h)).collect();
            slice_value(b, &z, SliceScale::VolumeRoot)
    })
    .into_iter()
    .collect::<Result<_>>()?;

    let s_max = lattice_g.iter().chain(&sample_g).fold(0.0f64, |m, &g| m.max(g));
    let h = s_max / grid as f64;
    let mut levels = Vec::with_capacity(grid);
    let mut volumes = Vec::with_capacity(grid);
    let mut counts = Vec::with_capacity(grid);
    let mut counting = 0.0;
    let mut continuous = 0.0;
    for i in 0..grid {
        let s = (i as f64 + 0.5) * h;
        let count = lattice_g.iter().filter(|&&g| g >= s).count();
        let vol = box_vol * sample_g.iter().filter(|&&g| g >= s).count() as f64 / samples as f64;
        let w = d * s.powf(d - 1.0) * h;
        counting += w * count as f64;
        continuous += w * vol;
        levels.push(s);
        volumes.push(vol);
        counts.push(count);
    }

    // Per sample the layer cake collapses to g^d; its spread gives the error.
    let powers: Vec<f64> = sample_g.iter().map(|g| g.powf(d)).collect();
    let mean = powers.iter().sum::<f64>() / samples as f64;
    let var = powers.iter().map(|p| (p - mean) * (p - mean)).sum::<f64>() / (samples.max(2) - 1) as f64;
    let lebesgue = body_volume(b)?;
    Ok(LayerCakeReport {
        counting_integral: counting,
        mi_volume: mi.total,
        counting_residual: (counting - mi.total).abs(),
        continuous_integral: continuous,
        lebesgue_volume: lebesgue,
        continuous_residual: (continuous - lebesgue).abs(),
        continuous_stderr: box_vol * (var / samples as f64).sqrt(),
        profile: LevelSetProfile { levels, volumes, counts },
    })
}

fn projection_box(b: &MixedBody) -> Result<(Vec<f64>, Vec<f64>)> {
    match &b.shape {
        Shape::BallFiber(bf) => Ok(bf.projection_box()),
        Shape::Polytope(p) => {
            let (lo, hi) = p.bounding_box()?.ok_or(Error::DegenerateDimension)?;
            Ok((lo[..b.n].to_vec(), hi[..b.n].to_vec()))
        }
    }
}

/// Counts `#(L_s ∩ Zⁿ)` by enumerating the integer box of the projection.
pub fn level_count(b: &MixedBody, set: &LevelSet) -> Result<usize> {
    let (lo, hi) = b.integer_bounding_box()?;
    let mut count = 0;
    for z in super::integer_box(&lo, &hi)? {
        if set.contains(&as_f64(&z))? {
            count += 1;
        }
    }
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::necessity::BallFiberBody;

    #[test]
    fn ball_fiber_level_cube() {
        let b = MixedBody::ball_fiber(BallFiberBody::new(2, 1, 2).unwrap());
        match level_set(&b, 0.75, SliceScale::BallRadius).unwrap() {
            LevelSet::Cube { center, half_width } => {
                assert_eq!(center, vec![2.5, 2.5]);
                assert!((half_width - 0.5).abs() < 1e-15);
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(level_set(&b, 1.5, SliceScale::BallRadius).unwrap(), LevelSet::Empty);
    }

    #[test]
    fn polytope_level_set_unit_fibers() {
        let b = MixedBody::cube(1, 1, &[0.0, 0.0], &[2.0, 1.0]).unwrap();
        let l = level_set(&b, 1.0, SliceScale::VolumeRoot).unwrap();
        for z in [0.0, 0.7, 2.0] {
            assert!(l.contains(&[z]).unwrap());
        }
        assert!(!l.contains(&[2.1]).unwrap());
        assert_eq!(level_count(&b, &l).unwrap(), 3);
        let high = level_set(&b, 1.01, SliceScale::VolumeRoot).unwrap();
        assert_eq!(level_count(&b, &high).unwrap(), 0);
        assert!(level_set(&b, 0.0, SliceScale::VolumeRoot).is_err());
    }

    #[test]
    fn layer_cake_on_unit_box() {
        let b = MixedBody::cube(2, 2, &[0.0; 4], &[1.0; 4]).unwrap();
        let r = layer_cake_check(&b, 256, 500, 1).unwrap();
        assert!(r.counting_residual < 1e-6, "{r:?}");
        assert!(r.continuous_residual < 1e-6);
    }

    #[test]
    fn layer_cake_on_ball_fiber() {
        let b = MixedBody::ball_fiber(BallFiberBody::new(1, 1, 3).unwrap());
        let r = layer_cake_check(&b, 4096, 4000, 3).unwrap();
        assert!(r.counting_residual < 1e-3, "{}", r.counting_residual);
        assert!(r.continuous_residual < 4.0 * r.continuous_stderr + 1e-2);
        for w in r.profile.counts.windows(2) {
            assert!(w[0] >= w[1]);
        }
        for w in r.profile.volumes.windows(2) {
            assert!(w[0] >= w[1]);
        }
    }

    #[test]
    fn small_grid_rejected() {
        let b = MixedBody::cube(1, 1, &[0.0; 2], &[1.0; 2]).unwrap();
        assert!(matches!(layer_cake_check(&b, 10, 10, 0), Err(Error::ParameterDomain(_))));
    }
}
