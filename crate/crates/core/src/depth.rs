//! Captured mixed-integer volume `H_d(S ∩ H)` and sampled halfspace depth.
//!
//! Depth is an infimum over halfspaces, so any finite direction set gives an
//! upper bound on it. Every halfspace tried has its boundary through the
//! query point: shifting the boundary toward `y` only shrinks what is
//! captured.

use serde::{Deserialize, Serialize};
use statrs::function::beta::beta_reg;

use crate::hull::{vertices_with_facets, FiberBody, HPolytope, Halfspace, MixedBody, Shape};
use crate::linalg::{dot, norm2, sub};
use crate::measure::{self, as_f64, triangulate, Simplex};
use crate::{rng, Error, Result, TAU_FEAS, TAU_NUM};

/// Fraction of a ball of radius 1 in ℝᵈ lying in `{u₁ ≥ h}`.
pub fn cap_fraction(d: usize, h: f64) -> f64 {
    if h >= 1.0 {
        return 0.0;
    }
    if h <= -1.0 {
        return 1.0;
    }
    if h < 0.0 {
        return 1.0 - cap_fraction(d, -h);
    }
    0.5 * beta_reg((d as f64 + 1.0) / 2.0, 0.5, 1.0 - h * h)
}

#[derive(Debug, Clone)]
enum FiberGeom {
    Simplices(Vec<Simplex>),
    Ball(f64),
}

/// Lattice fibers of a body, prepared once for many halfspace queries.
#[derive(Debug, Clone)]
pub struct CutEvaluator {
    n: usize,
    d: usize,
    fibers: Vec<(Vec<f64>, f64, FiberGeom)>,
    total: f64,
}

impl CutEvaluator {
    pub fn new(b: &MixedBody) -> Result<Self> {
        let report = measure::mixed_integer_volume(b)?;
        let mut fibers = Vec::with_capacity(report.fibers.len());
        for f in report.fibers {
            let geom = match &f.body {
                FiberBody::Polytope(p) => FiberGeom::Simplices(triangulate(p)?),
                FiberBody::Ball { radius, .. } => FiberGeom::Ball(*radius),
                FiberBody::Empty => continue,
            };
            fibers.push((as_f64(&f.z), f.volume, geom));
        }
        Ok(Self { n: b.n, d: b.d, fibers, total: report.total })
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    /// `H_d(S ∩ H)`.
    pub fn captured(&self, h: &Halfspace) -> f64 {
        let a = h.normal();
        let (az, ax) = a.split_at(self.n);
        let ax_norm = norm2(ax);
        let mut sum = 0.0;
        for (z, vol, geom) in &self.fibers {
            // Fiber constraint: ax·x ≥ c − az·z.
            let rhs = h.offset() - dot(az, z);
            if ax_norm <= 1e-12 {
                if rhs <= TAU_FEAS {
                    sum += vol;
                }
                continue;
            }
            sum += match geom {
                FiberGeom::Ball(r) => vol * cap_fraction(self.d, rhs / (ax_norm * r)),
                FiberGeom::Simplices(ss) => {
                    let cut = Halfspace::new(ax.to_vec(), rhs).expect("nonzero normal");
                    ss.iter().map(|s| s.cut_volume(&cut)).sum()
                }
            };
        }
        sum
    }
}

/// `H_d(S ∩ H)` for one halfspace.
pub fn captured_volume(b: &MixedBody, h: &Halfspace) -> Result<f64> {
    Ok(CutEvaluator::new(b)?.captured(h))
}

/// Where a sampled direction came from; also the tie-break order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DirectionSource {
    Coordinate,
    FacetNormal,
    Vertex,
    Random,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepEntry {
    pub index: usize,
    pub source: DirectionSource,
    pub direction: Vec<f64>,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DepthReport {
    pub point: Vec<f64>,
    /// Smallest captured fraction found. This is an upper bound on the true
    /// depth ratio.
    pub min_ratio: f64,
    pub bound_orientation: &'static str,
    pub argmin_halfspace: Halfspace,
    pub argmin_source: DirectionSource,
    pub captured: f64,
    pub total_mi_volume: f64,
    /// Number of halfspaces evaluated.
    pub directions: usize,
    pub random_directions: usize,
    pub seed: u64,
    /// A proven lower bound on the ratio, when one is known for this point.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lower_bound: Option<f64>,
    /// Whether `lower_bound ≤ min_ratio` up to `TAU_NUM`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bracketed: Option<bool>,
    #[serde(skip)]
    pub sweep: Vec<SweepEntry>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DepthOptions {
    pub random_dirs: usize,
    pub seed: u64,
    pub keep_sweep: bool,
    pub lower_bound: Option<f64>,
}

impl DepthOptions {
    pub fn new(random_dirs: usize, seed: u64) -> Self {
        Self { random_dirs, seed, keep_sweep: false, lower_bound: None }
    }
}

pub fn estimate_depth(b: &MixedBody, y: &[f64], n_dirs: usize, seed: u64) -> Result<DepthReport> {
    estimate_depth_with(b, y, &DepthOptions::new(n_dirs, seed))
}

/// Candidate directions in canonical order: ± coordinate axes, ± facet
/// normals, vertex directions from `y`, then seeded sphere samples.
pub fn direction_set(b: &MixedBody, y: &[f64], random_dirs: usize, seed: u64) -> Vec<(DirectionSource, Vec<f64>)> {
    let m = b.dim();
    let mut dirs = Vec::new();
    for i in 0..m {
        for s in [1.0, -1.0] {
            let mut e = vec![0.0; m];
            e[i] = s;
            dirs.push((DirectionSource::Coordinate, e));
        }
    }
    match &b.shape {
        Shape::Polytope(p) => {
            for row in p.rows() {
                let r = norm2(row);
                dirs.push((DirectionSource::FacetNormal, row.iter().map(|x| x / r).collect()));
                dirs.push((DirectionSource::FacetNormal, row.iter().map(|x| -x / r).collect()));
            }
            for v in vertices_with_facets(p) {
                let dv = sub(&v.point, y);
                let r = norm2(&dv);
                if r > 1e-9 {
                    dirs.push((DirectionSource::Vertex, dv.iter().map(|x| x / r).collect()));
                }
            }
        }
        Shape::BallFiber(bf) if bf.n <= 10 => {
            // The sign vectors play the role of facet normals of the projection.
            for mask in 0..(1usize << bf.n) {
                let mut a = vec![0.0; m];
                for (i, ai) in a.iter_mut().take(bf.n).enumerate() {
                    *ai = if mask >> i & 1 == 1 { -1.0 } else { 1.0 };
                }
                let r = norm2(&a);
                dirs.push((DirectionSource::FacetNormal, a.iter().map(|x| x / r).collect()));
            }
        }
        Shape::BallFiber(_) => {}
    }
    for i in 0..random_dirs {
        let mut r = rng::stream(seed, i as u64);
        dirs.push((DirectionSource::Random, rng::unit_vector(&mut r, m)));
    }
    dirs
}

pub fn estimate_depth_with(b: &MixedBody, y: &[f64], opts: &DepthOptions) -> Result<DepthReport> {
    if opts.random_dirs == 0 {
        return Err(Error::ParameterDomain("need at least one random direction".into()));
    }
    if !b.contains_mixed(y, TAU_FEAS) {
        return Err(Error::PointNotInS(format!("{y:?} is not in the body with an integral z-part")));
    }
    let eval = CutEvaluator::new(b)?;
    let total = eval.total();
    if !(total > 0.0) {
        return Err(Error::DegenerateDimension);
    }
    let dirs = direction_set(b, y, opts.random_dirs, opts.seed);
    let captured: Vec<(f64, Halfspace)> = crate::par_map(dirs.iter().map(|(_, a)| a.clone()).collect(), |a| {
        let h = Halfspace::through(a, y).expect("unit direction");
        (eval.captured(&h), h)
    });
    // First index wins on ties, independent of scheduling.
    let mut best = 0;
    for (i, (c, _)) in captured.iter().enumerate() {
        if *c < captured[best].0 {
            best = i;
        }
    }
    let min_ratio = captured[best].0 / total;
    let sweep = if opts.keep_sweep {
        dirs.iter()
            .zip(&captured)
            .enumerate()
            .map(|(index, ((source, a), (c, _)))| SweepEntry { index, source: *source, direction: a.clone(), ratio: c / total })
            .collect()
    } else {
        Vec::new()
    };
    Ok(DepthReport {
        point: y.to_vec(),
        min_ratio,
        bound_orientation: "upper_bound",
        argmin_halfspace: captured[best].1.clone(),
        argmin_source: dirs[best].0,
        captured: captured[best].0,
        total_mi_volume: total,
        directions: dirs.len(),
        random_directions: opts.random_dirs,
        seed: opts.seed,
        lower_bound: opts.lower_bound,
        bracketed: opts.lower_bound.map(|lb| lb <= min_ratio + TAU_NUM),
        sweep,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    /// `{a·y ≥ c}`.
    H,
    /// `{a·y ≤ c}`.
    HBar,
}

/// A translate `t + ½D` contained in `D ∩ side`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BisectionWitness {
    pub side: Side,
    pub translate: Vec<f64>,
    pub scale: f64,
    pub theta: f64,
    /// Worst containment slack over the vertices of `t + ½D` (nonnegative).
    pub margin: f64,
}

pub fn bisection_witness(d: &HPolytope, h: &Halfspace) -> Result<BisectionWitness> {
    let a = h.normal();
    let neg: Vec<f64> = a.iter().map(|x| -x).collect();
    let (y_plus, hi) = d.support(a)?.ok_or(Error::DegenerateDimension)?;
    let (y_minus, lo) = d.support(&neg)?.ok_or(Error::DegenerateDimension)?;
    let theta = 0.5 * (hi - lo);
    let (side, anchor) = if h.offset() <= theta { (Side::H, y_plus) } else { (Side::HBar, y_minus) };
    let translate: Vec<f64> = anchor.iter().map(|x| 0.5 * x).collect();
    let verts = vertices_with_facets(d);
    let mut margin = f64::INFINITY;
    for v in &verts {
        let p: Vec<f64> = v.point.iter().zip(&translate).map(|(x, t)| 0.5 * x + t).collect();
        let in_d = -d.max_violation(&p);
        let in_side = match side {
            Side::H => h.value(&p),
            Side::HBar => -h.value(&p),
        };
        margin = margin.min(in_d).min(in_side);
    }
    let scale_tol = TAU_FEAS * (1.0 + theta.abs().max(hi.abs()));
    if margin < -scale_tol {
        return Err(Error::VerificationFailed(format!("bisection witness misses by {}", -margin)));
    }
    Ok(BisectionWitness { side, translate, scale: 0.5, theta, margin: margin.max(0.0) })
}
