//! Seeded property suites. Each suite draws instances from per-trial
//! streams, never stops at the first failure, and reports the smallest
//! slack it saw alongside the failure count.

mod envelopes;
mod suites;

pub use envelopes::{check_envelopes, envelope_bounds, EnvelopeBounds};
pub use suites::{
    check_bisection, check_centroid_rounding, check_comparison, check_grunbaum, check_lattice_sandwich,
    min_centroid_ratio,
};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::hull::{hull_of_points, HPolytope, MixedBody};
use crate::necessity::BallFiberBody;
use crate::rng::{self, Stream};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InstanceKind {
    RandomPolytope,
    Box,
    SimplexProduct,
    BallFiber,
}

impl InstanceKind {
    pub fn name(self) -> &'static str {
        match self {
            InstanceKind::RandomPolytope => "random_polytope",
            InstanceKind::Box => "box",
            InstanceKind::SimplexProduct => "simplex_product",
            InstanceKind::BallFiber => "ball_fiber",
        }
    }
}

/// Recipe for a family of random mixed bodies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub kind: InstanceKind,
    pub n: usize,
    pub d: usize,
    /// Every generated projection contains a cube of at least this radius.
    pub k_target: f64,
    pub seed: u64,
}

impl InstanceSpec {
    pub fn new(kind: InstanceKind, n: usize, d: usize, k_target: f64, seed: u64) -> Result<Self> {
        if n < 1 || d < 1 || n + d > 6 {
            return Err(Error::ParameterDomain(format!("need n, d ≥ 1 and n + d ≤ 6, got n={n}, d={d}")));
        }
        if !(k_target > 0.0 && k_target.is_finite()) {
            return Err(Error::ParameterDomain(format!("k_target must be positive, got {k_target}")));
        }
        Ok(Self { kind, n, d, k_target, seed })
    }

    /// Instance number `trial`.
    pub fn generate(&self, trial: u64) -> Result<MixedBody> {
        self.generate_with(&mut rng::stream(self.seed, trial))
    }

    /// Draws an instance from `r`, leaving the stream positioned after it.
    pub fn generate_with(&self, r: &mut Stream) -> Result<MixedBody> {
        let (n, d) = (self.n, self.d);
        let z0: Vec<f64> = (0..n).map(|_| r.gen_range(-1.0..1.0)).collect();
        let k = self.k_target * r.gen_range(1.0..2.0);
        match self.kind {
            InstanceKind::RandomPolytope => {
                let xs = r.gen_range(0.5..2.0);
                let mut pts = Vec::new();
                for mask in 0..1usize << n {
                    let mut p: Vec<f64> = (0..n).map(|i| if mask >> i & 1 == 1 { z0[i] + k } else { z0[i] - k }).collect();
                    p.extend((0..d).map(|_| r.gen_range(-xs..xs)));
                    pts.push(p);
                }
                let lo = (n + d + 2).max(pts.len() + d + 1);
                let total = r.gen_range(lo..=lo.max(12));
                while pts.len() < total {
                    let mut p: Vec<f64> = z0.iter().map(|c| c + r.gen_range(-1.5 * k..1.5 * k)).collect();
                    p.extend((0..d).map(|_| r.gen_range(-1.2 * xs..1.2 * xs)));
                    pts.push(p);
                }
                MixedBody::polytope(n, d, hull_of_points(&pts)?)
            }
            InstanceKind::Box => {
                let mut lo: Vec<f64> = Vec::with_capacity(n + d);
                let mut hi: Vec<f64> = Vec::with_capacity(n + d);
                for c in &z0 {
                    let h = k + r.gen_range(0.0..0.5);
                    lo.push(c - h);
                    hi.push(c + h);
                }
                for _ in 0..d {
                    let l = r.gen_range(-1.0..1.0);
                    lo.push(l);
                    hi.push(l + r.gen_range(0.5..2.0));
                }
                MixedBody::cube(n, d, &lo, &hi)
            }
            InstanceKind::SimplexProduct => {
                let h = r.gen_range(0.5..2.0);
                let x0: Vec<f64> = (0..d).map(|_| r.gen_range(-1.0..1.0)).collect();
                let dim = n + d;
                let mut a = Vec::new();
                let mut b = Vec::new();
                for i in 0..n {
                    let mut row = vec![0.0; dim];
                    row[i] = 1.0;
                    a.push(row.clone());
                    b.push(z0[i] + k);
                    row[i] = -1.0;
                    a.push(row);
                    b.push(k - z0[i]);
                }
                for j in 0..d {
                    let mut row = vec![0.0; dim];
                    row[n + j] = -1.0;
                    a.push(row);
                    b.push(-x0[j]);
                }
                let mut row = vec![0.0; dim];
                row[n..].iter_mut().for_each(|v| *v = 1.0);
                a.push(row);
                b.push(h + x0.iter().sum::<f64>());
                MixedBody::polytope(n, d, HPolytope::new(a, b)?)
            }
            InstanceKind::BallFiber => {
                let k = (self.k_target.ceil() as usize).max(2) + r.gen_range(0..3usize);
                Ok(MixedBody::ball_fiber(BallFiberBody::new(n, d, k)?))
            }
        }
    }
}

/// Hull of `count` uniform points in a random box of radius about `scale`.
pub(crate) fn random_polytope(r: &mut Stream, dim: usize, count: usize, scale: f64) -> Result<HPolytope> {
    let center: Vec<f64> = (0..dim).map(|_| r.gen_range(-2.0..2.0)).collect();
    let half: Vec<f64> = (0..dim).map(|_| scale * r.gen_range(0.5..1.5)).collect();
    for _ in 0..32 {
        let pts: Vec<Vec<f64>> = (0..count)
            .map(|_| center.iter().zip(&half).map(|(c, h)| c + r.gen_range(-h..*h)).collect())
            .collect();
        match hull_of_points(&pts) {
            Err(Error::DegenerateDimension) => continue,
            other => return other,
        }
    }
    Err(Error::DegenerateDimension)
}

/// Outcome of one suite.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyResult {
    pub name: String,
    pub instances: usize,
    /// Instances whose precondition did not hold.
    pub skipped: usize,
    pub checks: usize,
    pub failures: usize,
    /// Smallest slack over all checks; negative beyond tolerance is a failure.
    pub worst_margin: f64,
    pub seed: u64,
    /// First few errors raised while evaluating instances.
    pub errors: Vec<String>,
}

impl PropertyResult {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

const MAX_ERRORS: usize = 5;

/// Per-instance bookkeeping.
#[derive(Debug, Clone)]
pub(crate) struct Tally {
    pub skipped: bool,
    pub checks: usize,
    pub failures: usize,
    pub worst: f64,
}

impl Default for Tally {
    fn default() -> Self {
        Self { skipped: false, checks: 0, failures: 0, worst: f64::INFINITY }
    }
}

impl Tally {
    pub fn skipped() -> Self {
        Self { skipped: true, ..Self::default() }
    }

    /// A check with slack `margin`; fails below `−tol`.
    pub fn record(&mut self, margin: f64, tol: f64) {
        self.checks += 1;
        self.worst = self.worst.min(margin);
        if !(margin >= -tol) {
            self.failures += 1;
        }
    }

    /// A yes/no check that carries no slack of its own.
    pub fn agree(&mut self, ok: bool, miss: f64) {
        self.checks += 1;
        if !ok {
            self.failures += 1;
            self.worst = self.worst.min(-miss.abs());
        }
    }

    pub fn merge(&mut self, other: Tally) {
        self.checks += other.checks;
        self.failures += other.failures;
        self.worst = self.worst.min(other.worst);
    }
}

pub(crate) fn aggregate(name: impl Into<String>, seed: u64, outcomes: Vec<Result<Tally>>) -> PropertyResult {
    let mut out = PropertyResult {
        name: name.into(),
        instances: outcomes.len(),
        skipped: 0,
        checks: 0,
        failures: 0,
        worst_margin: f64::INFINITY,
        seed,
        errors: Vec::new(),
    };
    for o in outcomes {
        match o {
            Ok(t) => {
                if t.skipped {
                    out.skipped += 1;
                }
                out.checks += t.checks;
                out.failures += t.failures;
                out.worst_margin = out.worst_margin.min(t.worst);
            }
            Err(e) => {
                out.failures += 1;
                if out.errors.len() < MAX_ERRORS {
                    out.errors.push(e.to_string());
                }
            }
        }
    }
    out
}

/// Suite names accepted by [`run_suite`], besides `all`.
pub const SUITES: [&str; 6] = ["comparison", "envelopes", "sandwich", "grunbaum", "bisection", "rounding"];

/// Runs a named suite with `trials` instances per configuration.
pub fn run_suite(name: &str, trials: usize, seed: u64) -> Result<Vec<PropertyResult>> {
    use InstanceKind::*;
    let spec = |kind, n, d, k| InstanceSpec::new(kind, n, d, k, seed);
    let mut out = Vec::new();
    match name {
        "all" => {
            for s in SUITES {
                out.extend(run_suite(s, trials, seed)?);
            }
        }
        "comparison" => {
            for (kind, n, d, k) in [
                (RandomPolytope, 2, 1, 0.75),
                (RandomPolytope, 1, 2, 0.75),
                (RandomPolytope, 2, 2, 0.75),
                (Box, 2, 2, 0.6),
                (SimplexProduct, 2, 1, 0.75),
                (BallFiber, 1, 2, 2.0),
                (BallFiber, 2, 1, 2.0),
            ] {
                out.push(check_comparison(&spec(kind, n, d, k)?, trials)?);
            }
        }
        "envelopes" => {
            let configs = [
                (RandomPolytope, 2, 1),
                (RandomPolytope, 1, 2),
                (RandomPolytope, 2, 2),
                (SimplexProduct, 2, 2),
                (BallFiber, 2, 2),
                (BallFiber, 1, 3),
            ];
            let results = crate::par_map((0..trials).collect(), |t| {
                let (kind, n, d) = configs[t % configs.len()];
                let s = spec(kind, n, d, 1.0)?;
                let mut r = rng::stream(seed, t as u64);
                let body = s.generate_with(&mut r)?;
                envelopes::envelope_tally(&body, 40, r.gen())
            });
            out.push(aggregate("envelopes", seed, results));
        }
        "sandwich" => {
            for (kind, n) in [(SimplexProduct, 2), (RandomPolytope, 1), (RandomPolytope, 2), (RandomPolytope, 3)] {
                out.push(check_lattice_sandwich(&spec(kind, n, 1, 1.5)?, trials)?);
            }
        }
        "grunbaum" => {
            for dim in 1..=4 {
                out.push(check_grunbaum(dim, trials, 200, seed)?);
            }
        }
        "bisection" => out.push(check_bisection(trials, seed)?),
        "rounding" => {
            for (kind, n, d) in [(RandomPolytope, 1, 1), (RandomPolytope, 2, 1), (RandomPolytope, 1, 2), (SimplexProduct, 2, 2)] {
                out.push(check_centroid_rounding(&spec(kind, n, d, 0.75)?, trials)?);
            }
        }
        other => {
            return Err(Error::InvalidInput(format!(
                "unknown suite {other:?}; expected one of {} or all",
                SUITES.join(", ")
            )))
        }
    }
    Ok(out)
}
