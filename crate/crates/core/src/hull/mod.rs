//! Convex geometry kernel.
//!
//! Polytopes are stored in H-form `{y : A·y ≤ b}` ([`HPolytope`]) or as a
//! vertex list ([`VPolytope`]). A [`MixedBody`] pairs a body in ℝⁿ⁺ᵈ with
//! the split into `n` integer and `d` continuous coordinates; the integer
//! coordinates always come first.

mod ops;
mod vertices;

pub use ops::{erode_by_cube, minkowski_sum_cube, project_to_integer_space, AffineImage};
pub use vertices::{hull_of_points, vertex_enumerate, vertices_with_facets, Vertex};

use serde::{Deserialize, Serialize};

use crate::linalg::{dot, norm2};
use crate::lp::{self, LpOutcome};
use crate::necessity::BallFiberBody;
use crate::{Error, Result, TAU_FEAS};

/// Closed halfspace `{y : a·y ≥ c}` with `‖a‖₂ = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Halfspace {
    a: Vec<f64>,
    c: f64,
}

impl Halfspace {
    pub fn new(a: Vec<f64>, c: f64) -> Result<Self> {
        let len = norm2(&a);
        if !(len > 0.0) || !len.is_finite() || !c.is_finite() {
            return Err(Error::InvalidInput("halfspace normal must be nonzero and finite".into()));
        }
        Ok(Self { a: a.into_iter().map(|x| x / len).collect(), c: c / len })
    }

    /// The halfspace `{u : a·u ≥ a·y}` whose boundary passes through `y`.
    pub fn through(a: Vec<f64>, y: &[f64]) -> Result<Self> {
        let c = dot(&a, y);
        Self::new(a, c)
    }

    pub fn normal(&self) -> &[f64] {
        &self.a
    }

    pub fn offset(&self) -> f64 {
        self.c
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }

    /// Signed value `a·y − c`; nonnegative inside.
    pub fn value(&self, y: &[f64]) -> f64 {
        dot(&self.a, y) - self.c
    }

    pub fn contains(&self, y: &[f64], tol: f64) -> bool {
        self.value(y) >= -tol
    }

    /// The opposite closed halfspace `{a·y ≤ c}`.
    pub fn complement(&self) -> Self {
        Self { a: self.a.iter().map(|x| -x).collect(), c: -self.c }
    }

    /// The halfspace as a row of `A·y ≤ b`.
    pub fn as_row(&self) -> (Vec<f64>, f64) {
        (self.a.iter().map(|x| -x).collect(), -self.c)
    }
}

/// H-polytope `{y ∈ ℝ^dim : A·y ≤ b}`, bounded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HPolytope {
    dim: usize,
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
}

impl HPolytope {
    /// Validates shapes, rejects zero rows and checks boundedness by LP in
    /// every ± coordinate direction. An empty polytope is accepted.
    pub fn new(a: Vec<Vec<f64>>, b: Vec<f64>) -> Result<Self> {
        let dim = a.first().map(Vec::len).ok_or_else(|| Error::Unbounded(vec![]))?;
        if dim == 0 {
            return Err(Error::InvalidInput("polytope dimension must be positive".into()));
        }
        if a.len() != b.len() {
            return Err(Error::InvalidInput(format!(
                "A has {} rows but b has {} entries",
                a.len(),
                b.len()
            )));
        }
        for (i, row) in a.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::InvalidInput(format!(
                    "row {i} of A has length {}, expected {dim}",
                    row.len()
                )));
            }
            if row.iter().chain(std::iter::once(&b[i])).any(|x| !x.is_finite()) {
                return Err(Error::InvalidInput(format!("row {i} has a non-finite entry")));
            }
            if norm2(row) == 0.0 {
                return Err(Error::InvalidInput(format!("row {i} of A is zero")));
            }
        }
        let p = Self { dim, a, b };
        p.check_bounded()?;
        Ok(p)
    }

    /// Skips the boundedness LPs; for polytopes derived from a bounded one.
    pub(crate) fn from_parts(dim: usize, a: Vec<Vec<f64>>, b: Vec<f64>) -> Self {
        debug_assert!(a.iter().all(|r| r.len() == dim));
        Self { dim, a, b }
    }

    /// Axis-aligned box `[lo, hi]`.
    pub fn cube(lo: &[f64], hi: &[f64]) -> Self {
        let dim = lo.len();
        let mut a = Vec::with_capacity(2 * dim);
        let mut b = Vec::with_capacity(2 * dim);
        for i in 0..dim {
            let mut e = vec![0.0; dim];
            e[i] = 1.0;
            a.push(e.clone());
            b.push(hi[i]);
            e[i] = -1.0;
            a.push(e);
            b.push(-lo[i]);
        }
        Self { dim, a, b }
    }

    fn check_bounded(&self) -> Result<()> {
        for i in 0..self.dim {
            for sign in [1.0, -1.0] {
                let mut c = vec![0.0; self.dim];
                c[i] = sign;
                match lp::maximize(&c, &self.a, &self.b)? {
                    LpOutcome::Unbounded => return Err(Error::Unbounded(c)),
                    LpOutcome::Infeasible => return Ok(()),
                    LpOutcome::Optimal { .. } => {}
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.a
    }

    pub fn offsets(&self) -> &[f64] {
        &self.b
    }

    pub fn n_rows(&self) -> usize {
        self.a.len()
    }

    /// Membership with slack `tol` measured along unit normals.
    pub fn contains(&self, y: &[f64], tol: f64) -> bool {
        self.a
            .iter()
            .zip(&self.b)
            .all(|(row, &bi)| dot(row, y) - bi <= tol * norm2(row))
    }

    /// Largest violation `max_i (a_i·y − b_i)/‖a_i‖` (negative inside).
    pub fn max_violation(&self, y: &[f64]) -> f64 {
        self.a
            .iter()
            .zip(&self.b)
            .map(|(row, &bi)| (dot(row, y) - bi) / norm2(row))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn with_row(&self, row: Vec<f64>, offset: f64) -> Self {
        let mut p = self.clone();
        p.a.push(row);
        p.b.push(offset);
        p
    }

    pub fn intersect_halfspace(&self, h: &Halfspace) -> Self {
        let (row, off) = h.as_row();
        self.with_row(row, off)
    }

    /// Maximizer and value of `dir·y`, or `None` when empty.
    pub fn support(&self, dir: &[f64]) -> Result<Option<(Vec<f64>, f64)>> {
        match lp::maximize(dir, &self.a, &self.b)? {
            LpOutcome::Optimal { x, value } => Ok(Some((x, value))),
            LpOutcome::Infeasible => Ok(None),
            LpOutcome::Unbounded => Err(Error::Unbounded(dir.to_vec())),
        }
    }

    /// Coordinate-wise bounding box, or `None` when empty.
    pub fn bounding_box(&self) -> Result<Option<(Vec<f64>, Vec<f64>)>> {
        let mut lo = vec![0.0; self.dim];
        let mut hi = vec![0.0; self.dim];
        for i in 0..self.dim {
            let mut e = vec![0.0; self.dim];
            e[i] = 1.0;
            let Some((_, h)) = self.support(&e)? else {
                return Ok(None);
            };
            e[i] = -1.0;
            let Some((_, l)) = self.support(&e)? else {
                return Ok(None);
            };
            hi[i] = h;
            lo[i] = -l;
        }
        Ok(Some((lo, hi)))
    }

    /// Largest inscribed Euclidean ball, or `None` when empty.
    pub fn chebyshev_ball(&self) -> Result<Option<(Vec<f64>, f64)>> {
        lp::chebyshev_center(&self.a, &self.b, self.dim)
    }

    pub fn has_interior(&self) -> bool {
        matches!(self.chebyshev_ball(), Ok(Some((_, r))) if r > TAU_FEAS)
    }

    pub fn is_empty(&self) -> bool {
        !matches!(self.chebyshev_ball(), Ok(Some(_)))
    }

    /// Split of the columns into `(A_z, A_x)` at index `n`.
    pub fn split_columns(&self, n: usize) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
        self.a.iter().map(|r| (r[..n].to_vec(), r[n..].to_vec())).unzip()
    }
}

/// V-polytope: the extreme points of a bounded polytope.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VPolytope {
    dim: usize,
    vertices: Vec<Vec<f64>>,
}

impl VPolytope {
    /// Keeps the extreme points of `points` after deduplication at
    /// `TAU_VERTEX`. Lower-dimensional point sets are only deduplicated.
    pub fn from_points(points: Vec<Vec<f64>>) -> Result<Self> {
        let dim = points.first().map(Vec::len).ok_or(Error::DegenerateDimension)?;
        let pts = vertices::dedup_points(points);
        let refs: Vec<&[f64]> = pts.iter().map(Vec::as_slice).collect();
        if crate::linalg::affine_rank(&refs, 1e-12) < dim as isize {
            return Ok(Self { dim, vertices: pts });
        }
        let hull = hull_of_points(&pts)?;
        let vertices = vertex_enumerate(&hull)?.vertices;
        Ok(Self { dim, vertices })
    }

    pub(crate) fn from_vertices_unchecked(dim: usize, vertices: Vec<Vec<f64>>) -> Self {
        Self { dim, vertices }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    pub fn to_hpolytope(&self) -> Result<HPolytope> {
        hull_of_points(&self.vertices)
    }
}

/// Geometry of a mixed body.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Shape {
    Polytope(HPolytope),
    BallFiber(BallFiberBody),
}

/// A convex body in ℝⁿ⁺ᵈ with coordinates `(z, x)`, `z ∈ ℝⁿ` integral in `S`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixedBody {
    pub n: usize,
    pub d: usize,
    pub shape: Shape,
}

impl MixedBody {
    pub fn polytope(n: usize, d: usize, p: HPolytope) -> Result<Self> {
        if n < 1 || d < 1 {
            return Err(Error::InvalidInput(format!("need n ≥ 1 and d ≥ 1, got n={n}, d={d}")));
        }
        if p.dim() != n + d {
            return Err(Error::InvalidInput(format!(
                "polytope dimension {} does not match n + d = {}",
                p.dim(),
                n + d
            )));
        }
        Ok(Self { n, d, shape: Shape::Polytope(p) })
    }

    pub fn ball_fiber(body: BallFiberBody) -> Self {
        Self { n: body.n, d: body.d, shape: Shape::BallFiber(body) }
    }

    /// Box `[lo, hi]` in ℝⁿ⁺ᵈ.
    pub fn cube(n: usize, d: usize, lo: &[f64], hi: &[f64]) -> Result<Self> {
        if lo.len() != n + d || hi.len() != n + d {
            return Err(Error::InvalidInput("box bounds must have length n + d".into()));
        }
        if lo.iter().zip(hi).any(|(l, h)| !(h > l)) {
            return Err(Error::InvalidInput("box needs lo < hi in every coordinate".into()));
        }
        Self::polytope(n, d, HPolytope::cube(lo, hi))
    }

    pub fn dim(&self) -> usize {
        self.n + self.d
    }

    pub fn as_polytope(&self) -> Option<&HPolytope> {
        match &self.shape {
            Shape::Polytope(p) => Some(p),
            Shape::BallFiber(_) => None,
        }
    }

    pub fn contains(&self, y: &[f64], tol: f64) -> bool {
        match &self.shape {
            Shape::Polytope(p) => p.contains(y, tol),
            Shape::BallFiber(b) => b.contains(y, tol),
        }
    }

    /// Is `y ∈ S`: inside the body with an integral z-part.
    pub fn contains_mixed(&self, y: &[f64], tol: f64) -> bool {
        y.len() == self.dim()
            && y[..self.n].iter().all(|z| (z - z.round()).abs() <= tol)
            && self.contains(y, tol)
    }

    /// `{x : (z, x) ∈ B}` for any real `z`.
    pub fn fiber(&self, z: &[f64]) -> FiberBody {
        match &self.shape {
            Shape::Polytope(p) => polytope_fiber(p, self.n, z),
            Shape::BallFiber(b) => match b.radius(z) {
                Some(r) if r > 0.0 => FiberBody::Ball { d: self.d, radius: r },
                _ => FiberBody::Empty,
            },
        }
    }

    /// Integer box `[lo, hi]` that contains every lattice point of the projection.
    pub fn integer_bounding_box(&self) -> Result<(Vec<i64>, Vec<i64>)> {
        let (lo, hi) = match &self.shape {
            Shape::Polytope(p) => {
                let (lo, hi) = p.bounding_box()?.ok_or(Error::DegenerateDimension)?;
                (lo[..self.n].to_vec(), hi[..self.n].to_vec())
            }
            Shape::BallFiber(b) => {
                let (lo, hi) = b.projection_box();
                (lo, hi)
            }
        };
        Ok((
            lo.iter().map(|v| (v - TAU_FEAS).ceil() as i64).collect(),
            hi.iter().map(|v| (v + TAU_FEAS).floor() as i64).collect(),
        ))
    }
}

/// Fiber geometry at a fixed z.
#[derive(Debug, Clone, PartialEq)]
pub enum FiberBody {
    Polytope(HPolytope),
    Ball { d: usize, radius: f64 },
    Empty,
}

impl FiberBody {
    pub fn is_empty(&self) -> bool {
        matches!(self, FiberBody::Empty)
    }
}

/// Column split `A_x·x ≤ b − A_z·z`; rows with `A_x = 0` become feasibility
/// checks on z (slack `TAU_FEAS`) and are dropped.
fn polytope_fiber(p: &HPolytope, n: usize, z: &[f64]) -> FiberBody {
    let d = p.dim() - n;
    let mut rows = Vec::with_capacity(p.n_rows());
    let mut rhs = Vec::with_capacity(p.n_rows());
    for (row, &bi) in p.rows().iter().zip(p.offsets()) {
        let ax = &row[n..];
        let off = bi - dot(&row[..n], z);
        let nx = norm2(ax);
        if nx <= 1e-12 * norm2(row) {
            if off < -TAU_FEAS * norm2(row) {
                return FiberBody::Empty;
            }
            continue;
        }
        rows.push(ax.to_vec());
        rhs.push(off);
    }
    if rows.is_empty() {
        // No constraint touches x: impossible for a bounded body.
        return FiberBody::Empty;
    }
    let fib = HPolytope::from_parts(d, rows, rhs);
    if vertices::is_empty_quick(&fib) {
        return FiberBody::Empty;
    }
    FiberBody::Polytope(fib)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::volume;

    #[test]
    fn halfspace_normalizes() {
        let h = Halfspace::new(vec![3.0, 4.0], 10.0).unwrap();
        assert!((h.normal()[0] - 0.6).abs() < 1e-15);
        assert!((h.offset() - 2.0).abs() < 1e-15);
        assert!(Halfspace::new(vec![0.0, 0.0], 1.0).is_err());
        let c = h.complement();
        assert!(c.contains(&[0.0, 0.0], 0.0));
        assert!(!h.contains(&[0.0, 0.0], 0.0));
    }

    #[test]
    fn rejects_unbounded_and_zero_rows() {
        let a = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        assert!(matches!(HPolytope::new(a, vec![1.0, 1.0]), Err(Error::Unbounded(_))));
        let a = vec![vec![0.0, 0.0]];
        assert!(matches!(HPolytope::new(a, vec![1.0]), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn box_fiber_examples() {
        let b = MixedBody::cube(2, 1, &[0.0; 3], &[1.0; 3]).unwrap();
        match b.fiber(&[0.0, 1.0]) {
            FiberBody::Polytope(p) => assert!((volume(&p).unwrap() - 1.0).abs() < 1e-12),
            other => panic!("unexpected fiber {other:?}"),
        }
        assert!(b.fiber(&[2.0, 0.0]).is_empty());
    }

    #[test]
    fn ball_fiber_radius_example() {
        let b = MixedBody::ball_fiber(BallFiberBody::new(1, 1, 3).unwrap());
        match b.fiber(&[3.0]) {
            FiberBody::Ball { radius, .. } => assert!((radius - 5.0 / 6.0).abs() < 1e-15),
            other => panic!("unexpected fiber {other:?}"),
        }
    }

    #[test]
    fn integer_box_of_offset_cube() {
        let b = MixedBody::cube(1, 1, &[0.5, 0.0], &[6.5, 1.0]).unwrap();
        let (lo, hi) = b.integer_bounding_box().unwrap();
        assert_eq!((lo, hi), (vec![1], vec![6]));
    }
}
