//! Vertex enumeration by row subsets and facet enumeration by point subsets.
//! Both are brute force over `dim`-subsets, which is fine up to dimension 8
//! with a few dozen rows.

use itertools::Itertools;

use super::{HPolytope, VPolytope};
use crate::linalg::{affine_rank, dot, hyperplane_through, norm2, norm_inf, solve_in_place};
use crate::{Error, Result, TAU_FEAS, TAU_VERTEX};

/// Rows within this distance of a vertex count as tight.
const TIGHT: f64 = 1e-8;

/// An extreme point with the indices of the rows tight at it.
#[derive(Debug, Clone, PartialEq)]
pub struct Vertex {
    pub point: Vec<f64>,
    pub facets: Vec<usize>,
}

fn unit_rows(p: &HPolytope) -> (Vec<Vec<f64>>, Vec<f64>) {
    p.rows()
        .iter()
        .zip(p.offsets())
        .map(|(r, &b)| {
            let n = norm2(r);
            (r.iter().map(|x| x / n).collect::<Vec<_>>(), b / n)
        })
        .unzip()
}

/// All extreme points of `p` (possibly lower-dimensional, possibly none).
pub fn vertices_with_facets(p: &HPolytope) -> Vec<Vertex> {
    let (rows, rhs) = unit_rows(p);
    let dim = p.dim();
    let points = if dim == 1 { interval_points(&rows, &rhs) } else { subset_points(&rows, &rhs, dim) };
    points
        .into_iter()
        .map(|point| {
            let tol = TIGHT * (1.0 + norm_inf(&point));
            let facets = rows
                .iter()
                .zip(&rhs)
                .enumerate()
                .filter(|(_, (r, &b))| (dot(r, &point) - b).abs() <= tol)
                .map(|(i, _)| i)
                .collect();
            Vertex { point, facets }
        })
        .collect()
}

fn interval_points(rows: &[Vec<f64>], rhs: &[f64]) -> Vec<Vec<f64>> {
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    for (r, &b) in rows.iter().zip(rhs) {
        if r[0] > 0.0 {
            hi = hi.min(b / r[0]);
        } else {
            lo = lo.max(b / r[0]);
        }
    }
    if !(lo.is_finite() && hi.is_finite()) || lo > hi + TAU_FEAS * (1.0 + hi.abs()) {
        return vec![];
    }
    if hi - lo <= TAU_VERTEX {
        return vec![vec![0.5 * (lo + hi)]];
    }
    vec![vec![lo], vec![hi]]
}

fn subset_points(rows: &[Vec<f64>], rhs: &[f64], dim: usize) -> Vec<Vec<f64>> {
    let mut found: Vec<Vec<f64>> = Vec::new();
    let mut m = vec![0.0; dim * dim];
    let mut x = vec![0.0; dim];
    for combo in (0..rows.len()).combinations(dim) {
        for (r, &i) in combo.iter().enumerate() {
            m[r * dim..(r + 1) * dim].copy_from_slice(&rows[i]);
            x[r] = rhs[i];
        }
        if !solve_in_place(&mut m, &mut x, dim, 1e-12) {
            continue;
        }
        let tol = TAU_FEAS * (1.0 + norm_inf(&x));
        if rows.iter().zip(rhs).any(|(r, &b)| dot(r, &x) - b > tol) {
            continue;
        }
        if found.iter().any(|v| max_diff(v, &x) <= TAU_VERTEX) {
            continue;
        }
        found.push(x.clone());
    }
    found
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

/// Cheap emptiness test used for fibers.
pub(crate) fn is_empty_quick(p: &HPolytope) -> bool {
    vertices_with_facets(p).is_empty()
}

/// Extreme points of a bounded, full-dimensional H-polytope.
pub fn vertex_enumerate(p: &HPolytope) -> Result<VPolytope> {
    let verts: Vec<Vec<f64>> = vertices_with_facets(p).into_iter().map(|v| v.point).collect();
    let refs: Vec<&[f64]> = verts.iter().map(Vec::as_slice).collect();
    if affine_rank(&refs, 1e-9) < p.dim() as isize {
        return Err(Error::DegenerateDimension);
    }
    Ok(VPolytope::from_vertices_unchecked(p.dim(), verts))
}

pub(crate) fn dedup_points(points: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(points.len());
    for p in points {
        if !out.iter().any(|q| max_diff(q, &p) <= TAU_VERTEX) {
            out.push(p);
        }
    }
    out
}

/// H-representation of the convex hull of `points` (facets only, unit normals).
pub fn hull_of_points(points: &[Vec<f64>]) -> Result<HPolytope> {
    let dim = points.first().map(Vec::len).ok_or(Error::DegenerateDimension)?;
    let pts = dedup_points(points.to_vec());
    let refs: Vec<&[f64]> = pts.iter().map(Vec::as_slice).collect();
    if affine_rank(&refs, 1e-12) < dim as isize {
        return Err(Error::DegenerateDimension);
    }
    if dim == 1 {
        let lo = pts.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
        let hi = pts.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max);
        return Ok(HPolytope::from_parts(1, vec![vec![1.0], vec![-1.0]], vec![hi, -lo]));
    }
    let scale = 1.0 + pts.iter().map(|p| norm_inf(p)).fold(0.0, f64::max);
    let tol = 1e-9 * scale;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut offs: Vec<f64> = Vec::new();
    let mut sel: Vec<&[f64]> = Vec::with_capacity(dim);
    for combo in (0..pts.len()).combinations(dim) {
        sel.clear();
        sel.extend(combo.iter().map(|&i| pts[i].as_slice()));
        let Some((a, b)) = hyperplane_through(&sel) else {
            continue;
        };
        let mut above = false;
        let mut below = false;
        for p in &pts {
            let s = dot(&a, p) - b;
            above |= s > tol;
            below |= s < -tol;
            if above && below {
                break;
            }
        }
        let (a, b) = match (above, below) {
            (false, _) => (a, b),
            (true, false) => (a.iter().map(|x| -x).collect(), -b),
            (true, true) => continue,
        };
        let dup = rows
            .iter()
            .zip(&offs)
            .any(|(r, &o)| max_diff(r, &a) <= 1e-9 && (o - b).abs() <= tol);
        if !dup {
            rows.push(a);
            offs.push(b);
        }
    }
    Ok(HPolytope::from_parts(dim, rows, offs))
}
