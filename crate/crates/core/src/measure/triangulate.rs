//! Boundary-fan triangulation: every face is coned from the mean of its
//! vertices over the triangulations of its own facets.

use crate::hull::{vertices_with_facets, Halfspace, HPolytope, Vertex};
use crate::linalg::{affine_rank, det_in_place, factorial, hyperplane_through, mean};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Simplex {
    pub vertices: Vec<Vec<f64>>,
}

impl Simplex {
    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn volume(&self) -> f64 {
        let m = self.dim();
        let v0 = &self.vertices[0];
        let mut buf: Vec<f64> = self.vertices[1..]
            .iter()
            .flat_map(|v| v.iter().zip(v0).map(|(a, b)| a - b))
            .collect();
        det_in_place(&mut buf, m).abs() / factorial(m)
    }

    pub fn centroid(&self) -> Vec<f64> {
        mean(&self.vertices)
    }

    /// Volume of `self ∩ h`. One-vertex cuts use the product formula; the
    /// remaining splits clip an (m+2)-row H-polytope.
    pub fn cut_volume(&self, h: &Halfspace) -> f64 {
        let vals: Vec<f64> = self.vertices.iter().map(|v| h.value(v)).collect();
        let above = vals.iter().filter(|&&x| x > 0.0).count();
        let m = self.dim();
        if above == 0 {
            return 0.0;
        }
        if above == m + 1 {
            return self.volume();
        }
        if above == 1 {
            let i = vals.iter().position(|&x| x > 0.0).unwrap();
            return self.volume() * corner_fraction(&vals, i);
        }
        if above == m {
            let i = vals.iter().position(|&x| x <= 0.0).unwrap();
            let neg: Vec<f64> = vals.iter().map(|x| -x).collect();
            if neg[i] > 0.0 {
                return self.volume() * (1.0 - corner_fraction(&neg, i));
            }
            // The lone vertex sits on the plane: nothing is cut away.
            return self.volume();
        }
        if let Some(f) = split_fraction(&vals) {
            return self.volume() * f;
        }
        match self.to_hpolytope() {
            Some(p) => super::volume(&p.intersect_halfspace(h)).unwrap_or(0.0),
            None => 0.0,
        }
    }

    fn to_hpolytope(&self) -> Option<HPolytope> {
        let m = self.dim();
        let mut rows = Vec::with_capacity(m + 1);
        let mut offs = Vec::with_capacity(m + 1);
        for skip in 0..=m {
            let pts: Vec<&[f64]> = (0..=m).filter(|&j| j != skip).map(|j| self.vertices[j].as_slice()).collect();
            let (a, b) = hyperplane_through(&pts)?;
            let inside = crate::linalg::dot(&a, &self.vertices[skip]) - b;
            if inside > 0.0 {
                rows.push(a.iter().map(|x| -x).collect());
                offs.push(-b);
            } else {
                rows.push(a);
                offs.push(b);
            }
        }
        Some(HPolytope::from_parts(m, rows, offs))
    }
}

/// Fraction of a simplex cut off near vertex `i`, the only vertex with a
/// positive value: `Π_{j≠i} v_i/(v_i − v_j)`.
fn corner_fraction(vals: &[f64], i: usize) -> f64 {
    let vi = vals[i];
    vals.iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(_, &vj)| vi / (vi - vj))
        .product()
}

/// `Σ_{v_j>0} v_j^m / Π_{i≠j}(v_j − v_i)`, the positive-side fraction of a
/// simplex. `None` when near-equal values make the sum cancel badly.
fn split_fraction(vals: &[f64]) -> Option<f64> {
    let m = vals.len() as i32 - 1;
    let (mut sum, mut mag) = (0.0, 0.0);
    for (j, &vj) in vals.iter().enumerate() {
        if vj <= 0.0 {
            continue;
        }
        let mut t = vj.powi(m);
        for (i, &vi) in vals.iter().enumerate() {
            if i != j {
                t /= vj - vi;
            }
        }
        sum += t;
        mag += t.abs();
    }
    (mag.is_finite() && mag <= 1e3).then_some(sum.clamp(0.0, 1.0))
}

/// Simplices covering `p`; empty for an empty polytope.
pub fn triangulate(p: &HPolytope) -> Result<Vec<Simplex>> {
    let verts = vertices_with_facets(p);
    if verts.is_empty() {
        return Ok(vec![]);
    }
    let refs: Vec<&[f64]> = verts.iter().map(|v| v.point.as_slice()).collect();
    if affine_rank(&refs, 1e-9) < p.dim() as isize {
        return Err(Error::DegenerateDimension);
    }
    let all: Vec<usize> = (0..verts.len()).collect();
    let mut out = Vec::new();
    fan(&all, p.dim(), &verts, p.n_rows(), &mut Vec::new(), &mut out);
    Ok(out)
}

fn fan(face: &[usize], dim: usize, verts: &[Vertex], n_rows: usize, apexes: &mut Vec<Vec<f64>>, out: &mut Vec<Simplex>) {
    if face.len() == dim + 1 {
        let mut vs: Vec<Vec<f64>> = face.iter().map(|&i| verts[i].point.clone()).collect();
        vs.extend(apexes.iter().cloned());
        out.push(Simplex { vertices: vs });
        return;
    }
    let pts: Vec<Vec<f64>> = face.iter().map(|&i| verts[i].point.clone()).collect();
    apexes.push(mean(&pts));
    let mut seen: Vec<Vec<usize>> = Vec::new();
    for row in 0..n_rows {
        let sub: Vec<usize> = face
            .iter()
            .copied()
            .filter(|&i| verts[i].facets.binary_search(&row).is_ok())
            .collect();
        if sub.len() < dim || sub.len() == face.len() || seen.contains(&sub) {
            continue;
        }
        let refs: Vec<&[f64]> = sub.iter().map(|&i| verts[i].point.as_slice()).collect();
        if affine_rank(&refs, 1e-9) != dim as isize - 1 {
            continue;
        }
        fan(&sub, dim - 1, verts, n_rows, apexes, out);
        seen.push(sub);
    }
    apexes.pop();
}
