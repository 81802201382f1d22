use super::{HPolytope, MixedBody, Shape, VPolytope};
use crate::linalg::{dot, inverse, mat_vec, norm1, norm2, vec_mat};
use crate::lp::{self, LpOutcome};
use crate::{Error, Result, TAU_FEAS};

/// `K = proj_{ℝⁿ}(B)` by Fourier–Motzkin elimination of the continuous
/// coordinates, pruning rows that are redundant up to `TAU_FEAS` after each
/// step. Ball-fiber bodies project onto their box exactly.
pub fn project_to_integer_space(body: &MixedBody) -> Result<HPolytope> {
    match &body.shape {
        Shape::Polytope(p) => {
            let k = project_prefix(p, body.n)?;
            if !k.has_interior() {
                return Err(Error::DegenerateDimension);
            }
            Ok(k)
        }
        Shape::BallFiber(b) => {
            let (lo, hi) = b.projection_box();
            Ok(HPolytope::cube(&lo, &hi))
        }
    }
}

/// Projection of `p` onto its first `keep` coordinates.
pub(crate) fn project_prefix(p: &HPolytope, keep: usize) -> Result<HPolytope> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut rhs: Vec<f64> = Vec::new();
    for (r, &b) in p.rows().iter().zip(p.offsets()) {
        push_unit(&mut rows, &mut rhs, r.clone(), b)?;
    }
    for col in (keep..p.dim()).rev() {
        let mut next_rows = Vec::new();
        let mut next_rhs = Vec::new();
        let (mut pos, mut neg) = (Vec::new(), Vec::new());
        for (r, &b) in rows.iter().zip(&rhs) {
            let c = r[col];
            if c > 1e-12 {
                pos.push((r, b, c));
            } else if c < -1e-12 {
                neg.push((r, b, -c));
            } else {
                push_unit(&mut next_rows, &mut next_rhs, r[..col].to_vec(), b)?;
            }
        }
        for &(rp, bp, cp) in &pos {
            for &(rn, bn, cn) in &neg {
                let row: Vec<f64> = (0..col).map(|j| rp[j] / cp + rn[j] / cn).collect();
                push_unit(&mut next_rows, &mut next_rhs, row, bp / cp + bn / cn)?;
            }
        }
        let (r, b) = prune_redundant(next_rows, next_rhs)?;
        rows = r;
        rhs = b;
    }
    if rows.is_empty() {
        return Err(Error::DegenerateDimension);
    }
    HPolytope::new(rows, rhs)
}

/// Appends a normalized row; zero rows are feasibility checks.
fn push_unit(rows: &mut Vec<Vec<f64>>, rhs: &mut Vec<f64>, row: Vec<f64>, b: f64) -> Result<()> {
    let len = norm2(&row);
    if len <= 1e-12 {
        if b < -TAU_FEAS {
            return Err(Error::DegenerateDimension);
        }
        return Ok(());
    }
    let row: Vec<f64> = row.into_iter().map(|x| x / len).collect();
    let b = b / len;
    // Parallel duplicate: keep the tighter offset.
    if let Some(i) = rows.iter().position(|r| r.iter().zip(&row).all(|(x, y)| (x - y).abs() <= 1e-12)) {
        rhs[i] = rhs[i].min(b);
        return Ok(());
    }
    rows.push(row);
    rhs.push(b);
    Ok(())
}

/// Drops each row whose removal moves the support value in its own normal
/// direction by at most `TAU_FEAS`.
fn prune_redundant(mut rows: Vec<Vec<f64>>, mut rhs: Vec<f64>) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
    let mut i = 0;
    while i < rows.len() {
        let row = rows.remove(i);
        let b = rhs.remove(i);
        let redundant = match lp::maximize(&row, &rows, &rhs)? {
            LpOutcome::Optimal { value, .. } => value <= b + TAU_FEAS,
            LpOutcome::Infeasible => true,
            LpOutcome::Unbounded => false,
        };
        if !redundant {
            rows.insert(i, row);
            rhs.insert(i, b);
            i += 1;
        }
    }
    Ok((rows, rhs))
}

/// `{z : z + r·[−1,1]^dim ⊆ P}`: each offset tightens by `r·‖a_i‖₁`.
pub fn erode_by_cube(p: &HPolytope, r: f64) -> HPolytope {
    let b = p
        .rows()
        .iter()
        .zip(p.offsets())
        .map(|(a, &b)| b - r * norm1(a))
        .collect();
    HPolytope::from_parts(p.dim(), p.rows().to_vec(), b)
}

/// `P + r·[−1,1]^dim` as the hull of every vertex shifted to every cube corner.
pub fn minkowski_sum_cube(p: &VPolytope, r: f64) -> Result<VPolytope> {
    let dim = p.dim();
    let mut pts = Vec::with_capacity(p.vertices().len() << dim);
    for v in p.vertices() {
        for mask in 0..(1usize << dim) {
            pts.push(
                v.iter()
                    .enumerate()
                    .map(|(i, x)| if mask >> i & 1 == 1 { x + r } else { x - r })
                    .collect(),
            );
        }
    }
    VPolytope::from_points(pts)
}

/// Image under `y ↦ M·y + t`.
pub trait AffineImage: Sized {
    fn affine_image(&self, m: &[Vec<f64>], t: &[f64]) -> Result<Self>;
}

impl AffineImage for HPolytope {
    /// Rows become `a_i·M⁻¹`, offsets `b_i + a_i·M⁻¹·t`.
    fn affine_image(&self, m: &[Vec<f64>], t: &[f64]) -> Result<Self> {
        check_shape(m, t, self.dim())?;
        let inv = inverse(m).ok_or(Error::SingularMatrix)?;
        let mut rows = Vec::with_capacity(self.n_rows());
        let mut offs = Vec::with_capacity(self.n_rows());
        for (a, &b) in self.rows().iter().zip(self.offsets()) {
            let row = vec_mat(a, &inv);
            offs.push(b + dot(&row, t));
            rows.push(row);
        }
        Ok(HPolytope::from_parts(self.dim(), rows, offs))
    }
}

impl AffineImage for VPolytope {
    fn affine_image(&self, m: &[Vec<f64>], t: &[f64]) -> Result<Self> {
        check_shape(m, t, self.dim())?;
        if inverse(m).is_none() {
            return Err(Error::SingularMatrix);
        }
        let verts = self
            .vertices()
            .iter()
            .map(|v| mat_vec(m, v).iter().zip(t).map(|(x, s)| x + s).collect())
            .collect();
        Ok(VPolytope::from_vertices_unchecked(self.dim(), verts))
    }
}

fn check_shape(m: &[Vec<f64>], t: &[f64], dim: usize) -> Result<()> {
    if m.len() != dim || m.iter().any(|r| r.len() != dim) || t.len() != dim {
        return Err(Error::InvalidInput(format!("affine map must be {dim}×{dim} with a length-{dim} shift")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hull::{hull_of_points, vertex_enumerate};
    use crate::measure::volume;
    use crate::rng;
    use rand::Rng;

    fn approx_box(p: &HPolytope, lo: &[f64], hi: &[f64]) {
        let (l, h) = p.bounding_box().unwrap().unwrap();
        for i in 0..lo.len() {
            assert!((l[i] - lo[i]).abs() < 1e-9 && (h[i] - hi[i]).abs() < 1e-9, "{l:?} {h:?}");
        }
    }

    #[test]
    fn project_box() {
        let b = MixedBody::cube(1, 1, &[0.0, 0.0], &[2.0, 3.0]).unwrap();
        let k = project_to_integer_space(&b).unwrap();
        approx_box(&k, &[0.0], &[2.0]);
        assert_eq!(k.n_rows(), 2);
    }

    #[test]
    fn project_simplex() {
        let a = vec![vec![-1.0, 0.0, 0.0], vec![0.0, -1.0, 0.0], vec![0.0, 0.0, -1.0], vec![1.0, 1.0, 1.0]];
        let c = HPolytope::new(a, vec![0.0, 0.0, 0.0, 3.0]).unwrap();
        let k = project_to_integer_space(&MixedBody::polytope(2, 1, c).unwrap()).unwrap();
        assert_eq!(k.n_rows(), 3);
        assert!(k.contains(&[0.0, 3.0], 1e-9) && k.contains(&[3.0, 0.0], 1e-9));
        assert!(!k.contains(&[1.6, 1.6], 1e-9));
        assert!((volume(&k).unwrap() - 4.5).abs() < 1e-9);
    }

    #[test]
    fn projection_matches_projected_vertex_hull() {
        for seed in 0..10 {
            let mut r = rng::stream(seed, 3);
            let pts: Vec<Vec<f64>> = (0..9).map(|_| (0..3).map(|_| r.gen_range(-2.0..2.0)).collect()).collect();
            let c = hull_of_points(&pts).unwrap();
            let k = project_to_integer_space(&MixedBody::polytope(2, 1, c.clone()).unwrap()).unwrap();
            let proj: Vec<Vec<f64>> =
                vertex_enumerate(&c).unwrap().vertices().iter().map(|v| v[..2].to_vec()).collect();
            let oracle = hull_of_points(&proj).unwrap();
            assert!((volume(&k).unwrap() - volume(&oracle).unwrap()).abs() < 1e-9);
            for v in vertex_enumerate(&k).unwrap().vertices() {
                assert!(oracle.contains(v, 1e-9));
            }
            for v in vertex_enumerate(&oracle).unwrap().vertices() {
                assert!(k.contains(v, 1e-9));
            }
        }
    }

    #[test]
    fn erode_examples() {
        let sq = HPolytope::cube(&[-2.2, -2.2], &[2.2, 2.2]);
        approx_box(&erode_by_cube(&sq, 0.5), &[-1.7, -1.7], &[1.7, 1.7]);
        let tri = HPolytope::new(vec![vec![-1.0, 0.0], vec![0.0, -1.0], vec![1.0, 1.0]], vec![0.0, 0.0, 4.0]).unwrap();
        let e = erode_by_cube(&tri, 0.5);
        assert_eq!(e.offsets(), &[-0.5, -0.5, 3.0]);
    }

    #[test]
    fn eroded_set_plus_cube_stays_inside() {
        for seed in 0..10 {
            let mut r = rng::stream(seed, 4);
            let pts: Vec<Vec<f64>> = (0..7).map(|_| (0..2).map(|_| r.gen_range(-3.0..3.0)).collect()).collect();
            let p = hull_of_points(&pts).unwrap();
            let e = erode_by_cube(&p, 0.3);
            for _ in 0..200 {
                let z: Vec<f64> = (0..2).map(|_| r.gen_range(-3.0..3.0)).collect();
                if e.contains(&z, 0.0) {
                    for mask in 0..4 {
                        let q: Vec<f64> = (0..2).map(|i| z[i] + if mask >> i & 1 == 1 { 0.3 } else { -0.3 }).collect();
                        assert!(p.contains(&q, 1e-9));
                    }
                }
            }
        }
    }

    #[test]
    fn minkowski_examples() {
        let sq = vertex_enumerate(&HPolytope::cube(&[-2.2, -2.2], &[2.2, 2.2])).unwrap();
        let s = minkowski_sum_cube(&sq, 0.5).unwrap();
        assert_eq!(s.vertices().len(), 4);
        approx_box(&s.to_hpolytope().unwrap(), &[-2.7, -2.7], &[2.7, 2.7]);

        let pt = VPolytope::from_points(vec![vec![1.0, 2.0, 3.0]]).unwrap();
        let c = minkowski_sum_cube(&pt, 0.25).unwrap();
        assert_eq!(c.vertices().len(), 8);
        assert!((volume(&c.to_hpolytope().unwrap()).unwrap() - 0.125).abs() < 1e-12);
    }

    #[test]
    fn minkowski_triangle_area() {
        // Mixed-area oracle: area(A + rQ) = area(A) + r·Σ_e len_e·‖n_e‖₁ + (2r)².
        let tri = VPolytope::from_points(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let s = minkowski_sum_cube(&tri, 0.5).unwrap();
        assert!((volume(&s.to_hpolytope().unwrap()).unwrap() - 3.5).abs() < 1e-12);
        // Monte Carlo cross-check on the hull of the 12 candidate points.
        let h = s.to_hpolytope().unwrap();
        let mut r = rng::stream(1, 0);
        let n = 200_000;
        let hits = (0..n)
            .filter(|_| h.contains(&[r.gen_range(-0.5..1.5), r.gen_range(-0.5..1.5)], 0.0))
            .count();
        let est = 4.0 * hits as f64 / n as f64;
        let se = 4.0 * ((hits as f64 / n as f64) * (1.0 - hits as f64 / n as f64) / n as f64).sqrt();
        assert!((est - 3.5).abs() < 4.0 * se);
    }

    #[test]
    fn affine_examples() {
        let cube = HPolytope::cube(&[0.0; 3], &[1.0; 3]);
        let id = vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]];
        let same = cube.affine_image(&id, &[0.0; 3]).unwrap();
        assert_eq!(same, cube);
        let s: Vec<Vec<f64>> = id.iter().map(|r| r.iter().map(|x| 0.75 * x).collect()).collect();
        let small = cube.affine_image(&s, &[0.0; 3]).unwrap();
        assert!((volume(&small).unwrap() - 0.421875).abs() < 1e-12);

        let sq = HPolytope::cube(&[0.0; 2], &[1.0; 2]);
        let u = vec![vec![1.0, 1.0], vec![0.0, 1.0]];
        let par = sq.affine_image(&u, &[0.0, 0.0]).unwrap();
        assert!((volume(&par).unwrap() - 1.0).abs() < 1e-12);
        assert!(par.contains(&[2.0, 1.0], 1e-12));

        let sing = vec![vec![1.0, 2.0], vec![2.0, 4.0]];
        assert_eq!(sq.affine_image(&sing, &[0.0, 0.0]), Err(Error::SingularMatrix));
    }
}
