//! A deep point of `S` by centroid rounding.
//!
//! Given a cube `z₀ + k·[−1,1]ⁿ` inside the projection `K`, shrink `C`
//! toward a point `w*` chosen so the centroid of the shrunk body
//! `C′ = (1−ε)C + εw*`, `ε = 1/(2k)`, projects to an integer point. The
//! centroid of `C′` is then a point of `S` whose depth ratio is at least
//! `1/e − 3(n+d)/(2k)`.

use serde::Serialize;
use std::f64::consts::E;

use crate::hull::{
    erode_by_cube, project_to_integer_space, vertices_with_facets, AffineImage, HPolytope, Halfspace, MixedBody, Shape,
};
use crate::linalg::{norm2, norm_inf};
use crate::lp::{self, LpOutcome};
use crate::measure::{centroid, volume};
use crate::{Error, Result, TAU_FEAS, TAU_NUM};

/// Largest inscribed ℓ∞ ball `z₀ + k·[−1,1]ⁿ ⊆ K`.
///
/// Among optimal centers the lexicographically smallest is returned.
pub fn find_box(k_poly: &HPolytope) -> Result<(Vec<f64>, f64)> {
    let n = k_poly.dim();
    let mut rows: Vec<Vec<f64>> = k_poly
        .rows()
        .iter()
        .map(|a| {
            let mut r = a.clone();
            r.push(a.iter().map(|x| x.abs()).sum());
            r
        })
        .collect();
    let mut rhs = k_poly.offsets().to_vec();
    let mut c = vec![0.0; n + 1];
    c[n] = 1.0;
    let (x, k) = match lp::maximize(&c, &rows, &rhs)? {
        LpOutcome::Optimal { x, value } => (x, value),
        LpOutcome::Infeasible => return Err(Error::DegenerateDimension),
        LpOutcome::Unbounded => return Err(Error::Unbounded(vec![])),
    };
    if !(k > TAU_FEAS) {
        return Err(Error::DegenerateDimension);
    }
    // Hold k at its optimum, then minimize z₁, z₂, … in turn.
    let slack = 1e-10 * (1.0 + k.abs());
    let mut fix = vec![0.0; n + 1];
    fix[n] = -1.0;
    rows.push(fix);
    rhs.push(-(k - slack));
    let mut z = x[..n].to_vec();
    for i in 0..n {
        let mut obj = vec![0.0; n + 1];
        obj[i] = -1.0;
        if let LpOutcome::Optimal { x, .. } = lp::maximize(&obj, &rows, &rhs)? {
            z[i] = x[i];
            let mut pin = vec![0.0; n + 1];
            pin[i] = 1.0;
            rows.push(pin);
            rhs.push(x[i] + slack);
        }
    }
    Ok((z, k))
}

/// Numbers checked before a certificate is returned.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificateChecks {
    /// `‖proj(centroid(C′)) − z*‖∞`.
    pub centroid_offset: f64,
    /// `|vol(C′)/((1−ε)^{n+d} vol(C)) − 1|`.
    pub volume_ratio_error: f64,
    /// Largest violation of `C` by a vertex of `C′` (≤ 0 when contained).
    pub containment_violation: f64,
    /// Violation of the eroded projection at its expected center (≤ 0 when inside).
    pub eroded_violation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CenterpointCertificate {
    pub y_star: Vec<f64>,
    pub k: f64,
    pub epsilon: f64,
    pub z_center: Vec<f64>,
    pub z_star: Vec<i64>,
    /// `proj(w*)`.
    pub u: Vec<f64>,
    pub w_star: Vec<f64>,
    pub c_prime: HPolytope,
    /// `max(1/e − 3(n+d)/(2k), 0)`.
    pub coefficient: f64,
    /// `k ≥ 3e(n+d)`, where the coefficient is at least `1/(2e)`.
    pub conjecture_ok: bool,
    /// `k < 3e(n+d)/2`: the construction runs but guarantees nothing.
    pub sub_threshold: bool,
    pub checks: CertificateChecks,
}

/// `max(1/e − 3m/(2k), 0)`.
pub fn theorem_coefficient(m: usize, k: f64) -> f64 {
    (1.0 / E - 3.0 * m as f64 / (2.0 * k)).max(0.0)
}

fn polytope_of(c: &MixedBody) -> Result<&HPolytope> {
    c.as_polytope()
        .ok_or_else(|| Error::ParameterDomain("centroid rounding needs a polytope body".into()))
}

/// Chebyshev center of the fiber of `p` over a real point `u`.
fn lift(p: &HPolytope, n: usize, u: &[f64]) -> Result<Vec<f64>> {
    let mut rows = Vec::with_capacity(p.n_rows());
    let mut rhs = Vec::with_capacity(p.n_rows());
    for (a, &b) in p.rows().iter().zip(p.offsets()) {
        let off: f64 = b - a[..n].iter().zip(u).map(|(x, y)| x * y).sum::<f64>();
        rows.push(a[n..].to_vec());
        rhs.push(off + TAU_FEAS * norm2(a));
    }
    match lp::chebyshev_center(&rows, &rhs, p.dim() - n)? {
        Some((x, _)) => {
            let mut w = u.to_vec();
            w.extend(x);
            Ok(w)
        }
        None => Err(Error::LiftInfeasible(u.to_vec())),
    }
}

pub fn centroid_round(c: &MixedBody, z0: &[f64], k: f64) -> Result<CenterpointCertificate> {
    let p = polytope_of(c)?;
    let (n, m) = (c.n, c.dim());
    if !(k > 0.5) {
        return Err(Error::ParameterDomain(format!("need k > 1/2, got {k}")));
    }
    if z0.len() != n {
        return Err(Error::InvalidInput(format!("box center has length {}, expected {n}", z0.len())));
    }
    let kp = project_to_integer_space(c)?;
    let scale = 1.0 + norm_inf(z0) + k;
    if erode_by_cube(&kp, k).max_violation(z0) > TAU_FEAS * scale {
        return Err(Error::ParameterDomain(format!("cube of radius {k} at {z0:?} is not inside the projection")));
    }

    let eps = 1.0 / (2.0 * k);
    let c_full = centroid(p)?;
    let z_c = &c_full[..n];
    let target: Vec<f64> = z_c.iter().zip(z0).map(|(a, b)| (1.0 - eps) * a + eps * b).collect();
    // Round half up.
    let z_star: Vec<f64> = target.iter().map(|t| (t + 0.5).floor()).collect();
    if z_star.iter().zip(&target).any(|(a, b)| (a - b).abs() > 0.5 + 1e-12) {
        return Err(Error::RoundingOutOfRange(target));
    }
    let u: Vec<f64> = z_star.iter().zip(z_c).map(|(s, zc)| (s - (1.0 - eps) * zc) / eps).collect();
    let w_star = lift(p, n, &u)?;

    let shrink: Vec<Vec<f64>> = (0..m)
        .map(|i| (0..m).map(|j| if i == j { 1.0 - eps } else { 0.0 }).collect())
        .collect();
    let shift: Vec<f64> = w_star.iter().map(|w| eps * w).collect();
    let c_prime = p.affine_image(&shrink, &shift)?;
    let y_cent = centroid(&c_prime)?;

    let centroid_offset = norm_inf(&crate::linalg::sub(&y_cent[..n], &z_star));
    let vol_c = volume(p)?;
    let vol_cp = volume(&c_prime)?;
    let volume_ratio_error = (vol_cp / ((1.0 - eps).powi(m as i32) * vol_c) - 1.0).abs();
    let containment_violation = vertices_with_facets(&c_prime)
        .iter()
        .map(|v| p.max_violation(&v.point))
        .fold(f64::NEG_INFINITY, f64::max);
    let proj_cp = project_to_integer_space(&MixedBody { n, d: c.d, shape: Shape::Polytope(c_prime.clone()) })?;
    let cube_center: Vec<f64> = z0.iter().zip(&u).map(|(a, b)| (1.0 - eps) * a + eps * b).collect();
    let eroded_violation = erode_by_cube(&proj_cp, k - 0.5).max_violation(&cube_center);
    let checks = CertificateChecks { centroid_offset, volume_ratio_error, containment_violation, eroded_violation };

    let pscale = 1.0 + norm_inf(&y_cent);
    if centroid_offset > TAU_FEAS * pscale {
        return Err(Error::VerificationFailed(format!("projected centroid is {centroid_offset} from z*")));
    }
    if volume_ratio_error > TAU_FEAS {
        return Err(Error::VerificationFailed(format!("volume ratio off by {volume_ratio_error}")));
    }
    if containment_violation > TAU_FEAS * pscale {
        return Err(Error::VerificationFailed(format!("C′ leaves C by {containment_violation}")));
    }
    if eroded_violation > TAU_FEAS * scale {
        return Err(Error::VerificationFailed(format!("projection of C′ misses the shrunk cube by {eroded_violation}")));
    }

    let mut y_star = y_cent;
    y_star[..n].copy_from_slice(&z_star);
    if !c.contains_mixed(&y_star, TAU_FEAS) {
        return Err(Error::VerificationFailed("y* is not a point of S".into()));
    }
    Ok(CenterpointCertificate {
        y_star,
        k,
        epsilon: eps,
        z_center: z0.to_vec(),
        z_star: z_star.iter().map(|&v| v as i64).collect(),
        u,
        w_star,
        c_prime,
        coefficient: theorem_coefficient(m, k),
        conjecture_ok: k >= 3.0 * E * m as f64,
        sub_threshold: k < 1.5 * E * m as f64,
        checks,
    })
}

/// Inscribed cube of the projection, then centroid rounding.
pub fn theorem3_pipeline(c: &MixedBody) -> Result<CenterpointCertificate> {
    theorem3_pipeline_with(c, None)
}

/// As [`theorem3_pipeline`], optionally with a smaller cube radius.
pub fn theorem3_pipeline_with(c: &MixedBody, k_override: Option<f64>) -> Result<CenterpointCertificate> {
    polytope_of(c)?;
    let kp = project_to_integer_space(c)?;
    let (z0, k_max) = find_box(&kp)?;
    let k = match k_override {
        Some(k) if k > k_max + TAU_NUM => {
            return Err(Error::ParameterDomain(format!("k = {k} exceeds the inscribed radius {k_max}")));
        }
        Some(k) => k,
        None => k_max,
    };
    if !(k > 0.5) {
        return Err(Error::ParameterDomain(format!("inscribed cube radius {k} is not above 1/2")));
    }
    centroid_round(c, &z0, k.min(k_max))
}

/// Exact determinant by cofactor expansion.
pub fn integer_det(u: &[Vec<i64>]) -> i128 {
    let n = u.len();
    if n == 0 {
        return 1;
    }
    if n == 1 {
        return u[0][0] as i128;
    }
    let mut acc = 0i128;
    for j in 0..n {
        if u[0][j] == 0 {
            continue;
        }
        let minor: Vec<Vec<i64>> = u[1..]
            .iter()
            .map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, &v)| v).collect())
            .collect();
        let s = if j % 2 == 0 { 1 } else { -1 };
        acc += s * u[0][j] as i128 * integer_det(&minor);
    }
    acc
}

/// `(z, x) ↦ (U⁻¹z, x)` and its inverse.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnimodularTransport {
    pub n: usize,
    pub u: Vec<Vec<i64>>,
    pub u_inv: Vec<Vec<i64>>,
}

fn int_mat_vec(m: &[Vec<i64>], v: &[f64]) -> Vec<f64> {
    m.iter().map(|r| r.iter().zip(v).map(|(a, b)| *a as f64 * b).sum()).collect()
}

fn row_times(a: &[f64], m: &[Vec<i64>]) -> Vec<f64> {
    (0..m.len()).map(|j| a.iter().zip(m).map(|(ai, r)| ai * r[j] as f64).sum()).collect()
}

impl UnimodularTransport {
    /// Original coordinates to reduced ones.
    pub fn push_point(&self, y: &[f64]) -> Vec<f64> {
        let mut out = int_mat_vec(&self.u_inv, &y[..self.n]);
        out.extend_from_slice(&y[self.n..]);
        out
    }

    /// Reduced coordinates back to original ones.
    pub fn pull_point(&self, y: &[f64]) -> Vec<f64> {
        let mut out = int_mat_vec(&self.u, &y[..self.n]);
        out.extend_from_slice(&y[self.n..]);
        out
    }

    /// `{a·y ≥ c}` in original coordinates, expressed in reduced ones.
    pub fn push_halfspace(&self, h: &Halfspace) -> Result<Halfspace> {
        let a = h.normal();
        let mut row = row_times(&a[..self.n], &self.u);
        row.extend_from_slice(&a[self.n..]);
        Halfspace::new(row, h.offset())
    }

    pub fn pull_halfspace(&self, h: &Halfspace) -> Result<Halfspace> {
        let a = h.normal();
        let mut row = row_times(&a[..self.n], &self.u_inv);
        row.extend_from_slice(&a[self.n..]);
        Halfspace::new(row, h.offset())
    }
}

fn adjugate_inverse(u: &[Vec<i64>], det: i128) -> Vec<Vec<i64>> {
    let n = u.len();
    let mut inv = vec![vec![0i64; n]; n];
    for i in 0..n {
        for j in 0..n {
            let minor: Vec<Vec<i64>> = u
                .iter()
                .enumerate()
                .filter(|&(r, _)| r != j)
                .map(|(_, row)| row.iter().enumerate().filter(|&(c, _)| c != i).map(|(_, &v)| v).collect())
                .collect();
            let s: i128 = if (i + j) % 2 == 0 { 1 } else { -1 };
            inv[i][j] = (s * integer_det(&minor) * det) as i64;
        }
    }
    inv
}

/// `C̃ = T_U(C)` for unimodular `U`; lattice fibers map onto lattice fibers.
pub fn unimodular_reduce(c: &MixedBody, u: &[Vec<i64>]) -> Result<(MixedBody, UnimodularTransport)> {
    let p = polytope_of(c)?;
    let n = c.n;
    if u.len() != n || u.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidInput(format!("U must be {n}×{n}")));
    }
    if n > 6 {
        return Err(Error::ParameterDomain("unimodular check supports n ≤ 6".into()));
    }
    let det = integer_det(u);
    if det.abs() != 1 {
        return Err(Error::NotUnimodular(det));
    }
    // det = ±1, so the inverse is the adjugate times det.
    let u_inv = adjugate_inverse(u, det);
    let t = UnimodularTransport { n, u: u.to_vec(), u_inv };
    // y ∈ C ⇔ T_U(y) ∈ C̃, so the rows of C̃ are (a_z U, a_x).
    let rows = p
        .rows()
        .iter()
        .map(|a| {
            let mut r = row_times(&a[..n], u);
            r.extend_from_slice(&a[n..]);
            r
        })
        .collect();
    let reduced = HPolytope::new(rows, p.offsets().to_vec())?;
    Ok((MixedBody::polytope(n, c.d, reduced)?, t))
}
