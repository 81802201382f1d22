//! Small dense vector helpers over `&[f64]`, with nalgebra behind the solves.

use nalgebra::DMatrix;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn norm1(a: &[f64]) -> f64 {
    a.iter().map(|x| x.abs()).sum()
}

pub fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

/// `(1 - t)·a + t·b`.
pub fn lerp(a: &[f64], b: &[f64], t: f64) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| (1.0 - t) * x + t * y).collect()
}

pub fn mean(points: &[Vec<f64>]) -> Vec<f64> {
    let dim = points.first().map_or(0, Vec::len);
    let mut m = vec![0.0; dim];
    for p in points {
        for (mi, pi) in m.iter_mut().zip(p) {
            *mi += pi;
        }
    }
    let k = points.len().max(1) as f64;
    m.iter_mut().for_each(|x| *x /= k);
    m
}

pub fn to_matrix(rows: &[Vec<f64>]) -> DMatrix<f64> {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    DMatrix::from_fn(r, c, |i, j| rows[i][j])
}

/// Solves the square system `rows · x = rhs`. Returns `None` when the
/// system is numerically singular relative to the row scale.
pub fn solve(rows: &[Vec<f64>], rhs: &[f64]) -> Option<Vec<f64>> {
    let n = rows.len();
    let m = to_matrix(rows);
    let lu = m.clone().full_piv_lu();
    let scale = rows.iter().map(|r| norm_inf(r)).fold(0.0, f64::max).max(1e-300);
    let u = lu.u();
    let min_pivot = (0..n).map(|i| u[(i, i)].abs()).fold(f64::INFINITY, f64::min);
    if !(min_pivot > 1e-11 * scale) {
        return None;
    }
    let b = nalgebra::DVector::from_column_slice(rhs);
    lu.solve(&b).map(|x| x.iter().copied().collect())
}

pub fn det(rows: &[Vec<f64>]) -> f64 {
    if rows.is_empty() {
        return 1.0;
    }
    to_matrix(rows).determinant()
}

pub fn inverse(rows: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = rows.len();
    let m = to_matrix(rows);
    if det(rows).abs() < 1e-300 {
        return None;
    }
    let inv = m.try_inverse()?;
    Some((0..n).map(|i| (0..n).map(|j| inv[(i, j)]).collect()).collect())
}

pub fn mat_vec(rows: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    rows.iter().map(|r| dot(r, v)).collect()
}

/// Row vector times matrix: `a · M`.
pub fn vec_mat(a: &[f64], rows: &[Vec<f64>]) -> Vec<f64> {
    let cols = rows.first().map_or(0, Vec::len);
    (0..cols)
        .map(|j| a.iter().zip(rows).map(|(ai, r)| ai * r[j]).sum())
        .collect()
}

/// Dimension of the affine hull of `points` (−1 for the empty set).
pub fn affine_rank(points: &[&[f64]], tol: f64) -> isize {
    let Some(first) = points.first() else {
        return -1;
    };
    if points.len() == 1 {
        return 0;
    }
    let diffs: Vec<Vec<f64>> = points[1..].iter().map(|p| sub(p, first)).collect();
    to_matrix(&diffs).rank(tol) as isize
}

/// A unit normal `a` and offset `b` with `a·p = b` for all of the `dim`
/// given points, or `None` if they are affinely dependent.
pub fn hyperplane_through(points: &[&[f64]]) -> Option<(Vec<f64>, f64)> {
    let dim = points[0].len();
    debug_assert_eq!(points.len(), dim);
    if dim == 1 {
        return Some((vec![1.0], points[0][0]));
    }
    let base = points[0];
    let mut diffs = Vec::with_capacity((dim - 1) * dim);
    let mut scale = 1.0;
    for p in &points[1..] {
        let mut len = 0.0;
        for (x, y) in p.iter().zip(base) {
            diffs.push(x - y);
            len += (x - y) * (x - y);
        }
        scale *= len.sqrt();
    }
    // Normal = generalized cross product: signed maximal minors.
    let mut normal = vec![0.0; dim];
    let k = dim - 1;
    let mut minor = vec![0.0; k * k];
    for (j, nj) in normal.iter_mut().enumerate() {
        for r in 0..k {
            let mut c2 = 0;
            for c in 0..dim {
                if c != j {
                    minor[r * k + c2] = diffs[r * dim + c];
                    c2 += 1;
                }
            }
        }
        let sign = if (j + dim - 1) % 2 == 0 { 1.0 } else { -1.0 };
        *nj = sign * det_in_place(&mut minor, k);
    }
    let len = norm2(&normal);
    if !(len > 1e-10 * scale.max(1e-300)) {
        return None;
    }
    normal.iter_mut().for_each(|x| *x /= len);
    let b = dot(&normal, base);
    Some((normal, b))
}

/// Determinant of an `n × n` row-major matrix held in `m` (overwritten).
pub fn det_in_place(m: &mut [f64], n: usize) -> f64 {
    let mut det = 1.0;
    for col in 0..n {
        let mut piv = col;
        for r in col + 1..n {
            if m[r * n + col].abs() > m[piv * n + col].abs() {
                piv = r;
            }
        }
        let p = m[piv * n + col];
        if p == 0.0 {
            return 0.0;
        }
        if piv != col {
            for c in 0..n {
                m.swap(col * n + c, piv * n + c);
            }
            det = -det;
        }
        det *= p;
        for r in col + 1..n {
            let f = m[r * n + col] / p;
            if f != 0.0 {
                for c in col..n {
                    m[r * n + c] -= f * m[col * n + c];
                }
            }
        }
    }
    det
}

/// Solves `M·x = rhs` for a small row-major `n × n` system held in `m`
/// (overwritten), writing `x` into `rhs`. Returns `false` when a pivot falls
/// below `pivot_tol`.
pub fn solve_in_place(m: &mut [f64], rhs: &mut [f64], n: usize, pivot_tol: f64) -> bool {
    for col in 0..n {
        let mut piv = col;
        for r in col + 1..n {
            if m[r * n + col].abs() > m[piv * n + col].abs() {
                piv = r;
            }
        }
        let p = m[piv * n + col];
        if p.abs() <= pivot_tol {
            return false;
        }
        if piv != col {
            for c in 0..n {
                m.swap(col * n + c, piv * n + c);
            }
            rhs.swap(col, piv);
        }
        for r in col + 1..n {
            let f = m[r * n + col] / p;
            if f != 0.0 {
                for c in col..n {
                    m[r * n + c] -= f * m[col * n + c];
                }
                rhs[r] -= f * rhs[col];
            }
        }
    }
    for col in (0..n).rev() {
        let mut acc = rhs[col];
        for c in col + 1..n {
            acc -= m[col * n + c] * rhs[c];
        }
        rhs[col] = acc / m[col * n + col];
    }
    true
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}
