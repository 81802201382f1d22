//! The ball-fiber family whose depth ratio decays like `exp(−Θ(m/k))`:
//! `C = {(z, x) : z ∈ [½, 2k+½]ⁿ, ‖x‖₂ ≤ 1 − ‖z − c‖∞/k}` with `c = (k+½)·1`.

use serde::{Deserialize, Serialize};
use std::f64::consts::LN_2;

use crate::hull::Halfspace;
use crate::linalg::norm2;
use crate::measure::unit_ball_volume;
use crate::{Error, Result, TAU_FEAS, TAU_NUM};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallFiberBody {
    pub n: usize,
    pub d: usize,
    pub k: usize,
}

impl BallFiberBody {
    pub fn new(n: usize, d: usize, k: usize) -> Result<Self> {
        if n < 1 || d < 1 {
            return Err(Error::ParameterDomain(format!("need n ≥ 1 and d ≥ 1, got n={n}, d={d}")));
        }
        if k < 2 {
            return Err(Error::ParameterDomain(format!("need k ≥ 2, got {k}")));
        }
        Ok(Self { n, d, k })
    }

    pub fn center(&self) -> Vec<f64> {
        vec![self.k as f64 + 0.5; self.n]
    }

    /// `t(z) = 1 − ‖z − c‖∞/k`, possibly negative outside the projection.
    pub fn t(&self, z: &[f64]) -> f64 {
        let c = self.k as f64 + 0.5;
        let dist = z.iter().fold(0.0f64, |m, zi| m.max((zi - c).abs()));
        1.0 - dist / self.k as f64
    }

    /// Fiber radius at `z` when the fiber has interior.
    pub fn radius(&self, z: &[f64]) -> Option<f64> {
        let t = self.t(z);
        (t > 0.0).then_some(t)
    }

    pub fn contains(&self, y: &[f64], tol: f64) -> bool {
        if y.len() != self.n + self.d {
            return false;
        }
        let t = self.t(&y[..self.n]);
        t >= -tol / self.k as f64 && norm2(&y[self.n..]) <= t + tol
    }

    /// `K = [½, 2k+½]ⁿ`.
    pub fn projection_box(&self) -> (Vec<f64>, Vec<f64>) {
        (vec![0.5; self.n], vec![2.0 * self.k as f64 + 0.5; self.n])
    }
}

/// `n = ⌊m/(1+αk)⌋`, `d = m − n`, after checking the domain.
pub fn build_necessity(alpha: f64, k: usize, m: usize) -> Result<BallFiberBody> {
    if !(alpha > LN_2) || !alpha.is_finite() {
        return Err(Error::ParameterDomain(format!("alpha must exceed log 2, got {alpha}")));
    }
    if k < 2 {
        return Err(Error::ParameterDomain(format!("k must be at least 2, got {k}")));
    }
    let floor_m = 2.0 * (1.0 + alpha * k as f64);
    if (m as f64) < floor_m {
        return Err(Error::ParameterDomain(format!("m = {m} is below 2(1+αk) = {floor_m}")));
    }
    let n = (m as f64 / (1.0 + alpha * k as f64)).floor() as usize;
    let d = m - n;
    if (d as f64) < alpha * (k * n) as f64 - TAU_NUM {
        return Err(Error::VerificationFailed(format!("d = {d} < αkn for n = {n}")));
    }
    BallFiberBody::new(n, d, k)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Shell {
    pub j: usize,
    pub count: u128,
    pub radius: f64,
}

/// Lattice points grouped by `‖z − c‖∞ = (2j+1)/2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShellDecomposition {
    pub shells: Vec<Shell>,
    pub central_count: u128,
    /// `T = Σ_{j≥1} count_j · radius_j^d`.
    pub tail: f64,
}

pub fn shell_decompose(b: &BallFiberBody) -> Result<ShellDecomposition> {
    let pow = |base: usize| -> Result<u128> {
        (base as u128)
            .checked_pow(b.n as u32)
            .ok_or(Error::TooLarge { cells: u128::MAX, budget: u128::MAX })
    };
    let mut shells = Vec::with_capacity(b.k);
    for j in 0..b.k {
        let count = pow(2 * j + 2)? - pow(2 * j)?;
        let radius = 1.0 - (2 * j + 1) as f64 / (2 * b.k) as f64;
        shells.push(Shell { j, count, radius });
    }
    let tail = shells[1..]
        .iter()
        .map(|s| s.count as f64 * s.radius.powi(b.d as i32))
        .sum();
    Ok(ShellDecomposition { central_count: shells[0].count, shells, tail })
}

/// `H_d(S) = v_d · (2ⁿ(1 − 1/(2k))^d + T)`.
pub fn hd_closed_form(b: &BallFiberBody) -> Result<f64> {
    let s = shell_decompose(b)?;
    let r0 = 1.0 - 1.0 / (2 * b.k) as f64;
    Ok(unit_ball_volume(b.d) * (s.central_count as f64 * r0.powi(b.d as i32) + s.tail))
}

/// A halfspace through `y` that meets the central block `{k, k+1}ⁿ` in at
/// most one lattice point.
pub fn adversarial_halfspace(b: &BallFiberBody, y: &[f64]) -> Result<Halfspace> {
    let m = b.n + b.d;
    if y.len() != m {
        return Err(Error::PointNotInS(format!("point has length {}, expected {m}", y.len())));
    }
    let z = &y[..b.n];
    let k = b.k as f64;
    let integral = z.iter().all(|v| (v - v.round()).abs() <= TAU_FEAS);
    let in_grid = z.iter().all(|v| v.round() >= 1.0 && v.round() <= 2.0 * k);
    if !integral || !in_grid || !b.contains(y, TAU_FEAS) {
        return Err(Error::PointNotInS(format!("{y:?} is not a point of the lattice set")));
    }
    let z: Vec<f64> = z.iter().map(|v| v.round()).collect();
    if z.iter().all(|&v| v == k || v == k + 1.0) {
        let mut a = vec![0.0; m];
        for (ai, zi) in a.iter_mut().zip(&z) {
            *ai = 2.0 * (zi - k) - 1.0;
        }
        return Halfspace::through(a, y);
    }
    let mut a = vec![0.0; m];
    for (i, &zi) in z.iter().enumerate() {
        if zi <= k - 1.0 {
            a[i] = -1.0;
            return Halfspace::new(a, -(k - 1.0));
        }
        if zi >= k + 2.0 {
            a[i] = 1.0;
            return Halfspace::new(a, k + 2.0);
        }
    }
    unreachable!("a non-central grid point has a coordinate outside {{k, k+1}}")
}

/// `γ_α = min{log 2, α − log 2}/(2(α+1))`.
pub fn gamma_alpha(alpha: f64) -> f64 {
    LN_2.min(alpha - LN_2) / (2.0 * (alpha + 1.0))
}

/// `M_α = 1 + 1/(1 − e^{−(α−log 2)})`.
pub fn m_alpha(alpha: f64) -> f64 {
    1.0 + 1.0 / (1.0 - (-(alpha - LN_2)).exp())
}

fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// `ln τ` with `τ = T/(2ⁿ(1 − 1/(2k))^d) = Σ_{j≥1} ((j+1)ⁿ − jⁿ)(1 − 2j/(2k−1))^d`.
/// Every term is formed in logs, so huge `n` and `d` are fine.
pub fn ln_tail_ratio(n: usize, d: usize, k: usize) -> f64 {
    let nf = n as f64;
    let mut acc = f64::NEG_INFINITY;
    for j in 1..k {
        let jf = j as f64;
        let ln_count = nf * (jf + 1.0).ln() + (-(nf * (jf / (jf + 1.0)).ln()).exp()).ln_1p();
        let ln_rad = d as f64 * (-2.0 * jf / (2 * k - 1) as f64).ln_1p();
        acc = log_add(acc, ln_count + ln_rad);
    }
    acc
}

/// `sup-depth bound / H_d(S) = (2^{−n} + τ)/(1 + τ)`, free of `v_d`.
pub fn ratio_closed_form(n: usize, d: usize, k: usize) -> f64 {
    let lt = ln_tail_ratio(n, d, k);
    (log_add(-(n as f64) * LN_2, lt) - log_add(0.0, lt)).exp()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NecessityReport {
    pub m: usize,
    pub n: usize,
    pub d: usize,
    pub k: usize,
    pub alpha: f64,
    pub hd_total: f64,
    pub sup_depth_upper: f64,
    pub ratio: f64,
    /// `2^{−n} + τ`, the first relaxation of the ratio.
    pub ratio_relaxed: f64,
    pub bound_ratio_n: f64,
    pub bound_exp_upper: f64,
    pub gamma_alpha: f64,
    pub m_alpha: f64,
}

pub fn necessity_report(alpha: f64, k: usize, m: usize) -> Result<NecessityReport> {
    let b = build_necessity(alpha, k, m)?;
    let (n, d) = (b.n, b.d);
    let lt = ln_tail_ratio(n, d, k);
    let ratio = ratio_closed_form(n, d, k);
    // H_d = v_d 2ⁿ r0^d (1 + τ); the sup bound is v_d r0^d (1 + 2ⁿτ).
    let ln_base = crate::measure::ln_unit_ball_volume(d) + d as f64 * (-1.0 / (2 * k) as f64).ln_1p();
    let hd_total = (ln_base + n as f64 * LN_2 + log_add(0.0, lt)).exp();
    let sup_depth_upper = (ln_base + log_add(0.0, n as f64 * LN_2 + lt)).exp();
    let x = (-(alpha - LN_2)).exp();
    let ratio_relaxed = (-(n as f64) * LN_2).exp() + lt.exp();
    let bound_ratio_n = (-(n as f64) * LN_2).exp() + x.powi(n as i32) / (1.0 - x);
    let g = gamma_alpha(alpha);
    let ma = m_alpha(alpha);
    let bound_exp_upper = ma * (-g * m as f64 / k as f64).exp();
    let slack = TAU_NUM * (1.0 + ratio);
    for (lhs, rhs, what) in [
        (ratio, ratio_relaxed, "ratio ≤ 2^-n + τ"),
        (ratio_relaxed, bound_ratio_n, "geometric tail bound"),
        (bound_ratio_n, bound_exp_upper, "exponential bound"),
    ] {
        if lhs > rhs + slack {
            return Err(Error::VerificationFailed(format!("{what}: {lhs} > {rhs}")));
        }
    }
    Ok(NecessityReport {
        m,
        n,
        d,
        k,
        alpha,
        hd_total,
        sup_depth_upper,
        ratio,
        ratio_relaxed,
        bound_ratio_n,
        bound_exp_upper,
        gamma_alpha: g,
        m_alpha: ma,
    })
}

/// Reports for every admissible `m` in `ms`, skipping values below the threshold.
pub fn necessity_grid(alpha: f64, k: usize, ms: std::ops::RangeInclusive<usize>) -> Result<Vec<NecessityReport>> {
    let mut out = Vec::new();
    for m in ms {
        match necessity_report(alpha, k, m) {
            Ok(r) => out.push(r),
            Err(Error::ParameterDomain(_)) if (m as f64) < 2.0 * (1.0 + alpha * k as f64) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

/// An instance with box radius `kappa(m)` whose depth ratio is at most `eta`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SublinearWitness {
    pub m: usize,
    pub k: usize,
    pub n: usize,
    pub d: usize,
    pub ratio: f64,
}

/// Scans `m = 2..=m_max` with `k = kappa(m)` and returns the first instance
/// whose closed-form ratio is at most `eta`.
pub fn sublinear_witness(
    alpha: f64,
    eta: f64,
    m_max: usize,
    kappa: impl Fn(usize) -> usize,
) -> Result<Option<SublinearWitness>> {
    for m in 2..=m_max {
        let k = kappa(m);
        let b = match build_necessity(alpha, k, m) {
            Ok(b) => b,
            Err(Error::ParameterDomain(_)) => continue,
            Err(e) => return Err(e),
        };
        let ratio = ratio_closed_form(b.n, b.d, k);
        if ratio <= eta {
            return Ok(Some(SublinearWitness { m, k, n: b.n, d: b.d, ratio }));
        }
    }
    Ok(None)
}

pub fn ceil_sqrt(m: usize) -> usize {
    let mut r = (m as f64).sqrt() as usize;
    while r * r < m {
        r += 1;
    }
    while r > 0 && (r - 1) * (r - 1) >= m {
        r -= 1;
    }
    r
}
