//! Dense LP front end over `minilp`: maximize `c·x` subject to `A·x ≤ b`.

use minilp::{ComparisonOp, OptimizationDirection, Problem};

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<f64>, value: f64 },
    Unbounded,
    Infeasible,
}

impl LpOutcome {
    pub fn optimal(self) -> Option<(Vec<f64>, f64)> {
        match self {
            LpOutcome::Optimal { x, value } => Some((x, value)),
            _ => None,
        }
    }
}

/// Maximizes `c·x` over `{x : A·x ≤ b}` with free variables.
pub fn maximize(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> Result<LpOutcome> {
    let bounds = vec![(f64::NEG_INFINITY, f64::INFINITY); c.len()];
    maximize_bounded(c, &bounds, a, b)
}

/// Maximizes `c·x` over `{x : A·x ≤ b, lo ≤ x ≤ hi}`.
pub fn maximize_bounded(
    c: &[f64],
    bounds: &[(f64, f64)],
    a: &[Vec<f64>],
    b: &[f64],
) -> Result<LpOutcome> {
    let mut problem = Problem::new(OptimizationDirection::Maximize);
    let vars: Vec<_> = c
        .iter()
        .zip(bounds)
        .map(|(&ci, &bd)| problem.add_var(ci, bd))
        .collect();
    for (row, &bi) in a.iter().zip(b) {
        let terms: Vec<_> = row
            .iter()
            .zip(&vars)
            .filter(|(v, _)| **v != 0.0)
            .map(|(&v, &var)| (var, v))
            .collect();
        if terms.is_empty() {
            if bi < -crate::TAU_FEAS {
                return Ok(LpOutcome::Infeasible);
            }
            continue;
        }
        problem.add_constraint(terms.as_slice(), ComparisonOp::Le, bi);
    }
    match problem.solve() {
        Ok(sol) => {
            let x: Vec<f64> = vars.iter().map(|&v| sol[v]).collect();
            let value = sol.objective();
            // minilp can report a free variable at infinity as "optimal".
            if !value.is_finite() || x.iter().any(|v| !v.is_finite()) {
                return Ok(LpOutcome::Unbounded);
            }
            Ok(LpOutcome::Optimal { x, value })
        }
        Err(minilp::Error::Unbounded) => Ok(LpOutcome::Unbounded),
        Err(minilp::Error::Infeasible) => Ok(LpOutcome::Infeasible),
    }
}

/// Largest Euclidean ball `{x : ‖x − center‖₂ ≤ r}` inside `{A·x ≤ b}`.
/// Rows with a zero normal are pure feasibility conditions on `b`.
pub fn chebyshev_center(a: &[Vec<f64>], b: &[f64], dim: usize) -> Result<Option<(Vec<f64>, f64)>> {
    let mut rows = Vec::with_capacity(a.len());
    let mut rhs = Vec::with_capacity(a.len());
    for (row, &bi) in a.iter().zip(b) {
        let nrm = crate::linalg::norm2(row);
        let mut r = row.clone();
        r.push(nrm);
        rows.push(r);
        rhs.push(bi);
    }
    let mut c = vec![0.0; dim];
    c.push(1.0);
    let mut bounds = vec![(f64::NEG_INFINITY, f64::INFINITY); dim];
    bounds.push((0.0, f64::INFINITY));
    match maximize_bounded(&c, &bounds, &rows, &rhs)? {
        LpOutcome::Optimal { mut x, value } => {
            x.pop();
            Ok(Some((x, value)))
        }
        LpOutcome::Infeasible => Ok(None),
        LpOutcome::Unbounded => Err(Error::Unbounded(vec![])),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simple_max() {
        // max x + y over the unit square.
        let a = vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![-1.0, 0.0], vec![0.0, -1.0]];
        let b = vec![1.0, 1.0, 0.0, 0.0];
        let (x, v) = maximize(&[1.0, 1.0], &a, &b).unwrap().optimal().unwrap();
        assert!((v - 2.0).abs() < 1e-9);
        assert!((x[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn unbounded_and_infeasible() {
        let a = vec![vec![-1.0]];
        assert_eq!(maximize(&[1.0], &a, &[0.0]).unwrap(), LpOutcome::Unbounded);
        let a = vec![vec![1.0], vec![-1.0]];
        assert_eq!(maximize(&[1.0], &a, &[0.0, -1.0]).unwrap(), LpOutcome::Infeasible);
    }

    #[test]
    fn chebyshev_of_square() {
        let a = vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![-1.0, 0.0], vec![0.0, -1.0]];
        let b = vec![2.0, 2.0, 0.0, 0.0];
        let (c, r) = chebyshev_center(&a, &b, 2).unwrap().unwrap();
        assert!((r - 1.0).abs() < 1e-9);
        assert!((c[0] - 1.0).abs() < 1e-9 && (c[1] - 1.0).abs() < 1e-9);
    }
}
