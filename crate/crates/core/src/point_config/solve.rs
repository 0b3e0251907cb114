//! The hyperplane-constrained program `min x' A x, sum(x) = 1` for a
//! repulsion matrix: solve `A y = 1`, then `lambda = 1 / sum(y)` and
//! `x* = lambda y`.

use nalgebra::DVector;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::util::{conjugate_gradient, pairwise_sum};

use super::RepulsionMatrix;

/// Weights are treated as nonnegative down to this much below zero, so
/// factorization-level roundoff cannot flip the sign verdict.
pub const NONNEG_TOLERANCE: f64 = 1e-12;

const CG_RELATIVE_TOLERANCE: f64 = 1e-10;
const CG_ITERATION_CAP: usize = 20_000;

#[derive(Debug, Clone, Serialize)]
pub struct EquilibriumSolution {
    /// The minimizer x*; sums to 1.
    pub weights: Vec<f64>,
    /// Minimum of the form, equal to `1 / (1' A^-1 1)`.
    pub lambda: f64,
    /// Sign verdict: every weight at least `-NONNEG_TOLERANCE`.
    pub nonneg: bool,
    /// `max_i |(A x*)_i - lambda|`; how equal the potentials really are.
    pub residual: f64,
    /// Iterations spent by the iterative path; 0 for a direct factorization.
    pub iterations: usize,
}

pub fn solve_equilibrium(matrix: &RepulsionMatrix) -> Result<EquilibriumSolution> {
    let (y, iterations) = solve_ones(matrix)?;
    let total = pairwise_sum(&y);
    if !total.is_finite() || total <= 0.0 {
        return Err(Error::NotPositiveDefinite);
    }
    let lambda = 1.0 / total;
    let weights: Vec<f64> = y.iter().map(|v| lambda * v).collect();
    let potentials = matrix.apply(&weights)?;
    let residual = potentials
        .iter()
        .map(|p| (p - lambda).abs())
        .fold(0.0, f64::max);
    let min_weight = weights.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(EquilibriumSolution {
        weights,
        lambda,
        nonneg: min_weight >= -NONNEG_TOLERANCE,
        residual,
        iterations,
    })
}

fn solve_ones(matrix: &RepulsionMatrix) -> Result<(Vec<f64>, usize)> {
    let n = matrix.dim();
    match matrix.dense.as_ref() {
        Some(dense) => {
            let chol = dense.clone().cholesky().ok_or(Error::NotPositiveDefinite)?;
            let sol = chol.solve(&DVector::from_element(n, 1.0));
            Ok((sol.as_slice().to_vec(), 0))
        }
        None => {
            // The diagonal is the constant 1/r, so Jacobi preconditioning
            // is a uniform scaling that leaves conjugate-gradient iterates
            // unchanged; plain CG is the same algorithm here.
            let apply = |x: &[f64]| matrix.apply(x).expect("dimension fixed by caller");
            let ones = vec![1.0; n];
            let (y, iterations, rel) =
                conjugate_gradient(&apply, &ones, CG_RELATIVE_TOLERANCE, CG_ITERATION_CAP);
            // NaN residuals must also count as a stall.
            if rel.is_nan() || rel > CG_RELATIVE_TOLERANCE {
                return Err(Error::SolveStalled {
                    iterations,
                    residual: rel,
                });
            }
            Ok((y, iterations))
        }
    }
}

/// The capacity lower-bound statistic `1 / lambda = 1' A^-1 1` (comparison
/// constants suppressed).
pub fn capacity_lower_bound(solution: &EquilibriumSolution) -> f64 {
    1.0 / solution.lambda
}
