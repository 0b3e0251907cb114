//! Separated planar point configurations and their repulsion matrices
//! `A[i][j] = 1 / (r + |z_i - z_j|)` (diagonal `1/r`).
//!
//! The central problem is the hyperplane-constrained quadratic program
//! `minimize x' A x subject to sum(x) = 1`. Its minimum `lambda` satisfies
//! `lambda = 1 / (1' A^-1 1)`, the minimizer is `x* = lambda A^-1 1`, and
//! `1 / lambda` doubles as a capacity lower-bound statistic for the union
//! of the balls `B(z_i, r)`. Whether `A^-1 1 >= 0` holds for every
//! separated configuration is open; [`conjecture_sweep`] hunts for sign
//! violations across instance batches and keeps any offender whole so it
//! can be reproduced.

mod solve;

pub use solve::{capacity_lower_bound, solve_equilibrium, EquilibriumSolution, NONNEG_TOLERANCE};

use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::filtration::build_cantor;
use crate::util::{pairwise_mean, pairwise_sum, seeded_stream};

/// Largest dimension stored (and factorized) densely; beyond this the
/// matrix stays implicit and solves go through conjugate gradients.
pub const DENSE_LIMIT: usize = 4096;

/// A weight entry counts as a sign violation only below minus this times
/// the largest weight magnitude; anything nearer zero is solver roundoff.
pub const CONJECTURE_FLAG_TOLERANCE: f64 = 1e-9;

/// Rejection-sampling budget per requested point.
const DART_ATTEMPTS_PER_POINT: usize = 10_000;

/// Points `z_i` in the plane with `|z_i - z_j| >= 2r`, so the balls
/// `B(z_i, r)` are disjoint. The invariant is checked exhaustively at
/// construction and cannot be broken afterwards.
#[derive(Debug, Clone, PartialEq)]
pub struct PointConfiguration {
    r: f64,
    points: Vec<[f64; 2]>,
}

impl PointConfiguration {
    pub fn new(r: f64, points: Vec<[f64; 2]>) -> Result<Self> {
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "ball radius must be a positive finite number, got {r}"
            )));
        }
        if points.is_empty() {
            return Err(Error::InvalidParameter(
                "a point configuration needs at least one point".into(),
            ));
        }
        for (i, p) in points.iter().enumerate() {
            if !(p[0].is_finite() && p[1].is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "point {i} has non-finite coordinates ({}, {})",
                    p[0], p[1]
                )));
            }
        }
        let required = 2.0 * r;
        let req_sq = required * required;
        for i in 0..points.len() {
            for j in (i + 1)..points.len() {
                let dx = points[i][0] - points[j][0];
                let dy = points[i][1] - points[j][1];
                let d_sq = dx * dx + dy * dy;
                if d_sq < req_sq {
                    return Err(Error::SeparationViolation {
                        i,
                        j,
                        dist: d_sq.sqrt(),
                        required,
                    });
                }
            }
        }
        Ok(Self { r, points })
    }

    pub fn radius(&self) -> f64 {
        self.r
    }

    pub fn points(&self) -> &[[f64; 2]] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Smallest pairwise distance; infinity for a single point.
    pub fn min_separation(&self) -> f64 {
        let mut best = f64::INFINITY;
        for i in 0..self.points.len() {
            for j in (i + 1)..self.points.len() {
                let dx = self.points[i][0] - self.points[j][0];
                let dy = self.points[i][1] - self.points[j][1];
                best = best.min((dx * dx + dy * dy).sqrt());
            }
        }
        best
    }

    /// The configuration with every coordinate and the radius scaled by
    /// `t > 0`. Separation is preserved exactly in exact arithmetic and
    /// re-checked here anyway.
    pub fn scaled(&self, t: f64) -> Result<Self> {
        if !(t.is_finite() && t > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "scale factor must be a positive finite number, got {t}"
            )));
        }
        Self::new(
            t * self.r,
            self.points.iter().map(|p| [t * p[0], t * p[1]]).collect(),
        )
    }
}

impl Serialize for PointConfiguration {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("PointConfiguration", 2)?;
        st.serialize_field("r", &self.r)?;
        st.serialize_field("points", &self.points)?;
        st.end()
    }
}

/// Centers of the generation-`n` squares of the four-corner Cantor set
/// with `r` = half the square sidelength, so the balls are inscribed in
/// the squares. Distinct centers are at least `3 * 4^-n = 6r` apart, which
/// the constructor re-checks pair by pair.
pub fn cantor_configuration(n: usize) -> Result<PointConfiguration> {
    if !(1..=7).contains(&n) {
        return Err(Error::InvalidParameter(format!(
            "cantor configurations are built for generations 1..=7, got {n}"
        )));
    }
    let set = build_cantor(n)?;
    let boxes = set.boxes().expect("cantor sets carry geometry");
    let leaves = &boxes[set.leaf_start()..];
    let r = leaves[0].hw;
    let points = leaves.iter().map(|b| [b.cx, b.cy]).collect();
    PointConfiguration::new(r, points)
}

/// Seeded dart throwing: uniform draws in `[0, box_size]^2`, keeping a
/// draw only when it clears every accepted point by `2r`. Deterministic
/// per seed. Fails up front when `n * (2r)^2 > box_size^2 / 2` (too dense
/// to place reliably) and fails late if the attempt budget runs out.
pub fn random_separated_configuration(
    n: usize,
    r: f64,
    box_size: f64,
    seed: u64,
) -> Result<PointConfiguration> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "requested an empty random configuration".into(),
        ));
    }
    if !(r.is_finite() && r > 0.0) || !(box_size.is_finite() && box_size > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "radius and box size must be positive finite numbers, got r = {r}, box = {box_size}"
        )));
    }
    let required = 2.0 * r;
    if n as f64 * required * required > 0.5 * box_size * box_size {
        return Err(Error::InvalidParameter(format!(
            "{n} balls of radius {r} are too dense for a box of side {box_size}; \
             need n * (2r)^2 <= box^2 / 2"
        )));
    }

    use rand::Rng;
    let mut rng = seeded_stream(seed, 0);
    let req_sq = required * required;
    let mut points: Vec<[f64; 2]> = Vec::with_capacity(n);
    let mut attempts_left = DART_ATTEMPTS_PER_POINT.saturating_mul(n);
    while points.len() < n {
        if attempts_left == 0 {
            return Err(Error::Sampling(format!(
                "placed only {} of {n} points before exhausting {} attempts; \
                 lower the density or change the seed",
                points.len(),
                DART_ATTEMPTS_PER_POINT.saturating_mul(n)
            )));
        }
        attempts_left -= 1;
        let candidate = [
            box_size * rng.gen::<f64>(),
            box_size * rng.gen::<f64>(),
        ];
        let clear = points.iter().all(|p| {
            let dx = p[0] - candidate[0];
            let dy = p[1] - candidate[1];
            dx * dx + dy * dy >= req_sq
        });
        if clear {
            points.push(candidate);
        }
    }
    PointConfiguration::new(r, points)
}

/// The kernel matrix of a configuration. Small instances are materialized
/// (enabling a direct factorization); larger ones stay implicit and expose
/// only entry evaluation and matrix-vector products.
#[derive(Debug, Clone)]
pub struct RepulsionMatrix {
    config: PointConfiguration,
    dense: Option<DMatrix<f64>>,
}

fn kernel(r: f64, a: [f64; 2], b: [f64; 2]) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    1.0 / (r + (dx * dx + dy * dy).sqrt())
}

/// Fills `A[i][j] = 1 / (r + |z_i - z_j|)` (so the diagonal is exactly
/// `1/r` and every entry is positive and at most `1/r`). Separation is
/// re-validated so a violation is reported here as well as at
/// configuration build time.
pub fn build_repulsion_matrix(config: PointConfiguration) -> Result<RepulsionMatrix> {
    // Re-run the invariant check on the constructor's own data; this is the
    // documented error surface for matrix construction.
    PointConfiguration::new(config.r, config.points.clone())?;
    let n = config.len();
    let dense = if n <= DENSE_LIMIT {
        let r = config.r;
        let points = &config.points;
        let mut m = DMatrix::<f64>::zeros(n, n);
        // Column-major storage; the matrix is symmetric, so filling column
        // j with row values costs nothing extra. Entries are independent,
        // hence parallel fill order cannot change any value.
        m.as_mut_slice()
            .par_chunks_mut(n)
            .enumerate()
            .for_each(|(j, col)| {
                for (i, slot) in col.iter_mut().enumerate() {
                    *slot = kernel(r, points[i], points[j]);
                }
            });
        Some(m)
    } else {
        None
    };
    Ok(RepulsionMatrix { config, dense })
}

impl RepulsionMatrix {
    pub fn dim(&self) -> usize {
        self.config.len()
    }

    pub fn configuration(&self) -> &PointConfiguration {
        &self.config
    }

    pub fn is_dense(&self) -> bool {
        self.dense.is_some()
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        match &self.dense {
            Some(m) => m[(i, j)],
            None => kernel(self.config.r, self.config.points[i], self.config.points[j]),
        }
    }

    /// `A x`, reduced pairwise per row; rows are independent, so the result
    /// is identical no matter how the row loop is scheduled.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        let n = self.dim();
        if x.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: x.len(),
            });
        }
        let out = (0..n)
            .into_par_iter()
            .map(|i| {
                let prods: Vec<f64> = match &self.dense {
                    Some(m) => (0..n).map(|j| m[(i, j)] * x[j]).collect(),
                    None => {
                        let r = self.config.r;
                        let pts = &self.config.points;
                        (0..n).map(|j| kernel(r, pts[i], pts[j]) * x[j]).collect()
                    }
                };
                pairwise_sum(&prods)
            })
            .collect();
        Ok(out)
    }

    pub fn row_sums(&self) -> Vec<f64> {
        let ones = vec![1.0; self.dim()];
        self.apply(&ones).expect("dimension matches by construction")
    }
}

/// Row-sum statistics, plus the prediction `lambda_hat = mean / N` for the
/// program minimum (exact when the minimizer is uniform, and within the
/// row-sum spread in general).
#[derive(Debug, Clone, Serialize)]
pub struct RowSumReport {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    /// max / min.
    pub spread: f64,
    /// mean / N, a solve-free stand-in for lambda.
    pub lambda_hat: f64,
    /// The solved lambda, when one was supplied for comparison.
    pub lambda: Option<f64>,
    /// lambda_hat / lambda, when a solution was supplied.
    pub lambda_ratio: Option<f64>,
}

pub fn row_sum_report(
    matrix: &RepulsionMatrix,
    solution: Option<&EquilibriumSolution>,
) -> RowSumReport {
    let sums = matrix.row_sums();
    let min = sums.iter().copied().fold(f64::INFINITY, f64::min);
    let max = sums.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mean = pairwise_mean(&sums);
    let lambda_hat = mean / matrix.dim() as f64;
    RowSumReport {
        min,
        max,
        mean,
        spread: max / min,
        lambda_hat,
        lambda: solution.map(|s| s.lambda),
        lambda_ratio: solution.map(|s| lambda_hat / s.lambda),
    }
}

/// One sweep instance's outcome. On solver failure the numeric fields are
/// NaN and `error` carries the message; the sweep itself keeps going.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRecord {
    pub instance_id: usize,
    pub n_points: usize,
    pub r: f64,
    pub lambda: f64,
    pub capacity_stat: f64,
    pub min_weight: f64,
    pub nonneg: bool,
    /// Sign verdict under the sweep's relative tolerance; a flagged
    /// instance is a candidate counterexample worth reproducing.
    pub flagged: bool,
    pub rowsum_min: f64,
    pub rowsum_max: f64,
    pub residual: f64,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub records: Vec<SweepRecord>,
    pub flag_count: usize,
    pub failure_count: usize,
    /// Full configurations for every flagged record, so a candidate
    /// counterexample survives the sweep verbatim.
    pub flagged_instances: Vec<(usize, PointConfiguration)>,
}

/// Solves every instance and flags weight vectors with an entry below
/// `-CONJECTURE_FLAG_TOLERANCE * max |weight|`. Instances run in parallel;
/// records are collected in instance order, so the report is deterministic.
pub fn conjecture_sweep(instances: &[PointConfiguration]) -> SweepReport {
    let records: Vec<SweepRecord> = instances
        .par_iter()
        .enumerate()
        .map(|(instance_id, config)| sweep_one(instance_id, config))
        .collect();
    let flag_count = records.iter().filter(|r| r.flagged).count();
    let failure_count = records.iter().filter(|r| r.error.is_some()).count();
    let flagged_instances = records
        .iter()
        .filter(|r| r.flagged)
        .map(|r| (r.instance_id, instances[r.instance_id].clone()))
        .collect();
    SweepReport {
        records,
        flag_count,
        failure_count,
        flagged_instances,
    }
}

fn sweep_one(instance_id: usize, config: &PointConfiguration) -> SweepRecord {
    let n_points = config.len();
    let r = config.radius();
    let failed = |msg: String| SweepRecord {
        instance_id,
        n_points,
        r,
        lambda: f64::NAN,
        capacity_stat: f64::NAN,
        min_weight: f64::NAN,
        nonneg: false,
        flagged: false,
        rowsum_min: f64::NAN,
        rowsum_max: f64::NAN,
        residual: f64::NAN,
        error: Some(msg),
    };

    let matrix = match build_repulsion_matrix(config.clone()) {
        Ok(m) => m,
        Err(e) => return failed(e.to_string()),
    };
    let solution = match solve_equilibrium(&matrix) {
        Ok(s) => s,
        Err(e) => return failed(e.to_string()),
    };
    let sums = matrix.row_sums();
    let min_weight = solution.weights.iter().copied().fold(f64::INFINITY, f64::min);
    let max_abs = solution
        .weights
        .iter()
        .fold(0.0f64, |acc, w| acc.max(w.abs()));
    SweepRecord {
        instance_id,
        n_points,
        r,
        lambda: solution.lambda,
        capacity_stat: capacity_lower_bound(&solution),
        min_weight,
        nonneg: solution.nonneg,
        flagged: min_weight < -CONJECTURE_FLAG_TOLERANCE * max_abs,
        rowsum_min: sums.iter().copied().fold(f64::INFINITY, f64::min),
        rowsum_max: sums.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        residual: solution.residual,
        error: None,
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    r: f64,
    points: Vec<[f64; 2]>,
}

pub fn config_to_json(config: &PointConfiguration) -> String {
    let file = ConfigFile {
        r: config.r,
        points: config.points.clone(),
    };
    serde_json::to_string_pretty(&file).expect("plain numeric struct serializes")
}

pub fn config_from_json(text: &str) -> Result<PointConfiguration> {
    let file: ConfigFile = serde_json::from_str(text)?;
    PointConfiguration::new(file.r, file.points)
}

pub fn write_config(path: impl AsRef<Path>, config: &PointConfiguration) -> Result<()> {
    let mut text = config_to_json(config);
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

pub fn read_config(path: impl AsRef<Path>) -> Result<PointConfiguration> {
    config_from_json(&fs::read_to_string(path)?)
}
