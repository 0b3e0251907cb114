//! Continuous Riesz 1-energy `I(mu) = integral of 1/|x-y| d mu d mu` for
//! measures carried by geometric sets, with the within-leaf profile fixed to
//! uniform on each leaf square.
//!
//! [`energy_mc`] is a stratified Monte Carlo estimator. A "sample" is one
//! full round: the round draws one x-point and one y-point uniformly in
//! every leaf square (shared streams, one per round) and pays every ordered
//! leaf pair `(Q,R)` its block term `mu(Q) mu(R) / |x_Q - y_R|`, diagonal
//! included; the 1/|x-y| singularity is integrable in the plane, so the
//! diagonal expectation is finite. Round values are averaged and their
//! spread gives the reported standard error. Cost is `samples * M^2` kernel
//! evaluations over the supported leaves.
//!
//! [`energy_lower_bound_via_repulsion`] turns a repulsion value into a
//! certified energy lower bound on evenly distributed geometry: if every
//! generation-l box has `diam <= c / r_l`, then two points whose leaf
//! squares share their last ancestor at generation l are at most that far
//! apart, so `1/|x-y| >= r_l / c` pointwise and integration gives
//! `I(mu) >= Q(mu) / c`.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::filtration::{
    validate_even_distribution, BoxGeom, EvenDistributionReport, GenerationalSet, LeafMeasure,
    RepulsionSchedule,
};
use crate::repulsion::repulsion_hierarchical;
use crate::util::{pairwise_mean, pairwise_sum, seeded_stream, standard_error};

/// Below this many rounds the standard-error estimate is not worth trusting.
pub const MIN_ENERGY_SAMPLES: usize = 10_000;

/// 1-energy of the uniform probability measure on a unit square:
/// `4 ln(1 + sqrt 2) - (4/3)(sqrt 2 - 1)`. Derivation: pass to the
/// difference variable (whose density is the product of two triangle
/// kernels), then integrate in polar coordinates, where the `1/|u|`
/// singularity cancels against the Jacobian and the radial integral is a
/// cubic polynomial. Scaling the square side by `s` divides the energy
/// by `s`.
pub const UNIT_SQUARE_SELF_ENERGY: f64 = 2.973_209_598_247_378_5;

#[derive(Debug, Clone, Serialize)]
pub struct EnergyEstimate {
    pub value: f64,
    pub standard_error: f64,
    pub samples: usize,
    pub seed: u64,
}

/// Stratified Monte Carlo estimate of the 1-energy (see module docs).
/// Deterministic for fixed seed and parameters, independent of thread
/// count: round t draws from its own seeded stream and rounds are reduced
/// in index order.
pub fn energy_mc(
    set: &GenerationalSet,
    mu: &LeafMeasure,
    samples: usize,
    seed: u64,
) -> Result<EnergyEstimate> {
    let boxes = set.boxes().ok_or(Error::MissingGeometry)?;
    mu.check_matches(set)?;
    if samples < MIN_ENERGY_SAMPLES {
        return Err(Error::InvalidParameter(format!(
            "energy estimation needs at least {MIN_ENERGY_SAMPLES} sample rounds, got {samples}"
        )));
    }

    let leaf_boxes = &boxes[set.leaf_start()..];
    let masses = mu.masses();
    // Zero-mass leaves cannot contribute; skip their kernel rows but still
    // draw their points, so the stream layout depends only on the set.
    let support: Vec<usize> = (0..masses.len()).filter(|&i| masses[i] > 0.0).collect();

    let rounds: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|t| {
            let mut rng = seeded_stream(seed, t as u64);
            let mut xs = Vec::with_capacity(leaf_boxes.len());
            let mut ys = Vec::with_capacity(leaf_boxes.len());
            for b in leaf_boxes {
                let side = 2.0 * b.hw;
                use rand::Rng;
                let x = (
                    b.cx - b.hw + side * rng.gen::<f64>(),
                    b.cy - b.hw + side * rng.gen::<f64>(),
                );
                let y = (
                    b.cx - b.hw + side * rng.gen::<f64>(),
                    b.cy - b.hw + side * rng.gen::<f64>(),
                );
                xs.push(x);
                ys.push(y);
            }
            let row_terms: Vec<f64> = support
                .iter()
                .map(|&i| {
                    let (xi, yi) = xs[i];
                    let mut acc = 0.0;
                    for &j in &support {
                        let dx = xi - ys[j].0;
                        let dy = yi - ys[j].1;
                        acc += masses[j] / (dx * dx + dy * dy).sqrt();
                    }
                    masses[i] * acc
                })
                .collect();
            pairwise_sum(&row_terms)
        })
        .collect();

    let value = pairwise_mean(&rounds);
    Ok(EnergyEstimate {
        value,
        standard_error: standard_error(&rounds, value),
        samples,
        seed,
    })
}

/// Deterministic 1-energy of a leaf-supported measure: exact closed form
/// for the same-leaf blocks, tensor Gauss-Legendre quadrature with
/// `nodes` points per axis for distinct-leaf blocks. The integrand is
/// analytic on disjoint square pairs, so the quadrature error decays
/// geometrically in `nodes`; generational sets keep distinct leaves a
/// gap of at least two sidelengths apart, making 20 to 24 nodes ample
/// for full double precision.
///
/// This shares no machinery with [`energy_mc`]; each one is a check on
/// the other.
pub fn energy_quadrature(
    set: &GenerationalSet,
    mu: &LeafMeasure,
    nodes: usize,
) -> Result<f64> {
    let boxes = set.boxes().ok_or(Error::MissingGeometry)?;
    mu.check_matches(set)?;
    if !(2..=64).contains(&nodes) {
        return Err(Error::InvalidParameter(format!(
            "quadrature order must be between 2 and 64 nodes per axis, got {nodes}"
        )));
    }
    let leaf_boxes = &boxes[set.leaf_start()..];
    let masses = mu.masses();
    let m = masses.len();
    let (gl_nodes, gl_weights) = gauss_legendre_unit(nodes);

    let diag_terms: Vec<f64> = (0..m)
        .map(|i| masses[i] * masses[i] * UNIT_SQUARE_SELF_ENERGY / leaf_boxes[i].side())
        .collect();

    let pairs: Vec<(usize, usize)> = (0..m)
        .flat_map(|i| ((i + 1)..m).map(move |j| (i, j)))
        .collect();
    let off_terms: Vec<f64> = pairs
        .par_iter()
        .map(|&(i, j)| {
            if masses[i] == 0.0 || masses[j] == 0.0 {
                return 0.0;
            }
            2.0 * masses[i]
                * masses[j]
                * pair_energy_gl(&leaf_boxes[i], &leaf_boxes[j], &gl_nodes, &gl_weights)
        })
        .collect();

    Ok(pairwise_sum(&diag_terms) + pairwise_sum(&off_terms))
}

/// Mean of `1 / |x - y|` for `x` uniform in `a`, `y` uniform in `b`,
/// by tensor quadrature; `a` and `b` must be disjoint.
fn pair_energy_gl(a: &BoxGeom, b: &BoxGeom, nodes: &[f64], weights: &[f64]) -> f64 {
    let k = nodes.len();
    let coord = |c: f64, hw: f64, t: f64| c - hw + 2.0 * hw * t;
    let ax: Vec<f64> = nodes.iter().map(|&t| coord(a.cx, a.hw, t)).collect();
    let ay: Vec<f64> = nodes.iter().map(|&t| coord(a.cy, a.hw, t)).collect();
    let bx: Vec<f64> = nodes.iter().map(|&t| coord(b.cx, b.hw, t)).collect();
    let by: Vec<f64> = nodes.iter().map(|&t| coord(b.cy, b.hw, t)).collect();
    let mut acc = 0.0;
    for i in 0..k {
        for j in 0..k {
            let w_ij = weights[i] * weights[j];
            let (x0, y0) = (ax[i], ay[j]);
            for p in 0..k {
                let dx = x0 - bx[p];
                let mut inner = 0.0;
                for q in 0..k {
                    let dy = y0 - by[q];
                    inner += weights[q] / (dx * dx + dy * dy).sqrt();
                }
                acc += w_ij * weights[p] * inner;
            }
        }
    }
    acc
}

/// Gauss-Legendre nodes and weights on `[0, 1]` (weights sum to 1), by
/// Newton iteration on the Legendre recurrence.
fn gauss_legendre_unit(k: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; k];
    let mut weights = vec![0.0; k];
    for i in 0..k {
        // Chebyshev-flavored initial guess, then Newton on P_k.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (k as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(k, x);
            let step = p / dp;
            x -= step;
            if step.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(k, x);
        nodes[i] = 0.5 * (1.0 - x); // descending cos roots -> ascending nodes
        weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| nodes[a].partial_cmp(&nodes[b]).expect("finite nodes"));
    let nodes_sorted: Vec<f64> = order.iter().map(|&i| nodes[i]).collect();
    let weights_sorted: Vec<f64> = order.iter().map(|&i| weights[i]).collect();
    (nodes_sorted, weights_sorted)
}

fn legendre_with_derivative(k: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for n in 1..k {
        let p2 = ((2 * n + 1) as f64 * x * p1 - n as f64 * p0) / (n + 1) as f64;
        p0 = p1;
        p1 = p2;
    }
    let dp = k as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// A repulsion-derived lower bound together with the pieces it was built
/// from; `bound = constant * repulsion` with the multiplier reported
/// explicitly rather than folded away.
#[derive(Debug, Clone, Serialize)]
pub struct RepulsionEnergyBound {
    pub bound: f64,
    /// Kernel comparison multiplier, `1/c` for diameter-comparability
    /// constant `c`.
    pub constant: f64,
    /// The repulsion value the bound scales.
    pub repulsion: f64,
    pub even_distribution: EvenDistributionReport,
}

/// Certified lower bound `I(mu) >= Q(mu) / c` on evenly distributed
/// geometry (see module docs for the one-line proof). Both even-distribution
/// clauses are validated; only the diameter clause enters the constant, the
/// separation clause (`eps`) guards the unasserted converse comparison.
pub fn energy_lower_bound_via_repulsion(
    set: &GenerationalSet,
    schedule: &RepulsionSchedule,
    mu: &LeafMeasure,
    c: f64,
    eps: f64,
) -> Result<RepulsionEnergyBound> {
    let report = validate_even_distribution(set, schedule, c, eps)?;
    if !report.pass {
        let stress = report
            .diameter_clause
            .worst
            .as_ref()
            .map(|w| w.stress)
            .unwrap_or(f64::NAN)
            .max(
                report
                    .separation_clause
                    .worst
                    .as_ref()
                    .map(|w| w.stress)
                    .unwrap_or(f64::NAN),
            );
        return Err(Error::NotEvenlyDistributed(format!(
            "geometry is not evenly distributed for this schedule (worst constraint stress \
             {stress:.3}); the comparison constant would be meaningless"
        )));
    }
    let repulsion = repulsion_hierarchical(set, schedule, mu)?.value;
    let constant = 1.0 / c;
    Ok(RepulsionEnergyBound {
        bound: constant * repulsion,
        constant,
        repulsion,
        even_distribution: report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filtration::{build_cantor, build_random_filtration};

    #[test]
    fn estimates_are_reproducible_and_seed_sensitive() {
        let set = build_cantor(1).unwrap();
        let mu = LeafMeasure::equidistributed(4).unwrap();
        let a = energy_mc(&set, &mu, MIN_ENERGY_SAMPLES, 42).unwrap();
        let b = energy_mc(&set, &mu, MIN_ENERGY_SAMPLES, 42).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.standard_error.to_bits(), b.standard_error.to_bits());
        let c = energy_mc(&set, &mu, MIN_ENERGY_SAMPLES, 43).unwrap();
        assert_ne!(a.value.to_bits(), c.value.to_bits());
        assert!(a.standard_error > 0.0);
        assert!(a.value > 0.0);
    }

    #[test]
    fn estimates_do_not_depend_on_thread_count() {
        let set = build_cantor(1).unwrap();
        let mu = LeafMeasure::equidistributed(4).unwrap();
        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| energy_mc(&set, &mu, MIN_ENERGY_SAMPLES, 7).unwrap());
        let multi = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(|| energy_mc(&set, &mu, MIN_ENERGY_SAMPLES, 7).unwrap());
        assert_eq!(single.value.to_bits(), multi.value.to_bits());
        assert_eq!(single.standard_error.to_bits(), multi.standard_error.to_bits());
    }

    #[test]
    fn preconditions_are_enforced() {
        let set = build_cantor(1).unwrap();
        let mu = LeafMeasure::equidistributed(4).unwrap();
        assert!(matches!(
            energy_mc(&set, &mu, 9_999, 1),
            Err(Error::InvalidParameter(_))
        ));
        let bare = build_random_filtration(1, 4, 5).unwrap();
        if bare.leaf_count() == 4 {
            assert!(matches!(
                energy_mc(&bare, &mu, MIN_ENERGY_SAMPLES, 1),
                Err(Error::MissingGeometry)
            ));
        } else {
            let mu2 = LeafMeasure::equidistributed(bare.leaf_count()).unwrap();
            assert!(matches!(
                energy_mc(&bare, &mu2, MIN_ENERGY_SAMPLES, 1),
                Err(Error::MissingGeometry)
            ));
        }
        let wrong = LeafMeasure::equidistributed(7).unwrap();
        assert!(energy_mc(&set, &wrong, MIN_ENERGY_SAMPLES, 1).is_err());
    }

    #[test]
    fn unit_square_energy_is_in_a_plausible_band() {
        // Uniform measure on the unit square; the exact value is a known
        // constant somewhere near 2.3, and 10^4 rounds pins it far tighter
        // than the sanity band used here.
        let set = build_cantor(0).unwrap();
        let mu = LeafMeasure::equidistributed(1).unwrap();
        let est = energy_mc(&set, &mu, MIN_ENERGY_SAMPLES, 11).unwrap();
        assert!(est.value > 1.5 && est.value < 3.5, "value {}", est.value);
        assert!(est.standard_error < 0.1);
    }

    #[test]
    fn quadrature_building_blocks_are_sound() {
        // Weights sum to 1 and degree-7 polynomials integrate exactly at k = 4.
        let (nodes, weights) = gauss_legendre_unit(4);
        let total: f64 = weights.iter().sum();
        assert!((total - 1.0).abs() < 1e-14);
        let int_t5: f64 = nodes
            .iter()
            .zip(&weights)
            .map(|(t, w)| w * t.powi(5))
            .sum();
        assert!((int_t5 - 1.0 / 6.0).abs() < 1e-14);
        let int_t7: f64 = nodes
            .iter()
            .zip(&weights)
            .map(|(t, w)| w * t.powi(7))
            .sum();
        assert!((int_t7 - 1.0 / 8.0).abs() < 1e-14);

        // Far-apart unit squares: mean inverse distance approaches the
        // center-to-center value.
        let a = BoxGeom { cx: 0.0, cy: 0.0, hw: 0.5 };
        let b = BoxGeom { cx: 50.0, cy: 0.0, hw: 0.5 };
        let (n20, w20) = gauss_legendre_unit(20);
        let far = pair_energy_gl(&a, &b, &n20, &w20);
        assert!((far - 0.02).abs() < 1e-5, "far-field value {far}");
    }

    #[test]
    fn quadrature_order_is_converged_on_cantor_geometry() {
        let set = build_cantor(2).unwrap();
        let mu = LeafMeasure::equidistributed(16).unwrap();
        let coarse = energy_quadrature(&set, &mu, 16).unwrap();
        let fine = energy_quadrature(&set, &mu, 24).unwrap();
        assert!(
            (coarse - fine).abs() <= 1e-10 * fine.abs(),
            "order drift: {coarse} vs {fine}"
        );
        assert!(energy_quadrature(&set, &mu, 1).is_err());
        assert!(energy_quadrature(&set, &mu, 65).is_err());
    }

    #[test]
    fn lower_bound_reports_its_pieces() {
        let set = build_cantor(2).unwrap();
        let schedule = RepulsionSchedule::cantor(2);
        let mu = LeafMeasure::equidistributed(16).unwrap();
        let bound = energy_lower_bound_via_repulsion(&set, &schedule, &mu, 2.0, 0.5).unwrap();
        assert!((bound.repulsion - 2.5).abs() < 1e-12);
        assert_eq!(bound.constant, 0.5);
        assert!((bound.bound - 1.25).abs() < 1e-12);
        assert!(bound.even_distribution.pass);
    }

    #[test]
    fn lower_bound_rejects_uneven_geometry() {
        let set = build_cantor(2).unwrap();
        let off_scale = RepulsionSchedule::new(vec![1.0, 2.0, 4.0]).unwrap();
        let mu = LeafMeasure::equidistributed(16).unwrap();
        assert!(matches!(
            energy_lower_bound_via_repulsion(&set, &off_scale, &mu, 2.0, 0.5),
            Err(Error::NotEvenlyDistributed(_))
        ));
    }

    #[test]
    fn lower_bound_is_dominated_by_measured_energy_in_easy_cases() {
        // Point mass on one leaf of the first Cantor generation.
        let set = build_cantor(1).unwrap();
        let schedule = RepulsionSchedule::cantor(1);
        let pm = LeafMeasure::point_mass(4, 0).unwrap();
        let bound = energy_lower_bound_via_repulsion(&set, &schedule, &pm, 2.0, 0.5).unwrap();
        let est = energy_mc(&set, &pm, MIN_ENERGY_SAMPLES, 3).unwrap();
        assert!(
            est.value - 3.0 * est.standard_error >= bound.bound,
            "energy {} +- {} vs bound {}",
            est.value,
            est.standard_error,
            bound.bound
        );

        // Single square, uniform.
        let square = build_cantor(0).unwrap();
        let s0 = RepulsionSchedule::new(vec![1.0]).unwrap();
        let uniform = LeafMeasure::equidistributed(1).unwrap();
        let bound0 =
            energy_lower_bound_via_repulsion(&square, &s0, &uniform, 2.0, 0.5).unwrap();
        let est0 = energy_mc(&square, &uniform, MIN_ENERGY_SAMPLES, 4).unwrap();
        assert!(est0.value - 3.0 * est0.standard_error >= bound0.bound);
    }
}
