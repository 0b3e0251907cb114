//! Minimization of the repulsion form over the probability simplex.
//!
//! The form is `x^T G x` with `G` the leaf-pair strength matrix, which is
//! strictly positive definite: telescoping gives `x^T G x = r_0 (sum x)^2 +
//! sum_l (r_l - r_{l-1}) T_l(x)` and the deepest term is `(r_n - r_{n-1})
//! |x|^2`. The minimizer is therefore unique, and stationarity on the
//! simplex means the leaf potentials `(G x)_i` are constant across the
//! support.
//!
//! Strategy: solve `G y = 1` matrix-free with conjugate gradients and
//! normalize; that point is the interior stationary measure and in exact
//! arithmetic it is the global minimizer (leaf masses of a repulsion
//! minimizer are strictly positive). If rounding leaves a negative entry or
//! a loose optimality residual, polish with projected gradient descent on
//! the simplex, halving the step whenever progress stalls.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::filtration::{GenerationalSet, LeafMeasure, RepulsionSchedule};
use crate::repulsion::{leaf_potentials, RepulsionValue};
use crate::util::{conjugate_gradient, pairwise_sum};

/// Optimality target for the KKT residual.
pub const KKT_TOLERANCE: f64 = 1e-9;

const PG_ITERATION_CAP: usize = 100_000;
const BRUTE_FORCE_LEAF_CAP: usize = 6;

#[derive(Debug, Clone)]
pub struct MinimizationResult {
    pub minimizer: LeafMeasure,
    pub min_value: RepulsionValue,
    /// Linear-solve iterations plus projected-gradient iterations.
    pub iterations: usize,
    /// Max deviation of the potential from its measure-weighted mean over
    /// supported leaves, plus the complementarity violation on zero-mass
    /// leaves.
    pub kkt_residual: f64,
    /// Leaves pinned at mass exactly 0 in the solution.
    pub active_bound_count: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct EquidistributionReport {
    pub pass: bool,
    pub tolerance: f64,
    pub worst_generation: usize,
    pub max_node: usize,
    pub min_node: usize,
    pub max_mass: f64,
    pub min_mass: f64,
    /// Worst max/min node-mass ratio across generations.
    pub worst_ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct NondegeneracyReport {
    pub pass: bool,
    pub threshold: f64,
    pub min_mass: f64,
    /// Leaf index attaining the minimum mass.
    pub min_leaf: usize,
}

/// Global minimizer of the repulsion form over probability measures.
pub fn minimize_repulsion(
    set: &GenerationalSet,
    schedule: &RepulsionSchedule,
) -> Result<MinimizationResult> {
    schedule.check_matches(set)?;
    let m = set.leaf_count();
    let apply = |x: &[f64]| leaf_potentials(set, schedule, x).expect("dimensions validated");

    // Stage 1: interior stationary point, G y = 1.
    let ones = vec![1.0; m];
    let (y, cg_iters, _) = conjugate_gradient(&apply, &ones, 1e-14, (2 * m).clamp(200, 20_000));
    let mut iterations = cg_iters;

    let total = pairwise_sum(&y);
    let mut x: Vec<f64> = if total > 0.0 {
        y.iter().map(|v| v / total).collect()
    } else {
        vec![1.0 / m as f64; m]
    };
    if x.iter().any(|&v| v < 0.0) {
        x = project_to_simplex(&x);
    }

    let mut kkt = kkt_residual(&x, &apply(&x));

    // Stage 2: projected gradient polish, only when stage 1 fell short.
    if kkt > KKT_TOLERANCE {
        let (px, pg_iters, pg_kkt) = projected_gradient(&apply, x, PG_ITERATION_CAP);
        x = px;
        kkt = pg_kkt;
        iterations += pg_iters;
    }

    let result = finish(set, schedule, x, iterations, kkt)?;
    if result.kkt_residual > KKT_TOLERANCE {
        return Err(Error::MinimizationStalled {
            iterations: result.iterations,
            residual: result.kkt_residual,
            best: Box::new(result),
        });
    }
    Ok(result)
}

/// Per-generation equal-mass check for minimizers on socialist trees; on
/// such trees every generation of the true minimizer is exactly uniform.
pub fn verify_equidistribution(
    result: &MinimizationResult,
    set: &GenerationalSet,
    tol: f64,
) -> Result<EquidistributionReport> {
    if set.branching_profile().is_none() {
        return Err(Error::NotSocialist(
            "child counts differ within a generation, so equal masses are not implied".into(),
        ));
    }
    result.minimizer.check_matches(set)?;
    let sums = set.aggregate_masses(result.minimizer.masses())?;

    let mut worst: Option<EquidistributionReport> = None;
    for l in 0..=set.deepest_generation() {
        let range = set.generation_range(l);
        let mut max_node = range.start;
        let mut min_node = range.start;
        for id in range {
            if sums[id] > sums[max_node] {
                max_node = id;
            }
            if sums[id] < sums[min_node] {
                min_node = id;
            }
        }
        let ratio = if sums[min_node] > 0.0 {
            sums[max_node] / sums[min_node]
        } else {
            f64::INFINITY
        };
        if worst.as_ref().is_none_or(|w| ratio > w.worst_ratio) {
            worst = Some(EquidistributionReport {
                pass: false,
                tolerance: tol,
                worst_generation: l,
                max_node,
                min_node,
                max_mass: sums[max_node],
                min_mass: sums[min_node],
                worst_ratio: ratio,
            });
        }
    }
    let mut report = worst.expect("at least one generation");
    report.pass = report.worst_ratio <= 1.0 + tol;
    Ok(report)
}

/// Strict-positivity check on the minimizer's leaf masses. On non-socialist
/// trees, where equidistribution is not implied, this is the structural
/// property that is.
pub fn verify_nondegeneracy(result: &MinimizationResult, tol: f64) -> NondegeneracyReport {
    let masses = result.minimizer.masses();
    let mut min_leaf = 0;
    for (i, &mass) in masses.iter().enumerate() {
        if mass < masses[min_leaf] {
            min_leaf = i;
        }
    }
    NondegeneracyReport {
        pass: masses[min_leaf] >= tol,
        threshold: tol,
        min_mass: masses[min_leaf],
        min_leaf,
    }
}

/// Independent oracle for tiny instances: exhaustive search over the simplex
/// discretized with `grid` steps per coordinate, refined by projected
/// gradient descent on the dense pair-strength matrix. Builds that matrix
/// straight from ancestor walks, bypassing the hierarchical evaluator it is
/// used to certify.
pub fn brute_force_minimize(
    set: &GenerationalSet,
    schedule: &RepulsionSchedule,
    grid: usize,
) -> Result<MinimizationResult> {
    schedule.check_matches(set)?;
    let m = set.leaf_count();
    if m > BRUTE_FORCE_LEAF_CAP {
        return Err(Error::InvalidParameter(format!(
            "brute-force minimization is capped at {BRUTE_FORCE_LEAF_CAP} leaves, got {m}"
        )));
    }
    if grid == 0 {
        return Err(Error::InvalidParameter("grid must be >= 1".into()));
    }

    let mut gram = vec![0.0f64; m * m];
    for i in 0..m {
        for j in 0..m {
            let l = set.last_common_generation(set.leaf_id(i), set.leaf_id(j))?;
            gram[i * m + j] = schedule.value(l);
        }
    }
    let quad = |x: &[f64]| -> f64 {
        let mut acc = 0.0;
        for i in 0..m {
            let mut row = 0.0;
            for j in 0..m {
                row += gram[i * m + j] * x[j];
            }
            acc += x[i] * row;
        }
        acc
    };

    // Exhaustive sweep over weak compositions of `grid` into m parts.
    let combinations = compositions_count(grid, m);
    if combinations > 50_000_000 {
        return Err(Error::InvalidParameter(format!(
            "grid {grid} over {m} leaves enumerates {combinations} points; choose a coarser grid"
        )));
    }
    let mut best = vec![0.0f64; m];
    let mut best_value = f64::INFINITY;
    let mut counts = vec![0usize; m];
    let mut probe = vec![0.0f64; m];
    visit_compositions(&mut counts, 0, grid, &mut |counts: &[usize]| {
        for (p, &c) in probe.iter_mut().zip(counts) {
            *p = c as f64 / grid as f64;
        }
        let value = quad(&probe);
        if value < best_value {
            best_value = value;
            best.copy_from_slice(&probe);
        }
    });

    // Local refinement from the best grid point.
    let apply = |x: &[f64]| -> Vec<f64> {
        (0..m)
            .map(|i| {
                let mut row = 0.0;
                for j in 0..m {
                    row += gram[i * m + j] * x[j];
                }
                row
            })
            .collect()
    };
    let (x, iterations, kkt) = projected_gradient(&apply, best, 20_000);

    let masses = fix_simplex_rounding(x);
    let minimizer = LeafMeasure::new(masses)?;
    let min_value = quad(minimizer.masses());
    let active_bound_count = minimizer.masses().iter().filter(|&&v| v == 0.0).count();
    Ok(MinimizationResult {
        minimizer,
        min_value: RepulsionValue { value: min_value },
        iterations,
        kkt_residual: kkt,
        active_bound_count,
    })
}

fn finish(
    set: &GenerationalSet,
    schedule: &RepulsionSchedule,
    x: Vec<f64>,
    iterations: usize,
    kkt: f64,
) -> Result<MinimizationResult> {
    let masses = fix_simplex_rounding(x);
    let minimizer = LeafMeasure::new(masses)?;
    let min_value = crate::repulsion::repulsion_hierarchical(set, schedule, &minimizer)?;
    let active_bound_count = minimizer.masses().iter().filter(|&&v| v == 0.0).count();
    Ok(MinimizationResult {
        minimizer,
        min_value,
        iterations,
        kkt_residual: kkt,
        active_bound_count,
    })
}

/// Number of weak compositions of `grid` into `m` parts, saturating.
fn compositions_count(grid: usize, m: usize) -> u128 {
    // C(grid + m - 1, m - 1)
    let mut acc: u128 = 1;
    for k in 1..m {
        acc = acc.saturating_mul((grid + k) as u128) / k as u128;
        if acc > u128::from(u64::MAX) {
            return u128::MAX;
        }
    }
    acc
}

/// Depth-first enumeration of all nonnegative integer vectors of length
/// `counts.len()` summing to `grid`, calling `visit` on each.
fn visit_compositions(
    counts: &mut Vec<usize>,
    pos: usize,
    remaining: usize,
    visit: &mut impl FnMut(&[usize]),
) {
    if pos + 1 == counts.len() {
        counts[pos] = remaining;
        visit(counts);
        return;
    }
    for k in 0..=remaining {
        counts[pos] = k;
        visit_compositions(counts, pos + 1, remaining - k, visit);
    }
}

/// Clears rounding residue: clamps negative dust to 0 and absorbs the
/// deviation of the total from 1 into the largest entry.
fn fix_simplex_rounding(mut x: Vec<f64>) -> Vec<f64> {
    for v in &mut x {
        if *v < 0.0 {
            debug_assert!(*v > -1e-12, "projection left real negative mass {v}");
            *v = 0.0;
        }
    }
    let mut argmax = 0;
    for i in 1..x.len() {
        if x[i] > x[argmax] {
            argmax = i;
        }
    }
    let residual = 1.0 - pairwise_sum(&x);
    x[argmax] += residual;
    x
}

/// Euclidean projection onto the probability simplex (sort-based).
fn project_to_simplex(v: &[f64]) -> Vec<f64> {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).expect("finite"));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (k, &u) in sorted.iter().enumerate() {
        cumsum += u;
        let candidate = (cumsum - 1.0) / (k + 1) as f64;
        if u - candidate > 0.0 {
            theta = candidate;
        } else {
            break;
        }
    }
    v.iter().map(|&u| (u - theta).max(0.0)).collect()
}

/// KKT residual of `x` with potentials `p = G x`: deviation of `p` from its
/// weighted mean on the support plus `max(0, mean - p)` off the support.
fn kkt_residual(x: &[f64], pots: &[f64]) -> f64 {
    let weighted: Vec<f64> = x.iter().zip(pots).map(|(xi, pi)| xi * pi).collect();
    let mean = pairwise_sum(&weighted);
    let mut deviation = 0.0f64;
    let mut complementarity = 0.0f64;
    for (&xi, &pi) in x.iter().zip(pots) {
        if xi > 0.0 {
            deviation = deviation.max((pi - mean).abs());
        } else {
            complementarity = complementarity.max(mean - pi);
        }
    }
    deviation + complementarity.max(0.0)
}

/// Projected gradient descent for `min x^T G x` on the simplex. Starts at
/// the inverse Lipschitz step and halves it when the residual stops
/// improving; returns the best iterate seen.
fn projected_gradient(
    apply: &dyn Fn(&[f64]) -> Vec<f64>,
    x0: Vec<f64>,
    cap: usize,
) -> (Vec<f64>, usize, f64) {
    let mut x = project_to_simplex(&x0);
    let lipschitz = 2.0 * estimate_top_eigenvalue(apply, x.len());
    let mut step = 0.9 / lipschitz;

    let mut best = x.clone();
    let mut best_kkt = kkt_residual(&x, &apply(&x));
    let mut last_check = best_kkt;
    let mut stalls = 0usize;
    let mut iterations = 0usize;

    while iterations < cap && best_kkt > KKT_TOLERANCE {
        let pots = apply(&x);
        let moved: Vec<f64> = x
            .iter()
            .zip(&pots)
            .map(|(xi, pi)| xi - step * 2.0 * pi)
            .collect();
        x = project_to_simplex(&moved);
        iterations += 1;

        if iterations.is_multiple_of(16) || iterations == cap {
            let kkt = kkt_residual(&x, &apply(&x));
            if kkt < best_kkt {
                best_kkt = kkt;
                best.copy_from_slice(&x);
            }
            if kkt > 0.9 * last_check {
                stalls += 1;
                if stalls >= 4 {
                    step *= 0.5;
                    stalls = 0;
                }
            } else {
                stalls = 0;
            }
            last_check = kkt;
        }
    }
    (best, iterations, best_kkt)
}

/// Power iteration for the top eigenvalue of the symmetric positive definite
/// operator; deterministic start vector, modest overestimate returned.
fn estimate_top_eigenvalue(apply: &dyn Fn(&[f64]) -> Vec<f64>, m: usize) -> f64 {
    let mut v: Vec<f64> = (0..m).map(|i| 1.0 + 0.1 * ((i % 7) as f64)).collect();
    let mut eigen = 1.0f64;
    for _ in 0..60 {
        let w = apply(&v);
        let sq: Vec<f64> = w.iter().map(|&x| x * x).collect();
        let norm = pairwise_sum(&sq).sqrt();
        if norm == 0.0 || !norm.is_finite() {
            break;
        }
        eigen = norm / {
            let vs: Vec<f64> = v.iter().map(|&x| x * x).collect();
            pairwise_sum(&vs).sqrt()
        };
        v = w.iter().map(|&x| x / norm).collect();
    }
    1.1 * eigen
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::filtration::{
        build_cantor, build_random_filtration, build_socialist, BranchingProfile,
    };
    use crate::repulsion::repulsion_hierarchical;
    use rand::Rng;

    #[test]
    fn simplex_projection_basics() {
        assert_eq!(project_to_simplex(&[2.0, 0.0]), vec![1.0, 0.0]);
        let p = project_to_simplex(&[0.3, 0.3]);
        assert!((p[0] - 0.5).abs() < 1e-15 && (p[1] - 0.5).abs() < 1e-15);
        let q = project_to_simplex(&[-1.0, 0.5, 0.4]);
        assert!((pairwise_sum(&q) - 1.0).abs() < 1e-12);
        assert_eq!(q[0], 0.0);
    }

    #[test]
    fn cantor_minimizer_is_uniform() {
        for n in 1..=3 {
            let set = build_cantor(n).unwrap();
            let schedule = RepulsionSchedule::cantor(n);
            let result = minimize_repulsion(&set, &schedule).unwrap();
            let expected_mass = 0.25f64.powi(n as i32);
            for &mass in result.minimizer.masses() {
                assert!(
                    (mass - expected_mass).abs() <= 1e-8 * expected_mass,
                    "n={n}, mass {mass} vs {expected_mass}"
                );
            }
            let expected_value = 1.0 + 0.75 * n as f64;
            assert!(
                (result.min_value.value - expected_value).abs() <= 1e-8 * expected_value,
                "n={n}: {}",
                result.min_value.value
            );
            assert!(result.kkt_residual <= KKT_TOLERANCE);
            assert_eq!(result.active_bound_count, 0);
        }
    }

    #[test]
    fn single_leaf_minimizer() {
        let set = build_cantor(0).unwrap();
        let schedule = RepulsionSchedule::new(vec![3.0]).unwrap();
        let result = minimize_repulsion(&set, &schedule).unwrap();
        assert_eq!(result.minimizer.masses(), &[1.0]);
        assert!((result.min_value.value - 3.0).abs() < 1e-14);
    }

    #[test]
    fn mixed_profile_minimizer_is_uniform_on_leaves() {
        let profile = BranchingProfile::new(vec![2, 3]).unwrap();
        let set = build_socialist(&profile, None).unwrap();
        let schedule = RepulsionSchedule::new(vec![1.0, 3.0, 10.0]).unwrap();
        let result = minimize_repulsion(&set, &schedule).unwrap();
        for &mass in result.minimizer.masses() {
            assert!((mass - 1.0 / 6.0).abs() < 1e-9, "mass {mass}");
        }
        let report = verify_equidistribution(&result, &set, 1e-6).unwrap();
        assert!(report.pass, "{report:?}");
    }

    #[test]
    fn minimum_value_is_below_random_probes() {
        let mut rng = crate::util::seeded_stream(61, 0);
        let set = build_random_filtration(3, 3, 17).unwrap();
        let schedule = RepulsionSchedule::new(vec![1.0, 2.0, 5.0, 9.0]).unwrap();
        let result = minimize_repulsion(&set, &schedule).unwrap();
        for _ in 0..20 {
            let mut masses: Vec<f64> =
                (0..set.leaf_count()).map(|_| rng.gen_range(0.01..1.0)).collect();
            let total = pairwise_sum(&masses);
            for m in &mut masses {
                *m /= total;
            }
            masses[0] += 1.0 - pairwise_sum(&masses);
            let probe = LeafMeasure::new(masses).unwrap();
            let q = repulsion_hierarchical(&set, &schedule, &probe).unwrap().value;
            assert!(result.min_value.value <= q + 1e-12);
        }
    }

    #[test]
    fn nondegeneracy_on_random_filtrations() {
        for seed in 0..5 {
            let set = build_random_filtration(3, 4, seed).unwrap();
            let schedule = RepulsionSchedule::new(vec![0.5, 1.5, 4.0, 11.0]).unwrap();
            let result = minimize_repulsion(&set, &schedule).unwrap();
            let report = verify_nondegeneracy(&result, 1e-12);
            assert!(report.pass, "seed {seed}: {report:?}");
            assert!(report.min_mass > 0.0);
        }
    }

    #[test]
    fn equidistribution_rejects_non_socialist_sets_and_bad_measures() {
        // A tree with uneven child counts refuses the check outright.
        let json = r#"{"n":1,"nodes":[
            {"id":0,"gen":0,"parent":null,"children":[1,2]},
            {"id":1,"gen":1,"parent":0,"children":[]},
            {"id":2,"gen":1,"parent":0,"children":[]}]}"#;
        let two = crate::filtration::from_json(json).unwrap();
        let lopsided = MinimizationResult {
            minimizer: LeafMeasure::new(vec![0.75, 0.25]).unwrap(),
            min_value: RepulsionValue { value: 0.0 },
            iterations: 0,
            kkt_residual: 0.0,
            active_bound_count: 0,
        };
        let report = verify_equidistribution(&lopsided, &two, 1e-6).unwrap();
        assert!(!report.pass);
        assert_eq!(report.worst_generation, 1);
        assert_eq!((report.max_node, report.min_node), (1, 2));
        assert!((report.worst_ratio - 3.0).abs() < 1e-12);

        let uneven = build_random_filtration(2, 2, 3).unwrap();
        if uneven.branching_profile().is_none() {
            let res = MinimizationResult {
                minimizer: LeafMeasure::equidistributed(uneven.leaf_count()).unwrap(),
                min_value: RepulsionValue { value: 0.0 },
                iterations: 0,
                kkt_residual: 0.0,
                active_bound_count: 0,
            };
            assert!(matches!(
                verify_equidistribution(&res, &uneven, 1e-6),
                Err(Error::NotSocialist(_))
            ));
        }
    }

    #[test]
    fn equidistribution_single_node_is_vacuous() {
        let set = build_cantor(0).unwrap();
        let schedule = RepulsionSchedule::new(vec![1.0]).unwrap();
        let result = minimize_repulsion(&set, &schedule).unwrap();
        let report = verify_equidistribution(&result, &set, 1e-6).unwrap();
        assert!(report.pass);
        assert_eq!(report.worst_ratio, 1.0);
    }

    #[test]
    fn nondegeneracy_flags_zero_leaves() {
        let fake = MinimizationResult {
            minimizer: LeafMeasure::point_mass(4, 0).unwrap(),
            min_value: RepulsionValue { value: 0.0 },
            iterations: 0,
            kkt_residual: 0.0,
            active_bound_count: 3,
        };
        let report = verify_nondegeneracy(&fake, 1e-12);
        assert!(!report.pass);
        assert_eq!(report.min_mass, 0.0);
    }

    #[test]
    fn brute_force_on_first_cantor_generation() {
        let set = build_cantor(1).unwrap();
        let schedule = RepulsionSchedule::new(vec![1.0, 4.0]).unwrap();
        let oracle = brute_force_minimize(&set, &schedule, 50).unwrap();
        for &mass in oracle.minimizer.masses() {
            assert!((mass - 0.25).abs() <= 0.02 * 0.25, "mass {mass}");
        }
        assert!((oracle.min_value.value - 1.75).abs() <= 0.01 * 1.75);

        let solver = minimize_repulsion(&set, &schedule).unwrap();
        assert!((solver.min_value.value - oracle.min_value.value).abs() < 1e-6);
    }

    #[test]
    fn brute_force_two_leaf_symmetry() {
        let json = r#"{"n":1,"nodes":[
            {"id":0,"gen":0,"parent":null,"children":[1,2]},
            {"id":1,"gen":1,"parent":0,"children":[]},
            {"id":2,"gen":1,"parent":0,"children":[]}]}"#;
        let set = crate::filtration::from_json(json).unwrap();
        let schedule = RepulsionSchedule::new(vec![1.0, 2.0]).unwrap();
        let result = brute_force_minimize(&set, &schedule, 40).unwrap();
        assert!((result.minimizer.masses()[0] - 0.5).abs() < 1e-6);
        assert!((result.minimizer.masses()[1] - 0.5).abs() < 1e-6);
    }

    #[test]
    fn brute_force_agrees_with_solver_on_two_by_two_profile() {
        let profile = BranchingProfile::new(vec![2, 2]).unwrap();
        let set = build_socialist(&profile, None).unwrap();
        let schedule = RepulsionSchedule::new(vec![1.0, 2.5, 7.0]).unwrap();
        let oracle = brute_force_minimize(&set, &schedule, 30).unwrap();
        let solver = minimize_repulsion(&set, &schedule).unwrap();
        for (a, b) in oracle
            .minimizer
            .masses()
            .iter()
            .zip(solver.minimizer.masses())
        {
            assert!((a - b).abs() <= 1.0 / 30.0, "oracle {a} vs solver {b}");
        }
        assert!(
            (oracle.min_value.value - solver.min_value.value).abs()
                <= 1e-6 * solver.min_value.value
        );
    }

    #[test]
    fn brute_force_rejects_large_sets() {
        let set = build_cantor(2).unwrap();
        let schedule = RepulsionSchedule::cantor(2);
        assert!(matches!(
            brute_force_minimize(&set, &schedule, 10),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn minimizer_is_stable_under_mass_exchange() {
        // At the optimum, every sibling exchange leaves the value unchanged
        // to first order; the closed-form drop must be ~0.
        let set = build_cantor(2).unwrap();
        let schedule = RepulsionSchedule::cantor(2);
        let result = minimize_repulsion(&set, &schedule).unwrap();
        for parent in set.nodes() {
            for (i, &a) in parent.children.iter().enumerate() {
                for &b in &parent.children[i + 1..] {
                    let drop =
                        crate::repulsion::delta_q_exchange(&set, &schedule, &result.minimizer, a, b)
                            .unwrap();
                    assert!(drop.abs() <= 1e-9, "exchange ({a},{b}) drops {drop}");
                }
            }
        }
    }
}
