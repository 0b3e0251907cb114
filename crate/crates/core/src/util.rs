//! Small numeric helpers used across modules.
//!
//! Summation order is part of this crate's determinism contract, so every
//! reduction over float slices goes through the fixed-shape pairwise
//! routines below instead of ad-hoc iterator sums.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Pairwise (cascade) sum. Fixed summation tree for a given length, so the
/// result depends only on the input values, never on chunking or threads.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        2 => values[0] + values[1],
        n => {
            let mid = n / 2;
            pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
        }
    }
}

pub fn pairwise_mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    pairwise_sum(values) / values.len() as f64
}

/// Sample standard error of the mean: sqrt(var / n) with the unbiased
/// variance estimate. Returns 0 for fewer than two values.
pub fn standard_error(values: &[f64], mean: f64) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let sq: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
    (pairwise_sum(&sq) / ((n - 1) as f64 * n as f64)).sqrt()
}

/// RNG for an independent stream of a master seed. Streams with distinct
/// indices never overlap, so parallel consumers can each own one.
pub fn seeded_stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Textbook conjugate gradients on a symmetric positive definite operator,
/// matrix-free. Returns the iterate, the iteration count, and the final
/// relative residual `|b - Ax| / |b|`; it stops when that drops below `tol`,
/// when the cap is hit, or when rounding noise keeps the residual from
/// shrinking (callers judge the returned residual for themselves).
pub(crate) fn conjugate_gradient(
    apply: &dyn Fn(&[f64]) -> Vec<f64>,
    b: &[f64],
    tol: f64,
    cap: usize,
) -> (Vec<f64>, usize, f64) {
    let m = b.len();
    let dot = |a: &[f64], c: &[f64]| -> f64 {
        let prods: Vec<f64> = a.iter().zip(c).map(|(x, y)| x * y).collect();
        pairwise_sum(&prods)
    };

    let mut x = vec![0.0f64; m];
    let mut r = b.to_vec();
    let mut p = r.clone();
    let b_norm = dot(b, b).sqrt();
    if b_norm == 0.0 {
        return (x, 0, 0.0);
    }
    let mut rs = dot(&r, &r);
    let mut iterations = 0;
    let mut best_rs = rs;
    let mut stagnant = 0;

    while iterations < cap && rs.sqrt() > tol * b_norm {
        let gp = apply(&p);
        let denom = dot(&p, &gp);
        if denom <= 0.0 || !denom.is_finite() {
            break;
        }
        let alpha = rs / denom;
        for i in 0..m {
            x[i] += alpha * p[i];
            r[i] -= alpha * gp[i];
        }
        let rs_new = dot(&r, &r);
        let beta = rs_new / rs;
        for i in 0..m {
            p[i] = r[i] + beta * p[i];
        }
        rs = rs_new;
        iterations += 1;
        // Rounding floor: stop once the residual refuses to shrink.
        if rs < 0.998 * best_rs {
            best_rs = rs;
            stagnant = 0;
        } else {
            stagnant += 1;
            if stagnant >= 20 {
                break;
            }
        }
    }
    (x, iterations, rs.sqrt() / b_norm)
}

/// Derive a child seed from a master seed and an index (splitmix64 step).
/// Used where sub-tasks need whole independent seeds rather than streams.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
