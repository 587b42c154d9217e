//! Lloyd's k-means iteration, k-means++ seeding, and a multi-restart driver.
//!
//! All randomness flows through [`ChaCha8Rng`] seeded from caller-supplied
//! `u64` seeds, so every run is reproducible bit-for-bit across platforms.
//! [`multi_restart`] derives one sub-seed per run from the master seed and
//! merges results deterministically (best cost, ties broken by run index),
//! so parallel execution cannot change the answer.

use rand::distr::weighted::WeightedIndex;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{cost_centroid, dist_sq, Dataset, Partition};

/// Default Lloyd iteration budget. Termination is normally by membership
/// convergence; this guard prevents pathological floating-point cycling.
pub const DEFAULT_MAX_ITERS: usize = 100;

/// Default centroid-shift tolerance: iteration stops early when no centroid
/// moves farther than this between rounds.
pub const DEFAULT_TOL: f64 = 1e-10;

// ─── run products ───────────────────────────────────────────────────────────

/// The `k` initial centers chosen by seeding, together with the dataset
/// indices they were drawn from. Indices are pairwise distinct and each
/// center equals the dataset point at its index.
#[derive(Debug, Clone, PartialEq)]
pub struct SeedSet {
    /// Initial center coordinates, in selection order.
    pub centers: Vec<Vec<f64>>,
    /// Dataset index of each chosen center.
    pub source_indices: Vec<usize>,
}

/// Outcome of one k-means run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    /// Final cluster assignment (never contains empty clusters).
    pub partition: Partition,
    /// Exact final cost, recomputed as [`cost_centroid`] on the final partition.
    pub cost: f64,
    /// Lloyd iterations executed (`≥ 1`).
    pub iterations: usize,
    /// The seeding that started the run; `None` when explicit initial
    /// centers were supplied instead of a seeding step.
    pub seed: Option<SeedSet>,
}

// ─── k-means++ seeding ──────────────────────────────────────────────────────

/// k-means++ seeding: the first center is uniform over the dataset, each
/// subsequent center is a data point sampled with probability proportional
/// to its squared distance to the nearest already-chosen center.
///
/// Reproducible: the same `rng_seed` yields the same [`SeedSet`].
///
/// When all remaining points coincide with already-chosen centers the
/// squared-distance weights vanish; the selection then falls back to a
/// uniform choice among the not-yet-chosen indices, so duplicated points
/// never abort a run.
///
/// # Errors
///
/// [`Error::InvalidK`] when `k = 0` or `k > n`.
pub fn seed_kmeanspp(dataset: &Dataset, k: usize, rng_seed: u64) -> Result<SeedSet> {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    seed_kmeanspp_with_rng(dataset, k, &mut rng)
}

fn seed_kmeanspp_with_rng(dataset: &Dataset, k: usize, rng: &mut ChaCha8Rng) -> Result<SeedSet> {
    let n = dataset.n();
    if k == 0 || k > n {
        return Err(Error::InvalidK { k, n });
    }

    let first = rng.random_range(0..n);
    let mut source_indices = vec![first];
    let mut chosen = vec![false; n];
    chosen[first] = true;

    // Squared distance from each point to its nearest chosen center so far.
    let mut d2: Vec<f64> = (0..n)
        .map(|i| dist_sq(dataset.point(i), dataset.point(first)))
        .collect();

    while source_indices.len() < k {
        let next = match WeightedIndex::new(&d2) {
            Ok(weights) => weights.sample(rng),
            // Total weight zero: every point coincides with a chosen center.
            Err(_) => {
                let remaining: Vec<usize> = (0..n).filter(|&i| !chosen[i]).collect();
                debug_assert!(!remaining.is_empty(), "k <= n guarantees spare indices");
                remaining[rng.random_range(0..remaining.len())]
            }
        };
        chosen[next] = true;
        source_indices.push(next);
        for (i, slot) in d2.iter_mut().enumerate() {
            let d = dist_sq(dataset.point(i), dataset.point(next));
            if d < *slot {
                *slot = d;
            }
        }
    }

    let centers = source_indices
        .iter()
        .map(|&i| dataset.point(i).to_vec())
        .collect();
    Ok(SeedSet {
        centers,
        source_indices,
    })
}

// ─── Lloyd iteration ────────────────────────────────────────────────────────

/// Lloyd's algorithm: alternate nearest-center assignment and centroid
/// update until membership stabilizes, the centroid shift drops below
/// `tol`, or `max_iters` rounds have run.
///
/// Determinism and robustness policies:
/// - assignment ties go to the lowest center index;
/// - a center that loses all members is reassigned to the point farthest
///   from its nearest center (the point currently worst represented), so an
///   empty cluster is never emitted;
/// - the cost sequence is asserted non-increasing at every iteration.
///
/// # Errors
///
/// [`Error::InvalidK`] when `initial_centers` is empty or larger than the
/// dataset, [`Error::DimensionMismatch`] when a center has the wrong
/// dimension, and [`Error::InvalidParameter`] for a zero iteration budget
/// or negative/non-finite `tol`.
pub fn lloyd(
    dataset: &Dataset,
    initial_centers: &[Vec<f64>],
    max_iters: usize,
    tol: f64,
) -> Result<RunResult> {
    let n = dataset.n();
    let k = initial_centers.len();
    if k == 0 || k > n {
        return Err(Error::InvalidK { k, n });
    }
    for (index, c) in initial_centers.iter().enumerate() {
        if c.len() != dataset.dim() {
            return Err(Error::DimensionMismatch {
                expected: dataset.dim(),
                found: c.len(),
                index,
            });
        }
    }
    if max_iters == 0 {
        return Err(Error::InvalidParameter {
            name: "max_iters",
            reason: "iteration budget must be at least 1".into(),
        });
    }
    if !tol.is_finite() || tol < 0.0 {
        return Err(Error::InvalidParameter {
            name: "tol",
            reason: format!("tolerance must be finite and nonnegative, got {tol}"),
        });
    }

    let mut centers: Vec<Vec<f64>> = initial_centers.to_vec();
    let mut labels = vec![0usize; n];
    let mut prev_labels: Option<Vec<usize>> = None;
    let mut prev_cost = f64::INFINITY;
    let mut iterations = 0;

    for _ in 0..max_iters {
        iterations += 1;

        assign_nearest(dataset, &centers, &mut labels);
        repair_empty_clusters(dataset, &centers, &mut labels, k);

        // Update step: centroids of the (now never-empty) clusters.
        let mut sums = vec![vec![0.0; dataset.dim()]; k];
        let mut counts = vec![0usize; k];
        for (i, &label) in labels.iter().enumerate() {
            counts[label] += 1;
            for (s, c) in sums[label].iter_mut().zip(dataset.point(i)) {
                *s += c;
            }
        }
        let new_centers: Vec<Vec<f64>> = sums
            .into_iter()
            .zip(&counts)
            .map(|(sum, &count)| sum.into_iter().map(|s| s / count as f64).collect())
            .collect();

        let cost: f64 = labels
            .iter()
            .enumerate()
            .map(|(i, &label)| dist_sq(dataset.point(i), &new_centers[label]))
            .sum();
        assert!(
            cost <= prev_cost * (1.0 + 1e-12) + 1e-12,
            "Lloyd cost increased: {prev_cost} -> {cost}"
        );
        prev_cost = cost;

        let shift = centers
            .iter()
            .zip(&new_centers)
            .map(|(old, new)| dist_sq(old, new).sqrt())
            .fold(0.0f64, f64::max);
        centers = new_centers;

        if prev_labels.as_deref() == Some(labels.as_slice()) {
            break;
        }
        prev_labels = Some(labels.clone());
        if shift < tol {
            break;
        }
    }

    let partition = Partition::new(labels, k)?;
    let cost = cost_centroid(dataset, &partition)?;
    Ok(RunResult {
        partition,
        cost,
        iterations,
        seed: None,
    })
}

/// Nearest-center assignment with ties broken toward the lowest index.
fn assign_nearest(dataset: &Dataset, centers: &[Vec<f64>], labels: &mut [usize]) {
    for (i, label) in labels.iter_mut().enumerate() {
        let mut best = 0usize;
        let mut best_d = dist_sq(dataset.point(i), &centers[0]);
        for (j, center) in centers.iter().enumerate().skip(1) {
            let d = dist_sq(dataset.point(i), center);
            if d < best_d {
                best_d = d;
                best = j;
            }
        }
        *label = best;
    }
}

/// Gives every empty cluster the point farthest from its nearest center.
/// Donors are restricted to clusters with at least two members, each point
/// is grabbed at most once per round, and ties go to the lowest point index.
fn repair_empty_clusters(
    dataset: &Dataset,
    centers: &[Vec<f64>],
    labels: &mut [usize],
    k: usize,
) {
    let mut counts = vec![0usize; k];
    for &label in labels.iter() {
        counts[label] += 1;
    }
    let mut grabbed = vec![false; dataset.n()];
    for j in 0..k {
        if counts[j] > 0 {
            continue;
        }
        let mut farthest: Option<(usize, f64)> = None;
        for (i, &label) in labels.iter().enumerate() {
            if grabbed[i] || counts[label] < 2 {
                continue;
            }
            // After assignment, a point's own center *is* its nearest center.
            let d = dist_sq(dataset.point(i), &centers[label]);
            if farthest.is_none_or(|(_, best)| d > best) {
                farthest = Some((i, d));
            }
        }
        let (i, _) = farthest.expect("n >= k guarantees a donor cluster with >= 2 members");
        counts[labels[i]] -= 1;
        labels[i] = j;
        counts[j] = 1;
        grabbed[i] = true;
    }
}

// ─── multi-restart driver ───────────────────────────────────────────────────

/// Runs `repetitions` independent seeded k-means++ / Lloyd runs and returns
/// the best result by cost (ties broken by run index).
///
/// Per-run seeds are drawn from a master [`ChaCha8Rng`] seeded with
/// `rng_seed`, so the same master seed reproduces the same family of runs,
/// and the first `r` runs of an `R`-restart invocation coincide with an
/// `r`-restart invocation — the best cost is monotone in `repetitions`.
/// Runs execute in parallel; the merge is order-deterministic.
///
/// # Errors
///
/// [`Error::InvalidParameter`] for `repetitions = 0`; per-run errors are
/// propagated only when every run fails (the first failure is returned).
pub fn multi_restart(
    dataset: &Dataset,
    k: usize,
    repetitions: usize,
    rng_seed: u64,
) -> Result<RunResult> {
    if repetitions == 0 {
        return Err(Error::InvalidParameter {
            name: "repetitions",
            reason: "at least one restart is required".into(),
        });
    }
    let mut master = ChaCha8Rng::seed_from_u64(rng_seed);
    let run_seeds: Vec<u64> = (0..repetitions).map(|_| master.random()).collect();

    let outcomes: Vec<Result<RunResult>> = run_seeds
        .into_par_iter()
        .map(|seed| {
            let seeding = seed_kmeanspp(dataset, k, seed)?;
            let mut result = lloyd(dataset, &seeding.centers, DEFAULT_MAX_ITERS, DEFAULT_TOL)?;
            result.seed = Some(seeding);
            Ok(result)
        })
        .collect();

    let mut best: Option<RunResult> = None;
    let mut first_err: Option<Error> = None;
    for outcome in outcomes {
        match outcome {
            Ok(result) => {
                let better = best
                    .as_ref()
                    .is_none_or(|b| result.cost.total_cmp(&b.cost) == std::cmp::Ordering::Less);
                if better {
                    best = Some(result);
                }
            }
            Err(e) => {
                if first_err.is_none() {
                    first_err = Some(e);
                }
            }
        }
    }
    match best {
        Some(result) => Ok(result),
        None => Err(first_err.expect("repetitions >= 1 means at least one outcome")),
    }
}
