//! Synthetic data constructions.
//!
//! - [`gen_well_clusterable`] / [`gen_core_clusterable`]: planted datasets
//!   whose separation meets the plain / core required-gap formulas by
//!   construction (times a caller margin), so they round-trip through
//!   [`crate::verifier::verify`] as well-clusterable.
//! - [`gen_ring`] + [`distance_histogram`]: the thin-ring construction whose
//!   pairwise-distance histogram shows multiple modes despite the data
//!   having no cluster structure — the classic false positive for
//!   histogram-based clusterability tests.
//! - [`gen_unbalanced_counterexample`]: a huge surface gap that still fails
//!   to make the gap split optimal, because splitting a large-variance
//!   cluster and merging the small one is cheaper. Demonstrates why gap
//!   requirements must scale with cardinality imbalance.
//!
//! Center placement is deterministic (regular simplex scaled to the required
//! center distances, or collinear spacing when the dimension is too small
//! for a simplex), followed by a random rotation — feasible in any dimension
//! without rejection sampling. All randomness flows through a caller seed.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::geometry::{compute_stats, gap_report, Dataset, Partition};
use crate::verifier::{required_gap_core, required_gap_plain, verify, VerdictMode};

/// Multiplicative pad on planted center distances. Keeps realized gaps
/// strictly at or above `margin × required_gap` after floating-point drift
/// in centroid/radius measurement (drift is ~1e-13 relative; the pad is
/// 1e-9).
const GAP_PAD: f64 = 1.0 + 1e-9;

// ─── products ───────────────────────────────────────────────────────────────

/// A synthetic dataset with known ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct PlantedDataset {
    pub dataset: Dataset,
    /// The ground-truth assignment (points appear cluster by cluster).
    pub planted_partition: Partition,
    /// The exact centers each cluster was built around.
    pub planted_centers: Vec<Vec<f64>>,
    /// Realized full-cluster radius around each planted center (includes
    /// stragglers for core datasets).
    pub per_cluster_radius: Vec<f64>,
    /// Measured minimum gap: between full enclosing balls for plain
    /// datasets, between core balls for core datasets.
    pub realized_min_gap: f64,
    /// The required gap the construction was built against.
    pub required_gap: f64,
    /// Requested safety factor (`realized_min_gap ≥ margin × required_gap`).
    pub margin: f64,
    /// Core datasets only: the realized straggler cost fraction (largest
    /// over clusters), `≤` the requested `𝔭`. `None` for plain datasets.
    pub realized_p_frak: Option<f64>,
}

/// Outcome of the unbalanced-cardinality counterexample construction.
#[derive(Debug, Clone, PartialEq)]
pub struct CounterexampleReport {
    pub dataset: Dataset,
    /// Big cluster vs small cluster — the partition the gap suggests.
    pub gap_partition: Partition,
    /// Splits the big cluster at its two mass points and merges the small
    /// cluster into the nearer half.
    pub alternative_partition: Partition,
    /// Cost of the gap partition.
    pub q_gap: f64,
    /// Cost of the alternative partition.
    pub q_alt: f64,
    /// Largest per-axis variance component of the big cluster.
    pub v_d: f64,
    /// `V_d / (3r)` — the derived lower bound on the split-center offset.
    pub x3_lower_bound: f64,
    /// True when `q_alt < q_gap`, i.e. the gap partition is *not* optimal.
    /// Requested sizes that do not defeat the gap partition are reported
    /// here honestly rather than erroring.
    pub succeeded: bool,
}

/// Equal-width histogram of pairwise distances.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Histogram {
    /// `bins + 1` strictly increasing edges spanning `[0, max distance]`.
    pub bin_edges: Vec<f64>,
    /// Pair counts per bin; sums to `n(n−1)/2`.
    pub counts: Vec<u64>,
}

impl Histogram {
    /// Indices (first bin of each plateau) of the interior local maxima:
    /// runs of equal counts strictly greater than both neighboring runs.
    /// Plateaus touching either end of the histogram have only one neighbor
    /// and do not qualify.
    #[must_use]
    pub fn local_maxima(&self) -> Vec<usize> {
        let mut runs: Vec<(u64, usize)> = Vec::new();
        for (i, &c) in self.counts.iter().enumerate() {
            if runs.last().map(|r| r.0) != Some(c) {
                runs.push((c, i));
            }
        }
        let mut maxima = Vec::new();
        for ri in 1..runs.len().saturating_sub(1) {
            if runs[ri].0 > runs[ri - 1].0 && runs[ri].0 > runs[ri + 1].0 {
                maxima.push(runs[ri].1);
            }
        }
        maxima
    }
}

// ─── sampling utilities ─────────────────────────────────────────────────────

/// A uniformly random direction (unit vector) in `dim` dimensions.
pub fn random_unit_vector(dim: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

/// A point sampled uniformly from the ball of given center and radius
/// (Gaussian direction, radius taken as `U^(1/dim)`).
pub fn sample_in_ball(center: &[f64], radius: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let dim = center.len();
    let direction = random_unit_vector(dim, rng);
    let scale = radius * rng.random::<f64>().powf(1.0 / dim as f64);
    center
        .iter()
        .zip(direction)
        .map(|(c, u)| c + scale * u)
        .collect()
}

/// A uniformly random rotation (orthogonal matrix, rows orthonormal) via
/// Gram-Schmidt on Gaussian vectors.
fn random_rotation(dim: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(dim);
    while rows.len() < dim {
        let mut v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        for row in &rows {
            let proj: f64 = v.iter().zip(row).map(|(a, b)| a * b).sum();
            for (x, b) in v.iter_mut().zip(row) {
                *x -= proj * b;
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-8 {
            for x in &mut v {
                *x /= norm;
            }
            rows.push(v);
        }
    }
    rows
}

fn rotate(rotation: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    rotation
        .iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

/// Vertices of a regular `k`-simplex with the given edge length, embedded in
/// `k−1` dimensions (Helmert coordinates — pairwise distances are exact up
/// to rounding).
fn simplex_vertices(k: usize, edge: f64) -> Vec<Vec<f64>> {
    let scale = edge / std::f64::consts::SQRT_2;
    (0..k)
        .map(|i| {
            (1..k)
                .map(|j| {
                    let denom = (j as f64 * (j as f64 + 1.0)).sqrt();
                    let h = match i.cmp(&j) {
                        std::cmp::Ordering::Less => 1.0 / denom,
                        std::cmp::Ordering::Equal => -(j as f64) / denom,
                        std::cmp::Ordering::Greater => 0.0,
                    };
                    scale * h
                })
                .collect()
        })
        .collect()
}

/// Places `k` centers so that centers `p, q` are at least `pair_dist(p, q)`
/// apart: a regular simplex scaled to the largest required distance when
/// `dim ≥ k−1`, otherwise collinear with exact consecutive spacing (always
/// feasible). A random rotation is applied when `dim ≥ 2`. Degenerate
/// all-zero requirements fall back to unit spacing so centers stay distinct.
fn place_centers(
    k: usize,
    dim: usize,
    pair_dist: impl Fn(usize, usize) -> f64,
    rng: &mut ChaCha8Rng,
) -> Vec<Vec<f64>> {
    let spacing_floor = 1.0;
    let centers: Vec<Vec<f64>> = if dim >= k - 1 {
        let mut edge: f64 = 0.0;
        for p in 0..k {
            for q in (p + 1)..k {
                edge = edge.max(pair_dist(p, q));
            }
        }
        if edge == 0.0 {
            edge = spacing_floor;
        }
        simplex_vertices(k, edge)
            .into_iter()
            .map(|mut v| {
                v.resize(dim, 0.0);
                v
            })
            .collect()
    } else {
        let mut x = 0.0;
        let mut centers = Vec::with_capacity(k);
        for i in 0..k {
            if i > 0 {
                let step = pair_dist(i - 1, i);
                x += if step == 0.0 { spacing_floor } else { step };
            }
            let mut c = vec![0.0; dim];
            c[0] = x;
            centers.push(c);
        }
        centers
    };
    if dim >= 2 {
        let rotation = random_rotation(dim, rng);
        centers.iter().map(|c| rotate(&rotation, c)).collect()
    } else {
        centers
    }
}

/// `count` offsets uniform in the ball of `radius`, post-processed so that
/// their mean is (numerically) the origin and the largest norm is exactly
/// `radius` — the declared center and radius are realized, not approximated.
/// A single point, or a zero radius, degenerates to zeros.
fn uniform_ball_offsets(count: usize, radius: f64, dim: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    if count == 1 || radius == 0.0 {
        return vec![vec![0.0; dim]; count];
    }
    let origin = vec![0.0; dim];
    loop {
        let mut offsets: Vec<Vec<f64>> =
            (0..count).map(|_| sample_in_ball(&origin, 1.0, rng)).collect();
        let mut mean = vec![0.0; dim];
        for o in &offsets {
            for (m, x) in mean.iter_mut().zip(o) {
                *m += x;
            }
        }
        for m in &mut mean {
            *m /= count as f64;
        }
        for o in &mut offsets {
            for (x, m) in o.iter_mut().zip(&mean) {
                *x -= m;
            }
        }
        let max_norm = offsets
            .iter()
            .map(|o| o.iter().map(|x| x * x).sum::<f64>().sqrt())
            .fold(0.0f64, f64::max);
        if max_norm < 1e-12 {
            continue; // all samples collapsed onto the mean; try again
        }
        let scale = radius / max_norm;
        for o in &mut offsets {
            for x in o.iter_mut() {
                *x *= scale;
            }
        }
        return offsets;
    }
}

// ─── planted well-clusterable datasets ──────────────────────────────────────

fn check_planted_inputs(
    k: usize,
    cardinalities: &[usize],
    radii: &[f64],
    dim: usize,
    margin: f64,
) -> Result<()> {
    if k < 2 {
        return Err(Error::TooFewClusters { k });
    }
    if cardinalities.len() != k {
        return Err(Error::LengthMismatch {
            what: "cardinalities",
            expected: k,
            found: cardinalities.len(),
        });
    }
    if radii.len() != k {
        return Err(Error::LengthMismatch {
            what: "radii",
            expected: k,
            found: radii.len(),
        });
    }
    if cardinalities.contains(&0) {
        return Err(Error::InvalidParameter {
            name: "cardinalities",
            reason: "every cluster needs at least one point".into(),
        });
    }
    if radii.iter().any(|r| !r.is_finite() || *r < 0.0) {
        return Err(Error::InvalidParameter {
            name: "radii",
            reason: "radii must be finite and nonnegative".into(),
        });
    }
    if dim == 0 {
        return Err(Error::InvalidParameter {
            name: "dim",
            reason: "dimension must be at least 1".into(),
        });
    }
    if !margin.is_finite() || margin < 1.0 {
        return Err(Error::InvalidParameter {
            name: "margin",
            reason: format!("margin must be at least 1, got {margin}"),
        });
    }
    Ok(())
}

/// Generates a dataset whose planted partition passes plain verification:
/// every pairwise surface gap is at least `margin × required_gap_plain`.
/// Each cluster is sampled uniformly in its ball, recentered exactly onto
/// its planted center, and rescaled so one point realizes the declared
/// radius (a singleton cluster realizes radius 0 regardless of request).
///
/// # Errors
///
/// Input validation only; placement is deterministic and never fails.
pub fn gen_well_clusterable(
    k: usize,
    cardinalities: &[usize],
    radii: &[f64],
    dim: usize,
    margin: f64,
    rng_seed: u64,
) -> Result<PlantedDataset> {
    check_planted_inputs(k, cardinalities, radii, dim, margin)?;
    let r_max = radii.iter().copied().fold(0.0f64, f64::max);
    let required_gap = required_gap_plain(k, cardinalities, r_max)?.g_required;

    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let centers = place_centers(
        k,
        dim,
        |p, q| radii[p] + radii[q] + margin * required_gap * GAP_PAD,
        &mut rng,
    );

    let mut points = Vec::new();
    let mut labels = Vec::new();
    let mut per_cluster_radius = Vec::with_capacity(k);
    for (i, (&count, &radius)) in cardinalities.iter().zip(radii).enumerate() {
        let offsets = uniform_ball_offsets(count, radius, dim, &mut rng);
        per_cluster_radius.push(if count == 1 { 0.0 } else { radius });
        for offset in offsets {
            points.push(centers[i].iter().zip(offset).map(|(c, o)| c + o).collect());
            labels.push(i);
        }
    }
    let dataset = Dataset::new(points)?;
    let planted_partition = Partition::new(labels, k)?;

    let stats = compute_stats(&dataset, &planted_partition)?;
    let realized_min_gap = gap_report(&stats)?.min_gap;
    debug_assert!(realized_min_gap >= margin * required_gap);

    Ok(PlantedDataset {
        dataset,
        planted_partition,
        planted_centers: centers,
        per_cluster_radius,
        realized_min_gap,
        required_gap,
        margin,
        realized_p_frak: None,
    })
}

/// Generates a dataset whose planted partition passes *core* verification at
/// the requested `𝔭`, while carrying genuine stragglers outside the cores.
///
/// `cardinalities` and `radii` describe the planted *cores*. Each core is
/// built from antipodal pairs at exactly its radius (plus one point at the
/// center for odd cardinality), so extraction recovers it exactly. On top,
/// each cluster receives as many stragglers as the `𝔭` cost budget allows
/// (with a 10% safety factor, in antipodal pairs at a radius safely outside
/// the core but well inside the inter-cluster gap). When the budget rounds
/// down to zero stragglers the realized fraction is reported rather than
/// silently pretending: see [`PlantedDataset::realized_p_frak`].
///
/// Core separation is `margin × required_gap_core` with every radius
/// replaced by the maximum — the same convention verification uses — so the
/// construction round-trips through [`verify`] in core mode.
///
/// # Errors
///
/// Input validation only; requires `𝔭 ∈ (0, 1)` strictly.
pub fn gen_core_clusterable(
    k: usize,
    cardinalities: &[usize],
    radii: &[f64],
    dim: usize,
    p_frak: f64,
    margin: f64,
    rng_seed: u64,
) -> Result<PlantedDataset> {
    check_planted_inputs(k, cardinalities, radii, dim, margin)?;
    if !p_frak.is_finite() || p_frak <= 0.0 || p_frak >= 1.0 {
        return Err(Error::InvalidProbability {
            name: "p_frak",
            value: p_frak,
        });
    }
    let r_hat_max = radii.iter().copied().fold(0.0f64, f64::max);
    let required_gap =
        required_gap_core(k, cardinalities, &vec![r_hat_max; k], p_frak)?.g_required;

    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let centers = place_centers(
        k,
        dim,
        |p, q| radii[p] + radii[q] + margin * required_gap * GAP_PAD,
        &mut rng,
    );

    let mut points: Vec<Vec<f64>> = Vec::new();
    let mut labels = Vec::new();
    let mut per_cluster_radius = Vec::with_capacity(k);
    let mut worst_realized_fraction: f64 = 0.0;
    for (i, (&count, &radius)) in cardinalities.iter().zip(radii).enumerate() {
        let center = &centers[i];
        let ring_count = count - count % 2;
        let mut push = |offset: &[f64]| {
            points.push(center.iter().zip(offset).map(|(c, o)| c + o).collect());
            labels.push(i);
        };

        // Core: antipodal pairs at exactly `radius`, plus a center point
        // when the cardinality is odd. Pairs cancel, so the cluster centroid
        // is the planted center and extraction sees the exact radius.
        for _ in 0..ring_count / 2 {
            let u = random_unit_vector(dim, &mut rng);
            let offset: Vec<f64> = u.iter().map(|x| x * radius).collect();
            push(&offset);
            push(&offset.iter().map(|x| -x).collect::<Vec<_>>());
        }
        if count % 2 == 1 {
            push(&vec![0.0; dim]);
        }

        // Stragglers: spend at most 90% of the `𝔭` cost budget at a radius
        // strictly outside the core yet far from the neighboring clusters.
        let mut straggler_count = 0usize;
        let mut straggler_radius = 0.0;
        if radius > 0.0 && ring_count > 0 && required_gap > 0.0 {
            straggler_radius = radius + radius.min(0.2 * required_gap);
            let budget =
                0.9 * (p_frak / (1.0 - p_frak)) * ring_count as f64 * radius * radius;
            straggler_count = (budget / (straggler_radius * straggler_radius)).floor() as usize;
            straggler_count -= straggler_count % 2;
        }
        for _ in 0..straggler_count / 2 {
            let u = random_unit_vector(dim, &mut rng);
            let offset: Vec<f64> = u.iter().map(|x| x * straggler_radius).collect();
            push(&offset);
            push(&offset.iter().map(|x| -x).collect::<Vec<_>>());
        }

        let core_cost = ring_count as f64 * radius * radius;
        let straggler_cost = straggler_count as f64 * straggler_radius * straggler_radius;
        if core_cost + straggler_cost > 0.0 {
            worst_realized_fraction =
                worst_realized_fraction.max(straggler_cost / (core_cost + straggler_cost));
        }
        per_cluster_radius.push(if straggler_count > 0 {
            straggler_radius
        } else if ring_count > 0 {
            radius
        } else {
            0.0
        });
    }

    let dataset = Dataset::new(points)?;
    let planted_partition = Partition::new(labels, k)?;
    let verdict = verify(&dataset, &planted_partition, VerdictMode::Core, Some(p_frak))?;
    debug_assert!(verdict.well_clusterable);

    Ok(PlantedDataset {
        dataset,
        planted_partition,
        planted_centers: centers,
        per_cluster_radius,
        realized_min_gap: verdict.measured_min_gap,
        required_gap,
        margin,
        realized_p_frak: Some(worst_realized_fraction),
    })
}

// ─── ring counterexample ────────────────────────────────────────────────────

/// `n` points on a thin annulus: angle uniform in `[0, 2π)`, radius uniform
/// in `[ring_radius − thickness/2, ring_radius + thickness/2]`, centered at
/// the origin. No cluster structure — yet its distance histogram is
/// multimodal (see [`distance_histogram`]).
///
/// # Errors
///
/// [`Error::InvalidParameter`] unless `n ≥ 3`, `ring_radius > 0`, and
/// `0 ≤ thickness < ring_radius`.
pub fn gen_ring(n: usize, ring_radius: f64, thickness: f64, rng_seed: u64) -> Result<Dataset> {
    if n < 3 {
        return Err(Error::InvalidParameter {
            name: "n",
            reason: format!("ring needs at least 3 points, got {n}"),
        });
    }
    if !ring_radius.is_finite() || ring_radius <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "ring_radius",
            reason: format!("ring radius must be positive, got {ring_radius}"),
        });
    }
    if !thickness.is_finite() || thickness < 0.0 || thickness >= ring_radius {
        return Err(Error::InvalidParameter {
            name: "thickness",
            reason: format!("need 0 <= thickness < ring_radius, got {thickness}"),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let points = (0..n)
        .map(|_| {
            let theta = rng.random_range(0.0..std::f64::consts::TAU);
            let r = if thickness == 0.0 {
                ring_radius
            } else {
                rng.random_range((ring_radius - thickness / 2.0)..(ring_radius + thickness / 2.0))
            };
            vec![r * theta.cos(), r * theta.sin()]
        })
        .collect();
    Dataset::new(points)
}

/// Histogram of all `n(n−1)/2` pairwise Euclidean distances over equal-width
/// bins spanning `[0, max distance]`. (All points coincident: the span
/// degenerates, and a unit span is used so the histogram stays well-formed.)
///
/// # Errors
///
/// [`Error::InvalidParameter`] for `bins < 2` or `n < 2`.
pub fn distance_histogram(dataset: &Dataset, bins: usize) -> Result<Histogram> {
    if bins < 2 {
        return Err(Error::InvalidParameter {
            name: "bins",
            reason: format!("need at least 2 bins, got {bins}"),
        });
    }
    let n = dataset.n();
    if n < 2 {
        return Err(Error::InvalidParameter {
            name: "dataset",
            reason: "distance histogram needs at least 2 points".into(),
        });
    }

    let mut max_d: f64 = 0.0;
    for i in 0..n {
        for l in (i + 1)..n {
            max_d = max_d.max(crate::geometry::dist(dataset.point(i), dataset.point(l)));
        }
    }
    let span = if max_d > 0.0 { max_d } else { 1.0 };

    let mut counts = vec![0u64; bins];
    for i in 0..n {
        for l in (i + 1)..n {
            let d = crate::geometry::dist(dataset.point(i), dataset.point(l));
            let idx = ((d / span * bins as f64) as usize).min(bins - 1);
            counts[idx] += 1;
        }
    }
    let mut bin_edges: Vec<f64> = (0..bins).map(|i| i as f64 * span / bins as f64).collect();
    bin_edges.push(span);
    Ok(Histogram { bin_edges, counts })
}

// ─── unbalanced-cardinality counterexample ──────────────────────────────────

/// Builds the unbalanced counterexample on a line: a big cluster of `n_big`
/// points split as two point masses at `±r` (maximizing the per-axis
/// variance `V_d = r²` inside a radius-`r` ball) and a small cluster of
/// `n_small` coincident points across a surface gap of `gap_multiple × r`.
///
/// When `n_big/n_small` is large enough, splitting the big cluster and
/// merging the small one beats the gap partition — `q_alt < q_gap` — no
/// matter how large the gap multiple is. The geometric premise behind the
/// derivation assumes `gap_multiple ≥ 4`; smaller multiples are accepted for
/// desk-scale experiments (the report stays honest either way).
///
/// The construction is deterministic; `rng_seed` is accepted for interface
/// uniformity with the other generators and recorded in manifests, but no
/// randomness is consumed.
///
/// # Errors
///
/// [`Error::InvalidParameter`] unless `r > 0`, `gap_multiple > 0`,
/// `n_big ≥ 2` and even, and `n_small ≥ 1`.
pub fn gen_unbalanced_counterexample(
    r: f64,
    gap_multiple: f64,
    n_big: usize,
    n_small: usize,
    rng_seed: u64,
) -> Result<CounterexampleReport> {
    let _ = rng_seed; // deterministic construction; see the doc comment
    if !r.is_finite() || r <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "r",
            reason: format!("big-cluster radius must be positive, got {r}"),
        });
    }
    if !gap_multiple.is_finite() || gap_multiple <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "gap_multiple",
            reason: format!("gap multiple must be positive, got {gap_multiple}"),
        });
    }
    if n_big < 2 || n_big % 2 != 0 {
        return Err(Error::InvalidParameter {
            name: "n_big",
            reason: format!("big cluster size must be even and at least 2, got {n_big}"),
        });
    }
    if n_small == 0 {
        return Err(Error::InvalidParameter {
            name: "n_small",
            reason: "small cluster needs at least one point".into(),
        });
    }

    // Big ball centered at 0 with radius r; the small point mass sits at
    // center distance r + gap_multiple·r, i.e. surface gap gap_multiple·r.
    let d = r + gap_multiple * r;
    let half = n_big / 2;
    let mut points = Vec::with_capacity(n_big + n_small);
    points.extend(std::iter::repeat_n(vec![-r], half));
    points.extend(std::iter::repeat_n(vec![r], half));
    points.extend(std::iter::repeat_n(vec![d], n_small));
    let dataset = Dataset::new(points)?;

    let mut gap_labels = vec![0usize; n_big];
    gap_labels.extend(std::iter::repeat_n(1usize, n_small));
    let gap_partition = Partition::new(gap_labels, 2)?;

    let mut alt_labels = vec![0usize; half];
    alt_labels.extend(std::iter::repeat_n(1usize, half + n_small));
    let alternative_partition = Partition::new(alt_labels, 2)?;

    let q_gap = crate::geometry::cost_centroid(&dataset, &gap_partition)?;
    let q_alt = crate::geometry::cost_centroid(&dataset, &alternative_partition)?;

    // Largest per-axis variance of the big cluster, measured from the data.
    let big_mean: f64 = dataset.points()[..n_big]
        .iter()
        .map(|p| p[0])
        .sum::<f64>()
        / n_big as f64;
    let v_d = dataset.points()[..n_big]
        .iter()
        .map(|p| {
            let dev = p[0] - big_mean;
            dev * dev
        })
        .sum::<f64>()
        / n_big as f64;

    Ok(CounterexampleReport {
        dataset,
        gap_partition,
        alternative_partition,
        q_gap,
        q_alt,
        v_d,
        x3_lower_bound: v_d / 3.0 / r,
        succeeded: q_alt < q_gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::dist;

    /// The Helmert-coordinate simplex must realize the requested edge length
    /// on every vertex pair.
    #[test]
    fn simplex_edges_are_exact() {
        for k in 2..=6 {
            let vertices = simplex_vertices(k, 7.5);
            for p in 0..k {
                for q in (p + 1)..k {
                    let d = dist(&vertices[p], &vertices[q]);
                    assert!(
                        (d - 7.5).abs() < 1e-12,
                        "simplex edge ({p},{q}) for k={k} was {d}"
                    );
                }
            }
        }
    }

    /// Random rotations must be orthogonal (they preserve all distances).
    #[test]
    fn rotations_are_orthogonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for dim in 2..=6 {
            let rot = random_rotation(dim, &mut rng);
            for i in 0..dim {
                for j in 0..dim {
                    let dot: f64 = rot[i].iter().zip(&rot[j]).map(|(a, b)| a * b).sum();
                    let expected = if i == j { 1.0 } else { 0.0 };
                    assert!(
                        (dot - expected).abs() < 1e-10,
                        "rotation rows {i},{j} dot product {dot}"
                    );
                }
            }
        }
    }
}
