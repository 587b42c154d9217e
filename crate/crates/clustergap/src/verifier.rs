//! A-posteriori well-clusterability verification.
//!
//! Given a dataset and a partition, this module decides whether the measured
//! separation certifies the clustering as *well-clusterable*: separated
//! widely enough that the gap split is the global k-means optimum and
//! k-means++ finds it with quantifiable probability.
//!
//! Two modes:
//!
//! - **plain** — gaps between full enclosing balls must meet two bounds:
//!   a balanced-style bound `g ≥ r_max·√(k(M+n)/m)` and a pairwise bound
//!   `g ≥ k·r_max·√(n_p/2 + n_q/2 + n/2)·√(2n/(n_p·n_q))` maximized over all
//!   cluster pairs `p ≠ q`;
//! - **core** — each cluster is reduced to its *core* (the smallest centered
//!   ball keeping a `1−𝔭` fraction of the cluster's cost), gaps are measured
//!   between core balls, and the same bound shapes apply with core
//!   cardinalities, core radii, and a `(1+𝔭)/(1−𝔭)` inflation.
//!
//! Verdicts are strictly boolean on the printed inequalities — no hidden
//! slack. A user-supplied margin is a CLI concern, not a library one.
//!
//! [`check_core_preservation`] is the empirical form of the two-cluster
//! core theorem: reclustering around *any* pair of points drawn from the two
//! cores reproduces the original clusters in one assignment step.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{compute_stats, dist, dist_sq, gap_report, Dataset, Partition};

/// Relative tolerance for grouping floating-point-equal distances (core
/// membership ties) and for checking stated geometric preconditions.
const REL_TOL: f64 = 1e-9;

// ─── required-gap formulas ──────────────────────────────────────────────────

/// The separation a clustering must exhibit to be certified, with all
/// inputs echoed so a verdict is independently recomputable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapRequirement {
    /// Balanced-style bound: `r_max·√(k(M+n)/m)`, inflated by
    /// `√((1+𝔭)/(1−𝔭))` and maximized over per-cluster radii in core mode.
    pub g_balanced_bound: f64,
    /// Pairwise bound, maximized over all cluster pairs `p ≠ q`.
    pub g_pairwise_bound: f64,
    /// `max(g_balanced_bound, g_pairwise_bound)` — the certification bar.
    pub g_required: f64,
    pub k: usize,
    /// Total cardinality `n = Σ n_i` (core cardinalities in core mode).
    pub n: usize,
    /// Per-cluster cardinalities `n_i`.
    pub cardinalities: Vec<usize>,
    /// Per-cluster radii `r_i` (all equal to `r_max` in plain mode).
    pub radii: Vec<f64>,
    /// `M = max n_i`.
    pub max_cardinality: usize,
    /// `m = min n_i`.
    pub min_cardinality: usize,
    /// Straggler cost fraction — `None` in plain mode.
    pub p_frak: Option<f64>,
}

fn check_cluster_inputs(k: usize, cardinalities: &[usize]) -> Result<(f64, f64, f64)> {
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
    if cardinalities.contains(&0) {
        return Err(Error::InvalidParameter {
            name: "cardinalities",
            reason: "every cluster cardinality must be at least 1".into(),
        });
    }
    let n: usize = cardinalities.iter().sum();
    let m_max = *cardinalities.iter().max().expect("k >= 2");
    let m_min = *cardinalities.iter().min().expect("k >= 2");
    Ok((n as f64, m_max as f64, m_min as f64))
}

fn check_radius(name: &'static str, r: f64) -> Result<()> {
    if !r.is_finite() || r < 0.0 {
        return Err(Error::InvalidParameter {
            name,
            reason: format!("radius must be finite and nonnegative, got {r}"),
        });
    }
    Ok(())
}

/// Pairwise-bound term for one cluster pair, exactly as printed:
/// `k·r·√(n_p/2 + n_q/2 + n/2)·√(2n/(n_p·n_q))` — times `√inflation` in
/// core mode.
#[must_use]
pub fn pairwise_bound(k: usize, n: f64, n_p: f64, n_q: f64, r: f64, inflation: f64) -> f64 {
    k as f64 * r * (n_p / 2.0 + n_q / 2.0 + n / 2.0).sqrt() * (inflation * 2.0 * n / (n_p * n_q)).sqrt()
}

/// Algebraically equivalent restatement of [`pairwise_bound`]:
/// `k·r·√(n(n_p + n_q + n)/(n_p·n_q))` (times `√inflation`). Exposed so the
/// equality of the two printed forms is checkable; the two agree to within
/// floating-point rounding and the crate asserts as much in debug builds.
#[must_use]
pub fn pairwise_bound_restated(k: usize, n: f64, n_p: f64, n_q: f64, r: f64, inflation: f64) -> f64 {
    k as f64 * r * (inflation * n * (n_p + n_q + n) / (n_p * n_q)).sqrt()
}

fn checked_pair_bound(k: usize, n: f64, n_p: f64, n_q: f64, r: f64, inflation: f64) -> f64 {
    let printed = pairwise_bound(k, n, n_p, n_q, r, inflation);
    let restated = pairwise_bound_restated(k, n, n_p, n_q, r, inflation);
    debug_assert!(
        (printed - restated).abs() <= REL_TOL * printed.max(1.0),
        "pairwise bound forms diverged: {printed} vs {restated}"
    );
    printed
}

/// Required-gap computation for plain (full enclosing ball) verification.
///
/// With equal cardinalities the two bounds reduce to `r·√(k(k+1))` and
/// `r·k·√(2k + k²)` — the closed-form gap-over-radius curve in `k`.
///
/// # Errors
///
/// [`Error::TooFewClusters`] for `k < 2`; [`Error::LengthMismatch`] /
/// [`Error::InvalidParameter`] for malformed cardinalities or a negative
/// radius.
pub fn required_gap_plain(k: usize, cardinalities: &[usize], r_max: f64) -> Result<GapRequirement> {
    let (n, m_max, m_min) = check_cluster_inputs(k, cardinalities)?;
    check_radius("r_max", r_max)?;

    let g_balanced_bound = r_max * (k as f64 * (m_max + n) / m_min).sqrt();
    let mut g_pairwise_bound: f64 = 0.0;
    for p in 0..k {
        for q in (p + 1)..k {
            let bound = checked_pair_bound(
                k,
                n,
                cardinalities[p] as f64,
                cardinalities[q] as f64,
                r_max,
                1.0,
            );
            g_pairwise_bound = g_pairwise_bound.max(bound);
        }
    }
    Ok(GapRequirement {
        g_balanced_bound,
        g_pairwise_bound,
        g_required: g_balanced_bound.max(g_pairwise_bound),
        k,
        n: n as usize,
        cardinalities: cardinalities.to_vec(),
        radii: vec![r_max; k],
        max_cardinality: m_max as usize,
        min_cardinality: m_min as usize,
        p_frak: None,
    })
}

/// Required-gap computation for core-based verification.
///
/// `cardinalities` and `radii` describe the *cores* (`n` is their sum); both
/// bound shapes carry the `(1+𝔭)/(1−𝔭)` inflation:
///
/// - pairwise: `g ≥ k·√(n_p + n_q + n)·√(((1+𝔭)/(1−𝔭))·Σ_i n_i r_i²/(n_p·n_q))`,
///   maximized over pairs;
/// - per-cluster: `g ≥ r_i·√(k·((1+𝔭)/(1−𝔭))·(M+n)/m)`, maximized over `i`.
///
/// At `𝔭 = 0` with all radii equal this reduces exactly to
/// [`required_gap_plain`].
///
/// # Errors
///
/// As [`required_gap_plain`], plus [`Error::InvalidProbability`] unless
/// `𝔭 ∈ [0, 1)`.
pub fn required_gap_core(
    k: usize,
    cardinalities: &[usize],
    radii: &[f64],
    p_frak: f64,
) -> Result<GapRequirement> {
    let (n, m_max, m_min) = check_cluster_inputs(k, cardinalities)?;
    if radii.len() != k {
        return Err(Error::LengthMismatch {
            what: "radii",
            expected: k,
            found: radii.len(),
        });
    }
    for &r in radii {
        check_radius("radii", r)?;
    }
    if !p_frak.is_finite() || !(0.0..1.0).contains(&p_frak) {
        return Err(Error::InvalidProbability {
            name: "p_frak",
            value: p_frak,
        });
    }

    let inflation = (1.0 + p_frak) / (1.0 - p_frak);

    let g_balanced_bound = radii
        .iter()
        .map(|&r_i| r_i * (k as f64 * inflation * (m_max + n) / m_min).sqrt())
        .fold(0.0f64, f64::max);

    let weighted_radius_sq: f64 = cardinalities
        .iter()
        .zip(radii)
        .map(|(&n_i, &r_i)| n_i as f64 * r_i * r_i)
        .sum();
    let mut g_pairwise_bound: f64 = 0.0;
    for p in 0..k {
        for q in (p + 1)..k {
            let n_p = cardinalities[p] as f64;
            let n_q = cardinalities[q] as f64;
            let bound =
                k as f64 * (n_p + n_q + n).sqrt() * (inflation * weighted_radius_sq / (n_p * n_q)).sqrt();
            g_pairwise_bound = g_pairwise_bound.max(bound);
        }
    }
    Ok(GapRequirement {
        g_balanced_bound,
        g_pairwise_bound,
        g_required: g_balanced_bound.max(g_pairwise_bound),
        k,
        n: n as usize,
        cardinalities: cardinalities.to_vec(),
        radii: radii.to_vec(),
        max_cardinality: m_max as usize,
        min_cardinality: m_min as usize,
        p_frak: Some(p_frak),
    })
}

// ─── core extraction ────────────────────────────────────────────────────────

/// A cluster's core: the smallest centered ball retaining at least a `1−𝔭`
/// fraction of the cluster's cost contribution, cost always measured against
/// the *full-cluster* centroid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoreProfile {
    /// Dataset indices of the core members (ascending). Exactly the cluster
    /// members within `core_radius` of the cluster centroid.
    pub core_member_indices: Vec<usize>,
    /// Radius of the core ball (`≤` the cluster's enclosing radius).
    pub core_radius: f64,
    /// `core_member_indices.len()`.
    pub core_cardinality: usize,
    /// Retained cost fraction, `≥ 1 − p_frak`. A zero-cost cluster (all
    /// members coincident with the centroid) counts as fraction 1.
    pub achieved_fraction: f64,
    /// The requested straggler budget `𝔭`.
    pub p_frak: f64,
}

/// Extracts the core of one cluster: members are sorted by distance to the
/// full-cluster centroid and the shortest radius prefix whose summed squared
/// distances reach `(1−𝔭)·total` becomes the core. Members at the cutoff
/// distance (within 1e-9 relative) are included as a group, so the "exactly
/// those within `core_radius`" invariant survives floating point.
///
/// # Errors
///
/// [`Error::InvalidProbability`] unless `𝔭 ∈ [0, 1)`;
/// [`Error::ClusterIndexOutOfRange`] for a bad cluster index; partition
/// mismatches propagate from [`compute_stats`].
pub fn extract_core(
    dataset: &Dataset,
    partition: &Partition,
    cluster_index: usize,
    p_frak: f64,
) -> Result<CoreProfile> {
    if !p_frak.is_finite() || !(0.0..1.0).contains(&p_frak) {
        return Err(Error::InvalidProbability {
            name: "p_frak",
            value: p_frak,
        });
    }
    if cluster_index >= partition.k() {
        return Err(Error::ClusterIndexOutOfRange {
            index: cluster_index,
            k: partition.k(),
        });
    }
    let stats = compute_stats(dataset, partition)?;
    let centroid = &stats[cluster_index].centroid;

    let mut members: Vec<(usize, f64)> = partition
        .labels()
        .iter()
        .enumerate()
        .filter(|(_, &label)| label == cluster_index)
        .map(|(i, _)| (i, dist(dataset.point(i), centroid)))
        .collect();
    members.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));

    let total: f64 = members.iter().map(|(_, d)| d * d).sum();
    if total == 0.0 {
        // Zero-cost cluster: whole cluster is the core by convention.
        return Ok(CoreProfile {
            core_member_indices: members.iter().map(|(i, _)| *i).collect(),
            core_radius: 0.0,
            core_cardinality: members.len(),
            achieved_fraction: 1.0,
            p_frak,
        });
    }

    let target = (1.0 - p_frak) * total;
    let mut cum = 0.0;
    let mut cut = members.len() - 1;
    for (pos, (_, d)) in members.iter().enumerate() {
        cum += d * d;
        if cum >= target {
            cut = pos;
            break;
        }
    }
    // Absorb floating-point ties at the cutoff distance.
    let core_radius = members[cut].1;
    let threshold = core_radius * (1.0 + REL_TOL);
    while cut + 1 < members.len() && members[cut + 1].1 <= threshold {
        cut += 1;
        cum += members[cut].1 * members[cut].1;
    }

    let mut core_member_indices: Vec<usize> = members[..=cut].iter().map(|(i, _)| *i).collect();
    core_member_indices.sort_unstable();
    let achieved_fraction = cum / total;
    debug_assert!(achieved_fraction >= 1.0 - p_frak);
    Ok(CoreProfile {
        core_cardinality: core_member_indices.len(),
        core_member_indices,
        core_radius,
        achieved_fraction,
        p_frak,
    })
}

// ─── verdict assembly ───────────────────────────────────────────────────────

/// Which geometry a verdict was computed over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VerdictMode {
    /// Gaps between full enclosing balls.
    Plain,
    /// Gaps between core balls (centered at full-cluster centroids).
    Core,
}

/// Measured-vs-required detail for one cluster pair. The per-pair required
/// bound is diagnostic; the verdict itself compares the *minimum* measured
/// gap against the *global* requirement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairDetail {
    pub p: usize,
    pub q: usize,
    pub measured_gap: f64,
    pub required_bound: f64,
}

/// The outcome of a clusterability check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterabilityVerdict {
    pub mode: VerdictMode,
    /// Minimum measured surface gap (full balls in plain mode, core balls in
    /// core mode). Negative when balls overlap.
    pub measured_min_gap: f64,
    pub required_gap: GapRequirement,
    /// `measured_min_gap ≥ required_gap.g_required`.
    pub well_clusterable: bool,
    /// One row per cluster pair `p < q`.
    pub per_pair_detail: Vec<PairDetail>,
}

/// Runs the full a-posteriori check: measure gaps, compute required gaps,
/// compare.
///
/// Plain mode measures gaps between full enclosing balls and requires them
/// to meet [`required_gap_plain`] at the measured `r_max`. Core mode
/// extracts every cluster's core at `𝔭`, measures gaps between core balls
/// (core radii around full-cluster centroids), and requires them to meet
/// [`required_gap_core`] evaluated with core cardinalities and every radius
/// replaced by the largest core radius.
///
/// # Errors
///
/// Core mode without `p_frak` is an [`Error::InvalidParameter`];
/// [`Error::TooFewClusters`] for `k < 2`; everything else propagates.
pub fn verify(
    dataset: &Dataset,
    partition: &Partition,
    mode: VerdictMode,
    p_frak: Option<f64>,
) -> Result<ClusterabilityVerdict> {
    let k = partition.k();
    if k < 2 {
        return Err(Error::TooFewClusters { k });
    }
    let stats = compute_stats(dataset, partition)?;
    let cardinalities: Vec<usize> = stats.iter().map(|s| s.cardinality).collect();

    match mode {
        VerdictMode::Plain => {
            let gaps = gap_report(&stats)?;
            let r_max = stats
                .iter()
                .map(|s| s.enclosing_radius)
                .fold(0.0f64, f64::max);
            let required = required_gap_plain(k, &cardinalities, r_max)?;
            let detail = pair_details(k, &gaps.pair_gaps, |p, q| {
                required.g_balanced_bound.max(checked_pair_bound(
                    k,
                    required.n as f64,
                    cardinalities[p] as f64,
                    cardinalities[q] as f64,
                    r_max,
                    1.0,
                ))
            });
            Ok(ClusterabilityVerdict {
                mode,
                measured_min_gap: gaps.min_gap,
                well_clusterable: gaps.min_gap >= required.g_required,
                required_gap: required,
                per_pair_detail: detail,
            })
        }
        VerdictMode::Core => {
            let p_frak = p_frak.ok_or(Error::InvalidParameter {
                name: "p_frak",
                reason: "core mode requires a straggler fraction".into(),
            })?;
            let cores: Vec<CoreProfile> = (0..k)
                .map(|j| extract_core(dataset, partition, j, p_frak))
                .collect::<Result<_>>()?;
            let core_cardinalities: Vec<usize> = cores.iter().map(|c| c.core_cardinality).collect();
            let r_hat_max = cores.iter().map(|c| c.core_radius).fold(0.0f64, f64::max);
            // Radii enter the requirement replaced by their maximum.
            let required =
                required_gap_core(k, &core_cardinalities, &vec![r_hat_max; k], p_frak)?;

            let mut core_gaps = vec![vec![0.0; k]; k];
            let mut min_gap = f64::INFINITY;
            for p in 0..k {
                for q in (p + 1)..k {
                    let g = dist(&stats[p].centroid, &stats[q].centroid)
                        - cores[p].core_radius
                        - cores[q].core_radius;
                    core_gaps[p][q] = g;
                    core_gaps[q][p] = g;
                    min_gap = min_gap.min(g);
                }
            }
            let n = required.n as f64;
            let inflation = (1.0 + p_frak) / (1.0 - p_frak);
            let weighted_radius_sq: f64 = core_cardinalities
                .iter()
                .map(|&n_i| n_i as f64 * r_hat_max * r_hat_max)
                .sum();
            let detail = pair_details(k, &core_gaps, |p, q| {
                let n_p = core_cardinalities[p] as f64;
                let n_q = core_cardinalities[q] as f64;
                let pair = k as f64
                    * (n_p + n_q + n).sqrt()
                    * (inflation * weighted_radius_sq / (n_p * n_q)).sqrt();
                required.g_balanced_bound.max(pair)
            });
            Ok(ClusterabilityVerdict {
                mode,
                measured_min_gap: min_gap,
                well_clusterable: min_gap >= required.g_required,
                required_gap: required,
                per_pair_detail: detail,
            })
        }
    }
}

fn pair_details(
    k: usize,
    gaps: &[Vec<f64>],
    required: impl Fn(usize, usize) -> f64,
) -> Vec<PairDetail> {
    let mut detail = Vec::with_capacity(k * (k - 1) / 2);
    for p in 0..k {
        for q in (p + 1)..k {
            detail.push(PairDetail {
                p,
                q,
                measured_gap: gaps[p][q],
                required_bound: required(p, q),
            });
        }
    }
    detail
}

// ─── core preservation (two-cluster theorem, empirical form) ────────────────

/// Hypotheses of the two-cluster core-preservation theorem: clusters of
/// common enclosing radius `ρ` around centers `A`, `B` with
/// `‖A−B‖ = 2ρ + g` for some `g > 0`, and cores of radius `g/2` around each
/// center.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorePreservationConfig {
    pub center_a: Vec<f64>,
    pub center_b: Vec<f64>,
    /// Common enclosing radius of both clusters.
    pub rho: f64,
    /// Surface gap: `‖A−B‖ − 2ρ`.
    pub g: f64,
    /// Core ball radius, always `g/2`.
    pub core_radius: f64,
}

impl CorePreservationConfig {
    /// Builds a config, checking `‖A−B‖ = 2ρ + g` (to 1e-9 relative) and
    /// `g > 0`, `ρ ≥ 0`.
    ///
    /// # Errors
    ///
    /// [`Error::PreconditionViolated`] when the stated geometry does not
    /// hold; [`Error::DimensionMismatch`] for unequal center dimensions.
    pub fn new(center_a: Vec<f64>, center_b: Vec<f64>, rho: f64, g: f64) -> Result<Self> {
        if center_a.len() != center_b.len() {
            return Err(Error::DimensionMismatch {
                expected: center_a.len(),
                found: center_b.len(),
                index: 1,
            });
        }
        if !(rho.is_finite() && rho >= 0.0) || !(g.is_finite() && g > 0.0) {
            return Err(Error::PreconditionViolated {
                what: format!("need rho >= 0 and g > 0, got rho = {rho}, g = {g}"),
            });
        }
        let stated = 2.0 * rho + g;
        let actual = dist(&center_a, &center_b);
        if (actual - stated).abs() > REL_TOL * stated.max(1.0) {
            return Err(Error::PreconditionViolated {
                what: format!("center distance {actual} differs from 2*rho + g = {stated}"),
            });
        }
        Ok(Self {
            center_a,
            center_b,
            rho,
            g,
            core_radius: g / 2.0,
        })
    }
}

/// Empirical check of the core-preservation theorem: given clusters within
/// radius `ρ` of `A` and `B`, and substitute centers `X ∈ B(A, g/2)`,
/// `Y ∈ B(B, g/2)`, does one nearest-center assignment step around `{X, Y}`
/// send every A-point to `X` and every B-point to `Y`? (Distance ties go to
/// `X`, mirroring the engine's lowest-index rule.) The theorem says yes for
/// every admissible configuration; this function reports what the data says.
///
/// # Errors
///
/// [`Error::PreconditionViolated`] when any point strays outside its stated
/// ball or `X`/`Y` stray outside the cores (1e-9 relative slack);
/// [`Error::DimensionMismatch`] for inconsistent dimensions.
pub fn check_core_preservation(
    config: &CorePreservationConfig,
    cluster_a_points: &[Vec<f64>],
    cluster_b_points: &[Vec<f64>],
    x: &[f64],
    y: &[f64],
) -> Result<bool> {
    let dim = config.center_a.len();
    let check_dim = |v: &[f64], index: usize| -> Result<()> {
        if v.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: v.len(),
                index,
            });
        }
        Ok(())
    };
    check_dim(x, 0)?;
    check_dim(y, 1)?;

    let within = |point: &[f64], center: &[f64], radius: f64| -> bool {
        dist(point, center) <= radius * (1.0 + REL_TOL) + f64::EPSILON
    };
    for (which, points, center) in [
        ("A", cluster_a_points, &config.center_a),
        ("B", cluster_b_points, &config.center_b),
    ] {
        for (index, p) in points.iter().enumerate() {
            check_dim(p, index)?;
            if !within(p, center, config.rho) {
                return Err(Error::PreconditionViolated {
                    what: format!("cluster-{which} point {index} lies outside its radius-rho ball"),
                });
            }
        }
    }
    if !within(x, &config.center_a, config.core_radius) {
        return Err(Error::PreconditionViolated {
            what: "X lies outside A's core ball".into(),
        });
    }
    if !within(y, &config.center_b, config.core_radius) {
        return Err(Error::PreconditionViolated {
            what: "Y lies outside B's core ball".into(),
        });
    }

    let a_kept = cluster_a_points
        .iter()
        .all(|p| dist_sq(p, x) <= dist_sq(p, y));
    let b_kept = cluster_b_points
        .iter()
        .all(|p| dist_sq(p, y) < dist_sq(p, x));
    Ok(a_kept && b_kept)
}
