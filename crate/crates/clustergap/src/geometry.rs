//! Data model and exact geometric primitives.
//!
//! Houses datasets, partitions, per-cluster statistics, the k-means cost in
//! both of its classical forms, and surface gaps between cluster enclosing
//! balls. All distances are Euclidean and all coordinates are `f64`.
//!
//! The two cost forms are mathematically identical:
//!
//! ```text
//! Q(C) = Σ_j Σ_{x ∈ C_j} ‖x − μ_j‖²  =  Σ_j (1/n_j) Σ_{{x,y} ⊆ C_j} ‖x − y‖²
//! ```
//!
//! where the inner pair sum runs over *unordered* pairs — only that reading
//! satisfies the identity, and [`cost_pairwise`] implements it. The
//! equivalence is enforced by tests to 1e-9 relative tolerance.
//!
//! Every function here is pure; concurrent use needs no synchronization.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

// ─── distance primitives ────────────────────────────────────────────────────

/// Squared Euclidean distance between two equal-length coordinate slices.
#[must_use]
pub fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len(), "dimension mismatch in dist_sq");
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| {
            let d = x - y;
            d * d
        })
        .sum()
}

/// Euclidean distance between two equal-length coordinate slices.
#[must_use]
pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    dist_sq(a, b).sqrt()
}

// ─── Dataset ────────────────────────────────────────────────────────────────

/// An ordered collection of `n ≥ 1` points in `d`-dimensional Euclidean space.
///
/// Invariants (enforced at construction):
/// - every point has exactly `dim` coordinates,
/// - every coordinate is finite,
/// - `dim ≥ 1` and `n ≥ 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    points: Vec<Vec<f64>>,
    dim: usize,
}

impl Dataset {
    /// Builds a dataset from raw points, validating all invariants.
    ///
    /// # Errors
    ///
    /// [`Error::EmptyDataset`] for zero points, [`Error::DimensionMismatch`]
    /// for ragged rows, [`Error::NonFiniteCoordinate`] for NaN/inf values,
    /// and an [`Error::InvalidParameter`] for zero-dimensional points.
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        let Some(first) = points.first() else {
            return Err(Error::EmptyDataset);
        };
        let dim = first.len();
        if dim == 0 {
            return Err(Error::InvalidParameter {
                name: "dim",
                reason: "points must have at least one coordinate".into(),
            });
        }
        for (index, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: p.len(),
                    index,
                });
            }
            if p.iter().any(|c| !c.is_finite()) {
                return Err(Error::NonFiniteCoordinate { index });
            }
        }
        Ok(Self { points, dim })
    }

    /// Number of points `n`.
    #[must_use]
    pub fn n(&self) -> usize {
        self.points.len()
    }

    /// Spatial dimension `d`.
    #[must_use]
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Borrow one point's coordinates.
    #[must_use]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i]
    }

    /// Borrow all points.
    #[must_use]
    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    /// Parses a dataset from CSV text: one point per row, `d` numeric
    /// columns. A single leading header row is tolerated and skipped when its
    /// cells do not parse as numbers.
    pub fn from_csv_str(text: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let mut points = Vec::new();
        for (row, record) in reader.records().enumerate() {
            let record = record?;
            if record.iter().all(|f| f.is_empty()) {
                continue;
            }
            let parsed: std::result::Result<Vec<f64>, _> =
                record.iter().map(str::parse::<f64>).collect();
            match parsed {
                Ok(coords) => points.push(coords),
                // A parse failure on the very first row is an (optional) header.
                Err(e) if row == 0 && points.is_empty() => {
                    let _ = e;
                }
                Err(e) => {
                    return Err(Error::CsvFormat {
                        row,
                        message: e.to_string(),
                    });
                }
            }
        }
        Self::new(points)
    }

    /// Renders the dataset as header-less CSV with round-trip-exact floats.
    #[must_use]
    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        for p in &self.points {
            for (j, c) in p.iter().enumerate() {
                if j > 0 {
                    out.push(',');
                }
                let _ = write!(out, "{c}");
            }
            out.push('\n');
        }
        out
    }

    /// Reads a dataset CSV file. See [`Dataset::from_csv_str`] for the format.
    pub fn read_csv(path: &Path) -> Result<Self> {
        Self::from_csv_str(&std::fs::read_to_string(path)?)
    }

    /// Writes the dataset as CSV. See [`Dataset::to_csv_string`].
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        Ok(std::fs::write(path, self.to_csv_string())?)
    }
}

// ─── Partition ──────────────────────────────────────────────────────────────

/// An assignment of each point to one of `k` clusters.
///
/// Invariants (enforced at construction):
/// - every label lies in `[0, k)`,
/// - every cluster index in `[0, k)` has at least one member,
/// - the label vector is non-empty.
///
/// `k` is authoritative: a label vector that never uses some index in
/// `[0, k)` is rejected rather than silently reinterpreted with a smaller `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    labels: Vec<usize>,
    k: usize,
}

impl Partition {
    /// Builds a partition from labels, validating all invariants.
    ///
    /// # Errors
    ///
    /// [`Error::LabelOutOfRange`] for labels `≥ k`, [`Error::EmptyCluster`]
    /// for unused cluster indices, and [`Error::InvalidParameter`] for an
    /// empty label vector or `k = 0`.
    pub fn new(labels: Vec<usize>, k: usize) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::InvalidParameter {
                name: "labels",
                reason: "label vector is empty".into(),
            });
        }
        if k == 0 {
            return Err(Error::InvalidParameter {
                name: "k",
                reason: "k must be at least 1".into(),
            });
        }
        let mut seen = vec![false; k];
        for (index, &label) in labels.iter().enumerate() {
            if label >= k {
                return Err(Error::LabelOutOfRange { index, label, k });
            }
            seen[label] = true;
        }
        if let Some(cluster) = seen.iter().position(|s| !s) {
            return Err(Error::EmptyCluster { cluster });
        }
        Ok(Self { labels, k })
    }

    /// Number of clusters `k`.
    #[must_use]
    pub fn k(&self) -> usize {
        self.k
    }

    /// Per-point cluster labels.
    #[must_use]
    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Number of labeled points.
    #[must_use]
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    /// Always false — construction rejects empty label vectors.
    #[must_use]
    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Point indices of each cluster, indexed by cluster label.
    #[must_use]
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut members = vec![Vec::new(); self.k];
        for (i, &label) in self.labels.iter().enumerate() {
            members[label].push(i);
        }
        members
    }

    /// True when `other` is the same grouping under some relabeling of
    /// cluster indices (the natural notion of equality for unlabeled
    /// clusterings).
    #[must_use]
    pub fn is_relabeling_of(&self, other: &Partition) -> bool {
        if self.labels.len() != other.labels.len() || self.k != other.k {
            return false;
        }
        let mut fwd = vec![usize::MAX; self.k];
        let mut bwd = vec![usize::MAX; self.k];
        for (&a, &b) in self.labels.iter().zip(other.labels.iter()) {
            if fwd[a] == usize::MAX {
                fwd[a] = b;
            } else if fwd[a] != b {
                return false;
            }
            if bwd[b] == usize::MAX {
                bwd[b] = a;
            } else if bwd[b] != a {
                return false;
            }
        }
        true
    }

    /// Parses a partition from CSV text: one integer label per row. A
    /// non-numeric first row is treated as a header and skipped. `k` is
    /// taken to be `max(label) + 1`.
    pub fn from_csv_str(text: &str) -> Result<Self> {
        let mut labels = Vec::new();
        for (row, line) in text.lines().enumerate() {
            let cell = line.trim();
            if cell.is_empty() {
                continue;
            }
            match cell.parse::<usize>() {
                Ok(label) => labels.push(label),
                Err(_) if row == 0 && labels.is_empty() => {}
                Err(e) => {
                    return Err(Error::CsvFormat {
                        row,
                        message: e.to_string(),
                    });
                }
            }
        }
        let k = labels.iter().max().map_or(0, |m| m + 1);
        Self::new(labels, k)
    }

    /// Renders the partition as a header-less single-column CSV.
    #[must_use]
    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        for label in &self.labels {
            let _ = writeln!(out, "{label}");
        }
        out
    }

    /// Reads a partition CSV file. See [`Partition::from_csv_str`].
    pub fn read_csv(path: &Path) -> Result<Self> {
        Self::from_csv_str(&std::fs::read_to_string(path)?)
    }

    /// Writes the partition as CSV. See [`Partition::to_csv_string`].
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        Ok(std::fs::write(path, self.to_csv_string())?)
    }

    /// Validates this partition against a dataset (matching lengths).
    pub(crate) fn check_against(&self, dataset: &Dataset) -> Result<()> {
        if self.labels.len() != dataset.n() {
            return Err(Error::LabelCountMismatch {
                labels: self.labels.len(),
                points: dataset.n(),
            });
        }
        Ok(())
    }
}

// ─── per-cluster statistics ─────────────────────────────────────────────────

/// Summary of a single cluster: centroid `μ_j`, cardinality `n_j`, enclosing
/// radius `r_j` (max member distance from the centroid — deliberately *not* a
/// minimum enclosing ball), and variance (mean squared member distance from
/// the centroid).
///
/// Invariants: `variance ≤ enclosing_radius²`, and a singleton cluster has
/// radius and variance zero.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterStats {
    /// Arithmetic mean of the cluster's members.
    pub centroid: Vec<f64>,
    /// Number of members `n_j ≥ 1`.
    pub cardinality: usize,
    /// Max distance from the centroid to a member.
    pub enclosing_radius: f64,
    /// Mean squared distance from the centroid to the members.
    pub variance: f64,
}

/// Computes one [`ClusterStats`] per cluster index.
///
/// # Errors
///
/// [`Error::LabelCountMismatch`] when the partition does not line up with
/// the dataset. (Empty clusters are impossible: [`Partition`] rejects them
/// at construction.)
pub fn compute_stats(dataset: &Dataset, partition: &Partition) -> Result<Vec<ClusterStats>> {
    partition.check_against(dataset)?;
    let k = partition.k();
    let dim = dataset.dim();

    let mut sums = vec![vec![0.0; dim]; k];
    let mut counts = vec![0usize; k];
    for (i, &label) in partition.labels().iter().enumerate() {
        counts[label] += 1;
        for (s, c) in sums[label].iter_mut().zip(dataset.point(i)) {
            *s += c;
        }
    }

    let mut stats: Vec<ClusterStats> = sums
        .into_iter()
        .zip(&counts)
        .map(|(sum, &count)| ClusterStats {
            centroid: sum.into_iter().map(|s| s / count as f64).collect(),
            cardinality: count,
            enclosing_radius: 0.0,
            variance: 0.0,
        })
        .collect();

    let mut sq_sums = vec![0.0; k];
    for (i, &label) in partition.labels().iter().enumerate() {
        let d2 = dist_sq(dataset.point(i), &stats[label].centroid);
        sq_sums[label] += d2;
        let d = d2.sqrt();
        if d > stats[label].enclosing_radius {
            stats[label].enclosing_radius = d;
        }
    }
    for (stat, sq) in stats.iter_mut().zip(sq_sums) {
        stat.variance = sq / stat.cardinality as f64;
    }
    Ok(stats)
}

// ─── k-means cost, both forms ───────────────────────────────────────────────

/// k-means cost in centroid form: `Σ_j Σ_{x ∈ C_j} ‖x − μ_j‖²`.
///
/// # Errors
///
/// Propagates partition/dataset mismatches from [`compute_stats`].
pub fn cost_centroid(dataset: &Dataset, partition: &Partition) -> Result<f64> {
    let stats = compute_stats(dataset, partition)?;
    let mut total = 0.0;
    for (i, &label) in partition.labels().iter().enumerate() {
        total += dist_sq(dataset.point(i), &stats[label].centroid);
    }
    Ok(total)
}

/// k-means cost in normalized pairwise form:
/// `Σ_j (1/n_j) Σ_{{x,y} ⊆ C_j} ‖x − y‖²`, the inner sum over *unordered*
/// member pairs.
///
/// Equals [`cost_centroid`] on the same input to within 1e-9 relative
/// tolerance (an identity, tested property).
///
/// # Errors
///
/// [`Error::LabelCountMismatch`] when the partition does not line up with
/// the dataset.
pub fn cost_pairwise(dataset: &Dataset, partition: &Partition) -> Result<f64> {
    partition.check_against(dataset)?;
    let mut total = 0.0;
    for indices in partition.members() {
        let mut pair_sum = 0.0;
        for (a, &i) in indices.iter().enumerate() {
            for &l in &indices[a + 1..] {
                pair_sum += dist_sq(dataset.point(i), dataset.point(l));
            }
        }
        total += pair_sum / indices.len() as f64;
    }
    Ok(total)
}

// ─── inter-cluster gaps ─────────────────────────────────────────────────────

/// Surface gaps between cluster enclosing balls.
///
/// `pair_gaps[p][q] = ‖μ_p − μ_q‖ − r_p − r_q` for `p ≠ q`; negative entries
/// mean the enclosing balls overlap. The matrix is symmetric; diagonal
/// entries are stored as `0.0` but carry no meaning and are excluded from
/// `min_gap`.
#[derive(Debug, Clone, PartialEq)]
pub struct GapReport {
    /// Symmetric `k × k` matrix of surface gaps (diagonal meaningless).
    pub pair_gaps: Vec<Vec<f64>>,
    /// Minimum off-diagonal gap.
    pub min_gap: f64,
}

/// Computes the [`GapReport`] for a set of per-cluster statistics.
///
/// # Errors
///
/// [`Error::TooFewClusters`] when fewer than 2 clusters are supplied.
pub fn gap_report(stats: &[ClusterStats]) -> Result<GapReport> {
    let k = stats.len();
    if k < 2 {
        return Err(Error::TooFewClusters { k });
    }
    let mut pair_gaps = vec![vec![0.0; k]; k];
    let mut min_gap = f64::INFINITY;
    for p in 0..k {
        for q in (p + 1)..k {
            let g = dist(&stats[p].centroid, &stats[q].centroid)
                - stats[p].enclosing_radius
                - stats[q].enclosing_radius;
            pair_gaps[p][q] = g;
            pair_gaps[q][p] = g;
            if g < min_gap {
                min_gap = g;
            }
        }
    }
    Ok(GapReport { pair_gaps, min_gap })
}
