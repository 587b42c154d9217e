//! Brute-force ground truth for tiny instances.
//!
//! [`brute_force_optimal`] enumerates every partition of `n` points into
//! exactly `k` unlabeled clusters and returns a global k-means minimum. The
//! enumeration walks restricted growth strings (the canonical encodings of
//! set partitions: `a_0 = 0`, `a_i ≤ max(a_0..a_{i-1}) + 1`), which visits
//! each unlabeled partition exactly once — Stirling-number many leaves, not
//! `k^n`. Per-cluster cost is maintained incrementally on the way down and
//! restored on backtrack from save stacks (bitwise-exact undo: delta
//! arithmetic like `x += c; x -= c` would accumulate rounding drift over
//! millions of nodes), so a leaf costs `O(d + k)` to evaluate.
//!
//! The point of this module is validation: it certifies at desk scale that
//! planted gap splits really are global optima and that the unbalanced
//! counterexample's gap split really is not.

use crate::error::{Error, Result};
use crate::geometry::{cost_centroid, Dataset, Partition};

/// Default refusal threshold for [`brute_force_optimal`]. Bell(14) ≈ 1.9e8
/// is the edge of patience for an exhaustive scan.
pub const DEFAULT_ORACLE_MAX_N: usize = 14;

/// Result of an exhaustive optimal-partition search.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    /// A minimum-cost partition; among cost ties, the one whose restricted
    /// growth string is lexicographically smallest.
    pub best_partition: Partition,
    /// Exact cost of `best_partition` (recomputed via [`cost_centroid`]).
    pub best_cost: f64,
    /// Number of exactly-`k`-cluster partitions evaluated.
    pub partitions_examined: u64,
}

/// Exhaustively searches all partitions of the dataset into exactly `k`
/// clusters and returns the global k-means minimum.
///
/// `max_n` guards against accidental astronomically-sized enumerations;
/// pass [`DEFAULT_ORACLE_MAX_N`] unless a larger scan is intended.
///
/// # Errors
///
/// [`Error::OracleTooLarge`] when `n > max_n`, [`Error::InvalidK`] when
/// `k = 0` or `k > n`.
pub fn brute_force_optimal(dataset: &Dataset, k: usize, max_n: usize) -> Result<OracleResult> {
    let n = dataset.n();
    if n > max_n {
        return Err(Error::OracleTooLarge { n, max_n });
    }
    if k == 0 || k > n {
        return Err(Error::InvalidK { k, n });
    }

    let mut search = Search::new(dataset, k);
    search.recurse(0, 0);

    let best_partition = Partition::new(search.best_labels, k)?;
    let best_cost = cost_centroid(dataset, &best_partition)?;
    Ok(OracleResult {
        best_partition,
        best_cost,
        partitions_examined: search.examined,
    })
}

/// Depth-first walk over restricted growth strings with incremental
/// per-block cost bookkeeping.
struct Search<'a> {
    dataset: &'a Dataset,
    k: usize,
    n: usize,
    dim: usize,
    labels: Vec<usize>,
    counts: Vec<usize>,
    /// Per-block coordinate sums.
    sums: Vec<Vec<f64>>,
    /// Per-block sums of squared point norms.
    sq_norms: Vec<f64>,
    /// Per-block cost: `Σ‖x‖² − ‖Σx‖²/count`.
    block_costs: Vec<f64>,
    /// LIFO save stack of `(block_cost, sq_norm)` pairs for exact undo.
    saved_scalars: Vec<(f64, f64)>,
    /// LIFO save stack of pre-add block sums, `dim` values per frame.
    saved_sums: Vec<f64>,
    examined: u64,
    best_cost: f64,
    best_labels: Vec<usize>,
}

impl<'a> Search<'a> {
    fn new(dataset: &'a Dataset, k: usize) -> Self {
        let n = dataset.n();
        let dim = dataset.dim();
        Search {
            dataset,
            k,
            n,
            dim,
            labels: vec![0; n],
            counts: vec![0; k],
            sums: vec![vec![0.0; dim]; k],
            sq_norms: vec![0.0; k],
            block_costs: vec![0.0; k],
            saved_scalars: Vec::with_capacity(n),
            saved_sums: Vec::with_capacity(n * dim),
            examined: 0,
            best_cost: f64::INFINITY,
            best_labels: Vec::new(),
        }
    }

    fn recurse(&mut self, i: usize, used_blocks: usize) {
        if i == self.n {
            if used_blocks == self.k {
                self.examined += 1;
                let total: f64 = self.block_costs.iter().sum();
                // Strict `<` keeps the first (lexicographically smallest)
                // minimizer, since blocks are tried in ascending order.
                if total < self.best_cost {
                    self.best_cost = total;
                    self.best_labels = self.labels.clone();
                }
            }
            return;
        }
        // Prune: the remaining points must suffice to open the missing blocks.
        if used_blocks + (self.n - i) < self.k {
            return;
        }
        // Restricted growth: reuse any open block, or open the next one.
        let limit = if used_blocks < self.k {
            used_blocks
        } else {
            used_blocks - 1
        };
        for b in 0..=limit {
            self.add(i, b);
            self.labels[i] = b;
            let opened = usize::from(b == used_blocks);
            self.recurse(i + 1, used_blocks + opened);
            self.remove(b);
        }
    }

    /// Adds point `i` to block `b`, saving the block's prior state.
    fn add(&mut self, i: usize, b: usize) {
        let point = self.dataset.point(i);
        self.saved_scalars.push((self.block_costs[b], self.sq_norms[b]));
        self.saved_sums.extend_from_slice(&self.sums[b]);
        self.counts[b] += 1;
        let mut norm_sq = 0.0;
        let mut sum_sq = 0.0;
        for (s, &c) in self.sums[b].iter_mut().zip(point) {
            *s += c;
            norm_sq += c * c;
            sum_sq += *s * *s;
        }
        self.sq_norms[b] += norm_sq;
        self.block_costs[b] = self.sq_norms[b] - sum_sq / self.counts[b] as f64;
    }

    /// Bitwise-exactly reverses the matching [`Search::add`] call.
    fn remove(&mut self, b: usize) {
        self.counts[b] -= 1;
        let start = self.saved_sums.len() - self.dim;
        self.sums[b].copy_from_slice(&self.saved_sums[start..]);
        self.saved_sums.truncate(start);
        let (cost, sq_norm) = self
            .saved_scalars
            .pop()
            .expect("remove() is only called after a matching add()");
        self.block_costs[b] = cost;
        self.sq_norms[b] = sq_norm;
    }
}
