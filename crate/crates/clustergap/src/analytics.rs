//! Closed-form seeding-success lower bounds and repetition calculators.
//!
//! Three regimes are covered, each giving a lower bound on the probability
//! `p_single` that one k-means++ seeding places exactly one seed in every
//! cluster (respectively, every cluster core):
//!
//! - **equal**: all clusters the same size — `p_seed_equal`;
//! - **unbalanced**: cluster sizes between `m` and `M` — `p_seed_unbalanced`;
//! - **core**: a `1−𝔭` cost fraction concentrated in cores — `p_seed_core`.
//!
//! [`required_repetitions`] then turns any single-run bound into the minimal
//! restart count `R` with overall success probability at least `Pr_succ`:
//! `R = ⌈log(1−Pr_succ) / log(1−p_single)⌉`, integrality made explicit and
//! minimality enforced directly on the defining inequality.
//!
//! Exact formula evaluations are primary everywhere; the exponential
//! approximation (`p_seed_unbalanced_approx`) and the asymptotic core bound
//! (`p_seed_core_limit`) are exposed for curve tables only and never feed
//! any decision.
//!
//! Cardinality arguments `n`, `m`, `M` are real-valued: the bounds are used
//! in illustrative regimes (e.g. `M = (n/k)·√20`) where the parameters are
//! analytic knobs rather than literal point counts.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default ceiling for [`repetition_plan`]: beyond a million restarts the
/// target is declared unreachable instead of looping for hours.
pub const DEFAULT_REPETITION_CAP: usize = 1_000_000;

// ─── validation helpers ─────────────────────────────────────────────────────

fn check_k(k: usize) -> Result<()> {
    if k < 2 {
        return Err(Error::TooFewClusters { k });
    }
    Ok(())
}

fn check_sizes(n: f64, m: f64, m_max: f64) -> Result<()> {
    // `M ≤ n` is deliberately not required: the published illustrative
    // regime M = (n/k)·√20 exceeds n while the formula stays well-defined.
    let ok = n.is_finite() && m.is_finite() && m_max.is_finite() && m >= 1.0 && m <= m_max && n >= m;
    if !ok {
        return Err(Error::InvalidParameter {
            name: "cardinalities",
            reason: format!("need 1 <= m <= M and n >= m, got n = {n}, m = {m}, M = {m_max}"),
        });
    }
    Ok(())
}

fn check_p_frak(p_frak: f64) -> Result<()> {
    if !p_frak.is_finite() || !(0.0..1.0).contains(&p_frak) {
        return Err(Error::InvalidProbability {
            name: "p_frak",
            value: p_frak,
        });
    }
    Ok(())
}

// ─── single-run seeding bounds ──────────────────────────────────────────────

/// Lower bound on the all-clusters-seeded probability when all `k` clusters
/// have equal cardinality:
///
/// ```text
/// p = ( k²(k+1)² / (k²(k+1)² + (k−1)) )^(k−1)
/// ```
///
/// Tends to 1 as `k` grows; already `36/37 ≈ 0.973` at `k = 2`.
///
/// # Errors
///
/// [`Error::TooFewClusters`] for `k < 2`.
pub fn p_seed_equal(k: usize) -> Result<f64> {
    check_k(k)?;
    let kf = k as f64;
    let a = kf * kf * (kf + 1.0) * (kf + 1.0);
    Ok((a / (a + (kf - 1.0))).powi(k as i32 - 1))
}

/// Lower bound on the all-clusters-seeded probability with cluster sizes
/// between `m` and `m_max` (the bound's `M`) out of `n` points total:
///
/// ```text
/// p = ( k²n(2 + n/m) / (k²n(2 + n/m) + (k−1)M) )^(k−1)
/// ```
///
/// Decreasing in `M`, increasing in `m`.
///
/// # Errors
///
/// [`Error::TooFewClusters`] for `k < 2`; [`Error::InvalidParameter`] unless
/// `1 ≤ m ≤ M` and `n ≥ m`.
pub fn p_seed_unbalanced(k: usize, n: f64, m: f64, m_max: f64) -> Result<f64> {
    check_k(k)?;
    check_sizes(n, m, m_max)?;
    let kf = k as f64;
    let a = kf * kf * n * (2.0 + n / m);
    Ok((a / (a + (kf - 1.0) * m_max)).powi(k as i32 - 1))
}

/// Exponential approximation of [`p_seed_unbalanced`] (curve display only):
///
/// ```text
/// p ≈ exp( −(k−1)²·M / (k²n(2 + n/m) + (k−1)M) )
/// ```
///
/// # Errors
///
/// Same domain checks as [`p_seed_unbalanced`].
pub fn p_seed_unbalanced_approx(k: usize, n: f64, m: f64, m_max: f64) -> Result<f64> {
    check_k(k)?;
    check_sizes(n, m, m_max)?;
    let kf = k as f64;
    let a = kf * kf * n * (2.0 + n / m);
    Ok((-(kf - 1.0) * (kf - 1.0) * m_max / (a + (kf - 1.0) * m_max)).exp())
}

/// Lower bound on the all-cores-seeded probability when every cluster keeps
/// a `1−p_frak` fraction of its cost inside its core:
///
/// ```text
/// p = ( k²(1−𝔭)(1+𝔭)n(2 + n/m) / (k²(1+𝔭)n(2 + n/m) + (k−1)M) )^(k−1)
/// ```
///
/// Collapses to [`p_seed_unbalanced`] at `𝔭 = 0` and converges to
/// [`p_seed_core_limit`] as `n/m` grows.
///
/// # Errors
///
/// Domain checks as in [`p_seed_unbalanced`], plus
/// [`Error::InvalidProbability`] unless `𝔭 ∈ [0, 1)`.
pub fn p_seed_core(k: usize, n: f64, m: f64, m_max: f64, p_frak: f64) -> Result<f64> {
    check_k(k)?;
    check_sizes(n, m, m_max)?;
    check_p_frak(p_frak)?;
    let kf = k as f64;
    let a = kf * kf * (1.0 + p_frak) * n * (2.0 + n / m);
    Ok(((1.0 - p_frak) * a / (a + (kf - 1.0) * m_max)).powi(k as i32 - 1))
}

/// Asymptotic core-seeding bound `(1−𝔭)^(k−1)`: the value
/// [`p_seed_core`] approaches for well-separated, size-dominated data, and
/// the quantity that drives the core-regime repetition count.
///
/// # Errors
///
/// [`Error::TooFewClusters`] for `k < 2`; [`Error::InvalidProbability`]
/// unless `𝔭 ∈ [0, 1)`.
pub fn p_seed_core_limit(k: usize, p_frak: f64) -> Result<f64> {
    check_k(k)?;
    check_p_frak(p_frak)?;
    Ok((1.0 - p_frak).powi(k as i32 - 1))
}

// ─── repetition counts ──────────────────────────────────────────────────────

/// Smallest integer `R` with `(1−p_single)^R < 1−pr_succ`, i.e. the number
/// of independent restarts needed to push overall success probability past
/// `pr_succ`. `p_single = 1` yields `R = 1`.
///
/// The closed form `⌈log(1−pr_succ)/log(1−p_single)⌉` seeds the search; the
/// returned value is then adjusted against the defining inequality directly,
/// so minimality holds in the same `f64` arithmetic callers can check.
///
/// # Errors
///
/// [`Error::UnsatisfiableTarget`] when `p_single = 0`;
/// [`Error::InvalidProbability`] when `p_single ∉ [0, 1]` or
/// `pr_succ ∉ (0, 1)`.
pub fn required_repetitions(p_single: f64, pr_succ: f64) -> Result<usize> {
    if !pr_succ.is_finite() || pr_succ <= 0.0 || pr_succ >= 1.0 {
        return Err(Error::InvalidProbability {
            name: "pr_succ",
            value: pr_succ,
        });
    }
    if !p_single.is_finite() || p_single < 0.0 || p_single > 1.0 {
        return Err(Error::InvalidProbability {
            name: "p_single",
            value: p_single,
        });
    }
    if p_single == 0.0 {
        return Err(Error::UnsatisfiableTarget);
    }
    if p_single == 1.0 {
        return Ok(1);
    }

    let fail_single = 1.0 - p_single;
    let fail_target = 1.0 - pr_succ;
    // ln(1−p) via ln_1p for accuracy when p is close to 0.
    let estimate = (fail_target.ln() / (-p_single).ln_1p()).ceil();
    let mut r = if estimate.is_finite() && estimate >= 1.0 {
        estimate as usize
    } else {
        1
    };
    // Repair any off-by-one from the float division against the definition.
    while fail_single.powf(r as f64) >= fail_target {
        r += 1;
    }
    while r > 1 && fail_single.powf((r - 1) as f64) < fail_target {
        r -= 1;
    }
    Ok(r)
}

/// A repetition count capped at a budget, with an explicit reachability flag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepetitionPlan {
    /// Restart count to use (the exact minimum, or the cap when unreachable).
    pub repetitions: usize,
    /// False when the exact minimum exceeded the cap — running `repetitions`
    /// restarts will *not* reach the requested success probability.
    pub target_reachable: bool,
}

/// Like [`required_repetitions`], but caps the answer at `cap` and flags the
/// target unreachable instead of returning an astronomically large count
/// (which a tiny `p_single` can produce).
///
/// # Errors
///
/// As [`required_repetitions`], plus [`Error::InvalidParameter`] for
/// `cap = 0`.
pub fn repetition_plan(p_single: f64, pr_succ: f64, cap: usize) -> Result<RepetitionPlan> {
    if cap == 0 {
        return Err(Error::InvalidParameter {
            name: "cap",
            reason: "repetition cap must be at least 1".into(),
        });
    }
    let exact = required_repetitions(p_single, pr_succ)?;
    Ok(if exact > cap {
        RepetitionPlan {
            repetitions: cap,
            target_reachable: false,
        }
    } else {
        RepetitionPlan {
            repetitions: exact,
            target_reachable: true,
        }
    })
}

// ─── assembled analysis ─────────────────────────────────────────────────────

/// Which seeding-bound regime a [`SeedingAnalysis`] was computed under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Equal,
    Unbalanced,
    Core,
}

/// One regime's seeding bound and restart plan, with all inputs echoed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedingAnalysis {
    pub regime: Regime,
    pub k: usize,
    /// Total point count (absent in the size-free equal regime).
    pub n: Option<f64>,
    /// Smallest cluster cardinality `m` (absent in the equal regime).
    pub min_cardinality: Option<f64>,
    /// Largest cluster cardinality `M` (absent in the equal regime).
    pub max_cardinality: Option<f64>,
    /// Straggler cost fraction `𝔭` (core regime only).
    pub p_frak: Option<f64>,
    /// Exact single-run success lower bound for the regime.
    pub p_single: f64,
    /// Companion curve value: the exponential approximation (unbalanced) or
    /// the `(1−𝔭)^(k−1)` asymptote (core). Absent in the equal regime.
    pub p_approx: Option<f64>,
    pub pr_succ_target: f64,
    /// Restart count from [`repetition_plan`] on `p_single`.
    pub repetitions: usize,
    pub target_reachable: bool,
}

impl SeedingAnalysis {
    /// Equal-size regime analysis.
    ///
    /// # Errors
    ///
    /// Domain checks of [`p_seed_equal`] and [`repetition_plan`].
    pub fn equal(k: usize, pr_succ: f64, cap: usize) -> Result<Self> {
        let p_single = p_seed_equal(k)?;
        let plan = repetition_plan(p_single, pr_succ, cap)?;
        Ok(Self {
            regime: Regime::Equal,
            k,
            n: None,
            min_cardinality: None,
            max_cardinality: None,
            p_frak: None,
            p_single,
            p_approx: None,
            pr_succ_target: pr_succ,
            repetitions: plan.repetitions,
            target_reachable: plan.target_reachable,
        })
    }

    /// Unbalanced-size regime analysis.
    ///
    /// # Errors
    ///
    /// Domain checks of [`p_seed_unbalanced`] and [`repetition_plan`].
    pub fn unbalanced(k: usize, n: f64, m: f64, m_max: f64, pr_succ: f64, cap: usize) -> Result<Self> {
        let p_single = p_seed_unbalanced(k, n, m, m_max)?;
        let plan = repetition_plan(p_single, pr_succ, cap)?;
        Ok(Self {
            regime: Regime::Unbalanced,
            k,
            n: Some(n),
            min_cardinality: Some(m),
            max_cardinality: Some(m_max),
            p_frak: None,
            p_single,
            p_approx: Some(p_seed_unbalanced_approx(k, n, m, m_max)?),
            pr_succ_target: pr_succ,
            repetitions: plan.repetitions,
            target_reachable: plan.target_reachable,
        })
    }

    /// Core regime analysis from the size-free `(1−𝔭)^(k−1)` asymptote
    /// alone — the restart planner to use when cluster sizes are not known
    /// ahead of clustering.
    ///
    /// # Errors
    ///
    /// Domain checks of [`p_seed_core_limit`] and [`repetition_plan`].
    pub fn core_limit(k: usize, p_frak: f64, pr_succ: f64, cap: usize) -> Result<Self> {
        let p_single = p_seed_core_limit(k, p_frak)?;
        let plan = repetition_plan(p_single, pr_succ, cap)?;
        Ok(Self {
            regime: Regime::Core,
            k,
            n: None,
            min_cardinality: None,
            max_cardinality: None,
            p_frak: Some(p_frak),
            p_single,
            p_approx: None,
            pr_succ_target: pr_succ,
            repetitions: plan.repetitions,
            target_reachable: plan.target_reachable,
        })
    }

    /// Core regime analysis.
    ///
    /// # Errors
    ///
    /// Domain checks of [`p_seed_core`] and [`repetition_plan`].
    pub fn core(
        k: usize,
        n: f64,
        m: f64,
        m_max: f64,
        p_frak: f64,
        pr_succ: f64,
        cap: usize,
    ) -> Result<Self> {
        let p_single = p_seed_core(k, n, m, m_max, p_frak)?;
        let plan = repetition_plan(p_single, pr_succ, cap)?;
        Ok(Self {
            regime: Regime::Core,
            k,
            n: Some(n),
            min_cardinality: Some(m),
            max_cardinality: Some(m_max),
            p_frak: Some(p_frak),
            p_single,
            p_approx: Some(p_seed_core_limit(k, p_frak)?),
            pr_succ_target: pr_succ,
            repetitions: plan.repetitions,
            target_reachable: plan.target_reachable,
        })
    }
}
