//! Command-line front end: reproducible generate / cluster / verify /
//! analyze / histogram runs.
//!
//! Every command takes an `--out-dir`, writes its artifacts there (CSV for
//! data, JSON for structured reports), and finishes by writing a
//! `manifest.json` recording the command, all parameters, the RNG seed, and
//! the input/output paths. `replay --manifest <file> --out-dir <dir>`
//! re-executes a recorded run; because all randomness is seeded and all
//! writers are deterministic, the replayed artifacts are byte-identical
//! (the manifest itself differs only in its wall-time field).
//!
//! Exit codes are a stable contract: `0` success (and verification pass),
//! `1` usage or runtime error, `2` verification fail. Note that `clap`'s
//! default usage-error exit code of 2 would collide with the
//! verification-fail code, so `main` maps parse errors to 1 explicitly.

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::analytics::{
    p_seed_core_limit, p_seed_equal, p_seed_unbalanced, p_seed_unbalanced_approx,
    repetition_plan, Regime, SeedingAnalysis, DEFAULT_REPETITION_CAP,
};
use crate::error::{Error, Result};
use crate::generators::{
    distance_histogram, gen_core_clusterable, gen_ring, gen_unbalanced_counterexample,
    gen_well_clusterable,
};
use crate::geometry::{Dataset, Partition};
use crate::verifier::{verify, VerdictMode};

/// Version stamp on every JSON document this tool writes.
pub const SCHEMA_VERSION: u32 = 1;

// ─── command-line grammar ───────────────────────────────────────────────────

#[derive(Debug, Parser)]
#[command(
    name = "clustergap",
    version,
    about = "k-means/k-means++ with a-posteriori well-clusterability verification"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic dataset with known ground truth.
    Generate {
        #[command(subcommand)]
        kind: GenerateKind,
    },
    /// Cluster a dataset CSV with restarted k-means++ / Lloyd.
    Cluster {
        /// Dataset CSV (one point per row, numeric columns).
        #[arg(long)]
        data: String,
        /// Number of clusters.
        #[arg(long)]
        k: usize,
        /// Fixed number of restarts (default 1).
        #[arg(long, conflicts_with = "auto_reps")]
        reps: Option<usize>,
        /// Derive the restart count from the seeding bounds instead.
        #[arg(long)]
        auto_reps: bool,
        /// Overall success probability targeted by --auto-reps.
        #[arg(long, default_value_t = 0.95)]
        pr_succ: f64,
        /// Smallest planted cardinality m (with --max-size: unbalanced bound).
        #[arg(long)]
        min_size: Option<f64>,
        /// Largest planted cardinality M (with --min-size: unbalanced bound).
        #[arg(long)]
        max_size: Option<f64>,
        /// Straggler cost fraction 𝔭 (selects the core-regime bound).
        #[arg(long)]
        p_frak: Option<f64>,
        /// Ceiling on the derived restart count.
        #[arg(long, default_value_t = DEFAULT_REPETITION_CAP)]
        cap: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_name = "DIR")]
        out_dir: PathBuf,
    },
    /// Check a (dataset, partition) pair for well-clusterability.
    Verify {
        /// Dataset CSV.
        #[arg(long)]
        data: String,
        /// Partition CSV (one integer label per row).
        #[arg(long)]
        labels: String,
        /// Gap semantics: full enclosing balls or cores.
        #[arg(long, value_enum)]
        mode: ModeArg,
        /// Straggler cost fraction 𝔭 (required in core mode).
        #[arg(long)]
        p_frak: Option<f64>,
        /// Extra safety factor: pass requires measured ≥ margin × required.
        #[arg(long, default_value_t = 1.0)]
        margin: f64,
        #[arg(long, value_name = "DIR")]
        out_dir: PathBuf,
    },
    /// Tabulate seeding bounds, gap requirements, and restart counts.
    Analyze {
        #[arg(long, value_enum)]
        regime: RegimeArg,
        /// Smallest k in the sweep (equal/unbalanced regimes).
        #[arg(long, default_value_t = 2)]
        k_min: usize,
        /// Largest k in the sweep (equal/unbalanced regimes).
        #[arg(long, default_value_t = 30)]
        k_max: usize,
        /// Total point count n (unbalanced regime).
        #[arg(long, default_value_t = 1000.0)]
        n: f64,
        /// Cardinality ratio M/m; M = (n/k)√ratio, m = (n/k)/√ratio.
        #[arg(long, default_value_t = 20.0)]
        imbalance: f64,
        /// Fixed k for the core-regime 𝔭 sweep.
        #[arg(long, default_value_t = 5)]
        k: usize,
        /// Core regime sweeps 𝔭 from 0 to this value…
        #[arg(long, default_value_t = 0.5)]
        p_frak_max: f64,
        /// …in steps of this size.
        #[arg(long, default_value_t = 0.05)]
        p_frak_step: f64,
        /// Overall success probability the restart column targets.
        #[arg(long, default_value_t = 0.95)]
        pr_succ: f64,
        /// Ceiling on the restart column.
        #[arg(long, default_value_t = DEFAULT_REPETITION_CAP)]
        cap: usize,
        #[arg(long, value_name = "DIR")]
        out_dir: PathBuf,
    },
    /// Histogram of all pairwise distances of a dataset CSV.
    Histogram {
        #[arg(long)]
        data: String,
        #[arg(long, default_value_t = 50)]
        bins: usize,
        #[arg(long, value_name = "DIR")]
        out_dir: PathBuf,
    },
    /// Re-execute a recorded manifest into a fresh output directory.
    Replay {
        /// Path to a manifest.json written by a previous run.
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long, value_name = "DIR")]
        out_dir: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
pub enum GenerateKind {
    /// Well-separated ball clusters meeting the plain gap requirement.
    Plain {
        #[arg(long)]
        k: usize,
        /// Per-cluster point counts, comma separated (k values).
        #[arg(long, value_delimiter = ',', value_name = "N1,N2,...")]
        sizes: Vec<usize>,
        /// Shared cluster radius.
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        /// Safety factor on the required gap (≥ 1).
        #[arg(long, default_value_t = 1.0)]
        margin: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_name = "DIR")]
        out_dir: PathBuf,
    },
    /// Clusters with planted cores plus stragglers, meeting the core gap
    /// requirement at the given 𝔭.
    Core {
        #[arg(long)]
        k: usize,
        /// Per-cluster core point counts, comma separated (k values).
        #[arg(long, value_delimiter = ',', value_name = "N1,N2,...")]
        sizes: Vec<usize>,
        /// Shared core radius.
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        /// Straggler cost fraction 𝔭 ∈ (0, 1).
        #[arg(long)]
        p_frak: f64,
        /// Safety factor on the required gap (≥ 1).
        #[arg(long, default_value_t = 1.0)]
        margin: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_name = "DIR")]
        out_dir: PathBuf,
    },
    /// Thin annulus with no cluster structure (histogram false positive).
    Ring {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        #[arg(long, default_value_t = 0.05)]
        thickness: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_name = "DIR")]
        out_dir: PathBuf,
    },
    /// Unbalanced two-cluster instance where a huge gap is not optimal.
    Counterexample {
        /// Big-cluster radius.
        #[arg(long, default_value_t = 1.0)]
        r: f64,
        /// Surface gap as a multiple of r.
        #[arg(long, default_value_t = 9.0)]
        gap_multiple: f64,
        #[arg(long, default_value_t = 1000)]
        n_big: usize,
        #[arg(long, default_value_t = 2)]
        n_small: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_name = "DIR")]
        out_dir: PathBuf,
    },
}

/// CLI spelling of [`VerdictMode`].
#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    Plain,
    Core,
}

impl From<ModeArg> for VerdictMode {
    fn from(mode: ModeArg) -> Self {
        match mode {
            ModeArg::Plain => VerdictMode::Plain,
            ModeArg::Core => VerdictMode::Core,
        }
    }
}

/// CLI spelling of [`Regime`].
#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum RegimeArg {
    Equal,
    Unbalanced,
    Core,
}

impl From<RegimeArg> for Regime {
    fn from(regime: RegimeArg) -> Self {
        match regime {
            RegimeArg::Equal => Regime::Equal,
            RegimeArg::Unbalanced => Regime::Unbalanced,
            RegimeArg::Core => Regime::Core,
        }
    }
}

// ─── replayable parameter records ───────────────────────────────────────────

/// Everything needed to re-execute a command, exactly as recorded in the
/// manifest. The output directory is deliberately *not* part of the record —
/// replay supplies its own.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum CommandParams {
    GeneratePlain {
        k: usize,
        sizes: Vec<usize>,
        radius: f64,
        dim: usize,
        margin: f64,
        seed: u64,
    },
    GenerateCore {
        k: usize,
        sizes: Vec<usize>,
        radius: f64,
        dim: usize,
        p_frak: f64,
        margin: f64,
        seed: u64,
    },
    GenerateRing {
        n: usize,
        radius: f64,
        thickness: f64,
        seed: u64,
    },
    GenerateCounterexample {
        r: f64,
        gap_multiple: f64,
        n_big: usize,
        n_small: usize,
        seed: u64,
    },
    Cluster {
        data: String,
        k: usize,
        reps: Option<usize>,
        auto_reps: bool,
        pr_succ: f64,
        min_size: Option<f64>,
        max_size: Option<f64>,
        p_frak: Option<f64>,
        cap: usize,
        seed: u64,
    },
    Verify {
        data: String,
        labels: String,
        mode: VerdictMode,
        p_frak: Option<f64>,
        margin: f64,
    },
    Analyze {
        regime: Regime,
        k_min: usize,
        k_max: usize,
        n: f64,
        imbalance: f64,
        k: usize,
        p_frak_max: f64,
        p_frak_step: f64,
        pr_succ: f64,
        cap: usize,
    },
    Histogram {
        data: String,
        bins: usize,
    },
}

impl CommandParams {
    /// The manifest's `command` field (same string as the serde tag).
    #[must_use]
    pub fn name(&self) -> &'static str {
        match self {
            CommandParams::GeneratePlain { .. } => "generate-plain",
            CommandParams::GenerateCore { .. } => "generate-core",
            CommandParams::GenerateRing { .. } => "generate-ring",
            CommandParams::GenerateCounterexample { .. } => "generate-counterexample",
            CommandParams::Cluster { .. } => "cluster",
            CommandParams::Verify { .. } => "verify",
            CommandParams::Analyze { .. } => "analyze",
            CommandParams::Histogram { .. } => "histogram",
        }
    }

    /// The RNG seed driving the command, when it consumes randomness.
    #[must_use]
    pub fn rng_seed(&self) -> Option<u64> {
        match *self {
            CommandParams::GeneratePlain { seed, .. }
            | CommandParams::GenerateCore { seed, .. }
            | CommandParams::GenerateRing { seed, .. }
            | CommandParams::GenerateCounterexample { seed, .. }
            | CommandParams::Cluster { seed, .. } => Some(seed),
            CommandParams::Verify { .. }
            | CommandParams::Analyze { .. }
            | CommandParams::Histogram { .. } => None,
        }
    }
}

/// The reproducibility record written beside every command's outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub tool_version: String,
    pub command: String,
    pub params: CommandParams,
    pub rng_seed: Option<u64>,
    /// Input paths exactly as given on the command line.
    pub inputs: Vec<String>,
    /// Output file names relative to the run's output directory.
    pub outputs: Vec<String>,
    /// Informational only — the one field that differs between a run and
    /// its replay.
    pub wall_time_ms: u128,
}

// ─── entry point ────────────────────────────────────────────────────────────

/// Executes a parsed command line and returns the process exit code.
///
/// # Errors
///
/// Any validation, I/O, or serialization error from the underlying command;
/// `main` maps these to exit code 1.
pub fn run(cli: Cli) -> Result<i32> {
    let (params, out_dir) = match cli.command {
        Command::Replay { manifest, out_dir } => {
            let text = std::fs::read_to_string(&manifest)?;
            let recorded: RunManifest = serde_json::from_str(&text)?;
            (recorded.params, out_dir)
        }
        other => into_params(other),
    };
    execute(&params, &out_dir)
}

fn into_params(command: Command) -> (CommandParams, PathBuf) {
    match command {
        Command::Generate { kind } => match kind {
            GenerateKind::Plain {
                k,
                sizes,
                radius,
                dim,
                margin,
                seed,
                out_dir,
            } => (
                CommandParams::GeneratePlain {
                    k,
                    sizes,
                    radius,
                    dim,
                    margin,
                    seed,
                },
                out_dir,
            ),
            GenerateKind::Core {
                k,
                sizes,
                radius,
                dim,
                p_frak,
                margin,
                seed,
                out_dir,
            } => (
                CommandParams::GenerateCore {
                    k,
                    sizes,
                    radius,
                    dim,
                    p_frak,
                    margin,
                    seed,
                },
                out_dir,
            ),
            GenerateKind::Ring {
                n,
                radius,
                thickness,
                seed,
                out_dir,
            } => (
                CommandParams::GenerateRing {
                    n,
                    radius,
                    thickness,
                    seed,
                },
                out_dir,
            ),
            GenerateKind::Counterexample {
                r,
                gap_multiple,
                n_big,
                n_small,
                seed,
                out_dir,
            } => (
                CommandParams::GenerateCounterexample {
                    r,
                    gap_multiple,
                    n_big,
                    n_small,
                    seed,
                },
                out_dir,
            ),
        },
        Command::Cluster {
            data,
            k,
            reps,
            auto_reps,
            pr_succ,
            min_size,
            max_size,
            p_frak,
            cap,
            seed,
            out_dir,
        } => (
            CommandParams::Cluster {
                data,
                k,
                reps,
                auto_reps,
                pr_succ,
                min_size,
                max_size,
                p_frak,
                cap,
                seed,
            },
            out_dir,
        ),
        Command::Verify {
            data,
            labels,
            mode,
            p_frak,
            margin,
            out_dir,
        } => (
            CommandParams::Verify {
                data,
                labels,
                mode: mode.into(),
                p_frak,
                margin,
            },
            out_dir,
        ),
        Command::Analyze {
            regime,
            k_min,
            k_max,
            n,
            imbalance,
            k,
            p_frak_max,
            p_frak_step,
            pr_succ,
            cap,
            out_dir,
        } => (
            CommandParams::Analyze {
                regime: regime.into(),
                k_min,
                k_max,
                n,
                imbalance,
                k,
                p_frak_max,
                p_frak_step,
                pr_succ,
                cap,
            },
            out_dir,
        ),
        Command::Histogram { data, bins, out_dir } => {
            (CommandParams::Histogram { data, bins }, out_dir)
        }
        Command::Replay { .. } => unreachable!("replay is resolved by run() before dispatch"),
    }
}

/// Runs a (possibly replayed) parameter record against an output directory,
/// writing artifacts plus the manifest, and returns the exit code.
///
/// # Errors
///
/// Propagates validation, I/O, and serialization failures.
pub fn execute(params: &CommandParams, out_dir: &Path) -> Result<i32> {
    let started = Instant::now();
    std::fs::create_dir_all(out_dir)?;
    let details = dispatch(params, out_dir)?;
    let manifest = RunManifest {
        schema_version: SCHEMA_VERSION,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        command: params.name().to_string(),
        params: params.clone(),
        rng_seed: params.rng_seed(),
        inputs: details.inputs.clone(),
        outputs: details.outputs.clone(),
        wall_time_ms: started.elapsed().as_millis(),
    };
    write_json(&out_dir.join("manifest.json"), &manifest)?;
    // Status goes to stderr so stdout stays machine-readable (verify pipes
    // its verdict JSON there).
    eprintln!(
        "{}: wrote {} + manifest.json in {}",
        params.name(),
        details.outputs.join(", "),
        out_dir.display()
    );
    Ok(details.exit_code)
}

struct RunDetails {
    exit_code: i32,
    inputs: Vec<String>,
    outputs: Vec<String>,
}

impl RunDetails {
    fn ok(inputs: Vec<String>, outputs: Vec<String>) -> Self {
        RunDetails {
            exit_code: 0,
            inputs,
            outputs,
        }
    }
}

fn dispatch(params: &CommandParams, out_dir: &Path) -> Result<RunDetails> {
    match params {
        CommandParams::GeneratePlain {
            k,
            sizes,
            radius,
            dim,
            margin,
            seed,
        } => run_generate_planted(*k, sizes, *radius, *dim, None, *margin, *seed, out_dir),
        CommandParams::GenerateCore {
            k,
            sizes,
            radius,
            dim,
            p_frak,
            margin,
            seed,
        } => run_generate_planted(
            *k,
            sizes,
            *radius,
            *dim,
            Some(*p_frak),
            *margin,
            *seed,
            out_dir,
        ),
        CommandParams::GenerateRing {
            n,
            radius,
            thickness,
            seed,
        } => run_generate_ring(*n, *radius, *thickness, *seed, out_dir),
        CommandParams::GenerateCounterexample {
            r,
            gap_multiple,
            n_big,
            n_small,
            seed,
        } => run_generate_counterexample(*r, *gap_multiple, *n_big, *n_small, *seed, out_dir),
        CommandParams::Cluster {
            data,
            k,
            reps,
            auto_reps,
            pr_succ,
            min_size,
            max_size,
            p_frak,
            cap,
            seed,
        } => run_cluster(
            data, *k, *reps, *auto_reps, *pr_succ, *min_size, *max_size, *p_frak, *cap, *seed,
            out_dir,
        ),
        CommandParams::Verify {
            data,
            labels,
            mode,
            p_frak,
            margin,
        } => run_verify(data, labels, *mode, *p_frak, *margin, out_dir),
        CommandParams::Analyze {
            regime,
            k_min,
            k_max,
            n,
            imbalance,
            k,
            p_frak_max,
            p_frak_step,
            pr_succ,
            cap,
        } => run_analyze(
            *regime,
            *k_min,
            *k_max,
            *n,
            *imbalance,
            *k,
            *p_frak_max,
            *p_frak_step,
            *pr_succ,
            *cap,
            out_dir,
        ),
        CommandParams::Histogram { data, bins } => run_histogram(data, *bins, out_dir),
    }
}

// ─── command runners ────────────────────────────────────────────────────────

#[derive(Serialize)]
struct PlantedReportBody<'a> {
    kind: &'static str,
    k: usize,
    core_cardinalities: Option<&'a [usize]>,
    cardinalities: &'a [usize],
    requested_radius: f64,
    dim: usize,
    n: usize,
    planted_centers: &'a [Vec<f64>],
    per_cluster_radius: &'a [f64],
    realized_min_gap: f64,
    required_gap: f64,
    margin: f64,
    p_frak: Option<f64>,
    realized_p_frak: Option<f64>,
    rng_seed: u64,
}

#[allow(clippy::too_many_arguments)]
fn run_generate_planted(
    k: usize,
    sizes: &[usize],
    radius: f64,
    dim: usize,
    p_frak: Option<f64>,
    margin: f64,
    seed: u64,
    out_dir: &Path,
) -> Result<RunDetails> {
    let radii = vec![radius; k.max(sizes.len())];
    let planted = match p_frak {
        None => gen_well_clusterable(k, sizes, &radii, dim, margin, seed)?,
        Some(pf) => gen_core_clusterable(k, sizes, &radii, dim, pf, margin, seed)?,
    };
    // Full per-cluster point counts as realized in the file (for core
    // datasets these exceed the requested core sizes by the stragglers).
    let mut realized_sizes = vec![0usize; k];
    for &label in planted.planted_partition.labels() {
        realized_sizes[label] += 1;
    }
    let report = PlantedReportBody {
        kind: if p_frak.is_some() { "core" } else { "plain" },
        k,
        core_cardinalities: p_frak.is_some().then_some(sizes),
        cardinalities: &realized_sizes,
        requested_radius: radius,
        dim,
        n: planted.dataset.n(),
        planted_centers: &planted.planted_centers,
        per_cluster_radius: &planted.per_cluster_radius,
        realized_min_gap: planted.realized_min_gap,
        required_gap: planted.required_gap,
        margin: planted.margin,
        p_frak,
        realized_p_frak: planted.realized_p_frak,
        rng_seed: seed,
    };
    atomic_write(
        &out_dir.join("dataset.csv"),
        planted.dataset.to_csv_string().as_bytes(),
    )?;
    atomic_write(
        &out_dir.join("planted_labels.csv"),
        planted.planted_partition.to_csv_string().as_bytes(),
    )?;
    write_json(&out_dir.join("report.json"), &versioned(report))?;
    println!(
        "planted {} dataset: n = {}, realized min gap {:.6} vs required {:.6}",
        if p_frak.is_some() { "core" } else { "plain" },
        planted.dataset.n(),
        planted.realized_min_gap,
        planted.required_gap
    );
    Ok(RunDetails::ok(
        vec![],
        vec![
            "dataset.csv".into(),
            "planted_labels.csv".into(),
            "report.json".into(),
        ],
    ))
}

fn run_generate_ring(
    n: usize,
    radius: f64,
    thickness: f64,
    seed: u64,
    out_dir: &Path,
) -> Result<RunDetails> {
    let dataset = gen_ring(n, radius, thickness, seed)?;
    atomic_write(&out_dir.join("dataset.csv"), dataset.to_csv_string().as_bytes())?;
    println!("ring dataset: n = {n}, radius {radius}, thickness {thickness}");
    Ok(RunDetails::ok(vec![], vec!["dataset.csv".into()]))
}

#[derive(Serialize)]
struct CounterexampleReportBody {
    r: f64,
    gap_multiple: f64,
    n_big: usize,
    n_small: usize,
    q_gap: f64,
    q_alt: f64,
    v_d: f64,
    x3_lower_bound: f64,
    succeeded: bool,
}

fn run_generate_counterexample(
    r: f64,
    gap_multiple: f64,
    n_big: usize,
    n_small: usize,
    seed: u64,
    out_dir: &Path,
) -> Result<RunDetails> {
    let report = gen_unbalanced_counterexample(r, gap_multiple, n_big, n_small, seed)?;
    atomic_write(
        &out_dir.join("dataset.csv"),
        report.dataset.to_csv_string().as_bytes(),
    )?;
    atomic_write(
        &out_dir.join("gap_labels.csv"),
        report.gap_partition.to_csv_string().as_bytes(),
    )?;
    atomic_write(
        &out_dir.join("alt_labels.csv"),
        report.alternative_partition.to_csv_string().as_bytes(),
    )?;
    let body = CounterexampleReportBody {
        r,
        gap_multiple,
        n_big,
        n_small,
        q_gap: report.q_gap,
        q_alt: report.q_alt,
        v_d: report.v_d,
        x3_lower_bound: report.x3_lower_bound,
        succeeded: report.succeeded,
    };
    write_json(&out_dir.join("report.json"), &versioned(body))?;
    println!(
        "counterexample: Q_gap = {:.6}, Q_alt = {:.6}, gap partition {}",
        report.q_gap,
        report.q_alt,
        if report.succeeded {
            "defeated"
        } else {
            "still optimal"
        }
    );
    Ok(RunDetails::ok(
        vec![],
        vec![
            "dataset.csv".into(),
            "gap_labels.csv".into(),
            "alt_labels.csv".into(),
            "report.json".into(),
        ],
    ))
}

#[derive(Serialize)]
struct ClusterReportBody<'a> {
    k: usize,
    n: usize,
    dim: usize,
    cost: f64,
    iterations: usize,
    repetitions: usize,
    rng_seed: u64,
    /// Dataset indices of the winning run's k-means++ seeds.
    seed_point_indices: Option<&'a [usize]>,
    /// Present when --auto-reps chose the restart count.
    auto_analysis: Option<&'a SeedingAnalysis>,
}

#[allow(clippy::too_many_arguments)]
fn run_cluster(
    data: &str,
    k: usize,
    reps: Option<usize>,
    auto_reps: bool,
    pr_succ: f64,
    min_size: Option<f64>,
    max_size: Option<f64>,
    p_frak: Option<f64>,
    cap: usize,
    seed: u64,
    out_dir: &Path,
) -> Result<RunDetails> {
    if reps.is_some() && auto_reps {
        return Err(Error::InvalidParameter {
            name: "reps",
            reason: "choose either --reps or --auto-reps, not both".into(),
        });
    }
    let dataset = Dataset::read_csv(Path::new(data))?;
    let (repetitions, analysis) = if auto_reps {
        let analysis = match (p_frak, min_size, max_size) {
            (Some(pf), Some(m), Some(m_max)) => {
                SeedingAnalysis::core(k, dataset.n() as f64, m, m_max, pf, pr_succ, cap)?
            }
            (Some(pf), None, None) => SeedingAnalysis::core_limit(k, pf, pr_succ, cap)?,
            (None, Some(m), Some(m_max)) => {
                SeedingAnalysis::unbalanced(k, dataset.n() as f64, m, m_max, pr_succ, cap)?
            }
            (None, None, None) => SeedingAnalysis::equal(k, pr_succ, cap)?,
            _ => {
                return Err(Error::InvalidParameter {
                    name: "min_size/max_size",
                    reason: "provide both --min-size and --max-size, or neither".into(),
                })
            }
        };
        (analysis.repetitions, Some(analysis))
    } else {
        (reps.unwrap_or(1), None)
    };
    let result = crate::engine::multi_restart(&dataset, k, repetitions, seed)?;
    let body = ClusterReportBody {
        k,
        n: dataset.n(),
        dim: dataset.dim(),
        cost: result.cost,
        iterations: result.iterations,
        repetitions,
        rng_seed: seed,
        seed_point_indices: result.seed.as_ref().map(|s| s.source_indices.as_slice()),
        auto_analysis: analysis.as_ref(),
    };
    atomic_write(
        &out_dir.join("labels.csv"),
        result.partition.to_csv_string().as_bytes(),
    )?;
    write_json(&out_dir.join("result.json"), &versioned(body))?;
    println!(
        "clustered n = {} into k = {k}: cost {:.6} after {} iterations, {} restart(s)",
        dataset.n(),
        result.cost,
        result.iterations,
        repetitions
    );
    Ok(RunDetails::ok(
        vec![data.to_string()],
        vec!["labels.csv".into(), "result.json".into()],
    ))
}

#[derive(Serialize)]
struct VerifyReportBody<'a> {
    margin: f64,
    /// `margin × required_gap.g_required` — what the pass decision uses.
    effective_required_gap: f64,
    /// Pass/fail at the requested margin (drives the exit code).
    pass: bool,
    verdict: &'a crate::verifier::ClusterabilityVerdict,
}

fn run_verify(
    data: &str,
    labels: &str,
    mode: VerdictMode,
    p_frak: Option<f64>,
    margin: f64,
    out_dir: &Path,
) -> Result<RunDetails> {
    if !margin.is_finite() || margin <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "margin",
            reason: format!("margin must be positive, got {margin}"),
        });
    }
    let dataset = Dataset::read_csv(Path::new(data))?;
    let partition = Partition::read_csv(Path::new(labels))?;
    let verdict = verify(&dataset, &partition, mode, p_frak)?;
    let pass = verdict.measured_min_gap >= margin * verdict.required_gap.g_required;
    let body = VerifyReportBody {
        margin,
        effective_required_gap: margin * verdict.required_gap.g_required,
        pass,
        verdict: &verdict,
    };
    let doc = versioned(body);
    write_json(&out_dir.join("verdict.json"), &doc)?;
    println!("{}", serde_json::to_string_pretty(&doc)?);
    Ok(RunDetails {
        exit_code: if pass { 0 } else { 2 },
        inputs: vec![data.to_string(), labels.to_string()],
        outputs: vec!["verdict.json".into()],
    })
}

/// One row of the analyze table. `x` is the swept quantity: `k` in the
/// equal/unbalanced regimes, `𝔭` in the core regime.
#[derive(Serialize)]
struct AnalyzeRow {
    x: f64,
    /// Required gap in units of the (maximum) cluster radius.
    g_over_r: f64,
    /// Exact single-run seeding success lower bound.
    p_single: f64,
    /// Companion curve (exponential approximation in the unbalanced regime);
    /// empty where the regime has none.
    p_approx: Option<f64>,
    /// Minimal restarts to reach the success target (capped).
    repetitions: usize,
}

/// Equal-cardinality pairwise gap requirement in units of r: `k·√(2k+k²)`,
/// optionally inflated for the core regime.
fn equal_size_g_over_r(k: usize, inflation: f64) -> f64 {
    let kf = k as f64;
    kf * (inflation * (2.0 * kf + kf * kf)).sqrt()
}

#[allow(clippy::too_many_arguments)]
fn run_analyze(
    regime: Regime,
    k_min: usize,
    k_max: usize,
    n: f64,
    imbalance: f64,
    k: usize,
    p_frak_max: f64,
    p_frak_step: f64,
    pr_succ: f64,
    cap: usize,
    out_dir: &Path,
) -> Result<RunDetails> {
    let mut rows = Vec::new();
    match regime {
        Regime::Equal | Regime::Unbalanced => {
            if k_min < 2 || k_max < k_min {
                return Err(Error::InvalidParameter {
                    name: "k_min/k_max",
                    reason: format!("need 2 <= k_min <= k_max, got {k_min}..{k_max}"),
                });
            }
        }
        Regime::Core => {
            if !(p_frak_step.is_finite() && p_frak_step > 0.0) {
                return Err(Error::InvalidParameter {
                    name: "p_frak_step",
                    reason: format!("step must be positive, got {p_frak_step}"),
                });
            }
            if !(p_frak_max.is_finite() && (0.0..1.0).contains(&p_frak_max)) {
                return Err(Error::InvalidParameter {
                    name: "p_frak_max",
                    reason: format!("need 0 <= p_frak_max < 1, got {p_frak_max}"),
                });
            }
        }
    }
    match regime {
        Regime::Equal => {
            for kk in k_min..=k_max {
                let p_single = p_seed_equal(kk)?;
                let plan = repetition_plan(p_single, pr_succ, cap)?;
                rows.push(AnalyzeRow {
                    x: kk as f64,
                    g_over_r: equal_size_g_over_r(kk, 1.0),
                    p_single,
                    p_approx: None,
                    repetitions: plan.repetitions,
                });
            }
        }
        Regime::Unbalanced => {
            if !(imbalance.is_finite() && imbalance >= 1.0) {
                return Err(Error::InvalidParameter {
                    name: "imbalance",
                    reason: format!("cardinality ratio must be at least 1, got {imbalance}"),
                });
            }
            for kk in k_min..=k_max {
                let per = n / kk as f64;
                let m = per / imbalance.sqrt();
                let m_max = per * imbalance.sqrt();
                let p_single = p_seed_unbalanced(kk, n, m, m_max)?;
                let plan = repetition_plan(p_single, pr_succ, cap)?;
                rows.push(AnalyzeRow {
                    x: kk as f64,
                    g_over_r: (kk as f64 * (m_max + n) / m).sqrt(),
                    p_single,
                    p_approx: Some(p_seed_unbalanced_approx(kk, n, m, m_max)?),
                    repetitions: plan.repetitions,
                });
            }
        }
        Regime::Core => {
            let steps = (p_frak_max / p_frak_step + 1e-9).floor() as usize;
            for s in 0..=steps {
                let pf = s as f64 * p_frak_step;
                let inflation = (1.0 + pf) / (1.0 - pf);
                let p_single = p_seed_core_limit(k, pf)?;
                let plan = repetition_plan(p_single, pr_succ, cap)?;
                rows.push(AnalyzeRow {
                    x: pf,
                    g_over_r: equal_size_g_over_r(k, inflation),
                    p_single,
                    p_approx: None,
                    repetitions: plan.repetitions,
                });
            }
        }
    }
    atomic_write(&out_dir.join("curves.csv"), &csv_bytes(&rows)?)?;
    println!("analyze ({regime:?}): {} rows", rows.len());
    Ok(RunDetails::ok(vec![], vec!["curves.csv".into()]))
}

#[derive(Serialize)]
struct HistRow {
    bin_lo: f64,
    bin_hi: f64,
    count: u64,
}

#[derive(Serialize)]
struct HistogramReportBody {
    n: usize,
    bins: usize,
    bin_edges: Vec<f64>,
    counts: Vec<u64>,
    /// First-bin indices of interior local maxima (plateaus merged).
    local_maxima: Vec<usize>,
}

fn run_histogram(data: &str, bins: usize, out_dir: &Path) -> Result<RunDetails> {
    let dataset = Dataset::read_csv(Path::new(data))?;
    let histogram = distance_histogram(&dataset, bins)?;
    let maxima = histogram.local_maxima();
    let rows: Vec<HistRow> = histogram
        .counts
        .iter()
        .enumerate()
        .map(|(i, &count)| HistRow {
            bin_lo: histogram.bin_edges[i],
            bin_hi: histogram.bin_edges[i + 1],
            count,
        })
        .collect();
    atomic_write(&out_dir.join("histogram.csv"), &csv_bytes(&rows)?)?;
    let body = HistogramReportBody {
        n: dataset.n(),
        bins,
        bin_edges: histogram.bin_edges.clone(),
        counts: histogram.counts.clone(),
        local_maxima: maxima.clone(),
    };
    write_json(&out_dir.join("report.json"), &versioned(body))?;
    println!(
        "histogram: {} bins over {} pairwise distances, {} interior local maxima",
        bins,
        dataset.n() * (dataset.n() - 1) / 2,
        maxima.len()
    );
    Ok(RunDetails::ok(
        vec![data.to_string()],
        vec!["histogram.csv".into(), "report.json".into()],
    ))
}

// ─── serialization plumbing ─────────────────────────────────────────────────

#[derive(Serialize)]
struct Versioned<T: Serialize> {
    schema_version: u32,
    #[serde(flatten)]
    body: T,
}

fn versioned<T: Serialize>(body: T) -> Versioned<T> {
    Versioned {
        schema_version: SCHEMA_VERSION,
        body,
    }
}

/// Writes bytes to `path` atomically (temp file in the same directory, then
/// rename), so readers never observe a half-written artifact.
///
/// # Errors
///
/// I/O failures creating, writing, or persisting the temp file.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(parent) if !parent.as_os_str().is_empty() => parent,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    atomic_write(path, text.as_bytes())
}

fn csv_bytes<T: Serialize>(rows: &[T]) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    {
        let mut writer = csv::Writer::from_writer(&mut buf);
        for row in rows {
            writer.serialize(row)?;
        }
        writer.flush()?;
    }
    Ok(buf)
}
