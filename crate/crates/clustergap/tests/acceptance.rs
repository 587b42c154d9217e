//! Acceptance suite: one test per release criterion. Each test prints a
//! single `PASS criterion N: …` / `FAIL criterion N: …` line (visible with
//! `--nocapture`) and enforces its wall-clock budget.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

use std::panic::{catch_unwind, resume_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use clustergap::analytics::{
    p_seed_core_limit, p_seed_equal, p_seed_unbalanced, required_repetitions,
};
use clustergap::engine::multi_restart;
use clustergap::generators::{
    distance_histogram, gen_core_clusterable, gen_ring, gen_unbalanced_counterexample,
    gen_well_clusterable, random_unit_vector, sample_in_ball,
};
use clustergap::geometry::{cost_centroid, cost_pairwise, Dataset, Partition};
use clustergap::oracle::{brute_force_optimal, DEFAULT_ORACLE_MAX_N};
use clustergap::verifier::{
    check_core_preservation, required_gap_plain, verify, CorePreservationConfig, VerdictMode,
};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Runs one criterion body under a wall-clock budget and prints its verdict
/// line. A body panic or a blown budget both yield a FAIL line and fail the
/// test.
fn criterion(number: u32, label: &str, budget: Duration, body: impl FnOnce()) {
    let started = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(body));
    let elapsed = started.elapsed();
    match outcome {
        Ok(()) if elapsed <= budget => {
            println!("PASS criterion {number}: {label} ({elapsed:.2?}, budget {budget:?})");
        }
        Ok(()) => {
            println!(
                "FAIL criterion {number}: {label} — runtime {elapsed:.2?} exceeded {budget:?}"
            );
            panic!("criterion {number} exceeded its {budget:?} runtime budget: {elapsed:.2?}");
        }
        Err(payload) => {
            println!("FAIL criterion {number}: {label} ({elapsed:.2?})");
            resume_unwind(payload);
        }
    }
}

#[test]
fn criterion_01_cost_form_equivalence() {
    criterion(
        1,
        "centroid and pairwise cost forms agree on 500 random instances",
        Duration::from_secs(10),
        || {
            let mut rng = ChaCha8Rng::seed_from_u64(101);
            for trial in 0..500 {
                let k = rng.random_range(1..=8);
                let n = rng.random_range(k.max(2)..=200);
                let dim = rng.random_range(1..=10);
                let points: Vec<Vec<f64>> = (0..n)
                    .map(|_| (0..dim).map(|_| rng.random_range(-10.0..10.0)).collect())
                    .collect();
                let dataset = Dataset::new(points).unwrap();
                // First k labels cover every cluster; the rest are random.
                let labels: Vec<usize> = (0..n)
                    .map(|i| if i < k { i } else { rng.random_range(0..k) })
                    .collect();
                let partition = Partition::new(labels, k).unwrap();
                let centroid_form = cost_centroid(&dataset, &partition).unwrap();
                let pairwise_form = cost_pairwise(&dataset, &partition).unwrap();
                assert!(
                    (centroid_form - pairwise_form).abs()
                        <= 1e-9 * centroid_form.abs().max(1.0),
                    "trial {trial}: {centroid_form} vs {pairwise_form}"
                );
            }
        },
    );
}

#[test]
fn criterion_02_seeding_bound_reproduction() {
    criterion(
        2,
        "equal-size seeding bound hits its closed-form reference values",
        Duration::from_secs(5),
        || {
            // k = 2: exactly 36/37, i.e. failure probability under 3%.
            let p2 = p_seed_equal(2).unwrap();
            assert!((p2 - 36.0 / 37.0).abs() < 1e-12, "p_seed_equal(2) = {p2}");
            assert!(1.0 - p2 < 0.03);

            // k = 8: (k²(k+1)²/(k²(k+1)²+k−1))^(k−1) = (5184/5191)^7,
            // failure probability under 1%.
            let p8 = p_seed_equal(8).unwrap();
            let p8_reference = (5184.0_f64 / 5191.0).powi(7);
            assert!((p8 - p8_reference).abs() < 1e-12, "p_seed_equal(8) = {p8}");
            assert!(1.0 - p8 < 0.01);

            // k = 30: (864900/864929)^29, failure probability under 0.1%.
            let p30 = p_seed_equal(30).unwrap();
            let p30_reference = (864_900.0_f64 / 864_929.0).powi(29);
            assert!((p30 - p30_reference).abs() < 1e-12, "p_seed_equal(30) = {p30}");
            assert!(1.0 - p30 < 0.001);
        },
    );
}

#[test]
fn criterion_03_equal_size_gap_curve() {
    criterion(
        3,
        "equal-size gap requirement matches √(k(k+1)) and k√(2k+k²) and grows with k",
        Duration::from_secs(5),
        || {
            let mut previous = 0.0;
            for k in 2..=30 {
                let cardinalities = vec![5usize; k];
                let requirement = required_gap_plain(k, &cardinalities, 1.0).unwrap();
                let kf = k as f64;
                let balanced_reference = (kf * (kf + 1.0)).sqrt();
                let pairwise_reference = kf * (2.0 * kf + kf * kf).sqrt();
                assert!(
                    (requirement.g_balanced_bound - balanced_reference).abs()
                        <= 1e-12 * balanced_reference,
                    "k = {k}: balanced {} vs {balanced_reference}",
                    requirement.g_balanced_bound
                );
                assert!(
                    (requirement.g_pairwise_bound - pairwise_reference).abs()
                        <= 1e-12 * pairwise_reference,
                    "k = {k}: pairwise {} vs {pairwise_reference}",
                    requirement.g_pairwise_bound
                );
                // The pairwise form dominates for every k ≥ 2 and the curve
                // is strictly increasing.
                assert_eq!(requirement.g_required, requirement.g_pairwise_bound);
                assert!(requirement.g_required > previous, "curve must increase at k = {k}");
                previous = requirement.g_required;
            }
        },
    );
}

#[test]
fn criterion_04_planted_plain_recovery_rate() {
    criterion(
        4,
        "k-means++ with the derived restart count recovers ≥ 90% of 200 planted datasets",
        Duration::from_secs(120),
        || {
            let ks = [2usize, 3, 5];
            let mut recovered = 0usize;
            for i in 0..200u64 {
                let k = ks[(i % 3) as usize];
                let sizes = vec![40usize; k];
                let radii = vec![1.0; k];
                let planted =
                    gen_well_clusterable(k, &sizes, &radii, 2, 1.0, 40_000 + i).unwrap();
                assert!(planted.dataset.n() <= 600);
                let repetitions =
                    required_repetitions(p_seed_equal(k).unwrap(), 0.95).unwrap();
                let result =
                    multi_restart(&planted.dataset, k, repetitions, 90_000 + i).unwrap();
                if result.partition.is_relabeling_of(&planted.planted_partition) {
                    recovered += 1;
                }
            }
            assert!(
                recovered >= 180,
                "recovered only {recovered}/200 planted partitions"
            );
        },
    );
}

#[test]
fn criterion_05_oracle_returns_planted_optimum() {
    criterion(
        5,
        "brute-force oracle returns the planted partition on all 50 small instances",
        Duration::from_secs(60),
        || {
            for i in 0..50u64 {
                let (k, sizes) = if i % 2 == 0 {
                    (2usize, vec![6usize, 6])
                } else {
                    (3usize, vec![4usize, 4, 4])
                };
                let radii = vec![1.0; k];
                let planted =
                    gen_well_clusterable(k, &sizes, &radii, 2, 1.0, 60_000 + i).unwrap();
                assert!(planted.dataset.n() <= 12);
                let oracle =
                    brute_force_optimal(&planted.dataset, k, DEFAULT_ORACLE_MAX_N).unwrap();
                assert!(
                    oracle
                        .best_partition
                        .is_relabeling_of(&planted.planted_partition),
                    "instance {i}: oracle found a cheaper partition than the planted one \
                     (cost {})",
                    oracle.best_cost
                );
            }
        },
    );
}

#[test]
fn criterion_06_unbalanced_counterexample() {
    criterion(
        6,
        "huge-gap two-cluster split loses to an off-gap split; oracle confirms on n = 12",
        Duration::from_secs(5),
        || {
            // Flagship instance: r = 1, gap 9r, 1000 vs 2 points.
            let report = gen_unbalanced_counterexample(1.0, 9.0, 1000, 2, 0).unwrap();
            assert!(
                (report.q_gap - 1000.0).abs() <= 1e-9,
                "Q_gap = {}",
                report.q_gap
            );
            assert!(report.q_alt < 200.0, "Q_alt = {}", report.q_alt);
            assert!(report.succeeded, "alternative split must beat the gap split");

            // Shrunk instance small enough for the exhaustive oracle.
            let shrunk = gen_unbalanced_counterexample(1.0, 2.5, 10, 2, 0).unwrap();
            assert_eq!(shrunk.dataset.n(), 12);
            assert!(shrunk.succeeded);
            let oracle = brute_force_optimal(&shrunk.dataset, 2, DEFAULT_ORACLE_MAX_N).unwrap();
            assert!(
                oracle.best_cost < shrunk.q_gap - 1e-9,
                "oracle cost {} does not beat the gap split {}",
                oracle.best_cost,
                shrunk.q_gap
            );
            assert!(
                !oracle.best_partition.is_relabeling_of(&shrunk.gap_partition),
                "the gap split must not be optimal"
            );
        },
    );
}

#[test]
fn criterion_07_ring_histogram_is_multimodal() {
    criterion(
        7,
        "pairwise-distance histogram of a structureless ring shows ≥ 2 local maxima",
        Duration::from_secs(5),
        || {
            let ring = gen_ring(2000, 1.0, 0.05, 1).unwrap();
            let histogram = distance_histogram(&ring, 50).unwrap();
            let maxima = histogram.local_maxima();
            assert!(
                maxima.len() >= 2,
                "found {} local maxima at bins {:?}",
                maxima.len(),
                maxima
            );
        },
    );
}

#[test]
fn criterion_08_core_preservation_theorem() {
    criterion(
        8,
        "one assignment step around in-core centers keeps clusters in 10⁴ random configs",
        Duration::from_secs(30),
        || {
            let mut rng = ChaCha8Rng::seed_from_u64(808);
            let dims = [1usize, 2, 3, 5];
            for trial in 0..10_000usize {
                let dim = dims[trial % dims.len()];
                let rho = rng.random_range(0.1..3.0);
                let g = rng.random_range(0.05..2.0);
                let center_a: Vec<f64> =
                    (0..dim).map(|_| rng.random_range(-5.0..5.0)).collect();
                let direction = random_unit_vector(dim, &mut rng);
                let center_b: Vec<f64> = center_a
                    .iter()
                    .zip(&direction)
                    .map(|(a, e)| a + (2.0 * rho + g) * e)
                    .collect();
                let config =
                    CorePreservationConfig::new(center_a.clone(), center_b.clone(), rho, g)
                        .unwrap();

                let n_a = rng.random_range(1..=20);
                let n_b = rng.random_range(1..=20);
                let a_points: Vec<Vec<f64>> = (0..n_a)
                    .map(|_| sample_in_ball(&center_a, rho, &mut rng))
                    .collect();
                let b_points: Vec<Vec<f64>> = (0..n_b)
                    .map(|_| sample_in_ball(&center_b, rho, &mut rng))
                    .collect();
                let x = sample_in_ball(&center_a, config.core_radius, &mut rng);
                let y = sample_in_ball(&center_b, config.core_radius, &mut rng);

                let kept =
                    check_core_preservation(&config, &a_points, &b_points, &x, &y).unwrap();
                assert!(kept, "trial {trial} (dim {dim}, rho {rho}, g {g}) lost a point");
            }
        },
    );
}

#[test]
fn criterion_09_planted_core_recovery_and_verification() {
    criterion(
        9,
        "core-regime restarts recover ≥ 90% of 100 planted core datasets, all verified",
        Duration::from_secs(180),
        || {
            let combos = [(0.05, 2usize), (0.05, 3), (0.1, 2), (0.1, 3), (0.2, 2), (0.2, 3)];
            let mut recovered = 0usize;
            for i in 0..100u64 {
                let (p_frak, k) = combos[(i % 6) as usize];
                let sizes = vec![30usize; k];
                let radii = vec![1.0; k];
                let planted =
                    gen_core_clusterable(k, &sizes, &radii, 2, p_frak, 1.0, 70_000 + i)
                        .unwrap();
                // R = ⌈log(1−0.95) / log(1−(1−𝔭)^(k−1))⌉ via the limit bound.
                let repetitions =
                    required_repetitions(p_seed_core_limit(k, p_frak).unwrap(), 0.95).unwrap();
                let result =
                    multi_restart(&planted.dataset, k, repetitions, 91_000 + i).unwrap();
                if result.partition.is_relabeling_of(&planted.planted_partition) {
                    recovered += 1;
                    let verdict = verify(
                        &planted.dataset,
                        &result.partition,
                        VerdictMode::Core,
                        Some(p_frak),
                    )
                    .unwrap();
                    assert!(
                        verdict.well_clusterable,
                        "dataset {i}: core verification failed on the recovered partition \
                         (measured {}, required {})",
                        verdict.measured_min_gap, verdict.required_gap.g_required
                    );
                }
            }
            assert!(
                recovered >= 90,
                "recovered only {recovered}/100 planted core partitions"
            );
        },
    );
}

#[test]
fn criterion_10_unbalanced_seeding_bound() {
    criterion(
        10,
        "single-run seeding bound at k = 2, n = 1000, M/m = 20 reaches 0.95",
        Duration::from_secs(5),
        || {
            let n = 1000.0;
            let per = n / 2.0;
            let m = per / 20.0_f64.sqrt();
            let m_max = per * 20.0_f64.sqrt();
            let p = p_seed_unbalanced(2, n, m, m_max).unwrap();
            // Independent evaluation: a = k²n(2 + n/m), p = (a/(a + (k−1)M))^(k−1).
            let a = 4.0 * n * (2.0 + n / m);
            let reference = a / (a + m_max);
            assert!((p - reference).abs() <= 1e-12, "p = {p} vs reference {reference}");
            assert!(p >= 0.95 - 1e-12, "p = {p} misses the 0.95 target");
        },
    );
}

#[test]
fn criterion_11_repetition_count_is_minimal() {
    criterion(
        11,
        "derived restart count brackets the target for 1000 random (p, Pr) pairs",
        Duration::from_secs(1),
        || {
            let mut rng = ChaCha8Rng::seed_from_u64(1111);
            for _ in 0..1000 {
                let p_single: f64 = rng.random_range(0.001..0.999);
                let pr_succ: f64 = rng.random_range(0.001..0.999);
                let repetitions = required_repetitions(p_single, pr_succ).unwrap();
                assert!(repetitions >= 1);
                let fail_single = 1.0 - p_single;
                let fail_target = 1.0 - pr_succ;
                // R suffices…
                assert!(
                    fail_single.powf(repetitions as f64) <= fail_target,
                    "R = {repetitions} too small for p = {p_single}, target {pr_succ}"
                );
                // …and R − 1 does not.
                assert!(
                    fail_single.powf((repetitions - 1) as f64) > fail_target,
                    "R = {repetitions} not minimal for p = {p_single}, target {pr_succ}"
                );
            }
        },
    );
}
