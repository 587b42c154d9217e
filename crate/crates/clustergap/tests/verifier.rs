//! Required-gap formulas, core extraction, verdicts, core preservation.

use approx::assert_relative_eq;
use proptest::prelude::*;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use clustergap::generators::{gen_core_clusterable, gen_well_clusterable, sample_in_ball};
use clustergap::geometry::{Dataset, Partition};
use clustergap::verifier::{
    check_core_preservation, extract_core, pairwise_bound, pairwise_bound_restated,
    required_gap_core, required_gap_plain, verify, CorePreservationConfig, VerdictMode,
};
use clustergap::Error;

// ─── required-gap formulas ──────────────────────────────────────────────────

#[test]
fn equal_size_reductions_are_exact() {
    for k in 2usize..=30 {
        let kf = k as f64;
        let requirement = required_gap_plain(k, &vec![100; k], 1.0).unwrap();
        assert_relative_eq!(
            requirement.g_balanced_bound,
            (kf * (kf + 1.0)).sqrt(),
            max_relative = 1e-12
        );
        assert_relative_eq!(
            requirement.g_pairwise_bound,
            kf * (2.0 * kf + kf * kf).sqrt(),
            max_relative = 1e-12
        );
        // The pairwise bound dominates for every k ≥ 2.
        assert_eq!(requirement.g_required, requirement.g_pairwise_bound);
    }
}

#[test]
fn requirement_scales_linearly_in_radius() {
    let base = required_gap_plain(3, &[50, 80, 20], 1.0).unwrap();
    let scaled = required_gap_plain(3, &[50, 80, 20], 2.5).unwrap();
    assert_relative_eq!(scaled.g_required, 2.5 * base.g_required, max_relative = 1e-12);
}

#[test]
fn requirement_echoes_inputs() {
    let requirement = required_gap_plain(3, &[50, 80, 20], 1.5).unwrap();
    assert_eq!(requirement.k, 3);
    assert_eq!(requirement.n, 150);
    assert_eq!(requirement.max_cardinality, 80);
    assert_eq!(requirement.min_cardinality, 20);
    assert_eq!(requirement.cardinalities, vec![50, 80, 20]);
    assert_eq!(requirement.radii, vec![1.5; 3]);
    assert_eq!(requirement.p_frak, None);
}

#[test]
fn core_requirement_reduces_to_plain_at_zero_p_frak() {
    let cards = [40usize, 60, 30];
    let plain = required_gap_plain(3, &cards, 2.0).unwrap();
    let core = required_gap_core(3, &cards, &[2.0, 2.0, 2.0], 0.0).unwrap();
    assert_relative_eq!(core.g_balanced_bound, plain.g_balanced_bound, max_relative = 1e-12);
    assert_relative_eq!(core.g_pairwise_bound, plain.g_pairwise_bound, max_relative = 1e-12);
    assert_relative_eq!(core.g_required, plain.g_required, max_relative = 1e-12);
}

#[test]
fn core_requirement_grows_with_p_frak() {
    let cards = [40usize, 60, 30];
    let radii = [1.0, 2.0, 1.5];
    let mut previous = 0.0;
    for step in 0..10 {
        let p_frak = 0.1 * f64::from(step);
        let requirement = required_gap_core(3, &cards, &radii, p_frak).unwrap();
        assert!(requirement.g_required > previous);
        previous = requirement.g_required;
    }
}

#[test]
fn core_requirement_hand_value() {
    // k = 2, core cards 100/100, radii 1/1, 𝔭 = 0.1:
    // pairwise = 2·√400·√(1.2222…·200/10000) = 40·√(0.024444…).
    let requirement = required_gap_core(2, &[100, 100], &[1.0, 1.0], 0.1).unwrap();
    let inflation: f64 = 1.1 / 0.9;
    assert_relative_eq!(
        requirement.g_pairwise_bound,
        40.0 * (inflation * 200.0 / 10_000.0).sqrt(),
        max_relative = 1e-12
    );
    // balanced = 1·√(2·1.2222…·300/100).
    assert_relative_eq!(
        requirement.g_balanced_bound,
        (2.0 * inflation * 3.0).sqrt(),
        max_relative = 1e-12
    );
}

#[test]
fn formula_domains_are_enforced() {
    assert!(matches!(
        required_gap_plain(1, &[10], 1.0),
        Err(Error::TooFewClusters { k: 1 })
    ));
    assert!(matches!(
        required_gap_plain(3, &[10, 10], 1.0),
        Err(Error::LengthMismatch { .. })
    ));
    assert!(required_gap_plain(2, &[10, 0], 1.0).is_err());
    assert!(required_gap_plain(2, &[10, 10], -1.0).is_err());
    assert!(required_gap_core(2, &[10, 10], &[1.0, 1.0], 1.0).is_err());
    assert!(required_gap_core(2, &[10, 10], &[1.0], 0.1).is_err());
}

proptest! {
    /// The two printed forms of the pairwise bound are the same function.
    #[test]
    fn pairwise_bound_forms_agree(
        k in 2usize..=10,
        n_p in 1.0f64..1000.0,
        n_q in 1.0f64..1000.0,
        extra in 0.0f64..1000.0,
        r in 0.0f64..50.0,
        inflation in 1.0f64..3.0,
    ) {
        let n = n_p + n_q + extra;
        let printed = pairwise_bound(k, n, n_p, n_q, r, inflation);
        let restated = pairwise_bound_restated(k, n, n_p, n_q, r, inflation);
        prop_assert!((printed - restated).abs() <= 1e-9 * printed.max(1.0));
    }
}

// ─── core extraction ────────────────────────────────────────────────────────

/// 98 points at distance 1 (49 antipodal pairs) and 2 points at distance 10:
/// total cost 98·1 + 2·100 = 298. With 𝔭 = 0.68 the target is 0.32·298 =
/// 95.36 ≤ 98, so the core is exactly the radius-1 shell, retaining
/// 98/298 ≈ 0.329 of the cost.
fn shell_with_stragglers() -> (Dataset, Partition) {
    let mut points = Vec::new();
    for _ in 0..49 {
        points.push(vec![1.0]);
        points.push(vec![-1.0]);
    }
    points.push(vec![10.0]);
    points.push(vec![-10.0]);
    let n = points.len();
    (
        Dataset::new(points).unwrap(),
        Partition::new(vec![0; n], 1).unwrap(),
    )
}

#[test]
fn core_extraction_keeps_cost_prefix_and_groups_ties() {
    let (dataset, partition) = shell_with_stragglers();
    let core = extract_core(&dataset, &partition, 0, 0.68).unwrap();
    assert_eq!(core.core_cardinality, 98);
    assert_relative_eq!(core.core_radius, 1.0, max_relative = 1e-12);
    assert_relative_eq!(core.achieved_fraction, 98.0 / 298.0, max_relative = 1e-12);
    assert_eq!(core.p_frak, 0.68);
    // Exactly the members within the core radius, ascending.
    assert_eq!(core.core_member_indices, (0..98).collect::<Vec<_>>());
}

#[test]
fn core_extraction_with_tiny_budget_keeps_everything() {
    let (dataset, partition) = shell_with_stragglers();
    // 𝔭 = 0.1: dropping both stragglers would lose 200/298 ≫ 0.1, so they stay.
    let core = extract_core(&dataset, &partition, 0, 0.1).unwrap();
    assert_eq!(core.core_cardinality, 100);
    assert_relative_eq!(core.core_radius, 10.0, max_relative = 1e-12);
    assert_relative_eq!(core.achieved_fraction, 1.0, max_relative = 1e-12);
}

#[test]
fn core_of_zero_cost_cluster_is_whole_cluster() {
    let dataset = Dataset::new(vec![vec![2.0, 2.0]; 5]).unwrap();
    let partition = Partition::new(vec![0; 5], 1).unwrap();
    let core = extract_core(&dataset, &partition, 0, 0.5).unwrap();
    assert_eq!(core.core_cardinality, 5);
    assert_eq!(core.core_radius, 0.0);
    assert_eq!(core.achieved_fraction, 1.0);
}

#[test]
fn core_extraction_validates_inputs() {
    let (dataset, partition) = shell_with_stragglers();
    assert!(extract_core(&dataset, &partition, 1, 0.1).is_err());
    assert!(extract_core(&dataset, &partition, 0, 1.0).is_err());
    assert!(extract_core(&dataset, &partition, 0, -0.1).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Core invariants on random clusters: the retained fraction meets the
    /// budget, members are exactly those within the radius, and the radius
    /// never exceeds the enclosing radius.
    #[test]
    fn core_invariants(
        points in prop::collection::vec(prop::collection::vec(-20.0f64..20.0, 2), 2..=60),
        p_frak in 0.0f64..0.95,
    ) {
        let n = points.len();
        let dataset = Dataset::new(points).unwrap();
        let partition = Partition::new(vec![0; n], 1).unwrap();
        let core = extract_core(&dataset, &partition, 0, p_frak).unwrap();
        prop_assert!(core.achieved_fraction >= 1.0 - p_frak - 1e-12);
        prop_assert!(core.core_cardinality >= 1);

        let stats = clustergap::geometry::compute_stats(&dataset, &partition).unwrap();
        prop_assert!(core.core_radius <= stats[0].enclosing_radius * (1.0 + 1e-12));
        let threshold = core.core_radius * (1.0 + 1e-9) + f64::EPSILON;
        for i in 0..n {
            let d = clustergap::geometry::dist(dataset.point(i), &stats[0].centroid);
            let inside = d <= threshold;
            prop_assert_eq!(core.core_member_indices.contains(&i), inside);
        }
    }
}

// ─── verdicts ───────────────────────────────────────────────────────────────

#[test]
fn planted_plain_dataset_passes_plain_verification() {
    let planted = gen_well_clusterable(3, &[30, 40, 50], &[1.0, 0.5, 2.0], 3, 1.0, 11).unwrap();
    let verdict = verify(
        &planted.dataset,
        &planted.planted_partition,
        VerdictMode::Plain,
        None,
    )
    .unwrap();
    assert!(verdict.well_clusterable);
    assert_eq!(verdict.per_pair_detail.len(), 3);
    for pair in &verdict.per_pair_detail {
        assert!(pair.measured_gap >= verdict.required_gap.g_required);
    }
}

#[test]
fn overlapping_blobs_fail_plain_verification() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut points = Vec::new();
    for _ in 0..50 {
        points.push(sample_in_ball(&[0.0, 0.0], 1.0, &mut rng));
        points.push(sample_in_ball(&[1.0, 0.0], 1.0, &mut rng));
    }
    let dataset = Dataset::new(points).unwrap();
    let labels = (0..100).map(|i| i % 2).collect();
    let partition = Partition::new(labels, 2).unwrap();
    let verdict = verify(&dataset, &partition, VerdictMode::Plain, None).unwrap();
    assert!(!verdict.well_clusterable);
    assert!(verdict.measured_min_gap < 0.0, "overlapping balls gap is negative");
}

#[test]
fn core_mode_requires_p_frak() {
    let planted = gen_well_clusterable(2, &[10, 10], &[1.0, 1.0], 2, 1.0, 1).unwrap();
    assert!(matches!(
        verify(&planted.dataset, &planted.planted_partition, VerdictMode::Core, None),
        Err(Error::InvalidParameter { name: "p_frak", .. })
    ));
}

#[test]
fn verdict_needs_at_least_two_clusters() {
    let dataset = Dataset::new(vec![vec![0.0], vec![1.0]]).unwrap();
    let partition = Partition::new(vec![0, 0], 1).unwrap();
    assert!(matches!(
        verify(&dataset, &partition, VerdictMode::Plain, None),
        Err(Error::TooFewClusters { k: 1 })
    ));
}

/// The point of core-based verification: stragglers sink the plain check
/// but the core check still certifies the planted structure.
#[test]
fn stragglers_fail_plain_but_pass_core() {
    let planted = gen_core_clusterable(2, &[100, 100], &[1.0, 1.0], 2, 0.1, 1.0, 21).unwrap();
    assert!(
        planted.realized_p_frak.unwrap() > 0.0,
        "the construction must actually place stragglers"
    );
    let plain = verify(
        &planted.dataset,
        &planted.planted_partition,
        VerdictMode::Plain,
        None,
    )
    .unwrap();
    assert!(!plain.well_clusterable);
    let core = verify(
        &planted.dataset,
        &planted.planted_partition,
        VerdictMode::Core,
        Some(0.1),
    )
    .unwrap();
    assert!(core.well_clusterable);
    assert_eq!(core.required_gap.p_frak, Some(0.1));
}

// ─── core preservation ──────────────────────────────────────────────────────

fn preservation_instance(
    dim: usize,
    rho: f64,
    g: f64,
    seed: u64,
) -> (CorePreservationConfig, Vec<Vec<f64>>, Vec<Vec<f64>>, Vec<f64>, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut center_a = vec![0.0; dim];
    let mut center_b = vec![0.0; dim];
    center_b[0] = 2.0 * rho + g;
    center_a[0] = 0.0;
    let config = CorePreservationConfig::new(center_a.clone(), center_b.clone(), rho, g).unwrap();
    let a_points: Vec<Vec<f64>> = (0..30).map(|_| sample_in_ball(&center_a, rho, &mut rng)).collect();
    let b_points: Vec<Vec<f64>> = (0..30).map(|_| sample_in_ball(&center_b, rho, &mut rng)).collect();
    let x = sample_in_ball(&center_a, config.core_radius, &mut rng);
    let y = sample_in_ball(&center_b, config.core_radius, &mut rng);
    (config, a_points, b_points, x, y)
}

#[test]
fn core_preservation_holds_on_admissible_instances() {
    for seed in 0..50 {
        let (config, a, b, x, y) = preservation_instance(3, 2.0, 1.0, seed);
        assert!(check_core_preservation(&config, &a, &b, &x, &y).unwrap());
    }
}

#[test]
fn core_preservation_boundary_ties_go_to_x() {
    // Centers 0 and 3, ρ = 1, g = 1, cores of radius 1/2. The A-point at
    // 1.0 (A's surface) with X = −0.5 and Y = 2.5 is exactly 1.5 from both
    // substitute centers; the tie must go to X for the check to pass.
    let config = CorePreservationConfig::new(vec![0.0], vec![3.0], 1.0, 1.0).unwrap();
    let a_points = vec![vec![1.0]];
    let b_points = vec![vec![3.0]];
    assert!(check_core_preservation(&config, &a_points, &b_points, &[-0.5], &[2.5]).unwrap());
}

#[test]
fn core_preservation_rejects_violated_hypotheses() {
    let (config, mut a, b, x, y) = preservation_instance(2, 1.0, 0.8, 4);
    // A point outside the radius-ρ ball breaks the precondition.
    a.push(vec![5.0, 5.0]);
    assert!(matches!(
        check_core_preservation(&config, &a, &b, &x, &y),
        Err(Error::PreconditionViolated { .. })
    ));
    a.pop();
    // X outside A's core breaks it too.
    let far_x = vec![config.core_radius * 3.0, 0.0];
    assert!(matches!(
        check_core_preservation(&config, &a, &b, &far_x, &y),
        Err(Error::PreconditionViolated { .. })
    ));
    // Mis-stated geometry is rejected at construction.
    assert!(CorePreservationConfig::new(vec![0.0], vec![1.0], 1.0, 1.0).is_err());
    assert!(CorePreservationConfig::new(vec![0.0], vec![2.0], 1.0, 0.0).is_err());
}
