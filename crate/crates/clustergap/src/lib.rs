//! k-means / k-means++ clustering with *a-posteriori* well-clusterability
//! verification.
//!
//! Clusterability is usually framed as a promise: *if* the data is nicely
//! separated, k-means++ finds the right partition. That promise is
//! unverifiable before clustering. This crate implements the reversed,
//! checkable workflow:
//!
//! 1. cluster the data with restarted k-means++ / Lloyd ([`engine`]),
//! 2. measure the separation the found partition actually achieves, and
//! 3. compare it against explicit required-gap formulas ([`verifier`]) —
//!    if the measured gaps meet the requirement, the partition is certified
//!    as the global k-means optimum and the data as well-clusterable; if
//!    repeated well-seeded runs keep failing the check, the data itself is
//!    (with quantified probability) not well-clusterable.
//!
//! Two gap notions are supported: **plain** gaps between whole-cluster
//! enclosing balls, and **core** gaps that ignore a cost fraction `𝔭` of
//! stragglers per cluster, making the certificate robust to outliers.
//! [`analytics`] quantifies the "with high probability" part: lower bounds
//! on the chance that one k-means++ seeding hits every planted cluster
//! (or core), and the minimal restart count `R` for a target success
//! probability.
//!
//! Supporting cast: [`generators`] builds planted datasets that meet the
//! bounds by construction (plus the two cautionary counterexamples — the
//! multimodal-histogram ring and the unbalanced instance where an enormous
//! gap still is not optimal), [`oracle`] brute-forces the true optimum on
//! tiny instances for ground truth, and [`cli`] ties everything into
//! reproducible, manifest-stamped command-line runs.
//!
//! # Example
//!
//! ```
//! use clustergap::engine::multi_restart;
//! use clustergap::generators::gen_well_clusterable;
//! use clustergap::verifier::{verify, VerdictMode};
//!
//! // Plant three well-separated ball clusters …
//! let planted = gen_well_clusterable(3, &[40, 40, 40], &[1.0, 1.0, 1.0], 2, 1.0, 7)?;
//! // … recover them with restarted k-means++ …
//! let result = multi_restart(&planted.dataset, 3, 10, 42)?;
//! // … and certify the result a posteriori.
//! let verdict = verify(&planted.dataset, &result.partition, VerdictMode::Plain, None)?;
//! assert!(verdict.well_clusterable);
//! assert!(result.partition.is_relabeling_of(&planted.planted_partition));
//! # Ok::<(), clustergap::Error>(())
//! ```

pub mod analytics;
pub mod cli;
pub mod engine;
pub mod error;
pub mod generators;
pub mod geometry;
pub mod oracle;
pub mod verifier;

pub use error::{Error, Result};
