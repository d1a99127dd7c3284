//! Allele-based case-control association tests.
//!
//! The crate provides the classical allele test `T`, the prevalence-standardized
//! test `W` (with its weighted generalization `W_delta`, a continuity-corrected
//! variant and the combined statistic `U`), closed-form asymptotic power
//! functions under a two-locus LD model, and a seeded Monte Carlo engine for
//! type I error and power calibration.

pub mod error;
pub mod ks;
pub mod model;
pub mod normal;
pub mod power;
pub mod sim;
pub mod stats;

pub use error::{Error, Result};
pub use model::{
    delta_bounds, haplotype_freqs, marker_conditional_freqs, DeltaBounds, DesignConstants,
    HaplotypeFreqs, MarkerSpec, PenetranceModel, PopulationSummary,
};
pub use stats::{AlleleCounts, ContinuityDirection, EffectSize, TestReport};
