//! Directional replicability analysis for two-sided hypotheses tested in a
//! primary study and re-tested in a follow-up study.
//!
//! Each followed-up feature is tested in the direction its primary-study
//! statistic favours. The crate computes FDR and FWER r-values from the
//! resulting pairs of one-sided p-values, declares replicability claims at a
//! level, and ships a Monte Carlo harness to check directional error control.
//!
//! ```
//! use repliq::{analyze, AnalysisConfig, ErrorFlavor, FeatureRecord, SelectionRule};
//!
//! let records = vec![
//!     FeatureRecord::new("rs1", 1e-6, 1.0 - 1e-6, 1e-4, 1.0 - 1e-4),
//!     FeatureRecord::new("rs2", 0.9999, 1e-4, 0.3, 0.7),
//! ];
//! let config = AnalysisConfig::new(1000);
//! let report = analyze(&records, &config, SelectionRule::Provided, &[ErrorFlavor::Fdr]).unwrap();
//! let claims = report.claims(ErrorFlavor::Fdr).unwrap().unwrap();
//! assert_eq!(claims.claims[0].feature_id, "rs1");
//! ```

pub mod analysis;
pub mod cli;
pub mod error;
pub mod procedure;
pub mod rvalue;
pub mod selection;
pub mod simulation;
pub mod types;

pub use analysis::{analyze, AnalysisReport};
pub use error::{Error, Result};
pub use procedure::{
    bonferroni_claims, claims_at_level, directional_error_tally, stepup_oracle, Claim, ClaimSet,
    ErrorTally, StepUpOutcome,
};
pub use rvalue::{
    adjust_step_up, bonferroni_values, c1, c1_tilde, e_values, f_values, fdr_rvalues,
    fwer_rvalues, harmonic, m_star, rvalues, solve_fdr_rvalue, solve_fwer_rvalue, C1Tilde,
    EvaluationContext, RValueResult, RValues,
};
pub use selection::{select, stability_check, two_sided_p, Selection, SelectionRule, StabilityReport};
pub use simulation::{
    estimate_error_rates, generate_replication, parse_dependency, theoretical_fdr_bound,
    SimResult, SimScenario, StudyDependence,
};
pub use types::{
    derive_directed_pair, validate_input, AnalysisConfig, Dependency, DirectedPair, Direction,
    ErrorFlavor, FeatureRecord, HypothesisConfig, ValidatedDataset,
};
