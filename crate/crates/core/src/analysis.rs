//! End-to-end analysis: validate, select, direct, compute r-values.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::procedure::{claims_at_level, ClaimSet};
use crate::rvalue::{rvalues, EvaluationContext, RValues};
use crate::selection::{select, two_sided_p, Selection, SelectionRule};
use crate::types::{
    derive_directed_pair, validate_input, AnalysisConfig, DirectedPair, ErrorFlavor, FeatureRecord,
};

/// Result of [`analyze`]. `pairs` and the r-value lists share one order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub config: AnalysisConfig,
    pub selection_rule: SelectionRule,
    pub selection: Selection,
    pub pairs: Vec<DirectedPair>,
    pub fdr: Option<RValues>,
    pub fwer: Option<RValues>,
    pub warnings: Vec<String>,
}

impl AnalysisReport {
    pub fn rvalues(&self, flavor: ErrorFlavor) -> Option<&RValues> {
        match flavor {
            ErrorFlavor::Fdr => self.fdr.as_ref(),
            ErrorFlavor::Fwer => self.fwer.as_ref(),
        }
    }

    /// Claims at the configured level for `flavor`, if it was computed.
    pub fn claims(&self, flavor: ErrorFlavor) -> Option<Result<ClaimSet>> {
        self.claims_at(flavor, self.config.level)
    }

    pub fn claims_at(&self, flavor: ErrorFlavor, level: f64) -> Option<Result<ClaimSet>> {
        self.rvalues(flavor)
            .map(|rv| claims_at_level(&rv.results, &self.pairs, level))
    }

    pub fn c1_tilde_fallback(&self) -> bool {
        self.fdr.as_ref().is_some_and(|r| r.c1_tilde_fallback)
    }
}

/// Runs the full pipeline for the requested flavors. Fails on invalid input,
/// on an empty selection, when a selected feature has no follow-up p-values,
/// and in threshold mode when a selected two-sided primary p-value exceeds `t`.
pub fn analyze(
    records: &[FeatureRecord],
    config: &AnalysisConfig,
    rule: SelectionRule,
    flavors: &[ErrorFlavor],
) -> Result<AnalysisReport> {
    let dataset = validate_input(records, config)?;
    let mut warnings = dataset.warnings;
    let selection = select(&dataset.records, rule, config.m)?;
    for id in &selection.excluded_unfavorable {
        warnings.push(format!(
            "feature `{id}` excluded: favoured one-sided primary p-value exceeds 0.5"
        ));
    }
    if selection.is_empty() {
        return Err(Error::EmptySelection);
    }

    let mut pairs = Vec::with_capacity(selection.len());
    for id in &selection.selected {
        let rec = dataset
            .records
            .iter()
            .find(|r| &r.feature_id == id)
            .ok_or_else(|| Error::UnknownFeature(id.clone()))?;
        if let Some(t) = config.dependency.threshold() {
            let p = two_sided_p(rec);
            if p > t {
                return Err(Error::InvalidRecord {
                    feature: id.clone(),
                    reason: format!(
                        "two-sided primary p-value {p} exceeds the threshold t = {t} required by threshold mode"
                    ),
                });
            }
        }
        pairs.push(derive_directed_pair(rec)?);
    }

    let ctx = EvaluationContext::from_config(config, pairs.len())?;
    let mut fdr = None;
    let mut fwer = None;
    for &flavor in flavors {
        let rv = rvalues(&pairs, &ctx, flavor)?;
        match flavor {
            ErrorFlavor::Fdr => fdr = Some(rv),
            ErrorFlavor::Fwer => fwer = Some(rv),
        }
    }
    if fdr.as_ref().is_some_and(|r| r.c1_tilde_fallback) {
        warnings.push("c1_tilde used its conservative fallback branch".into());
    }

    Ok(AnalysisReport {
        config: config.clone(),
        selection_rule: rule,
        selection,
        pairs,
        fdr,
        fwer,
        warnings,
    })
}
