//! Domain types shared by the rest of the crate.
//!
//! A feature carries left- and right-sided p-values from the primary study
//! and, when it was followed up, from the follow-up study. The analysis only
//! ever looks at the pair of one-sided p-values in the direction the primary
//! study favours, see [`derive_directed_pair`].

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{check_l00, check_open_unit, Error, Result};

/// Tolerance on `p_left + p_right - 1` before a record is flagged as coming
/// from a discrete test statistic.
pub const DISCRETENESS_TOLERANCE: f64 = 1e-6;

/// True state of one feature in both studies: `-1` left-sided alternative,
/// `0` null, `1` right-sided alternative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HypothesisConfig {
    h1: i8,
    h2: i8,
}

impl HypothesisConfig {
    pub fn new(h1: i8, h2: i8) -> Result<Self> {
        for h in [h1, h2] {
            if !(-1..=1).contains(&h) {
                return Err(Error::Parse(format!(
                    "hypothesis coordinate must be -1, 0 or 1, got {h}"
                )));
            }
        }
        Ok(Self { h1, h2 })
    }

    /// All nine configurations in lexicographic order.
    pub fn all() -> impl Iterator<Item = HypothesisConfig> {
        (-1..=1).flat_map(|h1| (-1..=1).map(move |h2| HypothesisConfig { h1, h2 }))
    }

    pub fn h1(&self) -> i8 {
        self.h1
    }

    pub fn h2(&self) -> i8 {
        self.h2
    }

    /// Same non-null direction in both studies.
    pub fn is_replicated(&self) -> bool {
        self.h1 == self.h2 && self.h1 != 0
    }

    /// The direction a correct claim on this feature must carry, if any.
    pub fn replicated_direction(&self) -> Option<Direction> {
        match (self.h1, self.h2) {
            (1, 1) => Some(Direction::Right),
            (-1, -1) => Some(Direction::Left),
            _ => None,
        }
    }
}

impl fmt::Display for HypothesisConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.h1, self.h2)
    }
}

impl std::str::FromStr for HypothesisConfig {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("expected `h1,h2`, got `{s}`")))?;
        let parse = |v: &str| {
            v.trim()
                .parse::<i8>()
                .map_err(|_| Error::Parse(format!("bad hypothesis coordinate `{v}`")))
        };
        HypothesisConfig::new(parse(a)?, parse(b)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Left,
    Right,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Left => "left",
            Direction::Right => "right",
        })
    }
}

impl std::str::FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "left" => Ok(Direction::Left),
            "right" => Ok(Direction::Right),
            other => Err(Error::Parse(format!("unknown direction `{other}`"))),
        }
    }
}

/// Raw one-sided p-values of a feature in both studies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureRecord {
    pub feature_id: String,
    pub p1_left: f64,
    pub p1_right: f64,
    pub p2_left: Option<f64>,
    pub p2_right: Option<f64>,
}

impl FeatureRecord {
    pub fn new(
        feature_id: impl Into<String>,
        p1_left: f64,
        p1_right: f64,
        p2_left: f64,
        p2_right: f64,
    ) -> Self {
        Self {
            feature_id: feature_id.into(),
            p1_left,
            p1_right,
            p2_left: Some(p2_left),
            p2_right: Some(p2_right),
        }
    }

    /// A record with primary-study p-values only.
    pub fn primary_only(feature_id: impl Into<String>, p1_left: f64, p1_right: f64) -> Self {
        Self {
            feature_id: feature_id.into(),
            p1_left,
            p1_right,
            p2_left: None,
            p2_right: None,
        }
    }

    pub fn is_followed_up(&self) -> bool {
        self.p2_left.is_some() && self.p2_right.is_some()
    }

    /// The direction favoured by the primary study. Ties go to `Left`.
    pub fn favored_direction(&self) -> Direction {
        if self.p1_right < self.p1_left {
            Direction::Right
        } else {
            Direction::Left
        }
    }

    /// `min(p1_left, p1_right)`.
    pub fn p1_directed(&self) -> f64 {
        self.p1_left.min(self.p1_right)
    }

    /// Checks the type invariants: every present p-value is a probability and
    /// follow-up p-values come in pairs.
    pub fn validate(&self) -> Result<()> {
        let bad = |reason: String| Error::InvalidRecord {
            feature: self.feature_id.clone(),
            reason,
        };
        let check = |name: &str, p: f64| {
            if p.is_nan() || !(0.0..=1.0).contains(&p) {
                Err(bad(format!("{name} = {p} is not a probability in [0, 1]")))
            } else {
                Ok(())
            }
        };
        check("p1_left", self.p1_left)?;
        check("p1_right", self.p1_right)?;
        match (self.p2_left, self.p2_right) {
            (Some(l), Some(r)) => {
                check("p2_left", l)?;
                check("p2_right", r)?;
            }
            (None, None) => {}
            _ => {
                return Err(bad(
                    "follow-up p-values must be both present or both absent".into(),
                ))
            }
        }
        Ok(())
    }

    /// Whether either study's one-sided p-values fail to sum to one.
    pub fn looks_discrete(&self) -> bool {
        let off = |l: f64, r: f64| (l + r - 1.0).abs() > DISCRETENESS_TOLERANCE;
        off(self.p1_left, self.p1_right)
            || matches!((self.p2_left, self.p2_right), (Some(l), Some(r)) if off(l, r))
    }
}

/// One-sided p-values of both studies in the direction favoured by the
/// primary study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectedPair {
    pub feature_id: String,
    pub p1_directed: f64,
    pub p2_directed: f64,
    pub direction: Direction,
}

impl DirectedPair {
    /// Builds a pair directly, bypassing derivation from a record. Handy for
    /// tests and for callers who already hold directed p-values.
    pub fn new(feature_id: impl Into<String>, p1: f64, p2: f64, direction: Direction) -> Self {
        Self {
            feature_id: feature_id.into(),
            p1_directed: p1,
            p2_directed: p2,
            direction,
        }
    }
}

pub fn derive_directed_pair(rec: &FeatureRecord) -> Result<DirectedPair> {
    rec.validate()?;
    let (p2_left, p2_right) = match (rec.p2_left, rec.p2_right) {
        (Some(l), Some(r)) => (l, r),
        _ => return Err(Error::NotFollowedUp(rec.feature_id.clone())),
    };
    let direction = rec.favored_direction();
    let (p1, p2) = match direction {
        Direction::Left => (rec.p1_left, p2_left),
        Direction::Right => (rec.p1_right, p2_right),
    };
    Ok(DirectedPair {
        feature_id: rec.feature_id.clone(),
        p1_directed: p1,
        p2_directed: p2,
        direction,
    })
}

/// How the primary-study p-values may depend on each other.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Dependency {
    /// Independent primary-study p-values.
    Independent,
    /// Arbitrary dependence; `m` is inflated to `m * H_m`.
    ArbitraryMStar,
    /// Arbitrary dependence, with every selected feature's two-sided primary
    /// p-value at most `t`.
    ArbitraryThreshold { t: f64 },
}

impl Dependency {
    pub fn label(&self) -> &'static str {
        match self {
            Dependency::Independent => "indep",
            Dependency::ArbitraryMStar => "mstar",
            Dependency::ArbitraryThreshold { .. } => "threshold",
        }
    }

    pub fn threshold(&self) -> Option<f64> {
        match *self {
            Dependency::ArbitraryThreshold { t } => Some(t),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Dependency::ArbitraryThreshold { t } = *self {
            check_open_unit("t", t)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ErrorFlavor {
    Fdr,
    Fwer,
}

impl fmt::Display for ErrorFlavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ErrorFlavor::Fdr => "fdr",
            ErrorFlavor::Fwer => "fwer",
        })
    }
}

impl std::str::FromStr for ErrorFlavor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "fdr" => Ok(ErrorFlavor::Fdr),
            "fwer" => Ok(ErrorFlavor::Fwer),
            other => Err(Error::Parse(format!("unknown error flavor `{other}`"))),
        }
    }
}

/// Parameters of one replicability analysis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisConfig {
    /// Number of features examined in the primary study.
    pub m: usize,
    /// Conservative lower bound on the fraction of features null in both studies.
    pub l00: f64,
    /// Emphasis given to the follow-up study.
    pub c2: f64,
    pub dependency: Dependency,
    pub error_flavor: ErrorFlavor,
    pub level: f64,
}

impl AnalysisConfig {
    pub const DEFAULT_L00: f64 = 0.8;
    pub const DEFAULT_C2: f64 = 0.5;
    pub const DEFAULT_LEVEL: f64 = 0.05;

    /// Defaults: `l00 = 0.8`, `c2 = 0.5`, independent primary study, FDR at 0.05.
    pub fn new(m: usize) -> Self {
        Self {
            m,
            l00: Self::DEFAULT_L00,
            c2: Self::DEFAULT_C2,
            dependency: Dependency::Independent,
            error_flavor: ErrorFlavor::Fdr,
            level: Self::DEFAULT_LEVEL,
        }
    }

    pub fn with_l00(mut self, l00: f64) -> Self {
        self.l00 = l00;
        self
    }

    pub fn with_c2(mut self, c2: f64) -> Self {
        self.c2 = c2;
        self
    }

    pub fn with_dependency(mut self, dependency: Dependency) -> Self {
        self.dependency = dependency;
        self
    }

    pub fn with_flavor(mut self, flavor: ErrorFlavor) -> Self {
        self.error_flavor = flavor;
        self
    }

    pub fn with_level(mut self, level: f64) -> Self {
        self.level = level;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::Domain {
                name: "m",
                value: 0.0,
                reason: "must be a positive integer",
            });
        }
        check_l00(self.l00)?;
        check_open_unit("c2", self.c2)?;
        check_open_unit("level", self.level)?;
        self.dependency.validate()
    }
}

/// Records that passed [`validate_input`], plus any non-fatal warnings.
#[derive(Debug, Clone)]
pub struct ValidatedDataset {
    pub records: Vec<FeatureRecord>,
    pub warnings: Vec<String>,
}

impl ValidatedDataset {
    pub fn followed_up(&self) -> impl Iterator<Item = &FeatureRecord> {
        self.records.iter().filter(|r| r.is_followed_up())
    }
}

/// Rejects datasets that break the record invariants. Records whose
/// one-sided p-values do not sum to one are accepted with a warning, since
/// discrete test statistics are allowed.
pub fn validate_input(records: &[FeatureRecord], config: &AnalysisConfig) -> Result<ValidatedDataset> {
    config.validate()?;
    let mut seen = HashSet::with_capacity(records.len());
    let mut warnings = Vec::new();
    for rec in records {
        if !seen.insert(rec.feature_id.as_str()) {
            return Err(Error::DuplicateFeature(rec.feature_id.clone()));
        }
        rec.validate()?;
        if rec.looks_discrete() {
            warnings.push(format!(
                "feature `{}`: one-sided p-values do not sum to 1 (discrete test statistic?)",
                rec.feature_id
            ));
        }
    }
    if records.len() > config.m {
        return Err(Error::SelectionExceedsM {
            selected: records.len(),
            m: config.m,
        });
    }
    if !records.iter().any(FeatureRecord::is_followed_up) {
        return Err(Error::EmptySelection);
    }
    Ok(ValidatedDataset {
        records: records.to_vec(),
        warnings,
    })
}
