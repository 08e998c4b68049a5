use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid value for {name}: {value} ({reason})")]
    Domain {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("feature `{feature}`: {reason}")]
    InvalidRecord { feature: String, reason: String },

    #[error("feature `{0}` was not followed up (missing follow-up p-values)")]
    NotFollowedUp(String),

    #[error("duplicate feature id `{0}`")]
    DuplicateFeature(String),

    #[error("selected set has {selected} features but only m = {m} were examined")]
    SelectionExceedsM { selected: usize, m: usize },

    #[error("empty selection: no feature was selected for follow-up")]
    EmptySelection,

    #[error("top-k selection asks for {k} features but only {available} records exist")]
    TopKTooLarge { k: usize, available: usize },

    #[error("unknown feature `{0}`")]
    UnknownFeature(String),

    #[error("r-values were computed under mixed configurations: {0}")]
    MixedConfig(String),

    #[error("{0}")]
    Unsupported(String),

    #[error("solver did not converge for feature `{feature}` after {iterations} iterations")]
    NoConvergence { feature: String, iterations: usize },

    #[error("invalid scenario: {0}")]
    Scenario(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub(crate) fn check_open_unit(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 && value < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            name,
            value,
            reason: "must lie in (0, 1)",
        })
    }
}

pub(crate) fn check_l00(value: f64) -> Result<()> {
    if value.is_finite() && (0.0..1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::Domain {
            name: "l00",
            value,
            reason: "must lie in [0, 1)",
        })
    }
}
