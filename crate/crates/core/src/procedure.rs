//! Replicability claims at a level, the equivalent step-up procedure, and
//! directional error accounting against a known truth.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{check_open_unit, Error, Result};
use crate::rvalue::{bonferroni_values, c1, EvaluationContext, RValueResult};
use crate::types::{Dependency, DirectedPair, Direction, ErrorFlavor, HypothesisConfig};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Claim {
    pub feature_id: String,
    pub direction: Direction,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClaimSet {
    pub level: f64,
    pub flavor: ErrorFlavor,
    pub claims: Vec<Claim>,
}

impl ClaimSet {
    pub fn ids(&self) -> HashSet<&str> {
        self.claims.iter().map(|c| c.feature_id.as_str()).collect()
    }

    pub fn len(&self) -> usize {
        self.claims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.claims.is_empty()
    }
}

/// Declares every feature with r-value at most `level` as replicated, in the
/// direction favoured by the primary study.
pub fn claims_at_level(
    rvalues: &[RValueResult],
    pairs: &[DirectedPair],
    level: f64,
) -> Result<ClaimSet> {
    if !(0.0..1.0).contains(&level) {
        return Err(Error::Domain {
            name: "level",
            value: level,
            reason: "must lie in [0, 1)",
        });
    }
    let flavor = match rvalues.first() {
        Some(r) => r.flavor,
        None => {
            return Ok(ClaimSet {
                level,
                flavor: ErrorFlavor::Fdr,
                claims: Vec::new(),
            })
        }
    };
    if rvalues.iter().any(|r| r.flavor != flavor) {
        return Err(Error::MixedConfig("r-values of both flavors were mixed".into()));
    }
    if rvalues.len() != pairs.len() {
        return Err(Error::MixedConfig(format!(
            "{} r-values for {} pairs",
            rvalues.len(),
            pairs.len()
        )));
    }
    let mut claims = Vec::new();
    for (r, p) in rvalues.iter().zip(pairs) {
        if r.feature_id != p.feature_id {
            return Err(Error::MixedConfig(format!(
                "r-value for `{}` paired with `{}`",
                r.feature_id, p.feature_id
            )));
        }
        if r.r_value <= level {
            claims.push(Claim {
                feature_id: p.feature_id.clone(),
                direction: p.direction,
            });
        }
    }
    Ok(ClaimSet {
        level,
        flavor,
        claims,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepUpOutcome {
    /// Number of replicability claims.
    pub r2: usize,
    /// Claimed feature ids, in pair order.
    pub claimed: Vec<String>,
}

/// Step-up procedure equivalent to thresholding FDR r-values at `q`: the
/// largest `r` such that exactly `r` features have
/// `p1 <= r c1(q) q / m` and `p2 <= r c2 q / R1`. Uses `m * H_m` in place of
/// `m` in `m*` mode; threshold mode has no step-up form and is rejected.
pub fn stepup_oracle(pairs: &[DirectedPair], q: f64, ctx: &EvaluationContext) -> Result<StepUpOutcome> {
    check_open_unit("q", q)?;
    if let Dependency::ArbitraryThreshold { .. } = ctx.dependency {
        return Err(Error::Unsupported(
            "the step-up procedure has no threshold-mode equivalent".into(),
        ));
    }
    let m = ctx.m_effective;
    let r1 = pairs.len();
    let c1q = c1(q, ctx.l00, ctx.c2)?;
    let passes = |p: &DirectedPair, r: usize| {
        let r = r as f64;
        p.p1_directed <= r * c1q * q / m && p.p2_directed <= r * ctx.c2 * q / r1 as f64
    };
    for r in (1..=r1).rev() {
        let count = pairs.iter().filter(|p| passes(p, r)).count();
        if count == r {
            let claimed = pairs
                .iter()
                .filter(|p| passes(p, r))
                .map(|p| p.feature_id.clone())
                .collect();
            return Ok(StepUpOutcome { r2: r, claimed });
        }
    }
    Ok(StepUpOutcome {
        r2: 0,
        claimed: Vec::new(),
    })
}

/// Features with `f^Bonf_j(alpha) <= alpha`; the same set as FWER r-values
/// at most `alpha`.
pub fn bonferroni_claims(
    pairs: &[DirectedPair],
    alpha: f64,
    ctx: &EvaluationContext,
) -> Result<Vec<String>> {
    check_open_unit("alpha", alpha)?;
    let f = bonferroni_values(alpha, pairs, ctx)?;
    Ok(pairs
        .iter()
        .zip(f)
        .filter(|(_, v)| *v <= alpha)
        .map(|(p, _)| p.feature_id.clone())
        .collect())
}

/// Counts of claims (`r`), true directional claims (`s`) and false ones (`v`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ErrorTally {
    pub r: usize,
    pub s: usize,
    pub v: usize,
}

impl ErrorTally {
    /// `(R - S) / max(R, 1)`.
    pub fn false_discovery_proportion(&self) -> f64 {
        self.v as f64 / self.r.max(1) as f64
    }

    pub fn any_false(&self) -> bool {
        self.v > 0
    }
}

/// A claim is true only if it is Right on a `(1,1)` feature or Left on a
/// `(-1,-1)` feature; every other claim is a false directional claim.
pub fn directional_error_tally(
    claims: &ClaimSet,
    truth: &HashMap<String, HypothesisConfig>,
) -> Result<ErrorTally> {
    let mut tally = ErrorTally::default();
    for claim in &claims.claims {
        let h = truth
            .get(&claim.feature_id)
            .ok_or_else(|| Error::UnknownFeature(claim.feature_id.clone()))?;
        tally.r += 1;
        if h.replicated_direction() == Some(claim.direction) {
            tally.s += 1;
        } else {
            tally.v += 1;
        }
    }
    Ok(tally)
}
