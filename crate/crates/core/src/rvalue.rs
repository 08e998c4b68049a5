//! r-value computation.
//!
//! For a candidate level `x`, every followed-up feature gets an e-value
//! combining its two directed p-values,
//!
//! ```text
//! e_j(x) = max( p1_j / c1(x),  R1 * p2_j / (m * c2) ),
//! c1(x)  = (1 - c2) / (1 - l00 * (1 - c2 * x)),
//! ```
//!
//! and the FDR r-value of feature `i` is the point where the
//! Benjamini-Hochberg style adjustment `f_i(x)` of its e-value meets `x`.
//! The FWER r-value uses the Bonferroni adjustment `m * e_j(x)` instead.
//!
//! Under arbitrary dependence in the primary study either `m` is inflated to
//! `m * H_m` ([`m_star`]) or `c1` is replaced by the harmonic-penalised
//! [`c1_tilde`] when selected primary p-values are bounded by a threshold.

use serde::{Deserialize, Serialize};

use crate::error::{check_l00, check_open_unit, Error, Result};
use crate::types::{AnalysisConfig, Dependency, DirectedPair, ErrorFlavor};

/// Lower end of the search interval; also the smallest r-value reported.
pub const SOLVER_EPSILON: f64 = 1e-12;
/// Absolute tolerance the bisection must reach.
pub const SOLVER_TOLERANCE: f64 = 1e-10;
pub const SOLVER_MAX_ITER: usize = 200;
/// Grid step used to bracket the first crossing in threshold mode.
pub const THRESHOLD_GRID_STEP: f64 = 1e-4;

const EULER_MASCHERONI: f64 = 0.577_215_664_901_532_9;

/// `c1(x) = (1 - c2) / (1 - l00 (1 - c2 x))`.
pub fn c1(x: f64, l00: f64, c2: f64) -> Result<f64> {
    if !(x.is_finite() && x > 0.0 && x <= 1.0) {
        return Err(Error::Domain {
            name: "x",
            value: x,
            reason: "must lie in (0, 1]",
        });
    }
    check_l00(l00)?;
    check_open_unit("c2", c2)?;
    Ok(c1_unchecked(x, l00, c2))
}

#[inline]
fn c1_unchecked(x: f64, l00: f64, c2: f64) -> f64 {
    (1.0 - c2) / (1.0 - l00 * (1.0 - c2 * x))
}

/// The `n`-th harmonic number `1 + 1/2 + ... + 1/n` (`0` for `n = 0`).
pub fn harmonic(n: u64) -> f64 {
    if n < 64 {
        // Summed smallest term first.
        return (1..=n).rev().map(|i| 1.0 / i as f64).sum();
    }
    let k = n as f64;
    let k2 = k * k;
    k.ln() + EULER_MASCHERONI + 1.0 / (2.0 * k) - 1.0 / (12.0 * k2) + 1.0 / (120.0 * k2 * k2)
        - 1.0 / (252.0 * k2 * k2 * k2)
}

/// `m * H_m`, the inflated number of features used under arbitrary
/// dependence in the primary study.
pub fn m_star(m: usize) -> Result<f64> {
    if m == 0 {
        return Err(Error::Domain {
            name: "m",
            value: 0.0,
            reason: "must be a positive integer",
        });
    }
    Ok(m as f64 * harmonic(m as u64))
}

/// Outcome of [`c1_tilde`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct C1Tilde {
    pub value: f64,
    /// Upper limit `k` of the harmonic sum on the chosen branch.
    pub branch: u64,
    /// `true` when no branch solved the defining equation exactly and the
    /// conservative candidate was used instead.
    pub fallback: bool,
}

/// Largest `a` with `a * (1 + H_k) = c1(x)` where `k = ceil(t m / (a x)) - 1`.
///
/// Candidates are `a_k = c1(x) / (1 + H_k)`; branch `k` is consistent when
/// `ceil(t m / (a_k x)) - 1 = k`. The smallest `k` with
/// `ceil(t m / (a_k x)) - 1 <= k` is found by exponential then binary search
/// (the predicate is monotone in `k`), and is consistent in exact arithmetic.
pub fn c1_tilde(x: f64, t: f64, m: usize, l00: f64, c2: f64) -> Result<C1Tilde> {
    check_open_unit("t", t)?;
    if m == 0 {
        return Err(Error::Domain {
            name: "m",
            value: 0.0,
            reason: "must be a positive integer",
        });
    }
    let c1 = c1(x, l00, c2)?;
    Ok(c1_tilde_unchecked(c1, x, t, m))
}

fn c1_tilde_unchecked(c1: f64, x: f64, t: f64, m: usize) -> C1Tilde {
    let scale = t * m as f64 / x;
    let candidate = |k: u64| c1 / (1.0 + harmonic(k));
    let upper_index = |a: f64| (scale / a).ceil() - 1.0;
    let admissible = |k: u64| upper_index(candidate(k)) <= k as f64;

    if admissible(0) {
        return C1Tilde {
            value: c1,
            branch: 0,
            fallback: upper_index(c1) != 0.0,
        };
    }
    let mut hi: u64 = 1;
    while !admissible(hi) {
        hi = hi.saturating_mul(2);
        if hi == u64::MAX {
            break;
        }
    }
    let mut lo = hi / 2; // not admissible
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if admissible(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let value = candidate(hi);
    C1Tilde {
        value,
        branch: hi,
        fallback: upper_index(value) != hi as f64,
    }
}

/// Everything besides the p-values that the e-values and adjustments need.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationContext {
    /// Features examined in the primary study.
    pub m: usize,
    /// `m`, or `m * H_m` under [`Dependency::ArbitraryMStar`].
    pub m_effective: f64,
    /// Number of features followed up.
    pub r1: usize,
    pub c2: f64,
    pub l00: f64,
    pub dependency: Dependency,
}

impl EvaluationContext {
    pub fn new(m: usize, r1: usize, l00: f64, c2: f64, dependency: Dependency) -> Result<Self> {
        check_l00(l00)?;
        check_open_unit("c2", c2)?;
        dependency.validate()?;
        if r1 == 0 {
            return Err(Error::EmptySelection);
        }
        if r1 > m {
            return Err(Error::SelectionExceedsM { selected: r1, m });
        }
        let m_effective = match dependency {
            Dependency::ArbitraryMStar => m_star(m)?,
            _ => m as f64,
        };
        Ok(Self {
            m,
            m_effective,
            r1,
            c2,
            l00,
            dependency,
        })
    }

    pub fn from_config(config: &AnalysisConfig, r1: usize) -> Result<Self> {
        Self::new(config.m, r1, config.l00, config.c2, config.dependency)
    }

    /// The context the Bonferroni adjustment runs under: plain `m` and `c1`,
    /// whatever the primary-study dependence.
    pub fn for_fwer(&self) -> Self {
        Self {
            m_effective: self.m as f64,
            dependency: Dependency::Independent,
            ..self.clone()
        }
    }

    /// `c1(x)`, or `c1_tilde(x)` in threshold mode; the flag reports a
    /// conservative fallback.
    fn primary_factor(&self, x: f64) -> (f64, bool) {
        let c1 = c1_unchecked(x, self.l00, self.c2);
        match self.dependency {
            Dependency::ArbitraryThreshold { t } => {
                let ct = c1_tilde_unchecked(c1, x, t, self.m);
                (ct.value, ct.fallback)
            }
            _ => (c1, false),
        }
    }

    fn e_value(&self, pair: &DirectedPair, factor: f64) -> f64 {
        let first = pair.p1_directed / factor;
        let second = self.r1 as f64 * pair.p2_directed / (self.m_effective * self.c2);
        first.max(second)
    }

    fn check_pairs(&self, pairs: &[DirectedPair]) -> Result<()> {
        if pairs.is_empty() {
            return Err(Error::EmptySelection);
        }
        if pairs.len() != self.r1 {
            return Err(Error::MixedConfig(format!(
                "context expects R1 = {} pairs, got {}",
                self.r1,
                pairs.len()
            )));
        }
        Ok(())
    }
}

fn check_x(x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 && x <= 1.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            name: "x",
            value: x,
            reason: "must lie in (0, 1]",
        })
    }
}

/// e-values of all pairs at level `x`, in input order.
pub fn e_values(x: f64, pairs: &[DirectedPair], ctx: &EvaluationContext) -> Result<Vec<f64>> {
    check_x(x)?;
    ctx.check_pairs(pairs)?;
    Ok(e_values_unchecked(x, pairs, ctx).0)
}

fn e_values_unchecked(x: f64, pairs: &[DirectedPair], ctx: &EvaluationContext) -> (Vec<f64>, bool) {
    let (factor, fallback) = ctx.primary_factor(x);
    (pairs.iter().map(|p| ctx.e_value(p, factor)).collect(), fallback)
}

/// Step-up adjustment of `e`: sort ascending, give ties the maximum rank,
/// scale by `m_effective / rank` and take the running minimum from the top.
pub fn adjust_step_up(e: &[f64], m_effective: f64) -> Vec<f64> {
    let n = e.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| e[a].total_cmp(&e[b]));

    let mut scaled = vec![0.0; n];
    let mut pos = 0;
    while pos < n {
        let mut end = pos;
        while end + 1 < n && e[order[end + 1]] == e[order[pos]] {
            end += 1;
        }
        let rank = (end + 1) as f64;
        for slot in scaled.iter_mut().take(end + 1).skip(pos) {
            *slot = e[order[pos]] * m_effective / rank;
        }
        pos = end + 1;
    }

    let mut out = vec![0.0; n];
    let mut running = f64::INFINITY;
    for pos in (0..n).rev() {
        running = running.min(scaled[pos]);
        out[order[pos]] = running;
    }
    out
}

/// `f_i(x)` for every pair, in input order.
pub fn f_values(x: f64, pairs: &[DirectedPair], ctx: &EvaluationContext) -> Result<Vec<f64>> {
    check_x(x)?;
    ctx.check_pairs(pairs)?;
    Ok(f_values_unchecked(x, pairs, ctx).0)
}

fn f_values_unchecked(x: f64, pairs: &[DirectedPair], ctx: &EvaluationContext) -> (Vec<f64>, bool) {
    let (e, fallback) = e_values_unchecked(x, pairs, ctx);
    (adjust_step_up(&e, ctx.m_effective), fallback)
}

/// `f^Bonf_j(x) = m * e_j(x)` for every pair. Always evaluated with plain `m`
/// and `c1`.
pub fn bonferroni_values(
    x: f64,
    pairs: &[DirectedPair],
    ctx: &EvaluationContext,
) -> Result<Vec<f64>> {
    check_x(x)?;
    ctx.check_pairs(pairs)?;
    let ctx = ctx.for_fwer();
    let (e, _) = e_values_unchecked(x, pairs, &ctx);
    Ok(e.into_iter().map(|v| v * ctx.m as f64).collect())
}

fn bonferroni_single(x: f64, pair: &DirectedPair, ctx: &EvaluationContext) -> f64 {
    let factor = c1_unchecked(x, ctx.l00, ctx.c2);
    let first = pair.p1_directed / factor;
    let second = ctx.r1 as f64 * pair.p2_directed / (ctx.m as f64 * ctx.c2);
    ctx.m as f64 * first.max(second)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RValueResult {
    pub feature_id: String,
    /// In `(0, 1]`; exactly `1` when no crossing exists in `(0, 1)`.
    pub r_value: f64,
    pub flavor: ErrorFlavor,
}

/// r-values of every followed-up feature, in pair order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RValues {
    pub flavor: ErrorFlavor,
    pub dependency: Dependency,
    pub results: Vec<RValueResult>,
    /// Set when any `c1_tilde` evaluation used the conservative fallback.
    pub c1_tilde_fallback: bool,
}

impl RValues {
    pub fn values(&self) -> Vec<f64> {
        self.results.iter().map(|r| r.r_value).collect()
    }
}

/// Returns the smallest `x` in `[lo, hi]` (to full resolution) with
/// `g(x) <= 0`, assuming `g(lo) > 0 >= g(hi)`.
fn bisect_crossing(
    mut lo: f64,
    mut hi: f64,
    mut g: impl FnMut(f64) -> f64,
    feature: &str,
) -> Result<f64> {
    for _ in 0..SOLVER_MAX_ITER {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Ok(hi);
        }
        if g(mid) <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    if hi - lo <= SOLVER_TOLERANCE {
        Ok(hi)
    } else {
        Err(Error::NoConvergence {
            feature: feature.to_string(),
            iterations: SOLVER_MAX_ITER,
        })
    }
}

/// Solves `g(x) = f(x) - x = 0` on `(0, 1)` where the set `{x: g(x) <= 0}`
/// is an interval reaching up to 1.
fn solve_monotone(mut g: impl FnMut(f64) -> f64, feature: &str) -> Result<f64> {
    let lo = SOLVER_EPSILON;
    let hi = 1.0 - SOLVER_EPSILON;
    if g(lo) <= 0.0 {
        return Ok(lo);
    }
    if g(hi) > 0.0 {
        return Ok(1.0);
    }
    bisect_crossing(lo, hi, g, feature)
}

fn check_index(i: usize, pairs: &[DirectedPair]) -> Result<()> {
    if i < pairs.len() {
        Ok(())
    } else {
        Err(Error::UnknownFeature(format!("index {i}")))
    }
}

/// FDR r-value of the `i`-th pair.
///
/// Independent and `m*` modes bisect on `f_i(x) - x`, whose non-positive set
/// is an interval `[r_i, 1)`. Threshold mode returns `min{x: f_i(x) <= x}`,
/// located by a grid scan and refined by bisection.
pub fn solve_fdr_rvalue(
    i: usize,
    pairs: &[DirectedPair],
    ctx: &EvaluationContext,
) -> Result<RValueResult> {
    ctx.check_pairs(pairs)?;
    check_index(i, pairs)?;
    let feature = pairs[i].feature_id.as_str();
    let r_value = match ctx.dependency {
        Dependency::ArbitraryThreshold { .. } => {
            let eval = |x: f64| f_values_unchecked(x, pairs, ctx).0[i] - x;
            first_crossing_scan(eval, feature)?
        }
        _ => solve_monotone(|x| f_values_unchecked(x, pairs, ctx).0[i] - x, feature)?,
    };
    Ok(RValueResult {
        feature_id: feature.to_string(),
        r_value,
        flavor: ErrorFlavor::Fdr,
    })
}

fn first_crossing_scan(mut g: impl FnMut(f64) -> f64, feature: &str) -> Result<f64> {
    let mut prev = SOLVER_EPSILON;
    if g(prev) <= 0.0 {
        return Ok(prev);
    }
    for x in grid_points() {
        if g(x) <= 0.0 {
            return bisect_crossing(prev, x, g, feature);
        }
        prev = x;
    }
    Ok(1.0)
}

/// Grid `1e-4, 2e-4, ..., 0.9999` followed by `1 - eps`.
fn grid_points() -> impl Iterator<Item = f64> {
    let steps = (1.0 / THRESHOLD_GRID_STEP).round() as usize;
    (1..steps)
        .map(|k| k as f64 * THRESHOLD_GRID_STEP)
        .chain(std::iter::once(1.0 - SOLVER_EPSILON))
}

/// FWER (Bonferroni) r-value of the `j`-th pair: the crossing of
/// `m * e_j(x) = x`, always under plain `m` and `c1`.
pub fn solve_fwer_rvalue(
    j: usize,
    pairs: &[DirectedPair],
    ctx: &EvaluationContext,
) -> Result<RValueResult> {
    ctx.check_pairs(pairs)?;
    check_index(j, pairs)?;
    let pair = &pairs[j];
    let r_value = solve_monotone(|x| bonferroni_single(x, pair, ctx) - x, &pair.feature_id)?;
    Ok(RValueResult {
        feature_id: pair.feature_id.clone(),
        r_value,
        flavor: ErrorFlavor::Fwer,
    })
}

/// FDR r-values of all pairs.
pub fn fdr_rvalues(pairs: &[DirectedPair], ctx: &EvaluationContext) -> Result<RValues> {
    ctx.check_pairs(pairs)?;
    let (results, fallback) = match ctx.dependency {
        Dependency::ArbitraryThreshold { .. } => threshold_rvalues(pairs, ctx)?,
        _ => {
            let results = (0..pairs.len())
                .map(|i| solve_fdr_rvalue(i, pairs, ctx))
                .collect::<Result<Vec<_>>>()?;
            (results, false)
        }
    };
    Ok(RValues {
        flavor: ErrorFlavor::Fdr,
        dependency: ctx.dependency,
        results,
        c1_tilde_fallback: fallback,
    })
}

/// Threshold mode for all features at once: one shared grid scan, then a
/// per-feature bisection inside the first bracketing cell.
fn threshold_rvalues(
    pairs: &[DirectedPair],
    ctx: &EvaluationContext,
) -> Result<(Vec<RValueResult>, bool)> {
    let n = pairs.len();
    let mut fallback = false;
    let mut eval = |x: f64| {
        let (f, fb) = f_values_unchecked(x, pairs, ctx);
        fallback |= fb;
        f
    };
    // (lo, hi) bracket per feature; hi = None means no crossing yet.
    let mut brackets: Vec<Option<(f64, f64)>> = vec![None; n];
    let mut remaining = n;
    let mut prev = SOLVER_EPSILON;
    let start = eval(prev);
    let mut settled = vec![None; n];
    for (i, fi) in start.iter().enumerate() {
        if *fi <= prev {
            settled[i] = Some(prev);
            remaining -= 1;
        }
    }
    for x in grid_points() {
        if remaining == 0 {
            break;
        }
        let f = eval(x);
        for i in 0..n {
            if settled[i].is_none() && brackets[i].is_none() && f[i] <= x {
                brackets[i] = Some((prev, x));
                remaining -= 1;
            }
        }
        prev = x;
    }
    let mut results = Vec::with_capacity(n);
    for i in 0..n {
        let feature = pairs[i].feature_id.as_str();
        let r_value = match (settled[i], brackets[i]) {
            (Some(r), _) => r,
            (None, Some((lo, hi))) => bisect_crossing(lo, hi, |x| eval(x)[i] - x, feature)?,
            (None, None) => 1.0,
        };
        results.push(RValueResult {
            feature_id: feature.to_string(),
            r_value,
            flavor: ErrorFlavor::Fdr,
        });
    }
    Ok((results, fallback))
}

/// FWER r-values of all pairs.
pub fn fwer_rvalues(pairs: &[DirectedPair], ctx: &EvaluationContext) -> Result<RValues> {
    ctx.check_pairs(pairs)?;
    let results = (0..pairs.len())
        .map(|j| solve_fwer_rvalue(j, pairs, ctx))
        .collect::<Result<Vec<_>>>()?;
    Ok(RValues {
        flavor: ErrorFlavor::Fwer,
        dependency: Dependency::Independent,
        results,
        c1_tilde_fallback: false,
    })
}

pub fn rvalues(
    pairs: &[DirectedPair],
    ctx: &EvaluationContext,
    flavor: ErrorFlavor,
) -> Result<RValues> {
    match flavor {
        ErrorFlavor::Fdr => fdr_rvalues(pairs, ctx),
        ErrorFlavor::Fwer => fwer_rvalues(pairs, ctx),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::Direction;
    use approx::assert_relative_eq;

    fn pair(p1: f64, p2: f64) -> DirectedPair {
        DirectedPair::new("f", p1, p2, Direction::Left)
    }

    fn ctx(m: usize, r1: usize, l00: f64, c2: f64) -> EvaluationContext {
        EvaluationContext::new(m, r1, l00, c2, Dependency::Independent).unwrap()
    }

    #[test]
    fn c1_hand_values() {
        assert_eq!(c1(0.3, 0.0, 0.5).unwrap(), 0.5);
        assert_relative_eq!(c1(0.05, 0.8, 0.5).unwrap(), 0.5 / 0.22, max_relative = 1e-14);
        assert_relative_eq!(c1(1.0, 0.8, 0.5).unwrap(), 0.5 / 0.6, max_relative = 1e-14);
    }

    #[test]
    fn c1_domain_errors() {
        assert!(c1(0.0, 0.5, 0.5).is_err());
        assert!(c1(0.5, 1.0, 0.5).is_err());
        assert!(c1(0.5, 0.5, 1.0).is_err());
        assert!(c1(f64::NAN, 0.5, 0.5).is_err());
    }

    #[test]
    fn m_star_values() {
        assert_eq!(m_star(1).unwrap(), 1.0);
        assert_relative_eq!(m_star(3).unwrap(), 5.5, max_relative = 1e-15);
        assert_relative_eq!(m_star(4).unwrap(), 25.0 / 3.0, max_relative = 1e-15);
        assert!(m_star(0).is_err());
    }

    #[test]
    fn harmonic_asymptotic_matches_direct_sum() {
        for n in [64u64, 100, 1000, 12345] {
            let direct: f64 = (1..=n).rev().map(|i| 1.0 / i as f64).sum();
            assert_relative_eq!(harmonic(n), direct, max_relative = 1e-14);
        }
    }

    #[test]
    fn c1_tilde_no_penalty_below_cutoff() {
        let c = c1(0.05, 0.8, 0.5).unwrap();
        let t = 0.9 * c * 0.05 / 10.0;
        let ct = c1_tilde(0.05, t, 10, 0.8, 0.5).unwrap();
        assert_eq!(ct.value, c);
        assert_eq!(ct.branch, 0);
        assert!(!ct.fallback);
    }

    #[test]
    fn c1_tilde_penalised_when_threshold_large() {
        let ct = c1_tilde(0.05, 0.99, 10_000, 0.8, 0.5).unwrap();
        assert!(ct.value < c1(0.05, 0.8, 0.5).unwrap());
        assert!(!ct.fallback);
    }

    #[test]
    fn e_values_hand() {
        let c = ctx(1, 1, 0.0, 0.5);
        let e = e_values(0.3, &[pair(0.01, 0.02)], &c).unwrap();
        assert_relative_eq!(e[0], 0.04, max_relative = 1e-15);
        let e = e_values(0.3, &[pair(0.0, 0.0)], &c).unwrap();
        assert_eq!(e[0], 0.0);
    }

    #[test]
    fn adjustment_hand() {
        let f = adjust_step_up(&[0.01, 0.04], 2.0);
        assert_relative_eq!(f[0], 0.02);
        assert_relative_eq!(f[1], 0.04);
        let f = adjust_step_up(&[0.03, 0.03], 2.0);
        assert_eq!(f, vec![0.03, 0.03]);
        let f = adjust_step_up(&[0.04], 1.0);
        assert_eq!(f, vec![0.04]);
    }

    #[test]
    fn single_feature_fixed_point() {
        let c = ctx(1, 1, 0.0, 0.5);
        let pairs = [pair(0.01, 0.02)];
        let r = solve_fdr_rvalue(0, &pairs, &c).unwrap();
        assert!((r.r_value - 0.04).abs() < 1e-9);
        let r = solve_fwer_rvalue(0, &pairs, &c).unwrap();
        assert!((r.r_value - 0.04).abs() < 1e-9);
    }

    #[test]
    fn no_solution_gives_one() {
        let c = ctx(1, 1, 0.0, 0.5);
        let pairs = [pair(0.5, 0.9)];
        assert_eq!(solve_fdr_rvalue(0, &pairs, &c).unwrap().r_value, 1.0);
        assert_eq!(solve_fwer_rvalue(0, &pairs, &c).unwrap().r_value, 1.0);
    }

    #[test]
    fn fwer_with_two_features_examined() {
        let c = ctx(2, 1, 0.0, 0.5);
        let r = solve_fwer_rvalue(0, &[pair(0.01, 0.02)], &c).unwrap();
        assert!((r.r_value - 0.04).abs() < 1e-9);
    }

    #[test]
    fn zero_p_values_clamp_to_epsilon() {
        let c = ctx(5, 1, 0.8, 0.5);
        let r = solve_fdr_rvalue(0, &[pair(0.0, 0.0)], &c).unwrap();
        assert_eq!(r.r_value, SOLVER_EPSILON);
        assert!(r.r_value > 0.0);
    }

    #[test]
    fn context_rejects_bad_sizes() {
        assert!(EvaluationContext::new(5, 0, 0.8, 0.5, Dependency::Independent).is_err());
        assert!(EvaluationContext::new(5, 6, 0.8, 0.5, Dependency::Independent).is_err());
        let c = EvaluationContext::new(4, 2, 0.8, 0.5, Dependency::ArbitraryMStar).unwrap();
        assert_relative_eq!(c.m_effective, 25.0 / 3.0, max_relative = 1e-15);
        assert_eq!(c.for_fwer().m_effective, 4.0);
    }

    #[test]
    fn threshold_mode_matches_single_solver() {
        let pairs = vec![
            pair(0.0004, 0.01),
            pair(0.002, 0.03),
            pair(0.0001, 0.2),
            pair(0.01, 0.001),
        ];
        let c = EvaluationContext::new(
            50,
            4,
            0.8,
            0.5,
            Dependency::ArbitraryThreshold { t: 0.02 },
        )
        .unwrap();
        let all = fdr_rvalues(&pairs, &c).unwrap();
        for i in 0..pairs.len() {
            let one = solve_fdr_rvalue(i, &pairs, &c).unwrap();
            assert_eq!(one.r_value, all.results[i].r_value);
        }
    }
}
