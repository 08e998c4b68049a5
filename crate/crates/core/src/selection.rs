//! Selection of the follow-up set from primary-study two-sided p-values.
//!
//! Every built-in rule is stable: moving one selected feature's primary
//! p-value, while it stays selected, leaves the selected set unchanged.
//! Features whose favoured one-sided primary p-value exceeds 0.5 (possible
//! only with discrete statistics) are never selected.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_open_unit, Error, Result};
use crate::types::FeatureRecord;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "param", rename_all = "snake_case")]
pub enum SelectionRule {
    /// Whatever the data says was followed up.
    Provided,
    /// Two-sided p-value strictly below the cutoff.
    TwoSidedThreshold(f64),
    /// Benjamini-Hochberg at level `q1` over the `m` two-sided p-values.
    BenjaminiHochberg(f64),
    /// Two-sided p-value at most `a1 / m`.
    Bonferroni(f64),
    /// The `k` smallest two-sided p-values, ties broken by feature id.
    TopK(usize),
}

impl SelectionRule {
    pub fn validate(&self) -> Result<()> {
        match *self {
            SelectionRule::Provided => Ok(()),
            SelectionRule::TwoSidedThreshold(c) => check_open_unit("cutoff", c),
            SelectionRule::BenjaminiHochberg(q) => check_open_unit("q1", q),
            SelectionRule::Bonferroni(a) => check_open_unit("a1", a),
            SelectionRule::TopK(0) => Err(Error::Domain {
                name: "k",
                value: 0.0,
                reason: "must be at least 1",
            }),
            SelectionRule::TopK(_) => Ok(()),
        }
    }
}

impl fmt::Display for SelectionRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SelectionRule::Provided => f.write_str("provided"),
            SelectionRule::TwoSidedThreshold(c) => write!(f, "threshold:{c}"),
            SelectionRule::BenjaminiHochberg(q) => write!(f, "bh:{q}"),
            SelectionRule::Bonferroni(a) => write!(f, "bonf:{a}"),
            SelectionRule::TopK(k) => write!(f, "topk:{k}"),
        }
    }
}

impl FromStr for SelectionRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("provided") {
            return Ok(SelectionRule::Provided);
        }
        let (kind, param) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("bad selection rule `{s}`")))?;
        let real = || {
            param
                .trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad selection parameter `{param}`")))
        };
        let rule = match kind.trim().to_ascii_lowercase().as_str() {
            "threshold" => SelectionRule::TwoSidedThreshold(real()?),
            "bh" => SelectionRule::BenjaminiHochberg(real()?),
            "bonf" | "bonferroni" => SelectionRule::Bonferroni(real()?),
            "topk" => SelectionRule::TopK(
                param
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad top-k parameter `{param}`")))?,
            ),
            other => return Err(Error::Parse(format!("unknown selection rule `{other}`"))),
        };
        rule.validate()?;
        Ok(rule)
    }
}

/// `min(1, 2 * min(p1_left, p1_right))`.
pub fn two_sided_p(rec: &FeatureRecord) -> f64 {
    (2.0 * rec.p1_left.min(rec.p1_right)).min(1.0)
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Selection {
    /// Selected feature ids, in record order.
    pub selected: Vec<String>,
    /// Features the rule picked but which were dropped because their
    /// favoured one-sided primary p-value exceeds 0.5.
    pub excluded_unfavorable: Vec<String>,
}

impl Selection {
    pub fn is_empty(&self) -> bool {
        self.selected.is_empty()
    }

    pub fn len(&self) -> usize {
        self.selected.len()
    }
}

/// Indices of records picked by `rule`, before the 0.5 screen.
fn pick(records: &[FeatureRecord], rule: SelectionRule, m: usize) -> Result<Vec<usize>> {
    rule.validate()?;
    let p: Vec<f64> = records.iter().map(two_sided_p).collect();
    let m_f = m.max(records.len()) as f64;
    let idx: Vec<usize> = match rule {
        SelectionRule::Provided => (0..records.len())
            .filter(|&i| records[i].is_followed_up())
            .collect(),
        SelectionRule::TwoSidedThreshold(cutoff) => {
            (0..records.len()).filter(|&i| p[i] < cutoff).collect()
        }
        SelectionRule::Bonferroni(a1) => {
            let bound = a1 / m_f;
            (0..records.len()).filter(|&i| p[i] <= bound).collect()
        }
        SelectionRule::BenjaminiHochberg(q1) => {
            let mut sorted = p.clone();
            sorted.sort_by(f64::total_cmp);
            let k_star = sorted
                .iter()
                .enumerate()
                .filter(|(k, &pk)| pk <= (*k as f64 + 1.0) * q1 / m_f)
                .map(|(k, _)| k + 1)
                .max()
                .unwrap_or(0);
            if k_star == 0 {
                Vec::new()
            } else {
                let bound = k_star as f64 * q1 / m_f;
                (0..records.len()).filter(|&i| p[i] <= bound).collect()
            }
        }
        SelectionRule::TopK(k) => {
            if k > records.len() {
                return Err(Error::TopKTooLarge {
                    k,
                    available: records.len(),
                });
            }
            let mut order: Vec<usize> = (0..records.len()).collect();
            order.sort_by(|&a, &b| {
                p[a].total_cmp(&p[b])
                    .then_with(|| records[a].feature_id.cmp(&records[b].feature_id))
            });
            order.truncate(k);
            order.sort_unstable();
            order
        }
    };
    Ok(idx)
}

/// Applies `rule` to the records; `m` is the number of features examined in
/// the primary study (records beyond the table are treated as unselected).
pub fn select(records: &[FeatureRecord], rule: SelectionRule, m: usize) -> Result<Selection> {
    let mut out = Selection::default();
    for i in pick(records, rule, m)? {
        let rec = &records[i];
        if rec.p1_directed() > 0.5 {
            out.excluded_unfavorable.push(rec.feature_id.clone());
        } else {
            out.selected.push(rec.feature_id.clone());
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityViolation {
    pub feature_id: String,
    pub perturbed_p1_left: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct StabilityReport {
    /// Perturbations that kept the feature selected and were compared.
    pub perturbations_checked: usize,
    pub violations: Vec<StabilityViolation>,
}

impl StabilityReport {
    pub fn is_stable(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Empirical probe of the stability condition: for each selected feature,
/// redraw its primary p-values `trials` times and compare the selected set
/// whenever the feature remains selected.
pub fn stability_check(
    records: &[FeatureRecord],
    rule: SelectionRule,
    m: usize,
    trials: usize,
    seed: u64,
) -> Result<StabilityReport> {
    let base = select(records, rule, m)?;
    let mut report = StabilityReport::default();
    if rule == SelectionRule::Provided {
        return Ok(report);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut probe = records.to_vec();
    for (j, rec) in records.iter().enumerate() {
        if !base.selected.contains(&rec.feature_id) {
            continue;
        }
        let current = two_sided_p(rec);
        for trial in 0..trials {
            // Alternate shrinking the two-sided p-value with a fresh draw.
            let two_sided = if trial % 2 == 0 {
                current * rng.random::<f64>()
            } else {
                rng.random::<f64>()
            };
            let left_tail = rng.random::<bool>();
            let one_sided = 0.5 * two_sided;
            let (pl, pr) = if left_tail {
                (one_sided, 1.0 - one_sided)
            } else {
                (1.0 - one_sided, one_sided)
            };
            probe[j].p1_left = pl;
            probe[j].p1_right = pr;
            let perturbed = select(&probe, rule, m)?;
            if perturbed.selected.contains(&rec.feature_id) {
                report.perturbations_checked += 1;
                if perturbed.selected != base.selected {
                    report.violations.push(StabilityViolation {
                        feature_id: rec.feature_id.clone(),
                        perturbed_p1_left: pl,
                    });
                }
            }
        }
        probe[j] = rec.clone();
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn recs(two_sided: &[f64]) -> Vec<FeatureRecord> {
        two_sided
            .iter()
            .enumerate()
            .map(|(i, &p)| FeatureRecord::new(format!("f{}", i + 1), p / 2.0, 1.0 - p / 2.0, 0.1, 0.9))
            .collect()
    }

    #[test]
    fn two_sided_doubling() {
        assert_eq!(two_sided_p(&FeatureRecord::primary_only("a", 0.01, 0.99)), 0.02);
        assert_eq!(two_sided_p(&FeatureRecord::primary_only("a", 0.5, 0.5)), 1.0);
        assert_eq!(two_sided_p(&FeatureRecord::primary_only("a", 0.6, 0.4)), 0.8);
    }

    #[test]
    fn threshold_rule() {
        let r = recs(&[0.001, 0.04, 0.2]);
        let s = select(&r, SelectionRule::TwoSidedThreshold(0.05), 3).unwrap();
        assert_eq!(s.selected, vec!["f1", "f2"]);
    }

    #[test]
    fn top_k_rule() {
        let r = recs(&[0.001, 0.04, 0.2]);
        let s = select(&r, SelectionRule::TopK(1), 3).unwrap();
        assert_eq!(s.selected, vec!["f1"]);
        assert!(matches!(
            select(&r, SelectionRule::TopK(4), 3),
            Err(Error::TopKTooLarge { .. })
        ));
    }

    #[test]
    fn top_k_ties_use_id_order() {
        let r = recs(&[0.01, 0.01, 0.01]);
        let s = select(&r, SelectionRule::TopK(2), 3).unwrap();
        assert_eq!(s.selected, vec!["f1", "f2"]);
    }

    #[test]
    fn bh_rule() {
        let r = recs(&[0.01, 0.02, 0.9]);
        let s = select(&r, SelectionRule::BenjaminiHochberg(0.05), 3).unwrap();
        assert_eq!(s.selected, vec!["f1", "f2"]);
    }

    #[test]
    fn bh_matches_brute_force_step_up() {
        // brute force: largest r with #{p <= r q / m} >= r, all thresholds tried
        let p = [0.003, 0.03, 0.011, 0.04, 0.5, 0.021, 0.9];
        let m = p.len();
        let q = 0.05;
        let mut best = 0;
        for r in 1..=m {
            let cnt = p.iter().filter(|&&v| v <= r as f64 * q / m as f64).count();
            if cnt >= r {
                best = r;
            }
        }
        let expect: Vec<String> = p
            .iter()
            .enumerate()
            .filter(|(_, &v)| v <= best as f64 * q / m as f64)
            .map(|(i, _)| format!("f{}", i + 1))
            .collect();
        let s = select(&recs(&p), SelectionRule::BenjaminiHochberg(q), m).unwrap();
        assert_eq!(s.selected, expect);
    }

    #[test]
    fn bonferroni_rule() {
        let r = recs(&[0.001, 0.02, 0.2]);
        let s = select(&r, SelectionRule::Bonferroni(0.05), 10).unwrap();
        assert_eq!(s.selected, vec!["f1"]);
    }

    #[test]
    fn unfavorable_primary_excluded() {
        // discrete statistic: both one-sided p-values above 0.5
        let r = vec![
            FeatureRecord::new("a", 0.6, 0.7, 0.1, 0.9),
            FeatureRecord::new("b", 0.01, 0.99, 0.1, 0.9),
        ];
        let s = select(&r, SelectionRule::Provided, 2).unwrap();
        assert_eq!(s.selected, vec!["b"]);
        assert_eq!(s.excluded_unfavorable, vec!["a"]);
    }

    #[test]
    fn provided_uses_follow_up_presence() {
        let r = vec![
            FeatureRecord::primary_only("a", 0.001, 0.999),
            FeatureRecord::new("b", 0.01, 0.99, 0.1, 0.9),
        ];
        let s = select(&r, SelectionRule::Provided, 2).unwrap();
        assert_eq!(s.selected, vec!["b"]);
    }

    #[test]
    fn parse_rules() {
        assert_eq!("provided".parse::<SelectionRule>().unwrap(), SelectionRule::Provided);
        assert_eq!(
            "threshold:0.05".parse::<SelectionRule>().unwrap(),
            SelectionRule::TwoSidedThreshold(0.05)
        );
        assert_eq!("topk:3".parse::<SelectionRule>().unwrap(), SelectionRule::TopK(3));
        assert!("bh:1.5".parse::<SelectionRule>().is_err());
        assert!("nope:1".parse::<SelectionRule>().is_err());
        let rule = SelectionRule::Bonferroni(0.05);
        assert_eq!(rule.to_string().parse::<SelectionRule>().unwrap(), rule);
    }

    #[test]
    fn builtin_rules_are_stable() {
        let r = recs(&[0.001, 0.004, 0.012, 0.013, 0.0125, 0.2, 0.6, 0.03]);
        for rule in [
            SelectionRule::TwoSidedThreshold(0.02),
            SelectionRule::TopK(3),
            SelectionRule::BenjaminiHochberg(0.1),
            SelectionRule::Bonferroni(0.05),
        ] {
            let rep = stability_check(&r, rule, 8, 200, 7).unwrap();
            assert!(rep.is_stable(), "{rule}: {:?}", rep.violations);
            assert!(rep.perturbations_checked > 0);
        }
    }
}
