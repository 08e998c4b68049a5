//! Monte Carlo estimation of the directional FDR and FWER of the procedures.
//!
//! Every feature gets Gaussian statistics `z1 ~ N(mu h1, 1)` and
//! `z2 ~ N(mu h2, 1)`, optionally equicorrelated within a study through one
//! shared factor, independent across studies. One-sided p-values are
//! `p_left = Phi(z)` and `p_right = 1 - Phi(z)`.

use std::collections::{BTreeMap, HashMap};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{check_l00, check_open_unit, Error, Result};
use crate::procedure::{claims_at_level, directional_error_tally};
use crate::rvalue::{c1, rvalues, EvaluationContext};
use crate::selection::{select, SelectionRule};
use crate::types::{
    derive_directed_pair, AnalysisConfig, Dependency, ErrorFlavor, FeatureRecord, HypothesisConfig,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "rho", rename_all = "snake_case")]
pub enum StudyDependence {
    Independent,
    /// Pairwise correlation `rho` in `[0, 1)` among a study's statistics.
    Equicorrelated(f64),
}

impl StudyDependence {
    pub fn from_rho(rho: f64) -> Self {
        if rho == 0.0 {
            StudyDependence::Independent
        } else {
            StudyDependence::Equicorrelated(rho)
        }
    }

    fn rho(&self) -> f64 {
        match *self {
            StudyDependence::Independent => 0.0,
            StudyDependence::Equicorrelated(rho) => rho,
        }
    }

    fn validate(&self) -> Result<()> {
        let rho = self.rho();
        if rho.is_finite() && (0.0..1.0).contains(&rho) {
            Ok(())
        } else {
            Err(Error::Domain {
                name: "rho",
                value: rho,
                reason: "must lie in [0, 1)",
            })
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimScenario {
    pub name: String,
    /// Number of features in each of the nine configurations.
    pub counts: BTreeMap<HypothesisConfig, usize>,
    /// Mean shift `mu` of non-null statistics.
    pub effect_size: f64,
    pub primary_dependence: StudyDependence,
    pub followup_dependence: StudyDependence,
    pub selection_rule: SelectionRule,
    pub analysis: AnalysisConfig,
    pub replications: usize,
    pub seed: u64,
}

impl SimScenario {
    pub fn m(&self) -> usize {
        self.counts.values().sum()
    }

    pub fn count(&self, h1: i8, h2: i8) -> usize {
        HypothesisConfig::new(h1, h2)
            .ok()
            .and_then(|h| self.counts.get(&h).copied())
            .unwrap_or(0)
    }

    /// Fraction of features null in both studies.
    pub fn f00(&self) -> f64 {
        self.count(0, 0) as f64 / self.m() as f64
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.m();
        if m != self.analysis.m {
            return Err(Error::Scenario(format!(
                "configuration counts sum to {m} but m = {}",
                self.analysis.m
            )));
        }
        self.analysis.validate()?;
        if !(self.effect_size.is_finite() && self.effect_size > 0.0) {
            return Err(Error::Domain {
                name: "effect_size",
                value: self.effect_size,
                reason: "must be positive",
            });
        }
        self.primary_dependence.validate()?;
        self.followup_dependence.validate()?;
        self.selection_rule.validate()?;
        if self.replications == 0 {
            return Err(Error::Scenario("replications must be positive".into()));
        }
        if let Some(t) = self.analysis.dependency.threshold() {
            match self.selection_rule {
                SelectionRule::TwoSidedThreshold(cutoff) if cutoff <= t => {}
                _ => {
                    return Err(Error::Scenario(format!(
                        "threshold mode (t = {t}) needs a two-sided threshold selection with cutoff <= t"
                    )))
                }
            }
        }
        Ok(())
    }

    /// Whether the scenario meets the conditions under which the procedure
    /// is guaranteed to control its error rate.
    pub fn control_guaranteed(&self) -> bool {
        if self.f00() < self.analysis.l00 {
            return false;
        }
        match self.analysis.error_flavor {
            ErrorFlavor::Fwer => true,
            ErrorFlavor::Fdr => {
                self.primary_dependence == StudyDependence::Independent
                    || self.analysis.dependency != Dependency::Independent
            }
        }
    }

    /// Ground truth in feature order: configurations in lexicographic order,
    /// each repeated by its count. Feature ids are `f1`, `f2`, ...
    pub fn truth(&self) -> Vec<HypothesisConfig> {
        HypothesisConfig::all()
            .flat_map(|h| std::iter::repeat_n(h, self.counts.get(&h).copied().unwrap_or(0)))
            .collect()
    }

    /// Parses a TOML scenario file.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let file: ScenarioFile =
            toml::from_str(text).map_err(|e| Error::Scenario(e.message().to_string()))?;
        file.into_scenario()
    }
}

/// On-disk scenario layout.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    #[serde(default = "default_name")]
    name: String,
    seed: u64,
    replications: usize,
    effect_size: f64,
    #[serde(default)]
    primary_rho: f64,
    #[serde(default)]
    followup_rho: f64,
    select: String,
    m: Option<usize>,
    #[serde(default = "default_l00")]
    l00: f64,
    #[serde(default = "default_c2")]
    c2: f64,
    #[serde(default = "default_dep")]
    dep: String,
    t: Option<f64>,
    #[serde(default = "default_flavor")]
    flavor: String,
    #[serde(default = "default_level")]
    level: f64,
    counts: BTreeMap<String, usize>,
}

fn default_name() -> String {
    "scenario".into()
}
fn default_l00() -> f64 {
    AnalysisConfig::DEFAULT_L00
}
fn default_c2() -> f64 {
    AnalysisConfig::DEFAULT_C2
}
fn default_dep() -> String {
    "indep".into()
}
fn default_flavor() -> String {
    "fdr".into()
}
fn default_level() -> f64 {
    AnalysisConfig::DEFAULT_LEVEL
}

/// Parses the `--dep` / `dep` spelling of a dependency mode.
pub fn parse_dependency(dep: &str, t: Option<f64>) -> Result<Dependency> {
    let dep = dep.trim().to_ascii_lowercase();
    match (dep.as_str(), t) {
        ("indep" | "independent", None) => Ok(Dependency::Independent),
        ("mstar", None) => Ok(Dependency::ArbitraryMStar),
        ("threshold", Some(t)) => {
            check_open_unit("t", t)?;
            Ok(Dependency::ArbitraryThreshold { t })
        }
        ("threshold", None) => Err(Error::Parse("threshold mode requires t".into())),
        ("indep" | "independent" | "mstar", Some(_)) => Err(Error::Parse(
            "t is only allowed with the threshold dependency mode".into(),
        )),
        (other, _) => Err(Error::Parse(format!("unknown dependency mode `{other}`"))),
    }
}

impl ScenarioFile {
    fn into_scenario(self) -> Result<SimScenario> {
        let mut counts = BTreeMap::new();
        for (key, n) in self.counts {
            let h: HypothesisConfig = key.parse()?;
            if counts.insert(h, n).is_some() {
                return Err(Error::Scenario(format!("configuration {h} listed twice")));
            }
        }
        let total: usize = counts.values().sum();
        if let Some(m) = self.m {
            if m != total {
                return Err(Error::Scenario(format!(
                    "configuration counts sum to {total} but m = {m}"
                )));
            }
        }
        check_l00(self.l00)?;
        let analysis = AnalysisConfig {
            m: total,
            l00: self.l00,
            c2: self.c2,
            dependency: parse_dependency(&self.dep, self.t)?,
            error_flavor: self.flavor.parse()?,
            level: self.level,
        };
        let scenario = SimScenario {
            name: self.name,
            counts,
            effect_size: self.effect_size,
            primary_dependence: StudyDependence::from_rho(self.primary_rho),
            followup_dependence: StudyDependence::from_rho(self.followup_rho),
            selection_rule: self.select.parse()?,
            analysis,
            replications: self.replications,
            seed: self.seed,
        };
        scenario.validate()?;
        Ok(scenario)
    }
}

fn replication_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn draw_study(
    rng: &mut ChaCha8Rng,
    means: impl Iterator<Item = f64>,
    dependence: StudyDependence,
) -> Vec<f64> {
    let rho = dependence.rho();
    let shared: f64 = if rho > 0.0 {
        StandardNormal.sample(rng)
    } else {
        0.0
    };
    let (a, b) = (rho.sqrt(), (1.0 - rho).sqrt());
    means
        .map(|mu| {
            let own: f64 = StandardNormal.sample(rng);
            mu + a * shared + b * own
        })
        .collect()
}

/// Simulated records for one replication; deterministic in
/// `(scenario.seed, replication_index)`.
pub fn generate_replication(scenario: &SimScenario, replication_index: u64) -> Result<Vec<FeatureRecord>> {
    if scenario.m() != scenario.analysis.m {
        return Err(Error::Scenario(format!(
            "configuration counts sum to {} but m = {}",
            scenario.m(),
            scenario.analysis.m
        )));
    }
    let truth = scenario.truth();
    let mu = scenario.effect_size;
    let mut rng = replication_rng(scenario.seed, replication_index);
    let z1 = draw_study(
        &mut rng,
        truth.iter().map(|h| mu * h.h1() as f64),
        scenario.primary_dependence,
    );
    let z2 = draw_study(
        &mut rng,
        truth.iter().map(|h| mu * h.h2() as f64),
        scenario.followup_dependence,
    );
    let normal = Normal::standard();
    Ok(z1
        .iter()
        .zip(&z2)
        .enumerate()
        .map(|(i, (&a, &b))| {
            FeatureRecord::new(
                format!("f{}", i + 1),
                normal.cdf(a),
                normal.cdf(-a),
                normal.cdf(b),
                normal.cdf(-b),
            )
        })
        .collect())
}

#[derive(Debug, Clone, Copy, Default)]
struct ReplicationOutcome {
    fdp: f64,
    any_false: f64,
    power: f64,
    empty: bool,
}

fn run_replication(
    scenario: &SimScenario,
    truth: &HashMap<String, HypothesisConfig>,
    replicated: usize,
    index: u64,
) -> Result<ReplicationOutcome> {
    let records = generate_replication(scenario, index)?;
    let cfg = &scenario.analysis;
    let selection = select(&records, scenario.selection_rule, cfg.m)?;
    if selection.is_empty() {
        return Ok(ReplicationOutcome {
            empty: true,
            ..Default::default()
        });
    }
    let by_id: HashMap<&str, &FeatureRecord> =
        records.iter().map(|r| (r.feature_id.as_str(), r)).collect();
    let pairs = selection
        .selected
        .iter()
        .map(|id| derive_directed_pair(by_id[id.as_str()]))
        .collect::<Result<Vec<_>>>()?;
    let ctx = EvaluationContext::from_config(cfg, pairs.len())?;
    let rv = rvalues(&pairs, &ctx, cfg.error_flavor)?;
    let claims = claims_at_level(&rv.results, &pairs, cfg.level)?;
    let tally = directional_error_tally(&claims, truth)?;
    Ok(ReplicationOutcome {
        fdp: tally.false_discovery_proportion(),
        any_false: if tally.any_false() { 1.0 } else { 0.0 },
        power: if replicated == 0 {
            0.0
        } else {
            tally.s as f64 / replicated as f64
        },
        empty: false,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub scenario: String,
    pub flavor: ErrorFlavor,
    pub level: f64,
    pub empirical_fdr: f64,
    pub empirical_fwer: f64,
    pub mc_se_fdr: f64,
    pub mc_se_fwer: f64,
    /// Mean fraction of `(1,1)` and `(-1,-1)` features claimed in the right direction.
    pub mean_power: f64,
    pub replications_run: usize,
    /// Replications in which nothing was selected for follow-up.
    pub empty_selections: usize,
    /// `false` with a single replication, where the standard errors are
    /// reported as 0 but are undefined.
    pub se_defined: bool,
    pub theoretical_fdr_bound: f64,
    pub control_guaranteed: bool,
    pub warnings: Vec<String>,
}

fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Runs the whole pipeline `scenario.replications` times and averages the
/// false discovery proportion and the indicator of any false claim.
/// Replications run in parallel; aggregation is in replication order, so
/// results are bit-identical for a fixed seed.
pub fn estimate_error_rates(scenario: &SimScenario) -> Result<SimResult> {
    scenario.validate()?;
    let truth_vec = scenario.truth();
    let replicated = truth_vec.iter().filter(|h| h.is_replicated()).count();
    let truth: HashMap<String, HypothesisConfig> = truth_vec
        .iter()
        .enumerate()
        .map(|(i, h)| (format!("f{}", i + 1), *h))
        .collect();

    let outcomes = (0..scenario.replications as u64)
        .into_par_iter()
        .map(|i| run_replication(scenario, &truth, replicated, i))
        .collect::<Result<Vec<_>>>()?;

    let fdp: Vec<f64> = outcomes.iter().map(|o| o.fdp).collect();
    let any: Vec<f64> = outcomes.iter().map(|o| o.any_false).collect();
    let power: Vec<f64> = outcomes.iter().map(|o| o.power).collect();
    let empty = outcomes.iter().filter(|o| o.empty).count();
    let (fdr, se_fdr) = mean_and_se(&fdp);
    let (fwer, se_fwer) = mean_and_se(&any);
    let (mean_power, _) = mean_and_se(&power);

    let cfg = &scenario.analysis;
    let mut warnings = Vec::new();
    if empty as f64 > 0.99 * scenario.replications as f64 {
        warnings.push(format!(
            "selection was empty in {empty} of {} replications",
            scenario.replications
        ));
    }
    let control_guaranteed = scenario.control_guaranteed();
    if !control_guaranteed {
        warnings.push("no control guarantee".into());
    }
    Ok(SimResult {
        scenario: scenario.name.clone(),
        flavor: cfg.error_flavor,
        level: cfg.level,
        empirical_fdr: fdr,
        empirical_fwer: fwer,
        mc_se_fdr: se_fdr,
        mc_se_fwer: se_fwer,
        mean_power,
        replications_run: outcomes.len(),
        empty_selections: empty,
        se_defined: outcomes.len() > 1,
        theoretical_fdr_bound: theoretical_fdr_bound(&scenario.counts, cfg.level, cfg.l00, cfg.c2)?,
        control_guaranteed,
        warnings,
    })
}

/// Fraction of features whose follow-up null is true (`h2 = 0`).
pub fn follow_up_null_fraction(counts: &BTreeMap<HypothesisConfig, usize>) -> f64 {
    let m: usize = counts.values().sum();
    let nulls: usize = counts
        .iter()
        .filter(|(h, _)| h.h2() == 0)
        .map(|(_, n)| n)
        .sum();
    nulls as f64 / m as f64
}

/// Upper bound on the directional FDR at level `q`, with the
/// selection-dependent expectation replaced by its bound 1:
///
/// `c1(q) c2 q^2 f + c1(q) q (1 - f) + c2 q`, `f` = [`follow_up_null_fraction`].
///
/// At most `q` whenever `f >= l00`, and equal to `q` at `f = l00`.
pub fn theoretical_fdr_bound(
    counts: &BTreeMap<HypothesisConfig, usize>,
    q: f64,
    l00: f64,
    c2: f64,
) -> Result<f64> {
    if counts.values().sum::<usize>() == 0 {
        return Err(Error::Scenario("configuration counts are all zero".into()));
    }
    check_open_unit("q", q)?;
    let f = follow_up_null_fraction(counts);
    Ok(fdr_bound_at_fraction(f, q, l00, c2)?)
}

/// [`theoretical_fdr_bound`] for a given follow-up null fraction.
pub fn fdr_bound_at_fraction(f_dot0: f64, q: f64, l00: f64, c2: f64) -> Result<f64> {
    let c1q = c1(q, l00, c2)?;
    // factored so the c1 denominator cancels cleanly at f_dot0 = l00
    let shrink = 1.0 - f_dot0 * (1.0 - c2 * q);
    Ok(c1q * shrink * q + c2 * q)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scenario(counts: &[((i8, i8), usize)], mu: f64) -> SimScenario {
        let counts: BTreeMap<_, _> = counts
            .iter()
            .map(|&((a, b), n)| (HypothesisConfig::new(a, b).unwrap(), n))
            .collect();
        let m = counts.values().sum();
        SimScenario {
            name: "t".into(),
            counts,
            effect_size: mu,
            primary_dependence: StudyDependence::Independent,
            followup_dependence: StudyDependence::Independent,
            selection_rule: SelectionRule::TwoSidedThreshold(0.01),
            analysis: AnalysisConfig::new(m),
            replications: 50,
            seed: 11,
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let s = scenario(&[((0, 0), 40), ((1, 1), 10)], 3.0);
        let a = generate_replication(&s, 3).unwrap();
        let b = generate_replication(&s, 3).unwrap();
        let c = generate_replication(&s, 4).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(a.len(), 50);
    }

    #[test]
    fn p_values_are_complementary() {
        let s = scenario(&[((0, 0), 20), ((-1, 1), 5)], 2.0);
        for rec in generate_replication(&s, 0).unwrap() {
            assert!((rec.p1_left + rec.p1_right - 1.0).abs() < 1e-12);
            assert!(!rec.looks_discrete());
        }
    }

    #[test]
    fn strong_right_effects_have_small_right_p() {
        let mut s = scenario(&[((1, 1), 10_000)], 4.0);
        s.seed = 5;
        let recs = generate_replication(&s, 0).unwrap();
        let mean = recs.iter().map(|r| r.p1_right).sum::<f64>() / recs.len() as f64;
        assert!(mean < 0.05, "mean p1_right = {mean}");
    }

    #[test]
    fn bound_hand_values() {
        let at_l00 = fdr_bound_at_fraction(0.8, 0.05, 0.8, 0.5).unwrap();
        assert!((at_l00 - 0.05).abs() < 1e-15);
        let above = fdr_bound_at_fraction(0.9, 0.05, 0.8, 0.5).unwrap();
        assert!((above - 0.03892).abs() < 1e-5, "{above}");
        let null = fdr_bound_at_fraction(1.0, 0.05, 0.0, 0.5).unwrap();
        assert!((null - (0.5 * 0.5 * 0.0025 + 0.025)).abs() < 1e-15);
        assert!(null < 0.05);
    }

    #[test]
    fn follow_up_fraction_counts_h2_zero() {
        let s = scenario(&[((0, 0), 6), ((1, 0), 2), ((-1, 0), 1), ((0, 1), 1)], 1.0);
        assert!((follow_up_null_fraction(&s.counts) - 0.9).abs() < 1e-15);
    }

    #[test]
    fn single_replication_flags_se() {
        let mut s = scenario(&[((0, 0), 40), ((1, 1), 10)], 3.0);
        s.replications = 1;
        let r = estimate_error_rates(&s).unwrap();
        assert!(!r.se_defined);
        assert_eq!(r.mc_se_fdr, 0.0);
    }

    #[test]
    fn guarantee_flag() {
        let mut s = scenario(&[((0, 0), 70), ((1, 1), 30)], 3.0);
        assert!(!s.control_guaranteed());
        s.analysis.l00 = 0.5;
        assert!(s.control_guaranteed());
        s.primary_dependence = StudyDependence::Equicorrelated(0.3);
        assert!(!s.control_guaranteed());
        s.analysis.error_flavor = ErrorFlavor::Fwer;
        assert!(s.control_guaranteed());
    }

    #[test]
    fn scenario_file_parses() {
        let text = r#"
            name = "demo"
            seed = 1
            replications = 10
            effect_size = 3.0
            select = "threshold:0.01"
            level = 0.1
            [counts]
            "0,0" = 90
            "1,1" = 10
        "#;
        let s = SimScenario::from_toml_str(text).unwrap();
        assert_eq!(s.m(), 100);
        assert_eq!(s.analysis.level, 0.1);
        assert_eq!(s.analysis.l00, 0.8);
        assert_eq!(s.selection_rule, SelectionRule::TwoSidedThreshold(0.01));
    }

    #[test]
    fn scenario_file_rejects_unknown_keys_and_mismatch() {
        let base = "seed = 1\nreplications = 1\neffect_size = 1.0\nselect = \"topk:1\"\n";
        let bad_key = format!("{base}bogus = 3\n[counts]\n\"0,0\" = 5\n");
        assert!(SimScenario::from_toml_str(&bad_key).is_err());
        let mismatch = format!("{base}m = 7\n[counts]\n\"0,0\" = 5\n");
        assert!(SimScenario::from_toml_str(&mismatch).is_err());
        let bad_cfg = format!("{base}[counts]\n\"0,2\" = 5\n");
        assert!(SimScenario::from_toml_str(&bad_cfg).is_err());
    }

    #[test]
    fn dependency_spellings() {
        assert_eq!(parse_dependency("indep", None).unwrap(), Dependency::Independent);
        assert_eq!(parse_dependency("mstar", None).unwrap(), Dependency::ArbitraryMStar);
        assert_eq!(
            parse_dependency("threshold", Some(0.01)).unwrap(),
            Dependency::ArbitraryThreshold { t: 0.01 }
        );
        assert!(parse_dependency("threshold", None).is_err());
        assert!(parse_dependency("indep", Some(0.1)).is_err());
        assert!(parse_dependency("weird", None).is_err());
    }
}
