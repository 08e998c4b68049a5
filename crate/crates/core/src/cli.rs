//! File formats and the two command-line actions, `analyze` and `simulate`.
//!
//! Input tables are CSV with header
//! `feature_id,p1_left,p1_right,p2_left,p2_right`; the follow-up columns may
//! be empty for features that were not followed up.
//!
//! `analyze` writes one row per followed-up feature,
//! `feature_id,direction,p1_directed,p2_directed,r_fdr,r_fwer,claimed`,
//! preceded in CSV by `# key=value` metadata lines. The JSON format carries
//! the same metadata and rows.

use std::fs;
use std::io::Read;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::analysis::{analyze, AnalysisReport};
use crate::error::{Error, Result};
use crate::selection::SelectionRule;
use crate::simulation::{estimate_error_rates, SimResult, SimScenario};
use crate::types::{AnalysisConfig, Dependency, Direction, ErrorFlavor, FeatureRecord};

/// Environment variable that, when set, overrides `--seed`.
pub const SEED_ENV_VAR: &str = "REPLIQ_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::Parse(format!("unknown output format `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FlavorChoice {
    Fdr,
    Fwer,
    #[default]
    Both,
}

impl FlavorChoice {
    pub fn flavors(&self) -> &'static [ErrorFlavor] {
        match self {
            FlavorChoice::Fdr => &[ErrorFlavor::Fdr],
            FlavorChoice::Fwer => &[ErrorFlavor::Fwer],
            FlavorChoice::Both => &[ErrorFlavor::Fdr, ErrorFlavor::Fwer],
        }
    }

    fn label(&self) -> &'static str {
        match self {
            FlavorChoice::Fdr => "fdr",
            FlavorChoice::Fwer => "fwer",
            FlavorChoice::Both => "both",
        }
    }
}

impl FromStr for FlavorChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "fdr" => Ok(FlavorChoice::Fdr),
            "fwer" => Ok(FlavorChoice::Fwer),
            "both" => Ok(FlavorChoice::Both),
            other => Err(Error::Parse(format!("unknown flavor `{other}`"))),
        }
    }
}

#[derive(Debug, Deserialize)]
struct InputRow {
    feature_id: String,
    p1_left: f64,
    p1_right: f64,
    p2_left: Option<f64>,
    p2_right: Option<f64>,
}

/// Reads a p-value table.
pub fn read_records<R: Read>(reader: R) -> Result<Vec<FeatureRecord>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let mut out = Vec::new();
    for row in rdr.deserialize::<InputRow>() {
        let row = row?;
        out.push(FeatureRecord {
            feature_id: row.feature_id,
            p1_left: row.p1_left,
            p1_right: row.p1_right,
            p2_left: row.p2_left,
            p2_right: row.p2_right,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct AnalyzeRequest {
    pub input: PathBuf,
    pub output: Option<PathBuf>,
    pub format: OutputFormat,
    /// Defaults to the number of rows in the input.
    pub m: Option<usize>,
    pub l00: f64,
    pub c2: f64,
    pub dependency: Dependency,
    pub flavor: FlavorChoice,
    pub level: f64,
    pub selection: SelectionRule,
}

impl AnalyzeRequest {
    pub fn new(input: impl Into<PathBuf>) -> Self {
        Self {
            input: input.into(),
            output: None,
            format: OutputFormat::Csv,
            m: None,
            l00: AnalysisConfig::DEFAULT_L00,
            c2: AnalysisConfig::DEFAULT_C2,
            dependency: Dependency::Independent,
            flavor: FlavorChoice::Both,
            level: AnalysisConfig::DEFAULT_LEVEL,
            selection: SelectionRule::Provided,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputRow {
    pub feature_id: String,
    pub direction: Direction,
    pub p1_directed: f64,
    pub p2_directed: f64,
    pub r_fdr: Option<f64>,
    pub r_fwer: Option<f64>,
    pub claimed: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct JsonOutput {
    metadata: Vec<(String, String)>,
    rows: Vec<OutputRow>,
}

#[derive(Debug, Clone)]
pub struct AnalyzeOutput {
    pub report: AnalysisReport,
    pub rows: Vec<OutputRow>,
    pub rendered: String,
    pub warnings: Vec<String>,
}

/// Rounds to 10 significant digits.
pub fn round_significant(v: f64) -> f64 {
    format!("{v:.9e}").parse().unwrap_or(v)
}

fn metadata(report: &AnalysisReport, flavor: FlavorChoice) -> Vec<(String, String)> {
    let cfg = &report.config;
    let m_eff = match cfg.dependency {
        Dependency::ArbitraryMStar => crate::rvalue::m_star(cfg.m).unwrap_or(f64::NAN),
        _ => cfg.m as f64,
    };
    let claimed_flavor = if report.fdr.is_some() { "fdr" } else { "fwer" };
    let mut md = vec![
        ("m".to_string(), cfg.m.to_string()),
        ("m_effective".into(), m_eff.to_string()),
        ("r1".into(), report.pairs.len().to_string()),
        ("l00".into(), cfg.l00.to_string()),
        ("c2".into(), cfg.c2.to_string()),
        ("dependency".into(), cfg.dependency.label().to_string()),
    ];
    if let Some(t) = cfg.dependency.threshold() {
        md.push(("t".into(), t.to_string()));
        md.push(("t_applies_to".into(), "two_sided_primary_p".into()));
    }
    md.extend([
        ("flavor".into(), flavor.label().to_string()),
        ("level".into(), cfg.level.to_string()),
        ("selection".into(), report.selection_rule.to_string()),
        ("claimed_flavor".into(), claimed_flavor.to_string()),
        (
            "c1_tilde_fallback".into(),
            report.c1_tilde_fallback().to_string(),
        ),
        (
            "excluded_unfavorable".into(),
            report.selection.excluded_unfavorable.join(";"),
        ),
    ]);
    md
}

fn build_rows(report: &AnalysisReport) -> Result<Vec<OutputRow>> {
    let fdr = report.fdr.as_ref().map(|r| &r.results);
    let fwer = report.fwer.as_ref().map(|r| &r.results);
    let level = report.config.level;
    Ok(report
        .pairs
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let r_fdr = fdr.map(|r| r[i].r_value);
            let r_fwer = fwer.map(|r| r[i].r_value);
            let claim_r = r_fdr.or(r_fwer).unwrap_or(1.0);
            OutputRow {
                feature_id: p.feature_id.clone(),
                direction: p.direction,
                p1_directed: p.p1_directed,
                p2_directed: p.p2_directed,
                r_fdr: r_fdr.map(round_significant),
                r_fwer: r_fwer.map(round_significant),
                claimed: claim_r <= level,
            }
        })
        .collect())
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn render_csv(md: &[(String, String)], rows: &[OutputRow]) -> Result<String> {
    let mut out = String::new();
    for (k, v) in md {
        out.push_str(&format!("# {k}={v}\n"));
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "feature_id",
        "direction",
        "p1_directed",
        "p2_directed",
        "r_fdr",
        "r_fwer",
        "claimed",
    ])?;
    for r in rows {
        w.write_record([
            r.feature_id.clone(),
            r.direction.to_string(),
            r.p1_directed.to_string(),
            r.p2_directed.to_string(),
            fmt_opt(r.r_fdr),
            fmt_opt(r.r_fwer),
            r.claimed.to_string(),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    out.push_str(&String::from_utf8_lossy(&bytes));
    Ok(out)
}

/// Reads back an `analyze` CSV output (metadata lines are skipped).
pub fn read_analysis_output<R: Read>(reader: R) -> Result<Vec<OutputRow>> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(reader);
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let field = |i: usize| rec.get(i).unwrap_or("").trim();
        let real = |i: usize| -> Result<f64> {
            field(i)
                .parse()
                .map_err(|_| Error::Parse(format!("bad number `{}`", field(i))))
        };
        let opt = |i: usize| -> Result<Option<f64>> {
            if field(i).is_empty() {
                Ok(None)
            } else {
                real(i).map(Some)
            }
        };
        rows.push(OutputRow {
            feature_id: field(0).to_string(),
            direction: field(1).parse()?,
            p1_directed: real(2)?,
            p2_directed: real(3)?,
            r_fdr: opt(4)?,
            r_fwer: opt(5)?,
            claimed: field(6)
                .parse()
                .map_err(|_| Error::Parse(format!("bad claimed flag `{}`", field(6))))?,
        });
    }
    Ok(rows)
}

/// Reads the input table, runs the analysis, renders the output and, when
/// `req.output` is set, writes it there.
pub fn run_analyze(req: &AnalyzeRequest) -> Result<AnalyzeOutput> {
    let records = read_records(fs::File::open(&req.input)?)?;
    let config = AnalysisConfig {
        m: req.m.unwrap_or(records.len()),
        l00: req.l00,
        c2: req.c2,
        dependency: req.dependency,
        error_flavor: match req.flavor {
            FlavorChoice::Fwer => ErrorFlavor::Fwer,
            _ => ErrorFlavor::Fdr,
        },
        level: req.level,
    };
    let report = analyze(&records, &config, req.selection, req.flavor.flavors())?;
    let rows = build_rows(&report)?;
    let md = metadata(&report, req.flavor);
    let rendered = match req.format {
        OutputFormat::Csv => render_csv(&md, &rows)?,
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(&JsonOutput {
                metadata: md,
                rows: rows.clone(),
            })?;
            s.push('\n');
            s
        }
    };
    if let Some(path) = &req.output {
        fs::write(path, &rendered)?;
    }
    Ok(AnalyzeOutput {
        warnings: report.warnings.clone(),
        report,
        rows,
        rendered,
    })
}

#[derive(Debug, Clone)]
pub struct SimulateRequest {
    pub scenario: PathBuf,
    pub output: Option<PathBuf>,
    pub format: OutputFormat,
    pub seed: Option<u64>,
    pub reps: Option<usize>,
    /// Raw value of [`SEED_ENV_VAR`], if set; it takes precedence over `seed`.
    pub env_seed: Option<String>,
}

impl SimulateRequest {
    pub fn new(scenario: impl Into<PathBuf>) -> Self {
        Self {
            scenario: scenario.into(),
            output: None,
            format: OutputFormat::Csv,
            seed: None,
            reps: None,
            env_seed: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SimulateOutput {
    pub scenario: SimScenario,
    pub result: SimResult,
    pub rendered: String,
}

const SIM_COLUMNS: [&str; 15] = [
    "scenario",
    "flavor",
    "level",
    "replications",
    "seed",
    "empirical_fdr",
    "mc_se_fdr",
    "empirical_fwer",
    "mc_se_fwer",
    "mean_power",
    "theoretical_fdr_bound",
    "empty_selections",
    "se_defined",
    "f00",
    "guarantee",
];

fn render_sim_csv(s: &SimScenario, r: &SimResult) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(SIM_COLUMNS)?;
    w.write_record([
        r.scenario.clone(),
        r.flavor.to_string(),
        r.level.to_string(),
        r.replications_run.to_string(),
        s.seed.to_string(),
        r.empirical_fdr.to_string(),
        r.mc_se_fdr.to_string(),
        r.empirical_fwer.to_string(),
        r.mc_se_fwer.to_string(),
        r.mean_power.to_string(),
        r.theoretical_fdr_bound.to_string(),
        r.empty_selections.to_string(),
        r.se_defined.to_string(),
        s.f00().to_string(),
        guarantee_label(r).to_string(),
    ])?;
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8_lossy(&bytes).into_owned())
}

fn guarantee_label(r: &SimResult) -> &'static str {
    if r.control_guaranteed {
        "guaranteed"
    } else {
        "no control guarantee"
    }
}

/// Loads a scenario file, applies seed/replication overrides and runs it.
pub fn run_simulate(req: &SimulateRequest) -> Result<SimulateOutput> {
    let text = fs::read_to_string(&req.scenario)?;
    let mut scenario = SimScenario::from_toml_str(&text)?;
    if let Some(seed) = req.seed {
        scenario.seed = seed;
    }
    if let Some(raw) = &req.env_seed {
        scenario.seed = raw
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("{SEED_ENV_VAR} is not an integer: `{raw}`")))?;
    }
    if let Some(reps) = req.reps {
        scenario.replications = reps;
    }
    let result = estimate_error_rates(&scenario)?;
    let rendered = match req.format {
        OutputFormat::Csv => render_sim_csv(&scenario, &result)?,
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(&serde_json::json!({
                "seed": scenario.seed,
                "f00": scenario.f00(),
                "guarantee": guarantee_label(&result),
                "result": result,
            }))?;
            s.push('\n');
            s
        }
    };
    if let Some(path) = &req.output {
        fs::write(path, &rendered)?;
    }
    Ok(SimulateOutput {
        scenario,
        result,
        rendered,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_table_with_missing_follow_up() {
        let text = "feature_id,p1_left,p1_right,p2_left,p2_right\n\
                    a,0.01,0.99,0.02,0.98\n\
                    b,0.4,0.6,,\n";
        let recs = read_records(text.as_bytes()).unwrap();
        assert_eq!(recs.len(), 2);
        assert!(recs[0].is_followed_up());
        assert!(!recs[1].is_followed_up());
    }

    #[test]
    fn malformed_table_is_an_error() {
        let text = "feature_id,p1_left,p1_right,p2_left,p2_right\na,zero,0.99,0.02,0.98\n";
        assert!(read_records(text.as_bytes()).is_err());
    }

    #[test]
    fn significant_digit_rounding() {
        assert_eq!(round_significant(0.040000000001234), 0.04);
        assert_eq!(round_significant(1.0), 1.0);
        assert_eq!(round_significant(0.123456789012345), 0.1234567890);
    }

    #[test]
    fn parses_choices() {
        assert_eq!("json".parse::<OutputFormat>().unwrap(), OutputFormat::Json);
        assert_eq!("both".parse::<FlavorChoice>().unwrap(), FlavorChoice::Both);
        assert!("xml".parse::<OutputFormat>().is_err());
    }
}
