//! End-to-end analysis of a CSV table, the same path the `repliq analyze`
//! command takes. Pass a path to use your own file.

use std::fs::File;
use std::path::PathBuf;

use repliq::cli::read_records;
use repliq::{analyze, AnalysisConfig, ErrorFlavor, SelectionRule};

fn main() -> repliq::Result<()> {
    let path = std::env::args_os().nth(1).map(PathBuf::from).unwrap_or_else(|| {
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/data/two_studies.csv")
    });
    let records = read_records(File::open(&path)?)?;
    // the table lists every feature tested in the primary study
    let config = AnalysisConfig::new(records.len()).with_level(0.05);
    let rule: SelectionRule = "threshold:0.001".parse()?;
    let report = analyze(&records, &config, rule, &[ErrorFlavor::Fdr, ErrorFlavor::Fwer])?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    let fdr = report.rvalues(ErrorFlavor::Fdr).expect("requested");
    let fwer = report.rvalues(ErrorFlavor::Fwer).expect("requested");
    println!("feature  dir        r_fdr      r_fwer");
    for ((pair, a), b) in report.pairs.iter().zip(&fdr.results).zip(&fwer.results) {
        println!("{:<8} {:<6} {:>10.5} {:>11.5}", pair.feature_id, pair.direction.to_string(), a.r_value, b.r_value);
    }
    let claims = report.claims(ErrorFlavor::Fdr).expect("requested")?;
    let mut ids: Vec<_> = claims.ids().into_iter().collect();
    ids.sort();
    println!("replicated at FDR 0.05: {ids:?}");
    Ok(())
}
