//! Selecting features for follow-up and probing selection stability.

use repliq::{select, stability_check, FeatureRecord, SelectionRule};

fn main() -> repliq::Result<()> {
    let p = [1e-6, 3e-5, 2e-4, 0.001, 0.004, 0.02, 0.2, 0.5];
    let mut records: Vec<_> = p
        .iter()
        .enumerate()
        .map(|(i, &p)| FeatureRecord::primary_only(format!("x{i}"), p / 2.0, 1.0 - p / 2.0))
        .collect();
    // a feature whose favoured direction is not even below one half
    records.push(FeatureRecord::primary_only("odd", 0.5, 0.5));

    let m = 100;
    let rules = ["threshold:0.005", "bh:0.05", "bonf:0.05", "topk:3"];
    for spec in rules {
        let rule: SelectionRule = spec.parse()?;
        let sel = select(&records, rule, m)?;
        let stability = stability_check(&records, rule, m, 50, 11)?;
        println!(
            "{spec:<16} selected {:?} stable = {}",
            sel.selected,
            stability.is_stable()
        );
    }
    Ok(())
}
