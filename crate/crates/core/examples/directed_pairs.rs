//! Turning two-sided primary and follow-up p-values into directed pairs.

use repliq::{derive_directed_pair, two_sided_p, FeatureRecord};

fn main() -> repliq::Result<()> {
    let records = [
        FeatureRecord::new("up", 0.001, 0.999, 0.03, 0.97),
        FeatureRecord::new("down", 0.998, 0.002, 0.90, 0.10),
        FeatureRecord::new("flipped", 0.004, 0.996, 0.99, 0.01),
    ];
    println!("{:<8} {:>9} {:>6} {:>8} {:>8}", "feature", "two-sided", "dir", "p1'", "p2'");
    for rec in &records {
        rec.validate()?;
        let pair = derive_directed_pair(rec)?;
        println!(
            "{:<8} {:>9.4} {:>6} {:>8.4} {:>8.4}",
            pair.feature_id,
            two_sided_p(rec),
            pair.direction.to_string(),
            pair.p1_directed,
            pair.p2_directed
        );
    }
    // `flipped` favours left in the primary study, so its follow-up p-value is
    // taken on the left as well and comes out large.
    Ok(())
}
