//! FDR r-values for a handful of followed-up features.

use repliq::{fdr_rvalues, Dependency, DirectedPair, Direction, EvaluationContext};

fn main() -> repliq::Result<()> {
    let pairs = vec![
        DirectedPair::new("a", 1e-5, 0.001, Direction::Left),
        DirectedPair::new("b", 2e-5, 0.004, Direction::Right),
        DirectedPair::new("c", 1e-4, 0.020, Direction::Left),
        DirectedPair::new("d", 3e-4, 0.300, Direction::Right),
        DirectedPair::new("e", 2e-3, 0.600, Direction::Left),
    ];
    // 1000 features in the primary study, 5 followed up
    let ctx = EvaluationContext::new(1000, pairs.len(), 0.8, 0.5, Dependency::Independent)?;
    let rv = fdr_rvalues(&pairs, &ctx)?;
    for r in &rv.results {
        let mark = if r.r_value <= 0.05 { "replicated at 0.05" } else { "" };
        println!("{}  r = {:.5}  {mark}", r.feature_id, r.r_value);
    }
    Ok(())
}
