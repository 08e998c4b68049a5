//! FWER r-values next to FDR r-values; the FWER ones are never smaller.

use repliq::{fdr_rvalues, fwer_rvalues, Dependency, DirectedPair, Direction, EvaluationContext};

fn main() -> repliq::Result<()> {
    let pairs: Vec<_> = [(1e-6, 0.002), (5e-6, 0.010), (4e-5, 0.030), (1e-4, 0.200)]
        .iter()
        .enumerate()
        .map(|(i, &(p1, p2))| DirectedPair::new(format!("f{i}"), p1, p2, Direction::Right))
        .collect();
    let ctx = EvaluationContext::new(500, pairs.len(), 0.8, 0.5, Dependency::Independent)?;
    let fdr = fdr_rvalues(&pairs, &ctx)?;
    let fwer = fwer_rvalues(&pairs, &ctx)?;
    println!("feature      r_fdr     r_fwer");
    for (a, b) in fdr.results.iter().zip(&fwer.results) {
        println!("{:<8} {:>9.5} {:>10.5}", a.feature_id, a.r_value, b.r_value);
    }
    Ok(())
}
