//! The r-value claim set coincides with the direct step-up procedure.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use repliq::{claims_at_level, fdr_rvalues, stepup_oracle, Dependency, DirectedPair, Direction, EvaluationContext};

fn main() -> repliq::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let pairs: Vec<_> = (0..15)
        .map(|i| {
            let scale = if i < 8 { 1e-4 } else { 0.5 };
            DirectedPair::new(
                format!("f{i}"),
                scale * rng.random::<f64>(),
                if i < 8 { 0.05 } else { 1.0 } * rng.random::<f64>(),
                Direction::Left,
            )
        })
        .collect();
    let ctx = EvaluationContext::new(300, pairs.len(), 0.8, 0.5, Dependency::Independent)?;
    let rv = fdr_rvalues(&pairs, &ctx)?;
    for q in [0.01, 0.05, 0.1, 0.2] {
        let mut ours: Vec<String> = claims_at_level(&rv.results, &pairs, q)?
            .claims
            .into_iter()
            .map(|c| c.feature_id)
            .collect();
        let mut direct = stepup_oracle(&pairs, q, &ctx)?.claimed;
        ours.sort();
        direct.sort();
        println!("q = {q:<4} r-values {ours:?}");
        println!("         step-up  {direct:?}");
        assert_eq!(ours, direct);
    }
    Ok(())
}
