#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use repliq::{Dependency, DirectedPair, Direction, EvaluationContext};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random analysis instance: the directed pairs plus their context.
#[derive(Debug, Clone)]
pub struct Instance {
    pub pairs: Vec<DirectedPair>,
    pub ctx: EvaluationContext,
}

pub const L00_CHOICES: [f64; 3] = [0.0, 0.5, 0.8];
pub const C2_CHOICES: [f64; 3] = [0.3, 0.5, 0.7];

/// Directed pairs from uniform one-sided p-values: `p1_left ~ U(0,1)` gives
/// `p1 = min(p1_left, 1 - p1_left)`, and `p2` is the follow-up p-value in
/// the same direction.
pub fn uniform_pairs(rng: &mut ChaCha8Rng, r1: usize) -> Vec<DirectedPair> {
    (0..r1)
        .map(|j| {
            let p1_left: f64 = rng.random();
            let p2_left: f64 = rng.random();
            let (p1, p2, dir) = if p1_left <= 0.5 {
                (p1_left, p2_left, Direction::Left)
            } else {
                (1.0 - p1_left, 1.0 - p2_left, Direction::Right)
            };
            DirectedPair::new(format!("f{j}"), p1, p2, dir)
        })
        .collect()
}

/// Pairs where a fraction of features carry signal: their p-values are
/// shrunk by a random power of ten so that claims actually happen.
pub fn enriched_pairs(rng: &mut ChaCha8Rng, r1: usize, m: usize) -> Vec<DirectedPair> {
    let mut pairs = uniform_pairs(rng, r1);
    for p in pairs.iter_mut() {
        if rng.random::<f64>() < 0.6 {
            let s1 = 10f64.powf(-rng.random_range(0.0..3.0)) / m as f64;
            let s2 = 10f64.powf(-rng.random_range(0.0..2.0)) / 10.0;
            p.p1_directed *= s1;
            p.p2_directed *= s2;
        }
    }
    pairs
}

pub fn random_instance(rng: &mut ChaCha8Rng, enriched: bool, dependency: Dependency) -> Instance {
    let m = rng.random_range(1..=100usize);
    let r1 = rng.random_range(1..=m.min(20));
    let l00 = L00_CHOICES[rng.random_range(0..3)];
    let c2 = C2_CHOICES[rng.random_range(0..3)];
    let pairs = if enriched {
        enriched_pairs(rng, r1, m)
    } else {
        uniform_pairs(rng, r1)
    };
    let ctx = EvaluationContext::new(m, r1, l00, c2, dependency).unwrap();
    Instance { pairs, ctx }
}

/// The q grid 0.01, 0.02, ..., 0.20.
pub fn level_grid() -> Vec<f64> {
    (1..=20).map(|k| k as f64 / 100.0).collect()
}

/// First grid point `x = k * step` where `f(x) <= x`, or 1 when none.
pub fn grid_first_crossing(step: f64, mut f: impl FnMut(f64) -> Vec<f64>, n: usize) -> Vec<f64> {
    let steps = (1.0 / step).round() as usize;
    let mut out = vec![1.0; n];
    let mut open = n;
    for k in 1..steps {
        if open == 0 {
            break;
        }
        let x = k as f64 * step;
        let fx = f(x);
        for i in 0..n {
            if out[i] == 1.0 && fx[i] <= x {
                out[i] = x;
                open -= 1;
            }
        }
    }
    out
}
