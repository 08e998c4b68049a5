mod common;

use common::*;
use proptest::prelude::*;
use rand::Rng;
use repliq::{
    adjust_step_up, c1, c1_tilde, f_values, fdr_rvalues, harmonic, m_star, solve_fdr_rvalue,
    Dependency, DirectedPair, Direction, EvaluationContext,
};

/// Linear enumeration of the branches `a_k = c1 / (1 + H_k)`, returning the
/// first `k` with `ceil(t m / (a_k x)) - 1 == k`. Harmonic sums are
/// accumulated directly.
fn c1_tilde_enumerated(x: f64, t: f64, m: usize, l00: f64, c2: f64) -> (f64, u64) {
    let c = c1(x, l00, c2).unwrap();
    let mut h = 0.0;
    for k in 0u64.. {
        if k > 0 {
            h += 1.0 / k as f64;
        }
        let a = c / (1.0 + h);
        let upper = (t * m as f64 / (a * x)).ceil() - 1.0;
        if upper == k as f64 {
            return (a, k);
        }
        assert!(k < 50_000_000, "enumeration ran away");
    }
    unreachable!()
}

#[test]
fn c1_tilde_example_matches_enumeration() {
    let (expect, k) = c1_tilde_enumerated(0.05, 0.5, 10, 0.0, 0.5);
    let got = c1_tilde(0.05, 0.5, 10, 0.0, 0.5).unwrap();
    assert_eq!(got.branch, k);
    assert!((got.value - expect).abs() <= 1e-12 * expect, "{} vs {}", got.value, expect);
    assert!(!got.fallback);
    assert!(got.value < 0.5);
}

#[test]
fn c1_tilde_random_cases_match_enumeration() {
    let mut rng = rng(99);
    for _ in 0..300 {
        let x = rng.random_range(0.01..1.0);
        let m = rng.random_range(1..200usize);
        let t = rng.random_range(1e-4..0.2);
        let l00 = L00_CHOICES[rng.random_range(0..3)];
        let c2 = C2_CHOICES[rng.random_range(0..3)];
        let (expect, k) = c1_tilde_enumerated(x, t, m, l00, c2);
        let got = c1_tilde(x, t, m, l00, c2).unwrap();
        assert_eq!(got.branch, k, "x={x} t={t} m={m}");
        assert!((got.value - expect).abs() <= 1e-12 * expect);
    }
}

#[test]
fn c1_tilde_penalty_grows_with_threshold() {
    let base = c1(0.05, 0.8, 0.5).unwrap();
    let small = c1_tilde(0.05, 0.01, 1000, 0.8, 0.5).unwrap().value;
    let large = c1_tilde(0.05, 0.99, 1000, 0.8, 0.5).unwrap().value;
    assert!(large < small && small < base);
}

#[test]
fn m_star_over_m_is_harmonic_and_increasing() {
    let mut prev = 0.0;
    for m in 1..=500usize {
        let ratio = m_star(m).unwrap() / m as f64;
        let direct: f64 = (1..=m).rev().map(|i| 1.0 / i as f64).sum();
        assert!((ratio - direct).abs() <= 4.0 * f64::EPSILON * direct);
        assert!((ratio - harmonic(m as u64)).abs() <= f64::EPSILON * direct);
        assert!(ratio > prev);
        prev = ratio;
    }
}

/// `min_{j: e_j >= e_i} e_j m / rank_j` with rank = number of e-values <= e_j.
fn brute_force_adjust(e: &[f64], m: f64) -> Vec<f64> {
    e.iter()
        .map(|&ei| {
            e.iter()
                .filter(|&&ej| ej >= ei)
                .map(|&ej| ej * m / e.iter().filter(|&&el| el <= ej).count() as f64)
                .fold(f64::INFINITY, f64::min)
        })
        .collect()
}

proptest! {
    #[test]
    fn step_up_adjustment_matches_definition(
        e in prop::collection::vec(prop_oneof![0.0..1.0f64, Just(0.25), Just(0.5)], 1..25),
        m in 1.0..200.0f64,
    ) {
        let fast = adjust_step_up(&e, m);
        let slow = brute_force_adjust(&e, m);
        for (a, b) in fast.iter().zip(&slow) {
            prop_assert!((a - b).abs() <= 1e-15 * b.abs().max(1.0));
        }
    }
}

#[test]
fn fdr_rvalue_matches_fine_grid() {
    let mut rng = rng(5);
    for _ in 0..4 {
        let r1 = 5;
        let pairs = enriched_pairs(&mut rng, r1, 100);
        let ctx = EvaluationContext::new(100, r1, 0.8, 0.5, Dependency::Independent).unwrap();
        let grid = grid_first_crossing(1e-6, |x| f_values(x, &pairs, &ctx).unwrap(), r1);
        let got = fdr_rvalues(&pairs, &ctx).unwrap();
        for (g, r) in grid.iter().zip(&got.results) {
            assert!((g - r.r_value).abs() <= 1e-6, "grid {g} vs {}", r.r_value);
        }
    }
}

#[test]
fn ratio_f_over_x_is_decreasing() {
    let mut rng = rng(17);
    for _ in 0..200 {
        let dep = if rng.random::<bool>() {
            Dependency::Independent
        } else {
            Dependency::ArbitraryMStar
        };
        let inst = random_instance(&mut rng, true, dep);
        let mut prev: Option<Vec<f64>> = None;
        for k in 1..1000 {
            let x = k as f64 / 1000.0;
            let ratio: Vec<f64> = f_values(x, &inst.pairs, &inst.ctx)
                .unwrap()
                .into_iter()
                .map(|f| f / x)
                .collect();
            if let Some(p) = &prev {
                for (a, b) in p.iter().zip(&ratio) {
                    assert!(b < a, "ratio not strictly decreasing at x={x}: {a} -> {b}");
                }
            }
            prev = Some(ratio);
        }
    }
}

#[test]
fn mstar_mode_is_more_conservative() {
    let mut rng = rng(8);
    for _ in 0..200 {
        let inst = random_instance(&mut rng, true, Dependency::Independent);
        let mstar = EvaluationContext::new(
            inst.ctx.m,
            inst.ctx.r1,
            inst.ctx.l00,
            inst.ctx.c2,
            Dependency::ArbitraryMStar,
        )
        .unwrap();
        let a = fdr_rvalues(&inst.pairs, &inst.ctx).unwrap();
        let b = fdr_rvalues(&inst.pairs, &mstar).unwrap();
        for (x, y) in a.results.iter().zip(&b.results) {
            assert!(y.r_value >= x.r_value - 1e-12);
        }
    }
}

#[test]
fn threshold_mode_no_penalty_matches_independent() {
    // With t tiny, c1_tilde = c1 at every grid level the crossing can occur,
    // so threshold-mode r-values agree with independent ones up to the grid.
    let pairs = vec![
        DirectedPair::new("a", 1e-6, 0.004, Direction::Left),
        DirectedPair::new("b", 2e-6, 0.02, Direction::Right),
        DirectedPair::new("c", 4e-5, 0.001, Direction::Left),
    ];
    let indep = EvaluationContext::new(200, 3, 0.8, 0.5, Dependency::Independent).unwrap();
    let thr = EvaluationContext::new(
        200,
        3,
        0.8,
        0.5,
        Dependency::ArbitraryThreshold { t: 1e-9 },
    )
    .unwrap();
    for i in 0..3 {
        let a = solve_fdr_rvalue(i, &pairs, &indep).unwrap().r_value;
        let b = solve_fdr_rvalue(i, &pairs, &thr).unwrap().r_value;
        assert!((a - b).abs() < 1e-9, "{a} vs {b}");
    }
}
