use specshape_core::analysis::{expected_completion_time_arq, expected_completion_time_nc, DEFAULT_TAIL_TOL};
use specshape_core::sampling::stream;
use specshape_core::sim::sample_batch_completion;

/// Sample mean and standard error of `n` simulated completion times.
fn monte_carlo(m: u32, l: u32, eps: f64, n: u32, seed: u64) -> (f64, f64) {
    let mut rng = stream(seed, 0);
    let (mut s, mut s2) = (0.0, 0.0);
    for _ in 0..n {
        let t = f64::from(sample_batch_completion(m, l, eps, &mut rng));
        s += t;
        s2 += t * t;
    }
    let nf = f64::from(n);
    let mean = s / nf;
    (mean, ((s2 / nf - mean * mean) / (nf - 1.0)).sqrt())
}

#[test]
fn nc_completion_time_matches_monte_carlo() {
    for &(m, l, eps) in &[(8, 20, 0.2), (1, 1, 0.5), (4, 5, 0.05), (2, 20, 0.3)] {
        let analytic = expected_completion_time_nc(m, l, eps, DEFAULT_TAIL_TOL);
        let (mean, se) = monte_carlo(m, l, eps, 200_000, u64::from(m * 100 + l));
        assert!((mean - analytic).abs() < 3.0 * se, "({m},{l},{eps}): {mean} ± {se} vs {analytic}");
    }
}

#[test]
fn arq_completion_time_matches_monte_carlo() {
    for &(l, eps) in &[(20, 0.2), (5, 0.3)] {
        let analytic = expected_completion_time_arq(l, eps, DEFAULT_TAIL_TOL);
        let (mean, se) = monte_carlo(1, l, eps, 200_000, 77 + u64::from(l));
        assert!((mean - analytic).abs() < 3.0 * se, "({l},{eps}): {mean} ± {se} vs {analytic}");
    }
}

#[test]
fn lossless_batch_takes_exactly_m_slots() {
    let mut rng = stream(1, 0);
    for m in 1..10 {
        assert_eq!(sample_batch_completion(m, 7, 0.0, &mut rng), m);
        assert_eq!(expected_completion_time_nc(m, 7, 0.0, DEFAULT_TAIL_TOL), f64::from(m));
    }
}
