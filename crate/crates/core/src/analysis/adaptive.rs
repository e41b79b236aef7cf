use alloc::vec::Vec;

use super::fixed_point::{prediction_distance, solve_adaptive_fixed_point};
use super::mean_field::solve_mean_field;
use super::occupancy::OccupancyModel;
use super::random::{first_idle_cost, printed_sensing_cost, su_throughput_random};
use super::{FormulaMode, Regime, SolverOptions, SuThroughputReport};
use crate::math::powi;
use crate::AnalysisError;

#[derive(Debug, Clone, PartialEq)]
pub struct AdaptiveOutcome {
    pub report: SuThroughputReport,
    pub idle_prob: f64,
    /// pi_0 of whichever solver backs the formula mode.
    pub pi0: f64,
    pub delta: f64,
    pub iterations: usize,
}

/// SU throughput of the two-stage backoff strategy.
///
/// `AsPrinted` uses only the marginal idle probability of `model`, the
/// scalar fixed point and the reference double sums. `Rederived` solves the
/// occupancy mean field and takes the joint first-idle-position distribution
/// given `N_t = n`. With `k = 0` both return exactly the random-sensing
/// report.
pub fn su_throughput_adaptive(
    model: &OccupancyModel,
    channels: u32,
    budget: u32,
    k: u32,
    mode: FormulaMode,
    opts: SolverOptions,
) -> Result<AdaptiveOutcome, AnalysisError> {
    let idle = model.idle_prob()?;
    if k == 0 {
        let report = su_throughput_random(idle, channels, budget, mode)?;
        return Ok(AdaptiveOutcome {
            report,
            idle_prob: idle,
            pi0: 1.0,
            delta: prediction_distance(1.0, idle),
            iterations: 0,
        });
    }
    match mode {
        FormulaMode::AsPrinted => {
            let fp = solve_adaptive_fixed_point(idle, channels, budget, k, opts)?;
            let (p_r, cost) = printed_adaptive(&fp.list_size_dist, idle, channels, budget);
            Ok(AdaptiveOutcome {
                report: report(p_r, cost, channels, budget, mode),
                idle_prob: idle,
                pi0: fp.pi0,
                delta: fp.delta,
                iterations: fp.iterations,
            })
        }
        FormulaMode::Rederived => {
            let mf = solve_mean_field(model, channels, budget, k, opts)?;
            let (p_r, cost) = conditional_outcomes(&mf.list_size_dist, mf.p_in, mf.p_out, channels, budget)
                .iter()
                .zip(&mf.list_size_dist)
                .fold((0.0, 0.0), |(a, b), (c, &w)| (a + w * c.0, b + w * c.1));
            Ok(AdaptiveOutcome {
                report: report(p_r, cost, channels, budget, mode),
                idle_prob: idle,
                pi0: mf.pi0,
                delta: prediction_distance(mf.pi0, idle),
                iterations: mf.iterations,
            })
        }
    }
}

fn report(p_r: f64, cost: f64, channels: u32, budget: u32, mode: FormulaMode) -> SuThroughputReport {
    SuThroughputReport {
        success_prob: p_r,
        expected_sensing_cost: cost,
        throughput: f64::from(budget) * p_r - cost,
        regime: Regime::of(channels, budget),
        formula_mode: mode,
    }
}

/// `(P(1 = 1 | N_t = n), E[D 1 | N_t = n])` for each `n`: the SU probes
/// `min(n, B)` listed channels idle w.p. `p_in`, then backup channels idle
/// w.p. `p_out` until `min(N, B)` have been sensed.
pub(crate) fn conditional_outcomes(
    list_size_dist: &[f64],
    p_in: f64,
    p_out: f64,
    channels: u32,
    budget: u32,
) -> Vec<(f64, f64)> {
    let total = channels.min(budget);
    (0..list_size_dist.len() as u32)
        .map(|n| {
            let first = n.min(budget);
            let mut surv = 1.0;
            let (mut pr, mut cost) = (0.0, 0.0);
            for d in 1..=total {
                let p = if d <= first { p_in } else { p_out };
                pr += surv * p;
                cost += surv * p * f64::from(d);
                surv *= 1.0 - p;
            }
            (pr, cost)
        })
        .collect()
}

/// The as-printed `p_r` and `E[D 1]` for adaptive sensing, both regimes.
pub(crate) fn printed_adaptive(pn: &[f64], idle: f64, channels: u32, budget: u32) -> (f64, f64) {
    let q = 1.0 - idle;
    let big_n = channels;
    let b = budget;
    let mut p_r = 0.0;
    let mut cost = 0.0;
    if b >= big_n {
        p_r = 1.0 - powi(q, big_n);
        for (n, &w) in pn.iter().enumerate() {
            let n = n as u32;
            let first = printed_sensing_cost(idle, n) * (1.0 - powi(q, n));
            let second: f64 = (n + 1..=big_n)
                .map(|d| f64::from(d) * idle * powi(q, d - n - 1) * (1.0 - powi(q, big_n - n)) * powi(q, n))
                .sum();
            cost += (first + second) * w;
        }
    } else {
        for (n, &w) in pn.iter().enumerate() {
            let n = n as u32;
            if n <= b {
                p_r += ((1.0 - powi(q, n)) + powi(q, n) * (1.0 - powi(q, b - n))) * w;
                let first = first_idle_cost(idle, n) * (1.0 - powi(q, n));
                let second: f64 = (n + 1..=b)
                    .map(|d| f64::from(d) * idle * powi(q, d - n - 1) * powi(q, n) * (1.0 - powi(q, b - n)))
                    .sum();
                cost += (first + second) * w;
            } else {
                p_r += (1.0 - powi(q, b)) * w;
                cost += first_idle_cost(idle, b) * (1.0 - powi(q, b)) * w;
            }
        }
    }
    (p_r, cost)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::ServiceMode;
    use crate::math::binomial_pmf;
    use FormulaMode::*;

    fn opts() -> SolverOptions {
        SolverOptions::default()
    }

    #[test]
    fn k_zero_is_random_sensing() {
        for &(n, b) in &[(10, 15), (10, 4), (3, 3)] {
            for &p in &[0.1, 0.45, 0.9] {
                for mode in [AsPrinted, Rederived] {
                    let a = su_throughput_adaptive(&p.into(), n, b, 0, mode, opts()).unwrap();
                    let r = su_throughput_random(p, n, b, mode).unwrap();
                    assert_eq!(a.report, r);
                }
            }
        }
    }

    #[test]
    fn printed_sums_with_full_list_are_printed_random() {
        for &(n, b) in &[(10, 15), (10, 4), (6, 6)] {
            for &p in &[0.1, 0.45, 0.9] {
                let (p_r, cost) = printed_adaptive(&binomial_pmf(n, 1.0), p, n, b);
                let r = su_throughput_random(p, n, b, AsPrinted).unwrap();
                assert!((p_r - r.success_prob).abs() < 1e-14);
                assert!((cost - r.expected_sensing_cost).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn printed_regimes_agree_at_b_equal_n() {
        let pn = binomial_pmf(6, 0.55);
        let a = printed_adaptive(&pn, 0.3, 6, 6);
        let b = printed_adaptive(&pn, 0.3, 6, 7);
        assert!((a.0 - b.0).abs() < 1e-14 && (a.1 - b.1).abs() < 1e-13);
    }

    #[test]
    fn memoryless_rederived_is_random_for_any_k() {
        for k in 1..5 {
            for &(n, b) in &[(10, 15), (10, 4), (2, 4)] {
                let a = su_throughput_adaptive(&0.35.into(), n, b, k, Rederived, opts()).unwrap();
                let r = su_throughput_random(0.35, n, b, Rederived).unwrap();
                assert!((a.report.throughput - r.throughput).abs() < 1e-8, "k={k} n={n} b={b}");
            }
        }
    }

    #[test]
    fn always_idle() {
        for mode in [AsPrinted, Rederived] {
            let a = su_throughput_adaptive(&1.0.into(), 10, 15, 3, mode, opts()).unwrap();
            assert!((a.report.success_prob - 1.0).abs() < 1e-9);
            assert!((a.report.expected_sensing_cost - 1.0).abs() < 1e-9);
            assert!((a.report.throughput - 14.0).abs() < 1e-8);
        }
    }

    #[test]
    fn law_of_total_expectation() {
        let pn = binomial_pmf(7, 0.6);
        let parts = conditional_outcomes(&pn, 0.7, 0.2, 7, 5);
        for (n, &(pr, cost)) in parts.iter().enumerate() {
            // enumerate the probe outcome distribution directly
            let first = (n as u32).min(5);
            let mut dist = Vec::new();
            let mut surv = 1.0;
            for d in 1..=5u32 {
                let p = if d <= first { 0.7 } else { 0.2 };
                dist.push(surv * p);
                surv *= 1.0 - p;
            }
            let s: f64 = dist.iter().sum();
            assert!((s + surv - 1.0).abs() < 1e-15);
            assert!((s - pr).abs() < 1e-15);
            let c: f64 = dist.iter().enumerate().map(|(i, p)| p * (i + 1) as f64).sum();
            assert!((c - cost).abs() < 1e-14);
        }
    }

    #[test]
    fn adaptive_beats_random_under_batch_service() {
        let model = OccupancyModel::BatchService {
            mode: ServiceMode::NetworkCoding { batch: 2 },
            receivers: 20,
            erasure: 0.2,
            arrival_rate: 0.4,
        };
        let a = su_throughput_adaptive(&model, 10, 15, 2, Rederived, opts()).unwrap();
        let r = su_throughput_random(a.idle_prob, 10, 15, Rederived).unwrap();
        assert!(a.report.throughput > r.throughput);
    }
}
