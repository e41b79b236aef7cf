use alloc::vec::Vec;

use super::sensing::stage_sensing_probabilities;
use super::timer::{pi0_closed_form, timer_stationary_distribution};
use super::{check_prob, SolverOptions};
use crate::math::binomial_pmf;
use crate::AnalysisError;

#[derive(Debug, Clone, PartialEq)]
pub struct AdaptiveFixedPoint {
    pub pi0: f64,
    pub p_sense_first: f64,
    pub p_sense_backup: f64,
    /// p_n, n = 0..=N.
    pub list_size_dist: Vec<f64>,
    /// pi_i, i = 0..=k.
    pub timer_dist: Vec<f64>,
    /// |pi_0 - P_idle|
    pub delta: f64,
    pub iterations: usize,
}

/// One application of `T`: binomial list size from `pi0`, stage
/// probabilities, then the timer chain's pi_0.
pub fn fixed_point_map(pi0: f64, idle: f64, channels: u32, budget: u32, k: u32) -> f64 {
    let pn = binomial_pmf(channels, pi0);
    let st = stage_sensing_probabilities(&pn, idle, channels, budget);
    pi0_closed_form(k, idle, st.first, st.backup)
}

/// Damped scalar iteration on pi_0 until `|pi_0 - T(pi_0)| < tol`.
pub fn solve_adaptive_fixed_point(
    idle: f64,
    channels: u32,
    budget: u32,
    k: u32,
    opts: SolverOptions,
) -> Result<AdaptiveFixedPoint, AnalysisError> {
    check_prob(idle, "idle probability out of range")?;
    if channels == 0 || budget == 0 {
        return Err(AnalysisError::InvalidInput("channels and budget must be positive"));
    }
    check_prob(opts.start, "start must lie in [0, 1]")?;

    let mut x = if k == 0 { 1.0 } else { opts.start };
    let mut iterations = 0;
    loop {
        let tx = fixed_point_map(x, idle, channels, budget, k);
        let residual = (tx - x).abs();
        if residual < opts.tol {
            break;
        }
        if iterations >= opts.max_iter {
            return Err(AnalysisError::NoConvergence {
                max_iter: opts.max_iter,
                residual,
            });
        }
        x = (1.0 - opts.damping) * x + opts.damping * tx;
        iterations += 1;
    }

    let pn = binomial_pmf(channels, x);
    let st = stage_sensing_probabilities(&pn, idle, channels, budget);
    let timer = timer_stationary_distribution(k, idle, st.first, st.backup);
    Ok(AdaptiveFixedPoint {
        pi0: x,
        p_sense_first: st.first,
        p_sense_backup: st.backup,
        list_size_dist: pn,
        timer_dist: timer.dist,
        delta: prediction_distance(x, idle),
        iterations,
    })
}

pub fn prediction_distance(pi0: f64, idle: f64) -> f64 {
    (pi0 - idle).abs()
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimalBackoff {
    pub best_k: u32,
    /// delta(k) for k = 0..=k_max.
    pub curve: Vec<f64>,
}

/// Grid search of `|pi_0(k) - P_idle|` over `k = 0..=k_max`; ties go to the
/// smallest k.
pub fn optimal_backoff(
    idle: f64,
    channels: u32,
    budget: u32,
    k_max: u32,
    opts: SolverOptions,
) -> Result<OptimalBackoff, AnalysisError> {
    if k_max == 0 {
        return Err(AnalysisError::InvalidInput("k_max must be at least 1"));
    }
    let mut curve = Vec::with_capacity(k_max as usize + 1);
    for k in 0..=k_max {
        curve.push(solve_adaptive_fixed_point(idle, channels, budget, k, opts)?.delta);
    }
    let mut best_k = 0;
    for (k, &d) in curve.iter().enumerate() {
        if d < curve[best_k as usize] {
            best_k = k as u32;
        }
    }
    Ok(OptimalBackoff { best_k, curve })
}
