//! Backoff timer of a single channel as a Markov chain on `{0, ..., k}`.
//!
//! State 0 means the channel is in the sensing list. A first-stage busy
//! observation sends it to `k`; from there it counts down, and a second-stage
//! idle observation (probability `p_b P_idle`) returns it to 0 early.

use alloc::vec::Vec;

use crate::math::powi;

#[derive(Debug, Clone, PartialEq)]
pub struct TimerStationary {
    /// pi_i for i = 0..=k.
    pub dist: Vec<f64>,
    pub pi0: f64,
}

/// Row-stochastic transition matrix, `m[i][j] = p_{i,j}`.
pub fn timer_transition_matrix(k: u32, idle: f64, p_s: f64, p_b: f64) -> Vec<Vec<f64>> {
    let n = k as usize + 1;
    let mut m = alloc::vec![alloc::vec![0.0; n]; n];
    if k == 0 {
        m[0][0] = 1.0;
        return m;
    }
    let b = p_b * idle;
    m[0][n - 1] = p_s * (1.0 - idle);
    m[0][0] += p_s * idle + (1.0 - p_s);
    m[1][0] = 1.0;
    for i in 2..n {
        m[i][i - 1] = 1.0 - b;
        m[i][0] = b;
    }
    m
}

/// Stationary vector from the balance equations:
/// `pi_k = pi_0 p_s (1 - P)` and `pi_{i-1} = pi_i (1 - p_b P)`.
pub fn timer_stationary_distribution(k: u32, idle: f64, p_s: f64, p_b: f64) -> TimerStationary {
    if k == 0 {
        return TimerStationary {
            dist: alloc::vec![1.0],
            pi0: 1.0,
        };
    }
    let keep = 1.0 - p_b * idle;
    let n = k as usize;
    // unnormalized, pi_0 = 1
    let mut dist = alloc::vec![0.0; n + 1];
    dist[0] = 1.0;
    dist[n] = p_s * (1.0 - idle);
    for i in (1..n).rev() {
        dist[i] = dist[i + 1] * keep;
    }
    let total: f64 = dist.iter().sum();
    for x in &mut dist {
        *x /= total;
    }
    TimerStationary { pi0: dist[0], dist }
}

/// The as-printed closed form for pi_0. The geometric factor
/// `(1 - b)(1 - (1 - b)^(k-1)) / b`, `b = p_b P`, is replaced by its series
/// `sum_{j=1}^{k-1} (1 - b)^j` when `b < 1e-9`.
pub fn pi0_closed_form(k: u32, idle: f64, p_s: f64, p_b: f64) -> f64 {
    if k == 0 {
        return 1.0;
    }
    let b = p_b * idle;
    let geo = if b < 1e-9 {
        let mut s = 0.0;
        let mut term = 1.0;
        for _ in 1..k {
            term *= 1.0 - b;
            s += term;
        }
        s
    } else {
        (1.0 - b) * (1.0 - powi(1.0 - b, k - 1)) / b
    };
    1.0 / (1.0 + p_s * (1.0 - idle) * (1.0 + geo))
}
