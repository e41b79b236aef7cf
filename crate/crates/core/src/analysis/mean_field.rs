//! Occupancy-aware mean field for adaptive sensing.
//!
//! Each channel is tracked jointly as (PU occupancy state, backoff timer).
//! The other channels enter only through three scalars: the probability
//! `pi0` that a channel is listed, and the idle probabilities `p_in` and
//! `p_out` of listed and backed-off channels. From those, the probability
//! that a tagged channel is sensed follows by conditioning on it (a listed
//! channel sees `Bin(N-1, pi0)` other listed channels, not `Bin(N, pi0)`).
//!
//! With memoryless occupancy, `p_in = p_out = P_idle` and the SU throughput
//! collapses to random sensing. With batch service, a channel just seen busy
//! is likely still busy, a channel just seen idle is likely still idle, and
//! that correlation is what the timers exploit.

use alloc::vec::Vec;

use super::occupancy::OccupancyModel;
use super::SolverOptions;
use crate::math::{binomial_pmf, powi};
use crate::AnalysisError;

/// Joint steps per refresh of the sensing probabilities.
const INNER_STEPS: usize = 50;

#[derive(Debug, Clone, PartialEq)]
pub struct MeanFieldSolution {
    /// Marginal idle probability of the occupancy chain.
    pub idle_prob: f64,
    pub pi0: f64,
    /// P(idle | listed)
    pub p_in: f64,
    /// P(idle | backed off)
    pub p_out: f64,
    /// P(a busy listed channel is sensed)
    pub p_sense_listed: f64,
    /// P(an idle backed-off channel is reached in the second stage)
    pub p_rescue: f64,
    pub list_size_dist: Vec<f64>,
    pub iterations: usize,
}

/// `sum_{r=1}^{count} (1 - p)^(r-1)`
fn scan_reach(p: f64, count: u32) -> f64 {
    let q = 1.0 - p;
    let mut s = 0.0;
    let mut t = 1.0;
    for _ in 0..count {
        s += t;
        t *= q;
    }
    s
}

fn sensing_probabilities(pi0: f64, p_in: f64, p_out: f64, channels: u32, budget: u32) -> (f64, f64) {
    let others = binomial_pmf(channels - 1, pi0);
    let mut listed = 0.0;
    let mut rescue = 0.0;
    for (n, &w) in others.iter().enumerate() {
        let n = n as u32;
        listed += w / f64::from(n + 1) * scan_reach(p_in, (n + 1).min(budget));
        if n < budget {
            let backup = channels - n;
            rescue += w * powi(1.0 - p_in, n) / f64::from(backup)
                * scan_reach(p_out, backup.min(budget - n));
        }
    }
    (listed, rescue)
}

pub fn solve_mean_field(
    model: &OccupancyModel,
    channels: u32,
    budget: u32,
    k: u32,
    opts: SolverOptions,
) -> Result<MeanFieldSolution, AnalysisError> {
    if channels == 0 || budget == 0 {
        return Err(AnalysisError::InvalidInput("channels and budget must be positive"));
    }
    let solved = model.solve(1e-12)?;
    let idle = solved.idle_prob;
    if k == 0 {
        return Ok(MeanFieldSolution {
            idle_prob: idle,
            pi0: 1.0,
            p_in: idle,
            p_out: idle,
            p_sense_listed: sensing_probabilities(1.0, idle, idle, channels, budget).0,
            p_rescue: 0.0,
            list_size_dist: binomial_pmf(channels, 1.0),
            iterations: 0,
        });
    }

    let chain = &solved.chain;
    let states = chain.len();
    let layers = k as usize + 1;
    // x[i] is the joint mass over occupancy states with timer i
    let mut x: Vec<Vec<f64>> = (0..layers)
        .map(|i| if i == 0 { solved.stationary.clone() } else { alloc::vec![0.0; states] })
        .collect();
    let mut y: Vec<Vec<f64>> = alloc::vec![alloc::vec![0.0; states]; layers];

    let (mut pi0, mut p_in, mut p_out) = (opts.start.max(1e-3), idle, idle);
    let a = opts.damping;
    let mut iterations = 0;
    loop {
        let (s1, s2) = sensing_probabilities(pi0, p_in, p_out, channels, budget);
        for _ in 0..INNER_STEPS {
            for layer in y.iter_mut() {
                layer.iter_mut().for_each(|v| *v = 0.0);
            }
            // timer update on the current slot's occupancy
            for s in 0..states {
                let busy = chain.is_busy(s);
                let x0 = x[0][s];
                if busy {
                    y[k as usize][s] += x0 * s1;
                    y[0][s] += x0 * (1.0 - s1);
                } else {
                    y[0][s] += x0;
                }
                y[0][s] += x[1][s];
                for i in 2..layers {
                    let xi = x[i][s];
                    if busy {
                        y[i - 1][s] += xi;
                    } else {
                        y[0][s] += xi * s2;
                        y[i - 1][s] += xi * (1.0 - s2);
                    }
                }
            }
            // then the occupancy moves to the next slot
            for i in 0..layers {
                chain.advance(&y[i], &mut x[i]);
            }
        }

        let new_pi0: f64 = x[0].iter().sum();
        let idle_listed = chain.idle_mass(&x[0]);
        let idle_out: f64 = x[1..].iter().map(|l| chain.idle_mass(l)).sum();
        let new_in = if new_pi0 > 0.0 { idle_listed / new_pi0 } else { idle };
        let new_out = if new_pi0 < 1.0 { idle_out / (1.0 - new_pi0) } else { idle };

        let residual = (new_pi0 - pi0).abs().max((new_in - p_in).abs()).max((new_out - p_out).abs());
        iterations += 1;
        if residual < opts.tol {
            let (s1, s2) = sensing_probabilities(new_pi0, new_in, new_out, channels, budget);
            return Ok(MeanFieldSolution {
                idle_prob: idle,
                pi0: new_pi0,
                p_in: new_in,
                p_out: new_out,
                p_sense_listed: s1,
                p_rescue: s2,
                list_size_dist: binomial_pmf(channels, new_pi0),
                iterations,
            });
        }
        if iterations >= opts.max_iter {
            return Err(AnalysisError::NoConvergence {
                max_iter: opts.max_iter,
                residual,
            });
        }
        pi0 = (1.0 - a) * pi0 + a * new_pi0;
        p_in = (1.0 - a) * p_in + a * new_in;
        p_out = (1.0 - a) * p_out + a * new_out;
    }
}
