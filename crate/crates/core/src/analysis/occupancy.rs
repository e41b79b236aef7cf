//! Slot-to-slot occupancy of a single PU channel as a finite Markov chain.
//!
//! A state describes the channel during one slot, after that slot's arrival
//! and batch-start decision; `is_busy` says whether the base station
//! transmits in it.

use alloc::vec::Vec;

use super::completion::completion_time_survival;
use super::profile::{pu_profile_for, ServiceMode};
use crate::config::NetworkConfig;
use crate::AnalysisError;

/// Sparse row-stochastic chain with a busy flag per state.
#[derive(Debug, Clone)]
pub struct OccupancyChain {
    busy: Vec<bool>,
    row_start: Vec<usize>,
    cols: Vec<u32>,
    probs: Vec<f64>,
}

impl OccupancyChain {
    /// Builds from per-state outgoing transitions. Probabilities of repeated
    /// targets are added.
    pub fn from_rows(busy: Vec<bool>, rows: Vec<Vec<(usize, f64)>>) -> Self {
        assert_eq!(busy.len(), rows.len());
        let mut row_start = Vec::with_capacity(rows.len() + 1);
        let mut cols = Vec::new();
        let mut probs = Vec::new();
        row_start.push(0);
        for row in rows {
            for (to, p) in row {
                if p > 0.0 {
                    cols.push(to as u32);
                    probs.push(p);
                }
            }
            row_start.push(cols.len());
        }
        Self {
            busy,
            row_start,
            cols,
            probs,
        }
    }

    pub fn len(&self) -> usize {
        self.busy.len()
    }

    pub fn is_empty(&self) -> bool {
        self.busy.is_empty()
    }

    pub fn is_busy(&self, state: usize) -> bool {
        self.busy[state]
    }

    /// `to = from * P`. `to` is overwritten.
    pub fn advance(&self, from: &[f64], to: &mut [f64]) {
        to.iter_mut().for_each(|x| *x = 0.0);
        for (s, &mass) in from.iter().enumerate() {
            if mass == 0.0 {
                continue;
            }
            for e in self.row_start[s]..self.row_start[s + 1] {
                to[self.cols[e] as usize] += mass * self.probs[e];
            }
        }
    }

    /// Largest deviation of a row sum from one.
    pub fn row_sum_error(&self) -> f64 {
        (0..self.len())
            .map(|s| {
                let sum: f64 = self.probs[self.row_start[s]..self.row_start[s + 1]].iter().sum();
                (sum - 1.0).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Stationary distribution by power iteration from `initial`, stopping
    /// once successive iterates differ by less than `tol` in L1.
    pub fn stationary(&self, initial: Vec<f64>, tol: f64, max_iter: usize) -> Result<Vec<f64>, AnalysisError> {
        let mut x = initial;
        let mut y = alloc::vec![0.0; self.len()];
        let mut diff = f64::INFINITY;
        for _ in 0..max_iter {
            self.advance(&x, &mut y);
            diff = x.iter().zip(&y).map(|(a, b)| (a - b).abs()).sum();
            core::mem::swap(&mut x, &mut y);
            if diff < tol {
                return Ok(x);
            }
        }
        Err(AnalysisError::NoConvergence {
            max_iter,
            residual: diff,
        })
    }

    pub fn idle_mass(&self, dist: &[f64]) -> f64 {
        dist.iter()
            .zip(&self.busy)
            .filter(|(_, &b)| !b)
            .map(|(x, _)| x)
            .sum()
    }
}

/// What the analysis knows about a channel's occupancy over time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OccupancyModel {
    /// Idle with probability `idle` in every slot, independently.
    Memoryless { idle: f64 },
    /// Bernoulli arrivals into a queue served in batches of `batch` packets,
    /// each batch lasting until all receivers have `batch` receptions.
    BatchService {
        mode: ServiceMode,
        receivers: u32,
        erasure: f64,
        arrival_rate: f64,
    },
}

impl From<f64> for OccupancyModel {
    fn from(idle: f64) -> Self {
        OccupancyModel::Memoryless { idle }
    }
}

/// Stationary chain together with its distribution.
#[derive(Debug, Clone)]
pub struct SolvedChain {
    pub chain: OccupancyChain,
    pub stationary: Vec<f64>,
    pub idle_prob: f64,
}

impl OccupancyModel {
    pub fn from_config(cfg: &NetworkConfig) -> Self {
        OccupancyModel::BatchService {
            mode: ServiceMode::of(cfg),
            receivers: cfg.num_receivers,
            erasure: cfg.erasure_prob,
            arrival_rate: cfg.arrival_rate,
        }
    }

    /// Marginal idle probability. For batch service this is the Little's-law
    /// value, and an unstable queue is an error.
    pub fn idle_prob(&self) -> Result<f64, AnalysisError> {
        match *self {
            OccupancyModel::Memoryless { idle } => {
                super::check_prob(idle, "idle probability out of range")?;
                Ok(idle)
            }
            OccupancyModel::BatchService {
                mode,
                receivers,
                erasure,
                arrival_rate,
            } => Ok(pu_profile_for(mode, receivers, erasure, arrival_rate)?.idle_prob),
        }
    }

    /// Builds and solves the occupancy chain. Batch-service queues are
    /// truncated at a length doubled until the stationary mass at the cap is
    /// below `tol`.
    pub fn solve(&self, tol: f64) -> Result<SolvedChain, AnalysisError> {
        match *self {
            OccupancyModel::Memoryless { idle } => {
                super::check_prob(idle, "idle probability out of range")?;
                let chain = OccupancyChain::from_rows(
                    alloc::vec![false, true],
                    alloc::vec![
                        alloc::vec![(0, idle), (1, 1.0 - idle)],
                        alloc::vec![(0, idle), (1, 1.0 - idle)],
                    ],
                );
                Ok(SolvedChain {
                    chain,
                    stationary: alloc::vec![idle, 1.0 - idle],
                    idle_prob: idle,
                })
            }
            OccupancyModel::BatchService {
                mode,
                receivers,
                erasure,
                arrival_rate,
            } => {
                // stability check and the E[T] used to size the first cap
                let profile = pu_profile_for(mode, receivers, erasure, arrival_rate)?;
                let batch = mode.batch();
                let hazard = service_hazard(mode, receivers, erasure);
                let rho = 1.0 - profile.idle_prob;
                // geometric-tail guess for the queue length
                let guess = (f64::from(batch) * 30.0 / (1.0 - rho).max(1e-3)) as usize;
                let mut cap = guess.clamp(4 * batch as usize + 8, 1 << 14);
                loop {
                    let layout = BatchLayout {
                        batch: batch as usize,
                        ages: hazard.len(),
                        cap,
                    };
                    let chain = layout.build(arrival_rate, &hazard);
                    let mut init = alloc::vec![0.0; chain.len()];
                    init[0] = 1.0;
                    let stationary = chain.stationary(init, tol * 1e-2, 2_000_000)?;
                    let at_cap: f64 = (0..layout.ages).map(|a| stationary[layout.busy_index(cap, a)]).sum();
                    if at_cap < tol || cap >= 1 << 16 {
                        let (chain, stationary) = layout.trimmed(chain, stationary, arrival_rate, &hazard, tol)?;
                        let idle_prob = chain.idle_mass(&stationary);
                        return Ok(SolvedChain {
                            chain,
                            stationary,
                            idle_prob,
                        });
                    }
                    cap *= 2;
                }
            }
        }
    }
}

/// Per-age completion hazard `h(a) = P(T = a+1 | T > a)`, the last age
/// closing the distribution.
fn service_hazard(mode: ServiceMode, receivers: u32, erasure: f64) -> Vec<f64> {
    let survival = completion_time_survival(mode.batch(), receivers, erasure, 1e-15);
    let ages = survival.len() - 1;
    let mut h: Vec<f64> = (0..ages)
        .map(|a| {
            if survival[a] > 0.0 {
                (survival[a] - survival[a + 1]) / survival[a]
            } else {
                1.0
            }
        })
        .collect();
    if let Some(last) = h.last_mut() {
        *last = 1.0;
    }
    h
}

/// Index layout: idle states `q = 0..m-1` first, then busy `(q, age)` with
/// `q = 0..=cap` waiting packets.
struct BatchLayout {
    batch: usize,
    ages: usize,
    cap: usize,
}

impl BatchLayout {
    fn busy_index(&self, q: usize, age: usize) -> usize {
        self.batch + q * self.ages + age
    }

    /// State entered when the server is free and `q` packets are waiting.
    fn free(&self, q: usize) -> usize {
        if q >= self.batch {
            self.busy_index((q - self.batch).min(self.cap), 0)
        } else {
            q
        }
    }

    /// Drops queue levels whose combined stationary mass is below
    /// `tol * 1e-3`, then re-solves from the restricted distribution.
    fn trimmed(
        &self,
        chain: OccupancyChain,
        stationary: Vec<f64>,
        lambda: f64,
        hazard: &[f64],
        tol: f64,
    ) -> Result<(OccupancyChain, Vec<f64>), AnalysisError> {
        let mut tail = 0.0;
        let mut keep = self.cap;
        for q in (1..=self.cap).rev() {
            tail += (0..self.ages).map(|a| stationary[self.busy_index(q, a)]).sum::<f64>();
            if tail >= tol * 1e-3 {
                break;
            }
            keep = q - 1;
        }
        if keep + keep / 4 >= self.cap {
            return Ok((chain, stationary));
        }
        let small = BatchLayout {
            batch: self.batch,
            ages: self.ages,
            cap: keep.max(1),
        };
        let chain = small.build(lambda, hazard);
        let init = stationary[..chain.len()].to_vec();
        let stationary = chain.stationary(init, tol * 1e-2, 2_000_000)?;
        Ok((chain, stationary))
    }

    fn build(&self, lambda: f64, hazard: &[f64]) -> OccupancyChain {
        let n = self.batch + (self.cap + 1) * self.ages;
        let mut busy = alloc::vec![true; n];
        let mut rows = Vec::with_capacity(n);
        for q in 0..self.batch {
            busy[q] = false;
            rows.push(alloc::vec![(self.free(q), 1.0 - lambda), (self.free(q + 1), lambda)]);
        }
        for q in 0..=self.cap {
            for a in 0..self.ages {
                let h = hazard[a];
                let mut row = Vec::with_capacity(4);
                for (arrived, pa) in [(0, 1.0 - lambda), (1, lambda)] {
                    let q2 = (q + arrived).min(self.cap);
                    row.push((self.free(q2), pa * h));
                    if a + 1 < self.ages {
                        row.push((self.busy_index(q2, a + 1), pa * (1.0 - h)));
                    }
                }
                rows.push(row);
            }
        }
        OccupancyChain::from_rows(busy, rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nc(m: u32, l: u32, eps: f64, lam: f64) -> OccupancyModel {
        OccupancyModel::BatchService {
            mode: ServiceMode::NetworkCoding { batch: m },
            receivers: l,
            erasure: eps,
            arrival_rate: lam,
        }
    }

    #[test]
    fn chain_idle_matches_littles_law() {
        for &(m, l, eps, lam) in &[(5, 20, 0.1, 0.4), (2, 20, 0.2, 0.4), (8, 20, 0.2, 0.4), (3, 1, 0.5, 0.2), (1, 4, 0.3, 0.3)] {
            let model = nc(m, l, eps, lam);
            let solved = model.solve(1e-12).unwrap();
            let little = model.idle_prob().unwrap();
            assert!(solved.chain.row_sum_error() < 1e-12);
            assert!((solved.idle_prob - little).abs() < 1e-8, "{m} {l} {eps} {lam}: {} vs {little}", solved.idle_prob);
        }
    }

    #[test]
    fn arq_is_batch_of_one() {
        let a = OccupancyModel::BatchService {
            mode: ServiceMode::Arq,
            receivers: 5,
            erasure: 0.2,
            arrival_rate: 0.4,
        }
        .solve(1e-12)
        .unwrap();
        let b = nc(1, 5, 0.2, 0.4).solve(1e-12).unwrap();
        assert!((a.idle_prob - b.idle_prob).abs() < 1e-12);
    }

    #[test]
    fn lossless_service_lasts_exactly_m_slots() {
        let h = service_hazard(ServiceMode::NetworkCoding { batch: 4 }, 3, 0.0);
        assert_eq!(h, [0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn no_arrivals_means_always_idle() {
        let s = nc(4, 3, 0.1, 0.0).solve(1e-12).unwrap();
        assert_eq!(s.idle_prob, 1.0);
    }

    #[test]
    fn memoryless_is_its_own_marginal() {
        let s = OccupancyModel::from(0.3).solve(1e-12).unwrap();
        let mut y = [0.0; 2];
        s.chain.advance(&s.stationary, &mut y);
        assert!((y[0] - 0.3).abs() < 1e-15);
    }

    #[test]
    fn unstable_queue_is_rejected() {
        assert!(matches!(
            nc(2, 20, 0.2, 0.9).solve(1e-12),
            Err(AnalysisError::UnstableRegime { .. })
        ));
    }
}
