//! Batch completion time over an erasure broadcast channel.
//!
//! A batch of `m` coded packets is done once every one of `L` receivers has
//! collected `m` receptions. Each receiver's count is negative binomial, so
//! `P(T <= t) = F(t)^L` with `F` the negative-binomial CDF.

use alloc::vec::Vec;

use crate::math::round_ties_even;

/// Default truncation tolerance for the infinite series.
pub const DEFAULT_TAIL_TOL: f64 = 1e-12;

/// Walks the negative-binomial CDF `F(t)` for `t = m, m+1, ...`.
///
/// Terms follow `term(a+1) = term(a) * eps * a / (a - m + 1)`, which never
/// forms a factorial.
#[derive(Debug, Clone)]
pub struct NegBinomialCdf {
    batch: u32,
    erasure: f64,
    t: u32,
    term: f64,
    cdf: f64,
}

impl NegBinomialCdf {
    pub fn new(batch: u32, erasure: f64) -> Self {
        assert!(batch >= 1);
        Self {
            batch,
            erasure,
            t: batch - 1,
            term: 0.0,
            cdf: 0.0,
        }
    }
}

impl Iterator for NegBinomialCdf {
    /// `(t, F(t))`
    type Item = (u32, f64);

    fn next(&mut self) -> Option<(u32, f64)> {
        self.t += 1;
        if self.t == self.batch {
            self.term = libm::pow(1.0 - self.erasure, f64::from(self.batch));
        } else {
            let a = f64::from(self.t - 1);
            self.term *= self.erasure * a / (a - f64::from(self.batch) + 1.0);
        }
        self.cdf = (self.cdf + self.term).min(1.0);
        Some((self.t, self.cdf))
    }
}

/// `P(X > t) = P(Bin(t, 1-eps) < m)` for the negative-binomial count `X`,
/// summed in log space so it keeps full relative precision deep in the tail.
pub fn neg_binomial_survival(batch: u32, erasure: f64, t: u32) -> f64 {
    if t < batch {
        return 1.0;
    }
    if erasure <= 0.0 {
        return 0.0;
    }
    let ln_eps = libm::log(erasure);
    let ln_ratio = libm::log1p(-erasure) - ln_eps;
    let mut log_term = f64::from(t) * ln_eps;
    let mut total = libm::exp(log_term);
    for j in 0..batch - 1 {
        log_term += libm::log(f64::from(t - j) / f64::from(j + 1)) + ln_ratio;
        total += libm::exp(log_term);
    }
    total.min(1.0)
}

/// `1 - (1 - s)^L`
#[inline]
fn max_survival(survival: f64, receivers: u32) -> f64 {
    if survival <= 0.0 {
        return 0.0;
    }
    -libm::expm1(f64::from(receivers) * libm::log1p(-survival))
}

/// Expected completion time of one batch under network coding.
///
/// Evaluates `m + sum_{t>=m} [1 - F(t)^L]`. `1 - F(t)` is taken from
/// [`neg_binomial_survival`] rather than by subtraction, and the sum stops
/// once a geometric estimate of the remaining tail, `L (1-F(t)) r / (1-r)`
/// with `r` the current survival ratio, drops below `tol`.
pub fn expected_completion_time_nc(batch: u32, receivers: u32, erasure: f64, tol: f64) -> f64 {
    assert!(batch >= 1 && receivers >= 1);
    assert!((0.0..1.0).contains(&erasure) && tol > 0.0);

    let lf = f64::from(receivers);
    let mut total = f64::from(batch);
    let mut prev_survival = 1.0;
    let mut t = batch;
    loop {
        let survival = neg_binomial_survival(batch, erasure, t);
        total += max_survival(survival, receivers);
        if survival <= 0.0 {
            break;
        }
        let ratio = survival / prev_survival;
        if ratio < 1.0 && lf * survival * ratio / (1.0 - ratio) < tol {
            break;
        }
        prev_survival = survival;
        t += 1;
    }
    total
}

/// Expected service time of one packet under ARQ:
/// `1 + sum_{t>=1} [1 - (1 - eps^t)^L]`.
///
/// The tail after `t` is at most `L eps^(t+1) / (1 - eps)`, which is the
/// stopping test.
pub fn expected_completion_time_arq(receivers: u32, erasure: f64, tol: f64) -> f64 {
    assert!(receivers >= 1);
    assert!((0.0..1.0).contains(&erasure) && tol > 0.0);

    let lf = f64::from(receivers);
    let mut total = 1.0;
    let mut eps_t = 1.0;
    loop {
        eps_t *= erasure;
        if eps_t == 0.0 {
            break;
        }
        total += max_survival(eps_t, receivers);
        if lf * eps_t * erasure / (1.0 - erasure) < tol {
            break;
        }
    }
    total
}

/// `P(T > t)` for `t = 0, 1, ...` until it falls below `tol`; the last entry
/// is the first value below `tol`.
pub fn completion_time_survival(batch: u32, receivers: u32, erasure: f64, tol: f64) -> Vec<f64> {
    let mut out = alloc::vec![1.0; batch as usize];
    let mut t = batch;
    loop {
        let s = max_survival(neg_binomial_survival(batch, erasure, t), receivers);
        out.push(s);
        if s < tol {
            break;
        }
        t += 1;
    }
    out
}

/// Backoff suggested by half the expected batch service time, rounded half to even.
pub fn recommended_backoff(batch: u32, receivers: u32, erasure: f64) -> u32 {
    let t = expected_completion_time_nc(batch, receivers, erasure, DEFAULT_TAIL_TOL);
    round_ties_even(t / 2.0) as u32
}
