// Float helpers missing from `core`.

use alloc::vec::Vec;

#[inline]
pub(crate) fn powi(x: f64, n: u32) -> f64 {
    libm::pow(x, f64::from(n))
}

#[inline]
pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

/// Round half to even.
#[inline]
pub(crate) fn round_ties_even(x: f64) -> f64 {
    libm::rint(x)
}

/// Binomial(n, p) probability mass over 0..=n, built multiplicatively.
pub(crate) fn binomial_pmf(n: u32, p: f64) -> Vec<f64> {
    let n_us = n as usize;
    let mut pmf = alloc::vec![0.0; n_us + 1];
    if p <= 0.0 {
        pmf[0] = 1.0;
        return pmf;
    }
    if p >= 1.0 {
        pmf[n_us] = 1.0;
        return pmf;
    }
    // log-space start avoids underflow of (1-p)^n for large n
    let q = 1.0 - p;
    let mut log_term = f64::from(n) * libm::log(q);
    let ratio = libm::log(p) - libm::log(q);
    pmf[0] = libm::exp(log_term);
    for i in 1..=n_us {
        log_term += libm::log(f64::from(n - i as u32 + 1)) - libm::log(i as f64) + ratio;
        pmf[i] = libm::exp(log_term);
    }
    pmf
}
