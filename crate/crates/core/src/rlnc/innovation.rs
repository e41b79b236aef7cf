use alloc::vec::Vec;
use rand::Rng;

use super::decoder::Decoder;
use super::encoder::CodedPacket;
use super::field::{GaloisField, Symbol};
use crate::math::{powi, sqrt};

/// Probability that `m` random packets decode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InnovationEstimate {
    pub probability: f64,
    /// Zero when enumerated exactly.
    pub stderr: f64,
    pub exact: bool,
    pub samples: u64,
}

/// `prod_{i=1}^{m} (1 - q^{-i})`, the probability that a uniformly random
/// `m x m` matrix over GF(q) is nonsingular.
pub fn nonsingular_probability(q: u32, m: u32) -> f64 {
    (1..=m).map(|i| 1.0 - powi(1.0 / f64::from(q), i)).product()
}

fn rank_of(field: &GaloisField, rows: &[Vec<Symbol>]) -> usize {
    let m = rows.len();
    let mut dec = Decoder::new(field.clone(), m, 0);
    rows.iter()
        .filter(|r| {
            dec.ingest(&CodedPacket {
                coefficients: (*r).clone(),
                payload: Vec::new(),
            })
            .unwrap()
        })
        .count()
}

/// Exhaustive when `q^(m*m) <= 2^20`, Monte Carlo with `samples` draws
/// otherwise.
pub fn innovation_probability<R: Rng + ?Sized>(
    field: &GaloisField,
    m: usize,
    samples: u64,
    rng: &mut R,
) -> InnovationEstimate {
    assert!(m >= 1 && samples >= 1);
    let bits = u64::from(field.width()) * (m * m) as u64;
    let mask = (field.order() - 1) as Symbol;
    if bits <= 20 {
        let total = 1u64 << bits;
        let w = field.width();
        let mut good = 0u64;
        for code in 0..total {
            let rows: Vec<Vec<Symbol>> = (0..m)
                .map(|i| {
                    (0..m)
                        .map(|j| ((code >> (w as usize * (i * m + j))) as Symbol) & mask)
                        .collect()
                })
                .collect();
            if rank_of(field, &rows) == m {
                good += 1;
            }
        }
        return InnovationEstimate {
            probability: good as f64 / total as f64,
            stderr: 0.0,
            exact: true,
            samples: total,
        };
    }
    let mut good = 0u64;
    for _ in 0..samples {
        let rows: Vec<Vec<Symbol>> = (0..m)
            .map(|_| (0..m).map(|_| rng.random::<Symbol>() & mask).collect())
            .collect();
        if rank_of(field, &rows) == m {
            good += 1;
        }
    }
    let p = good as f64 / samples as f64;
    InnovationEstimate {
        probability: p,
        stderr: sqrt(p * (1.0 - p) / samples as f64),
        exact: false,
        samples,
    }
}
