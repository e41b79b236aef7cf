//! Exact stationary analysis of the full N-channel timer chain for small N
//! and k, with channels idle i.i.d. with probability `P` in every slot.
//!
//! The state is the vector of all N timers; each slot the SU's random scan
//! orders are enumerated exhaustively. Used to measure the error of the
//! averaged single-channel chain.

use alloc::vec::Vec;

use crate::AnalysisError;

pub const MAX_CHANNELS: u32 = 3;
pub const MAX_BACKOFF: u32 = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct JointChainSolution {
    /// Timer vectors, in the order of `stationary`.
    pub states: Vec<Vec<u32>>,
    pub stationary: Vec<f64>,
    /// Fraction of channels with timer 0.
    pub pi0: f64,
    /// Stationary probability that the SU finds an idle channel.
    pub success_prob: f64,
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.is_empty() {
        return alloc::vec![Vec::new()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}

pub fn exact_joint_chain(idle: f64, channels: u32, budget: u32, k: u32) -> Result<JointChainSolution, AnalysisError> {
    if channels == 0 || channels > MAX_CHANNELS || k > MAX_BACKOFF || budget == 0 {
        return Err(AnalysisError::InvalidInput("joint chain supports 1 <= N <= 3, k <= 3"));
    }
    super::check_prob(idle, "idle probability out of range")?;
    let n = channels as usize;
    let base = k as usize + 1;
    let count = base.pow(channels);
    let decode = |mut code: usize| -> Vec<u32> {
        let mut t = alloc::vec![0; n];
        for slot in t.iter_mut() {
            *slot = (code % base) as u32;
            code /= base;
        }
        t
    };
    let encode = |t: &[u32]| -> usize { t.iter().rev().fold(0, |acc, &x| acc * base + x as usize) };

    let mut m = alloc::vec![alloc::vec![0.0; count]; count];
    let mut success = alloc::vec![0.0; count];
    for code in 0..count {
        let timers = decode(code);
        let listed: Vec<usize> = (0..n).filter(|&j| timers[j] == 0).collect();
        let backed: Vec<usize> = (0..n).filter(|&j| timers[j] != 0).collect();
        let p1 = permutations(&listed);
        let p2 = permutations(&backed);
        let order_weight = 1.0 / (p1.len() * p2.len()) as f64;
        for pattern in 0u32..(1 << n) {
            let busy = |j: usize| pattern >> j & 1 == 1;
            let mut w = 1.0;
            for j in 0..n {
                w *= if busy(j) { 1.0 - idle } else { idle };
            }
            if w == 0.0 {
                continue;
            }
            for o1 in &p1 {
                for o2 in &p2 {
                    let mut sensed = 0;
                    let mut found = false;
                    let mut next = timers.clone();
                    let mut touched = alloc::vec![false; n];
                    for &c in o1 {
                        if sensed >= budget {
                            break;
                        }
                        sensed += 1;
                        if busy(c) {
                            next[c] = k;
                            touched[c] = true;
                        } else {
                            found = true;
                            break;
                        }
                    }
                    if !found {
                        for &c in o2 {
                            if sensed >= budget {
                                break;
                            }
                            sensed += 1;
                            if !busy(c) {
                                found = true;
                                next[c] = 0;
                                touched[c] = true;
                                break;
                            }
                        }
                    }
                    for j in 0..n {
                        if !touched[j] && next[j] > 0 {
                            next[j] -= 1;
                        }
                    }
                    let p = w * order_weight;
                    m[code][encode(&next)] += p;
                    if found {
                        success[code] += p;
                    }
                }
            }
        }
    }

    let stationary = solve_stationary(&m)?;
    let pi0 = (0..count)
        .map(|c| {
            let t = decode(c);
            stationary[c] * t.iter().filter(|&&x| x == 0).count() as f64 / n as f64
        })
        .sum();
    let success_prob = stationary.iter().zip(&success).map(|(a, b)| a * b).sum();
    Ok(JointChainSolution {
        states: (0..count).map(decode).collect(),
        stationary,
        pi0,
        success_prob,
    })
}

/// Solves `pi (P - I) = 0`, `sum pi = 1` by Gaussian elimination with partial
/// pivoting, the last balance equation replaced by normalization.
fn solve_stationary(p: &[Vec<f64>]) -> Result<Vec<f64>, AnalysisError> {
    let n = p.len();
    // a x = rhs with a[i][j] = P[j][i] - delta_ij
    let mut a: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| p[j][i] - if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let mut rhs = alloc::vec![0.0; n];
    a[n - 1] = alloc::vec![1.0; n];
    rhs[n - 1] = 1.0;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))
            .unwrap();
        if a[pivot][col].abs() < 1e-14 {
            return Err(AnalysisError::InvalidInput("joint chain has no unique stationary law"));
        }
        a.swap(col, pivot);
        rhs.swap(col, pivot);
        for row in 0..n {
            if row != col {
                let f = a[row][col] / a[col][col];
                if f != 0.0 {
                    for c in col..n {
                        a[row][c] -= f * a[col][c];
                    }
                    rhs[row] -= f * rhs[col];
                }
            }
        }
    }
    Ok((0..n).map(|i| rhs[i] / a[i][i]).collect())
}
