use super::Regime;
use crate::math::powi;

/// Averaged per-channel sensing probabilities in each stage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StageProbabilities {
    /// p_s, a listed channel is sensed in the first stage.
    pub first: f64,
    /// p_b, a backup channel is sensed given the first stage found only busy channels.
    pub backup: f64,
    pub regime: Regime,
}

/// `prod_{x'=0}^{x-1} (1 - 1/(n - x')) / (n - x)`: probability that a given
/// channel is the `(x+1)`-th one drawn from `n` without replacement.
fn drawn_at(n: u32, x: u32) -> f64 {
    let mut p = 1.0;
    for xp in 0..x {
        p *= 1.0 - 1.0 / f64::from(n - xp);
    }
    p / f64::from(n - x)
}

/// The averaged stage probabilities for a list-size distribution `p_n`,
/// `n = 0..=N`.
///
/// First stage: `sum_n p_n sum_{x=0}^{min(B,n)-1} [draw at x] (1-P)^x`.
/// Backup stage: `sum_n (1-P)^n p_n sum_{y} [draw at y of l' = N-n] (1-P)^y`
/// with `n` up to `min(N, B) - 1` and `y` up to `min(l', B-n) - 1`; the two
/// bounds give the `B >= N` and `B < N` variants and coincide at `B = N`.
pub fn stage_sensing_probabilities(
    list_size_dist: &[f64],
    idle: f64,
    channels: u32,
    budget: u32,
) -> StageProbabilities {
    assert_eq!(list_size_dist.len(), channels as usize + 1);
    let q = 1.0 - idle;

    let mut first = 0.0;
    for n in 1..=channels {
        let x0 = budget.min(n) - 1;
        let inner: f64 = (0..=x0).map(|x| drawn_at(n, x) * powi(q, x)).sum();
        first += list_size_dist[n as usize] * inner;
    }

    let mut backup = 0.0;
    for n in 0..channels.min(budget) {
        let l = channels - n;
        let ymax = l.min(budget - n) - 1;
        let inner: f64 = (0..=ymax).map(|y| drawn_at(l, y) * powi(q, y)).sum();
        backup += powi(q, n) * list_size_dist[n as usize] * inner;
    }

    StageProbabilities {
        first,
        backup,
        regime: Regime::of(channels, budget),
    }
}
