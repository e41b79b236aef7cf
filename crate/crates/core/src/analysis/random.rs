use super::{check_prob, FormulaMode, Regime, SuThroughputReport};
use crate::math::powi;
use crate::AnalysisError;

/// `sum_{d=1}^{s} d P (1-P)^(d-1)`: expected sensing cost of a scan of `s`
/// i.i.d. channels that stops at the first idle one, counted only when one is
/// found.
pub fn first_idle_cost(idle: f64, s: u32) -> f64 {
    let q = 1.0 - idle;
    let mut surv = 1.0;
    let mut total = 0.0;
    for d in 1..=s {
        total += f64::from(d) * idle * surv;
        surv *= q;
    }
    total
}

/// The as-printed closed form `(1 - q^s (1 + s P)) / P`, with its `P -> 0`
/// limit of 0.
pub(crate) fn printed_sensing_cost(idle: f64, s: u32) -> f64 {
    if idle < 1e-9 {
        return first_idle_cost(idle, s);
    }
    let q = 1.0 - idle;
    (1.0 - powi(q, s) * (1.0 + f64::from(s) * idle)) / idle
}

/// SU throughput when every slot scans channels in a fresh uniform order.
pub fn su_throughput_random(
    idle: f64,
    channels: u32,
    budget: u32,
    mode: FormulaMode,
) -> Result<SuThroughputReport, AnalysisError> {
    check_prob(idle, "idle probability out of range")?;
    if channels == 0 || budget == 0 {
        return Err(AnalysisError::InvalidInput("channels and budget must be positive"));
    }
    let s = channels.min(budget);
    let b = f64::from(budget);
    let p_r = 1.0 - powi(1.0 - idle, s);
    let (cost, eta) = match mode {
        FormulaMode::Rederived => {
            let cost = first_idle_cost(idle, s);
            (cost, b * p_r - cost)
        }
        FormulaMode::AsPrinted => {
            let e = printed_sensing_cost(idle, s);
            // eta = (B - E) p_r, so the implied cost is E p_r
            (e * p_r, (b - e) * p_r)
        }
    };
    Ok(SuThroughputReport {
        success_prob: p_r,
        expected_sensing_cost: cost,
        throughput: eta,
        regime: Regime::of(channels, budget),
        formula_mode: mode,
    })
}

/// Both readings side by side, `(as_printed, rederived)`.
pub fn su_throughput_random_both(
    idle: f64,
    channels: u32,
    budget: u32,
) -> Result<(SuThroughputReport, SuThroughputReport), AnalysisError> {
    Ok((
        su_throughput_random(idle, channels, budget, FormulaMode::AsPrinted)?,
        su_throughput_random(idle, channels, budget, FormulaMode::Rederived)?,
    ))
}
