//! Analytical model: PU service times and idle probabilities, SU throughput
//! under random and adaptive sensing, the backoff timer chain and its fixed
//! point.
//!
//! Two readings of the SU throughput formulas coexist, selected by
//! [`FormulaMode`]. `AsPrinted` evaluates the reference closed forms as
//! written. `Rederived` evaluates `eta_s = B p_r - E[D 1]` from the joint
//! first-idle-position distribution; for adaptive sensing it also accounts
//! for the temporal correlation of PU occupancy (see [`mean_field`]).

use serde::{Deserialize, Serialize};

mod adaptive;
mod completion;
mod fixed_point;
pub mod mean_field;
pub mod occupancy;
pub mod oracle;
mod profile;
mod random;
mod sensing;
mod timer;

pub use adaptive::{su_throughput_adaptive, AdaptiveOutcome};
pub use completion::{
    completion_time_survival, expected_completion_time_arq, expected_completion_time_nc,
    neg_binomial_survival, recommended_backoff, NegBinomialCdf, DEFAULT_TAIL_TOL,
};
pub use fixed_point::{
    optimal_backoff, fixed_point_map, prediction_distance, solve_adaptive_fixed_point,
    AdaptiveFixedPoint, OptimalBackoff,
};
pub use mean_field::{solve_mean_field, MeanFieldSolution};
pub use occupancy::{OccupancyChain, OccupancyModel};
pub use profile::{pu_profile, pu_profile_for, ChannelOccupancyProfile, ServiceMode};
pub use random::{first_idle_cost, su_throughput_random, su_throughput_random_both};
pub use sensing::{stage_sensing_probabilities, StageProbabilities};
pub use timer::{pi0_closed_form, timer_stationary_distribution, timer_transition_matrix, TimerStationary};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FormulaMode {
    AsPrinted,
    Rederived,
}

impl FormulaMode {
    pub fn as_str(self) -> &'static str {
        match self {
            FormulaMode::AsPrinted => "as_printed",
            FormulaMode::Rederived => "rederived",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// B >= N: a slot can hold a full scan of every channel.
    BudgetCoversAll,
    /// B < N: at most B channels are sensed.
    BudgetLimited,
}

impl Regime {
    pub fn of(channels: u32, budget: u32) -> Self {
        if budget >= channels {
            Regime::BudgetCoversAll
        } else {
            Regime::BudgetLimited
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuThroughputReport {
    /// p_r, probability the SU finds an idle channel in a slot.
    pub success_prob: f64,
    /// E[D 1], mini-slots spent sensing in successful slots, per slot.
    pub expected_sensing_cost: f64,
    /// eta_s, transmission mini-slots per slot.
    pub throughput: f64,
    pub regime: Regime,
    pub formula_mode: FormulaMode,
}

/// Knobs for the iterative solvers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Weight of the new iterate in `x <- (1 - a) x + a T(x)`.
    pub damping: f64,
    /// Initial guess for scalar iterations.
    pub start: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 10_000,
            damping: 0.5,
            start: 0.5,
        }
    }
}

pub(crate) fn check_prob(p: f64, what: &'static str) -> Result<(), crate::AnalysisError> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(crate::AnalysisError::InvalidInput(what))
    }
}
