//! Analytical sweep: one row per sweep value, scenario and formula mode.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use specshape_core::analysis::{
    prediction_distance, pu_profile, su_throughput_adaptive, su_throughput_random, FormulaMode, OccupancyModel,
    SolverOptions,
};
use specshape_core::{AnalysisError, NetworkConfig, PuMode, SuStrategy};

use crate::spec::{ExperimentSpec, SpecError, SweepParam};
use crate::{Scenario, SCENARIOS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowStatus {
    Ok,
    /// λ at or above the stable throughput; only `eta_p` is filled in.
    Unstable,
    NoConvergence,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyzeRow {
    pub param: SweepParam,
    pub value: f64,
    pub mode: PuMode,
    pub strategy: SuStrategy,
    pub formula_mode: FormulaMode,
    #[serde(rename = "N")]
    pub n: u32,
    #[serde(rename = "L")]
    pub l: u32,
    pub m: u32,
    pub lambda: f64,
    pub epsilon: f64,
    #[serde(rename = "B")]
    pub b: u32,
    pub k: u32,
    pub q: u64,
    pub seed: u64,
    pub eta_p: Option<f64>,
    #[serde(rename = "P_idle")]
    pub p_idle: Option<f64>,
    pub p_r: Option<f64>,
    #[serde(rename = "E_D1")]
    pub e_d1: Option<f64>,
    pub eta_s: Option<f64>,
    pub pi0: Option<f64>,
    pub delta: Option<f64>,
    pub iterations: Option<usize>,
    pub status: RowStatus,
}

/// Evaluates one scenario. Unstable and non-converging points become
/// flagged rows rather than errors.
pub fn analyze_point(
    param: SweepParam,
    value: f64,
    cfg: &NetworkConfig,
    scenario: Scenario,
    formula_mode: FormulaMode,
    seed: u64,
) -> AnalyzeRow {
    let cfg = scenario.apply(cfg);
    let mut row = AnalyzeRow {
        param,
        value,
        mode: cfg.pu_mode,
        strategy: cfg.su_strategy,
        formula_mode,
        n: cfg.num_channels,
        l: cfg.num_receivers,
        m: cfg.batch_size,
        lambda: cfg.arrival_rate,
        epsilon: cfg.erasure_prob,
        b: cfg.minislots_per_slot,
        k: cfg.backoff,
        q: cfg.field_size,
        seed,
        eta_p: None,
        p_idle: None,
        p_r: None,
        e_d1: None,
        eta_s: None,
        pi0: None,
        delta: None,
        iterations: None,
        status: RowStatus::Ok,
    };
    let profile = match pu_profile(&cfg) {
        Ok(p) => p,
        Err(AnalysisError::UnstableRegime {
            max_stable_throughput,
            ..
        }) => {
            row.eta_p = Some(max_stable_throughput);
            row.status = RowStatus::Unstable;
            return row;
        }
        Err(_) => {
            row.status = RowStatus::NoConvergence;
            return row;
        }
    };
    row.eta_p = Some(profile.max_stable_throughput);
    row.p_idle = Some(profile.idle_prob);
    let (n, b) = (cfg.num_channels, cfg.minislots_per_slot);

    let outcome = match cfg.su_strategy {
        SuStrategy::AdaptiveTwoStage if cfg.effective_backoff() > 0 => su_throughput_adaptive(
            &OccupancyModel::from_config(&cfg),
            n,
            b,
            cfg.effective_backoff(),
            formula_mode,
            SolverOptions::default(),
        )
        .map(|a| (a.report, a.pi0, a.delta, a.iterations)),
        _ => su_throughput_random(profile.idle_prob, n, b, formula_mode)
            .map(|r| (r, 1.0, prediction_distance(1.0, profile.idle_prob), 0)),
    };
    match outcome {
        Ok((report, pi0, delta, iterations)) => {
            row.p_r = Some(report.success_prob);
            row.e_d1 = Some(report.expected_sensing_cost);
            row.eta_s = Some(report.throughput);
            row.pi0 = Some(pi0);
            row.delta = Some(delta);
            row.iterations = Some(iterations);
        }
        Err(AnalysisError::UnstableRegime { .. }) => row.status = RowStatus::Unstable,
        Err(_) => row.status = RowStatus::NoConvergence,
    }
    row
}

/// Rows ordered by sweep value, then scenario, then formula mode.
pub fn analyze(spec: &ExperimentSpec, modes: &[FormulaMode], seed: u64) -> Result<Vec<AnalyzeRow>, SpecError> {
    let points = spec.points()?;
    let tasks: Vec<_> = points
        .iter()
        .flat_map(|&(v, cfg)| {
            SCENARIOS
                .iter()
                .flat_map(move |&s| modes.iter().map(move |&fm| (v, cfg, s, fm)))
        })
        .collect();
    let param = spec.sweep.parameter;
    Ok(tasks
        .par_iter()
        .map(|&(v, cfg, s, fm)| analyze_point(param, v, &cfg, s, fm, seed))
        .collect())
}
