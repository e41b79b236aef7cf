//! Grid search over the backoff timer.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use specshape_core::analysis::{
    pu_profile, recommended_backoff, solve_adaptive_fixed_point, solve_mean_field, FormulaMode, OccupancyModel,
    SolverOptions,
};
use specshape_core::{AnalysisError, NetworkConfig, PuMode};

use crate::spec::{ExperimentSpec, SpecError, SweepParam};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimalRow {
    pub param: SweepParam,
    pub value: f64,
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
    #[serde(rename = "P_idle")]
    pub p_idle: f64,
    pub pi0: f64,
    pub delta: f64,
    /// k minimizing delta over the searched grid (ties to the smallest).
    pub best_k: u32,
    /// round(E[T_NC] / 2)
    pub recommended_k: u32,
}

/// delta(k) for `k = 0..=k_max` at one configuration under network coding.
pub fn delta_curve(
    cfg: &NetworkConfig,
    k_max: u32,
    formula_mode: FormulaMode,
) -> Result<Vec<(u32, f64, f64)>, AnalysisError> {
    let cfg = cfg.with_mode(PuMode::NetworkCoding);
    let idle = pu_profile(&cfg)?.idle_prob;
    let model = OccupancyModel::from_config(&cfg);
    let opts = SolverOptions::default();
    (0..=k_max)
        .map(|k| {
            let pi0 = match formula_mode {
                FormulaMode::AsPrinted => {
                    solve_adaptive_fixed_point(idle, cfg.num_channels, cfg.minislots_per_slot, k, opts)?.pi0
                }
                FormulaMode::Rederived => {
                    solve_mean_field(&model, cfg.num_channels, cfg.minislots_per_slot, k, opts)?.pi0
                }
            };
            Ok((k, pi0, (pi0 - idle).abs()))
        })
        .collect()
}

/// One row per sweep value, formula mode and k. Points whose queue is
/// unstable are skipped and reported in the second return value.
pub fn optimal_k(
    spec: &ExperimentSpec,
    modes: &[FormulaMode],
    k_max: u32,
) -> Result<(Vec<OptimalRow>, Vec<String>), SpecError> {
    let tasks: Vec<(f64, NetworkConfig, FormulaMode)> = spec
        .points()?
        .into_iter()
        .flat_map(|(v, c)| modes.iter().map(move |&fm| (v, c, fm)))
        .collect();
    let curves: Vec<_> = tasks
        .par_iter()
        .map(|(_, c, fm)| delta_curve(c, k_max, *fm))
        .collect();
    let param = spec.sweep.parameter;
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for ((value, cfg, fm), curve) in tasks.into_iter().zip(curves) {
        let curve = match curve {
            Ok(c) => c,
            Err(e) => {
                skipped.push(format!("{param} = {value} ({}): {e}", fm.as_str()));
                continue;
            }
        };
        let idle = pu_profile(&cfg.with_mode(PuMode::NetworkCoding)).map_or(f64::NAN, |p| p.idle_prob);
        let mut best = 0;
        for &(k, _, d) in &curve {
            if d < curve[best as usize].2 {
                best = k;
            }
        }
        let recommended = recommended_backoff(cfg.batch_size, cfg.num_receivers, cfg.erasure_prob);
        for (k, pi0, delta) in curve {
            rows.push(OptimalRow {
                param,
                value,
                formula_mode: fm,
                n: cfg.num_channels,
                l: cfg.num_receivers,
                m: cfg.batch_size,
                lambda: cfg.arrival_rate,
                epsilon: cfg.erasure_prob,
                b: cfg.minislots_per_slot,
                k,
                p_idle: idle,
                pi0,
                delta,
                best_k: best,
                recommended_k: recommended,
            });
        }
    }
    Ok((rows, skipped))
}
