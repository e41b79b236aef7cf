//! Joins an analytical and a simulated dataset over the same sweep.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use specshape_core::analysis::FormulaMode;
use specshape_core::{PuMode, SuStrategy};

use crate::analyze::{AnalyzeRow, RowStatus};
use crate::simulate::SimulateRow;
use crate::spec::SweepParam;

/// Largest relative analysis-vs-simulation difference allowed for
/// `Rederived` rows.
pub const ACCURACY_BAND: f64 = 0.03;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CompareError {
    #[error("mismatched sweep grids: {0}")]
    Grid(String),
    #[error("datasets sweep different parameters ({0} vs {1})")]
    Param(SweepParam, SweepParam),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareRow {
    pub param: SweepParam,
    pub value: f64,
    pub mode: PuMode,
    pub strategy: SuStrategy,
    pub formula_mode: FormulaMode,
    pub k: u32,
    pub seed: u64,
    pub eta_s_analytic: Option<f64>,
    pub eta_s_sim: f64,
    pub stderr_sim: f64,
    /// |analytic - sim| / sim
    pub rel_diff: Option<f64>,
    /// Adaptive over random at the same point, network coding only.
    pub gain_sim: Option<f64>,
    pub gain_analytic: Option<f64>,
    /// False when the analysis or the simulated queue is unstable; such rows
    /// are reported but not held to the bands.
    pub stable: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSummary {
    pub formula_mode: FormulaMode,
    pub mode: PuMode,
    pub strategy: SuStrategy,
    pub rows: usize,
    pub max_rel_diff: f64,
    pub mean_rel_diff: f64,
}

impl fmt::Display for SweepSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {:?}/{:?}: {} rows, max rel diff {:.4}, mean {:.4}",
            self.formula_mode.as_str(),
            self.mode,
            self.strategy,
            self.rows,
            self.max_rel_diff,
            self.mean_rel_diff
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareReport {
    pub rows: Vec<CompareRow>,
    pub summaries: Vec<SweepSummary>,
    /// Every stable `Rederived` row within [`ACCURACY_BAND`].
    pub accuracy_ok: bool,
    /// Adaptive beats random on every stable point with k > 0, and ties it
    /// exactly at k = 0.
    pub gain_ok: bool,
}

impl CompareReport {
    pub fn bands_hold(&self) -> bool {
        self.accuracy_ok && self.gain_ok
    }
}

type Key = (u64, PuMode, SuStrategy);

fn key(value: f64, mode: PuMode, strategy: SuStrategy) -> Key {
    (value.to_bits(), mode, strategy)
}

/// Pure function of the two datasets. Only pooled simulation rows are used;
/// simulation-only strategies are ignored.
pub fn compare(analytic: &[AnalyzeRow], simulated: &[SimulateRow]) -> Result<CompareReport, CompareError> {
    let sims: HashMap<Key, &SimulateRow> = simulated
        .iter()
        .filter(|r| r.is_pooled() && r.strategy != SuStrategy::SingleChannelTracking)
        .map(|r| (key(r.value, r.mode, r.strategy), r))
        .collect();
    if let (Some(a), Some(s)) = (analytic.first(), simulated.first()) {
        if a.param != s.param {
            return Err(CompareError::Param(a.param, s.param));
        }
    }

    let mut modes: Vec<FormulaMode> = Vec::new();
    for r in analytic {
        if !modes.contains(&r.formula_mode) {
            modes.push(r.formula_mode);
        }
    }
    let mut rows = Vec::new();
    for &fm in &modes {
        let mine: HashMap<Key, &AnalyzeRow> = analytic
            .iter()
            .filter(|r| r.formula_mode == fm)
            .map(|r| (key(r.value, r.mode, r.strategy), r))
            .collect();
        // scan rows rather than maps so the reported mismatch is deterministic
        if let Some(r) = analytic
            .iter()
            .find(|r| r.formula_mode == fm && !sims.contains_key(&key(r.value, r.mode, r.strategy)))
        {
            return Err(CompareError::Grid(format!("no simulated row for {} = {}", r.param, r.value)));
        }
        if let Some(r) = simulated
            .iter()
            .filter(|r| r.is_pooled() && r.strategy != SuStrategy::SingleChannelTracking)
            .find(|r| !mine.contains_key(&key(r.value, r.mode, r.strategy)))
        {
            return Err(CompareError::Grid(format!("no {} row for {} = {}", fm.as_str(), r.param, r.value)));
        }
        // analytic rows keep their order
        for a in analytic.iter().filter(|r| r.formula_mode == fm) {
            let s = sims[&key(a.value, a.mode, a.strategy)];
            let stable = a.status == RowStatus::Ok && s.queue_stable;
            let rel_diff = a.eta_s.map(|e| (e - s.eta_s_hat).abs() / s.eta_s_hat.abs());
            let (gain_sim, gain_analytic) = if a.mode == PuMode::NetworkCoding && a.strategy == SuStrategy::AdaptiveTwoStage {
                let rs = sims[&key(a.value, a.mode, SuStrategy::Random)];
                let ra = mine[&key(a.value, a.mode, SuStrategy::Random)];
                (
                    Some(s.eta_s_hat / rs.eta_s_hat - 1.0),
                    a.eta_s.zip(ra.eta_s).map(|(x, y)| x / y - 1.0),
                )
            } else {
                (None, None)
            };
            rows.push(CompareRow {
                param: a.param,
                value: a.value,
                mode: a.mode,
                strategy: a.strategy,
                formula_mode: fm,
                k: a.k,
                seed: s.seed,
                eta_s_analytic: a.eta_s,
                eta_s_sim: s.eta_s_hat,
                stderr_sim: s.stderr_eta_s,
                rel_diff,
                gain_sim,
                gain_analytic,
                stable,
            });
        }
    }

    let mut summaries: Vec<SweepSummary> = Vec::new();
    for r in rows.iter().filter(|r| r.stable) {
        let Some(d) = r.rel_diff else { continue };
        match summaries
            .iter_mut()
            .find(|s| s.formula_mode == r.formula_mode && s.mode == r.mode && s.strategy == r.strategy)
        {
            Some(s) => {
                s.rows += 1;
                s.max_rel_diff = s.max_rel_diff.max(d);
                s.mean_rel_diff += d;
            }
            None => summaries.push(SweepSummary {
                formula_mode: r.formula_mode,
                mode: r.mode,
                strategy: r.strategy,
                rows: 1,
                max_rel_diff: d,
                mean_rel_diff: d,
            }),
        }
    }
    for s in &mut summaries {
        s.mean_rel_diff /= s.rows as f64;
    }

    let accuracy_ok = rows
        .iter()
        .filter(|r| r.stable && r.formula_mode == FormulaMode::Rederived)
        .all(|r| r.rel_diff.is_some_and(|d| d < ACCURACY_BAND));
    let gain_ok = rows.iter().filter(|r| r.stable).all(|r| match r.gain_sim {
        Some(g) if r.k == 0 => g == 0.0,
        Some(g) => g > 0.0,
        None => true,
    });
    Ok(CompareReport {
        rows,
        summaries,
        accuracy_ok,
        gain_ok,
    })
}
