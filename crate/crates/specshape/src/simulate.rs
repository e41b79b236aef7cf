//! Simulation sweep: per-replication rows and a pooled row per sweep value
//! and scenario.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use specshape_core::sim::{aggregate, run_trial, SimParams, SimReport, SlotView, TrialResult};
use specshape_core::{PuMode, SimError, SuStrategy};

use crate::simulated_scenarios;
use crate::spec::{ExperimentSpec, Reception, SpecError, SweepParam};

/// `trial` is the replication index, or `all` for the pooled row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateRow {
    pub param: SweepParam,
    pub value: f64,
    pub trial: String,
    /// Measured slots behind the row.
    pub slots: u64,
    pub mode: PuMode,
    pub strategy: SuStrategy,
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
    pub horizon: u64,
    pub warmup: u64,
    pub reception: Reception,
    pub pu_idle_hat: f64,
    pub stderr_pu_idle: f64,
    pub pu_tput_hat: f64,
    pub p_r_hat: f64,
    pub sense_cost_hat: f64,
    pub eta_s_hat: f64,
    pub pi0_hat: f64,
    pub stderr_eta_s: f64,
    pub queue_stable: bool,
}

pub const POOLED: &str = "all";

impl SimulateRow {
    pub fn is_pooled(&self) -> bool {
        self.trial == POOLED
    }

    fn new(param: SweepParam, value: f64, trial: String, reception: Reception, r: &SimReport) -> Self {
        let c = &r.params.cfg;
        Self {
            param,
            value,
            trial,
            slots: r.su_totals.slots,
            mode: c.pu_mode,
            strategy: c.su_strategy,
            n: c.num_channels,
            l: c.num_receivers,
            m: c.batch_size,
            lambda: c.arrival_rate,
            epsilon: c.erasure_prob,
            b: c.minislots_per_slot,
            k: c.backoff,
            q: c.field_size,
            seed: r.params.seed,
            horizon: r.params.horizon,
            warmup: r.params.warmup,
            reception,
            pu_idle_hat: r.pu_idle_prob_hat.mean,
            stderr_pu_idle: r.pu_idle_prob_hat.stderr,
            pu_tput_hat: r.pu_throughput_hat,
            p_r_hat: r.su_success_prob_hat.mean,
            sense_cost_hat: r.su_sensing_cost_hat.mean,
            eta_s_hat: r.su_throughput_hat.mean,
            pi0_hat: r.pi0_hat.mean,
            stderr_eta_s: r.su_throughput_hat.stderr,
            queue_stable: r.queue_stable,
        }
    }
}

/// Every `(value, params)` the spec simulates, in output order.
pub fn runs(spec: &ExperimentSpec, seed: u64) -> Result<Vec<(f64, SimParams)>, SpecError> {
    let mut sim = spec.sim;
    sim.seed = seed;
    let mut out = Vec::new();
    for (v, cfg) in spec.points()? {
        for s in simulated_scenarios(&cfg) {
            let p = sim.params(s.apply(&cfg));
            p.validate()?;
            out.push((v, p));
        }
    }
    Ok(out)
}

/// Runs every replication of every run on the rayon pool and pools them.
/// Each run's report comes back next to its rows.
pub fn simulate(spec: &ExperimentSpec, seed: u64) -> Result<(Vec<SimulateRow>, Vec<SimReport>), SpecError> {
    let runs = runs(spec, seed)?;
    let tasks: Vec<(usize, u32)> = runs
        .iter()
        .enumerate()
        .flat_map(|(i, (_, p))| (0..p.trials).map(move |t| (i, t)))
        .collect();
    let results: Vec<TrialResult> = tasks
        .par_iter()
        .map(|&(i, t)| run_trial(&runs[i].1, t, None))
        .collect::<Result<_, SimError>>()?;

    let param = spec.sweep.parameter;
    let reception = spec.sim.reception;
    let mut rows = Vec::new();
    let mut reports = Vec::new();
    let mut rest = results.as_slice();
    for (value, p) in &runs {
        let (mine, tail) = rest.split_at(p.trials as usize);
        rest = tail;
        for t in mine {
            let r = aggregate(p, std::slice::from_ref(t));
            rows.push(SimulateRow::new(param, *value, t.trial.to_string(), reception, &r));
        }
        let pooled = aggregate(p, mine);
        if !pooled.sample_path_identity_holds() {
            // integer totals; this can only fail through a bookkeeping bug
            panic!("sample-path identity violated at {param} = {value}");
        }
        rows.push(SimulateRow::new(param, *value, POOLED.into(), reception, &pooled));
        reports.push(pooled);
    }
    Ok((rows, reports))
}

/// Per-slot dump of replication 0 of every run, warmup included:
/// one line per (slot, channel).
pub fn write_trace<W: Write>(spec: &ExperimentSpec, seed: u64, out: W) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for (value, p) in runs(spec, seed)? {
        let mode = p.cfg.pu_mode;
        let strategy = p.cfg.su_strategy;
        let mut failed = None;
        {
        let mut observe = |v: &SlotView<'_>| {
            if failed.is_some() {
                return;
            }
            for (c, &busy) in v.busy.iter().enumerate() {
                let rec = TraceRecord {
                    param: spec.sweep.parameter,
                    value,
                    mode,
                    strategy,
                    slot: v.slot,
                    channel: c,
                    busy,
                    sensed_by_su: v.sensed.contains(&c),
                    su_success: v.outcome.success,
                    d_t: v.outcome.sensed_count,
                };
                if let Err(e) = w.serialize(rec) {
                    failed = Some(e);
                    return;
                }
            }
        };
        run_trial(&p, 0, Some(&mut observe))?;
        }
        if let Some(e) = failed {
            return Err(e.into());
        }
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct TraceRecord {
    param: SweepParam,
    value: f64,
    mode: PuMode,
    strategy: SuStrategy,
    slot: u64,
    channel: usize,
    busy: bool,
    sensed_by_su: bool,
    su_success: bool,
    #[serde(rename = "D_t")]
    d_t: u32,
}
