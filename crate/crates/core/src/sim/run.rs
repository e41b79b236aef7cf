use alloc::vec::Vec;

use super::pu::{PuChannel, ReceptionModel};
use super::su::{
    su_step_adaptive, su_step_random, su_step_single_channel, SensingScratch, SingleChannelTracker,
    SlotOutcome, SuSensingState,
};
use crate::analysis::{expected_completion_time_arq, expected_completion_time_nc, DEFAULT_TAIL_TOL};
use crate::config::{validate_config, NetworkConfig, PuMode, SuStrategy};
use crate::math::sqrt;
use crate::sampling::{stream, SimRng};
use crate::SimError;

/// Contiguous blocks per replication for batch-means standard errors.
pub const BATCHES_PER_TRIAL: usize = 20;

/// Streams per trial; stream 0 drives the SU, 1..=N the PU channels.
const STREAMS_PER_TRIAL: u64 = 1 << 24;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimParams {
    pub cfg: NetworkConfig,
    /// T_tot, slots per replication including warmup.
    pub horizon: u64,
    /// Leading slots excluded from every estimator.
    pub warmup: u64,
    pub seed: u64,
    pub trials: u32,
    pub reception: ReceptionModel,
}

impl SimParams {
    /// Warmup defaults to 10% of the horizon.
    pub fn new(cfg: NetworkConfig, horizon: u64, seed: u64) -> Self {
        Self {
            cfg,
            horizon,
            warmup: horizon / 10,
            seed,
            trials: 1,
            reception: ReceptionModel::Counting,
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        validate_config(self.cfg)?;
        if self.horizon <= self.warmup {
            return Err(SimError::InvalidParams("horizon must exceed warmup"));
        }
        if self.trials == 0 {
            return Err(SimError::InvalidParams("trials must be at least 1"));
        }
        if (self.horizon - self.warmup) < BATCHES_PER_TRIAL as u64 {
            return Err(SimError::InvalidParams("need at least 20 measured slots"));
        }
        Ok(())
    }

    pub fn measured_slots(&self) -> u64 {
        self.horizon - self.warmup
    }
}

/// Everything observable about one slot, passed to the trace observer.
#[derive(Debug)]
pub struct SlotView<'a> {
    pub slot: u64,
    pub busy: &'a [bool],
    /// Channels sensed by the SU, in order.
    pub sensed: &'a [usize],
    pub outcome: SlotOutcome,
    /// Timers after this slot's update.
    pub timers: &'a [u32],
}

/// Integer SU totals over measured slots.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SuTotals {
    pub slots: u64,
    pub successes: u64,
    /// sum of D_t 1_t
    pub sensing_cost: u64,
    /// sum of (B - D_t) 1_t
    pub tx_minislots: u64,
}

impl SuTotals {
    fn add(&mut self, o: &SlotOutcome) {
        self.slots += 1;
        if o.success {
            self.successes += 1;
            self.sensing_cost += u64::from(o.sensed_count);
            self.tx_minislots += u64::from(o.tx_minislots);
        }
    }

    fn merge(&mut self, o: &SuTotals) {
        self.slots += o.slots;
        self.successes += o.successes;
        self.sensing_cost += o.sensing_cost;
        self.tx_minislots += o.tx_minislots;
    }

    /// sum (B - D) 1 = B sum 1 - sum D 1, in integers.
    pub fn identity_holds(&self, budget: u32) -> bool {
        self.tx_minislots + self.sensing_cost == u64::from(budget) * self.successes
    }
}

/// Sums over one block of measured slots.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct BatchTotals {
    pub su: SuTotals,
    /// (channel, slot) pairs with an idle channel.
    pub idle_pairs: u64,
    /// (channel, slot) pairs with timer 0 when the SU sensed.
    pub listed_pairs: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub trial: u32,
    pub batches: Vec<BatchTotals>,
    pub idle_per_channel: Vec<u64>,
    pub delivered_per_channel: Vec<u64>,
    pub list_size_counts: Vec<u64>,
    pub max_final_queue: u64,
    pub conservation_ok: bool,
    pub state_ok: bool,
    pub non_innovative: u64,
    pub decode_mismatches: u64,
}

/// Queue length above which a channel is reported as diverging:
/// `100 m / max(rho, 0.01)`, `rho = lambda E[T] / m`.
pub fn queue_threshold(cfg: &NetworkConfig) -> f64 {
    let m = cfg.effective_batch_size();
    let t = match cfg.pu_mode {
        PuMode::NetworkCoding => expected_completion_time_nc(m, cfg.num_receivers, cfg.erasure_prob, DEFAULT_TAIL_TOL),
        PuMode::Arq => expected_completion_time_arq(cfg.num_receivers, cfg.erasure_prob, DEFAULT_TAIL_TOL),
    };
    let rho = cfg.arrival_rate * t / f64::from(m);
    100.0 * f64::from(m.max(1)) / rho.max(0.01)
}

enum Strategy {
    Random,
    Adaptive(SuSensingState),
    Single(SingleChannelTracker),
}

/// One replication. `observe` sees every slot, warmup included.
pub fn run_trial(
    params: &SimParams,
    trial: u32,
    mut observe: Option<&mut dyn FnMut(&SlotView<'_>)>,
) -> Result<TrialResult, SimError> {
    params.validate()?;
    let cfg = &params.cfg;
    let n = cfg.num_channels as usize;
    let budget = cfg.minislots_per_slot;
    let base = u64::from(trial) * STREAMS_PER_TRIAL;

    let mut su_rng: SimRng = stream(params.seed, base);
    let mut pu_rngs: Vec<SimRng> = (0..n).map(|j| stream(params.seed, base + 1 + j as u64)).collect();
    let mut channels: Vec<PuChannel> = (0..n)
        .map(|_| PuChannel::new(cfg, params.reception))
        .collect::<Result<_, _>>()?;

    let mut strategy = match cfg.su_strategy {
        SuStrategy::Random => Strategy::Random,
        SuStrategy::AdaptiveTwoStage => Strategy::Adaptive(SuSensingState::new(n, cfg.effective_backoff())),
        SuStrategy::SingleChannelTracking => {
            Strategy::Single(SingleChannelTracker::new(cfg.effective_batch_size()))
        }
    };
    let zero_timers = alloc::vec![0u32; n];
    let mut scratch = SensingScratch::default();
    let mut busy = alloc::vec![false; n];

    let measured = params.measured_slots();
    let mut batches = alloc::vec![BatchTotals::default(); BATCHES_PER_TRIAL];
    let mut idle_per_channel = alloc::vec![0u64; n];
    let mut delivered_at_warmup = alloc::vec![0u64; n];
    let mut list_size_counts = alloc::vec![0u64; n + 1];
    let mut conservation_ok = true;
    let mut state_ok = true;

    for t in 0..params.horizon {
        if t == params.warmup {
            for (d, ch) in delivered_at_warmup.iter_mut().zip(&channels) {
                *d = ch.counters().delivered;
            }
        }
        for ((b, ch), rng) in busy.iter_mut().zip(channels.iter_mut()).zip(pu_rngs.iter_mut()) {
            *b = ch.step(rng);
            conservation_ok &= ch.conserves_packets();
        }

        let list_size = match &strategy {
            Strategy::Adaptive(s) => s.list_size(),
            _ => n,
        };
        let outcome = match &mut strategy {
            Strategy::Random => su_step_random(&busy, budget, &mut su_rng, &mut scratch),
            Strategy::Adaptive(s) => {
                let o = su_step_adaptive(s, &busy, budget, &mut su_rng, &mut scratch);
                state_ok &= s.invariants_hold();
                o
            }
            Strategy::Single(tr) => {
                let o = su_step_single_channel(tr, busy[0], budget);
                scratch.record_single(o.sensed_count == 1);
                o
            }
        };

        if t >= params.warmup {
            let idx = ((t - params.warmup) * BATCHES_PER_TRIAL as u64 / measured) as usize;
            let bt = &mut batches[idx];
            bt.su.add(&outcome);
            for (j, &b) in busy.iter().enumerate() {
                if !b {
                    bt.idle_pairs += 1;
                    idle_per_channel[j] += 1;
                }
            }
            bt.listed_pairs += list_size as u64;
            list_size_counts[list_size] += 1;
        }

        if let Some(obs) = observe.as_deref_mut() {
            let timers = match &strategy {
                Strategy::Adaptive(s) => s.timers(),
                _ => &zero_timers,
            };
            obs(&SlotView {
                slot: t,
                busy: &busy,
                sensed: scratch.sensed(),
                outcome,
                timers,
            });
        }
    }

    Ok(TrialResult {
        trial,
        batches,
        idle_per_channel,
        delivered_per_channel: channels
            .iter()
            .zip(&delivered_at_warmup)
            .map(|(c, &d)| c.counters().delivered - d)
            .collect(),
        list_size_counts,
        max_final_queue: channels.iter().map(|c| c.state().queue_len).max().unwrap_or(0),
        conservation_ok,
        state_ok,
        non_innovative: channels.iter().map(|c| c.counters().non_innovative).sum(),
        decode_mismatches: channels.iter().map(|c| c.counters().decode_mismatches).sum(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
}

impl Estimate {
    /// Mean of per-block ratios `num / den`, weighted by `den`, with the
    /// batch-means standard error.
    fn from_blocks(blocks: &[(f64, f64)]) -> Self {
        let total_num: f64 = blocks.iter().map(|b| b.0).sum();
        let total_den: f64 = blocks.iter().map(|b| b.1).sum();
        let mean = total_num / total_den;
        let k = blocks.len() as f64;
        if blocks.len() < 2 {
            return Self { mean, stderr: 0.0 };
        }
        let avg_den = total_den / k;
        let var: f64 = blocks
            .iter()
            .map(|&(num, den)| {
                let r = (num - mean * den) / avg_den;
                r * r
            })
            .sum::<f64>()
            / (k - 1.0);
        Self {
            mean,
            stderr: sqrt(var / k),
        }
    }

    /// True when `value` lies within `z` standard errors.
    pub fn covers(&self, value: f64, z: f64) -> bool {
        (self.mean - value).abs() <= z * self.stderr
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimReport {
    pub params: SimParams,
    pub su_totals: SuTotals,
    pub pu_idle_prob_hat: Estimate,
    pub pu_idle_per_channel: Vec<f64>,
    /// Packets delivered per slot per channel.
    pub pu_throughput_hat: f64,
    pub su_success_prob_hat: Estimate,
    pub su_sensing_cost_hat: Estimate,
    pub su_throughput_hat: Estimate,
    /// Empirical distribution of N_t.
    pub list_size_hist: Vec<f64>,
    pub pi0_hat: Estimate,
    pub queue_stable: bool,
    pub conservation_ok: bool,
    pub state_invariants_ok: bool,
    pub non_innovative_receptions: u64,
    pub decode_mismatches: u64,
}

impl SimReport {
    /// sum (B - D) 1 / T = B p_r - E[D 1], checked on the integer totals.
    pub fn sample_path_identity_holds(&self) -> bool {
        self.su_totals.identity_holds(self.params.cfg.minislots_per_slot)
    }
}

/// Pools replications into one report. Trials are folded in the order given.
pub fn aggregate(params: &SimParams, trials: &[TrialResult]) -> SimReport {
    let cfg = &params.cfg;
    let n = cfg.num_channels as usize;
    let nf = n as f64;
    let blocks: Vec<&BatchTotals> = trials.iter().flat_map(|t| t.batches.iter()).collect();

    let mut su = SuTotals::default();
    for blk in &blocks {
        su.merge(&blk.su);
    }
    let ratio = |f: &dyn Fn(&BatchTotals) -> f64, per_channel: bool| {
        let v: Vec<(f64, f64)> = blocks
            .iter()
            .map(|blk| (f(blk), blk.su.slots as f64 * if per_channel { nf } else { 1.0 }))
            .collect();
        Estimate::from_blocks(&v)
    };
    let pu_idle = ratio(&|blk| blk.idle_pairs as f64, true);
    let pi0 = ratio(&|blk| blk.listed_pairs as f64, true);
    let p_r = ratio(&|blk| blk.su.successes as f64, false);
    let cost = ratio(&|blk| blk.su.sensing_cost as f64, false);
    let eta = ratio(&|blk| blk.su.tx_minislots as f64, false);

    let slots = su.slots as f64;
    let mut idle_ch = alloc::vec![0u64; n];
    let mut delivered = 0u64;
    let mut hist = alloc::vec![0u64; n + 1];
    for t in trials {
        for j in 0..n {
            idle_ch[j] += t.idle_per_channel[j];
        }
        delivered += t.delivered_per_channel.iter().sum::<u64>();
        for (h, &c) in hist.iter_mut().zip(&t.list_size_counts) {
            *h += c;
        }
    }
    let threshold = queue_threshold(cfg);
    SimReport {
        params: *params,
        su_totals: su,
        pu_idle_prob_hat: pu_idle,
        pu_idle_per_channel: idle_ch.iter().map(|&c| c as f64 / slots).collect(),
        pu_throughput_hat: delivered as f64 / (slots * nf),
        su_success_prob_hat: p_r,
        su_sensing_cost_hat: cost,
        su_throughput_hat: eta,
        list_size_hist: hist.iter().map(|&c| c as f64 / slots).collect(),
        pi0_hat: pi0,
        queue_stable: trials.iter().all(|t| (t.max_final_queue as f64) < threshold),
        conservation_ok: trials.iter().all(|t| t.conservation_ok),
        state_invariants_ok: trials.iter().all(|t| t.state_ok),
        non_innovative_receptions: trials.iter().map(|t| t.non_innovative).sum(),
        decode_mismatches: trials.iter().map(|t| t.decode_mismatches).sum(),
    }
}

/// Runs every replication in sequence and aggregates.
pub fn run_experiment(params: &SimParams) -> Result<SimReport, SimError> {
    params.validate()?;
    let trials = (0..params.trials)
        .map(|t| run_trial(params, t, None))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(aggregate(params, &trials))
}
