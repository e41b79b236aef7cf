//! One PU subnetwork: a base station queue served in batches (network
//! coding) or packet by packet (ARQ) over an erasure broadcast channel.

use alloc::vec::Vec;
use rand::Rng;

use crate::config::{NetworkConfig, PuMode};
use crate::rlnc::{Decoder, Encoder, GaloisField};
use crate::sampling::{fill_reception, sample_arrival};
use crate::SimError;

/// How receptions count toward completing a batch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReceptionModel {
    /// Every reception counts; a receiver is done after `m` of them.
    #[default]
    Counting,
    /// Real coded packets over GF(q); only innovative receptions count.
    Coded { payload_len: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ServicePhase {
    Idle,
    /// Receptions per receiver toward the current batch (a delivered flag
    /// under ARQ).
    Serving { received: Vec<u32> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PuChannelState {
    /// Packets waiting, not counting the batch in service.
    pub queue_len: u64,
    pub phase: ServicePhase,
    pub busy_this_slot: bool,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PuCounters {
    pub arrived: u64,
    pub delivered: u64,
    pub batches: u64,
    pub busy_slots: u64,
    /// Coded mode only: receptions that did not raise a decoder's rank.
    pub non_innovative: u64,
    /// Coded mode only: completed batches whose decode differed from the source.
    pub decode_mismatches: u64,
}

#[derive(Debug, Clone)]
struct CodedService {
    field: GaloisField,
    payload_len: usize,
    encoder: Option<Encoder>,
    decoders: Vec<Decoder>,
}

#[derive(Debug, Clone)]
pub struct PuChannel {
    state: PuChannelState,
    batch: u32,
    mode: PuMode,
    arrival_rate: f64,
    erasure: f64,
    receivers: usize,
    counters: PuCounters,
    heard: Vec<bool>,
    coded: Option<CodedService>,
}

impl PuChannel {
    pub fn new(cfg: &NetworkConfig, reception: ReceptionModel) -> Result<Self, SimError> {
        let batch = cfg.effective_batch_size();
        let receivers = cfg.num_receivers as usize;
        let coded = match (reception, cfg.pu_mode) {
            (ReceptionModel::Coded { payload_len }, PuMode::NetworkCoding) => {
                let field = GaloisField::with_order(cfg.field_size)
                    .map_err(|_| SimError::InvalidParams("coded reception needs field_size 2, 16, 256 or 65536"))?;
                Some(CodedService {
                    decoders: (0..receivers)
                        .map(|_| Decoder::new(field.clone(), batch as usize, payload_len))
                        .collect(),
                    field,
                    payload_len,
                    encoder: None,
                })
            }
            // an uncoded packet is innovative exactly when not yet held
            _ => None,
        };
        Ok(Self {
            state: PuChannelState {
                queue_len: 0,
                phase: ServicePhase::Idle,
                busy_this_slot: false,
            },
            batch,
            mode: cfg.pu_mode,
            arrival_rate: cfg.arrival_rate,
            erasure: cfg.erasure_prob,
            receivers,
            counters: PuCounters::default(),
            heard: alloc::vec![false; receivers],
            coded,
        })
    }

    pub fn state(&self) -> &PuChannelState {
        &self.state
    }

    pub fn counters(&self) -> &PuCounters {
        &self.counters
    }

    pub fn mode(&self) -> PuMode {
        self.mode
    }

    /// Packets in the batch currently being served.
    pub fn in_service(&self) -> u64 {
        match self.state.phase {
            ServicePhase::Idle => 0,
            ServicePhase::Serving { .. } => u64::from(self.batch),
        }
    }

    /// delivered + queued + in service = arrived
    pub fn conserves_packets(&self) -> bool {
        self.counters.delivered + self.state.queue_len + self.in_service() == self.counters.arrived
    }

    /// Advances one slot: arrival, batch start, transmission. Returns whether
    /// the base station transmitted.
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> bool {
        let arrived = sample_arrival(self.arrival_rate, rng);
        self.state.queue_len += u64::from(arrived);
        self.counters.arrived += u64::from(arrived);

        if self.state.phase == ServicePhase::Idle && self.state.queue_len >= u64::from(self.batch) {
            self.state.queue_len -= u64::from(self.batch);
            self.state.phase = ServicePhase::Serving {
                received: alloc::vec![0; self.receivers],
            };
            if let Some(c) = self.coded.as_mut() {
                c.encoder = Some(Encoder::random_batch(c.field.clone(), self.batch as usize, c.payload_len, rng));
                c.decoders.iter_mut().for_each(Decoder::reset);
            }
        }

        let batch = self.batch;
        let ServicePhase::Serving { received } = &mut self.state.phase else {
            self.state.busy_this_slot = false;
            return false;
        };
        self.state.busy_this_slot = true;
        self.counters.busy_slots += 1;

        fill_reception(self.erasure, &mut self.heard, rng);
        let done = match self.coded.as_mut() {
            None => {
                for (count, &heard) in received.iter_mut().zip(&self.heard) {
                    if heard && *count < batch {
                        *count += 1;
                    }
                }
                received.iter().all(|&c| c == batch)
            }
            Some(c) => {
                let enc = c.encoder.as_ref().expect("encoder set at batch start");
                let pkt = enc.encode(rng);
                for ((dec, count), &heard) in c.decoders.iter_mut().zip(received.iter_mut()).zip(&self.heard) {
                    if heard && !dec.is_complete() {
                        if dec.ingest(&pkt).expect("packet shape matches decoder") {
                            *count += 1;
                        } else {
                            self.counters.non_innovative += 1;
                        }
                    }
                }
                let done = c.decoders.iter().all(Decoder::is_complete);
                if done && c.decoders.iter().any(|d| d.recovered().as_deref() != Some(enc.sources())) {
                    self.counters.decode_mismatches += 1;
                }
                done
            }
        };
        if done {
            self.state.phase = ServicePhase::Idle;
            self.counters.delivered += u64::from(batch);
            self.counters.batches += 1;
        }
        true
    }
}

/// Slots needed until every one of `receivers` receivers has `batch`
/// receptions.
pub fn sample_batch_completion<R: Rng + ?Sized>(batch: u32, receivers: u32, erasure: f64, rng: &mut R) -> u32 {
    let mut counts = alloc::vec![0u32; receivers as usize];
    let mut pending = receivers;
    let mut slots = 0;
    while pending > 0 {
        slots += 1;
        for c in counts.iter_mut() {
            if *c < batch && !rng.random_bool(erasure) {
                *c += 1;
                if *c == batch {
                    pending -= 1;
                }
            }
        }
    }
    slots
}

/// Busy trace and estimators of a single channel.
#[derive(Debug, Clone, PartialEq)]
pub struct PuChannelRun {
    /// Busy flag of every slot, warmup included.
    pub busy: Vec<bool>,
    /// Idle fraction over the measured slots.
    pub idle_fraction: f64,
    /// Packets delivered per measured slot.
    pub throughput: f64,
    pub final_queue: u64,
    pub counters: PuCounters,
}

/// Runs one channel alone for `horizon` slots, estimating over the slots
/// after `warmup`.
pub fn run_pu_channel<R: Rng + ?Sized>(
    cfg: &NetworkConfig,
    reception: ReceptionModel,
    horizon: u64,
    warmup: u64,
    rng: &mut R,
) -> Result<PuChannelRun, SimError> {
    if horizon <= warmup {
        return Err(SimError::InvalidParams("horizon must exceed warmup"));
    }
    let mut ch = PuChannel::new(cfg, reception)?;
    let mut busy = Vec::with_capacity(horizon as usize);
    let mut idle = 0u64;
    let mut delivered_at_warmup = 0;
    for t in 0..horizon {
        if t == warmup {
            delivered_at_warmup = ch.counters().delivered;
        }
        let b = ch.step(rng);
        busy.push(b);
        if t >= warmup && !b {
            idle += 1;
        }
    }
    let measured = (horizon - warmup) as f64;
    Ok(PuChannelRun {
        busy,
        idle_fraction: idle as f64 / measured,
        throughput: (ch.counters().delivered - delivered_at_warmup) as f64 / measured,
        final_queue: ch.state().queue_len,
        counters: *ch.counters(),
    })
}
