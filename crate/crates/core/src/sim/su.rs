//! SU sensing strategies for one slot of `B` mini-slots.

use alloc::vec::Vec;
use rand::seq::SliceRandom;
use rand::Rng;

/// What the SU did in one slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SlotOutcome {
    /// D_t, mini-slots spent sensing.
    pub sensed_count: u32,
    /// 1_t, an idle channel was found and used.
    pub success: bool,
    /// (B - D_t) 1_t
    pub tx_minislots: u32,
}

impl SlotOutcome {
    fn finish(sensed: u32, success: bool, budget: u32) -> Self {
        Self {
            sensed_count: sensed,
            success,
            tx_minislots: if success { budget - sensed } else { 0 },
        }
    }
}

/// Reusable buffers; after a step, [`SensingScratch::sensed`] lists the
/// channels sensed in order.
#[derive(Debug, Clone, Default)]
pub struct SensingScratch {
    order: Vec<usize>,
    backup: Vec<usize>,
    sensed: Vec<usize>,
    set_busy: Vec<usize>,
}

impl SensingScratch {
    pub fn sensed(&self) -> &[usize] {
        &self.sensed
    }

    pub(super) fn record_single(&mut self, sensed: bool) {
        self.sensed.clear();
        if sensed {
            self.sensed.push(0);
        }
    }
}

/// Uniform scan without replacement over all channels, at most `min(N, B)`.
pub fn su_step_random<R: Rng + ?Sized>(
    busy: &[bool],
    budget: u32,
    rng: &mut R,
    scratch: &mut SensingScratch,
) -> SlotOutcome {
    scratch.sensed.clear();
    scratch.order.clear();
    scratch.order.extend(0..busy.len());
    scratch.order.shuffle(rng);
    let mut sensed = 0;
    for &c in &scratch.order {
        if sensed >= budget {
            break;
        }
        sensed += 1;
        scratch.sensed.push(c);
        if !busy[c] {
            return SlotOutcome::finish(sensed, true, budget);
        }
    }
    SlotOutcome::finish(sensed, false, budget)
}

/// Per-channel backoff timers; timer 0 means listed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuSensingState {
    timers: Vec<u32>,
    backoff: u32,
}

impl SuSensingState {
    pub fn new(channels: usize, backoff: u32) -> Self {
        Self {
            timers: alloc::vec![0; channels],
            backoff,
        }
    }

    pub fn timers(&self) -> &[u32] {
        &self.timers
    }

    pub fn backoff(&self) -> u32 {
        self.backoff
    }

    /// N_t
    pub fn list_size(&self) -> usize {
        self.timers.iter().filter(|&&t| t == 0).count()
    }

    pub fn sensing_list(&self) -> Vec<usize> {
        (0..self.timers.len()).filter(|&j| self.timers[j] == 0).collect()
    }

    pub fn backup_list(&self) -> Vec<usize> {
        (0..self.timers.len()).filter(|&j| self.timers[j] != 0).collect()
    }

    /// Timers within `0..=k`, and the two lists partition the channels.
    pub fn invariants_hold(&self) -> bool {
        self.timers.iter().all(|&t| t <= self.backoff)
            && self.sensing_list().len() + self.backup_list().len() == self.timers.len()
    }
}

/// Two-stage sensing: the listed channels first, then (only if all of them
/// were busy) the backed-off ones. Busy listed channels get timer `k`; an
/// idle backup channel rejoins the list; every other nonzero timer counts
/// down at the slot boundary.
pub fn su_step_adaptive<R: Rng + ?Sized>(
    state: &mut SuSensingState,
    busy: &[bool],
    budget: u32,
    rng: &mut R,
    scratch: &mut SensingScratch,
) -> SlotOutcome {
    debug_assert_eq!(busy.len(), state.timers.len());
    scratch.sensed.clear();
    scratch.set_busy.clear();
    scratch.order.clear();
    scratch.backup.clear();
    for (j, &t) in state.timers.iter().enumerate() {
        if t == 0 {
            scratch.order.push(j);
        } else {
            scratch.backup.push(j);
        }
    }

    let mut sensed = 0;
    let mut found = None;
    let mut from_backup = false;
    scratch.order.shuffle(rng);
    for &c in &scratch.order {
        if sensed >= budget {
            break;
        }
        sensed += 1;
        scratch.sensed.push(c);
        if busy[c] {
            scratch.set_busy.push(c);
        } else {
            found = Some(c);
            break;
        }
    }
    if found.is_none() && sensed < budget && !scratch.backup.is_empty() {
        scratch.backup.shuffle(rng);
        for &c in &scratch.backup {
            if sensed >= budget {
                break;
            }
            sensed += 1;
            scratch.sensed.push(c);
            if !busy[c] {
                found = Some(c);
                from_backup = true;
                break;
            }
        }
    }

    // slot boundary
    for t in state.timers.iter_mut() {
        *t = t.saturating_sub(1);
    }
    for &c in &scratch.set_busy {
        state.timers[c] = state.backoff;
    }
    if let (Some(c), true) = (found, from_backup) {
        state.timers[c] = 0;
    }
    SlotOutcome::finish(sensed, found.is_some(), budget)
}

/// Single-channel strategy: after seeing the channel busy, skip it for `m`
/// slots, then sense it every slot again.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SingleChannelTracker {
    pub counter: u32,
    pub backoff: u32,
}

impl SingleChannelTracker {
    pub fn new(backoff: u32) -> Self {
        Self { counter: 0, backoff }
    }
}

pub fn su_step_single_channel(tracker: &mut SingleChannelTracker, busy: bool, budget: u32) -> SlotOutcome {
    if tracker.counter > 0 {
        tracker.counter -= 1;
        return SlotOutcome::finish(0, false, budget);
    }
    if busy {
        tracker.counter = tracker.backoff;
        SlotOutcome::finish(1, false, budget)
    } else {
        SlotOutcome::finish(1, true, budget)
    }
}
