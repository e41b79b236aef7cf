//! Slotted Monte-Carlo simulation of N PU subnetworks and one SU.
//!
//! Within a slot: PU arrivals, batch starts, PU transmissions and
//! receptions, SU sensing against this slot's busy flags, then the SU timer
//! update. SU activity never affects the PUs.

mod pu;
mod run;
mod su;

pub use pu::{
    run_pu_channel, sample_batch_completion, PuChannel, PuChannelRun, PuChannelState, PuCounters,
    ReceptionModel, ServicePhase,
};
pub use run::{
    aggregate, queue_threshold, run_experiment, run_trial, BatchTotals, Estimate, SimParams, SimReport,
    SlotView, SuTotals, TrialResult,
};
pub use su::{
    su_step_adaptive, su_step_random, su_step_single_channel, SensingScratch, SingleChannelTracker,
    SlotOutcome, SuSensingState,
};
