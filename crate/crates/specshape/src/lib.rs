//! Experiment runner around `specshape-core`: JSON experiment specs, CSV
//! datasets for analysis and simulation sweeps, the analysis-vs-simulation
//! comparison, backoff search and RLNC test vectors.
//!
//! Sweep points run on the rayon pool; results are collected in sweep order,
//! so every output is byte-identical across runs and thread counts.

pub mod analyze;
pub mod compare;
pub mod csvio;
pub mod optimal;
pub mod simulate;
pub mod spec;
pub mod vectors;

use serde::{Deserialize, Serialize};
use specshape_core::{NetworkConfig, PuMode, SuStrategy};

pub use spec::{ExperimentSpec, SpecError, SweepParam};

/// A PU service mode paired with an SU strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Scenario {
    pub mode: PuMode,
    pub strategy: SuStrategy,
}

impl Scenario {
    pub const fn new(mode: PuMode, strategy: SuStrategy) -> Self {
        Self { mode, strategy }
    }

    pub fn apply(self, cfg: &NetworkConfig) -> NetworkConfig {
        cfg.with_mode(self.mode).with_strategy(self.strategy)
    }
}

/// Network coding with random and adaptive sensing, and ARQ with random
/// sensing.
pub const SCENARIOS: [Scenario; 3] = [
    Scenario::new(PuMode::NetworkCoding, SuStrategy::Random),
    Scenario::new(PuMode::NetworkCoding, SuStrategy::AdaptiveTwoStage),
    Scenario::new(PuMode::Arq, SuStrategy::Random),
];

/// Simulation adds single-channel tracking when there is one channel.
pub fn simulated_scenarios(cfg: &NetworkConfig) -> Vec<Scenario> {
    let mut v = SCENARIOS.to_vec();
    if cfg.num_channels == 1 {
        v.push(Scenario::new(PuMode::NetworkCoding, SuStrategy::SingleChannelTracking));
    }
    v
}
