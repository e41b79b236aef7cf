use serde::{Deserialize, Serialize};

use super::completion::{expected_completion_time_arq, expected_completion_time_nc, DEFAULT_TAIL_TOL};
use crate::config::{NetworkConfig, PuMode};
use crate::AnalysisError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ServiceMode {
    NetworkCoding { batch: u32 },
    Arq,
}

impl ServiceMode {
    pub fn of(cfg: &NetworkConfig) -> Self {
        match cfg.pu_mode {
            PuMode::NetworkCoding => ServiceMode::NetworkCoding {
                batch: cfg.batch_size,
            },
            PuMode::Arq => ServiceMode::Arq,
        }
    }

    /// Packets served per batch.
    pub fn batch(self) -> u32 {
        match self {
            ServiceMode::NetworkCoding { batch } => batch,
            ServiceMode::Arq => 1,
        }
    }
}

/// Stationary occupancy of one PU channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelOccupancyProfile {
    pub mode: ServiceMode,
    /// E[T_NC] for one batch, or E[T_0,ARQ] for one packet.
    pub expected_service_time: f64,
    /// eta_p, packets per slot.
    pub max_stable_throughput: f64,
    pub idle_prob: f64,
}

pub fn pu_profile(cfg: &NetworkConfig) -> Result<ChannelOccupancyProfile, AnalysisError> {
    pu_profile_for(
        ServiceMode::of(cfg),
        cfg.num_receivers,
        cfg.erasure_prob,
        cfg.arrival_rate,
    )
}

/// Service time, stable throughput and, through Little's law, the idle
/// probability `1 - lambda E[T] / m`.
pub fn pu_profile_for(
    mode: ServiceMode,
    receivers: u32,
    erasure: f64,
    arrival_rate: f64,
) -> Result<ChannelOccupancyProfile, AnalysisError> {
    if receivers == 0 || mode.batch() == 0 {
        return Err(AnalysisError::InvalidInput("receivers and batch size must be positive"));
    }
    if !(0.0..1.0).contains(&erasure) {
        return Err(AnalysisError::InvalidInput("erasure probability out of range"));
    }
    if !(0.0..=1.0).contains(&arrival_rate) {
        return Err(AnalysisError::InvalidInput("arrival rate out of range"));
    }
    let t = match mode {
        ServiceMode::NetworkCoding { batch } => {
            expected_completion_time_nc(batch, receivers, erasure, DEFAULT_TAIL_TOL)
        }
        ServiceMode::Arq => expected_completion_time_arq(receivers, erasure, DEFAULT_TAIL_TOL),
    };
    let eta = f64::from(mode.batch()) / t;
    if arrival_rate >= eta {
        return Err(AnalysisError::UnstableRegime {
            arrival_rate,
            max_stable_throughput: eta,
        });
    }
    Ok(ChannelOccupancyProfile {
        mode,
        expected_service_time: t,
        max_stable_throughput: eta,
        idle_prob: 1.0 - arrival_rate / eta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lossless_nc_idle_is_one_minus_lambda() {
        for m in [1, 2, 5, 8] {
            let p = pu_profile_for(ServiceMode::NetworkCoding { batch: m }, 20, 0.0, 0.37).unwrap();
            assert!((p.idle_prob - 0.63).abs() < 1e-15);
            assert_eq!(p.max_stable_throughput, 1.0);
        }
    }

    #[test]
    fn arq_geometric_service() {
        let p = pu_profile_for(ServiceMode::Arq, 1, 0.5, 0.3).unwrap();
        assert!((p.idle_prob - 0.4).abs() < 1e-11);
        match pu_profile_for(ServiceMode::Arq, 1, 0.5, 0.6) {
            Err(AnalysisError::UnstableRegime { max_stable_throughput, .. }) => {
                assert!((max_stable_throughput - 0.5).abs() < 1e-11)
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn boundary_is_unstable() {
        assert!(matches!(
            pu_profile_for(ServiceMode::NetworkCoding { batch: 3 }, 5, 0.0, 1.0),
            Err(AnalysisError::UnstableRegime { .. })
        ));
    }

    #[test]
    fn network_coding_beats_arq() {
        for l in [1, 5, 20] {
            for eps in [0.05, 0.1, 0.2, 0.3] {
                let arq = pu_profile_for(ServiceMode::Arq, l, eps, 0.0).unwrap();
                let lam = 0.8 * arq.max_stable_throughput;
                for m in [2, 4, 8] {
                    let arq = pu_profile_for(ServiceMode::Arq, l, eps, lam).unwrap();
                    let nc = pu_profile_for(ServiceMode::NetworkCoding { batch: m }, l, eps, lam).unwrap();
                    if l == 1 {
                        // single receiver: both equal 1 - eps
                        assert!((nc.max_stable_throughput - arq.max_stable_throughput).abs() < 1e-9);
                    } else {
                        assert!(arq.max_stable_throughput < nc.max_stable_throughput);
                        assert!(arq.idle_prob < nc.idle_prob);
                    }
                }
            }
        }
    }

    #[test]
    fn idle_decreases_in_lambda() {
        let mut prev = 1.1;
        for i in 0..20 {
            let p = pu_profile_for(ServiceMode::NetworkCoding { batch: 8 }, 20, 0.2, f64::from(i) * 0.03)
                .unwrap();
            assert!(p.idle_prob < prev);
            prev = p.idle_prob;
        }
    }
}
