//! Scenario parameters shared by the analysis and the simulator.

use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::error::{ConfigError, Violation};

/// How a PU base station serves its queue.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PuMode {
    /// Batches of `batch_size` packets, random linear network coding.
    NetworkCoding,
    /// One uncoded packet at a time, retransmitted until every receiver has it.
    Arq,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SuStrategy {
    Random,
    AdaptiveTwoStage,
    /// Only meaningful with a single PU channel.
    SingleChannelTracking,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkConfig {
    /// N, the number of PU channels (one PU subnetwork each).
    pub num_channels: u32,
    /// L, receivers per PU subnetwork.
    pub num_receivers: u32,
    /// m, the network coding generation size.
    pub batch_size: u32,
    /// λ, expected packet arrivals per slot per channel.
    pub arrival_rate: f64,
    /// ε, per-receiver per-slot erasure probability.
    pub erasure_prob: f64,
    /// B, mini-slots per slot available to the SU.
    pub minislots_per_slot: u32,
    /// q, the RLNC field size.
    pub field_size: u64,
    /// k, the adaptive sensing backoff timer.
    pub backoff: u32,
    pub pu_mode: PuMode,
    pub su_strategy: SuStrategy,
}

impl Default for NetworkConfig {
    fn default() -> Self {
        Self {
            num_channels: 10,
            num_receivers: 20,
            batch_size: 5,
            arrival_rate: 0.4,
            erasure_prob: 0.1,
            minislots_per_slot: 15,
            field_size: 256,
            backoff: 2,
            pu_mode: PuMode::NetworkCoding,
            su_strategy: SuStrategy::AdaptiveTwoStage,
        }
    }
}

impl NetworkConfig {
    /// Batch size seen by the analytical formulas: ARQ is network coding with m = 1.
    pub fn effective_batch_size(&self) -> u32 {
        match self.pu_mode {
            PuMode::NetworkCoding => self.batch_size,
            PuMode::Arq => 1,
        }
    }

    /// Backoff actually applied by the SU. Under ARQ the sensing list is always full.
    pub fn effective_backoff(&self) -> u32 {
        match self.pu_mode {
            PuMode::NetworkCoding => self.backoff,
            PuMode::Arq => 0,
        }
    }

    pub fn with_mode(mut self, mode: PuMode) -> Self {
        self.pu_mode = mode;
        self
    }

    pub fn with_strategy(mut self, strategy: SuStrategy) -> Self {
        self.su_strategy = strategy;
        self
    }
}

/// Returns the configuration unchanged if every bound holds, otherwise every
/// violated bound by field name.
pub fn validate_config(raw: NetworkConfig) -> Result<NetworkConfig, ConfigError> {
    let mut violations = Vec::new();
    let mut check = |ok: bool, field: &'static str, reason: &'static str| {
        if !ok {
            violations.push(Violation { field, reason });
        }
    };

    check(raw.num_channels >= 1, "num_channels", "must be at least 1");
    check(raw.num_receivers >= 1, "num_receivers", "must be at least 1");
    check(raw.batch_size >= 1, "batch_size", "must be at least 1");
    check(
        (0.0..=1.0).contains(&raw.arrival_rate),
        "arrival_rate",
        "out of range",
    );
    check(
        (0.0..1.0).contains(&raw.erasure_prob),
        "erasure_prob",
        "out of range",
    );
    check(
        raw.minislots_per_slot >= 1,
        "minislots_per_slot",
        "must be at least 1",
    );
    check(
        is_prime_power(raw.field_size),
        "field_size",
        "must be a prime power >= 2",
    );
    check(
        raw.su_strategy != SuStrategy::SingleChannelTracking || raw.num_channels == 1,
        "su_strategy",
        "single_channel_tracking requires num_channels = 1",
    );

    if violations.is_empty() {
        Ok(raw)
    } else {
        Err(ConfigError { violations })
    }
}

pub(crate) fn is_prime_power(q: u64) -> bool {
    if q < 2 {
        return false;
    }
    let mut p = 2u64;
    while p.saturating_mul(p) <= q {
        if q % p == 0 {
            let mut rest = q;
            while rest % p == 0 {
                rest /= p;
            }
            return rest == 1;
        }
        p += 1;
    }
    // q itself is prime
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eval_defaults() -> NetworkConfig {
        NetworkConfig {
            num_channels: 10,
            num_receivers: 20,
            batch_size: 8,
            arrival_rate: 0.4,
            erasure_prob: 0.2,
            minislots_per_slot: 15,
            field_size: 256,
            backoff: 4,
            pu_mode: PuMode::NetworkCoding,
            su_strategy: SuStrategy::AdaptiveTwoStage,
        }
    }

    #[test]
    fn accepts_prediction_defaults() {
        let cfg = eval_defaults();
        assert_eq!(validate_config(cfg), Ok(cfg));
    }

    #[test]
    fn single_channel_tracking_needs_one_channel() {
        let one = NetworkConfig {
            num_channels: 1,
            su_strategy: SuStrategy::SingleChannelTracking,
            ..eval_defaults()
        };
        assert!(validate_config(one).is_ok());

        let many = NetworkConfig {
            su_strategy: SuStrategy::SingleChannelTracking,
            ..eval_defaults()
        };
        let err = validate_config(many).unwrap_err();
        assert!(err.mentions("su_strategy"));
    }

    #[test]
    fn rejects_lossless_boundary() {
        let err = validate_config(NetworkConfig {
            erasure_prob: 1.0,
            ..eval_defaults()
        })
        .unwrap_err();
        assert_eq!(err.to_string(), "erasure_prob out of range");
    }

    #[test]
    fn reports_every_violation() {
        let err = validate_config(NetworkConfig {
            num_channels: 0,
            batch_size: 0,
            arrival_rate: 1.5,
            field_size: 12,
            ..eval_defaults()
        })
        .unwrap_err();
        let fields: Vec<_> = err.violations.iter().map(|v| v.field).collect();
        assert_eq!(
            fields,
            ["num_channels", "batch_size", "arrival_rate", "field_size"]
        );
    }

    #[test]
    fn nan_rates_are_rejected() {
        let err = validate_config(NetworkConfig {
            arrival_rate: f64::NAN,
            erasure_prob: f64::NAN,
            ..eval_defaults()
        })
        .unwrap_err();
        assert!(err.mentions("arrival_rate") && err.mentions("erasure_prob"));
    }

    #[test]
    fn prime_powers() {
        let yes = [2, 3, 4, 8, 9, 16, 25, 27, 256, 65536, 65537];
        let no = [0, 1, 6, 10, 12, 18, 100];
        assert!(yes.iter().all(|&q| is_prime_power(q)));
        assert!(no.iter().all(|&q| !is_prime_power(q)));
    }

    #[test]
    fn arq_collapses_batch_and_backoff() {
        let cfg = eval_defaults().with_mode(PuMode::Arq);
        assert_eq!(cfg.effective_batch_size(), 1);
        assert_eq!(cfg.effective_backoff(), 0);
        assert_eq!(eval_defaults().effective_batch_size(), 8);
    }

    #[test]
    fn json_field_names_and_unknown_keys() {
        let cfg = eval_defaults();
        let json = serde_json::to_value(cfg).unwrap();
        let keys: Vec<_> = json.as_object().unwrap().keys().cloned().collect();
        for k in [
            "num_channels",
            "num_receivers",
            "batch_size",
            "arrival_rate",
            "erasure_prob",
            "minislots_per_slot",
            "field_size",
            "backoff",
            "pu_mode",
            "su_strategy",
        ] {
            assert!(keys.iter().any(|x| x == k), "missing {k}");
        }
        assert_eq!(json["pu_mode"], "network_coding");
        assert_eq!(json["su_strategy"], "adaptive_two_stage");

        let mut obj = json.clone();
        obj["bogus"] = serde_json::json!(1);
        assert!(serde_json::from_value::<NetworkConfig>(obj).is_err());
    }

    proptest::proptest! {
        #[test]
        fn validation_is_idempotent(
            n in 0u32..30, l in 0u32..30, m in 0u32..20,
            lam in -0.5f64..1.5, eps in -0.5f64..1.5, b in 0u32..30,
            q in 0u64..300, k in 0u32..20, single in proptest::bool::ANY,
        ) {
            let raw = NetworkConfig {
                num_channels: n, num_receivers: l, batch_size: m,
                arrival_rate: lam, erasure_prob: eps, minislots_per_slot: b,
                field_size: q, backoff: k, pu_mode: PuMode::NetworkCoding,
                su_strategy: if single { SuStrategy::SingleChannelTracking } else { SuStrategy::Random },
            };
            if let Ok(c) = validate_config(raw) {
                proptest::prop_assert_eq!(validate_config(c), Ok(c));
                proptest::prop_assert_eq!(c, raw);
            }
        }
    }
}
