use alloc::vec::Vec;
use core::fmt;

/// One violated bound in a [`NetworkConfig`](crate::NetworkConfig).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Violation {
    pub field: &'static str,
    pub reason: &'static str,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.field, self.reason)
    }
}

/// Every bound a configuration violates, in field order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub violations: Vec<Violation>,
}

impl ConfigError {
    pub fn mentions(&self, field: &str) -> bool {
        self.violations.iter().any(|v| v.field == field)
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl core::error::Error for ConfigError {}

#[derive(Debug, Clone, PartialEq)]
pub enum AnalysisError {
    /// The arrival rate is at or above the maximum stable throughput, so the
    /// queue has no stationary regime and no idle probability exists.
    UnstableRegime {
        arrival_rate: f64,
        max_stable_throughput: f64,
    },
    /// An iterative solver hit its iteration budget before the residual
    /// dropped below tolerance.
    NoConvergence { max_iter: usize, residual: f64 },
    InvalidInput(&'static str),
}

impl fmt::Display for AnalysisError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnalysisError::UnstableRegime {
                arrival_rate,
                max_stable_throughput,
            } => write!(
                f,
                "unstable regime: arrival rate {arrival_rate} >= max stable throughput {max_stable_throughput}"
            ),
            AnalysisError::NoConvergence { max_iter, residual } => write!(
                f,
                "no convergence after {max_iter} iterations (residual {residual:e})"
            ),
            AnalysisError::InvalidInput(what) => write!(f, "invalid input: {what}"),
        }
    }
}

impl core::error::Error for AnalysisError {}

#[derive(Debug, Clone, PartialEq)]
pub enum SimError {
    Config(ConfigError),
    InvalidParams(&'static str),
}

impl fmt::Display for SimError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimError::Config(e) => write!(f, "invalid config: {e}"),
            SimError::InvalidParams(what) => f.write_str(what),
        }
    }
}

impl core::error::Error for SimError {}

impl From<ConfigError> for SimError {
    fn from(e: ConfigError) -> Self {
        SimError::Config(e)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RlncError {
    UnsupportedWidth(u32),
    CoefficientLength { expected: usize, got: usize },
    PayloadLength { expected: usize, got: usize },
    EmptyBatch,
    ElementOutOfRange(u32),
}

impl fmt::Display for RlncError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RlncError::UnsupportedWidth(w) => {
                write!(f, "unsupported field width {w} (expected 1, 4, 8 or 16)")
            }
            RlncError::CoefficientLength { expected, got } => {
                write!(f, "coefficient vector has length {got}, expected {expected}")
            }
            RlncError::PayloadLength { expected, got } => {
                write!(f, "payload has length {got}, expected {expected}")
            }
            RlncError::EmptyBatch => f.write_str("batch must contain at least one packet"),
            RlncError::ElementOutOfRange(x) => write!(f, "element {x:#x} is outside the field"),
        }
    }
}

impl core::error::Error for RlncError {}
