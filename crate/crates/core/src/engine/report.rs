//! Per-run outcome record.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

/// Why a run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    PredicateSatisfied,
    BudgetExhausted,
}

impl fmt::Display for StopReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StopReason::PredicateSatisfied => "predicate-satisfied",
            StopReason::BudgetExhausted => "budget-exhausted",
        })
    }
}

impl std::str::FromStr for StopReason {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "predicate-satisfied" => Ok(StopReason::PredicateSatisfied),
            "budget-exhausted" => Ok(StopReason::BudgetExhausted),
            other => Err(format!("unknown stop reason `{other}`")),
        }
    }
}

/// One simulation run's outcome. `parallel_time()` is derived from the
/// interaction count so it is `interactions / n` exactly, by construction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialReport {
    pub protocol: String,
    pub n: usize,
    /// Trial index within a sweep; 0 for one-off runs.
    #[serde(default)]
    pub trial: u32,
    pub seed: u64,
    pub interactions: u64,
    pub success: bool,
    pub stop_reason: StopReason,
    /// Protocol-specific extras (event times, final counts, ...).
    #[serde(default)]
    pub final_summary: BTreeMap<String, String>,
}

impl TrialReport {
    pub fn finished(protocol: &str, n: usize, seed: u64, interactions: u64, success: bool) -> Self {
        Self {
            protocol: protocol.to_string(),
            n,
            trial: 0,
            seed,
            interactions,
            success,
            stop_reason: if success {
                StopReason::PredicateSatisfied
            } else {
                StopReason::BudgetExhausted
            },
            final_summary: BTreeMap::new(),
        }
    }

    /// Exact parallel time, `interactions / n`.
    pub fn parallel_time(&self) -> Ratio<u64> {
        Ratio::new(self.interactions, self.n as u64)
    }

    /// Parallel time as a float, for statistics.
    pub fn parallel_time_f64(&self) -> f64 {
        self.interactions as f64 / self.n as f64
    }

    pub fn with_trial(mut self, trial: u32) -> Self {
        self.trial = trial;
        self
    }

    pub fn note(&mut self, key: &str, value: impl fmt::Display) {
        self.final_summary.insert(key.to_string(), value.to_string());
    }
}
