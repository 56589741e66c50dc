//! Protocol names, run parameters, and interaction budgets.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use popcon_core::protocols::ClockParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Protocol {
    LeaderElection,
    MatchingClock,
    LeaderClock,
    PeriodicClock,
    LinePipeline,
}

impl Protocol {
    pub const ALL: [Protocol; 5] = [
        Protocol::LeaderElection,
        Protocol::MatchingClock,
        Protocol::LeaderClock,
        Protocol::PeriodicClock,
        Protocol::LinePipeline,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Protocol::LeaderElection => "leader-election",
            Protocol::MatchingClock => "matching-clock",
            Protocol::LeaderClock => "leader-clock",
            Protocol::PeriodicClock => "periodic-clock",
            Protocol::LinePipeline => "line-pipeline",
        }
    }
}

impl std::fmt::Display for Protocol {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("unknown protocol `{0}`; expected one of leader-election, matching-clock, leader-clock, periodic-clock, line-pipeline")]
pub struct ProtocolParseError(pub String);

impl std::str::FromStr for Protocol {
    type Err = ProtocolParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Protocol::ALL
            .iter()
            .copied()
            .find(|p| p.name() == s)
            .ok_or_else(|| ProtocolParseError(s.to_string()))
    }
}

/// Input distribution for sorting runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DistKind {
    ZeroOne,
    Uniform,
    Permutation,
}

impl std::str::FromStr for DistKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "zeroone" => Ok(DistKind::ZeroOne),
            "uniform" => Ok(DistKind::Uniform),
            "permutation" => Ok(DistKind::Permutation),
            other => Err(format!(
                "unknown distribution `{other}`; expected zeroone, uniform, or permutation"
            )),
        }
    }
}

impl std::fmt::Display for DistKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            DistKind::ZeroOne => "zeroone",
            DistKind::Uniform => "uniform",
            DistKind::Permutation => "permutation",
        })
    }
}

/// Tunable run parameters with the library defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Params {
    /// Clock level cap.
    #[serde(rename = "max")]
    pub max_level: u16,
    /// Clock slack constant.
    #[serde(rename = "d")]
    pub d_slack: u16,
    /// Reliability exponent for whp bounds.
    pub eta: f64,
    /// Strand message for replication runs, as a 0/1 string; when absent a
    /// per-trial message is generated from the trial seed.
    pub bits: Option<String>,
    /// Target total number of complete strands (the original counts).
    pub copies: usize,
    /// Budget multiplier over each protocol's theoretical bound.
    #[serde(rename = "budgetFactor", alias = "budget_factor")]
    pub budget_factor: u64,
    /// Hard interaction-budget override; trumps the bound formulas.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budget_override: Option<u64>,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            max_level: 64,
            d_slack: 8,
            eta: 2.0,
            bits: None,
            copies: 2,
            budget_factor: 16,
            budget_override: None,
        }
    }
}

impl Params {
    pub fn clock(&self) -> ClockParams {
        ClockParams {
            max_level: self.max_level,
            d_slack: self.d_slack,
        }
    }

    /// Theoretical interaction bound per protocol. Leader election resolves
    /// duels in `(n-1)^2` expected interactions. Either clock reaches its cap
    /// in about `(max/16) n^2 ln n` with the defaults, so the 16x default
    /// budget factor lands on `max * n^2 ln n`. The pipeline stacks leader
    /// election, the clock, and line formation.
    pub fn bound(&self, protocol: Protocol, n: usize) -> u64 {
        let nf = n as f64;
        let ln = nf.ln();
        let raw = match protocol {
            Protocol::LeaderElection => (nf - 1.0) * (nf - 1.0),
            Protocol::MatchingClock | Protocol::LeaderClock => {
                (self.max_level as f64 / 16.0) * nf * nf * ln
            }
            // three full clock turns per round, with headroom for the
            // leader-meeting waits that end each stage
            Protocol::PeriodicClock => 3.0 * (self.max_level as f64 / 4.0) * nf * nf * ln,
            Protocol::LinePipeline => 32.0 * nf * nf * ln,
        };
        raw.ceil() as u64
    }

    pub fn budget(&self, protocol: Protocol, n: usize) -> u64 {
        self.budget_override
            .unwrap_or_else(|| self.budget_factor.saturating_mul(self.bound(protocol, n)))
    }

    /// Bound for replicating to `copies` total strands of `k` bits:
    /// `2n(n-1)(3k ln 2 + eta ln n)`, doubled per copy generation.
    pub fn replication_bound(&self, n: usize, k: usize) -> u64 {
        let nf = n as f64;
        let generations = (self.copies.max(1) as f64).log2().ceil().max(1.0);
        (2.0 * nf * (nf - 1.0)
            * (3.0 * k as f64 * std::f64::consts::LN_2 + self.eta * nf.ln())
            * generations)
            .ceil() as u64
    }

    pub fn replication_budget(&self, n: usize, k: usize) -> u64 {
        self.budget_override.unwrap_or_else(|| {
            self.budget_factor
                .saturating_mul(self.replication_bound(n, k))
        })
    }

    pub fn sort_budget(&self, n: usize) -> u64 {
        self.budget_factor
            .saturating_mul(popcon_core::bubble_sort::comparison_bound(n, self.eta))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn protocol_names_round_trip() {
        for p in Protocol::ALL {
            assert_eq!(p.name().parse::<Protocol>().unwrap(), p);
        }
        assert!("nope".parse::<Protocol>().is_err());
    }

    #[test]
    fn default_clock_budget_is_max_n2_ln_n() {
        let p = Params::default();
        let n = 256usize;
        let expect = (64.0 * (n * n) as f64 * (n as f64).ln()).ceil() as u64;
        let got = p.budget(Protocol::MatchingClock, n);
        assert!((got as i64 - expect as i64).unsigned_abs() <= 16);
    }

    #[test]
    fn params_deserialize_with_spec_key_names() {
        let p: Params =
            serde_json::from_str(r#"{"max": 32, "d": 4, "eta": 3.0, "budgetFactor": 8}"#).unwrap();
        assert_eq!(p.max_level, 32);
        assert_eq!(p.d_slack, 4);
        assert_eq!(p.eta, 3.0);
        assert_eq!(p.budget_factor, 8);
        assert_eq!(p.copies, 2);
    }
}
