//! Verification checks exposed through `popcon verify`.

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use popcon_core::bubble_sort::{potential, ZeroOneConfig};
use popcon_core::engine::{
    apply_interaction, trial_seed, Configuration, PairSampler, SchedulerRng, TransitionDelta,
};
use popcon_core::protocols::{ClockParams, MatchingClockDelta, MatchingClockState};

use crate::params::{Params, Protocol};
use crate::runner::run_le_matching;
use crate::stats::{scaling_table, Normalizer, ScalingTable, StatsError};
use crate::sweep::{run_sweep, SweepError, SweepSpec};

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("the matched-agents check needs even n >= 64, got {0}")]
    BadPopulation(usize),
    #[error("the check needs at least one trial")]
    ZeroTrials,
    #[error("exhaustive potential checks support 2 <= max_n <= 16, got {0}")]
    BadMaxN(usize),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error(transparent)]
    Sweep(#[from] SweepError),
}

/// Outcome of the matched-agents-by-parallel-time-0.51 check.
#[derive(Debug, Clone, Serialize)]
pub struct Lemma2Report {
    pub n: usize,
    pub trials: u32,
    /// Interactions run per trial: ceil(0.51 n).
    pub interactions: u64,
    /// Required matched agents: n / 2.
    pub threshold: usize,
    /// Matched-agent count per trial.
    pub per_trial_matched: Vec<usize>,
    /// True when every trial met the threshold.
    pub pass: bool,
}

/// Runs the matching clock for exactly `ceil(0.51 n)` interactions per
/// trial and counts agents with an incident matching edge; passes if every
/// trial has at least n/2 of them.
pub fn verify_lemma2(n: usize, trials: u32, master_seed: u64) -> Result<Lemma2Report, VerifyError> {
    let delta = MatchingClockDelta::new(ClockParams::default());
    verify_lemma2_with(n, trials, master_seed, &delta)
}

/// Same check with an injectable delta; the test suite uses this with a
/// never-matching delta as a negative control.
pub fn verify_lemma2_with<D>(
    n: usize,
    trials: u32,
    master_seed: u64,
    delta: &D,
) -> Result<Lemma2Report, VerifyError>
where
    D: TransitionDelta<State = MatchingClockState> + Sync,
{
    if n < 64 || n % 2 != 0 {
        return Err(VerifyError::BadPopulation(n));
    }
    if trials == 0 {
        return Err(VerifyError::ZeroTrials);
    }
    let interactions = (0.51 * n as f64).ceil() as u64;
    let sampler = PairSampler::new(n);
    let mut per_trial_matched = Vec::with_capacity(trials as usize);
    for t in 0..trials {
        let mut config = Configuration::init(n, |_| MatchingClockState::Start).unwrap();
        let mut rng = SchedulerRng::new(trial_seed(master_seed, n as u64, t as u64));
        for _ in 0..interactions {
            let pair = sampler.draw(&mut rng);
            apply_interaction(&mut config, pair, delta);
        }
        let matched = (0..n as u32)
            .filter(|&id| config.edges().degree(id) > 0)
            .count();
        per_trial_matched.push(matched);
    }
    let threshold = n / 2;
    let pass = per_trial_matched.iter().all(|&m| m >= threshold);
    Ok(Lemma2Report {
        n,
        trials,
        interactions,
        threshold,
        per_trial_matched,
        pass,
    })
}

/// Outcome of the exhaustive expected-potential contraction check.
#[derive(Debug, Clone, Serialize)]
pub struct ContractionReport {
    pub max_n: usize,
    pub configs_checked: u64,
    /// Largest EP(C') / ((1 - 1/(4(n-1))) P(C)) seen over unsorted configs;
    /// the lemma holds iff this never exceeds 1.
    pub worst_ratio: f64,
    pub pass: bool,
}

/// Exhaustively checks, in exact integer arithmetic, that one random
/// comparison contracts the expected potential by 1 - 1/(4(n-1)) for every
/// 0/1 configuration of every length up to `max_n`.
pub fn verify_potential_contraction(max_n: usize) -> Result<ContractionReport, VerifyError> {
    if !(2..=16).contains(&max_n) {
        return Err(VerifyError::BadMaxN(max_n));
    }
    let mut checked = 0u64;
    let mut worst = 0f64;
    let mut pass = true;
    for n in 2..=max_n {
        for mask in 0..(1u32 << n) {
            let c = ZeroOneConfig::from_mask(n, mask);
            let p = potential(&c);
            checked += 1;
            if p.is_zero() {
                // sorted configurations are degenerate (0 <= 0) and excluded
                // from the tightest-ratio statistic
                continue;
            }
            let mut sum = BigUint::zero();
            for j in 0..n - 1 {
                sum += potential(&c.step(j));
            }
            // EP <= (1 - 1/(4(n-1))) P  <=>  4 sum <= (4n-5) P, exactly
            let lhs = sum * 4u32;
            let rhs = p * (4 * n as u32 - 5);
            if lhs > rhs {
                pass = false;
            }
            let ratio = lhs.to_f64().unwrap_or(f64::INFINITY) / rhs.to_f64().unwrap_or(f64::MAX);
            worst = worst.max(ratio);
        }
    }
    Ok(ContractionReport {
        max_n,
        configs_checked: checked,
        worst_ratio: worst,
        pass,
    })
}

/// Scaling verdict for one protocol over an n-grid.
#[derive(Debug, Clone, Serialize)]
pub struct ScalingVerdict {
    pub protocol: String,
    pub table: ScalingTable,
    pub flatness_threshold: f64,
    pub pass: bool,
}

/// Sweeps the protocol over the grid and checks the grid flatness of mean
/// parallel time under the protocol's natural normalizer.
pub fn verify_scaling(
    protocol: Protocol,
    n_values: &[usize],
    trials: u32,
    master_seed: u64,
    params: &Params,
) -> Result<ScalingVerdict, VerifyError> {
    let (normalizer, threshold) = match protocol {
        Protocol::LeaderElection => (Normalizer::PopulationN, 1.6),
        Protocol::MatchingClock | Protocol::LeaderClock => (Normalizer::NLnN, 2.0),
        Protocol::PeriodicClock | Protocol::LinePipeline => (Normalizer::NLnN, 2.0),
    };
    let spec = SweepSpec {
        protocol: protocol.name().to_string(),
        n_values: n_values.to_vec(),
        trials,
        master_seed,
        params: params.clone(),
    };
    let reports = run_sweep(&spec)?;
    let all_ok = reports.iter().all(|r| r.success);
    let table = scaling_table(&reports, normalizer, None)?;
    let pass = all_ok && table.flatness <= threshold;
    Ok(ScalingVerdict {
        protocol: protocol.name().to_string(),
        table,
        flatness_threshold: threshold,
        pass,
    })
}

/// One attempt of the clock-before-leader calibration.
#[derive(Debug, Clone, Serialize)]
pub struct CalibrationAttempt {
    pub max_level: u16,
    pub runs: usize,
    pub ordering_violations: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct CalibrationReport {
    pub attempts: Vec<CalibrationAttempt>,
    /// Smallest tried cap for which election finished before the clock in
    /// every run.
    pub calibrated_max_level: Option<u16>,
}

/// Checks that slow leader election completes before any agent caps the
/// matching clock, across the grid; on violations, doubles the cap and
/// retries. Returns the passing cap.
pub fn calibrate_max_level(
    n_values: &[usize],
    trials: u32,
    master_seed: u64,
    params: &Params,
) -> CalibrationReport {
    let mut attempts = Vec::new();
    let mut max_level = params.max_level;
    for _ in 0..4 {
        let mut p = params.clone();
        p.max_level = max_level;
        let mut violations = 0usize;
        let mut runs = 0usize;
        for &n in n_values {
            for t in 0..trials {
                let seed = trial_seed(master_seed, n as u64, t as u64);
                let report = run_le_matching(n, seed, &p);
                runs += 1;
                if report.final_summary.get("ordering_ok").map(String::as_str) != Some("true") {
                    violations += 1;
                }
            }
        }
        attempts.push(CalibrationAttempt {
            max_level,
            runs,
            ordering_violations: violations,
        });
        if violations == 0 {
            return CalibrationReport {
                attempts,
                calibrated_max_level: Some(max_level),
            };
        }
        max_level = max_level.saturating_mul(2);
    }
    CalibrationReport {
        attempts,
        calibrated_max_level: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lemma2_guards_preconditions() {
        assert!(matches!(
            verify_lemma2(4, 5, 1),
            Err(VerifyError::BadPopulation(4))
        ));
        assert!(matches!(
            verify_lemma2(63, 5, 1),
            Err(VerifyError::BadPopulation(63))
        ));
        assert!(matches!(verify_lemma2(64, 0, 1), Err(VerifyError::ZeroTrials)));
    }

    #[test]
    fn lemma2_negative_control_fails_with_counts() {
        struct Inert;
        impl TransitionDelta for Inert {
            type State = MatchingClockState;
            fn apply(
                &self,
                a: MatchingClockState,
                b: MatchingClockState,
                e: bool,
            ) -> (MatchingClockState, MatchingClockState, bool) {
                (a, b, e)
            }
        }
        let r = verify_lemma2_with(64, 5, 1, &Inert).unwrap();
        assert!(!r.pass);
        assert_eq!(r.per_trial_matched, vec![0; 5]);
    }

    #[test]
    fn contraction_small_exhaustive_passes() {
        let r = verify_potential_contraction(3).unwrap();
        assert!(r.pass);
        assert_eq!(r.configs_checked, 4 + 8);
        assert!(r.worst_ratio <= 1.0);
        assert!(verify_potential_contraction(1).is_err());
        assert!(verify_potential_contraction(17).is_err());
    }

    #[test]
    fn calibration_passes_at_the_default_cap_on_a_small_grid() {
        let r = calibrate_max_level(&[96, 128], 3, 7, &Params::default());
        assert_eq!(r.calibrated_max_level, Some(64));
        assert_eq!(r.attempts.len(), 1);
        assert_eq!(r.attempts[0].ordering_violations, 0);
    }
}
