//! Seeded experiment sweeps over an n-grid.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use popcon_core::engine::{trial_seed, TrialReport};

use crate::params::{DistKind, Params, Protocol};
use crate::runner::{run_one, run_replication_trial, run_sort_trial, RunChecks};

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("sweeps need at least one trial")]
    ZeroTrials,
    #[error("sweeps need a non-empty population grid with every n >= 2, got {0:?}")]
    BadGrid(Vec<usize>),
    #[error(transparent)]
    Protocol(#[from] crate::params::ProtocolParseError),
    #[error("replication strands need k >= 3, got {0}")]
    StrandTooShort(usize),
}

/// Sweep description; JSON config files mirror this shape, flags override.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepSpec {
    pub protocol: String,
    #[serde(rename = "nValues", alias = "n_values")]
    pub n_values: Vec<usize>,
    pub trials: u32,
    #[serde(rename = "masterSeed", alias = "master_seed", alias = "seed")]
    pub master_seed: u64,
    #[serde(default)]
    pub params: Params,
}

impl SweepSpec {
    fn validate(&self) -> Result<Protocol, SweepError> {
        if self.trials == 0 {
            return Err(SweepError::ZeroTrials);
        }
        if self.n_values.is_empty() || self.n_values.iter().any(|&n| n < 2) {
            return Err(SweepError::BadGrid(self.n_values.clone()));
        }
        Ok(self.protocol.parse()?)
    }
}

/// Runs `trials` independent runs of the named protocol for every n in the
/// grid. Trial (n, i) is seeded by `trial_seed(master, n, i)`, so its report
/// does not depend on which other trials the sweep contains. Trials may run
/// concurrently; the report list comes back sorted by (n, trial).
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<TrialReport>, SweepError> {
    run_sweep_checked(spec, RunChecks::default())
}

pub fn run_sweep_checked(
    spec: &SweepSpec,
    checks: RunChecks,
) -> Result<Vec<TrialReport>, SweepError> {
    let protocol = spec.validate()?;
    let jobs: Vec<(usize, u32)> = spec
        .n_values
        .iter()
        .flat_map(|&n| (0..spec.trials).map(move |t| (n, t)))
        .collect();
    let reports = jobs
        .par_iter()
        .map(|&(n, t)| {
            let seed = trial_seed(spec.master_seed, n as u64, t as u64);
            run_one(protocol, n, seed, &spec.params, checks).with_trial(t)
        })
        .collect();
    Ok(reports)
}

/// Replication sweep: for each (n, trial), seeds a k-bit strand and runs to
/// `params.copies` complete copies.
pub fn replication_sweep(
    n_values: &[usize],
    k: usize,
    trials: u32,
    master_seed: u64,
    params: &Params,
    checks: RunChecks,
) -> Result<Vec<TrialReport>, SweepError> {
    if trials == 0 {
        return Err(SweepError::ZeroTrials);
    }
    if k < 3 {
        return Err(SweepError::StrandTooShort(k));
    }
    if n_values.is_empty() || n_values.iter().any(|&n| n < k + 1) {
        return Err(SweepError::BadGrid(n_values.to_vec()));
    }
    let jobs: Vec<(usize, u32)> = n_values
        .iter()
        .flat_map(|&n| (0..trials).map(move |t| (n, t)))
        .collect();
    Ok(jobs
        .par_iter()
        .map(|&(n, t)| {
            let seed = trial_seed(master_seed, n as u64, t as u64);
            run_replication_trial(n, k, seed, params, checks).with_trial(t)
        })
        .collect())
}

/// Sorting sweep over the n-grid for one input distribution.
pub fn sort_sweep(
    n_values: &[usize],
    trials: u32,
    dist: DistKind,
    master_seed: u64,
    params: &Params,
) -> Result<Vec<TrialReport>, SweepError> {
    if trials == 0 {
        return Err(SweepError::ZeroTrials);
    }
    if n_values.is_empty() || n_values.iter().any(|&n| n < 2) {
        return Err(SweepError::BadGrid(n_values.to_vec()));
    }
    let jobs: Vec<(usize, u32)> = n_values
        .iter()
        .flat_map(|&n| (0..trials).map(move |t| (n, t)))
        .collect();
    Ok(jobs
        .par_iter()
        .map(|&(n, t)| {
            let seed = trial_seed(master_seed, n as u64, t as u64);
            run_sort_trial(n, seed, dist, params).with_trial(t)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(protocol: &str, n: usize, trials: u32) -> SweepSpec {
        SweepSpec {
            protocol: protocol.into(),
            n_values: vec![n],
            trials,
            master_seed: 1,
            params: Params::default(),
        }
    }

    #[test]
    fn leader_election_sweep_all_succeed() {
        let reports = run_sweep(&spec("leader-election", 64, 30)).unwrap();
        assert_eq!(reports.len(), 30);
        assert!(reports.iter().all(|r| r.success));
        assert!(reports.iter().enumerate().all(|(i, r)| r.trial == i as u32));
    }

    #[test]
    fn zero_trials_is_an_error() {
        assert!(matches!(
            run_sweep(&spec("leader-election", 64, 0)),
            Err(SweepError::ZeroTrials)
        ));
    }

    #[test]
    fn unknown_protocol_is_an_error() {
        assert!(run_sweep(&spec("nope", 64, 1)).is_err());
    }

    #[test]
    fn tiny_population_is_rejected() {
        assert!(matches!(
            run_sweep(&spec("leader-election", 1, 3)),
            Err(SweepError::BadGrid(_))
        ));
    }

    #[test]
    fn identical_specs_produce_identical_reports() {
        let s = spec("leader-election", 48, 5);
        let a = run_sweep(&s).unwrap();
        let b = run_sweep(&s).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn sub_seeds_are_independent_of_the_trial_set() {
        let five = run_sweep(&spec("leader-election", 48, 5)).unwrap();
        let three = run_sweep(&spec("leader-election", 48, 3)).unwrap();
        assert_eq!(&five[..3], &three[..]);
    }

    #[test]
    fn spec_deserializes_from_config_json() {
        let s: SweepSpec = serde_json::from_str(
            r#"{"protocol": "matching-clock", "nValues": [64, 128], "trials": 5,
                "masterSeed": 9, "params": {"max": 16, "d": 4}}"#,
        )
        .unwrap();
        assert_eq!(s.n_values, vec![64, 128]);
        assert_eq!(s.params.max_level, 16);
    }
}
