//! Aggregation over trial reports plus the scaling-law tables used by the
//! acceptance checks.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use popcon_core::engine::TrialReport;

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("cannot aggregate an empty report list")]
    Empty,
    #[error("scaling tables need >= 3 population sizes spanning a >= 4x range, got {0:?}")]
    InsufficientGrid(Vec<usize>),
    #[error("no successful trials at n = {0}")]
    NoSuccesses(usize),
}

/// Per-n aggregate over a sweep. Parallel-time statistics cover successful
/// trials only; the success rate reflects all of them.
#[derive(Debug, Clone, Serialize)]
pub struct AggregateStats {
    pub n: usize,
    pub trials: usize,
    pub successes: usize,
    pub success_rate: f64,
    pub mean_parallel_time: f64,
    pub median_parallel_time: f64,
    pub p95_parallel_time: f64,
    pub min_parallel_time: f64,
    pub max_parallel_time: f64,
    /// Mean parallel time divided by each applicable normalizer.
    pub normalized: BTreeMap<String, f64>,
}

/// Groups reports by n (ascending) and computes success rates and
/// parallel-time statistics. `k` adds the strand-length normalizer.
pub fn aggregate(reports: &[TrialReport], k: Option<usize>) -> Result<Vec<AggregateStats>, StatsError> {
    if reports.is_empty() {
        return Err(StatsError::Empty);
    }
    let mut by_n: BTreeMap<usize, Vec<&TrialReport>> = BTreeMap::new();
    for r in reports {
        by_n.entry(r.n).or_default().push(r);
    }
    let mut out = Vec::with_capacity(by_n.len());
    for (n, group) in by_n {
        let mut times: Vec<f64> = group
            .iter()
            .filter(|r| r.success)
            .map(|r| r.parallel_time_f64())
            .collect();
        times.sort_by(|a, b| a.total_cmp(b));
        let successes = times.len();
        let (mean, median, p95, min, max) = if successes == 0 {
            (f64::NAN, f64::NAN, f64::NAN, f64::NAN, f64::NAN)
        } else {
            let mean = times.iter().sum::<f64>() / successes as f64;
            let median = times[(successes - 1) / 2];
            let p95 = times[((successes - 1) as f64 * 0.95).floor() as usize];
            (mean, median, p95, times[0], times[successes - 1])
        };
        let mut normalized = BTreeMap::new();
        for norm in [Normalizer::PopulationN, Normalizer::NLnN] {
            normalized.insert(norm.name(None).to_string(), mean / norm.value(n, None));
        }
        if let Some(k) = k {
            let norm = Normalizer::NKLnN;
            normalized.insert(norm.name(Some(k)).to_string(), mean / norm.value(n, Some(k)));
        }
        out.push(AggregateStats {
            n,
            trials: group.len(),
            successes,
            success_rate: successes as f64 / group.len() as f64,
            mean_parallel_time: mean,
            median_parallel_time: median,
            p95_parallel_time: p95,
            min_parallel_time: min,
            max_parallel_time: max,
            normalized,
        });
    }
    Ok(out)
}

/// Parallel-time normalizers from the protocols' theoretical bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalizer {
    /// Constant 1 (raw parallel time).
    Unit,
    /// n
    PopulationN,
    /// n ln n
    NLnN,
    /// n (k + ln n)
    NKLnN,
}

impl Normalizer {
    pub fn name(&self, k: Option<usize>) -> String {
        match self {
            Normalizer::Unit => "1".into(),
            Normalizer::PopulationN => "n".into(),
            Normalizer::NLnN => "n*ln(n)".into(),
            Normalizer::NKLnN => match k {
                Some(k) => format!("n*({k}+ln(n))"),
                None => "n*(k+ln(n))".into(),
            },
        }
    }

    pub fn value(&self, n: usize, k: Option<usize>) -> f64 {
        let nf = n as f64;
        match self {
            Normalizer::Unit => 1.0,
            Normalizer::PopulationN => nf,
            Normalizer::NLnN => nf * nf.ln(),
            Normalizer::NKLnN => nf * (k.unwrap_or(0) as f64 + nf.ln()),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ScalingRow {
    pub n: usize,
    pub normalizer: String,
    pub mean_ratio: f64,
    /// (max - min) / mean of per-trial ratios at this n, successes only.
    pub relative_spread: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScalingTable {
    pub rows: Vec<ScalingRow>,
    /// max over the grid of mean ratios divided by the min: the flatness
    /// figure. 1.0 is perfectly flat.
    pub flatness: f64,
}

/// Emits mean parallel time / normalizer(n) per n plus the grid flatness.
/// Requires >= 3 population sizes spanning at least a 4x range and at least
/// one success per n.
pub fn scaling_table(
    reports: &[TrialReport],
    normalizer: Normalizer,
    k: Option<usize>,
) -> Result<ScalingTable, StatsError> {
    if reports.is_empty() {
        return Err(StatsError::Empty);
    }
    let mut by_n: BTreeMap<usize, Vec<&TrialReport>> = BTreeMap::new();
    for r in reports {
        by_n.entry(r.n).or_default().push(r);
    }
    let grid: Vec<usize> = by_n.keys().copied().collect();
    if grid.len() < 3 || (grid[grid.len() - 1] as f64) < 4.0 * grid[0] as f64 {
        return Err(StatsError::InsufficientGrid(grid));
    }
    let mut rows = Vec::with_capacity(grid.len());
    for (n, group) in &by_n {
        let ratios: Vec<f64> = group
            .iter()
            .filter(|r| r.success)
            .map(|r| r.parallel_time_f64() / normalizer.value(*n, k))
            .collect();
        if ratios.is_empty() {
            return Err(StatsError::NoSuccesses(*n));
        }
        let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
        let max = ratios.iter().cloned().fold(f64::MIN, f64::max);
        let min = ratios.iter().cloned().fold(f64::MAX, f64::min);
        rows.push(ScalingRow {
            n: *n,
            normalizer: normalizer.name(k),
            mean_ratio: mean,
            relative_spread: (max - min) / mean,
        });
    }
    let max = rows.iter().map(|r| r.mean_ratio).fold(f64::MIN, f64::max);
    let min = rows.iter().map(|r| r.mean_ratio).fold(f64::MAX, f64::min);
    Ok(ScalingTable {
        rows,
        flatness: max / min,
    })
}

/// Flatness of mean ratios over an arbitrary keyed grid (used for strand
/// length sweeps at fixed n).
pub fn flatness_over<K: Ord + std::fmt::Debug + Copy>(groups: &BTreeMap<K, f64>) -> f64 {
    let max = groups.values().cloned().fold(f64::MIN, f64::max);
    let min = groups.values().cloned().fold(f64::MAX, f64::min);
    max / min
}
