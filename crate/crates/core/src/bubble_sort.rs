//! Probabilistic bubble-sort and its exact potential-function machinery.
//!
//! Each comparison step draws an index `j` uniformly from `{0,..,n-2}` and
//! swaps `A[j]` and `A[j+1]` if they invert. For 0/1 sequences the
//! unsortedness measure is `P(C) = sum_{i in C} (2^{n-k+2l-i} - 2^l)` with
//! `l = |C ∩ {0..i-1}|`, an exact non-negative integer below `2^n` that is
//! zero exactly on sorted configurations and contracts in expectation by a
//! factor `1 - 1/(4(n-1))` per comparison. Potentials are evaluated in
//! arbitrary precision; long statistical runs never touch them.

use num_bigint::BigUint;
use num_rational::Ratio;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::engine::{SchedulerRng, UniformIndex};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SortError {
    #[error("compare-swap index {j} out of range for length {n} (need j <= n-2)")]
    IndexOutOfRange { j: usize, n: usize },
}

/// Compare positions `j` and `j+1`, swapping when they invert.
pub fn compare_swap(values: &mut [i64], j: usize) -> Result<(), SortError> {
    if values.len() < 2 || j > values.len() - 2 {
        return Err(SortError::IndexOutOfRange {
            j,
            n: values.len(),
        });
    }
    if values[j] > values[j + 1] {
        values.swap(j, j + 1);
    }
    Ok(())
}

pub fn is_sorted(values: &[i64]) -> bool {
    values.windows(2).all(|w| w[0] <= w[1])
}

/// Outcome of one probabilistic bubble-sort run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SortReport {
    /// Random index draws spent, swap or not.
    pub comparisons: u64,
    pub sorted: bool,
    pub swaps: u64,
    /// `comparison_bound(n, eta)` for the run's parameters.
    pub bound: u64,
    pub within_bound: bool,
}

/// Runs probabilistic bubble-sort in place until sorted or the budget is
/// spent. Every draw counts as one comparison. Sortedness is tracked with
/// an adjacent-inversion counter updated in O(1) per step, so the reported
/// comparison count is exactly the first draw after which the array is
/// non-decreasing.
pub fn prob_bubble_sort(
    values: &mut [i64],
    eta: f64,
    rng: &mut SchedulerRng,
    budget: u64,
) -> SortReport {
    let n = values.len();
    assert!(n >= 2, "sorting needs at least two elements");
    let bound = comparison_bound(n, eta);

    // adjacent inversions: positions j with A[j] > A[j+1]
    let mut inversions = (0..n - 1).filter(|&j| values[j] > values[j + 1]).count();
    let mut comparisons = 0u64;
    let mut swaps = 0u64;
    let index = UniformIndex::new(n - 1);

    while inversions > 0 && comparisons < budget {
        let j = index.draw(rng);
        comparisons += 1;
        if values[j] > values[j + 1] {
            // the swap flips adjacency at j and may create/destroy
            // inversions at j-1 and j+1
            let before_left = j > 0 && values[j - 1] > values[j];
            let before_right = j + 2 < n && values[j + 1] > values[j + 2];
            values.swap(j, j + 1);
            swaps += 1;
            inversions -= 1;
            let after_left = j > 0 && values[j - 1] > values[j];
            let after_right = j + 2 < n && values[j + 1] > values[j + 2];
            inversions += after_left as usize + after_right as usize;
            inversions -= before_left as usize + before_right as usize;
        }
    }

    let sorted = inversions == 0;
    debug_assert_eq!(sorted, is_sorted(values));
    SortReport {
        comparisons,
        sorted,
        swaps,
        bound,
        within_bound: comparisons <= bound,
    }
}

/// `ceil(4(n-1)(n ln 2 + eta ln n))`, the comparison count that sorts any
/// length-n 0/1 sequence with failure probability at most `n^-eta`.
pub fn comparison_bound(n: usize, eta: f64) -> u64 {
    assert!(n >= 2 && eta > 0.0);
    let nf = n as f64;
    (4.0 * (nf - 1.0) * (nf * std::f64::consts::LN_2 + eta * nf.ln())).ceil() as u64
}

/// A 0/1 sequence keyed by its set of one-positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZeroOneConfig {
    n: usize,
    /// Strictly ascending positions holding ones.
    ones: Vec<usize>,
}

impl ZeroOneConfig {
    pub fn new(n: usize, mut ones: Vec<usize>) -> Self {
        ones.sort_unstable();
        ones.dedup();
        assert!(ones.last().map_or(true, |&i| i < n));
        Self { n, ones }
    }

    /// Unpacks a bitmask; bit `i` set means position `i` holds a one.
    pub fn from_mask(n: usize, mask: u32) -> Self {
        Self {
            n,
            ones: (0..n).filter(|i| mask >> i & 1 == 1).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn ones(&self) -> &[usize] {
        &self.ones
    }

    pub fn k(&self) -> usize {
        self.ones.len()
    }

    /// Sorted means all ones packed at the right end.
    pub fn is_sorted(&self) -> bool {
        self.ones
            .iter()
            .enumerate()
            .all(|(l, &i)| i == self.n - self.k() + l)
    }

    pub fn to_values(&self) -> Vec<i64> {
        let mut v = vec![0i64; self.n];
        for &i in &self.ones {
            v[i] = 1;
        }
        v
    }

    /// The configuration after a compare-swap at index `j`.
    pub fn step(&self, j: usize) -> Self {
        debug_assert!(j + 1 < self.n);
        // inversion iff a one at j and a zero at j+1
        if self.ones.contains(&j) && !self.ones.contains(&(j + 1)) {
            let ones = self
                .ones
                .iter()
                .map(|&i| if i == j { j + 1 } else { i })
                .collect();
            let mut next = Self { n: self.n, ones };
            next.ones.sort_unstable();
            next
        } else {
            self.clone()
        }
    }
}

/// Exact potential `P(C)`: zero iff sorted, always below `2^n`.
pub fn potential(config: &ZeroOneConfig) -> BigUint {
    let n = config.n();
    let k = config.k();
    let mut total = BigUint::zero();
    for (l, &i) in config.ones().iter().enumerate() {
        // exponent n - k + 2l - i >= l >= 0 because at most n - k zeros
        // precede position i
        let exp = n + 2 * l - k - i;
        total += (BigUint::one() << exp) - (BigUint::one() << l);
    }
    total
}

/// Exact expected potential after one uniformly random comparison:
/// `(1/(n-1)) * sum_j P(step_j(C))`.
pub fn exact_expected_next_potential(config: &ZeroOneConfig) -> Ratio<num_bigint::BigInt> {
    let n = config.n();
    assert!(n >= 2);
    let mut sum = BigUint::zero();
    for j in 0..n - 1 {
        sum += potential(&config.step(j));
    }
    Ratio::new(sum.into(), num_bigint::BigInt::from(n - 1))
}

/// The n+1 zero-one projections of a sequence: for each k, the k largest
/// elements become ones and the rest zeros. Ties break by position, later
/// positions counting as larger.
pub fn zero_one_projections(values: &[i64]) -> Vec<ZeroOneConfig> {
    let n = values.len();
    // ranks: position order of (value, index), largest last
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| (values[i], i));
    (0..=n)
        .map(|k| {
            let ones: Vec<usize> = order[n - k..].to_vec();
            ZeroOneConfig::new(n, ones)
        })
        .collect()
}
