//! Matching-based phase clock.
//!
//! Agents start in `<start>`. Two start agents that meet get connected and
//! enter the counting stage at level 0 as a matched pair. A pair's levels
//! rise only through interactions along its own matching edge; disconnected
//! interactions pull the higher agent down next to the lower one, so nobody
//! runs far ahead of the population minimum. Once the top level is reached
//! it spreads by epidemic, matched pairs at the top drop their edge and
//! exit to `<end>`, and a leftover `<start>` agent (odd n) exits when it
//! meets an `<end>` agent.

use thiserror::Error;

use crate::engine::TransitionDelta;

use super::ClockView;

/// Clock constants: the top level `max` and the slack `d` used by the
/// floor-time analysis. Defaults are 64 and 8; `max > d + 2` is required.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClockParams {
    pub max_level: u16,
    pub d_slack: u16,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ClockParamsError {
    #[error("clock params need max_level > d_slack + 2, got max={max_level} d={d_slack}")]
    Invalid { max_level: u16, d_slack: u16 },
}

impl ClockParams {
    pub fn new(max_level: u16, d_slack: u16) -> Result<Self, ClockParamsError> {
        if max_level == 0 || d_slack == 0 || max_level <= d_slack + 2 {
            return Err(ClockParamsError::Invalid { max_level, d_slack });
        }
        Ok(Self { max_level, d_slack })
    }
}

impl Default for ClockParams {
    fn default() -> Self {
        Self {
            max_level: 64,
            d_slack: 8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MatchingClockState {
    Start,
    Level(u16),
    End,
}

impl ClockView for MatchingClockState {
    fn clock_capped(&self, max_level: u16) -> bool {
        match self {
            MatchingClockState::Level(i) => *i >= max_level,
            MatchingClockState::End => true,
            MatchingClockState::Start => false,
        }
    }
}

/// The six counting-stage rules, matched on the ordered pair as written:
///
/// 1. `<start> + <start> + 0 -> <0> + <0> + 1`
/// 2. connected, `i <= j`, `i < max`: `<i> + <j> + 1 -> <i+1> + <i+1> + 1`
/// 3. disconnected, `i < j`: `<i> + <j> + 0 -> <i> + <i+1> + 0`
/// 4. `<max> + <i> + 0 -> <max> + <max> + 0` (maximum level epidemic)
/// 5. `<max> + <max> + 1 -> <end> + <end> + 0`
/// 6. `<start> + <end> + 0 -> <end> + <end> + 0` (odd-n leftover)
#[derive(Debug, Clone, Copy)]
pub struct MatchingClockDelta {
    pub params: ClockParams,
}

impl MatchingClockDelta {
    pub fn new(params: ClockParams) -> Self {
        Self { params }
    }
}

impl TransitionDelta for MatchingClockDelta {
    type State = MatchingClockState;

    #[inline]
    fn apply(
        &self,
        a: MatchingClockState,
        b: MatchingClockState,
        edge: bool,
    ) -> (MatchingClockState, MatchingClockState, bool) {
        use MatchingClockState::*;
        let max = self.params.max_level;
        match (a, b, edge) {
            (Start, Start, false) => (Level(0), Level(0), true),
            (Level(i), Level(j), true) if i <= j && i < max => (Level(i + 1), Level(i + 1), true),
            (Level(i), Level(j), false) if i < j => (Level(i), Level(i + 1), false),
            (Level(i), Level(j), false) if i == max && j < max => (Level(max), Level(max), false),
            (Level(i), Level(j), true) if i == max && j == max => (End, End, false),
            (Start, End, false) => (End, End, false),
            other => other,
        }
    }
}
