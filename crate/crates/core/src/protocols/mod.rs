//! Transition deltas and observer predicates for the shipped protocols.
//!
//! Rule orientation conventions, applied consistently and pinned by tests:
//!
//! * Leader election, the matching clock, and the follower/follower rules
//!   of the edge-less clocks match on the ordered (initiator, responder)
//!   pair exactly as each rule is written. A triple like `(<5>, <3>, 0)`
//!   matches no rule and maps to itself.
//! * The leader rule of the edge-less clocks and all line-formation rules
//!   treat the pair as a virtual edge: they fire whichever side each role
//!   lands on, with the rule's role assignment preserved. This is what
//!   gives line extension its `2(n-i)/(n(n-1))` per-interaction rate.

mod compose;
mod leader_clock;
mod leader_election;
mod line;
mod matching_clock;
mod periodic_clock;
mod pipeline;

pub use compose::{compose1, compose2, Compose1, Compose2, ComposeError, EdgeOwner};
pub use leader_clock::{LeaderClockDelta, LeaderClockState};
pub use leader_election::{LeaderElectionDelta, LeaderElectionState};
pub use line::{LineFormationDelta, LineState};
pub use matching_clock::{ClockParams, ClockParamsError, MatchingClockDelta, MatchingClockState};
pub use periodic_clock::{PeriodicClockDelta, PeriodicClockState};
pub use pipeline::{PipelineDelta, PipelineState};

use crate::engine::Configuration;

/// View of an agent state as "holds the leader token or not".
pub trait LeaderView {
    fn is_leader(&self) -> bool;
}

/// View of an agent state as "has this clock field hit its cap".
pub trait ClockView {
    /// True when the clock component sits at `Level(max)` or `End`.
    fn clock_capped(&self, max_level: u16) -> bool;
}

/// View of an agent state as its line-formation role, if any.
pub trait LineView {
    fn line_state(&self) -> Option<LineState>;
}

// Composed leader-election + matching-clock states, as used by the
// confirmation-ordering runs.
impl LeaderView for (LeaderElectionState, MatchingClockState) {
    fn is_leader(&self) -> bool {
        self.0.is_leader()
    }
}

impl ClockView for (LeaderElectionState, MatchingClockState) {
    fn clock_capped(&self, max_level: u16) -> bool {
        self.1.clock_capped(max_level)
    }
}

/// Exactly one agent is in the leader state.
pub fn is_single_leader<S: Copy + LeaderView>(config: &Configuration<S>) -> bool {
    leader_count(config) == 1
}

pub fn leader_count<S: Copy + LeaderView>(config: &Configuration<S>) -> usize {
    config.states().iter().filter(|s| s.is_leader()).count()
}

/// Some agent has reached `Level(max)` or `End` in its matching clock.
pub fn clock_max_reached<S: Copy + ClockView>(config: &Configuration<S>, max_level: u16) -> bool {
    config.states().iter().any(|s| s.clock_capped(max_level))
}

/// The edge set forms a simple path over all `n` agents whose endpoints are
/// the head and the tail and whose interior agents are regular.
pub fn is_spanning_line<S: Copy + LineView>(config: &Configuration<S>) -> bool {
    let n = config.n();
    if config.edges().len() != n - 1 {
        return false;
    }
    let mut head = None;
    for (id, s) in config.states().iter().enumerate() {
        let want = match s.line_state() {
            Some(LineState::Head) | Some(LineState::Tail) => 1,
            Some(LineState::Regular) => 2,
            _ => return false,
        };
        if config.edges().degree(id as u32) != want {
            return false;
        }
        if s.line_state() == Some(LineState::Head) {
            if head.is_some() {
                return false;
            }
            head = Some(id as u32);
        }
    }
    let Some(start) = head else { return false };
    // Walk the path; it must visit every agent and end on the tail.
    let mut prev = start;
    let mut cur = start;
    for _ in 0..n - 1 {
        let next = config
            .edges()
            .neighbors(cur)
            .iter()
            .copied()
            .find(|&v| v != prev);
        match next {
            Some(v) => {
                prev = cur;
                cur = v;
            }
            None => return false,
        }
    }
    config.state(cur).line_state() == Some(LineState::Tail)
}

#[cfg(test)]
mod predicate_tests {
    use super::*;
    use crate::engine::Configuration;

    #[test]
    fn three_agent_path_is_a_spanning_line() {
        let states = [LineState::Head, LineState::Regular, LineState::Tail];
        let mut c = Configuration::init(3, |i| states[i as usize]).unwrap();
        c.set_edge(0, 1, true);
        c.set_edge(1, 2, true);
        assert!(is_spanning_line(&c));
    }

    #[test]
    fn cycle_is_not_a_spanning_line() {
        let states = [LineState::Head, LineState::Regular, LineState::Tail];
        let mut c = Configuration::init(3, |i| states[i as usize]).unwrap();
        c.set_edge(0, 1, true);
        c.set_edge(1, 2, true);
        c.set_edge(0, 2, true);
        assert!(!is_spanning_line(&c));
    }

    #[test]
    fn all_followers_is_not_a_single_leader() {
        let c = Configuration::init(4, |_| LeaderElectionState::Follower).unwrap();
        assert!(!is_single_leader(&c));
    }
}
