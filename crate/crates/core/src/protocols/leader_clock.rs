//! Leader-based (edge-less) phase clock.
//!
//! Follower counters ride virtual edges to the computed leader: a follower
//! that interacts with the leader, on either side of the pair, steps its
//! level; a follower that responds to a strictly lower follower is pulled
//! down next to it. The edge flag is ignored and never written.

use crate::engine::TransitionDelta;

use super::{ClockView, LeaderView};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LeaderClockState {
    pub is_leader: bool,
    pub level: u16,
}

impl LeaderClockState {
    pub fn leader() -> Self {
        Self {
            is_leader: true,
            level: 0,
        }
    }

    pub fn follower() -> Self {
        Self {
            is_leader: false,
            level: 0,
        }
    }
}

impl LeaderView for LeaderClockState {
    fn is_leader(&self) -> bool {
        self.is_leader
    }
}

impl ClockView for LeaderClockState {
    fn clock_capped(&self, max_level: u16) -> bool {
        !self.is_leader && self.level >= max_level
    }
}

/// Timid counting against the leader:
///
/// * `<i> + L -> <i+1> + L` for `i < max`, firing on either orientation of
///   the follower/leader pair (the pair is a virtual edge);
/// * `<i> + <j> -> <i> + <i+1>` for followers with `i < j`, matched on the
///   ordered pair as written.
#[derive(Debug, Clone, Copy)]
pub struct LeaderClockDelta {
    pub max_level: u16,
}

impl TransitionDelta for LeaderClockDelta {
    type State = LeaderClockState;

    #[inline]
    fn apply(
        &self,
        a: LeaderClockState,
        b: LeaderClockState,
        edge: bool,
    ) -> (LeaderClockState, LeaderClockState, bool) {
        let mut a2 = a;
        let mut b2 = b;
        match (a.is_leader, b.is_leader) {
            (false, true) => {
                if a.level < self.max_level {
                    a2.level += 1;
                }
            }
            (true, false) => {
                if b.level < self.max_level {
                    b2.level += 1;
                }
            }
            (false, false) => {
                if a.level < b.level {
                    b2.level = a.level + 1;
                }
            }
            (true, true) => {}
        }
        (a2, b2, edge)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(level: u16) -> LeaderClockState {
        LeaderClockState {
            is_leader: false,
            level,
        }
    }

    const D: LeaderClockDelta = LeaderClockDelta { max_level: 10 };

    #[test]
    fn follower_meeting_the_leader_steps_up() {
        let l = LeaderClockState::leader();
        assert_eq!(D.apply(f(4), l, false), (f(5), l, false));
        // virtual-edge reading: the reversed orientation fires too
        assert_eq!(D.apply(l, f(4), false), (l, f(5), false));
    }

    #[test]
    fn follower_at_cap_stays() {
        let l = LeaderClockState::leader();
        assert_eq!(D.apply(f(10), l, false), (f(10), l, false));
    }

    #[test]
    fn lower_initiator_pulls_the_responder_down() {
        assert_eq!(D.apply(f(2), f(7), false), (f(2), f(3), false));
    }

    #[test]
    fn equal_followers_match_no_rule() {
        assert_eq!(D.apply(f(7), f(7), false), (f(7), f(7), false));
    }

    #[test]
    fn higher_initiator_matches_no_rule() {
        assert_eq!(D.apply(f(7), f(2), false), (f(7), f(2), false));
    }

    #[test]
    fn edge_flag_passes_through_untouched() {
        let l = LeaderClockState::leader();
        assert_eq!(D.apply(f(0), l, true), (f(1), l, true));
    }
}
