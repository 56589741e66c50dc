//! Periodic leader-based clock: rounds of three stages (0, 1, 2), each
//! stage one full turn of the edge-less clock.
//!
//! When the leader meets a follower of its own stage whose counter sits at
//! the cap, the stage has turned: the leader moves to the next stage and
//! starts carrying its announcement. Announcements spread as a one-way
//! epidemic; an agent that receives the announcement for `stage + 1` resets
//! its counter and moves on. An announcement two stages ahead of an agent
//! (mod 3 that is one stage behind it) never moves it; it only overwrites a
//! stale carried signal for the stage before.

use crate::engine::TransitionDelta;

use super::{ClockView, LeaderView};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PeriodicClockState {
    pub is_leader: bool,
    /// Stage index mod 3.
    pub stage: u8,
    pub level: u16,
    /// Carried stage-start announcement, if any.
    pub announce: Option<u8>,
}

impl PeriodicClockState {
    pub fn leader() -> Self {
        Self {
            is_leader: true,
            stage: 0,
            level: 0,
            announce: None,
        }
    }

    pub fn follower() -> Self {
        Self {
            is_leader: false,
            stage: 0,
            level: 0,
            announce: None,
        }
    }
}

impl LeaderView for PeriodicClockState {
    fn is_leader(&self) -> bool {
        self.is_leader
    }
}

impl ClockView for PeriodicClockState {
    fn clock_capped(&self, max_level: u16) -> bool {
        !self.is_leader && self.level >= max_level
    }
}

#[derive(Debug, Clone, Copy)]
pub struct PeriodicClockDelta {
    pub max_level: u16,
}

impl PeriodicClockDelta {
    /// One-way announcement exchange from `from` into `to`.
    fn receive(to: &mut PeriodicClockState, from: &PeriodicClockState) {
        let Some(s) = from.announce else { return };
        if s == (to.stage + 1) % 3 {
            to.stage = s;
            to.level = 0;
            to.announce = Some(s);
        } else if s == (to.stage + 2) % 3 && to.announce == Some((s + 2) % 3) {
            // a signal two stages ahead wipes the stale one it supersedes
            to.announce = Some(s);
        }
    }
}

impl TransitionDelta for PeriodicClockDelta {
    type State = PeriodicClockState;

    fn apply(
        &self,
        a: PeriodicClockState,
        b: PeriodicClockState,
        edge: bool,
    ) -> (PeriodicClockState, PeriodicClockState, bool) {
        let mut a2 = a;
        let mut b2 = b;
        Self::receive(&mut a2, &b);
        Self::receive(&mut b2, &a);

        // Timid counting within a shared stage, plus turn detection at the
        // leader: the first follower at the cap it meets concludes the stage.
        // An agent that moved stages this interaction sits the counting out.
        let moved = a2.stage != a.stage || b2.stage != b.stage;
        if !moved && a2.stage == b2.stage {
            match (a2.is_leader, b2.is_leader) {
                (true, false) => {
                    if b2.level >= self.max_level {
                        let next = (a2.stage + 1) % 3;
                        a2.stage = next;
                        a2.level = 0;
                        a2.announce = Some(next);
                    } else {
                        b2.level += 1;
                    }
                }
                (false, true) => {
                    if a2.level >= self.max_level {
                        let next = (b2.stage + 1) % 3;
                        b2.stage = next;
                        b2.level = 0;
                        b2.announce = Some(next);
                    } else {
                        a2.level += 1;
                    }
                }
                (false, false) => {
                    if a2.level < b2.level {
                        b2.level = a2.level + 1;
                    }
                }
                (true, true) => {}
            }
        }
        (a2, b2, edge)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const D: PeriodicClockDelta = PeriodicClockDelta { max_level: 8 };

    fn follower(stage: u8, level: u16, announce: Option<u8>) -> PeriodicClockState {
        PeriodicClockState {
            is_leader: false,
            stage,
            level,
            announce,
        }
    }

    #[test]
    fn capped_follower_makes_the_leader_announce_the_next_stage() {
        let (f2, l2, _) = D.apply(follower(0, 8, None), PeriodicClockState::leader(), false);
        assert_eq!(l2.announce, Some(1));
        assert_eq!(l2.stage, 1);
        assert_eq!(f2, follower(0, 8, None));
    }

    #[test]
    fn announcement_advances_a_previous_stage_agent() {
        let carrier = follower(1, 3, Some(1));
        let (r2, c2, _) = D.apply(follower(0, 5, None), carrier, false);
        assert_eq!((r2.stage, r2.level, r2.announce), (1, 0, Some(1)));
        assert_eq!(c2, carrier);
    }

    #[test]
    fn announcement_for_the_current_stage_changes_nothing() {
        let carrier = follower(1, 3, Some(1));
        let agent = follower(1, 2, Some(1));
        let (a2, c2, _) = D.apply(agent, carrier, false);
        assert_eq!(a2, agent);
        assert_eq!(c2, carrier);
    }

    #[test]
    fn signal_one_stage_behind_never_regresses_an_agent() {
        // Agent already in stage 1; a straggler still carries announce(0).
        let straggler = follower(0, 1, Some(0));
        let agent = follower(1, 4, Some(1));
        let (a2, s2, _) = D.apply(agent, straggler, false);
        assert_eq!(a2.stage, 1);
        assert_eq!(a2.announce, Some(1));
        // the straggler, though, hears announce(1) = its stage + 1 and moves
        assert_eq!((s2.stage, s2.level, s2.announce), (1, 0, Some(1)));
    }

    #[test]
    fn counting_only_happens_within_a_stage() {
        let (a2, b2, _) = D.apply(follower(0, 2, None), follower(1, 7, Some(1)), false);
        // receiver first adopts stage 1 level 0, so no follower rule fires on
        // the old levels; the pair ends up in the same stage.
        assert_eq!(a2.stage, 1);
        assert_eq!(a2.level, 0);
        assert_eq!(b2.level, 7);
    }

    #[test]
    fn leader_ticks_followers_on_either_side() {
        let l = PeriodicClockState::leader();
        let (f2, _, _) = D.apply(follower(0, 3, None), l, false);
        assert_eq!(f2.level, 4);
        let (_, f2, _) = D.apply(l, follower(0, 3, None), false);
        assert_eq!(f2.level, 4);
    }
}
