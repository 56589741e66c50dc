//! Slow leader election: every agent starts as a leader candidate and the
//! single rule `L + L -> L + F` lets the initiator of a duel survive.

use crate::engine::TransitionDelta;

use super::LeaderView;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LeaderElectionState {
    Leader,
    Follower,
}

impl LeaderView for LeaderElectionState {
    fn is_leader(&self) -> bool {
        matches!(self, LeaderElectionState::Leader)
    }
}

/// `L + L -> L + F`; everything else is untouched. The edge flag is never
/// modified.
#[derive(Debug, Clone, Copy, Default)]
pub struct LeaderElectionDelta;

impl TransitionDelta for LeaderElectionDelta {
    type State = LeaderElectionState;

    #[inline]
    fn apply(
        &self,
        a: LeaderElectionState,
        b: LeaderElectionState,
        edge: bool,
    ) -> (LeaderElectionState, LeaderElectionState, bool) {
        use LeaderElectionState::*;
        match (a, b) {
            (Leader, Leader) => (Leader, Follower, edge),
            other => (other.0, other.1, edge),
        }
    }
}
