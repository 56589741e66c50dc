//! Layered protocol composition.
//!
//! Each composed protocol keeps its own tuple field of the agent state, per
//! the separate-constant-memory convention. Every layer sees the same
//! pre-interaction edge flag; only the designated edge-owner layer's flag
//! output is committed, other layers read it but their writes are dropped.

use thiserror::Error;

use crate::engine::TransitionDelta;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ComposeError {
    #[error("edge owner index {owner} out of range for {layers} layer(s)")]
    OwnerOutOfRange { owner: usize, layers: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeOwner {
    First,
    Second,
}

/// Single-layer composition; behaves exactly like the layer itself.
#[derive(Debug, Clone, Copy)]
pub struct Compose1<A>(A);

pub fn compose1<A>(layer: A, edge_owner: usize) -> Result<Compose1<A>, ComposeError> {
    if edge_owner != 0 {
        return Err(ComposeError::OwnerOutOfRange {
            owner: edge_owner,
            layers: 1,
        });
    }
    Ok(Compose1(layer))
}

impl<A: TransitionDelta> TransitionDelta for Compose1<A> {
    type State = A::State;

    #[inline]
    fn apply(&self, a: Self::State, b: Self::State, edge: bool) -> (Self::State, Self::State, bool) {
        self.0.apply(a, b, edge)
    }
}

/// Two-layer composition over paired states.
#[derive(Debug, Clone, Copy)]
pub struct Compose2<A, B> {
    first: A,
    second: B,
    owner: EdgeOwner,
}

pub fn compose2<A, B>(first: A, second: B, edge_owner: usize) -> Result<Compose2<A, B>, ComposeError> {
    let owner = match edge_owner {
        0 => EdgeOwner::First,
        1 => EdgeOwner::Second,
        other => {
            return Err(ComposeError::OwnerOutOfRange {
                owner: other,
                layers: 2,
            })
        }
    };
    Ok(Compose2 {
        first,
        second,
        owner,
    })
}

impl<A: TransitionDelta, B: TransitionDelta> TransitionDelta for Compose2<A, B> {
    type State = (A::State, B::State);

    #[inline]
    fn apply(&self, a: Self::State, b: Self::State, edge: bool) -> (Self::State, Self::State, bool) {
        let (fa, fb, fe) = self.first.apply(a.0, b.0, edge);
        let (sa, sb, se) = self.second.apply(a.1, b.1, edge);
        let edge2 = match self.owner {
            EdgeOwner::First => fe,
            EdgeOwner::Second => se,
        };
        ((fa, sa), (fb, sb), edge2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocols::{
        ClockParams, LeaderElectionDelta, LeaderElectionState, MatchingClockDelta,
        MatchingClockState,
    };
    use LeaderElectionState::*;
    use MatchingClockState::*;

    #[test]
    fn owner_out_of_range_is_rejected() {
        assert!(compose1(LeaderElectionDelta, 1).is_err());
        assert!(compose2(LeaderElectionDelta, LeaderElectionDelta, 2).is_err());
    }

    #[test]
    fn single_layer_composition_is_the_layer() {
        let c = compose1(LeaderElectionDelta, 0).unwrap();
        for (a, b) in [(Leader, Leader), (Leader, Follower), (Follower, Follower)] {
            for edge in [false, true] {
                assert_eq!(c.apply(a, b, edge), LeaderElectionDelta.apply(a, b, edge));
            }
        }
    }

    #[test]
    fn duel_and_clock_advance_in_one_interaction() {
        let c = compose2(
            LeaderElectionDelta,
            MatchingClockDelta::new(ClockParams::default()),
            1,
        )
        .unwrap();
        let ((le_a, ck_a), (le_b, ck_b), edge) = c.apply((Leader, Start), (Leader, Start), false);
        assert_eq!((le_a, le_b), (Leader, Follower));
        assert_eq!((ck_a, ck_b), (Level(0), Level(0)));
        assert!(edge, "clock layer owns the edge and connects the pair");
    }

    #[test]
    fn non_owner_edge_writes_are_dropped() {
        // Clock as the non-owner: its connect request must be ignored.
        let c = compose2(
            MatchingClockDelta::new(ClockParams::default()),
            LeaderElectionDelta,
            1,
        )
        .unwrap();
        let ((ck_a, _), (ck_b, _), edge) = c.apply((Start, Leader), (Start, Leader), false);
        assert_eq!((ck_a, ck_b), (Level(0), Level(0)));
        assert!(!edge, "edge stays as the owner (leader election) left it");
    }
}
