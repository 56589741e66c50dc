//! Spanning-line formation.
//!
//! The confirmed leader seeds a head/tail pair and the line then grows one
//! agent at a time from its head. Backup rules keep the protocol always
//! correct when more than one leader survives into this stage: surplus
//! leaders are eliminated or absorbed, a head meeting another head turns it
//! into a dismantler `D`, and `D` eats its line edge by edge back into free
//! agents.
//!
//! All seven rules fire on whichever orientation of the pair shows the
//! pattern, with the written role assignment kept.

use crate::engine::TransitionDelta;

use super::{LeaderView, LineView};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LineState {
    Leader,
    Free,
    Head,
    Tail,
    Regular,
    Dismantler,
}

impl LeaderView for LineState {
    fn is_leader(&self) -> bool {
        matches!(self, LineState::Leader)
    }
}

impl LineView for LineState {
    fn line_state(&self) -> Option<LineState> {
        Some(*self)
    }
}

/// The seven line-formation rules:
///
/// * `L + F + 0 -> H + T + 1` (form head and tail)
/// * `H + F + 0 -> R + H + 1` (extend the line)
/// * `L + L + 0 -> L + F + 0` (continue leader elimination)
/// * `L + H + 0 -> F + H + 0` (a leader yields to a formed head)
/// * `H + H + 0 -> H + D + 0` (one head starts dismantling)
/// * `D + R + 1 -> F + D + 0` (dismantle edge by edge)
/// * `D + T + 1 -> F + F + 0` (dismantle the final edge)
#[derive(Debug, Clone, Copy, Default)]
pub struct LineFormationDelta;

impl LineFormationDelta {
    /// Tries the rule set on one orientation.
    #[inline]
    fn rule(x: LineState, y: LineState, edge: bool) -> Option<(LineState, LineState, bool)> {
        use LineState::*;
        match (x, y, edge) {
            (Leader, Free, false) => Some((Head, Tail, true)),
            (Head, Free, false) => Some((Regular, Head, true)),
            (Leader, Leader, false) => Some((Leader, Free, false)),
            (Leader, Head, false) => Some((Free, Head, false)),
            (Head, Head, false) => Some((Head, Dismantler, false)),
            (Dismantler, Regular, true) => Some((Free, Dismantler, false)),
            (Dismantler, Tail, true) => Some((Free, Free, false)),
            _ => None,
        }
    }
}

impl TransitionDelta for LineFormationDelta {
    type State = LineState;

    #[inline]
    fn apply(&self, a: LineState, b: LineState, edge: bool) -> (LineState, LineState, bool) {
        if let Some(hit) = Self::rule(a, b, edge) {
            return hit;
        }
        if let Some((y2, x2, e2)) = Self::rule(b, a, edge) {
            return (x2, y2, e2);
        }
        (a, b, edge)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use LineState::*;

    const D: LineFormationDelta = LineFormationDelta;

    #[test]
    fn form_head_and_tail_inserts_the_edge() {
        assert_eq!(D.apply(Leader, Free, false), (Head, Tail, true));
        // reversed orientation, roles preserved
        assert_eq!(D.apply(Free, Leader, false), (Tail, Head, true));
    }

    #[test]
    fn extend_the_line() {
        assert_eq!(D.apply(Head, Free, false), (Regular, Head, true));
        assert_eq!(D.apply(Free, Head, false), (Head, Regular, true));
    }

    #[test]
    fn backups_eliminate_surplus_builders() {
        assert_eq!(D.apply(Leader, Leader, false), (Leader, Free, false));
        assert_eq!(D.apply(Leader, Head, false), (Free, Head, false));
        assert_eq!(D.apply(Head, Leader, false), (Head, Free, false));
        assert_eq!(D.apply(Head, Head, false), (Head, Dismantler, false));
    }

    #[test]
    fn dismantling_walks_and_frees() {
        assert_eq!(D.apply(Dismantler, Regular, true), (Free, Dismantler, false));
        assert_eq!(D.apply(Regular, Dismantler, true), (Dismantler, Free, false));
        assert_eq!(D.apply(Dismantler, Tail, true), (Free, Free, false));
    }

    #[test]
    fn head_meeting_tail_without_an_edge_matches_no_rule() {
        assert_eq!(D.apply(Head, Tail, false), (Head, Tail, false));
    }

    #[test]
    fn connected_pairs_do_not_refire_formation_rules() {
        assert_eq!(D.apply(Head, Free, true), (Head, Free, true));
        assert_eq!(D.apply(Leader, Free, true), (Leader, Free, true));
        assert_eq!(D.apply(Dismantler, Regular, false), (Dismantler, Regular, false));
    }
}
