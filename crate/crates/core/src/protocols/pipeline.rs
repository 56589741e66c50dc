//! The full spanning-line pipeline: slow leader election and the matching
//! clock run simultaneously from the all-leaders/all-start configuration;
//! the first agent to cap its clock starts a one-way confirmation epidemic;
//! confirmed agents switch on the edge-less leader clock and the line
//! formation layer, where the confirmed unique leader plays the `L` role.
//!
//! Edge ownership: the matching clock owns the flag until both agents of a
//! pair are line-active, then line formation owns it. The clock
//! self-disconnects on exit to `<end>`, so by the time the line layer is
//! live the matching edges are draining away on their own.

use crate::engine::TransitionDelta;

use super::{
    ClockParams, ClockView, LeaderClockDelta, LeaderClockState, LeaderElectionDelta,
    LeaderElectionState, LeaderView, LineFormationDelta, LineState, LineView, MatchingClockDelta,
    MatchingClockState,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PipelineState {
    pub le: LeaderElectionState,
    pub clock: MatchingClockState,
    /// One-way epidemic flag announcing that some clock reached the cap,
    /// confirming leader election.
    pub confirmed: bool,
    /// Leader-based clock counter; switched on when this agent's matching
    /// clock caps. The reference leader is the agent whose `le` is `Leader`.
    pub lclock: Option<u16>,
    /// Line-formation role; assigned when the agent becomes confirmed.
    pub line: Option<LineState>,
}

impl PipelineState {
    /// Predefined initial state: leader candidate, clock at `<start>`.
    pub fn initial() -> Self {
        Self {
            le: LeaderElectionState::Leader,
            clock: MatchingClockState::Start,
            confirmed: false,
            lclock: None,
            line: None,
        }
    }
}

impl LeaderView for PipelineState {
    fn is_leader(&self) -> bool {
        self.le.is_leader()
    }
}

impl ClockView for PipelineState {
    fn clock_capped(&self, max_level: u16) -> bool {
        self.clock.clock_capped(max_level)
    }
}

impl LineView for PipelineState {
    fn line_state(&self) -> Option<LineState> {
        self.line
    }
}

#[derive(Debug, Clone, Copy)]
pub struct PipelineDelta {
    le: LeaderElectionDelta,
    clock: MatchingClockDelta,
    lclock: LeaderClockDelta,
    line: LineFormationDelta,
    max_level: u16,
}

impl PipelineDelta {
    pub fn new(params: ClockParams) -> Self {
        Self {
            le: LeaderElectionDelta,
            clock: MatchingClockDelta::new(params),
            lclock: LeaderClockDelta {
                max_level: params.max_level,
            },
            line: LineFormationDelta,
            max_level: params.max_level,
        }
    }
}

impl TransitionDelta for PipelineDelta {
    type State = PipelineState;

    fn apply(
        &self,
        a: PipelineState,
        b: PipelineState,
        edge: bool,
    ) -> (PipelineState, PipelineState, bool) {
        // Independent layers, each reading the shared pre-interaction flag.
        let (le_a, le_b, _) = self.le.apply(a.le, b.le, edge);
        let (ck_a, ck_b, clock_edge) = self.clock.apply(a.clock, b.clock, edge);

        let line_live = a.line.is_some() && b.line.is_some();
        let (ln_a, ln_b, line_edge) = if line_live {
            let (x, y, e) = self.line.apply(a.line.unwrap(), b.line.unwrap(), edge);
            (Some(x), Some(y), e)
        } else {
            (a.line, b.line, edge)
        };

        // Leader clock over the pre-interaction leader marker.
        let (lc_a, lc_b) = match (a.lclock, b.lclock) {
            (Some(la), Some(lb)) => {
                let sa = LeaderClockState {
                    is_leader: a.le.is_leader(),
                    level: la,
                };
                let sb = LeaderClockState {
                    is_leader: b.le.is_leader(),
                    level: lb,
                };
                let (sa2, sb2, _) = self.lclock.apply(sa, sb, edge);
                (Some(sa2.level), Some(sb2.level))
            }
            other => other,
        };

        // Cross-layer triggers, from the post-interaction clock fields:
        // capping the matching clock confirms leader election and starts the
        // leader clock; confirmation spreads one-way on any interaction.
        let capped_a = ck_a.clock_capped(self.max_level);
        let capped_b = ck_b.clock_capped(self.max_level);
        let conf_a = a.confirmed || capped_a || b.confirmed;
        let conf_b = b.confirmed || capped_b || a.confirmed;
        let lc_a = if capped_a { lc_a.or(Some(0)) } else { lc_a };
        let lc_b = if capped_b { lc_b.or(Some(0)) } else { lc_b };

        // The confirmation also carries the clock's conclusion: a confirmed
        // agent still counting lifts its counter to the cap, so its pair can
        // take the ordinary conclude-and-disconnect exit instead of waiting
        // out the regression-prone late-phase epidemic. Matched pairs drain
        // to <end> within a coupon-collection span and line formation is
        // never starved of free agents.
        let lift = |clock: MatchingClockState, confirmed: bool| match clock {
            MatchingClockState::Level(i) if confirmed && i < self.max_level => {
                MatchingClockState::Level(self.max_level)
            }
            other => other,
        };
        let ck_a = lift(ck_a, conf_a);
        let ck_b = lift(ck_b, conf_b);

        // A confirmed agent joins line formation once its own clock has
        // exited to <end>. A counting agent (Level) is exactly an agent
        // still holding a matching edge, so gating on End keeps matching
        // edges and line edges on disjoint pairs: line members are all End,
        // the clock has no rule on (End, End, 1), and every flag the line
        // layer sees on a live pair is one of its own edges.
        let join = |role: Option<LineState>, confirmed: bool, clock: MatchingClockState, le: LeaderElectionState| {
            match (role, confirmed, clock) {
                (None, true, MatchingClockState::End) => Some(if le.is_leader() {
                    LineState::Leader
                } else {
                    LineState::Free
                }),
                (role, _, _) => role,
            }
        };
        let ln_a = join(ln_a, conf_a, ck_a, le_a);
        let ln_b = join(ln_b, conf_b, ck_b, le_b);

        let edge2 = if line_live { line_edge } else { clock_edge };
        (
            PipelineState {
                le: le_a,
                clock: ck_a,
                confirmed: conf_a,
                lclock: lc_a,
                line: ln_a,
            },
            PipelineState {
                le: le_b,
                clock: ck_b,
                confirmed: conf_b,
                lclock: lc_b,
                line: ln_b,
            },
            edge2,
        )
    }
}
