//! Random-scheduler simulation loop over a population of `n` agents with
//! per-pair edge flags.
//!
//! One step: the scheduler draws an ordered (initiator, responder) pair
//! uniformly from all `n(n-1)` ordered pairs, the transition delta maps the
//! triple (initiator state, responder state, edge flag) to its successor,
//! and the configuration absorbs the result. Agent identifiers exist only
//! in this observer frame; a [`TransitionDelta`] never sees them, which is
//! what keeps agents anonymous.

mod edges;
mod report;
mod rng;

pub use edges::EdgeSet;
pub use report::{StopReason, TrialReport};
pub use rng::{draw_pair, trial_seed, PairSampler, SchedulerRng, UniformIndex};

use thiserror::Error;

/// Observer-frame agent index in `[0, n)`.
pub type AgentId = u32;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EngineError {
    /// No pair can interact in a population of fewer than two agents.
    #[error("population size {0} is too small; at least 2 agents are required")]
    PopulationTooSmall(usize),
}

/// A pure transition function on (initiator, responder, edge flag) triples.
///
/// Implementations must be total: a triple matched by no rule maps to
/// itself. They must also be deterministic in their three inputs; all
/// randomness lives in the scheduler.
pub trait TransitionDelta {
    type State: Copy + PartialEq;

    fn apply(
        &self,
        initiator: Self::State,
        responder: Self::State,
        edge: bool,
    ) -> (Self::State, Self::State, bool);
}

/// Global simulation state: one state token per agent plus the edge set.
#[derive(Debug, Clone)]
pub struct Configuration<S> {
    states: Vec<S>,
    edges: EdgeSet,
    interactions: u64,
}

impl<S: Copy> Configuration<S> {
    /// Builds the initial configuration; agent `i` starts in `initial(i)`,
    /// no edges, interaction counter zero.
    pub fn init(n: usize, mut initial: impl FnMut(AgentId) -> S) -> Result<Self, EngineError> {
        if n < 2 {
            return Err(EngineError::PopulationTooSmall(n));
        }
        Ok(Self {
            states: (0..n).map(|i| initial(i as AgentId)).collect(),
            edges: EdgeSet::new(n),
            interactions: 0,
        })
    }

    pub fn n(&self) -> usize {
        self.states.len()
    }

    pub fn interactions(&self) -> u64 {
        self.interactions
    }

    pub fn state(&self, id: AgentId) -> S {
        self.states[id as usize]
    }

    pub fn states(&self) -> &[S] {
        &self.states
    }

    pub fn edges(&self) -> &EdgeSet {
        &self.edges
    }

    /// Parallel time elapsed so far, `interactions / n` exactly.
    pub fn parallel_time(&self) -> num_rational::Ratio<u64> {
        parallel_time(self.interactions, self.n())
    }

    /// Observer-side state override; used to seed structures and build test
    /// fixtures, never by transition deltas.
    pub fn set_state(&mut self, id: AgentId, state: S) {
        self.states[id as usize] = state;
    }

    /// Observer-side edge override; same caveat as [`Self::set_state`].
    pub fn set_edge(&mut self, u: AgentId, v: AgentId, present: bool) {
        self.edges.set(u, v, present);
    }
}

/// One applied interaction, with enough information to replay or undo it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InteractionRecord<S> {
    pub initiator: AgentId,
    pub responder: AgentId,
    /// (initiator state, responder state, edge flag) before the step.
    pub before: (S, S, bool),
    /// Same triple after the step.
    pub after: (S, S, bool),
    /// 1-based interaction ordinal.
    pub index: u64,
}

/// Applies `delta` to the drawn pair: reads the edge flag, rewrites the two
/// states and the flag, bumps the interaction counter.
#[inline]
pub fn apply_interaction<S: Copy + PartialEq, D: TransitionDelta<State = S>>(
    config: &mut Configuration<S>,
    pair: (AgentId, AgentId),
    delta: &D,
) -> InteractionRecord<S> {
    let (i, r) = pair;
    debug_assert_ne!(i, r);
    let si = config.states[i as usize];
    let sr = config.states[r as usize];
    let edge = config.edges.has(i, r);
    let (si2, sr2, edge2) = delta.apply(si, sr, edge);
    config.states[i as usize] = si2;
    config.states[r as usize] = sr2;
    if edge2 != edge {
        config.edges.set(i, r, edge2);
    }
    config.interactions += 1;
    InteractionRecord {
        initiator: i,
        responder: r,
        before: (si, sr, edge),
        after: (si2, sr2, edge2),
        index: config.interactions,
    }
}

/// Reverts the most recent interaction, given its record.
pub(crate) fn undo_interaction<S: Copy + PartialEq>(
    config: &mut Configuration<S>,
    rec: &InteractionRecord<S>,
) {
    let (si, sr, edge) = rec.before;
    config.states[rec.initiator as usize] = si;
    config.states[rec.responder as usize] = sr;
    if rec.after.2 != edge {
        config.edges.set(rec.initiator, rec.responder, edge);
    }
    config.interactions -= 1;
}

/// Run controls. `stride` is how often the stop predicate is evaluated; it
/// exists purely for performance and does not change the reported first-hold
/// interaction count: on a hit the engine rewinds the last window from its
/// ring buffer and replays it one interaction at a time to locate the exact
/// first index at which the predicate held. (For a predicate that can flip
/// back to false inside an all-false-checked window this locates the first
/// hold that persisted to a check boundary; every stop predicate shipped
/// here is monotone along a run, where the two notions coincide.)
#[derive(Debug, Clone, Copy)]
pub struct RunOptions {
    pub stride: u64,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { stride: 1 }
    }
}

/// Drives the scheduler until `stop(config)` holds or `budget` interactions
/// have been spent. Returns a report whose `interactions` field is the exact
/// count at which the predicate first held (on success) or the budget (on
/// exhaustion).
pub fn run<S, D>(
    protocol: &str,
    config: &mut Configuration<S>,
    delta: &D,
    mut stop: impl FnMut(&Configuration<S>) -> bool,
    budget: u64,
    rng: &mut SchedulerRng,
    options: RunOptions,
) -> TrialReport
where
    S: Copy + PartialEq,
    D: TransitionDelta<State = S>,
{
    let stride = options.stride.max(1);
    let seed = rng.seed();
    let n = config.n();
    let sampler = PairSampler::new(n);
    let mut window: Vec<InteractionRecord<S>> = Vec::with_capacity(stride as usize);

    if stop(config) {
        return TrialReport::finished(protocol, n, seed, config.interactions(), true);
    }

    let mut spent = 0u64;
    while spent < budget {
        let chunk = stride.min(budget - spent);
        window.clear();
        for _ in 0..chunk {
            let pair = sampler.draw(rng);
            window.push(apply_interaction(config, pair, delta));
        }
        spent += chunk;
        if stop(config) {
            // Rewind the window, then replay forward to the first hold.
            for rec in window.iter().rev() {
                undo_interaction(config, rec);
            }
            for rec in &window {
                apply_interaction(config, (rec.initiator, rec.responder), delta);
                if stop(config) {
                    return TrialReport::finished(
                        protocol,
                        n,
                        seed,
                        config.interactions(),
                        true,
                    );
                }
            }
            unreachable!("predicate held at the window end but not during replay");
        }
    }
    TrialReport::finished(protocol, n, seed, config.interactions(), false)
}

/// Continues an existing configuration for `extra` interactions with no stop
/// predicate. Used for stabilization checks that push past a first-hold.
pub fn run_extra<S, D>(
    config: &mut Configuration<S>,
    delta: &D,
    extra: u64,
    rng: &mut SchedulerRng,
) where
    S: Copy + PartialEq,
    D: TransitionDelta<State = S>,
{
    let sampler = PairSampler::new(config.n());
    for _ in 0..extra {
        let pair = sampler.draw(rng);
        apply_interaction(config, pair, delta);
    }
}

/// `interactions / n` as an exact rational. Requires `n >= 1`.
pub fn parallel_time(interactions: u64, n: usize) -> num_rational::Ratio<u64> {
    assert!(n >= 1, "parallel time needs a nonempty population");
    num_rational::Ratio::new(interactions, n as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;

    /// Toy delta: the single leader-election rule, used to exercise the
    /// loop without pulling the protocols module into engine tests.
    struct Duel;
    impl TransitionDelta for Duel {
        type State = bool; // true = leader
        fn apply(&self, a: bool, b: bool, e: bool) -> (bool, bool, bool) {
            if a && b {
                (true, false, e)
            } else {
                (a, b, e)
            }
        }
    }

    fn leaders(c: &Configuration<bool>) -> usize {
        c.states().iter().filter(|&&s| s).count()
    }

    #[test]
    fn init_rejects_single_agent() {
        assert_eq!(
            Configuration::<bool>::init(1, |_| true).unwrap_err(),
            EngineError::PopulationTooSmall(1)
        );
    }

    #[test]
    fn init_builds_requested_states() {
        let c = Configuration::init(5, |_| false).unwrap();
        assert_eq!(c.n(), 5);
        assert_eq!(c.interactions(), 0);
        assert!(c.edges().is_empty());
        assert!(c.states().iter().all(|&s| !s));
    }

    #[test]
    fn two_agent_duel_resolves_in_one_interaction() {
        let mut c = Configuration::init(2, |_| true).unwrap();
        let mut rng = SchedulerRng::new(11);
        let report = run(
            "duel",
            &mut c,
            &Duel,
            |c| leaders(c) == 1,
            1_000,
            &mut rng,
            RunOptions::default(),
        );
        assert!(report.success);
        assert_eq!(report.interactions, 1);
        assert_eq!(report.parallel_time(), Ratio::new(1, 2));
    }

    #[test]
    fn zero_budget_run_is_an_unsuccessful_empty_run() {
        let mut c = Configuration::init(4, |_| true).unwrap();
        let mut rng = SchedulerRng::new(5);
        let report = run(
            "duel",
            &mut c,
            &Duel,
            |c| leaders(c) == 1,
            0,
            &mut rng,
            RunOptions::default(),
        );
        assert!(!report.success);
        assert_eq!(report.interactions, 0);
        assert_eq!(report.stop_reason, StopReason::BudgetExhausted);
    }

    #[test]
    fn repeated_invocations_with_one_seed_agree() {
        let go = || {
            let mut c = Configuration::init(64, |_| true).unwrap();
            let mut rng = SchedulerRng::new(7);
            run(
                "duel",
                &mut c,
                &Duel,
                |c| leaders(c) == 1,
                10_000_000,
                &mut rng,
                RunOptions::default(),
            )
        };
        let a = go();
        let b = go();
        assert!(a.success);
        assert_eq!(a, b);
    }

    #[test]
    fn stride_does_not_change_the_reported_first_hold() {
        for stride in [1u64, 3, 17, 256, 4096] {
            let mut c = Configuration::init(48, |_| true).unwrap();
            let mut rng = SchedulerRng::new(99);
            let report = run(
                "duel",
                &mut c,
                &Duel,
                |c| leaders(c) == 1,
                10_000_000,
                &mut rng,
                RunOptions { stride },
            );
            assert!(report.success, "stride {stride}");
            let mut base = Configuration::init(48, |_| true).unwrap();
            let mut base_rng = SchedulerRng::new(99);
            let expected = run(
                "duel",
                &mut base,
                &Duel,
                |c| leaders(c) == 1,
                10_000_000,
                &mut base_rng,
                RunOptions::default(),
            );
            assert_eq!(report.interactions, expected.interactions, "stride {stride}");
            // After the rewind-replay the configuration sits exactly at the
            // first-hold state.
            assert_eq!(c.interactions(), report.interactions);
            assert_eq!(leaders(&c), 1);
        }
    }

    #[test]
    fn interaction_counter_counts_every_application() {
        let mut c = Configuration::init(3, |_| true).unwrap();
        let d = Duel;
        apply_interaction(&mut c, (0, 1), &d);
        apply_interaction(&mut c, (1, 2), &d);
        let rec = apply_interaction(&mut c, (2, 0), &d);
        assert_eq!(c.interactions(), 3);
        assert_eq!(rec.index, 3);
    }

    #[test]
    fn parallel_time_is_exact() {
        assert_eq!(parallel_time(0, 5), Ratio::new(0, 1));
        assert_eq!(parallel_time(7, 7), Ratio::new(1, 1));
        // round(3 n ln n) at n = 8 is 50; 50/8 reduces to 25/4.
        let t = (3.0 * 8.0 * (8.0f64).ln()).round() as u64;
        assert_eq!(t, 50);
        assert_eq!(parallel_time(t, 8), Ratio::new(25, 4));
    }
}
