//! Instrumented single-trial runners.
//!
//! Each runner drives the scheduler one interaction at a time and keeps its
//! event trackers up to date from the interaction record, in O(1) per step.
//! Milestone times (first single leader, first capped clock, line
//! completion) are therefore exact first-hold interaction counts.

use std::fmt::Write as _;

use popcon_core::bubble_sort::{self, SortReport};
use popcon_core::engine::{
    apply_interaction, run_extra, Configuration, InteractionRecord, PairSampler, SchedulerRng,
    TransitionDelta, TrialReport,
};
use popcon_core::protocols::{
    compose2, is_single_leader, is_spanning_line, ClockView, Compose2, LeaderClockDelta,
    LeaderClockState, LeaderElectionDelta, LeaderElectionState, LeaderView, LineState,
    LineView, MatchingClockDelta, MatchingClockState, PeriodicClockDelta, PeriodicClockState,
    PipelineDelta, PipelineState,
};
use popcon_core::replication::{
    self, complete_copies, extract_strands, seed_strand, Buffer, ReplicationAgentState,
    StrandSpec,
};
use rand::seq::SliceRandom;
use rand::Rng;

use crate::params::{DistKind, Params, Protocol};

/// Extra validation attached to acceptance-grade runs.
#[derive(Debug, Clone, Copy, Default)]
pub struct RunChecks {
    /// After a successful stop, keep running 10% longer and confirm the
    /// predicate still holds; records `overrun_held` in the summary.
    pub overrun: bool,
}

/// Drives `delta` until `observe` returns true (exact first hold) or the
/// budget is exhausted. `observe` sees each record right after it applies.
fn drive<S, D>(
    config: &mut Configuration<S>,
    delta: &D,
    rng: &mut SchedulerRng,
    budget: u64,
    mut observe: impl FnMut(&InteractionRecord<S>, &Configuration<S>) -> bool,
) -> bool
where
    S: Copy + PartialEq,
    D: TransitionDelta<State = S>,
{
    let sampler = PairSampler::new(config.n());
    for _ in 0..budget {
        let pair = sampler.draw(rng);
        let rec = apply_interaction(config, pair, delta);
        if observe(&rec, config) {
            return true;
        }
    }
    false
}

fn overrun_extra(interactions: u64) -> u64 {
    (interactions / 10).max(1)
}

/// Dispatches a single named-protocol trial.
pub fn run_one(
    protocol: Protocol,
    n: usize,
    seed: u64,
    params: &Params,
    checks: RunChecks,
) -> TrialReport {
    match protocol {
        Protocol::LeaderElection => run_leader_election(n, seed, params, checks),
        Protocol::MatchingClock => run_matching_clock(n, seed, params),
        Protocol::LeaderClock => run_leader_clock(n, seed, params),
        Protocol::PeriodicClock => run_periodic_clock(n, seed, params),
        Protocol::LinePipeline => run_pipeline(n, seed, params, checks),
    }
}

/// Slow leader election from the all-leaders configuration, stopping at the
/// exact interaction after which one leader remains.
pub fn run_leader_election(n: usize, seed: u64, params: &Params, checks: RunChecks) -> TrialReport {
    let delta = LeaderElectionDelta;
    let mut config = Configuration::init(n, |_| LeaderElectionState::Leader).unwrap();
    let mut rng = SchedulerRng::new(seed);
    let budget = params.budget(Protocol::LeaderElection, n);

    let mut leaders = n as i64;
    let done = drive(&mut config, &delta, &mut rng, budget, |rec, _| {
        leaders += leader_delta(rec);
        leaders == 1
    });
    let mut report = TrialReport::finished(
        Protocol::LeaderElection.name(),
        n,
        seed,
        config.interactions(),
        done,
    );
    if done && checks.overrun {
        run_extra(
            &mut config,
            &delta,
            overrun_extra(report.interactions),
            &mut rng,
        );
        report.note("overrun_held", is_single_leader(&config));
    }
    if !done {
        report.note("leaders_left", leaders);
    }
    report
}

fn leader_delta<S: LeaderView + Copy>(rec: &InteractionRecord<S>) -> i64 {
    let mut d = 0i64;
    d += rec.after.0.is_leader() as i64 - rec.before.0.is_leader() as i64;
    d += rec.after.1.is_leader() as i64 - rec.before.1.is_leader() as i64;
    d
}

fn capped_now<S: ClockView + Copy>(rec: &InteractionRecord<S>, max_level: u16) -> bool {
    rec.after.0.clock_capped(max_level) || rec.after.1.clock_capped(max_level)
}

/// Matching-based clock from the all-`<start>` configuration, stopping the
/// first time any agent holds `Level(max)` or `End`.
pub fn run_matching_clock(n: usize, seed: u64, params: &Params) -> TrialReport {
    let delta = MatchingClockDelta::new(params.clock());
    let mut config = Configuration::init(n, |_| MatchingClockState::Start).unwrap();
    let mut rng = SchedulerRng::new(seed);
    let budget = params.budget(Protocol::MatchingClock, n);
    let max = params.max_level;

    let done = drive(&mut config, &delta, &mut rng, budget, |rec, _| {
        capped_now(rec, max)
    });
    let mut report = TrialReport::finished(
        Protocol::MatchingClock.name(),
        n,
        seed,
        config.interactions(),
        done,
    );
    if !done {
        report.note("final_summary", summarize_matching(&config));
    }
    report
}

fn summarize_matching(config: &Configuration<MatchingClockState>) -> String {
    let mut start = 0usize;
    let mut end = 0usize;
    let mut min_level = u16::MAX;
    let mut max_level = 0u16;
    for s in config.states() {
        match s {
            MatchingClockState::Start => start += 1,
            MatchingClockState::End => end += 1,
            MatchingClockState::Level(i) => {
                min_level = min_level.min(*i);
                max_level = max_level.max(*i);
            }
        }
    }
    format!("start={start} end={end} levels={min_level}..={max_level}")
}

/// Leader-based clock with agent 0 as the designated leader, stopping at
/// the first capped follower.
pub fn run_leader_clock(n: usize, seed: u64, params: &Params) -> TrialReport {
    let delta = LeaderClockDelta {
        max_level: params.max_level,
    };
    let mut config = Configuration::init(n, |i| {
        if i == 0 {
            LeaderClockState::leader()
        } else {
            LeaderClockState::follower()
        }
    })
    .unwrap();
    let mut rng = SchedulerRng::new(seed);
    let budget = params.budget(Protocol::LeaderClock, n);
    let max = params.max_level;

    let done = drive(&mut config, &delta, &mut rng, budget, |rec, _| {
        capped_now(rec, max)
    });
    TrialReport::finished(
        Protocol::LeaderClock.name(),
        n,
        seed,
        config.interactions(),
        done,
    )
}

/// Periodic leader-based clock, stopping when the third stage concludes,
/// i.e. when the round-closing announcement (for stage 0) first circulates.
pub fn run_periodic_clock(n: usize, seed: u64, params: &Params) -> TrialReport {
    let delta = PeriodicClockDelta {
        max_level: params.max_level,
    };
    let mut config = Configuration::init(n, |i| {
        if i == 0 {
            PeriodicClockState::leader()
        } else {
            PeriodicClockState::follower()
        }
    })
    .unwrap();
    let mut rng = SchedulerRng::new(seed);
    let budget = params.budget(Protocol::PeriodicClock, n);

    let mut stage1_at = 0u64;
    let mut stage2_at = 0u64;
    let done = drive(&mut config, &delta, &mut rng, budget, |rec, _| {
        let announced = |s: &PeriodicClockState, stage| s.announce == Some(stage);
        let a = &rec.after;
        if stage1_at == 0 && (announced(&a.0, 1) || announced(&a.1, 1)) {
            stage1_at = rec.index;
        }
        if stage2_at == 0 && (announced(&a.0, 2) || announced(&a.1, 2)) {
            stage2_at = rec.index;
        }
        announced(&a.0, 0) || announced(&a.1, 0)
    });
    let mut report = TrialReport::finished(
        Protocol::PeriodicClock.name(),
        n,
        seed,
        config.interactions(),
        done,
    );
    report.note("stage1_announced_at", stage1_at);
    report.note("stage2_announced_at", stage2_at);
    report
}

/// Leader election composed with the matching clock (the clock owns the
/// edge). Stops when the clock caps; reports whether election had already
/// finished, which is the confirmation-ordering check. The clock layer's
/// trajectory is bit-identical to the standalone matching clock under the
/// same seed.
pub fn run_le_matching(n: usize, seed: u64, params: &Params) -> TrialReport {
    type S = (LeaderElectionState, MatchingClockState);
    let delta: Compose2<LeaderElectionDelta, MatchingClockDelta> = compose2(
        LeaderElectionDelta,
        MatchingClockDelta::new(params.clock()),
        1,
    )
    .unwrap();
    let mut config: Configuration<S> =
        Configuration::init(n, |_| (LeaderElectionState::Leader, MatchingClockState::Start))
            .unwrap();
    let mut rng = SchedulerRng::new(seed);
    let budget = params.budget(Protocol::MatchingClock, n);
    let max = params.max_level;

    let mut leaders = n as i64;
    let mut single_leader_at = 0u64;
    let done = drive(&mut config, &delta, &mut rng, budget, |rec, _| {
        leaders += {
            let mut d = 0i64;
            d += rec.after.0 .0.is_leader() as i64 - rec.before.0 .0.is_leader() as i64;
            d += rec.after.1 .0.is_leader() as i64 - rec.before.1 .0.is_leader() as i64;
            d
        };
        if single_leader_at == 0 && leaders == 1 {
            single_leader_at = rec.index;
        }
        rec.after.0 .1.clock_capped(max) || rec.after.1 .1.clock_capped(max)
    });

    let mut report = TrialReport::finished("leader-election+matching-clock", n, seed,
        config.interactions(), done);
    report.note("single_leader_at", single_leader_at);
    report.note("clock_max_at", if done { config.interactions() } else { 0 });
    report.note(
        "ordering_ok",
        done && single_leader_at > 0 && single_leader_at < config.interactions(),
    );
    report
}

/// Full spanning-line pipeline from the predefined initial configuration.
/// Stops at the exact interaction after which the configuration is a
/// spanning line; milestone interaction counts land in the summary.
pub fn run_pipeline(n: usize, seed: u64, params: &Params, checks: RunChecks) -> TrialReport {
    let delta = PipelineDelta::new(params.clock());
    let mut config = Configuration::init(n, |_| PipelineState::initial()).unwrap();
    let mut rng = SchedulerRng::new(seed);
    run_pipeline_from(
        Protocol::LinePipeline.name(),
        &mut config,
        &delta,
        &mut rng,
        params.budget(Protocol::LinePipeline, n),
        params.max_level,
        checks,
    )
}

/// A handcrafted starting configuration for backup-rule robustness runs.
pub struct PipelineFixture {
    pub config: Configuration<PipelineState>,
    pub label: String,
}

/// Runs the pipeline delta from an arbitrary (possibly adversarial)
/// configuration until a spanning line forms.
pub fn run_pipeline_fixture(
    fixture: PipelineFixture,
    seed: u64,
    params: &Params,
    checks: RunChecks,
) -> TrialReport {
    let PipelineFixture { mut config, label } = fixture;
    let delta = PipelineDelta::new(params.clock());
    let mut rng = SchedulerRng::new(seed);
    let n = config.n();
    let mut report = run_pipeline_from(
        "line-pipeline-fixture",
        &mut config,
        &delta,
        &mut rng,
        params.budget(Protocol::LinePipeline, n),
        params.max_level,
        checks,
    );
    report.note("fixture", label);
    report
}

fn run_pipeline_from(
    name: &str,
    config: &mut Configuration<PipelineState>,
    delta: &PipelineDelta,
    rng: &mut SchedulerRng,
    budget: u64,
    max_level: u16,
    checks: RunChecks,
) -> TrialReport {
    let n = config.n();
    let seed = rng.seed();

    // Incremental counters for the spanning-line shape. Line edges are only
    // ever created fresh at a free agent, so (#H, #T, #R, #edges) hitting
    // (1, 1, n-2, n-1) pins the structure up to the structural walk that
    // confirms it below.
    let mut heads = 0i64;
    let mut tails = 0i64;
    let mut regulars = 0i64;
    let mut single_leader_at = 0u64;
    let mut clock_max_at = 0u64;
    for s in config.states() {
        heads += (s.line_state() == Some(LineState::Head)) as i64;
        tails += (s.line_state() == Some(LineState::Tail)) as i64;
        regulars += (s.line_state() == Some(LineState::Regular)) as i64;
    }
    let mut leaders = config.states().iter().filter(|s| s.is_leader()).count() as i64;
    if popcon_core::protocols::clock_max_reached(config, max_level) {
        clock_max_at = config.interactions().max(1);
    }

    let done = drive(config, delta, rng, budget, |rec, c| {
        leaders += leader_delta(rec);
        if single_leader_at == 0 && leaders == 1 {
            single_leader_at = rec.index;
        }
        if clock_max_at == 0 && capped_now(rec, max_level) {
            clock_max_at = rec.index;
        }
        for (before, after) in [
            (rec.before.0.line_state(), rec.after.0.line_state()),
            (rec.before.1.line_state(), rec.after.1.line_state()),
        ] {
            if before != after {
                role_delta(&mut heads, &mut tails, &mut regulars, before, -1);
                role_delta(&mut heads, &mut tails, &mut regulars, after, 1);
            }
        }
        heads == 1
            && tails == 1
            && regulars == n as i64 - 2
            && c.edges().len() == n - 1
            && is_spanning_line(c)
    });

    let mut report = TrialReport::finished(name, n, seed, config.interactions(), done);
    report.note("single_leader_at", single_leader_at);
    report.note("clock_max_at", clock_max_at);
    if done && clock_max_at > 0 {
        let post = (report.interactions - clock_max_at) as f64 / n as f64;
        let mut v = String::new();
        let _ = write!(v, "{post:.4}");
        report.note("post_clock_parallel_time", v);
    }
    if done && checks.overrun {
        run_extra(config, delta, overrun_extra(report.interactions), rng);
        report.note("overrun_held", is_spanning_line(config));
    }
    if !done {
        report.note(
            "final_summary",
            format!("heads={heads} tails={tails} regulars={regulars} edges={}", config.edges().len()),
        );
    }
    report
}

fn role_delta(
    heads: &mut i64,
    tails: &mut i64,
    regulars: &mut i64,
    role: Option<LineState>,
    sign: i64,
) {
    match role {
        Some(LineState::Head) => *heads += sign,
        Some(LineState::Tail) => *tails += sign,
        Some(LineState::Regular) => *regulars += sign,
        _ => {}
    }
}

/// One strand-replication trial: seeds a k-bit strand (given or generated
/// per trial), runs to `copies` complete seed-identical strands.
pub fn run_replication_trial(
    n: usize,
    k: usize,
    seed: u64,
    params: &Params,
    checks: RunChecks,
) -> TrialReport {
    let bits: Vec<bool> = match &params.bits {
        Some(s) => StrandSpec::parse(s).expect("validated upstream").bits().to_vec(),
        None => {
            let mut gen = SchedulerRng::new(seed ^ 0x5eed_b175);
            (0..k).map(|_| gen.gen_bool(0.5)).collect()
        }
    };
    let spec = StrandSpec::new(bits).expect("k >= 3");
    let mut config = Configuration::init(n, |_| ReplicationAgentState::free()).unwrap();
    seed_strand(&mut config, &spec).expect("population sized for the strand");
    let mut rng = SchedulerRng::new(seed);
    let budget = params.replication_budget(n, spec.len());

    let mut report = replication::run_replication(
        &mut config,
        spec.bits(),
        params.copies,
        budget,
        &mut rng,
    );
    if report.success {
        // Construction-side buffers must be gone from every complete strand:
        // tail-side neutrality is restored strand by strand, and anything
        // non-neutral left on a complete strand is it acting as a source.
        let clean = extract_strands(&config)
            .iter()
            .filter(|s| s.complete)
            .all(|s| {
                s.agents.iter().all(|&id| {
                    matches!(
                        config.state(id).buffer,
                        Buffer::Phi | Buffer::PhiH | Buffer::BitH { .. }
                    )
                })
            });
        report.note("complete_strands_quiescent", clean);
        if checks.overrun {
            run_extra(
                &mut config,
                &replication::ReplicationDelta,
                overrun_extra(report.interactions),
                &mut rng,
            );
            report.note(
                "overrun_held",
                complete_copies(&config, spec.bits()) >= params.copies,
            );
        }
    }
    report
}

/// One probabilistic bubble-sort trial on a seeded random input.
pub fn run_sort_trial(n: usize, seed: u64, dist: DistKind, params: &Params) -> TrialReport {
    let mut rng = SchedulerRng::new(seed);
    let mut values: Vec<i64> = match dist {
        DistKind::ZeroOne => (0..n).map(|_| rng.gen_range(0..2)).collect(),
        DistKind::Uniform => (0..n).map(|_| rng.gen_range(0..1_000_000)).collect(),
        DistKind::Permutation => {
            let mut v: Vec<i64> = (0..n as i64).collect();
            v.shuffle(&mut rng);
            v
        }
    };
    let budget = params.sort_budget(n);
    let SortReport {
        comparisons,
        sorted,
        swaps,
        bound,
        within_bound,
    } = bubble_sort::prob_bubble_sort(&mut values, params.eta, &mut rng, budget);

    let mut report = TrialReport::finished("sort", n, seed, comparisons, sorted);
    report.note("dist", dist);
    report.note("bound", bound);
    report.note("within_bound", within_bound);
    report.note("swaps", swaps);
    report
}
