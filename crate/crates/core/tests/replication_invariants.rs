//! Traced safety invariants of the strand self-replication protocol.
//!
//! The load-bearing claim is order preservation: at any instant, reading a
//! copy's already-settled bits, then the bits in transit on the copy (front
//! of the pipeline first), then the bits in transit on the source (head
//! side first) reproduces a prefix of the seed message. Everything else —
//! bridge uniqueness, the degree bound, final fidelity — rides along.

use popcon_core::engine::{
    apply_interaction, AgentId, Configuration, PairSampler, SchedulerRng,
};
use popcon_core::replication::{
    complete_copies, extract_strands, seed_strand, Buffer, ReplicationAgentState,
    ReplicationDelta, Role, StrandSpec,
};

type Config = Configuration<ReplicationAgentState>;

/// One strand, walked head to tail.
struct Walk {
    agents: Vec<AgentId>,
    bits: Vec<bool>,
}

fn walk_strands(config: &Config) -> Vec<Walk> {
    extract_strands(config)
        .into_iter()
        .map(|s| Walk {
            agents: s.agents,
            bits: s.bits,
        })
        .collect()
}

fn is_prefix(prefix: &[bool], of: &[bool]) -> bool {
    prefix.len() <= of.len() && prefix == &of[..prefix.len()]
}

/// Checks every safety invariant on one configuration snapshot.
fn check_invariants(config: &Config, seed_bits: &[bool]) {
    config.edges().check_consistency().unwrap();

    // degree bound: two strand edges plus one bridge
    for id in 0..config.n() as AgentId {
        assert!(
            config.edges().degree(id) <= 3,
            "agent {id} exceeds degree 3"
        );
    }

    let walks = walk_strands(config);

    // bits already settled on any strand are a prefix of the seed
    for w in &walks {
        assert!(
            is_prefix(&w.bits, seed_bits),
            "strand bits {:?} are not a prefix of the seed",
            w.bits
        );
    }

    // bridges: edges between two heads; each head is on at most one, the
    // source side carries head-bound buffers, the copy side tail-bound ones
    let mut bridges: Vec<(AgentId, AgentId)> = Vec::new();
    for (u, v) in config.edges().edges() {
        if config.state(u).role == Role::Head && config.state(v).role == Role::Head {
            let (bu, bv) = (config.state(u).buffer, config.state(v).buffer);
            let u_is_source = matches!(bu, Buffer::PhiH | Buffer::BitH { .. });
            let v_is_source = matches!(bv, Buffer::PhiH | Buffer::BitH { .. });
            assert!(
                u_is_source != v_is_source,
                "bridge {u}-{v} must have one source and one copy end, got {bu:?} / {bv:?}"
            );
            let (source, copy) = if u_is_source { (u, v) } else { (v, u) };
            assert!(
                !bridges.iter().any(|&(s, c)| s == source || c == copy),
                "head {source} or {copy} sits on two bridges"
            );
            bridges.push((source, copy));
        }
    }

    // order preservation across each bridge
    for (source, copy) in bridges {
        let src = walks
            .iter()
            .find(|w| w.agents.first() == Some(&source))
            .expect("source strand walk");
        let dst = walks
            .iter()
            .find(|w| w.agents.first() == Some(&copy))
            .expect("copy strand walk");

        let mut seq: Vec<bool> = dst.bits.clone();
        // transit on the copy, front of the pipeline (tail end) first
        for &id in dst.agents.iter().rev() {
            if let Buffer::BitT { bit, .. } = config.state(id).buffer {
                seq.push(bit);
            }
        }
        // transit on the source, head side first
        for &id in &src.agents {
            if let Buffer::BitH { bit, .. } = config.state(id).buffer {
                seq.push(bit);
            }
        }
        assert!(
            is_prefix(&seq, seed_bits),
            "settled + in-flight bits {seq:?} do not form a prefix of {seed_bits:?}"
        );
    }
}

fn seeded_config(n: usize, spec: &StrandSpec) -> Config {
    let mut config = Configuration::init(n, |_| ReplicationAgentState::free()).unwrap();
    seed_strand(&mut config, spec).unwrap();
    config
}

#[test]
fn invariants_hold_along_full_replication_runs() {
    let spec = StrandSpec::parse("1011001").unwrap();
    for seed in 0..6u64 {
        let mut config = seeded_config(48, &spec);
        let mut rng = SchedulerRng::new(seed);
        let sampler = PairSampler::new(48);
        let delta = ReplicationDelta;
        let mut done_at = None;
        for step in 0..6_000_000u64 {
            let pair = sampler.draw(&mut rng);
            apply_interaction(&mut config, pair, &delta);
            // checking every step is too slow; a coprime stride still sees
            // every phase of the pipeline across seeds
            if step % 7 == 0 {
                check_invariants(&config, spec.bits());
            }
            if done_at.is_none() && complete_copies(&config, spec.bits()) >= 2 {
                done_at = Some(step);
                break;
            }
        }
        assert!(done_at.is_some(), "seed {seed} never produced a copy");
        check_invariants(&config, spec.bits());
    }
}

#[test]
fn copies_are_bit_identical_even_for_uniform_messages() {
    // all-zeros and all-ones strands exercise the order argument least, but
    // the position fields hardest
    for bits in ["000", "1111", "010101010101"] {
        let spec = StrandSpec::parse(bits).unwrap();
        let mut config = seeded_config(64, &spec);
        let mut rng = SchedulerRng::new(9);
        let report = popcon_core::replication::run_replication(
            &mut config,
            spec.bits(),
            2,
            200_000_000,
            &mut rng,
        );
        assert!(report.success, "bits {bits}");
        check_invariants(&config, spec.bits());
    }
}

/// Forces the overlap the protocol allows: a copy starts replicating from
/// its head while its own tail is still under construction. The scheduler
/// is driven by hand to reach the overlap, then randomness finishes both
/// rounds; both outputs must match the seed.
#[test]
fn a_growing_copy_can_source_its_own_replication() {
    let spec = StrandSpec::parse("10110").unwrap();
    let k = spec.len();
    let mut config = seeded_config(24, &spec);
    let delta = ReplicationDelta;
    let source_head: AgentId = 0;
    let copy_head: AgentId = k as AgentId; // first free agent picked by R1

    // R1 bridges the source head to agent k.
    apply_interaction(&mut config, (source_head, copy_head), &delta);
    assert_eq!(config.state(copy_head).role, Role::Head);

    // Pump the pipeline deterministically until the copy head has handed on
    // the tail bit (it goes neutral) while psi-side construction is still
    // pending further down the copy.
    let mut rng = SchedulerRng::new(4242);
    let sampler = PairSampler::new(24);
    let mut overlap_reached = false;
    for _ in 0..2_000_000u64 {
        let pair = sampler.draw(&mut rng);
        apply_interaction(&mut config, pair, &delta);
        let head_neutral = config.state(copy_head).buffer == Buffer::Phi;
        let construction_pending = walk_strands(&config)
            .iter()
            .find(|w| w.agents.first() == Some(&copy_head))
            .map(|w| w.agents.len() < k)
            .unwrap_or(false);
        if head_neutral && construction_pending {
            overlap_reached = true;
            break;
        }
    }
    assert!(overlap_reached, "never saw a neutral copy head mid-construction");

    // Hand-fire the second-generation R1 from the still-growing copy.
    let second_head: AgentId = (0..24)
        .map(|i| i as AgentId)
        .find(|&i| config.state(i).role == Role::Free)
        .unwrap();
    let before = config.interactions();
    apply_interaction(&mut config, (copy_head, second_head), &delta);
    assert_eq!(config.interactions(), before + 1);
    assert_eq!(
        config.state(copy_head).buffer,
        Buffer::PhiH,
        "the growing copy is now also a source"
    );
    check_invariants(&config, spec.bits());

    // Let randomness finish both processes; three identical strands result.
    let mut steps = 0u64;
    while complete_copies(&config, spec.bits()) < 3 {
        let pair = sampler.draw(&mut rng);
        apply_interaction(&mut config, pair, &delta);
        if steps % 11 == 0 {
            check_invariants(&config, spec.bits());
        }
        steps += 1;
        assert!(steps < 20_000_000, "overlapped rounds failed to finish");
    }
    let strands = extract_strands(&config);
    assert_eq!(
        strands.iter().filter(|s| s.complete && s.bits == spec.bits()).count(),
        3
    );
}

#[test]
fn mid_run_snapshot_shows_original_complete_and_copy_partial() {
    let spec = StrandSpec::parse("10110010").unwrap();
    let mut config = seeded_config(40, &spec);
    let mut rng = SchedulerRng::new(5);
    let sampler = PairSampler::new(40);
    let delta = ReplicationDelta;
    // run until the copy exists but is not finished
    let mut paused = false;
    for _ in 0..10_000_000u64 {
        let pair = sampler.draw(&mut rng);
        apply_interaction(&mut config, pair, &delta);
        let strands = extract_strands(&config);
        if strands.len() == 2 && strands.iter().any(|s| !s.complete) {
            paused = true;
            break;
        }
    }
    assert!(paused);
    let strands = extract_strands(&config);
    let original = strands.iter().find(|s| s.complete).expect("original strand");
    assert_eq!(original.bits, spec.bits());
    assert!(strands.iter().any(|s| !s.complete), "partial copy visible");
}
