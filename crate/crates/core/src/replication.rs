//! Strand self-replication.
//!
//! A strand is a path of agents H–R–...–R–T collectively storing a k-bit
//! message, one bit per agent, with each agent's position stored mod 3 so
//! neighbors can tell the head direction from the tail direction. A neutral
//! head that meets a free agent bridges to it and turns it into the head of
//! a copy; the source strand then pipelines its bits head-ward, across the
//! bridge, and down the growing copy, which extends itself one free agent
//! at a time until the tail bit crowns its last agent. Transferring the
//! tail bit also removes the bridge and leaves the source neutral, ready to
//! replicate again — so copies multiply greedily with no coordinator.
//!
//! Buffer values namespace the two directions: `PhiH`/`BitH` only ever
//! appear on a strand acting as a source, `Psi`/`PsiT`/`PsiN`/`BitT` only
//! on a strand under construction, and the two rule families share nothing.
//!
//! Every rule fires on whichever orientation of the drawn pair matches its
//! pattern, with the written role assignment kept; the scheduler's
//! initiator/responder order is independent of strand orientation.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::engine::{
    AgentId, Configuration, InteractionRecord, PairSampler, SchedulerRng, TransitionDelta,
    TrialReport,
};

/// Strand membership role.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    Head,
    Tail,
    Regular,
    Free,
}

/// One stored message bit together with its strand position mod 3.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BitSlot {
    pub bit: bool,
    /// Position along the strand, counted from the head's 0, mod 3.
    pub pos: u8,
}

#[inline]
fn next_pos(pos: u8) -> u8 {
    (pos + 1) % 3
}

#[inline]
fn prev_pos(pos: u8) -> u8 {
    (pos + 2) % 3
}

/// Buffer contents: one pending bit or control message.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Buffer {
    /// Neutral; nothing pending.
    Phi,
    /// Source side: empty, pulling bits toward the head.
    PhiH,
    /// Source side: a bit in transit toward the head. `is_tail` marks the
    /// strand's final bit, whose transfer closes the round.
    BitH { bit: bool, is_tail: bool },
    /// Construction side: awaiting instructions at the growth end.
    Psi,
    /// Construction side: empty, accepting bits moving toward the tail end.
    PsiT,
    /// Construction side: extension requested at the growth end.
    PsiN,
    /// Construction side: a bit in transit toward the tail end.
    BitT { bit: bool, is_tail: bool },
}

/// Full per-agent state: role, optional stored bit, buffer. A free agent is
/// `(Free, None, Phi)`; a newly attached agent awaiting its bit is
/// `(Regular, None, Psi)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ReplicationAgentState {
    pub role: Role,
    pub slot: Option<BitSlot>,
    pub buffer: Buffer,
}

impl ReplicationAgentState {
    pub fn free() -> Self {
        Self {
            role: Role::Free,
            slot: None,
            buffer: Buffer::Phi,
        }
    }

    fn is_free(&self) -> bool {
        self.role == Role::Free
    }
}

/// The twelve replication rules.
#[derive(Debug, Clone, Copy, Default)]
pub struct ReplicationDelta;

type Rep = ReplicationAgentState;

impl ReplicationDelta {
    /// Tries the rule set on one orientation of the pair.
    fn rule(x: Rep, y: Rep, edge: bool) -> Option<(Rep, Rep, bool)> {
        use Buffer::*;
        use Role::*;

        let xs = x.slot;
        let ys = y.slot;
        // Position relations resolve "toward the head" vs "toward the tail":
        // y is one step closer to the head iff y.pos == x.pos - 1 (mod 3).
        let y_headward = matches!((xs, ys), (Some(a), Some(b)) if b.pos == prev_pos(a.pos));
        let y_tailward = matches!((xs, ys), (Some(a), Some(b)) if b.pos == next_pos(a.pos));
        let bridge = x.role == Head && y.role == Head;

        match (x.role, x.buffer, y.role, y.buffer, edge) {
            // R1: a neutral head bridges to a free agent, which becomes the
            // copy's head carrying a copy of bit 0.
            (Head, Phi, Free, _, false) if xs.is_some() && xs.unwrap().pos == 0 => Some((
                Rep { buffer: PhiH, ..x },
                Rep {
                    role: Head,
                    slot: xs,
                    buffer: Psi,
                },
                true,
            )),

            // R2: a neutral agent next to a head-ward PhiH neighbor loads its
            // own bit into its buffer (tail bits marked).
            (Regular | Tail, Phi, Regular | Head, PhiH, true) if y_headward => Some((
                Rep {
                    buffer: BitH {
                        bit: xs.unwrap().bit,
                        is_tail: x.role == Tail,
                    },
                    ..x
                },
                y,
                true,
            )),

            // R3: a non-tail bit moves one step toward the head; the sender
            // keeps pulling.
            (Regular, BitH { bit, is_tail: false }, Regular | Head, PhiH, true) if y_headward => {
                Some((
                    Rep { buffer: PhiH, ..x },
                    Rep {
                        buffer: BitH {
                            bit,
                            is_tail: false,
                        },
                        ..y
                    },
                    true,
                ))
            }

            // R4: the tail bit moves one step toward the head and restores
            // the sender to neutral.
            (Tail | Regular, BitH { bit, is_tail: true }, Regular | Head, PhiH, true)
                if y_headward =>
            {
                Some((
                    Rep { buffer: Phi, ..x },
                    Rep {
                        buffer: BitH { bit, is_tail: true },
                        ..y
                    },
                    true,
                ))
            }

            // R5: a non-tail bit crosses the bridge into the copy's head.
            (Head, BitH { bit, is_tail: false }, Head, PsiT, true) if bridge => Some((
                Rep { buffer: PhiH, ..x },
                Rep {
                    buffer: BitT {
                        bit,
                        is_tail: false,
                    },
                    ..y
                },
                true,
            )),

            // R6: the tail bit crosses the bridge, the bridge is removed, and
            // the source strand is neutral again.
            (Head, BitH { bit, is_tail: true }, Head, PsiT, true) if bridge => Some((
                Rep { buffer: Phi, ..x },
                Rep {
                    buffer: BitT { bit, is_tail: true },
                    ..y
                },
                false,
            )),

            // R7: a non-tail bit moves one step toward the tail end.
            (Head | Regular, BitT { bit, is_tail: false }, Regular, PsiT, true) if y_tailward => {
                Some((
                    Rep { buffer: PsiT, ..x },
                    Rep {
                        buffer: BitT {
                            bit,
                            is_tail: false,
                        },
                        ..y
                    },
                    true,
                ))
            }

            // R8: the tail bit moves one step toward the tail end, restoring
            // the sender to neutral.
            (Head | Regular, BitT { bit, is_tail: true }, Regular, PsiT, true) if y_tailward => {
                Some((
                    Rep { buffer: Phi, ..x },
                    Rep {
                        buffer: BitT { bit, is_tail: true },
                        ..y
                    },
                    true,
                ))
            }

            // R9: a bit knocking behind the filled growth end requests an
            // extension. (Fires for head or regular senders and for the tail
            // bit as well: the final extension is always requested by the
            // tail bit, and the first by the head.)
            (Head | Regular, BitT { .. }, Regular, Psi, true) if ys.is_some() && y_tailward => {
                Some((x, Rep { buffer: PsiN, ..y }, true))
            }

            // R9, head side: a head-bound bit waiting at the source head
            // while the copy's head still awaits instructions.
            (Head, BitH { is_tail: false, .. }, Head, Psi, true) if bridge => {
                Some((x, Rep { buffer: PsiN, ..y }, true))
            }

            // R10: the growth end attaches a free agent, which awaits its bit.
            (Head | Regular, PsiN, Free, _, false) if xs.is_some() => Some((
                Rep { buffer: PsiT, ..x },
                Rep {
                    role: Regular,
                    slot: None,
                    buffer: Psi,
                },
                true,
            )),

            // R11: a non-tail bit settles into the newly attached agent.
            (Head | Regular, BitT { bit, is_tail: false }, Regular, Psi, true) if ys.is_none() => {
                Some((
                    Rep { buffer: PsiT, ..x },
                    Rep {
                        role: Regular,
                        slot: Some(BitSlot {
                            bit,
                            pos: next_pos(xs.unwrap().pos),
                        }),
                        buffer: Psi,
                    },
                    true,
                ))
            }

            // R12: the tail bit settles, crowning the agent as the copy's
            // tail and restoring neutrality at both ends.
            (Regular, BitT { bit, is_tail: true }, Regular, Psi, true) if ys.is_none() => Some((
                Rep { buffer: Phi, ..x },
                Rep {
                    role: Tail,
                    slot: Some(BitSlot {
                        bit,
                        pos: next_pos(xs.unwrap().pos),
                    }),
                    buffer: Phi,
                },
                true,
            )),

            _ => None,
        }
    }
}

impl TransitionDelta for ReplicationDelta {
    type State = ReplicationAgentState;

    #[inline]
    fn apply(&self, a: Rep, b: Rep, edge: bool) -> (Rep, Rep, bool) {
        if let Some(hit) = Self::rule(a, b, edge) {
            return hit;
        }
        if let Some((y2, x2, e2)) = Self::rule(b, a, edge) {
            return (x2, y2, e2);
        }
        (a, b, edge)
    }
}

/// A k-bit message to lay out on a strand; k >= 3.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrandSpec {
    bits: Vec<bool>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StrandError {
    #[error("strands need at least 3 bits, got {0}")]
    TooShort(usize),
    #[error("need {needed} free agents, only {available} available")]
    InsufficientFreeAgents { needed: usize, available: usize },
    #[error("strand bits must be given as a 0/1 string, got `{0}`")]
    BadBitString(String),
}

impl StrandSpec {
    pub fn new(bits: Vec<bool>) -> Result<Self, StrandError> {
        if bits.len() < 3 {
            return Err(StrandError::TooShort(bits.len()));
        }
        Ok(Self { bits })
    }

    pub fn parse(s: &str) -> Result<Self, StrandError> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(StrandError::BadBitString(s.to_string())),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(bits)
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }
}

/// Lays the spec out on the lowest-indexed free agents as a connected path
/// H–R–...–R–T with positions 0,1,2,0,... and all buffers neutral. Returns
/// the head's id (an observer-side handle only).
pub fn seed_strand(
    config: &mut Configuration<ReplicationAgentState>,
    spec: &StrandSpec,
) -> Result<AgentId, StrandError> {
    let k = spec.len();
    let free: Vec<AgentId> = (0..config.n() as AgentId)
        .filter(|&id| config.state(id).is_free())
        .take(k)
        .collect();
    if free.len() < k {
        return Err(StrandError::InsufficientFreeAgents {
            needed: k,
            available: free.len(),
        });
    }
    for (j, (&id, &bit)) in free.iter().zip(spec.bits()).enumerate() {
        let role = if j == 0 {
            Role::Head
        } else if j == k - 1 {
            Role::Tail
        } else {
            Role::Regular
        };
        config.set_state(
            id,
            ReplicationAgentState {
                role,
                slot: Some(BitSlot {
                    bit,
                    pos: (j % 3) as u8,
                }),
                buffer: Buffer::Phi,
            },
        );
        if j > 0 {
            config.set_edge(free[j - 1], id, true);
        }
    }
    Ok(free[0])
}

/// Observer-side readout of one maximal strand.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrandReadout {
    /// Head-to-tail bit sequence of the slotted agents reached.
    pub bits: Vec<bool>,
    /// Walked head-to-tail through consistent positions and ended on a tail.
    pub complete: bool,
    /// Every buffer along the walk is neutral.
    pub neutral: bool,
    /// Agents visited, head first.
    pub agents: Vec<AgentId>,
}

/// Walks each maximal strand from its head end: the successor of an agent
/// is its neighbor one position ahead mod 3 (bridges connect two heads at
/// equal positions, so they are never followed), or the unique slotless
/// agent parked at the growth end. Malformed leftovers come back with
/// `complete = false`.
pub fn extract_strands(config: &Configuration<ReplicationAgentState>) -> Vec<StrandReadout> {
    let n = config.n() as AgentId;
    let mut visited = vec![false; n as usize];
    let mut out = Vec::new();

    for head in 0..n {
        let s = config.state(head);
        if s.role != Role::Head || visited[head as usize] {
            continue;
        }
        let mut agents = vec![head];
        let mut bits = vec![];
        let mut neutral = s.buffer == Buffer::Phi;
        let complete;
        let mut saw_unset = false;
        let mut cur = head;
        let mut cur_slot = s.slot;
        visited[head as usize] = true;
        if let Some(slot) = s.slot {
            bits.push(slot.bit);
        }
        loop {
            let next = config.edges().neighbors(cur).iter().copied().find(|&v| {
                if visited[v as usize] {
                    return false;
                }
                let vs = config.state(v);
                match (cur_slot, vs.slot) {
                    (Some(a), Some(b)) => b.pos == next_pos(a.pos),
                    (Some(_), None) => vs.role == Role::Regular,
                    _ => false,
                }
            });
            let Some(v) = next else {
                complete = config.state(cur).role == Role::Tail && !saw_unset;
                break;
            };
            visited[v as usize] = true;
            agents.push(v);
            let vs = config.state(v);
            neutral &= vs.buffer == Buffer::Phi;
            match vs.slot {
                Some(slot) => bits.push(slot.bit),
                None => saw_unset = true,
            }
            cur = v;
            cur_slot = vs.slot;
        }
        out.push(StrandReadout {
            bits,
            complete,
            neutral,
            agents,
        });
    }

    // Anything non-free never reached from a head is a malformed leftover.
    for id in 0..n {
        if !visited[id as usize] && !config.state(id).is_free() {
            let s = config.state(id);
            visited[id as usize] = true;
            out.push(StrandReadout {
                bits: s.slot.map(|b| b.bit).into_iter().collect(),
                complete: false,
                neutral: s.buffer == Buffer::Phi,
                agents: vec![id],
            });
        }
    }
    out
}

/// Count of complete strands whose bits equal `seed`. Completeness is
/// permanent (strand edges, roles, and slots never change once written), so
/// this count is monotone along a run and makes a well-posed stop event.
pub fn complete_copies(config: &Configuration<ReplicationAgentState>, seed: &[bool]) -> usize {
    extract_strands(config)
        .iter()
        .filter(|s| s.complete && s.bits == seed)
        .count()
}

/// Runs the replication protocol from a seeded configuration until at least
/// `target_copies` complete strands carrying the seed message exist (the
/// original counts), or the budget runs out. The count monotonicity makes
/// the strided check exact: on a hit the window is rescanned one interaction
/// at a time for the first-hold index.
pub fn run_replication(
    config: &mut Configuration<ReplicationAgentState>,
    seed_bits: &[bool],
    target_copies: usize,
    budget: u64,
    rng: &mut SchedulerRng,
) -> TrialReport {
    let n = config.n();
    let delta = ReplicationDelta;
    let seed = rng.seed();
    let stride = (n as u64).max(64);
    let sampler = PairSampler::new(n);

    let mut report = if complete_copies(config, seed_bits) >= target_copies {
        TrialReport::finished("replicate", n, seed, config.interactions(), true)
    } else {
        let mut done_at: Option<u64> = None;
        let mut spent = 0u64;
        let mut window: Vec<InteractionRecord<ReplicationAgentState>> =
            Vec::with_capacity(stride as usize);
        'outer: while spent < budget {
            let chunk = stride.min(budget - spent);
            window.clear();
            for _ in 0..chunk {
                let pair = sampler.draw(rng);
                window.push(crate::engine::apply_interaction(config, pair, &delta));
            }
            spent += chunk;
            if complete_copies(config, seed_bits) >= target_copies {
                // Locate the exact interaction that completed the last
                // needed copy: rewind the window, replay one step at a time.
                for rec in window.iter().rev() {
                    crate::engine::undo_interaction(config, rec);
                }
                for rec in &window {
                    crate::engine::apply_interaction(
                        config,
                        (rec.initiator, rec.responder),
                        &delta,
                    );
                    if complete_copies(config, seed_bits) >= target_copies {
                        done_at = Some(config.interactions());
                        break 'outer;
                    }
                }
                unreachable!("copy count held at the window end but not during replay");
            }
        }
        match done_at {
            Some(at) => TrialReport::finished("replicate", n, seed, at, true),
            None => TrialReport::finished("replicate", n, seed, config.interactions(), false),
        }
    };

    let strands = extract_strands(config);
    report.note("k", seed_bits.len());
    report.note("target_copies", target_copies);
    report.note(
        "complete_copies",
        strands
            .iter()
            .filter(|s| s.complete && s.bits == seed_bits)
            .count(),
    );
    report.note(
        "incomplete_strands",
        strands.iter().filter(|s| !s.complete).count(),
    );
    report.note(
        "free_agents",
        config.states().iter().filter(|s| s.is_free()).count(),
    );
    report
}

/// Default population size giving the free pool comfortable slack for
/// `copies` strands of `k` bits.
pub fn default_population(k: usize, copies: usize) -> usize {
    4 * copies.max(1) * k + 64
}

/// Summarizes per-strand state for debugging and trace output.
pub fn strand_summary(config: &Configuration<ReplicationAgentState>) -> BTreeMap<String, String> {
    let strands = extract_strands(config);
    let mut m = BTreeMap::new();
    m.insert("strands".into(), strands.len().to_string());
    m.insert(
        "complete".into(),
        strands.iter().filter(|s| s.complete).count().to_string(),
    );
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{apply_interaction, Configuration, StopReason};
    use Buffer::*;
    use Role::*;

    fn rep(role: Role, slot: Option<(bool, u8)>, buffer: Buffer) -> Rep {
        Rep {
            role,
            slot: slot.map(|(bit, pos)| BitSlot { bit, pos }),
            buffer,
        }
    }

    const D: ReplicationDelta = ReplicationDelta;

    #[test]
    fn r1_bridges_and_copies_the_head_bit() {
        let head = rep(Head, Some((true, 0)), Phi);
        let (h2, g2, edge) = D.apply(head, Rep::free(), false);
        assert_eq!(h2, rep(Head, Some((true, 0)), PhiH));
        assert_eq!(g2, rep(Head, Some((true, 0)), Psi));
        assert!(edge);
        // reversed orientation
        let (g2, h2, edge) = D.apply(Rep::free(), head, false);
        assert_eq!(h2, rep(Head, Some((true, 0)), PhiH));
        assert_eq!(g2, rep(Head, Some((true, 0)), Psi));
        assert!(edge);
    }

    #[test]
    fn r6_transfers_the_tail_bit_and_drops_the_bridge() {
        let old = rep(Head, Some((true, 0)), BitH { bit: false, is_tail: true });
        let new = rep(Head, Some((true, 0)), PsiT);
        let (o2, n2, edge) = D.apply(old, new, true);
        assert_eq!(o2.buffer, Phi);
        assert_eq!(n2.buffer, BitT { bit: false, is_tail: true });
        assert!(!edge, "bridge removed");
    }

    #[test]
    fn r12_crowns_the_tail_and_restores_neutrality() {
        let carrier = rep(Regular, Some((false, 1)), BitT { bit: true, is_tail: true });
        let unset = rep(Regular, None, Psi);
        let (c2, t2, edge) = D.apply(carrier, unset, true);
        assert_eq!(c2.buffer, Phi);
        assert_eq!(t2, rep(Tail, Some((true, 2)), Phi));
        assert!(edge);
    }

    #[test]
    fn free_pairs_are_identity() {
        let (a, b, e) = D.apply(Rep::free(), Rep::free(), false);
        assert_eq!((a, b, e), (Rep::free(), Rep::free(), false));
    }

    #[test]
    fn seeding_lays_out_the_path() {
        let mut c = Configuration::init(5, |_| Rep::free()).unwrap();
        let spec = StrandSpec::parse("101").unwrap();
        let head = seed_strand(&mut c, &spec).unwrap();
        assert_eq!(head, 0);
        assert_eq!(c.state(0), rep(Head, Some((true, 0)), Phi));
        assert_eq!(c.state(1), rep(Regular, Some((false, 1)), Phi));
        assert_eq!(c.state(2), rep(Tail, Some((true, 2)), Phi));
        assert_eq!(c.edges().len(), 2);
        assert!(c.edges().has(0, 1) && c.edges().has(1, 2));
        assert!(c.state(3).is_free() && c.state(4).is_free());

        let strands = extract_strands(&c);
        assert_eq!(strands.len(), 1);
        assert_eq!(strands[0].bits, vec![true, false, true]);
        assert!(strands[0].complete && strands[0].neutral);
    }

    #[test]
    fn short_specs_are_rejected() {
        assert_eq!(StrandSpec::parse("10").unwrap_err(), StrandError::TooShort(2));
        let mut c = Configuration::init(4, |_| Rep::free()).unwrap();
        let spec = StrandSpec::parse("10110").unwrap();
        assert_eq!(
            seed_strand(&mut c, &spec).unwrap_err(),
            StrandError::InsufficientFreeAgents {
                needed: 5,
                available: 4
            }
        );
    }

    /// Drives one full scripted replication round of a 3-bit strand by
    /// feeding the exact pair sequence, rule by rule, and checks the final
    /// neutrality of both strands. Agent 0-1-2 hold the strand, 3 and 4 are
    /// free.
    #[test]
    fn scripted_round_restores_neutrality_everywhere() {
        let mut c = Configuration::init(6, |_| Rep::free()).unwrap();
        let spec = StrandSpec::parse("101").unwrap();
        seed_strand(&mut c, &spec).unwrap();
        let step = |c: &mut Configuration<Rep>, pair: (AgentId, AgentId)| {
            apply_interaction(c, pair, &D);
        };
        step(&mut c, (0, 3)); // R1: bridge, agent 3 becomes the copy head
        assert_eq!(c.state(3), rep(Head, Some((true, 0)), Psi));
        step(&mut c, (1, 0)); // R2: agent 1 loads its bit
        assert_eq!(c.state(1).buffer, BitH { bit: false, is_tail: false });
        step(&mut c, (1, 0)); // R3: bit 1 moves to the head
        assert_eq!(c.state(0).buffer, BitH { bit: false, is_tail: false });
        assert_eq!(c.state(1).buffer, PhiH);
        step(&mut c, (0, 3)); // R9 head side: extension request at the copy
        assert_eq!(c.state(3).buffer, PsiN);
        step(&mut c, (3, 4)); // R10: agent 4 joins the copy
        assert_eq!(c.state(4), rep(Regular, None, Psi));
        assert_eq!(c.state(3).buffer, PsiT);
        step(&mut c, (0, 3)); // R5: bit 1 crosses the bridge
        assert_eq!(c.state(3).buffer, BitT { bit: false, is_tail: false });
        assert_eq!(c.state(0).buffer, PhiH);
        step(&mut c, (2, 1)); // R2 tail form: tail loads its bit
        assert_eq!(c.state(2).buffer, BitH { bit: true, is_tail: true });
        step(&mut c, (3, 4)); // R11: bit 1 settles in agent 4
        assert_eq!(c.state(4), rep(Regular, Some((false, 1)), Psi));
        assert_eq!(c.state(3).buffer, PsiT);
        step(&mut c, (2, 1)); // R4: tail bit moves inward, tail goes neutral
        assert_eq!(c.state(2).buffer, Phi);
        step(&mut c, (1, 0)); // R4 again: tail bit reaches the head
        assert_eq!(c.state(1).buffer, Phi);
        assert_eq!(c.state(0).buffer, BitH { bit: true, is_tail: true });
        step(&mut c, (0, 3)); // R6: tail bit crosses, bridge drops
        assert!(!c.edges().has(0, 3));
        assert_eq!(c.state(0).buffer, Phi);
        step(&mut c, (3, 4)); // R9: tail bit knocking requests the last slot
        assert_eq!(c.state(4).buffer, PsiN);
        step(&mut c, (4, 5)); // R10: agent 5 joins
        step(&mut c, (3, 4)); // R8: tail bit moves to agent 4
        assert_eq!(c.state(3).buffer, Phi);
        step(&mut c, (4, 5)); // R12: agent 5 crowned as tail
        assert_eq!(c.state(5), rep(Tail, Some((true, 2)), Phi));
        assert_eq!(c.state(4).buffer, Phi);

        // Both strands complete, neutral, and bit-identical to the seed.
        let strands = extract_strands(&c);
        assert_eq!(strands.len(), 2);
        for s in &strands {
            assert!(s.complete && s.neutral);
            assert_eq!(s.bits, vec![true, false, true]);
        }
        c.edges().check_consistency().unwrap();
    }

    #[test]
    fn single_copy_target_needs_no_work() {
        let mut c = Configuration::init(8, |_| Rep::free()).unwrap();
        let spec = StrandSpec::parse("1011").unwrap();
        seed_strand(&mut c, &spec).unwrap();
        let mut rng = SchedulerRng::new(1);
        let report = run_replication(&mut c, spec.bits(), 1, 1_000_000, &mut rng);
        assert!(report.success);
        assert_eq!(report.interactions, 0);
    }

    #[test]
    fn truncated_budget_leaves_a_visible_partial_copy() {
        let mut c = Configuration::init(32, |_| Rep::free()).unwrap();
        let spec = StrandSpec::parse("10110100").unwrap();
        seed_strand(&mut c, &spec).unwrap();
        let mut rng = SchedulerRng::new(3);
        // Enough budget to start a copy, far too little to finish it.
        let report = run_replication(&mut c, spec.bits(), 2, 3_000, &mut rng);
        assert!(!report.success);
        assert_eq!(report.stop_reason, StopReason::BudgetExhausted);
        let strands = extract_strands(&c);
        assert!(strands.iter().any(|s| s.complete), "original intact");
        assert!(
            strands.iter().any(|s| !s.complete),
            "partial copy visible with complete = false"
        );
    }

    #[test]
    fn one_round_replicates_an_8_bit_strand() {
        let spec = StrandSpec::parse("10110010").unwrap();
        for seed in 0..5 {
            let mut c = Configuration::init(256, |_| Rep::free()).unwrap();
            seed_strand(&mut c, &spec).unwrap();
            let mut rng = SchedulerRng::new(seed);
            let report = run_replication(&mut c, spec.bits(), 2, 500_000_000, &mut rng);
            assert!(report.success, "seed {seed}");
            assert!(complete_copies(&c, spec.bits()) >= 2);
            c.edges().check_consistency().unwrap();
        }
    }
}
