//! Undirected edge set over the population, stored as per-agent neighbor
//! lists.
//!
//! All protocols implemented here keep agent degree at 3 or below (two
//! strand edges plus one bridge in the worst case), so neighbor lists are
//! inline `SmallVec`s; arbitrary degree still works, it just spills.

use smallvec::SmallVec;

use super::AgentId;

type Neighbors = SmallVec<[AgentId; 4]>;

/// Symmetric, loop-free adjacency over `n` agents with O(degree) flag
/// lookup and update for an unordered pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeSet {
    adj: Vec<Neighbors>,
    len: usize,
}

impl EdgeSet {
    pub fn new(n: usize) -> Self {
        Self {
            adj: vec![Neighbors::new(); n],
            len: 0,
        }
    }

    /// Number of edges currently present.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn has(&self, u: AgentId, v: AgentId) -> bool {
        self.adj[u as usize].contains(&v)
    }

    pub fn degree(&self, u: AgentId) -> usize {
        self.adj[u as usize].len()
    }

    pub fn neighbors(&self, u: AgentId) -> &[AgentId] {
        &self.adj[u as usize]
    }

    /// Sets the flag for the unordered pair `{u, v}`. Returns `true` when
    /// the set changed. Self-loops are rejected.
    pub fn set(&mut self, u: AgentId, v: AgentId, present: bool) -> bool {
        assert_ne!(u, v, "self-loops are not representable");
        let had = self.has(u, v);
        if present == had {
            return false;
        }
        if present {
            self.adj[u as usize].push(v);
            self.adj[v as usize].push(u);
            self.len += 1;
        } else {
            Self::remove_from(&mut self.adj[u as usize], v);
            Self::remove_from(&mut self.adj[v as usize], u);
            self.len -= 1;
        }
        true
    }

    fn remove_from(list: &mut Neighbors, v: AgentId) {
        let pos = list.iter().position(|&x| x == v).expect("edge bookkeeping");
        list.swap_remove(pos);
    }

    /// All edges as ordered `(min, max)` pairs, ascending. O(n + m log m).
    pub fn edges(&self) -> Vec<(AgentId, AgentId)> {
        let mut out = Vec::with_capacity(self.len);
        for (u, ns) in self.adj.iter().enumerate() {
            for &v in ns {
                if (u as AgentId) < v {
                    out.push((u as AgentId, v));
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Checks symmetry and loop-freedom of the stored adjacency. Intended
    /// for traced runs and tests.
    pub fn check_consistency(&self) -> Result<(), String> {
        let mut counted = 0usize;
        for (u, ns) in self.adj.iter().enumerate() {
            let u = u as AgentId;
            for &v in ns {
                if v == u {
                    return Err(format!("self-loop at agent {u}"));
                }
                if !self.adj[v as usize].contains(&u) {
                    return Err(format!("asymmetric edge {u}-{v}"));
                }
                counted += 1;
            }
            let mut sorted: Vec<_> = ns.to_vec();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != ns.len() {
                return Err(format!("duplicate neighbor entry at agent {u}"));
            }
        }
        if counted != 2 * self.len {
            return Err(format!(
                "edge count {} disagrees with adjacency entries {counted}",
                self.len
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_and_query_round_trip() {
        let mut e = EdgeSet::new(4);
        assert!(!e.has(0, 1));
        assert!(e.set(0, 1, true));
        assert!(e.has(0, 1) && e.has(1, 0));
        assert!(!e.set(0, 1, true), "idempotent insert");
        assert_eq!(e.len(), 1);
        assert!(e.set(1, 0, false));
        assert!(!e.has(0, 1));
        assert_eq!(e.len(), 0);
        e.check_consistency().unwrap();
    }

    #[test]
    #[should_panic(expected = "self-loop")]
    fn self_loops_rejected() {
        let mut e = EdgeSet::new(2);
        e.set(1, 1, true);
    }

    #[test]
    fn edges_listing_is_sorted_unordered_pairs() {
        let mut e = EdgeSet::new(5);
        e.set(3, 1, true);
        e.set(0, 4, true);
        e.set(2, 3, true);
        assert_eq!(e.edges(), vec![(0, 4), (1, 3), (2, 3)]);
    }
}
