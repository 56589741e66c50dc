//! Population protocols in the network-constructor model: a deterministic,
//! seedable simulation engine plus a library of protocols built on it —
//! leader election, two Θ(n log n) phase clocks, spanning-line formation,
//! probabilistic bubble-sort with its exact potential function, and strand
//! self-replication.

pub mod bubble_sort;
pub mod engine;
pub mod protocols;
pub mod replication;
