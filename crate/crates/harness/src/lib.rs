//! Experiment harness: seeded sweeps over the protocol library, statistical
//! aggregation and scaling tables, structured result emission, and the
//! verification checks wired to the CLI.

mod emit;
mod params;
mod runner;
mod stats;
mod sweep;
mod verify;

pub use emit::{emit_results, read_reports, EmitError, OutputFormat};
pub use params::{DistKind, Params, Protocol, ProtocolParseError};
pub use runner::{
    run_le_matching, run_leader_clock, run_leader_election, run_matching_clock, run_one,
    run_periodic_clock, run_pipeline, run_pipeline_fixture, run_replication_trial,
    run_sort_trial, PipelineFixture, RunChecks,
};
pub use stats::{
    aggregate, flatness_over, scaling_table, AggregateStats, Normalizer, ScalingRow,
    ScalingTable, StatsError,
};
pub use sweep::{replication_sweep, run_sweep, run_sweep_checked, sort_sweep, SweepError, SweepSpec};
pub use verify::{
    calibrate_max_level, verify_lemma2, verify_lemma2_with, verify_potential_contraction,
    verify_scaling, CalibrationAttempt, CalibrationReport, ContractionReport, Lemma2Report,
    ScalingVerdict, VerifyError,
};
