//! popcon: population-protocol experiments on the command line.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use popcon_core::engine::TrialReport;
use popcon_harness::{
    aggregate, calibrate_max_level, emit_results, replication_sweep, run_one, run_sweep_checked,
    sort_sweep, verify_lemma2, verify_potential_contraction, verify_scaling, DistKind,
    OutputFormat, Params, Protocol, RunChecks, SweepSpec,
};

/// Deterministic simulator for population protocols in the network
/// constructor model.
///
/// Protocols: leader-election (single-rule duels, Theta(n) expected
/// parallel time), matching-clock (edge-based phase clock counting
/// Theta(n log n) parallel time), leader-clock (its edge-less counterpart),
/// periodic-clock (three-stage rounds of the leader clock), line-pipeline
/// (election + clock + confirmation + spanning-line formation).
///
/// Defaults: clock cap max=64, slack d=8, whp exponent eta=2, budget
/// factor 16 over each protocol's theoretical interaction bound.
#[derive(Parser)]
#[command(name = "popcon", version, about, long_about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one protocol at one population size.
    Simulate(SimulateArgs),
    /// Run a protocol over a population grid with repeated trials.
    Sweep(SweepArgs),
    /// Probabilistic bubble-sort trials over random inputs.
    Sort(SortArgs),
    /// Strand self-replication trials.
    Replicate(ReplicateArgs),
    /// Statistical and exact verification checks; exits nonzero on failure.
    #[command(subcommand)]
    Verify(VerifyCmd),
}

#[derive(Args)]
struct OutputArgs {
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format.
    #[arg(long, default_value = "csv")]
    format: String,
}

#[derive(Args)]
struct ProtocolParams {
    /// Clock level cap (max).
    #[arg(long = "max-level", default_value_t = 64)]
    max_level: u16,
    /// Clock slack constant (d).
    #[arg(long = "d-slack", default_value_t = 8)]
    d_slack: u16,
    /// Reliability exponent for whp bounds.
    #[arg(long, default_value_t = 2.0)]
    eta: f64,
    /// Budget multiplier over the theoretical bound.
    #[arg(long = "budget-factor", default_value_t = 16)]
    budget_factor: u64,
    /// Hard interaction budget override.
    #[arg(long)]
    budget: Option<u64>,
}

impl ProtocolParams {
    fn to_params(&self) -> Params {
        Params {
            max_level: self.max_level,
            d_slack: self.d_slack,
            eta: self.eta,
            budget_factor: self.budget_factor,
            budget_override: self.budget,
            ..Params::default()
        }
    }
}

#[derive(Args)]
struct SimulateArgs {
    /// Protocol name.
    #[arg(long)]
    protocol: Protocol,
    /// Population size.
    #[arg(long)]
    n: usize,
    /// Scheduler seed.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Continue 10% past the stop and re-check the predicate.
    #[arg(long)]
    check_stability: bool,
    /// Write one line per interaction to this file.
    #[arg(long)]
    trace: Option<PathBuf>,
    #[command(flatten)]
    params: ProtocolParams,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct SweepArgs {
    /// Protocol name.
    #[arg(long)]
    protocol: Option<Protocol>,
    /// Comma-separated population sizes.
    #[arg(long, value_delimiter = ',')]
    n: Vec<usize>,
    /// Trials per population size.
    #[arg(long, default_value_t = 20)]
    trials: u32,
    /// Master seed; trial (n, i) derives its own sub-seed.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// JSON file with a sweep spec; explicit flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    params: ProtocolParams,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct SortArgs {
    /// Sequence length(s), comma separated.
    #[arg(long, value_delimiter = ',')]
    n: Vec<usize>,
    #[arg(long, default_value_t = 20)]
    trials: u32,
    #[arg(long, default_value_t = 2.0)]
    eta: f64,
    /// Input distribution: zeroone, uniform, or permutation.
    #[arg(long, default_value = "zeroone")]
    dist: DistKind,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Budget multiplier over the whp comparison bound.
    #[arg(long = "budget-factor", default_value_t = 16)]
    budget_factor: u64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct ReplicateArgs {
    /// Strand contents as a 0/1 string (at least 3 bits).
    #[arg(long, conflicts_with = "bits_file")]
    bits: Option<String>,
    /// File of 0/1 lines; each line becomes one trial's strand.
    #[arg(long)]
    bits_file: Option<PathBuf>,
    /// Target total number of complete strands (the original counts).
    #[arg(long, default_value_t = 2)]
    copies: usize,
    /// Population size; defaults to 4 * copies * k + 64.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 20)]
    trials: u32,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 2.0)]
    eta: f64,
    #[arg(long = "budget-factor", default_value_t = 16)]
    budget_factor: u64,
    /// Hard interaction budget override.
    #[arg(long)]
    budget: Option<u64>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// Matched-agents check: after ceil(0.51 n) interactions of the
    /// matching clock, at least n/2 agents hold a matching edge, every
    /// trial.
    Lemma2 {
        #[arg(long, value_delimiter = ',', default_values_t = [512usize, 1024, 2048])]
        n: Vec<usize>,
        #[arg(long, default_value_t = 50)]
        trials: u32,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Exhaustive exact check of the expected-potential contraction for
    /// all 0/1 configurations up to --max-n.
    Potential {
        #[arg(long = "max-n", default_value_t = 14)]
        max_n: usize,
    },
    /// Grid-flatness scaling check for one protocol.
    Scaling {
        #[arg(long, default_value = "matching-clock")]
        protocol: Protocol,
        #[arg(long, value_delimiter = ',', default_values_t = [64usize, 128, 256])]
        n: Vec<usize>,
        #[arg(long, default_value_t = 5)]
        trials: u32,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[command(flatten)]
        params: ProtocolParams,
    },
    /// Clock-before-leader ordering calibration; doubles the clock cap
    /// until election finishes first in every run.
    Calibrate {
        #[arg(long, value_delimiter = ',', default_values_t = [256usize, 512])]
        n: Vec<usize>,
        #[arg(long, default_value_t = 10)]
        trials: u32,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[command(flatten)]
        params: ProtocolParams,
    },
}

fn emit(
    reports: &[TrialReport],
    output: &OutputArgs,
    meta: BTreeMap<String, String>,
) -> Result<(), String> {
    let format: OutputFormat = output.format.parse()?;
    match &output.out {
        Some(path) => {
            emit_results(reports, format, path, &meta).map_err(|e| e.to_string())?;
            Ok(())
        }
        None => {
            let dir = std::env::temp_dir().join(format!("popcon-{}.tmp", std::process::id()));
            emit_results(reports, format, &dir, &meta).map_err(|e| e.to_string())?;
            let text = std::fs::read_to_string(&dir).map_err(|e| e.to_string())?;
            let _ = std::fs::remove_file(&dir);
            print!("{text}");
            Ok(())
        }
    }
}

fn summarize(reports: &[TrialReport]) {
    if let Ok(stats) = aggregate(reports, None) {
        for s in &stats {
            eprintln!(
                "n={}: {}/{} ok, parallel time mean={:.1} median={:.1} p95={:.1}",
                s.n,
                s.successes,
                s.trials,
                s.mean_parallel_time,
                s.median_parallel_time,
                s.p95_parallel_time
            );
        }
    }
}

fn meta_of(pairs: &[(&str, String)]) -> BTreeMap<String, String> {
    pairs
        .iter()
        .map(|(k, v)| (k.to_string(), v.clone()))
        .collect()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Simulate(args) => {
            let params = args.params.to_params();
            let checks = RunChecks {
                overrun: args.check_stability,
            };
            let report = if let Some(trace_path) = &args.trace {
                run_traced(args.protocol, args.n, args.seed, &params, trace_path)?
            } else {
                run_one(args.protocol, args.n, args.seed, &params, checks)
            };
            let meta = meta_of(&[
                ("command", "simulate".into()),
                ("protocol", args.protocol.to_string()),
                ("n", args.n.to_string()),
                ("seed", args.seed.to_string()),
                ("max", params.max_level.to_string()),
                ("d", params.d_slack.to_string()),
                ("budgetFactor", params.budget_factor.to_string()),
            ]);
            let ok = report.success;
            summarize(std::slice::from_ref(&report));
            emit(&[report], &args.output, meta)?;
            Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Sweep(args) => {
            let mut spec = match &args.config {
                Some(path) => {
                    let text = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
                    serde_json::from_str::<SweepSpec>(&text).map_err(|e| e.to_string())?
                }
                None => SweepSpec {
                    protocol: String::new(),
                    n_values: vec![],
                    trials: args.trials,
                    master_seed: args.seed,
                    params: args.params.to_params(),
                },
            };
            // flags win over the config file
            if let Some(p) = args.protocol {
                spec.protocol = p.name().to_string();
            }
            if !args.n.is_empty() {
                spec.n_values = args.n.clone();
            }
            if args.config.is_none() {
                spec.trials = args.trials;
                spec.master_seed = args.seed;
            }
            let reports = run_sweep_checked(&spec, RunChecks::default())
                .map_err(|e| e.to_string())?;
            summarize(&reports);
            let meta = meta_of(&[
                ("command", "sweep".into()),
                ("protocol", spec.protocol.clone()),
                ("trials", spec.trials.to_string()),
                ("masterSeed", spec.master_seed.to_string()),
                ("max", spec.params.max_level.to_string()),
                ("d", spec.params.d_slack.to_string()),
                ("budgetFactor", spec.params.budget_factor.to_string()),
            ]);
            let ok = reports.iter().all(|r| r.success);
            emit(&reports, &args.output, meta)?;
            Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Sort(args) => {
            let params = Params {
                eta: args.eta,
                budget_factor: args.budget_factor,
                ..Params::default()
            };
            let reports =
                sort_sweep(&args.n, args.trials, args.dist, args.seed, &params).map_err(|e| e.to_string())?;
            summarize(&reports);
            let meta = meta_of(&[
                ("command", "sort".into()),
                ("dist", args.dist.to_string()),
                ("eta", args.eta.to_string()),
                ("seed", args.seed.to_string()),
            ]);
            let ok = reports.iter().all(|r| r.success);
            emit(&reports, &args.output, meta)?;
            Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Replicate(args) => {
            let mut params = Params {
                eta: args.eta,
                budget_factor: args.budget_factor,
                copies: args.copies,
                ..Params::default()
            };
            let strands: Vec<String> = if let Some(file) = &args.bits_file {
                std::fs::read_to_string(file)
                    .map_err(|e| format!("{}: {e}", file.display()))?
                    .lines()
                    .map(str::trim)
                    .filter(|l| !l.is_empty())
                    .map(String::from)
                    .collect()
            } else {
                vec![args
                    .bits
                    .clone()
                    .ok_or("one of --bits or --bits-file is required")?]
            };
            params.budget_override = args.budget;
            let mut reports = Vec::new();
            for bits in &strands {
                let k = bits.len();
                popcon_core::replication::StrandSpec::parse(bits).map_err(|e| e.to_string())?;
                params.bits = Some(bits.clone());
                let n = args
                    .n
                    .unwrap_or_else(|| popcon_core::replication::default_population(k, args.copies));
                let run =
                    replication_sweep(&[n], k, args.trials, args.seed, &params, RunChecks::default())
                        .map_err(|e| e.to_string())?;
                reports.extend(run);
            }
            summarize(&reports);
            let meta = meta_of(&[
                ("command", "replicate".into()),
                ("copies", args.copies.to_string()),
                ("seed", args.seed.to_string()),
            ]);
            let ok = reports.iter().all(|r| r.success);
            emit(&reports, &args.output, meta)?;
            Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Verify(cmd) => run_verify(cmd),
    }
}

fn run_verify(cmd: VerifyCmd) -> Result<ExitCode, String> {
    match cmd {
        VerifyCmd::Lemma2 { n, trials, seed } => {
            let mut all_pass = true;
            for &n in &n {
                let r = verify_lemma2(n, trials, seed).map_err(|e| e.to_string())?;
                let worst = r.per_trial_matched.iter().min().copied().unwrap_or(0);
                eprintln!(
                    "lemma2 n={n}: {} after {} interactions, threshold {}, worst trial {} -> {}",
                    if r.pass { "pass" } else { "FAIL" },
                    r.interactions,
                    r.threshold,
                    worst,
                    if r.pass { "ok" } else { "below threshold" },
                );
                all_pass &= r.pass;
            }
            Ok(if all_pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        VerifyCmd::Potential { max_n } => {
            let r = verify_potential_contraction(max_n).map_err(|e| e.to_string())?;
            eprintln!(
                "potential contraction up to n={}: {} ({} configs, worst ratio {:.6})",
                r.max_n,
                if r.pass { "pass" } else { "FAIL" },
                r.configs_checked,
                r.worst_ratio
            );
            Ok(if r.pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        VerifyCmd::Scaling {
            protocol,
            n,
            trials,
            seed,
            params,
        } => {
            let v = verify_scaling(protocol, &n, trials, seed, &params.to_params())
                .map_err(|e| e.to_string())?;
            for row in &v.table.rows {
                eprintln!(
                    "scaling {} n={}: mean parallel time / {} = {:.3} (spread {:.3})",
                    v.protocol, row.n, row.normalizer, row.mean_ratio, row.relative_spread
                );
            }
            eprintln!(
                "scaling {}: flatness {:.3} vs threshold {:.1} -> {}",
                v.protocol,
                v.table.flatness,
                v.flatness_threshold,
                if v.pass { "pass" } else { "FAIL" }
            );
            Ok(if v.pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        VerifyCmd::Calibrate {
            n,
            trials,
            seed,
            params,
        } => {
            let r = calibrate_max_level(&n, trials, seed, &params.to_params());
            for a in &r.attempts {
                eprintln!(
                    "calibrate max={}: {} violations in {} runs",
                    a.max_level, a.ordering_violations, a.runs
                );
            }
            match r.calibrated_max_level {
                Some(max) => {
                    eprintln!("calibrated max level: {max}");
                    Ok(ExitCode::SUCCESS)
                }
                None => {
                    eprintln!("calibration failed to find a passing max level");
                    Ok(ExitCode::from(1))
                }
            }
        }
    }
}

fn run_traced(
    protocol: Protocol,
    n: usize,
    seed: u64,
    params: &Params,
    trace_path: &std::path::Path,
) -> Result<TrialReport, String> {
    use popcon_core::engine::{draw_pair, Configuration, SchedulerRng};
    use std::io::Write;
    // Tracing is supported for the pipeline and the simple protocols via a
    // uniform debug rendering of each record.
    let mut file = std::io::BufWriter::new(
        std::fs::File::create(trace_path).map_err(|e| format!("{}: {e}", trace_path.display()))?,
    );
    macro_rules! trace_run {
        ($state:ty, $init:expr, $delta:expr, $stop:expr) => {{
            let delta = $delta;
            let mut config: Configuration<$state> = Configuration::init(n, $init)
                .map_err(|e| e.to_string())?;
            let mut rng = SchedulerRng::new(seed);
            let budget = params.budget(protocol, n);
            let mut success = false;
            for _ in 0..budget {
                let pair = draw_pair(&mut rng, n);
                let rec = popcon_core::engine::apply_interaction(&mut config, pair, &delta);
                writeln!(
                    file,
                    "{}\t{}\t{}\t{:?}\t{:?}",
                    rec.index, rec.initiator, rec.responder, rec.before, rec.after
                )
                .map_err(|e| e.to_string())?;
                if $stop(&config) {
                    success = true;
                    break;
                }
            }
            TrialReport::finished(protocol.name(), n, seed, config.interactions(), success)
        }};
    }
    use popcon_core::protocols as p;
    let report = match protocol {
        Protocol::LeaderElection => trace_run!(
            p::LeaderElectionState,
            |_| p::LeaderElectionState::Leader,
            p::LeaderElectionDelta,
            p::is_single_leader
        ),
        Protocol::MatchingClock => {
            let max = params.max_level;
            trace_run!(
                p::MatchingClockState,
                |_| p::MatchingClockState::Start,
                p::MatchingClockDelta::new(params.clock()),
                |c: &Configuration<p::MatchingClockState>| p::clock_max_reached(c, max)
            )
        }
        Protocol::LeaderClock => {
            let max = params.max_level;
            trace_run!(
                p::LeaderClockState,
                |i| if i == 0 {
                    p::LeaderClockState::leader()
                } else {
                    p::LeaderClockState::follower()
                },
                p::LeaderClockDelta {
                    max_level: params.max_level
                },
                |c: &Configuration<p::LeaderClockState>| p::clock_max_reached(c, max)
            )
        }
        Protocol::PeriodicClock => trace_run!(
            p::PeriodicClockState,
            |i| if i == 0 {
                p::PeriodicClockState::leader()
            } else {
                p::PeriodicClockState::follower()
            },
            p::PeriodicClockDelta {
                max_level: params.max_level
            },
            |c: &Configuration<p::PeriodicClockState>| c
                .states()
                .iter()
                .any(|s| s.announce == Some(0))
        ),
        Protocol::LinePipeline => trace_run!(
            p::PipelineState,
            |_| p::PipelineState::initial(),
            p::PipelineDelta::new(params.clock()),
            p::is_spanning_line
        ),
    };
    Ok(report)
}
