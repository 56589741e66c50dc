use popcon_harness::{run_pipeline, run_le_matching, run_replication_trial, Params, RunChecks};
fn main() {
    let p = Params::default();
    for n in [128usize, 256] {
        for seed in [1u64, 2, 3] {
            let t = std::time::Instant::now();
            let r = run_pipeline(n, seed, &p, RunChecks { overrun: true });
            let ln = (n as f64).ln();
            let cm: u64 = r.final_summary["clock_max_at"].parse().unwrap();
            let post = (r.interactions - cm) as f64 / (n as f64 * n as f64 * ln);
            println!("pipeline n={n} seed={seed}: ok={} post_ratio={post:.3} total_ratio={:.1} overrun={} ({:.1}s)",
                r.success, r.interactions as f64/(n as f64*n as f64*ln),
                r.final_summary["overrun_held"], t.elapsed().as_secs_f64());
        }
    }
    for n in [256usize] {
        let t = std::time::Instant::now();
        let r = run_le_matching(n, 5, &p);
        println!("composed n={n}: ok={} ratio={:.1} ordering={} ({:.1}s)", r.success,
            r.interactions as f64/((n*n) as f64*(n as f64).ln()), r.final_summary["ordering_ok"], t.elapsed().as_secs_f64());
    }
    for (k, n) in [(8usize, 64usize), (32, 256), (64, 512)] {
        let t = std::time::Instant::now();
        let mut p2 = Params::default();
        p2.copies = 2;
        let r = run_replication_trial(n, k, 7, &p2, RunChecks { overrun: true });
        let norm = (n * n) as f64 * (k as f64 + (n as f64).ln());
        println!("replicate k={k} n={n}: ok={} ratio={:.3} quiescent={} ({:.1}s)",
            r.success, r.interactions as f64 / norm,
            r.final_summary.get("complete_strands_quiescent").map(String::as_str).unwrap_or("?"),
            t.elapsed().as_secs_f64());
    }
}
