//! A century of renewals on a small store with real instance sizes; prints decade rows.

use propyla::harness::cost::{simulate_schedule, Workload};
use propyla::parties::Config;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = Config { block_size_L: 1024, ..Config::paper(4) };
    let rep = simulate_schedule(cfg, Workload { reads_per_year: 1 })?;
    println!("year  es_peak_KB  sh_evidence_KB  renewal_ms  traffic_ratio");
    for year in (0..=100).step_by(10) {
        let r = rep.row(year).expect("year inside the horizon");
        println!(
            "{year:>4}  {:>10.1}  {:>14.1}  {:>10.1}  {:>13.4}",
            r.es_bytes_pre / 1024.0,
            r.sh_evidence_bytes / 1024.0,
            r.renewal_ms,
            r.traffic_ratio
        );
    }
    println!("total traffic {:.1} MB", rep.total_bytes as f64 / 1e6);
    Ok(())
}
