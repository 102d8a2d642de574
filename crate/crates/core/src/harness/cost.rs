//! Long-horizon cost simulation: storage per slot, renewal work and per-access traffic.

use crate::oram::BlockId;
use crate::parties::{Config, OpCounts, Party, System, SystemError};
use crate::time::Day;
use serde::{Deserialize, Serialize};

/// Optional access workload run at each yearly sample point.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Workload {
    /// Reads per year, cycling through the ids.
    pub reads_per_year: usize,
}

/// One sample. Storage columns are means over all slots.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct YearRow {
    pub year: u64,
    /// Evidence-service bytes per slot on the day before the year's events.
    pub es_bytes_pre: f64,
    /// Evidence-service bytes per slot after the year's events.
    pub es_bytes: f64,
    /// Evidence-service entries of slot 0 after the year's events.
    pub es_entries: u64,
    /// Shareholder-side evidence bytes per slot (unpadded).
    pub sh_evidence_bytes: f64,
    /// Shareholder-side evidence entries of slot 0.
    pub sh_entries: u64,
    /// Padded payload bytes per slot (the share length).
    pub sh_payload_bytes: f64,
    pub renewal_commits: u64,
    pub renewal_stamps: u64,
    pub renewal_ms: f64,
    /// Mean client bytes per access; zero without a workload.
    pub access_client_bytes: f64,
    /// Client bytes per access for the same ORAM and sharing without evidence.
    pub baseline_client_bytes: f64,
    pub traffic_ratio: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CostReport {
    /// Measured right after initialization.
    pub initial: YearRow,
    /// One row per year, `1..=horizon`.
    pub rows: Vec<YearRow>,
    /// Total bytes per message kind over the whole run.
    pub kind_bytes: Vec<(String, u64)>,
    pub total_bytes: u64,
}

const CSV_HEADER: &str = "year,es_bytes_pre,es_bytes,es_entries,sh_evidence_bytes,sh_entries,sh_payload_bytes,\
renewal_commits,renewal_stamps,renewal_ms,access_client_bytes,baseline_client_bytes,traffic_ratio";

impl YearRow {
    fn csv(&self) -> String {
        format!(
            "{},{:.1},{:.1},{},{:.1},{},{:.1},{},{},{:.3},{:.1},{:.1},{:.6}",
            self.year,
            self.es_bytes_pre,
            self.es_bytes,
            self.es_entries,
            self.sh_evidence_bytes,
            self.sh_entries,
            self.sh_payload_bytes,
            self.renewal_commits,
            self.renewal_stamps,
            self.renewal_ms,
            self.access_client_bytes,
            self.baseline_client_bytes,
            self.traffic_ratio
        )
    }
}

impl CostReport {
    /// One line per year of the horizon, after a header.
    pub fn to_csv(&self) -> String {
        let mut s = format!("{CSV_HEADER}\n");
        for r in &self.rows {
            s.push_str(&r.csv());
            s.push('\n');
        }
        s
    }

    pub fn row(&self, year: u64) -> Option<&YearRow> {
        if year == 0 {
            return Some(&self.initial);
        }
        self.rows.iter().find(|r| r.year == year)
    }
}

fn mean_es_bytes(sys: &System) -> Result<f64, SystemError> {
    let m = sys.num_slots();
    let mut sum = 0usize;
    for i in 0..m {
        sum += sys.es_slot_bytes(i)?;
    }
    Ok(sum as f64 / m as f64)
}

/// Client traffic per access for the sharing-only ORAM: shares of `bytes(dat)`.
pub fn baseline_access_bytes(cfg: &Config, path_slots: usize) -> f64 {
    let request = 16.0;
    let share_msg = 32.0 + 8.0 + cfg.block_size_L as f64;
    path_slots as f64 * cfg.shareholders_n as f64 * (request + 2.0 * share_msg)
}

fn sample(sys: &mut System, year: u64, es_pre: f64, work: Workload, next_id: &mut BlockId) -> Result<YearRow, SystemError> {
    let m = sys.num_slots() as f64;
    let meta = &sys.client().meta;
    let sh_evidence_bytes = meta.iter().map(|x| x.evidence_bytes).sum::<u64>() as f64 / m;
    let sh_payload_bytes = meta.iter().map(|x| x.payload_bytes).sum::<u64>() as f64 / m;
    let mut row = YearRow {
        year,
        es_bytes_pre: es_pre,
        es_bytes: mean_es_bytes(sys)?,
        es_entries: sys.evidence_service().read(0)?.len() as u64,
        sh_evidence_bytes,
        sh_entries: meta[0].evidence_entries,
        sh_payload_bytes,
        baseline_client_bytes: baseline_access_bytes(sys.config(), sys.client().oram.path_len()),
        ..YearRow::default()
    };
    if work.reads_per_year > 0 {
        let before = sys.net().party_bytes(Party::Client);
        for _ in 0..work.reads_per_year {
            sys.read(*next_id)?;
            *next_id = *next_id % sys.config().N as BlockId + 1;
        }
        row.access_client_bytes = (sys.net().party_bytes(Party::Client) - before) as f64 / work.reads_per_year as f64;
        row.traffic_ratio = row.access_client_bytes / row.baseline_client_bytes;
    }
    Ok(row)
}

/// Runs init and then the whole horizon, sampling once per year.
pub fn simulate_schedule(cfg: Config, work: Workload) -> Result<CostReport, SystemError> {
    let mut sys = System::init(cfg)?;
    simulate_on(&mut sys, work, |_, _| Ok(()))
}

/// As [`simulate_schedule`] on an existing system. `hook` runs after each
/// yearly sample, e.g. for audits.
pub fn simulate_on(
    sys: &mut System,
    work: Workload,
    mut hook: impl FnMut(&System, u64) -> Result<(), SystemError>,
) -> Result<CostReport, SystemError> {
    let mut next_id: BlockId = 1;
    let start = sys.now().years();
    let initial_es = mean_es_bytes(sys)?;
    let initial = sample(sys, start, initial_es, work, &mut next_id)?;
    hook(sys, start)?;
    let mut rows = Vec::new();
    let costs = sys.config().costs.clone();
    for year in start + 1..=sys.config().horizon_years {
        let at = Day::from_years(year);
        let eve = Day(at.0 - 1);
        if eve > sys.now() {
            sys.advance(eve)?;
        }
        let es_pre = mean_es_bytes(sys)?;
        let before: OpCounts = sys.ops();
        sys.advance(at)?;
        let spent = sys.ops().minus(&before);
        let mut row = sample(sys, year, es_pre, work, &mut next_id)?;
        row.renewal_commits = spent.commits;
        row.renewal_stamps = spent.stamps;
        row.renewal_ms = spent.cost_ms(&costs);
        rows.push(row);
        hook(sys, year)?;
    }
    let kinds = sys.net().kind_totals();
    let kind_bytes: Vec<(String, u64)> = kinds.iter().map(|(k, c)| (k.to_string(), c.bytes)).collect();
    let total_bytes = sys.net().total(|_, _, _| true).bytes;
    debug_assert_eq!(total_bytes, kinds.values().map(|c| c.bytes).sum::<u64>());
    Ok(CostReport { initial, rows, kind_bytes, total_bytes })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tiny_schedule_counts() {
        let rep = simulate_schedule(Config::tiny(), Workload::default()).unwrap();
        assert_eq!(rep.rows.len(), 20);
        let es: Vec<u64> = rep.rows.iter().map(|r| r.es_entries).collect();
        assert_eq!(&es[..10], &[1, 2, 2, 3, 3, 4, 4, 5, 5, 1]);
        assert_eq!(rep.rows[19].sh_entries, 11);
        assert!(rep.rows[6].es_bytes_pre < rep.rows[9].es_bytes_pre);
        assert!(rep.rows[9].es_bytes < rep.rows[9].es_bytes_pre);
        assert_eq!(rep.to_csv().lines().count(), 21);
        assert_eq!(rep.total_bytes, rep.kind_bytes.iter().map(|x| x.1).sum::<u64>());
    }

    #[test]
    fn workload_traffic_grows() {
        let rep = simulate_schedule(Config::tiny(), Workload { reads_per_year: 1 }).unwrap();
        let r0 = rep.initial.traffic_ratio;
        let r10 = rep.row(10).unwrap().traffic_ratio;
        let r20 = rep.row(20).unwrap().traffic_ratio;
        assert!(r0 > 1.0 && r0 < r10 && r10 < r20, "{r0} {r10} {r20}");
    }
}
