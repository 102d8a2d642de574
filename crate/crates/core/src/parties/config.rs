//! System configuration and the instance calendar.

use crate::crypto::HashBits;
use crate::time::{Day, Window, EPOCH_YEAR};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConfigError {
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error("config parse error: {0}")]
    Parse(String),
}

fn invalid<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError::Invalid(msg.into()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignatureRow {
    pub name: String,
    pub sig_bytes: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommitmentRow {
    pub name: String,
    pub hash_bits: u32,
}

/// One row of the instance calendar: calendar years, inclusive.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceRow {
    pub from_year: u32,
    pub to_year: u32,
    pub signature: SignatureRow,
    pub commitment: CommitmentRow,
}

/// Padding of shared payloads.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Padding {
    /// Pad to a public bound that depends only on the current time.
    #[default]
    WorstCase,
    /// No padding beyond the data block; payload length tracks evidence length.
    None,
}

/// Per-operation cost constants (milliseconds) for the compute-cost columns.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OpCosts {
    pub commit_ms: f64,
    pub stamp_ms: f64,
    pub verify_ms: f64,
    pub share_ms_per_kb: f64,
    pub reconstruct_ms_per_kb: f64,
}

impl Default for OpCosts {
    fn default() -> Self {
        OpCosts { commit_ms: 0.2, stamp_ms: 2.0, verify_ms: 0.1, share_ms_per_kb: 0.01, reconstruct_ms_per_kb: 0.01 }
    }
}

#[allow(non_snake_case)]
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Config {
    pub N: usize,
    pub block_size_L: usize,
    pub shareholders_n: usize,
    pub threshold_k: usize,
    pub bucket_Z: usize,
    pub horizon_years: u64,
    pub ts_interval_years: u64,
    pub com_interval_years: u64,
    pub instances: Vec<InstanceRow>,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reshare_interval_years: Option<u64>,
    #[serde(default)]
    pub padding: Padding,
    #[serde(default)]
    pub costs: OpCosts,
}

fn row(from: u32, to: u32, sig: &str, sig_bytes: usize, com: &str, bits: u32) -> InstanceRow {
    InstanceRow {
        from_year: from,
        to_year: to,
        signature: SignatureRow { name: sig.into(), sig_bytes },
        commitment: CommitmentRow { name: com.into(), hash_bits: bits },
    }
}

/// The four-row calendar used in the evaluation, with the given signature sizes.
pub fn table_rows(rsa: usize, xmss256: usize, xmss512: usize) -> Vec<InstanceRow> {
    vec![
        row(2018, 2030, "RSA-2048", rsa, "HM-224", 224),
        row(2031, 2066, "XMSS-256", xmss256, "HM-224", 224),
        row(2067, 2091, "XMSS-256", xmss256, "HM-256", 256),
        row(2091, 2118, "XMSS-512", xmss512, "HM-384", 384),
    ]
}

pub const RSA_2048_SIG: usize = 256;
pub const XMSS_256_SIG: usize = 2_500;
pub const XMSS_512_SIG: usize = 9_100;

impl Config {
    /// Evaluation parameters: 100 years, 3 shareholders, full signature sizes.
    pub fn paper(n_blocks: usize) -> Config {
        Config {
            N: n_blocks,
            block_size_L: 100 * 1024,
            shareholders_n: 3,
            threshold_k: 2,
            bucket_Z: 5,
            horizon_years: 100,
            ts_interval_years: 2,
            com_interval_years: 10,
            instances: table_rows(RSA_2048_SIG, XMSS_256_SIG, XMSS_512_SIG),
            seed: 2018,
            reshare_interval_years: None,
            padding: Padding::WorstCase,
            costs: OpCosts::default(),
        }
    }

    /// Desk-scale variant: 1 KB blocks and bare 64-byte signatures.
    pub fn desk(n_blocks: usize) -> Config {
        Config { block_size_L: 1024, instances: table_rows(64, 64, 64), ..Config::paper(n_blocks) }
    }

    /// A few blocks, a short horizon and small sizes, for tests and experiments.
    pub fn tiny() -> Config {
        Config {
            N: 4,
            block_size_L: 32,
            horizon_years: 20,
            instances: table_rows(64, 64, 64),
            seed: 7,
            ..Config::paper(4)
        }
    }

    pub fn from_json(s: &str) -> Result<Config, ConfigError> {
        let cfg: Config = serde_json::from_str(s).map_err(|e| ConfigError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn horizon(&self) -> Day {
        Day::from_years(self.horizon_years)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.N == 0 || self.bucket_Z == 0 || self.block_size_L == 0 {
            return invalid("N, Z and L must be positive");
        }
        if self.N > u32::MAX as usize {
            return invalid("N too large");
        }
        if self.threshold_k == 0 || self.threshold_k > self.shareholders_n || self.shareholders_n > 255 {
            return invalid("need 1 <= k <= n <= 255");
        }
        if self.ts_interval_years == 0 || self.com_interval_years == 0 {
            return invalid("renewal intervals must be positive");
        }
        if self.com_interval_years % self.ts_interval_years != 0 {
            return invalid("commitment interval must be a multiple of the timestamp interval");
        }
        if self.horizon_years % self.ts_interval_years != 0 || self.horizon_years % self.com_interval_years != 0 {
            return invalid("renewal intervals must divide the horizon");
        }
        if self.reshare_interval_years == Some(0) {
            return invalid("reshare interval must be positive");
        }
        if self.instances.is_empty() {
            return invalid("instance table is empty");
        }
        for (i, r) in self.instances.iter().enumerate() {
            if r.from_year > r.to_year || r.from_year < EPOCH_YEAR {
                return invalid(format!("row {i}: bad year range"));
            }
            if HashBits::from_bits(r.commitment.hash_bits).is_none() {
                return invalid(format!("row {i}: hash_bits must be 224, 256 or 384"));
            }
            if r.signature.sig_bytes < 64 {
                return invalid(format!("row {i}: signatures are at least 64 bytes"));
            }
            if i > 0 {
                let p = &self.instances[i - 1];
                if r.from_year <= p.from_year || r.from_year > p.to_year + 1 {
                    return invalid(format!("row {i}: rows must be ordered and leave no gap"));
                }
            }
        }
        if self.instances[0].from_year != EPOCH_YEAR {
            return invalid("instance table must start at the epoch");
        }
        let last = self.instances.last().unwrap();
        if (last.to_year as u64) < EPOCH_YEAR as u64 + self.horizon_years {
            return invalid("instance table does not cover the horizon");
        }
        for r in &self.instances {
            for q in &self.instances {
                if r.signature.name == q.signature.name && r.signature.sig_bytes != q.signature.sig_bytes {
                    return invalid(format!("conflicting sizes for {}", r.signature.name));
                }
                if r.commitment.name == q.commitment.name && r.commitment.hash_bits != q.commitment.hash_bits {
                    return invalid(format!("conflicting sizes for {}", r.commitment.name));
                }
            }
        }
        Ok(())
    }

    /// Days on which each row is the active one. A later row takes over from its first year.
    pub fn row_windows(&self) -> Vec<Window> {
        let rows = &self.instances;
        rows.iter()
            .enumerate()
            .map(|(i, r)| {
                let start = Day::from_calendar_year(r.from_year);
                let natural_end = Day::from_calendar_year(r.to_year + 1).0 - 1;
                let end = match rows.get(i + 1) {
                    Some(next) => natural_end.min(Day::from_calendar_year(next.from_year).0 - 1),
                    None => natural_end,
                };
                Window::new(start, Day(end))
            })
            .collect()
    }

    /// Index of the row active at `t`.
    pub fn row_at(&self, t: Day) -> usize {
        self.row_windows().iter().rposition(|w| w.start <= t).unwrap_or(0)
    }

    /// Merged instances with usage and validity windows, in first-use order.
    pub fn planned_instances(&self) -> Vec<PlannedInstance> {
        let windows = self.row_windows();
        let mut out: Vec<PlannedInstance> = Vec::new();
        let ts_grace = Day::from_years(self.ts_interval_years).0;
        let com_grace = Day::from_years(self.com_interval_years).0;
        for (r, w) in self.instances.iter().zip(&windows) {
            let entries = [
                (r.signature.name.clone(), PlannedKind::Signature { sig_bytes: r.signature.sig_bytes }, ts_grace),
                (
                    r.commitment.name.clone(),
                    PlannedKind::Commitment { hash: HashBits::from_bits(r.commitment.hash_bits).expect("validated") },
                    com_grace,
                ),
            ];
            for (name, kind, grace) in entries {
                match out.iter_mut().find(|p| p.name == name) {
                    Some(p) => {
                        p.usage.end = p.usage.end.max(w.end);
                        p.validity.end = Day(p.usage.end.0 + grace);
                    }
                    None => out.push(PlannedInstance {
                        name,
                        kind,
                        usage: *w,
                        validity: Window::new(w.start, Day(w.end.0 + grace)),
                    }),
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PlannedKind {
    Signature { sig_bytes: usize },
    Commitment { hash: HashBits },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlannedInstance {
    pub name: String,
    pub kind: PlannedKind,
    pub usage: Window,
    pub validity: Window,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paper_config_is_valid() {
        Config::paper(256).validate().unwrap();
        Config::desk(256).validate().unwrap();
        Config::tiny().validate().unwrap();
    }

    #[test]
    fn json_roundtrip_uses_documented_keys() {
        let cfg = Config::tiny();
        let s = cfg.to_json();
        for key in ["\"N\"", "block_size_L", "shareholders_n", "threshold_k", "bucket_Z", "horizon_years", "ts_interval_years", "com_interval_years", "instances", "seed"] {
            assert!(s.contains(key), "{key}");
        }
        assert_eq!(Config::from_json(&s).unwrap(), cfg);
    }

    #[test]
    fn overlapping_year_goes_to_later_row() {
        let cfg = Config::paper(1);
        assert_eq!(cfg.row_at(Day::from_calendar_year(2090)), 2);
        assert_eq!(cfg.row_at(Day::from_calendar_year(2091)), 3);
        assert_eq!(cfg.row_at(Day(0)), 0);
        assert_eq!(cfg.row_at(Day::from_calendar_year(2031).plus_days(0)), 1);
        assert_eq!(cfg.row_at(Day(Day::from_calendar_year(2031).0 - 1)), 0);
    }

    #[test]
    fn merged_instances() {
        let plan = Config::paper(1).planned_instances();
        let names: Vec<&str> = plan.iter().map(|p| p.name.as_str()).collect();
        assert_eq!(names, vec!["RSA-2048", "HM-224", "XMSS-256", "HM-256", "XMSS-512", "HM-384"]);
        let xmss = &plan[2];
        assert_eq!(xmss.usage.start, Day::from_calendar_year(2031));
        assert_eq!(xmss.usage.end, Day(Day::from_calendar_year(2091).0 - 1));
        let hm224 = &plan[1];
        assert_eq!(hm224.usage.end, Day(Day::from_calendar_year(2067).0 - 1));
        assert_eq!(hm224.validity.end, Day(hm224.usage.end.0 + 3650));
        let rsa = &plan[0];
        assert_eq!(rsa.validity.end, Day(rsa.usage.end.0 + 730));
    }

    #[test]
    fn rejects_bad_configs() {
        let mut c = Config::tiny();
        c.threshold_k = 4;
        assert!(c.validate().is_err());
        let mut c = Config::tiny();
        c.horizon_years = 21;
        assert!(c.validate().is_err());
        let mut c = Config::tiny();
        c.instances.truncate(0);
        assert!(c.validate().is_err());
        let mut c = Config::paper(4);
        c.horizon_years = 110;
        assert!(c.validate().is_err());
    }
}
