//! Renewal calendar and the simulated clock.

use super::Config;
use crate::time::Day;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum EventKind {
    RenewTs,
    RenewCom,
    Reshare,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Event {
    pub at: Day,
    pub kind: EventKind,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schedule {
    pub horizon_years: u64,
    pub ts_interval_years: u64,
    pub com_interval_years: u64,
    pub reshare_interval_years: Option<u64>,
}

impl Schedule {
    pub fn from_config(cfg: &Config) -> Schedule {
        Schedule {
            horizon_years: cfg.horizon_years,
            ts_interval_years: cfg.ts_interval_years,
            com_interval_years: cfg.com_interval_years,
            reshare_interval_years: cfg.reshare_interval_years,
        }
    }

    /// Events at year `y`. ReCom subsumes ReTs, and Reshare, at the same point.
    fn events_in_year(&self, y: u64) -> Vec<Event> {
        let at = Day::from_years(y);
        let mut v = Vec::new();
        let recom = y % self.com_interval_years == 0;
        if recom {
            v.push(Event { at, kind: EventKind::RenewCom });
        } else if y % self.ts_interval_years == 0 {
            v.push(Event { at, kind: EventKind::RenewTs });
        }
        if let Some(r) = self.reshare_interval_years {
            if y % r == 0 && !recom {
                v.push(Event { at, kind: EventKind::Reshare });
            }
        }
        v
    }

    /// All events over the horizon, in execution order.
    pub fn events(&self) -> Vec<Event> {
        (1..=self.horizon_years).flat_map(|y| self.events_in_year(y)).collect()
    }

    /// Events with `after < at <= upto`.
    pub fn events_between(&self, after: Day, upto: Day) -> Vec<Event> {
        self.events().into_iter().filter(|e| e.at > after && e.at <= upto).collect()
    }

    /// Renewal events (ReTs or ReCom) at or before `t`.
    pub fn renewals_until(&self, t: Day) -> Vec<Event> {
        self.events().into_iter().filter(|e| e.at <= t && e.kind != EventKind::Reshare).collect()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Clock {
    pub now: Day,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sched() -> Schedule {
        Schedule { horizon_years: 100, ts_interval_years: 2, com_interval_years: 10, reshare_interval_years: None }
    }

    #[test]
    fn hundred_year_counts() {
        let ev = sched().events();
        assert_eq!(ev.iter().filter(|e| e.kind == EventKind::RenewTs).count(), 40);
        assert_eq!(ev.iter().filter(|e| e.kind == EventKind::RenewCom).count(), 10);
        assert!(ev.windows(2).all(|w| w[0].at <= w[1].at));
    }

    #[test]
    fn one_decade() {
        let ev = sched().events_between(Day(0), Day::from_years(10));
        let kinds: Vec<EventKind> = ev.iter().map(|e| e.kind).collect();
        use EventKind::*;
        assert_eq!(kinds, vec![RenewTs, RenewTs, RenewTs, RenewTs, RenewCom]);
        assert!(sched().events_between(Day(0), Day(1)).is_empty());
    }

    #[test]
    fn reshare_subsumed_by_recom() {
        let s = Schedule { reshare_interval_years: Some(5), ..sched() };
        let ev = s.events_between(Day(0), Day::from_years(10));
        assert_eq!(ev.iter().filter(|e| e.kind == EventKind::Reshare).count(), 1);
    }
}
