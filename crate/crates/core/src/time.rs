//! Simulated time: whole days since 2018-01-01, with 365-day years.

use serde::{Deserialize, Serialize};
use std::fmt;

pub const DAYS_PER_YEAR: u64 = 365;
pub const EPOCH_YEAR: u32 = 2018;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Day(pub u64);

impl Day {
    pub const ZERO: Day = Day(0);

    /// Start of the given number of years after the epoch.
    pub fn from_years(years: u64) -> Day {
        Day(years * DAYS_PER_YEAR)
    }

    /// Start of a calendar year. Years before the epoch clamp to day 0.
    pub fn from_calendar_year(year: u32) -> Day {
        Day::from_years(year.saturating_sub(EPOCH_YEAR) as u64)
    }

    /// Whole years elapsed since the epoch.
    pub fn years(self) -> u64 {
        self.0 / DAYS_PER_YEAR
    }

    pub fn calendar_year(self) -> u64 {
        EPOCH_YEAR as u64 + self.years()
    }

    pub fn plus_days(self, d: u64) -> Day {
        Day(self.0 + d)
    }
}

impl fmt::Display for Day {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "day {}", self.0)
    }
}

/// Closed interval of days.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub start: Day,
    pub end: Day,
}

impl Window {
    pub fn new(start: Day, end: Day) -> Window {
        Window { start, end }
    }

    pub fn contains(&self, t: Day) -> bool {
        self.start <= t && t <= self.end
    }

    pub fn is_well_formed(&self) -> bool {
        self.start < self.end
    }
}
