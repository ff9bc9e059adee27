//! Regularly indexed time series and the machinery shared by every CRI:
//! calendar arithmetic, daily-to-monthly aggregation, panel alignment,
//! climatologies and anomalies, and generic transforms.

mod climatology;
mod panel;
mod transform;

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use climatology::{anomaly_series, monthly_climatology, Climatology, DEFAULT_BASELINE};
pub use panel::{align_panel, Join, Panel};
pub use transform::{
    degree_days, percentile_rank, simple_returns, standardize, threshold_day_count, Comparator,
    DegreeDayMode, Grouping, ReturnMode,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Frequency {
    Daily,
    Monthly,
}

impl Frequency {
    /// Integer position of `date` on this frequency's grid.
    pub(crate) fn ordinal(self, date: NaiveDate) -> i64 {
        match self {
            Frequency::Daily => i64::from(date.num_days_from_ce()),
            Frequency::Monthly => i64::from(date.year()) * 12 + i64::from(date.month0()),
        }
    }

    pub(crate) fn date(self, ordinal: i64) -> NaiveDate {
        match self {
            Frequency::Daily => NaiveDate::from_num_days_from_ce_opt(ordinal as i32)
                .expect("day ordinal within chrono range"),
            Frequency::Monthly => {
                let year = ordinal.div_euclid(12) as i32;
                let month = ordinal.rem_euclid(12) as u32 + 1;
                NaiveDate::from_ymd_opt(year, month, 1).expect("month ordinal within chrono range")
            }
        }
    }

    pub(crate) fn is_on_grid(self, date: NaiveDate) -> bool {
        match self {
            Frequency::Daily => true,
            Frequency::Monthly => date.day() == 1,
        }
    }
}

impl std::fmt::Display for Frequency {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Frequency::Daily => "daily",
            Frequency::Monthly => "monthly",
        })
    }
}

/// How daily values are folded into a calendar month.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Aggregate {
    /// State variables such as temperature.
    #[default]
    Mean,
    /// Fluxes such as precipitation.
    Sum,
    Last,
}

impl Aggregate {
    fn apply(self, values: &[f64]) -> f64 {
        match self {
            Aggregate::Mean => values.iter().sum::<f64>() / values.len() as f64,
            Aggregate::Sum => values.iter().sum(),
            Aggregate::Last => *values.last().expect("non-empty month"),
        }
    }
}

/// A named sequence of values on a regular daily or monthly grid.
///
/// Values sit at exact frequency steps from `start`; gaps are explicit `None`
/// entries. Monthly series are anchored on the first day of the month.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    id: String,
    frequency: Frequency,
    start: NaiveDate,
    values: Vec<Option<f64>>,
    units: String,
    flags: Vec<String>,
}

impl TimeSeries {
    pub fn new(
        id: impl Into<String>,
        frequency: Frequency,
        start: NaiveDate,
        values: Vec<Option<f64>>,
    ) -> Result<Self> {
        let id = id.into();
        if id.trim().is_empty() {
            return Err(Error::Domain("series id must be non-empty".into()));
        }
        if !frequency.is_on_grid(start) {
            return Err(Error::Frequency(format!(
                "monthly series `{id}` must start on the first of a month, got {start}"
            )));
        }
        if let Some(pos) = values.iter().position(|v| v.is_some_and(|x| !x.is_finite())) {
            return Err(Error::Domain(format!(
                "series `{id}` has a non-finite value at position {pos}"
            )));
        }
        Ok(TimeSeries {
            id,
            frequency,
            start,
            values,
            units: String::new(),
            flags: Vec::new(),
        })
    }

    /// Fully observed series.
    pub fn from_values(
        id: impl Into<String>,
        frequency: Frequency,
        start: NaiveDate,
        values: impl IntoIterator<Item = f64>,
    ) -> Result<Self> {
        Self::new(id, frequency, start, values.into_iter().map(Some).collect())
    }

    pub fn with_units(mut self, units: impl Into<String>) -> Self {
        self.units = units.into();
        self
    }

    pub fn with_flag(mut self, flag: impl Into<String>) -> Self {
        self.flags.push(flag.into());
        self
    }

    pub(crate) fn with_flags(mut self, flags: impl IntoIterator<Item = String>) -> Self {
        self.flags.extend(flags);
        self
    }

    pub(crate) fn renamed(mut self, id: impl Into<String>) -> Self {
        self.id = id.into();
        self
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn frequency(&self) -> Frequency {
        self.frequency
    }

    pub fn start(&self) -> NaiveDate {
        self.start
    }

    pub fn units(&self) -> &str {
        &self.units
    }

    /// Metadata notes attached by the operations that produced the series
    /// (dropped partial months, estimator fallbacks, replaced zeros, ...).
    pub fn flags(&self) -> &[String] {
        &self.flags
    }

    pub fn values(&self) -> &[Option<f64>] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn date_at(&self, index: usize) -> NaiveDate {
        self.frequency
            .date(self.frequency.ordinal(self.start) + index as i64)
    }

    /// Date of the last sample; `None` for an empty series.
    pub fn end(&self) -> Option<NaiveDate> {
        (!self.is_empty()).then(|| self.date_at(self.len() - 1))
    }

    pub fn index_of(&self, date: NaiveDate) -> Option<usize> {
        if !self.frequency.is_on_grid(date) {
            return None;
        }
        let offset = self.frequency.ordinal(date) - self.frequency.ordinal(self.start);
        (0..self.len() as i64)
            .contains(&offset)
            .then_some(offset as usize)
    }

    pub fn get(&self, date: NaiveDate) -> Option<f64> {
        self.index_of(date).and_then(|i| self.values[i])
    }

    /// Dated samples, including gaps.
    pub fn iter(&self) -> impl Iterator<Item = (NaiveDate, Option<f64>)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(i, v)| (self.date_at(i), *v))
    }

    /// Dated samples with gaps skipped.
    pub fn observed(&self) -> impl Iterator<Item = (NaiveDate, f64)> + '_ {
        self.iter().filter_map(|(d, v)| v.map(|x| (d, x)))
    }

    pub fn missing_count(&self) -> usize {
        self.values.iter().filter(|v| v.is_none()).count()
    }

    /// Same id, grid and metadata with new values.
    pub(crate) fn map_values(&self, values: Vec<Option<f64>>) -> TimeSeries {
        debug_assert_eq!(values.len(), self.values.len());
        TimeSeries {
            values,
            ..self.clone()
        }
    }

    pub(crate) fn require_frequency(&self, frequency: Frequency) -> Result<()> {
        if self.frequency != frequency {
            return Err(Error::Frequency(format!(
                "series `{}` is {}, expected {frequency}",
                self.id, self.frequency
            )));
        }
        Ok(())
    }

    /// Folds a daily series into calendar months with `reduce`.
    ///
    /// Incomplete months at either edge are dropped and recorded as
    /// `partial_month_dropped:YYYY-MM` flags. A month containing a missing
    /// day becomes missing.
    pub(crate) fn fold_months(&self, reduce: impl Fn(&[f64]) -> f64) -> Result<TimeSeries> {
        self.require_frequency(Frequency::Daily)?;
        let end = self
            .end()
            .ok_or_else(|| Error::Coverage(format!("series `{}` is empty", self.id)))?;
        let mut flags = Vec::new();
        let mut first_month = Frequency::Monthly.ordinal(self.start);
        if self.start.day() != 1 {
            flags.push(format!("partial_month_dropped:{}", self.start.format("%Y-%m")));
            first_month += 1;
        }
        let mut last_month = Frequency::Monthly.ordinal(end);
        if end.succ_opt().is_none_or(|next| next.day() != 1) {
            flags.push(format!("partial_month_dropped:{}", end.format("%Y-%m")));
            last_month -= 1;
        }
        if last_month < first_month {
            return Err(Error::Coverage(format!(
                "series `{}` contains no complete calendar month",
                self.id
            )));
        }

        let mut out = Vec::with_capacity((last_month - first_month + 1) as usize);
        let mut buf = Vec::with_capacity(31);
        for month in first_month..=last_month {
            let month_start = Frequency::Monthly.date(month);
            let next_start = Frequency::Monthly.date(month + 1);
            let i0 = self.index_of(month_start).expect("complete month inside span");
            let days = (next_start - month_start).num_days() as usize;
            buf.clear();
            let complete = self.values[i0..i0 + days].iter().all(|v| match v {
                Some(x) => {
                    buf.push(*x);
                    true
                }
                None => false,
            });
            out.push(complete.then(|| reduce(&buf)));
        }
        Ok(TimeSeries {
            id: self.id.clone(),
            frequency: Frequency::Monthly,
            start: Frequency::Monthly.date(first_month),
            values: out,
            units: self.units.clone(),
            flags: self.flags.iter().cloned().chain(flags).collect(),
        })
    }

    /// Monthly view of the series; a monthly series is returned unchanged.
    pub fn to_monthly(&self, aggregate: Aggregate) -> Result<TimeSeries> {
        match self.frequency {
            Frequency::Monthly => Ok(self.clone()),
            Frequency::Daily => self.fold_months(|days| aggregate.apply(days)),
        }
    }
}
