use std::collections::BTreeMap;

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};

use super::{Frequency, TimeSeries};
use crate::error::{Error, Result};

/// Rescales observed values to mean 0 and unit sample standard deviation.
pub fn standardize(s: &TimeSeries) -> Result<TimeSeries> {
    let obs: Vec<f64> = s.values().iter().flatten().copied().collect();
    if obs.len() < 2 {
        return Err(Error::DegenerateSeries(format!(
            "`{}` needs at least two observations to standardize",
            s.id()
        )));
    }
    let n = obs.len() as f64;
    let mean = obs.iter().sum::<f64>() / n;
    let sd = (obs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    if sd == 0.0 {
        return Err(Error::DegenerateSeries(format!("`{}` has zero variance", s.id())));
    }
    Ok(s.map_values(s.values().iter().map(|v| v.map(|x| (x - mean) / sd)).collect()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparator {
    Le,
    Ge,
    Gt,
    Lt,
}

impl Comparator {
    pub fn holds(self, value: f64, threshold: f64) -> bool {
        match self {
            Comparator::Le => value <= threshold,
            Comparator::Ge => value >= threshold,
            Comparator::Gt => value > threshold,
            Comparator::Lt => value < threshold,
        }
    }
}

/// Monthly number of days on which `comparator(value, threshold)` holds.
///
/// Partial months at the edges are dropped (flagged); a month with a missing
/// day is missing.
pub fn threshold_day_count(
    daily: &TimeSeries,
    comparator: Comparator,
    threshold: f64,
) -> Result<TimeSeries> {
    let out = daily.fold_months(|days| {
        days.iter().filter(|&&x| comparator.holds(x, threshold)).count() as f64
    })?;
    Ok(out.renamed(format!("{}_days", daily.id())).with_units("days"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DegreeDayMode {
    Cooling,
    Heating,
}

/// Monthly cooling (`Σ max(T − base, 0)`) or heating (`Σ max(base − T, 0)`)
/// degree days.
pub fn degree_days(daily: &TimeSeries, base: f64, mode: DegreeDayMode) -> Result<TimeSeries> {
    let out = daily.fold_months(|days| {
        days.iter()
            .map(|&t| match mode {
                DegreeDayMode::Cooling => (t - base).max(0.0),
                DegreeDayMode::Heating => (base - t).max(0.0),
            })
            .sum()
    })?;
    let suffix = match mode {
        DegreeDayMode::Cooling => "cdd",
        DegreeDayMode::Heating => "hdd",
    };
    Ok(out
        .renamed(format!("{}_{suffix}", daily.id()))
        .with_units("degree days"))
}

/// Which historical values a sample is ranked against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Grouping {
    SameMonth,
    /// Calendar day; 29 February shares the 28 February group.
    SameDayOfYear,
    Pooled,
}

impl Grouping {
    fn key(self, date: NaiveDate) -> (u32, u32) {
        match self {
            Grouping::SameMonth => (date.month(), 0),
            Grouping::SameDayOfYear => match (date.month(), date.day()) {
                (2, 29) => (2, 28),
                md => md,
            },
            Grouping::Pooled => (0, 0),
        }
    }
}

const MIN_BASELINE_PER_GROUP: usize = 10;

/// Weibull plotting-position percentile of each value against the baseline
/// values of its group.
///
/// The rank of `x` among `m` baseline values is `#{b < x} + (#{b = x} + 1) / 2`
/// (ties share the mean rank) and the output is `rank / (m + 1)`, which lies
/// strictly inside (0, 1).
pub fn percentile_rank(
    s: &TimeSeries,
    grouping: Grouping,
    baseline: (i32, i32),
) -> Result<TimeSeries> {
    if grouping == Grouping::SameDayOfYear {
        s.require_frequency(Frequency::Daily)?;
    }
    let (y0, y1) = baseline;
    let mut groups: BTreeMap<(u32, u32), Vec<f64>> = BTreeMap::new();
    for (date, v) in s.observed() {
        if (y0..=y1).contains(&date.year()) {
            groups.entry(grouping.key(date)).or_default().push(v);
        }
    }
    for g in groups.values_mut() {
        g.sort_by(f64::total_cmp);
    }

    let mut values = Vec::with_capacity(s.len());
    for (date, v) in s.iter() {
        let Some(x) = v else {
            values.push(None);
            continue;
        };
        let key = grouping.key(date);
        let group = groups.get(&key).map(Vec::as_slice).unwrap_or(&[]);
        if group.len() < MIN_BASELINE_PER_GROUP {
            return Err(Error::Coverage(format!(
                "`{}` has {} baseline values in group {key:?} for {y0}-{y1}, need {MIN_BASELINE_PER_GROUP}",
                s.id(),
                group.len()
            )));
        }
        values.push(Some(plotting_position(group, x)));
    }
    Ok(s.map_values(values)
        .renamed(format!("{}_pct", s.id()))
        .with_units("fraction"))
}

/// `rank / (m + 1)` of `x` against an ascending `sorted` sample.
fn plotting_position(sorted: &[f64], x: f64) -> f64 {
    let below = sorted.partition_point(|&b| b < x);
    let through = sorted.partition_point(|&b| b <= x);
    let rank = below as f64 + ((through - below) as f64 + 1.0) / 2.0;
    rank / (sorted.len() as f64 + 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReturnMode {
    #[default]
    Arithmetic,
    Log,
}

/// Period-over-period returns; the output starts one step after the input.
pub fn simple_returns(prices: &TimeSeries, mode: ReturnMode) -> Result<TimeSeries> {
    if prices.len() < 2 {
        return Err(Error::Domain(format!(
            "`{}` needs at least two prices for returns",
            prices.id()
        )));
    }
    if let Some((date, p)) = prices.observed().find(|&(_, p)| p <= 0.0) {
        return Err(Error::Domain(format!(
            "`{}` has non-positive price {p} on {date}",
            prices.id()
        )));
    }
    let values = prices
        .values()
        .windows(2)
        .map(|w| match (w[0], w[1]) {
            (Some(a), Some(b)) => Some(match mode {
                ReturnMode::Arithmetic => b / a - 1.0,
                ReturnMode::Log => (b / a).ln(),
            }),
            _ => None,
        })
        .collect();
    Ok(TimeSeries::new(
        format!("{}_ret", prices.id()),
        prices.frequency(),
        prices.date_at(1),
        values,
    )?
    .with_units("return")
    .with_flags(prices.flags().iter().cloned()))
}
