use chrono::Datelike;
use serde::{Deserialize, Serialize};

use super::{Aggregate, Frequency, TimeSeries};
use crate::error::{Error, Result};

/// Baseline used when a caller does not name one.
pub const DEFAULT_BASELINE: (i32, i32) = (1981, 2010);

const STRICT_MIN_YEARS: i32 = 30;

/// Per-calendar-month means over a baseline period.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Climatology {
    /// January first.
    pub period_means: [f64; 12],
    pub baseline_start: i32,
    pub baseline_end: i32,
    pub source_id: String,
    /// Set when the baseline is shorter than thirty years.
    pub short_baseline: bool,
}

impl Climatology {
    pub fn mean_for_month(&self, month: u32) -> f64 {
        self.period_means[(month - 1) as usize]
    }
}

/// Averages each calendar month over `baseline_start..=baseline_end`.
///
/// Daily input is folded to monthly means first. With `strict`, the baseline
/// must span at least thirty years; shorter baselines are accepted otherwise
/// and marked with `short_baseline`.
pub fn monthly_climatology(
    s: &TimeSeries,
    baseline_start: i32,
    baseline_end: i32,
    strict: bool,
) -> Result<Climatology> {
    if baseline_end < baseline_start {
        return Err(Error::Baseline(format!(
            "baseline {baseline_start}-{baseline_end} is reversed"
        )));
    }
    let years = baseline_end - baseline_start + 1;
    if strict && years < STRICT_MIN_YEARS {
        return Err(Error::Baseline(format!(
            "strict climatology needs a {STRICT_MIN_YEARS}-year baseline, got {years}"
        )));
    }
    let monthly = s.to_monthly(Aggregate::Mean)?;
    let (Some(first), Some(last)) = (monthly.observed().next(), monthly.end()) else {
        return Err(Error::Coverage(format!("series `{}` has no observations", s.id())));
    };
    if first.0.year() > baseline_start || last.year() < baseline_end {
        return Err(Error::Baseline(format!(
            "baseline {baseline_start}-{baseline_end} is outside the span of `{}` ({}..{})",
            s.id(),
            first.0,
            last
        )));
    }

    let mut sums = [0.0; 12];
    let mut counts = [0usize; 12];
    for (date, v) in monthly.observed() {
        if (baseline_start..=baseline_end).contains(&date.year()) {
            let m = date.month0() as usize;
            sums[m] += v;
            counts[m] += 1;
        }
    }
    let mut period_means = [0.0; 12];
    for m in 0..12 {
        if counts[m] == 0 {
            return Err(Error::Coverage(format!(
                "no baseline observations of `{}` for calendar month {}",
                s.id(),
                m + 1
            )));
        }
        period_means[m] = sums[m] / counts[m] as f64;
    }
    Ok(Climatology {
        period_means,
        baseline_start,
        baseline_end,
        source_id: s.id().to_owned(),
        short_baseline: years < STRICT_MIN_YEARS,
    })
}

/// Departure of each monthly value from its calendar-month climatology.
pub fn anomaly_series(s: &TimeSeries, c: &Climatology) -> Result<TimeSeries> {
    s.require_frequency(Frequency::Monthly)?;
    let values = s
        .iter()
        .map(|(date, v)| v.map(|x| x - c.mean_for_month(date.month())))
        .collect();
    let mut out = s.map_values(values).renamed(format!("{}_anom", s.id()));
    if c.short_baseline {
        out = out.with_flag(format!(
            "short_baseline:{}-{}",
            c.baseline_start, c.baseline_end
        ));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::NaiveDate;
    use proptest::prelude::*;

    fn monthly(start_year: i32, values: Vec<f64>) -> TimeSeries {
        TimeSeries::from_values(
            "x",
            Frequency::Monthly,
            NaiveDate::from_ymd_opt(start_year, 1, 1).unwrap(),
            values,
        )
        .unwrap()
    }

    #[test]
    fn constant_series_gives_constant_climatology() {
        let s = monthly(1981, vec![5.0; 360]);
        let c = monthly_climatology(&s, 1981, 2010, true).unwrap();
        assert_eq!(c.period_means, [5.0; 12]);
        assert!(!c.short_baseline);
    }

    #[test]
    fn seasonal_cycle_matches_brute_force_grouping() {
        let values: Vec<f64> = (0..31 * 12)
            .map(|t| 10.0 * (2.0 * std::f64::consts::PI * (t % 12) as f64 / 12.0).sin() + (t as f64) * 0.01)
            .collect();
        let s = monthly(1980, values.clone());
        let c = monthly_climatology(&s, 1980, 2010, true).unwrap();
        for m in 0..12 {
            let group: Vec<f64> = values.iter().skip(m).step_by(12).copied().collect();
            let mean = group.iter().sum::<f64>() / group.len() as f64;
            assert!((c.period_means[m] - mean).abs() < 1e-12);
        }
    }

    #[test]
    fn baseline_rules() {
        let s = monthly(2000, vec![1.0; 120]);
        assert!(matches!(monthly_climatology(&s, 2000, 2009, true), Err(Error::Baseline(_))));
        let c = monthly_climatology(&s, 2000, 2009, false).unwrap();
        assert!(c.short_baseline);
        assert!(matches!(monthly_climatology(&s, 1995, 2005, false), Err(Error::Baseline(_))));
        assert!(matches!(monthly_climatology(&s, 2005, 2001, false), Err(Error::Baseline(_))));
    }

    #[test]
    fn month_without_observations_is_a_coverage_error() {
        let values: Vec<Option<f64>> = (0..36).map(|t| (t % 12 != 3).then_some(1.0)).collect();
        let s = TimeSeries::new("x", Frequency::Monthly, NaiveDate::from_ymd_opt(2000, 1, 1).unwrap(), values).unwrap();
        assert!(matches!(monthly_climatology(&s, 2000, 2002, false), Err(Error::Coverage(_))));
    }

    #[test]
    fn anomalies_of_climatology_and_shift() {
        let base: Vec<f64> = (0..360).map(|t| (t % 12) as f64 * 1.25).collect();
        let s = monthly(1981, base.clone());
        let c = monthly_climatology(&s, 1981, 2010, true).unwrap();
        let a = anomaly_series(&s, &c).unwrap();
        assert_eq!(a.id(), "x_anom");
        assert!(a.values().iter().all(|v| v.unwrap().abs() < 1e-12));
        let shifted = monthly(1981, base.iter().map(|x| x + 1.5).collect());
        let a = anomaly_series(&shifted, &c).unwrap();
        assert!(a.values().iter().all(|v| (v.unwrap() - 1.5).abs() < 1e-12));
    }

    #[test]
    fn anomaly_requires_monthly() {
        let s = monthly(1981, vec![1.0; 360]);
        let c = monthly_climatology(&s, 1981, 2010, true).unwrap();
        let daily = TimeSeries::from_values("d", Frequency::Daily, NaiveDate::from_ymd_opt(2000, 1, 1).unwrap(), [1.0]).unwrap();
        assert!(matches!(anomaly_series(&daily, &c), Err(Error::Frequency(_))));
    }

    proptest! {
        #[test]
        fn anomaly_round_trip(values in proptest::collection::vec(-1e3f64..1e3, 24..60)) {
            let s = monthly(2001, values.clone());
            let years = (values.len() / 12) as i32;
            let c = monthly_climatology(&s, 2001, 2001 + years - 1, false).unwrap();
            let a = anomaly_series(&s, &c).unwrap();
            for ((date, anom), orig) in a.iter().zip(&values) {
                let rebuilt = anom.unwrap() + c.mean_for_month(date.month());
                prop_assert!((rebuilt - orig).abs() <= 1e-12 * orig.abs().max(1.0));
            }
        }
    }
}
