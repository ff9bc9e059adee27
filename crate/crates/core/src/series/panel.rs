use std::collections::HashSet;

use chrono::NaiveDate;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{Aggregate, Frequency, TimeSeries};
use crate::error::{Error, Result};

/// Missing-value policy for [`align_panel`]. There is no interpolation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Join {
    /// Keep the longest contiguous run of periods, inside the common span,
    /// on which every series is observed.
    #[default]
    Intersect,
    /// Use the full common span and fail on any missing value.
    ErrorOnGap,
}

/// `d` aligned series on a common regular index, stored as an `n × d` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Panel {
    frequency: Frequency,
    start: NaiveDate,
    ids: Vec<String>,
    data: DMatrix<f64>,
    centered: bool,
    standardized: bool,
    column_means: Vec<f64>,
    column_scales: Vec<f64>,
    flags: Vec<String>,
}

impl Panel {
    /// Raw (uncentered) panel from an `n × d` matrix.
    pub fn new(
        ids: Vec<String>,
        frequency: Frequency,
        start: NaiveDate,
        data: DMatrix<f64>,
    ) -> Result<Self> {
        if ids.len() != data.ncols() {
            return Err(Error::Consistency(format!(
                "{} ids for {} columns",
                ids.len(),
                data.ncols()
            )));
        }
        check_unique(ids.iter().map(String::as_str))?;
        if !frequency.is_on_grid(start) {
            return Err(Error::Frequency(format!("panel start {start} is not on the {frequency} grid")));
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::Domain("panel contains non-finite values".into()));
        }
        let d = ids.len();
        Ok(Panel {
            frequency,
            start,
            ids,
            data,
            centered: false,
            standardized: false,
            column_means: vec![0.0; d],
            column_scales: vec![1.0; d],
            flags: Vec::new(),
        })
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn frequency(&self) -> Frequency {
        self.frequency
    }

    pub fn start(&self) -> NaiveDate {
        self.start
    }

    pub fn n(&self) -> usize {
        self.data.nrows()
    }

    pub fn d(&self) -> usize {
        self.data.ncols()
    }

    pub fn data(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.data.column(j).iter().copied().collect()
    }

    pub fn date_at(&self, row: usize) -> NaiveDate {
        self.frequency
            .date(self.frequency.ordinal(self.start) + row as i64)
    }

    pub fn is_centered(&self) -> bool {
        self.centered
    }

    pub fn is_standardized(&self) -> bool {
        self.standardized
    }

    /// Means removed by [`Panel::center`] (original units).
    pub fn column_means(&self) -> &[f64] {
        &self.column_means
    }

    /// Divisors applied by [`Panel::standardize`] (1 when not standardized).
    pub fn column_scales(&self) -> &[f64] {
        &self.column_scales
    }

    pub fn flags(&self) -> &[String] {
        &self.flags
    }

    /// Subtracts each column mean; the means are kept for back-transforms.
    pub fn center(&self) -> Panel {
        let mut out = self.clone();
        for (j, mut col) in out.data.column_iter_mut().enumerate() {
            let mean = col.mean();
            col.add_scalar_mut(-mean);
            out.column_means[j] += mean * self.column_scales[j];
        }
        out.centered = true;
        out
    }

    /// Centers and scales each column to unit sample standard deviation.
    pub fn standardize(&self) -> Result<Panel> {
        let mut out = self.center();
        if out.n() < 2 {
            return Err(Error::DegenerateSeries("standardizing needs at least two rows".into()));
        }
        let n = out.n() as f64;
        for (j, mut col) in out.data.column_iter_mut().enumerate() {
            let sd = (col.norm_squared() / (n - 1.0)).sqrt();
            if sd == 0.0 || !sd.is_finite() {
                return Err(Error::DegenerateSeries(format!(
                    "column `{}` has zero variance",
                    self.ids[j]
                )));
            }
            col /= sd;
            out.column_scales[j] *= sd;
        }
        out.standardized = true;
        Ok(out)
    }

    /// Column `j` as a [`TimeSeries`] on the panel index.
    pub fn series(&self, j: usize) -> TimeSeries {
        TimeSeries::from_values(self.ids[j].clone(), self.frequency, self.start, self.column(j))
            .expect("panel columns are valid series")
    }

    /// Subset of columns in the given order.
    pub fn select(&self, columns: &[usize]) -> Panel {
        let data = self.data.select_columns(columns);
        Panel {
            ids: columns.iter().map(|&j| self.ids[j].clone()).collect(),
            data,
            column_means: columns.iter().map(|&j| self.column_means[j]).collect(),
            column_scales: columns.iter().map(|&j| self.column_scales[j]).collect(),
            ..self.clone()
        }
    }
}

fn check_unique<'a>(ids: impl IntoIterator<Item = &'a str>) -> Result<()> {
    let mut seen = HashSet::new();
    for id in ids {
        if !seen.insert(id) {
            return Err(Error::DuplicateId(id.to_owned()));
        }
    }
    Ok(())
}

/// Aligns series on a common index at `frequency`.
///
/// Daily series are folded to months with `aggregate` when the target is
/// monthly. Columns follow input order.
pub fn align_panel(
    series: &[TimeSeries],
    frequency: Frequency,
    join: Join,
    aggregate: Aggregate,
) -> Result<Panel> {
    if series.len() < 2 {
        return Err(Error::Alignment(format!(
            "need at least two series, got {}",
            series.len()
        )));
    }
    check_unique(series.iter().map(TimeSeries::id))?;

    let converted = series
        .iter()
        .map(|s| match (s.frequency(), frequency) {
            (a, b) if a == b => Ok(s.clone()),
            (Frequency::Daily, Frequency::Monthly) => s.to_monthly(aggregate),
            (Frequency::Monthly, Frequency::Daily) => Err(Error::Frequency(format!(
                "cannot align monthly series `{}` on a daily index",
                s.id()
            ))),
            _ => unreachable!(),
        })
        .collect::<Result<Vec<_>>>()?;

    let mut lo = i64::MIN;
    let mut hi = i64::MAX;
    for s in &converted {
        let Some(end) = s.end() else {
            return Err(Error::Alignment(format!("series `{}` is empty", s.id())));
        };
        lo = lo.max(frequency.ordinal(s.start()));
        hi = hi.min(frequency.ordinal(end));
    }
    if lo > hi {
        return Err(Error::Alignment("series spans do not intersect".into()));
    }

    let row_values = |t: i64| -> Vec<Option<f64>> {
        let date = frequency.date(t);
        converted.iter().map(|s| s.get(date)).collect()
    };

    let (first, last, mut flags) = match join {
        Join::ErrorOnGap => {
            for t in lo..=hi {
                for (s, v) in converted.iter().zip(row_values(t)) {
                    if v.is_none() {
                        return Err(Error::Gap {
                            id: s.id().to_owned(),
                            date: frequency.date(t).to_string(),
                        });
                    }
                }
            }
            (lo, hi, Vec::new())
        }
        Join::Intersect => {
            // longest fully observed run; earliest wins ties
            let mut best: Option<(i64, i64)> = None;
            let mut run_start = None;
            for t in lo..=hi + 1 {
                let complete = t <= hi && row_values(t).iter().all(Option::is_some);
                match (complete, run_start) {
                    (true, None) => run_start = Some(t),
                    (false, Some(s)) => {
                        if best.is_none_or(|(a, b)| t - 1 - s > b - a) {
                            best = Some((s, t - 1));
                        }
                        run_start = None;
                    }
                    _ => {}
                }
            }
            let (a, b) = best.ok_or_else(|| {
                Error::Alignment("no period on which every series is observed".into())
            })?;
            let mut flags = Vec::new();
            if a != lo || b != hi {
                flags.push(format!(
                    "trimmed_to_complete_run:{}..{}",
                    frequency.date(a),
                    frequency.date(b)
                ));
            }
            (a, b, flags)
        }
    };

    let n = (last - first + 1) as usize;
    let d = converted.len();
    let mut data = DMatrix::zeros(n, d);
    for (r, t) in (first..=last).enumerate() {
        for (j, v) in row_values(t).into_iter().enumerate() {
            data[(r, j)] = v.expect("row checked complete");
        }
    }
    for s in &converted {
        flags.extend(s.flags().iter().map(|f| format!("{}:{f}", s.id())));
    }
    let mut panel = Panel::new(
        converted.iter().map(|s| s.id().to_owned()).collect(),
        frequency,
        frequency.date(first),
        data,
    )?;
    panel.flags = flags;
    Ok(panel)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn date(y: i32, m: u32, d: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(y, m, d).unwrap()
    }

    fn monthly(id: &str, start: NaiveDate, v: Vec<Option<f64>>) -> TimeSeries {
        TimeSeries::new(id, Frequency::Monthly, start, v).unwrap()
    }

    #[test]
    fn identical_spans_align_identically() {
        let a = TimeSeries::from_values("a", Frequency::Monthly, date(2006, 1, 1), (0..24).map(f64::from)).unwrap();
        let b = TimeSeries::from_values("b", Frequency::Monthly, date(2006, 1, 1), (0..24).map(|i| f64::from(i) * 2.0)).unwrap();
        let p = align_panel(&[a, b], Frequency::Monthly, Join::Intersect, Aggregate::Mean).unwrap();
        assert_eq!((p.n(), p.d()), (24, 2));
        assert_eq!(p.data()[(5, 1)], 10.0);
        assert_eq!(p.start(), date(2006, 1, 1));
    }

    #[test]
    fn daily_series_aggregated_to_monthly_means() {
        let days = 31 + 29; // Jan + Feb 2004
        let vals: Vec<f64> = (0..days).map(|i| ((i * 7) % 13) as f64).collect();
        let daily = TimeSeries::from_values("temp", Frequency::Daily, date(2004, 1, 1), vals.clone()).unwrap();
        let other = TimeSeries::from_values("x", Frequency::Monthly, date(2004, 1, 1), [1.0, 2.0]).unwrap();
        let p = align_panel(&[daily, other], Frequency::Monthly, Join::ErrorOnGap, Aggregate::Mean).unwrap();
        let jan = vals[..31].iter().sum::<f64>() / 31.0;
        let feb = vals[31..].iter().sum::<f64>() / 29.0;
        assert_eq!(p.column(0), vec![jan, feb]);
    }

    #[test]
    fn disjoint_spans_fail() {
        let a = TimeSeries::from_values("a", Frequency::Monthly, date(2000, 1, 1), [1.0; 6]).unwrap();
        let b = TimeSeries::from_values("b", Frequency::Monthly, date(2001, 1, 1), [1.0; 6]).unwrap();
        assert!(matches!(
            align_panel(&[a, b], Frequency::Monthly, Join::Intersect, Aggregate::Mean),
            Err(Error::Alignment(_))
        ));
    }

    #[test]
    fn duplicate_ids_rejected() {
        let a = TimeSeries::from_values("a", Frequency::Monthly, date(2000, 1, 1), [1.0; 6]).unwrap();
        assert!(matches!(
            align_panel(&[a.clone(), a], Frequency::Monthly, Join::Intersect, Aggregate::Mean),
            Err(Error::DuplicateId(_))
        ));
    }

    #[test]
    fn gap_policies() {
        let a = monthly("a", date(2000, 1, 1), vec![Some(1.0), Some(2.0), None, Some(4.0), Some(5.0), Some(6.0)]);
        let b = monthly("b", date(2000, 2, 1), vec![Some(1.0); 6]);
        assert!(matches!(
            align_panel(&[a.clone(), b.clone()], Frequency::Monthly, Join::ErrorOnGap, Aggregate::Mean),
            Err(Error::Gap { .. })
        ));
        let p = align_panel(&[a, b], Frequency::Monthly, Join::Intersect, Aggregate::Mean).unwrap();
        // common span Feb..Jun; Mar missing -> longest run Apr..Jun
        assert_eq!(p.start(), date(2000, 4, 1));
        assert_eq!(p.column(0), vec![4.0, 5.0, 6.0]);
        assert!(p.flags()[0].starts_with("trimmed_to_complete_run"));
    }

    #[test]
    fn monthly_onto_daily_is_an_error() {
        let a = TimeSeries::from_values("a", Frequency::Monthly, date(2000, 1, 1), [1.0; 3]).unwrap();
        let b = TimeSeries::from_values("b", Frequency::Daily, date(2000, 1, 1), [1.0; 3]).unwrap();
        assert!(matches!(
            align_panel(&[a, b], Frequency::Daily, Join::Intersect, Aggregate::Mean),
            Err(Error::Frequency(_))
        ));
    }

    #[test]
    fn center_and_standardize() {
        let a = TimeSeries::from_values("a", Frequency::Monthly, date(2000, 1, 1), [1.0, 2.0, 3.0, 10.0]).unwrap();
        let b = TimeSeries::from_values("b", Frequency::Monthly, date(2000, 1, 1), [5.0, -1.0, 0.0, 2.0]).unwrap();
        let p = align_panel(&[a, b], Frequency::Monthly, Join::Intersect, Aggregate::Mean).unwrap();
        let s = p.standardize().unwrap();
        for j in 0..2 {
            let col = s.column(j);
            let mean = col.iter().sum::<f64>() / 4.0;
            let sd = (col.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 3.0).sqrt();
            assert!(mean.abs() < 1e-10);
            assert!((sd - 1.0).abs() < 1e-10);
            // back-transform
            for (r, x) in col.iter().enumerate().take(4) {
                let orig = x * s.column_scales()[j] + s.column_means()[j];
                assert!((orig - p.data()[(r, j)]).abs() < 1e-12);
            }
        }
        assert_eq!(s.column_means()[0], 4.0);
    }

    proptest! {
        #[test]
        fn alignment_is_order_stable(
            offsets in proptest::collection::vec(0u32..6, 3),
            lens in proptest::collection::vec(10usize..20, 3),
            perm in Just(vec![2usize, 0, 1]),
        ) {
            let series: Vec<TimeSeries> = offsets.iter().zip(&lens).enumerate().map(|(k, (&o, &len))| {
                TimeSeries::from_values(
                    format!("s{k}"),
                    Frequency::Monthly,
                    date(2000, 1 + o, 1),
                    (0..len).map(|i| (i * (k + 3)) as f64 * 0.5),
                ).unwrap()
            }).collect();
            let permuted: Vec<TimeSeries> = perm.iter().map(|&i| series[i].clone()).collect();
            let p = align_panel(&series, Frequency::Monthly, Join::Intersect, Aggregate::Mean).unwrap();
            let q = align_panel(&permuted, Frequency::Monthly, Join::Intersect, Aggregate::Mean).unwrap();
            prop_assert_eq!(p.start(), q.start());
            for (k, &i) in perm.iter().enumerate() {
                prop_assert_eq!(p.column(i), q.column(k));
                prop_assert_eq!(&p.ids()[i], &q.ids()[k]);
            }
        }
    }
}
