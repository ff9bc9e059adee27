//! Distribution reliability (SAIDI, SAIFI) and generation adequacy (reserve
//! margin) indicators.

use chrono::{Months, NaiveDate, NaiveDateTime};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{Frequency, TimeSeries};

/// Interruptions must last longer than this to count as sustained.
pub const SUSTAINED_MINUTES: f64 = 5.0;

/// One sustained interruption.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterruptionRecord {
    pub start: NaiveDateTime,
    /// `r_i`
    pub duration_minutes: f64,
    /// `N_i`
    pub customers_affected: u64,
}

impl InterruptionRecord {
    pub fn new(start: NaiveDateTime, duration_minutes: f64, customers_affected: u64) -> Result<Self> {
        if !duration_minutes.is_finite() || duration_minutes <= SUSTAINED_MINUTES {
            return Err(Error::Domain(format!(
                "interruption at {start} lasts {duration_minutes} min; sustained interruptions exceed {SUSTAINED_MINUTES} min"
            )));
        }
        if customers_affected == 0 {
            return Err(Error::Domain(format!("interruption at {start} affects no customers")));
        }
        Ok(InterruptionRecord {
            start,
            duration_minutes,
            customers_affected,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CustomerBase {
    pub total_customers: u64,
}

impl CustomerBase {
    pub fn new(total_customers: u64) -> Result<Self> {
        if total_customers == 0 {
            return Err(Error::Domain("customer base must be positive".into()));
        }
        Ok(CustomerBase { total_customers })
    }
}

/// Half-open interval `[start, end)`; records are bucketed by start time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TimeWindow {
    pub start: NaiveDateTime,
    pub end: NaiveDateTime,
}

impl TimeWindow {
    pub fn new(start: NaiveDateTime, end: NaiveDateTime) -> Result<Self> {
        if end <= start {
            return Err(Error::Domain(format!("empty window {start}..{end}")));
        }
        Ok(TimeWindow { start, end })
    }

    /// The calendar month starting at `month_start`.
    pub fn month(month_start: NaiveDate) -> Self {
        let start = month_start.and_hms_opt(0, 0, 0).expect("midnight");
        TimeWindow {
            start,
            end: start + Months::new(1),
        }
    }

    pub fn contains(&self, t: NaiveDateTime) -> bool {
        self.start <= t && t < self.end
    }
}

fn in_window<'a>(
    records: &'a [InterruptionRecord],
    base: CustomerBase,
    window: &'a TimeWindow,
) -> impl Iterator<Item = Result<&'a InterruptionRecord>> + 'a {
    records.iter().filter(|r| window.contains(r.start)).map(move |r| {
        if r.customers_affected > base.total_customers {
            Err(Error::Consistency(format!(
                "interruption at {} affects {} customers, more than the {} served",
                r.start, r.customers_affected, base.total_customers
            )))
        } else {
            Ok(r)
        }
    })
}

/// `Σ r_i N_i / N` over records starting inside `window`, in minutes.
pub fn saidi(records: &[InterruptionRecord], base: CustomerBase, window: &TimeWindow) -> Result<f64> {
    let mut acc = 0.0;
    for r in in_window(records, base, window) {
        let r = r?;
        acc += r.duration_minutes * r.customers_affected as f64;
    }
    Ok(acc / base.total_customers as f64)
}

/// `Σ N_i / N` over records starting inside `window`.
pub fn saifi(records: &[InterruptionRecord], base: CustomerBase, window: &TimeWindow) -> Result<f64> {
    let mut acc = 0u64;
    for r in in_window(records, base, window) {
        acc += r?.customers_affected;
    }
    Ok(acc as f64 / base.total_customers as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReliabilityIndex {
    Saidi,
    Saifi,
}

/// Monthly SAIDI or SAIFI over `months` calendar months from `first_month`.
pub fn monthly_reliability(
    id: &str,
    records: &[InterruptionRecord],
    base: CustomerBase,
    first_month: NaiveDate,
    months: usize,
    index: ReliabilityIndex,
) -> Result<TimeSeries> {
    let grid_start = Frequency::Monthly.date(Frequency::Monthly.ordinal(first_month));
    let values = (0..months)
        .map(|k| {
            let w = TimeWindow::month(grid_start + Months::new(k as u32));
            match index {
                ReliabilityIndex::Saidi => saidi(records, base, &w),
                ReliabilityIndex::Saifi => saifi(records, base, &w),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let units = match index {
        ReliabilityIndex::Saidi => "minutes",
        ReliabilityIndex::Saifi => "interruptions per customer",
    };
    Ok(TimeSeries::from_values(id, Frequency::Monthly, grid_start, values)?.with_units(units))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReserveMarginInputs {
    /// `G_av`, MW
    pub available_generation: f64,
    /// `D`, MW
    pub peak_demand: f64,
}

/// `(G_av − D) / D`; negative when imports are needed to meet peak demand.
pub fn reserve_margin(inputs: ReserveMarginInputs) -> Result<f64> {
    if !(inputs.peak_demand > 0.0) {
        return Err(Error::Domain(format!(
            "peak demand must be positive, got {}",
            inputs.peak_demand
        )));
    }
    Ok((inputs.available_generation - inputs.peak_demand) / inputs.peak_demand)
}

/// Reserve margin per period from generation and demand series on one grid.
pub fn reserve_margin_series(generation: &TimeSeries, demand: &TimeSeries) -> Result<TimeSeries> {
    if generation.frequency() != demand.frequency() || generation.start() != demand.start() || generation.len() != demand.len() {
        return Err(Error::Alignment(format!(
            "`{}` and `{}` are not on the same index",
            generation.id(),
            demand.id()
        )));
    }
    let values = generation
        .values()
        .iter()
        .zip(demand.values())
        .map(|(g, d)| match (g, d) {
            (Some(g), Some(d)) => reserve_margin(ReserveMarginInputs {
                available_generation: *g,
                peak_demand: *d,
            })
            .map(Some),
            _ => Ok(None),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TimeSeries::new("reserve_margin", generation.frequency(), generation.start(), values)?
        .with_units("fraction"))
}
