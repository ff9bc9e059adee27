//! Daily temperature to monthly anomalies, hot-day counts, cooling degree
//! days and day-of-year percentiles.

use chrono::{Datelike, NaiveDate};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use gridrisk::series::{
    anomaly_series, degree_days, monthly_climatology, percentile_rank, threshold_day_count, Comparator,
    DegreeDayMode, Frequency, Grouping, TimeSeries,
};

fn main() -> gridrisk::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let start = NaiveDate::from_ymd_opt(1981, 1, 1).unwrap();
    let end = NaiveDate::from_ymd_opt(2012, 12, 31).unwrap();
    let temps = start.iter_days().take_while(|d| *d <= end).map(|d| {
        let season = (2.0 * std::f64::consts::PI * d.ordinal() as f64 / 365.25).cos();
        let trend = 0.03 * (d.year() - 1981) as f64;
        14.0 - 9.0 * season + trend + rng.random_range(-5.0..5.0)
    });
    let temp = TimeSeries::from_values("temp", Frequency::Daily, start, temps)?.with_units("degC");

    let clim = monthly_climatology(&temp, 1981, 2010, true)?;
    println!("baseline means: {:.1?}", (1..=12).map(|m| clim.mean_for_month(m)).collect::<Vec<_>>());

    let anomalies = anomaly_series(&temp.to_monthly(Default::default())?, &clim)?;
    let hot = threshold_day_count(&temp, Comparator::Gt, 25.0)?;
    let cdd = degree_days(&temp, 18.0, DegreeDayMode::Cooling)?;
    let pct = percentile_rank(&temp, Grouping::SameDayOfYear, (1981, 2010))?;

    println!("month    anomaly  hot days  CDD");
    for k in (anomalies.len() - 12)..anomalies.len() {
        let date = anomalies.date_at(k);
        println!(
            "{}  {:>7.2}  {:>8}  {:>6.1}",
            date.format("%Y-%m"),
            anomalies.values()[k].unwrap_or(f64::NAN),
            hot.get(date).unwrap_or(f64::NAN),
            cdd.get(date).unwrap_or(f64::NAN)
        );
    }
    let last = pct.end().unwrap();
    println!("percentile of {last} within its day-of-year group: {:.3}", pct.get(last).unwrap());
    Ok(())
}
