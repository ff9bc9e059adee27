//! Storm periods in a geomagnetically induced current proxy.

use chrono::NaiveDate;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use gridrisk::cri::exceedance_events;
use gridrisk::series::{Frequency, TimeSeries};

fn main() -> gridrisk::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(27);
    let mut storm = 0.0_f64;
    let values: Vec<f64> = (0..365)
        .map(|_| {
            if rng.random_bool(0.02) {
                storm = rng.random_range(40.0..120.0);
            }
            storm *= 0.6;
            8.0 + storm + rng.random_range(0.0..6.0)
        })
        .collect();
    let dbdt = TimeSeries::from_values("dbdt", Frequency::Daily, NaiveDate::from_ymd_opt(2024, 1, 1).unwrap(), values)?
        .with_units("nT/min");

    let threshold = 30.0;
    let events = exceedance_events(&dbdt, threshold);
    println!("{} periods above {threshold} nT/min", events.len());
    for e in &events {
        println!(
            "  {} for {} day(s), peak {:.1}",
            dbdt.date_at(e.start),
            e.len(),
            e.peak
        );
    }
    Ok(())
}
