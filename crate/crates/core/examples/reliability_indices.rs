//! SAIDI and SAIFI from an interruption log, and reserve margins.

use chrono::NaiveDate;

use gridrisk::cri::{
    monthly_reliability, reserve_margin, reserve_margin_series, CustomerBase, ReliabilityIndex, ReserveMarginInputs,
};
use gridrisk::io::parse_interruptions;
use gridrisk::series::{Frequency, TimeSeries};

const LOG: &str = "start,duration_minutes,customers_affected
2024-01-03 07:15,42,1200
2024-01-19 16:40,3,5000
2024-01-27 02:05,180,310
2024-02-11 12:00,65,2400
2024-03-02 21:30,15,800
2024-03-14 09:45,2,12000
2024-03-29 18:20,240,4100
";

fn main() -> gridrisk::Result<()> {
    let log = parse_interruptions(LOG)?;
    println!("{} sustained interruptions, {} momentary left out", log.records.len(), log.momentary_skipped);

    let base = CustomerBase::new(48_000)?;
    let first = NaiveDate::from_ymd_opt(2024, 1, 1).unwrap();
    let saidi = monthly_reliability("saidi", &log.records, base, first, 3, ReliabilityIndex::Saidi)?;
    let saifi = monthly_reliability("saifi", &log.records, base, first, 3, ReliabilityIndex::Saifi)?;
    for k in 0..3 {
        println!(
            "{}  SAIDI {:>6.3} min  SAIFI {:.4}",
            saidi.date_at(k).format("%Y-%m"),
            saidi.values()[k].unwrap(),
            saifi.values()[k].unwrap()
        );
    }

    let margin = reserve_margin(ReserveMarginInputs {
        available_generation: 115.0,
        peak_demand: 100.0,
    })?;
    println!("reserve margin for 115 MW against a 100 MW peak: {margin}");

    let generation = TimeSeries::from_values("generation", Frequency::Monthly, first, [1480.0, 1455.0, 1390.0])?;
    let demand = TimeSeries::from_values("demand", Frequency::Monthly, first, [1310.0, 1350.0, 1420.0])?;
    let series = reserve_margin_series(&generation, &demand)?;
    println!("monthly margins: {:.3?}", series.values());
    Ok(())
}
