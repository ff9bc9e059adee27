//! Living Planet style abundance index and community diversity.

use chrono::NaiveDate;

use gridrisk::cri::{lpi, shannon_index, simpson_index, AbundancePanel, ZeroPolicy};
use gridrisk::series::{Frequency, TimeSeries};

fn main() -> gridrisk::Result<()> {
    let start = NaiveDate::from_ymd_opt(2015, 1, 1).unwrap();
    let months = 96;
    let species = [("bees", 1.0, -0.004), ("moths", 1.6, -0.009), ("beetles", 0.8, 0.002)]
        .into_iter()
        .map(|(id, level, drift)| {
            let counts = (0..months).map(move |t| {
                let season = 1.0 + 0.5 * (2.0 * std::f64::consts::PI * t as f64 / 12.0).sin();
                (100.0 * level * (drift * t as f64).exp() * season).round()
            });
            TimeSeries::from_values(id, Frequency::Monthly, start, counts)
        })
        .collect::<gridrisk::Result<Vec<_>>>()?;

    let index = lpi(&AbundancePanel::new(species.clone())?, 2015, ZeroPolicy::Replace)?;
    for year in 0..8 {
        println!("{}  LPI {:.3}", index.date_at(12 * year).format("%Y-%m"), index.values()[12 * year].unwrap());
    }

    let last: Vec<f64> = species.iter().map(|s| s.values()[months - 1].unwrap()).collect();
    println!("final community {last:?}");
    println!("Shannon {:.4}, Simpson {:.4}", shannon_index(&last)?, simpson_index(&last)?);
    Ok(())
}
