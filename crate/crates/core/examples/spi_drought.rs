//! Standardized Precipitation Index at several accumulation scales from
//! fifty years of simulated monthly rainfall.

use chrono::NaiveDate;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};

use gridrisk::cri::{spi_with, SpiOptions};
use gridrisk::series::{Frequency, TimeSeries};

fn main() -> gridrisk::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let rain: Vec<f64> = (0..600)
        .map(|t| {
            let wet_season = if (t % 12) < 4 { 2.0 } else { 1.0 };
            Gamma::new(1.8, 25.0 * wet_season).unwrap().sample(&mut rng)
        })
        .collect();
    let precip = TimeSeries::from_values("rain", Frequency::Monthly, NaiveDate::from_ymd_opt(1970, 1, 1).unwrap(), rain)?
        .with_units("mm");

    for scale in [1, 3, 6, 12] {
        let result = spi_with(&precip, &SpiOptions::new(scale))?;
        let values: Vec<f64> = result.series.observed().map(|(_, v)| v).collect();
        let dry = values.iter().filter(|&&v| v <= -1.5).count();
        let january = &result.fits[0];
        println!(
            "SPI-{scale:<2}  {} values, {dry} severely dry months; January fit shape {:.2}, rate {:.4} ({:?})",
            values.len(),
            january.shape,
            january.rate,
            january.method
        );
    }

    let spi3 = spi_with(&precip, &SpiOptions::new(3))?.series;
    let (worst, value) = spi3
        .observed()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap();
    println!("driest 3-month window ends {} with SPI {value:.2}", worst.format("%Y-%m"));
    Ok(())
}
