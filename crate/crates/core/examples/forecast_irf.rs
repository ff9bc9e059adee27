//! Forecasts with intervals and impulse responses from a fitted VAR.

use gridrisk::fixture;
use gridrisk::series::{align_panel, Aggregate, Frequency, Join};
use gridrisk::var::{fit_var, forecast, impulse_response};

fn main() -> gridrisk::Result<()> {
    let series = fixture::synthetic_cri_panel(480, 11)?;
    let panel = align_panel(&series, Frequency::Monthly, Join::Intersect, Aggregate::Mean)?.standardize()?;
    let model = fit_var(&panel, 2)?;

    let f = forecast(&model, 6, 0.95)?;
    println!("{} forecast in its own units, 95% interval:", f.column_ids[0]);
    for step in f.in_original_units() {
        println!(
            "  h={}  {:>7.2}  [{:>7.2}, {:>7.2}]",
            step.horizon, step.point[0], step.lower[0], step.upper[0]
        );
    }

    let psi = impulse_response(&model, 12);
    println!("response of climate to a unit space_weather shock:");
    for (h, m) in psi.iter().enumerate() {
        println!("  h={h:<2} {:+.4}", m[(1, 0)]);
    }
    Ok(())
}
