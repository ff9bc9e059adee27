//! Model-free implied volatility from an option chain file, and its response
//! to a uniform repricing.

use gridrisk::cri::vix_from_chain;
use gridrisk::io::parse_option_chain;

fn black76(forward: f64, strike: f64, sigma: f64, tau: f64, rate: f64) -> (f64, f64) {
    use statrs::distribution::{ContinuousCDF, Normal};
    let n = Normal::new(0.0, 1.0).unwrap();
    let sd = sigma * tau.sqrt();
    let d1 = ((forward / strike).ln() + sd * sd / 2.0) / sd;
    let d2 = d1 - sd;
    let df = (-rate * tau).exp();
    (
        df * (strike * n.cdf(-d2) - forward * n.cdf(-d1)),
        df * (forward * n.cdf(d1) - strike * n.cdf(d2)),
    )
}

fn main() -> gridrisk::Result<()> {
    let (forward, tau, rate) = (4500.0, 30.0 / 365.0, 0.045);
    let mut text = format!("# forward={forward}\n# expiry_years={tau}\n# risk_free_rate={rate}\nstrike,put_price,call_price\n");
    for k in 0..=300 {
        let strike = 3000.0 + 10.0 * k as f64;
        let (put, call) = black76(forward, strike, 0.18, tau, rate);
        text += &format!("{strike},{put},{call}\n");
    }
    let chain = parse_option_chain(&text)?;
    let vix = vix_from_chain(&chain)?;
    println!("{} strikes, index {vix:.3} for 18% implied volatility", chain.quotes().len());

    let stressed = vix_from_chain(&chain.scale_prices(2.0)?)?;
    println!("all prices doubled: {stressed:.3} (ratio {:.6})", stressed / vix);
    Ok(())
}
