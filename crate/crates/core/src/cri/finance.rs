use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{Panel, TimeSeries};

/// Per-period arithmetic mean of the panel's return columns.
pub fn equal_weighted_index(returns: &Panel) -> Result<TimeSeries> {
    if returns.d() == 0 || returns.n() == 0 {
        return Err(Error::Domain("equal-weighted index of an empty panel".into()));
    }
    let d = returns.d() as f64;
    let values = returns.data().row_iter().map(|row| row.sum() / d);
    Ok(
        TimeSeries::from_values("equal_weighted_index", returns.frequency(), returns.start(), values)?
            .with_units("return"),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptionQuote {
    pub strike: f64,
    pub put_price: f64,
    pub call_price: f64,
}

/// European put and call quotes on one expiry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptionChain {
    pub forward: f64,
    /// Time to expiry in years.
    pub expiry_years: f64,
    /// Continuously compounded, per annum.
    pub risk_free_rate: f64,
    quotes: Vec<OptionQuote>,
}

impl OptionChain {
    pub fn new(forward: f64, expiry_years: f64, risk_free_rate: f64, quotes: Vec<OptionQuote>) -> Result<Self> {
        if !(forward > 0.0) || !forward.is_finite() {
            return Err(Error::Domain(format!("forward must be positive, got {forward}")));
        }
        if !(expiry_years > 0.0) || !expiry_years.is_finite() {
            return Err(Error::Domain(format!("expiry must be positive, got {expiry_years}")));
        }
        if !risk_free_rate.is_finite() {
            return Err(Error::Domain("risk-free rate must be finite".into()));
        }
        for (i, q) in quotes.iter().enumerate() {
            if !(q.strike > 0.0) || !q.strike.is_finite() {
                return Err(Error::Domain(format!("strike {} must be positive", q.strike)));
            }
            if i > 0 && q.strike <= quotes[i - 1].strike {
                return Err(Error::Domain(format!(
                    "strikes must be strictly increasing ({} after {})",
                    q.strike,
                    quotes[i - 1].strike
                )));
            }
            if !(q.put_price >= 0.0 && q.call_price >= 0.0) || !q.put_price.is_finite() || !q.call_price.is_finite() {
                return Err(Error::Domain(format!("negative or non-finite price at strike {}", q.strike)));
            }
        }
        Ok(OptionChain {
            forward,
            expiry_years,
            risk_free_rate,
            quotes,
        })
    }

    pub fn quotes(&self) -> &[OptionQuote] {
        &self.quotes
    }

    /// Same chain with every option price multiplied by `factor`.
    pub fn scale_prices(&self, factor: f64) -> Result<Self> {
        let quotes = self
            .quotes
            .iter()
            .map(|q| OptionQuote {
                strike: q.strike,
                put_price: q.put_price * factor,
                call_price: q.call_price * factor,
            })
            .collect();
        OptionChain::new(self.forward, self.expiry_years, self.risk_free_rate, quotes)
    }
}

/// Model-free implied volatility of the chain, in annualized percentage
/// points.
///
/// Discretizes `(2 e^{rτ} / τ) (∫₀^F P(K)/K² dK + ∫_F^∞ C(K)/K² dK)` by the
/// midpoint rule: puts below the forward, calls above, the put/call average
/// at the strike nearest the forward, and `ΔK` equal to half the distance
/// between neighbouring strikes (one-sided at the edges). No at-the-money
/// forward correction term is applied.
pub fn vix_from_chain(chain: &OptionChain) -> Result<f64> {
    let q = &chain.quotes;
    if q.len() < 3 {
        return Err(Error::Coverage(format!("need at least 3 strikes, got {}", q.len())));
    }
    let f = chain.forward;
    if !(q[0].strike < f && q[q.len() - 1].strike > f) {
        return Err(Error::Coverage(format!(
            "strikes {}..{} do not span the forward {f}",
            q[0].strike,
            q[q.len() - 1].strike
        )));
    }
    let nearest = (0..q.len())
        .min_by(|&a, &b| (q[a].strike - f).abs().total_cmp(&(q[b].strike - f).abs()))
        .expect("non-empty chain");

    let last = q.len() - 1;
    let mut acc = 0.0;
    for (i, quote) in q.iter().enumerate() {
        let dk = match i {
            0 => q[1].strike - q[0].strike,
            i if i == last => q[last].strike - q[last - 1].strike,
            _ => (q[i + 1].strike - q[i - 1].strike) / 2.0,
        };
        let price = if i == nearest {
            (quote.put_price + quote.call_price) / 2.0
        } else if quote.strike < f {
            quote.put_price
        } else {
            quote.call_price
        };
        acc += dk / (quote.strike * quote.strike) * price;
    }
    let tau = chain.expiry_years;
    let variance = 2.0 * (chain.risk_free_rate * tau).exp() / tau * acc;
    Ok(100.0 * variance.sqrt())
}
