//! Standardized Precipitation Index.
//!
//! Rolling `k`-month precipitation totals are grouped by the calendar month
//! in which the window ends. Each group is described by a zero-inflated gamma
//! law `H(x) = q + (1 − q) G(x; shape, rate)` where `q` is the fraction of
//! zero totals and `G` is fitted to the positive totals by maximum
//! likelihood. The index is `Φ⁻¹(H(x))`.

use chrono::Datelike;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Gamma, Normal};
use statrs::function::gamma::digamma;

use crate::error::{Error, Result};
use crate::series::{Frequency, TimeSeries};

pub const SPI_SCALES: [usize; 5] = [1, 3, 6, 12, 24];

const STRICT_MIN_YEARS: usize = 30;
const NEWTON_MAX_ITER: usize = 100;
// keeps Φ⁻¹ finite at the extremes (|SPI| ≲ 6.4)
const PROBABILITY_CLAMP: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitMethod {
    MaximumLikelihood,
    MethodOfMoments,
}

/// Fitted distribution of one calendar-month group of rolling totals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroInflatedGamma {
    pub zero_fraction: f64,
    pub shape: f64,
    pub rate: f64,
    pub method: FitMethod,
}

impl ZeroInflatedGamma {
    fn gamma(&self) -> Gamma {
        Gamma::new(self.shape, self.rate).expect("fitted parameters are positive")
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return self.zero_fraction;
        }
        self.zero_fraction + (1.0 - self.zero_fraction) * self.gamma().cdf(x)
    }

    pub fn quantile(&self, p: f64) -> f64 {
        if p <= self.zero_fraction {
            return 0.0;
        }
        let conditional = (p - self.zero_fraction) / (1.0 - self.zero_fraction);
        self.gamma().inverse_cdf(conditional.min(1.0))
    }

    pub fn median(&self) -> f64 {
        self.quantile(0.5)
    }

    /// SPI value of a total `x`.
    pub fn index(&self, x: f64) -> f64 {
        let h = self
            .cdf(x)
            .clamp(PROBABILITY_CLAMP, 1.0 - PROBABILITY_CLAMP);
        standard_normal().inverse_cdf(h)
    }
}

fn standard_normal() -> Normal {
    Normal::new(0.0, 1.0).expect("unit normal")
}

/// Fits `q`, shape and rate to a sample of non-negative totals.
///
/// Maximum likelihood solves `ln α − ψ(α) = ln x̄ − mean(ln x)` by Newton's
/// method from Thom's approximation; if that fails to converge the method of
/// moments is used instead.
pub fn fit_zero_inflated_gamma(sample: &[f64]) -> Result<ZeroInflatedGamma> {
    if sample.iter().any(|&x| x < 0.0 || !x.is_finite()) {
        return Err(Error::Domain("precipitation totals must be finite and non-negative".into()));
    }
    let positive: Vec<f64> = sample.iter().copied().filter(|&x| x > 0.0).collect();
    if positive.is_empty() {
        return Err(Error::DegenerateSeries("all totals in the group are zero".into()));
    }
    let n = positive.len() as f64;
    let mean = positive.iter().sum::<f64>() / n;
    let mean_ln = positive.iter().map(|x| x.ln()).sum::<f64>() / n;
    let a = mean.ln() - mean_ln;
    // a == 0 iff all positive totals are equal (Jensen); a tiny a means no usable spread
    if positive.len() < 2 || a <= 1e-12 {
        return Err(Error::DegenerateSeries(
            "positive totals have zero variance; gamma fit undefined".into(),
        ));
    }
    let zero_fraction = (sample.len() - positive.len()) as f64 / sample.len() as f64;

    let (shape, method) = match solve_gamma_shape(a) {
        Some(shape) => (shape, FitMethod::MaximumLikelihood),
        None => {
            let var = positive.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
            (mean * mean / var, FitMethod::MethodOfMoments)
        }
    };
    Ok(ZeroInflatedGamma {
        zero_fraction,
        shape,
        rate: shape / mean,
        method,
    })
}

fn solve_gamma_shape(a: f64) -> Option<f64> {
    let mut shape = (1.0 + (1.0 + 4.0 * a / 3.0).sqrt()) / (4.0 * a);
    for _ in 0..NEWTON_MAX_ITER {
        let g = shape.ln() - digamma(shape) - a;
        let dg = 1.0 / shape - trigamma(shape);
        let next = shape - g / dg;
        // stay in the positive domain
        let next = if next <= 0.0 { shape / 2.0 } else { next };
        if !next.is_finite() {
            return None;
        }
        if (next - shape).abs() <= 1e-12 * shape {
            return Some(next);
        }
        shape = next;
    }
    None
}

/// ψ'(x) for x > 0, by upward recurrence then the asymptotic series.
pub(crate) fn trigamma(mut x: f64) -> f64 {
    let mut acc = 0.0;
    while x < 12.0 {
        acc += 1.0 / (x * x);
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    acc + inv
        + inv2 / 2.0
        + inv * inv2 * (1.0 / 6.0 - inv2 * (1.0 / 30.0 - inv2 * (1.0 / 42.0 - inv2 * (1.0 / 30.0 - inv2 * 5.0 / 66.0))))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpiOptions {
    pub scale_months: usize,
    /// Years whose totals the distributions are fitted to; whole record when `None`.
    pub baseline: Option<(i32, i32)>,
    /// Require at least thirty years of data.
    pub strict: bool,
}

impl SpiOptions {
    pub fn new(scale_months: usize) -> Self {
        SpiOptions {
            scale_months,
            baseline: None,
            strict: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SpiResult {
    pub series: TimeSeries,
    /// One fit per calendar month of window end, January first.
    pub fits: Vec<ZeroInflatedGamma>,
}

/// SPI at `scale_months` with the whole record as baseline.
pub fn spi(precip: &TimeSeries, scale_months: usize) -> Result<TimeSeries> {
    Ok(spi_with(precip, &SpiOptions::new(scale_months))?.series)
}

pub fn spi_with(precip: &TimeSeries, options: &SpiOptions) -> Result<SpiResult> {
    precip.require_frequency(Frequency::Monthly)?;
    let k = options.scale_months;
    if !SPI_SCALES.contains(&k) {
        return Err(Error::Domain(format!(
            "SPI scale must be one of {SPI_SCALES:?}, got {k}"
        )));
    }
    if options.strict && precip.len() < STRICT_MIN_YEARS * 12 {
        return Err(Error::Coverage(format!(
            "`{}` spans {} months; strict SPI needs {} years",
            precip.id(),
            precip.len(),
            STRICT_MIN_YEARS
        )));
    }
    if let Some((date, x)) = precip.observed().find(|&(_, x)| x < 0.0) {
        return Err(Error::Domain(format!(
            "`{}` has negative precipitation {x} on {date}",
            precip.id()
        )));
    }

    let values = precip.values();
    let totals: Vec<Option<f64>> = (0..values.len())
        .map(|t| {
            if t + 1 < k {
                return None;
            }
            values[t + 1 - k..=t]
                .iter()
                .try_fold(0.0, |acc, v| v.map(|x| acc + x))
        })
        .collect();

    let mut groups: Vec<Vec<f64>> = vec![Vec::new(); 12];
    for (t, total) in totals.iter().enumerate() {
        let date = precip.date_at(t);
        let in_baseline = options
            .baseline
            .is_none_or(|(y0, y1)| (y0..=y1).contains(&date.year()));
        if let (Some(x), true) = (total, in_baseline) {
            groups[date.month0() as usize].push(*x);
        }
    }

    let mut flags = Vec::new();
    let fits = groups
        .iter()
        .enumerate()
        .map(|(m, g)| {
            let fit = fit_zero_inflated_gamma(g).map_err(|e| match e {
                Error::DegenerateSeries(msg) => Error::DegenerateSeries(format!(
                    "`{}` calendar month {}: {msg}",
                    precip.id(),
                    m + 1
                )),
                other => other,
            })?;
            if fit.method == FitMethod::MethodOfMoments {
                flags.push(format!("spi_moments_fallback:month={}", m + 1));
            }
            Ok(fit)
        })
        .collect::<Result<Vec<_>>>()?;

    let out = totals
        .iter()
        .enumerate()
        .map(|(t, total)| total.map(|x| fits[precip.date_at(t).month0() as usize].index(x)))
        .collect();
    let series = precip
        .map_values(out)
        .renamed(format!("{}_spi{k}", precip.id()))
        .with_units("standard normal")
        .with_flags(flags);
    Ok(SpiResult { series, fits })
}
