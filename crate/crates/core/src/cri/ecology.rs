use std::collections::HashSet;

use chrono::Datelike;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::TimeSeries;

/// Per-species abundance series sharing one index.
#[derive(Debug, Clone)]
pub struct AbundancePanel {
    species: Vec<TimeSeries>,
}

impl AbundancePanel {
    pub fn new(species: Vec<TimeSeries>) -> Result<Self> {
        let Some(first) = species.first() else {
            return Err(Error::Domain("abundance panel needs at least one species".into()));
        };
        let mut seen = HashSet::new();
        for s in &species {
            if !seen.insert(s.id()) {
                return Err(Error::DuplicateId(s.id().to_owned()));
            }
            if s.frequency() != first.frequency() || s.start() != first.start() || s.len() != first.len() {
                return Err(Error::Alignment(format!(
                    "species `{}` is not on the index of `{}`",
                    s.id(),
                    first.id()
                )));
            }
            if let Some((date, x)) = s.observed().find(|&(_, x)| x < 0.0) {
                return Err(Error::Domain(format!(
                    "species `{}` has negative abundance {x} on {date}",
                    s.id()
                )));
            }
        }
        Ok(AbundancePanel { species })
    }

    pub fn species(&self) -> &[TimeSeries] {
        &self.species
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroPolicy {
    /// Zeros become 1% of the species' mean observed abundance (flagged).
    #[default]
    Replace,
    Strict,
}

const ZERO_REPLACEMENT_FRACTION: f64 = 0.01;

/// Chained geometric-mean abundance index, equal to 1 at the first period of
/// `base_year`.
///
/// Each step multiplies by `exp(mean_i ln(N_i,t / N_i,t−1))` over the species
/// observed at both `t − 1` and `t`; periods before the base are chained
/// backwards.
pub fn lpi(panel: &AbundancePanel, base_year: i32, zeros: ZeroPolicy) -> Result<TimeSeries> {
    let template = &panel.species[0];
    let base = (0..template.len())
        .find(|&t| template.date_at(t).year() == base_year)
        .ok_or_else(|| Error::Domain(format!("base year {base_year} is outside the panel")))?;

    let mut flags = Vec::new();
    let mut logs: Vec<Vec<Option<f64>>> = Vec::with_capacity(panel.species.len());
    for s in &panel.species {
        let zero_count = s.observed().filter(|&(_, x)| x == 0.0).count();
        let replacement = if zero_count > 0 {
            if zeros == ZeroPolicy::Strict {
                return Err(Error::Domain(format!(
                    "species `{}` has {zero_count} zero abundances (strict policy)",
                    s.id()
                )));
            }
            let (sum, n) = s.observed().fold((0.0, 0usize), |(a, n), (_, x)| (a + x, n + 1));
            let mean = sum / n as f64;
            if mean == 0.0 {
                return Err(Error::Domain(format!("species `{}` is never observed alive", s.id())));
            }
            flags.push(format!("lpi_zero_replaced:{}:{zero_count}", s.id()));
            ZERO_REPLACEMENT_FRACTION * mean
        } else {
            0.0
        };
        logs.push(
            s.values()
                .iter()
                .map(|v| v.map(|x| if x == 0.0 { replacement } else { x }.ln()))
                .collect(),
        );
    }

    let step = |t: usize| -> Result<f64> {
        let (sum, count) = logs
            .iter()
            .filter_map(|l| Some(l[t]? - l[t - 1]?))
            .fold((0.0, 0usize), |(a, n), r| (a + r, n + 1));
        if count == 0 {
            return Err(Error::Coverage(format!(
                "no species observed on both {} and {}",
                template.date_at(t - 1),
                template.date_at(t)
            )));
        }
        Ok(sum / count as f64)
    };

    let mut log_index = vec![0.0; template.len()];
    for t in base + 1..template.len() {
        log_index[t] = log_index[t - 1] + step(t)?;
    }
    for t in (0..base).rev() {
        log_index[t] = log_index[t + 1] - step(t + 1)?;
    }
    Ok(TimeSeries::from_values("lpi", template.frequency(), template.start(), log_index.into_iter().map(f64::exp))?
        .with_units("index")
        .with_flags(flags))
}

fn proportions(counts: &[f64]) -> Result<impl Iterator<Item = f64> + '_> {
    if counts.iter().any(|&c| c < 0.0 || !c.is_finite()) {
        return Err(Error::Domain("species counts must be finite and non-negative".into()));
    }
    let total: f64 = counts.iter().sum();
    if total <= 0.0 {
        return Err(Error::Domain("species counts sum to zero".into()));
    }
    Ok(counts.iter().filter(|&&c| c > 0.0).map(move |&c| c / total))
}

/// Shannon diversity `−Σ p ln p` over observed species.
pub fn shannon_index(counts: &[f64]) -> Result<f64> {
    Ok(-proportions(counts)?.map(|p| p * p.ln()).sum::<f64>())
}

/// Simpson concentration `Σ p²`; diversity forms are `1 − D` and `1 / D`.
pub fn simpson_index(counts: &[f64]) -> Result<f64> {
    Ok(proportions(counts)?.map(|p| p * p).sum())
}
