use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use statrs::function::beta::beta_reg;

use super::VarModel;
use crate::error::{Error, Result};

/// Two-sided Student-t p-value, `P(|T_df| ≥ |t|)`, floored at the smallest
/// positive double so that it stays in (0, 1].
pub fn t_test_p_value(t: f64, df: f64) -> f64 {
    let x = df / (df + t * t);
    beta_reg(df / 2.0, 0.5, x).clamp(f64::MIN_POSITIVE, 1.0)
}

/// Two-sided t-test of every coefficient against zero, one p-value matrix
/// per lag, with `n − p − d·p` degrees of freedom.
pub fn coefficient_tests(model: &VarModel) -> Result<Vec<DMatrix<f64>>> {
    if model.df() <= 0.0 {
        return Err(Error::DegenerateInference(
            "model carries no residual degrees of freedom".into(),
        ));
    }
    let mut out = Vec::with_capacity(model.p());
    for (lag, (b, se)) in model.phis().iter().zip(model.std_errors()).enumerate() {
        if let Some(k) = se.iter().position(|&s| !(s > 0.0)) {
            let (i, j) = (k % se.nrows(), k / se.nrows());
            return Err(Error::DegenerateInference(format!(
                "zero standard error for lag {} coefficient ({}, {})",
                lag + 1,
                model.column_ids()[i],
                model.column_ids()[j]
            )));
        }
        out.push(DMatrix::from_fn(b.nrows(), b.ncols(), |i, j| {
            t_test_p_value(b[(i, j)] / se[(i, j)], model.df())
        }));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FdrDecision {
    pub q_value: f64,
    pub reject: bool,
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    Ok(())
}

/// Benjamini–Hochberg step-up procedure.
///
/// With p-values sorted ascending, the hypotheses of rank `1..=k` are
/// rejected for the largest `k` with `p(k) ≤ k·α/m`. Adjusted q-values are
/// `min_{j ≥ k} min(1, p(j)·m/j)`, so `reject ⇔ q ≤ α`. Output follows
/// input order.
pub fn fdr_adjust(p_values: &[f64], alpha: f64) -> Result<Vec<FdrDecision>> {
    if p_values.is_empty() {
        return Err(Error::Domain("no p-values to adjust".into()));
    }
    check_alpha(alpha)?;
    if let Some(p) = p_values.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::Domain(format!("p-value {p} outside [0, 1]")));
    }
    let m = p_values.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| p_values[a].total_cmp(&p_values[b]));

    let mf = m as f64;
    // same expression as the q-values so that `reject ⇔ q ≤ α` holds exactly
    let scaled = |k: usize| {
        let p = p_values[order[k - 1]];
        (p * mf / k as f64).max(p)
    };
    let cutoff = (1..=m).rev().find(|&k| scaled(k) <= alpha).unwrap_or(0);

    let mut out = vec![
        FdrDecision {
            q_value: 1.0,
            reject: false
        };
        m
    ];
    let mut running = 1.0f64;
    for k in (1..=m).rev() {
        let idx = order[k - 1];
        running = running.min(scaled(k)).min(1.0);
        out[idx] = FdrDecision {
            q_value: running,
            reject: k <= cutoff,
        };
    }
    Ok(out)
}
