//! Vector autoregression on a CRI panel: least-squares estimation,
//! per-coefficient inference, FDR-controlled Granger-causality networks,
//! forecasts and impulse responses.
//!
//! Coefficient matrices follow the regression convention: in `Φ_l`, row `i`
//! is the equation of series `i` and column `j` is the lag-`l` value of
//! series `j`. A nonzero `Φ_l[(i, j)]` therefore means the past of `j`
//! helps predict the present of `i` (an edge `j → i`).

mod dynamics;
mod export;
mod inference;
mod network;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::series::Panel;

pub use dynamics::{forecast, impulse_response, Forecast, ForecastStep};
pub use export::VarModelExport;
pub use inference::{coefficient_tests, fdr_adjust, t_test_p_value, FdrDecision};
pub use network::{granger_network, CoefficientTest, Correction, GrangerEdge, GrangerNetwork};

/// Rows beyond `d·p` required before a fit is attempted.
pub const MIN_EXTRA_ROWS: usize = 8;

#[derive(Debug, Clone)]
pub struct VarModel {
    column_ids: Vec<String>,
    n: usize,
    p: usize,
    phi: Vec<DMatrix<f64>>,
    sigma_a: DMatrix<f64>,
    residuals: DMatrix<f64>,
    std_errors: Vec<DMatrix<f64>>,
    df: f64,
    spectral_radius: f64,
    sigma_nonsingular: bool,
    /// Last `p` observations, most recent first.
    history: Vec<DVector<f64>>,
    column_means: Vec<f64>,
    column_scales: Vec<f64>,
}

/// Lagged regression design for a VAR(p): row `t` of `X` is
/// `[y_{t+p-1}ᵀ, …, y_tᵀ]` and row `t` of `Y` is `y_{t+p}ᵀ`.
pub fn design(data: &DMatrix<f64>, p: usize) -> (DMatrix<f64>, DMatrix<f64>) {
    let (n, d) = data.shape();
    let rows = n - p;
    let x = DMatrix::from_fn(rows, d * p, |t, k| {
        let lag = k / d + 1;
        data[(t + p - lag, k % d)]
    });
    let y = data.rows(p, rows).into_owned();
    (x, y)
}

/// Fits `y_t = Φ_1 y_{t−1} + … + Φ_p y_{t−p} + a_t` to a centered panel by
/// least squares, one equation per column.
///
/// The solve goes through a QR factorization of the design. `Σ_a` uses the
/// degrees of freedom `n − p − d·p`; standard errors are
/// `sqrt(Σ_a[i,i] · (XᵀX)⁻¹[k,k])`.
pub fn fit_var(panel: &Panel, p: usize) -> Result<VarModel> {
    if p == 0 {
        return Err(Error::Domain("VAR lag order must be at least 1".into()));
    }
    if !panel.is_centered() {
        return Err(Error::Domain("VAR estimation expects a centered panel".into()));
    }
    let (n, d) = (panel.n(), panel.d());
    if n <= d * p + MIN_EXTRA_ROWS {
        return Err(Error::SampleSize(format!(
            "{n} rows for d = {d}, p = {p}; need more than {}",
            d * p + MIN_EXTRA_ROWS
        )));
    }
    for j in 0..d {
        if panel.data().column(j).iter().all(|&x| x == 0.0) {
            return Err(Error::SingularDesign(format!(
                "column `{}` is constant",
                panel.ids()[j]
            )));
        }
    }

    let (x, y) = design(panel.data(), p);
    let qr = x.clone().qr();
    let r = qr.r();
    let rdiag: Vec<f64> = r.diagonal().iter().map(|v| v.abs()).collect();
    let rmax = rdiag.iter().copied().fold(0.0, f64::max);
    if rdiag.iter().any(|&v| v <= 1e-10 * rmax) {
        return Err(Error::SingularDesign(
            "lagged regressors are linearly dependent".into(),
        ));
    }
    let qty = qr.q().transpose() * &y;
    let b = r
        .solve_upper_triangular(&qty)
        .ok_or_else(|| Error::SingularDesign("triangular solve failed".into()))?;
    let r_inv = r
        .solve_upper_triangular(&DMatrix::identity(d * p, d * p))
        .ok_or_else(|| Error::SingularDesign("triangular inverse failed".into()))?;
    let gram_inverse = &r_inv * r_inv.transpose();

    let residuals = &y - &x * &b;
    let df = (n - p - d * p) as f64;
    let mut sigma_a = residuals.transpose() * &residuals / df;
    // exact symmetry
    sigma_a = (&sigma_a + sigma_a.transpose()) * 0.5;

    let phi: Vec<DMatrix<f64>> = (0..p)
        .map(|l| b.rows(l * d, d).transpose())
        .collect();
    let std_errors = (0..p)
        .map(|l| {
            DMatrix::from_fn(d, d, |i, j| {
                let k = l * d + j;
                (sigma_a[(i, i)] * gram_inverse[(k, k)]).max(0.0).sqrt()
            })
        })
        .collect();

    let history = (0..p)
        .map(|l| panel.data().row(n - 1 - l).transpose())
        .collect();
    let spectral_radius = companion_spectral_radius(&phi);
    let sigma_nonsingular = sigma_a.clone().cholesky().is_some();

    Ok(VarModel {
        column_ids: panel.ids().to_vec(),
        n,
        p,
        phi,
        sigma_a,
        residuals,
        std_errors,
        df,
        spectral_radius,
        sigma_nonsingular,
        history,
        column_means: panel.column_means().to_vec(),
        column_scales: panel.column_scales().to_vec(),
    })
}

fn companion_spectral_radius(phi: &[DMatrix<f64>]) -> f64 {
    let d = phi[0].nrows();
    let p = phi.len();
    let mut companion = DMatrix::zeros(d * p, d * p);
    for (l, m) in phi.iter().enumerate() {
        companion.view_mut((0, l * d), (d, d)).copy_from(m);
    }
    for k in 0..d * (p - 1) {
        companion[(d + k, k)] = 1.0;
    }
    companion
        .complex_eigenvalues()
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

impl VarModel {
    /// A model with given dynamics, for forecasting and impulse responses.
    ///
    /// `history` holds the last `p` observations, most recent first. The
    /// model carries no estimation output, so inference on it fails.
    pub fn from_parts(
        column_ids: Vec<String>,
        phi: Vec<DMatrix<f64>>,
        sigma_a: DMatrix<f64>,
        history: Vec<DVector<f64>>,
    ) -> Result<Self> {
        let d = column_ids.len();
        let p = phi.len();
        if p == 0 {
            return Err(Error::Domain("at least one coefficient matrix is required".into()));
        }
        if phi.iter().any(|m| m.shape() != (d, d)) || sigma_a.shape() != (d, d) {
            return Err(Error::Consistency(format!("coefficient matrices must be {d}×{d}")));
        }
        if history.len() != p || history.iter().any(|h| h.len() != d) {
            return Err(Error::Consistency(format!("history must hold {p} vectors of length {d}")));
        }
        Ok(VarModel {
            spectral_radius: companion_spectral_radius(&phi),
            sigma_nonsingular: sigma_a.clone().cholesky().is_some(),
            std_errors: vec![DMatrix::zeros(d, d); p],
            residuals: DMatrix::zeros(0, d),
            column_ids,
            n: 0,
            p,
            phi,
            sigma_a,
            df: 0.0,
            history,
            column_means: vec![0.0; d],
            column_scales: vec![1.0; d],
        })
    }

    pub fn column_ids(&self) -> &[String] {
        &self.column_ids
    }

    /// Panel rows used for the fit.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.column_ids.len()
    }

    pub fn p(&self) -> usize {
        self.p
    }

    /// `Φ_lag`, `lag` starting at 1.
    pub fn phi(&self, lag: usize) -> &DMatrix<f64> {
        &self.phi[lag - 1]
    }

    pub fn phis(&self) -> &[DMatrix<f64>] {
        &self.phi
    }

    pub fn sigma_a(&self) -> &DMatrix<f64> {
        &self.sigma_a
    }

    pub fn residuals(&self) -> &DMatrix<f64> {
        &self.residuals
    }

    pub fn std_errors(&self) -> &[DMatrix<f64>] {
        &self.std_errors
    }

    /// Residual degrees of freedom, `n − p − d·p`.
    pub fn df(&self) -> f64 {
        self.df
    }

    /// Spectral radius of the companion matrix.
    pub fn spectral_radius(&self) -> f64 {
        self.spectral_radius
    }

    pub fn is_stable(&self) -> bool {
        self.spectral_radius < 1.0
    }

    pub fn sigma_nonsingular(&self) -> bool {
        self.sigma_nonsingular
    }

    pub fn history(&self) -> &[DVector<f64>] {
        &self.history
    }

    pub fn column_means(&self) -> &[f64] {
        &self.column_means
    }

    pub fn column_scales(&self) -> &[f64] {
        &self.column_scales
    }

    /// Warnings about the fit: instability and a singular innovation
    /// covariance. Neither blocks downstream use.
    pub fn flags(&self) -> Vec<String> {
        let mut flags = Vec::new();
        if !self.is_stable() {
            flags.push(format!("unstable:spectral_radius={}", self.spectral_radius));
        }
        if !self.sigma_nonsingular {
            flags.push("singular_innovation_covariance".to_owned());
        }
        flags
    }

    /// `t = Φ̂ / se` per lag.
    pub fn t_stats(&self) -> Vec<DMatrix<f64>> {
        self.phi
            .iter()
            .zip(&self.std_errors)
            .map(|(b, se)| b.component_div(se))
            .collect()
    }
}
