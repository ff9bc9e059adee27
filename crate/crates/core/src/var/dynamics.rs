use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use super::VarModel;
use crate::error::{Error, Result};

/// Non-orthogonalized impulse responses `Ψ_0 … Ψ_H`, with `Ψ_0 = I` and
/// `Ψ_h = Σ_l Φ_l Ψ_{h−l}` (which is `Φ^h` for a VAR(1)).
pub fn impulse_response(model: &VarModel, horizon: usize) -> Vec<DMatrix<f64>> {
    let d = model.d();
    let mut psi: Vec<DMatrix<f64>> = vec![DMatrix::identity(d, d)];
    for h in 1..=horizon {
        let mut next = DMatrix::zeros(d, d);
        for l in 1..=model.p().min(h) {
            next += model.phi(l) * &psi[h - l];
        }
        psi.push(next);
    }
    psi
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastStep {
    pub horizon: usize,
    pub point: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    /// Diagonal of the `h`-step forecast error covariance.
    pub variance: Vec<f64>,
}

/// Forecasts in panel units (centered, possibly standardized).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Forecast {
    pub column_ids: Vec<String>,
    pub level: f64,
    pub steps: Vec<ForecastStep>,
    column_means: Vec<f64>,
    column_scales: Vec<f64>,
}

impl Forecast {
    /// The same forecast mapped back through the panel's standardization
    /// and centering.
    pub fn in_original_units(&self) -> Vec<ForecastStep> {
        let back = |v: &[f64]| -> Vec<f64> {
            v.iter()
                .enumerate()
                .map(|(j, x)| x * self.column_scales[j] + self.column_means[j])
                .collect()
        };
        self.steps
            .iter()
            .map(|s| ForecastStep {
                horizon: s.horizon,
                point: back(&s.point),
                lower: back(&s.lower),
                upper: back(&s.upper),
                variance: s
                    .variance
                    .iter()
                    .enumerate()
                    .map(|(j, v)| v * self.column_scales[j].powi(2))
                    .collect(),
            })
            .collect()
    }
}

/// Point forecasts and Gaussian intervals for horizons `1..=horizon` from
/// the end of the fitted sample.
///
/// The `h`-step error covariance is `Σ_{i<h} Ψ_i Σ_a Ψ_iᵀ`.
pub fn forecast(model: &VarModel, horizon: usize, level: f64) -> Result<Forecast> {
    if horizon < 1 {
        return Err(Error::Domain("forecast horizon must be at least 1".into()));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::Domain(format!("interval level must lie in (0, 1), got {level}")));
    }
    let z = Normal::standard().inverse_cdf((1.0 + level) / 2.0);
    let psi = impulse_response(model, horizon - 1);
    let d = model.d();

    // most recent first
    let mut recent: Vec<DVector<f64>> = model.history().to_vec();
    let mut mse = DMatrix::zeros(d, d);
    let mut steps = Vec::with_capacity(horizon);
    for h in 1..=horizon {
        let mut y = DVector::zeros(d);
        for (l, past) in recent.iter().take(model.p()).enumerate() {
            y += model.phi(l + 1) * past;
        }
        mse += &psi[h - 1] * model.sigma_a() * psi[h - 1].transpose();
        let variance: Vec<f64> = mse.diagonal().iter().map(|v| v.max(0.0)).collect();
        let half: Vec<f64> = variance.iter().map(|v| z * v.sqrt()).collect();
        steps.push(ForecastStep {
            horizon: h,
            point: y.iter().copied().collect(),
            lower: y.iter().zip(&half).map(|(m, w)| m - w).collect(),
            upper: y.iter().zip(&half).map(|(m, w)| m + w).collect(),
            variance,
        });
        recent.insert(0, y);
    }
    Ok(Forecast {
        column_ids: model.column_ids().to_vec(),
        level,
        steps,
        column_means: model.column_means().to_vec(),
        column_scales: model.column_scales().to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn var1(phi: DMatrix<f64>, y_n: Vec<f64>) -> VarModel {
        let d = phi.nrows();
        let ids = (0..d).map(|j| format!("y{j}")).collect();
        let sigma = DMatrix::from_fn(d, d, |i, j| if i == j { 1.0 } else { 0.3 });
        VarModel::from_parts(ids, vec![phi], sigma, vec![DVector::from_vec(y_n)]).unwrap()
    }

    fn matrix_power(phi: &DMatrix<f64>, h: usize) -> DMatrix<f64> {
        let mut out = DMatrix::identity(phi.nrows(), phi.ncols());
        for _ in 0..h {
            out = &out * phi;
        }
        out
    }

    #[test]
    fn zero_dynamics_forecast_the_mean() {
        let m = var1(DMatrix::zeros(3, 3), vec![1.0, -2.0, 0.5]);
        let f = forecast(&m, 6, 0.9).unwrap();
        for s in &f.steps {
            assert_eq!(s.point, vec![0.0; 3]);
            assert_eq!(s.variance, vec![1.0; 3]);
        }
    }

    #[test]
    fn two_step_point_is_phi_squared() {
        let phi = DMatrix::from_row_slice(2, 2, &[0.5, 0.2, -0.1, 0.3]);
        let y = vec![1.5, -0.7];
        let f = forecast(&var1(phi.clone(), y.clone()), 2, 0.95).unwrap();
        let expected = &phi * &phi * DVector::from_vec(y);
        for j in 0..2 {
            assert!((f.steps[1].point[j] - expected[j]).abs() < 1e-15);
        }
        // 95% Gaussian half-width at h = 1 is 1.959964 σ
        assert!((f.steps[0].upper[0] - f.steps[0].point[0] - 1.959963984540054).abs() < 1e-9);
    }

    #[test]
    fn interval_width_grows_with_horizon() {
        let phi = DMatrix::from_row_slice(3, 3, &[0.5, 0.1, 0.0, -0.2, 0.4, 0.1, 0.0, 0.3, 0.2]);
        let f = forecast(&var1(phi, vec![0.0; 3]), 12, 0.8).unwrap();
        for w in f.steps.windows(2) {
            let tr = |s: &ForecastStep| s.variance.iter().sum::<f64>();
            assert!(tr(&w[1]) >= tr(&w[0]));
            for j in 0..3 {
                assert!(w[1].upper[j] - w[1].lower[j] >= w[0].upper[j] - w[0].lower[j] - 1e-15);
            }
        }
    }

    #[test]
    fn forecast_preconditions() {
        let m = var1(DMatrix::zeros(2, 2), vec![0.0; 2]);
        assert!(matches!(forecast(&m, 0, 0.9), Err(Error::Domain(_))));
        assert!(matches!(forecast(&m, 1, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn impulse_response_examples() {
        let m = var1(DMatrix::from_row_slice(2, 2, &[0.3, 0.1, 0.2, 0.4]), vec![0.0; 2]);
        assert_eq!(impulse_response(&m, 0), vec![DMatrix::identity(2, 2)]);
        let nil = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 2.0, 0.0, 0.0, 3.0, 0.0, 0.0, 0.0]);
        let psi = impulse_response(&var1(nil, vec![0.0; 3]), 3);
        assert_ne!(psi[2], DMatrix::zeros(3, 3));
        assert_eq!(psi[3], DMatrix::zeros(3, 3));
    }

    #[test]
    fn var2_recursion_by_hand() {
        let phi1 = DMatrix::from_row_slice(1, 1, &[0.5]);
        let phi2 = DMatrix::from_row_slice(1, 1, &[0.2]);
        let m = VarModel::from_parts(
            vec!["y".into()],
            vec![phi1, phi2],
            DMatrix::identity(1, 1),
            vec![DVector::from_vec(vec![2.0]), DVector::from_vec(vec![1.0])],
        )
        .unwrap();
        let psi = impulse_response(&m, 2);
        // ψ1 = 0.5, ψ2 = 0.5·0.5 + 0.2
        assert!((psi[2][(0, 0)] - 0.45).abs() < 1e-15);
        let f = forecast(&m, 2, 0.5).unwrap();
        // 0.5·2 + 0.2·1 = 1.2; 0.5·1.2 + 0.2·2 = 1.0
        assert!((f.steps[0].point[0] - 1.2).abs() < 1e-15);
        assert!((f.steps[1].point[0] - 1.0).abs() < 1e-15);
        assert!((f.steps[1].variance[0] - 1.25).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn irf_matches_matrix_powers(entries in proptest::collection::vec(-1.0f64..1.0, 16), h in 0usize..=20) {
            let raw = DMatrix::from_vec(4, 4, entries);
            // scale to spectral norm ≤ 0.9
            let norm = raw.norm().max(1e-12);
            let phi = raw * (0.9 / norm);
            let psi = impulse_response(&var1(phi.clone(), vec![0.0; 4]), h);
            prop_assert!((&psi[h] - matrix_power(&phi, h)).amax() < 1e-12);
        }
    }
}
