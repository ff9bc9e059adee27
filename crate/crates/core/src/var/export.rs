use serde::{Deserialize, Serialize};

use super::network::GrangerNetwork;
use super::VarModel;

/// Serializable snapshot of a fitted model. Matrices are row-major nested
/// lists; q-values are only present when a network has been built, and are
/// `null` on the diagonal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarModelExport {
    pub column_ids: Vec<String>,
    pub n: usize,
    pub d: usize,
    pub p: usize,
    pub df: f64,
    pub stable: bool,
    pub spectral_radius: f64,
    pub phi: Vec<Vec<Vec<f64>>>,
    pub sigma_a: Vec<Vec<f64>>,
    pub std_errors: Vec<Vec<Vec<f64>>>,
    pub p_values: Option<Vec<Vec<Vec<f64>>>>,
    pub q_values: Option<Vec<Vec<Vec<Option<f64>>>>>,
    pub flags: Vec<String>,
}

fn rows(m: &nalgebra::DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

impl VarModelExport {
    pub fn new(model: &VarModel, network: Option<&GrangerNetwork>) -> Self {
        let d = model.d();
        let q_values = network.map(|net| {
            let mut q = vec![vec![vec![None; d]; d]; model.p()];
            for t in &net.tests {
                q[t.lag - 1][t.target][t.source] = Some(t.q_value);
            }
            q
        });
        VarModelExport {
            column_ids: model.column_ids().to_vec(),
            n: model.n(),
            d,
            p: model.p(),
            df: model.df(),
            stable: model.is_stable(),
            spectral_radius: model.spectral_radius(),
            phi: model.phis().iter().map(rows).collect(),
            sigma_a: rows(model.sigma_a()),
            std_errors: model.std_errors().iter().map(rows).collect(),
            p_values: super::coefficient_tests(model)
                .ok()
                .map(|ps| ps.iter().map(rows).collect()),
            q_values,
            flags: model.flags(),
        }
    }
}
