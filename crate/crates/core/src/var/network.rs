use serde::{Deserialize, Serialize};

use super::inference::{check_alpha, coefficient_tests, fdr_adjust};
use super::VarModel;
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Correction {
    None,
    #[default]
    BhFdr,
}

/// One off-diagonal coefficient test, `Φ_lag[(target, source)]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientTest {
    pub lag: usize,
    pub source: usize,
    pub target: usize,
    pub coefficient: f64,
    pub t_stat: f64,
    pub p_value: f64,
    pub q_value: f64,
    pub reject: bool,
}

/// Directed edge `source → target`: the past of `source` predicts `target`.
///
/// With `p > 1` the edge is represented by the lag with the largest `|t|`,
/// and it is significant when any of its lags is rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrangerEdge {
    pub source: usize,
    pub target: usize,
    pub lag: usize,
    pub weight: f64,
    pub t_stat: f64,
    pub p_value: f64,
    pub q_value: f64,
    pub significant: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrangerNetwork {
    pub node_ids: Vec<String>,
    /// Every ordered pair `source ≠ target`, significant or not.
    pub edges: Vec<GrangerEdge>,
    pub tests: Vec<CoefficientTest>,
    pub alpha: f64,
    pub correction: Correction,
    pub n: usize,
    pub p: usize,
}

impl GrangerNetwork {
    pub fn d(&self) -> usize {
        self.node_ids.len()
    }

    pub fn significant_edges(&self) -> impl Iterator<Item = &GrangerEdge> {
        self.edges.iter().filter(|e| e.significant)
    }

    pub fn edge(&self, source: usize, target: usize) -> Option<&GrangerEdge> {
        self.edges
            .iter()
            .find(|e| e.source == source && e.target == target)
    }

    /// `A[(j, i)] = w` for each significant edge `j → i`.
    pub fn adjacency(&self, weight: impl Fn(&GrangerEdge) -> f64) -> nalgebra::DMatrix<f64> {
        let d = self.d();
        let mut a = nalgebra::DMatrix::zeros(d, d);
        for e in self.significant_edges() {
            a[(e.source, e.target)] = weight(e);
        }
        a
    }
}

/// Tests all `d(d−1)·p` off-diagonal coefficients, corrects them jointly,
/// and collapses the lags into one edge per ordered pair.
pub fn granger_network(model: &VarModel, alpha: f64, correction: Correction) -> Result<GrangerNetwork> {
    check_alpha(alpha)?;
    let p_values = coefficient_tests(model)?;
    let t_stats = model.t_stats();
    let d = model.d();

    let mut tests = Vec::with_capacity(d * d.saturating_sub(1) * model.p());
    for lag in 1..=model.p() {
        for target in 0..d {
            for source in (0..d).filter(|&s| s != target) {
                tests.push(CoefficientTest {
                    lag,
                    source,
                    target,
                    coefficient: model.phi(lag)[(target, source)],
                    t_stat: t_stats[lag - 1][(target, source)],
                    p_value: p_values[lag - 1][(target, source)],
                    q_value: p_values[lag - 1][(target, source)],
                    reject: false,
                });
            }
        }
    }
    if !tests.is_empty() {
        match correction {
            Correction::BhFdr => {
                let ps: Vec<f64> = tests.iter().map(|t| t.p_value).collect();
                for (t, dec) in tests.iter_mut().zip(fdr_adjust(&ps, alpha)?) {
                    t.q_value = dec.q_value;
                    t.reject = dec.reject;
                }
            }
            Correction::None => {
                for t in &mut tests {
                    t.reject = t.p_value <= alpha;
                }
            }
        }
    }

    let mut edges = Vec::with_capacity(d * d.saturating_sub(1));
    for target in 0..d {
        for source in (0..d).filter(|&s| s != target) {
            let of_pair = || tests.iter().filter(|t| t.source == source && t.target == target);
            let best = of_pair()
                .reduce(|a, b| if b.t_stat.abs() > a.t_stat.abs() { b } else { a })
                .expect("at least one lag");
            edges.push(GrangerEdge {
                source,
                target,
                lag: best.lag,
                weight: best.coefficient,
                t_stat: best.t_stat,
                p_value: best.p_value,
                q_value: best.q_value,
                significant: of_pair().any(|t| t.reject),
            });
        }
    }
    edges.sort_by_key(|e| (e.source, e.target));

    Ok(GrangerNetwork {
        node_ids: model.column_ids().to_vec(),
        edges,
        tests,
        alpha,
        correction,
        n: model.n(),
        p: model.p(),
    })
}
