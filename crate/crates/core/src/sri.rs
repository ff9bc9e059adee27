//! Systemic risk indicators from a Granger network: eigenvector centrality,
//! degree of Granger causality, and pairwise cosine similarity.
//!
//! Adjacency follows `A[(j, i)] = w` for an edge `j → i`, and centrality is
//! the right Perron vector `A v = λ v`: a node scores highly when it drives
//! highly scored nodes. Using `Aᵀ` instead gives the dual measure of
//! influence received.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::Panel;
use crate::var::{Correction, GrangerNetwork};

pub const CENTRALITY_TOLERANCE: f64 = 1e-10;
pub const CENTRALITY_MAX_ITERATIONS: usize = 10_000;
/// Weight kept on the adjacency when teleportation is mixed in.
pub const DAMPING: f64 = 0.99;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Weighting {
    #[default]
    Binary,
    AbsCoefficient,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CentralityScores {
    /// Nonnegative, unit Euclidean norm, in node order.
    pub scores: Vec<f64>,
    /// Leading eigenvalue of the (possibly damped) adjacency.
    pub eigenvalue: f64,
    /// Whether teleportation was mixed in because `A` is reducible.
    pub damped: bool,
    pub iterations: usize,
}

fn reaches_all(a: &DMatrix<f64>, transpose: bool) -> bool {
    let d = a.nrows();
    let mut seen = vec![false; d];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(u) = stack.pop() {
        for v in 0..d {
            let w = if transpose { a[(v, u)] } else { a[(u, v)] };
            if w > 0.0 && !seen[v] {
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// Whether the directed graph of the positive entries of `a` is strongly
/// connected.
pub fn is_strongly_connected(a: &DMatrix<f64>) -> bool {
    a.nrows() > 0 && reaches_all(a, false) && reaches_all(a, true)
}

/// The matrix whose Perron vector [`perron_vector`] returns: `a` itself when
/// strongly connected, otherwise `DAMPING · a + (1 − DAMPING) · (s̄/d) · 11ᵀ`
/// with `s̄` the mean row sum of `a`.
pub fn effective_matrix(a: &DMatrix<f64>) -> (DMatrix<f64>, bool) {
    if is_strongly_connected(a) {
        return (a.clone(), false);
    }
    let d = a.nrows();
    let mean_strength = a.sum() / d as f64;
    let teleport = (1.0 - DAMPING) * mean_strength / d as f64;
    (a.map(|x| DAMPING * x + teleport), true)
}

/// Leading eigenvector of a nonnegative square matrix by shifted power
/// iteration on `M + I`, where `M` is [`effective_matrix`] of `a` scaled to a
/// unit maximum entry.
///
/// Iteration stops when `‖M v − λ v‖₂ < 1e-10` for unit `v`.
pub fn perron_vector(a: &DMatrix<f64>) -> Result<CentralityScores> {
    let d = a.nrows();
    if a.ncols() != d {
        return Err(Error::Domain(format!("adjacency must be square, got {}×{}", d, a.ncols())));
    }
    if a.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
        return Err(Error::Domain("adjacency entries must be finite and nonnegative".into()));
    }
    let scale = a.max();
    if d == 0 || scale == 0.0 {
        return Err(Error::EmptyNetwork);
    }
    let (m, damped) = effective_matrix(&(a / scale));

    let mut v = DVector::from_element(d, 1.0 / (d as f64).sqrt());
    let mut residual = f64::INFINITY;
    for iteration in 1..=CENTRALITY_MAX_ITERATIONS {
        let mv = &m * &v;
        let lambda = v.dot(&mv);
        residual = (&mv - &v * lambda).norm();
        if residual < CENTRALITY_TOLERANCE {
            return Ok(CentralityScores {
                scores: v.iter().map(|x| x.max(0.0)).collect(),
                eigenvalue: lambda * scale,
                damped,
                iterations: iteration,
            });
        }
        let next = mv + &v;
        v = &next / next.norm();
    }
    Err(Error::Convergence {
        iterations: CENTRALITY_MAX_ITERATIONS,
        residual,
    })
}

/// Eigenvector centrality over the significant edges of `network`.
pub fn eigenvector_centrality(network: &GrangerNetwork, weighting: Weighting) -> Result<CentralityScores> {
    let a = network.adjacency(|e| match weighting {
        Weighting::Binary => 1.0,
        Weighting::AbsCoefficient => e.weight.abs(),
    });
    perron_vector(&a)
}

/// Degree of Granger causality: significant directed edges over `d(d−1)`.
pub fn dgc(network: &GrangerNetwork) -> Result<f64> {
    let d = network.d();
    if d < 2 {
        return Err(Error::Domain(format!("degree of Granger causality needs d ≥ 2, got {d}")));
    }
    let count = network
        .significant_edges()
        .filter(|e| e.source != e.target)
        .count();
    Ok(count as f64 / (d * (d - 1)) as f64)
}

/// `⟨a, b⟩ / (‖a‖ ‖b‖)`, clamped to `[−1, 1]`.
pub fn cosine_similarity(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::Domain(format!(
            "vectors differ in length ({} vs {})",
            a.len(),
            b.len()
        )));
    }
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let (na, nb) = (norm(a), norm(b));
    if na == 0.0 || nb == 0.0 {
        return Err(Error::Domain("cosine similarity of a zero vector".into()));
    }
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    Ok((dot / (na * nb)).clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SriReport {
    pub node_ids: Vec<String>,
    pub dgc: f64,
    pub significant_edges: usize,
    pub weighting: Weighting,
    pub centrality: Option<CentralityScores>,
    pub centrality_absent_reason: Option<String>,
    /// Row-major `d × d` cosine similarities of the panel columns.
    pub similarity: Vec<Vec<f64>>,
    pub alpha: f64,
    pub correction: Correction,
    pub n: usize,
    pub d: usize,
    pub p: usize,
}

/// DGC, centrality and the cosine-similarity matrix of the panel columns the
/// network was fitted on. A centrality failure is recorded with its reason
/// rather than failing the report.
pub fn sri_report(network: &GrangerNetwork, panel: &Panel, weighting: Weighting) -> Result<SriReport> {
    if network.node_ids != panel.ids() {
        return Err(Error::Consistency(format!(
            "network nodes {:?} do not match panel columns {:?}",
            network.node_ids,
            panel.ids()
        )));
    }
    let d = network.d();
    let columns: Vec<Vec<f64>> = (0..d).map(|j| panel.column(j).to_vec()).collect();
    let mut similarity = vec![vec![0.0; d]; d];
    for i in 0..d {
        for j in i..d {
            let s = if i == j {
                cosine_similarity(&columns[i], &columns[i]).map(|_| 1.0)
            } else {
                cosine_similarity(&columns[i], &columns[j])
            }
            .map_err(|e| e.at_stage("similarity", Some(&network.node_ids[i])))?;
            similarity[i][j] = s;
            similarity[j][i] = s;
        }
    }
    let (centrality, centrality_absent_reason) = match eigenvector_centrality(network, weighting) {
        Ok(c) => (Some(c), None),
        Err(e @ (Error::EmptyNetwork | Error::Convergence { .. })) => (None, Some(e.to_string())),
        Err(e) => return Err(e),
    };
    Ok(SriReport {
        node_ids: network.node_ids.clone(),
        dgc: dgc(network)?,
        significant_edges: network.significant_edges().count(),
        weighting,
        centrality,
        centrality_absent_reason,
        similarity,
        alpha: network.alpha,
        correction: network.correction,
        n: network.n,
        d,
        p: network.p,
    })
}
