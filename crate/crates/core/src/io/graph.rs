use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sri::SriReport;
use crate::var::{Correction, GrangerNetwork};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeExport {
    pub id: String,
    pub domain: String,
    pub centrality: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeExport {
    pub source: String,
    pub target: String,
    pub weight: f64,
    pub p_value: f64,
    pub q_value: f64,
    pub significant: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkMetrics {
    pub dgc: f64,
    pub significant_edges: usize,
    pub alpha: f64,
    pub correction: Correction,
    pub n: usize,
    pub d: usize,
    pub p: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    /// SHA-256 of the normalized pipeline configuration.
    pub config_hash: String,
    /// RFC 3339.
    pub generated_at: String,
    pub generator: String,
}

/// The network as drawn: every ordered pair with its test outcome, node
/// centralities and summary metrics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkExport {
    pub nodes: Vec<NodeExport>,
    pub edges: Vec<EdgeExport>,
    pub metrics: NetworkMetrics,
    pub provenance: Provenance,
}

impl NetworkExport {
    /// `domains` labels the nodes in network order.
    pub fn new(
        network: &GrangerNetwork,
        report: &SriReport,
        domains: &[String],
        provenance: Provenance,
    ) -> Result<Self> {
        if domains.len() != network.d() || report.node_ids != network.node_ids {
            return Err(Error::Consistency(
                "network, report and domain labels describe different nodes".into(),
            ));
        }
        let nodes = network
            .node_ids
            .iter()
            .zip(domains)
            .enumerate()
            .map(|(j, (id, domain))| NodeExport {
                id: id.clone(),
                domain: domain.clone(),
                centrality: report.centrality.as_ref().map(|c| c.scores[j]),
            })
            .collect();
        let edges = network
            .edges
            .iter()
            .map(|e| EdgeExport {
                source: network.node_ids[e.source].clone(),
                target: network.node_ids[e.target].clone(),
                weight: e.weight,
                p_value: e.p_value,
                q_value: e.q_value,
                significant: e.significant,
            })
            .collect();
        let export = NetworkExport {
            nodes,
            edges,
            metrics: NetworkMetrics {
                dgc: report.dgc,
                significant_edges: report.significant_edges,
                alpha: network.alpha,
                correction: network.correction,
                n: network.n,
                d: network.d(),
                p: network.p,
            },
            provenance,
        };
        export.validate()?;
        Ok(export)
    }

    /// Edge endpoints must be declared nodes and weights finite.
    pub fn validate(&self) -> Result<()> {
        for e in &self.edges {
            for end in [&e.source, &e.target] {
                if !self.nodes.iter().any(|n| &n.id == end) {
                    return Err(Error::Consistency(format!("edge endpoint `{end}` is not a node")));
                }
            }
            if !e.weight.is_finite() {
                return Err(Error::Consistency(format!(
                    "edge {} -> {} has a non-finite weight",
                    e.source, e.target
                )));
            }
        }
        Ok(())
    }
}

fn quote(s: &str) -> String {
    let escaped = s
        .replace('\\', "\\\\")
        .replace('"', "\\\"")
        .replace('\n', "\\n");
    format!("\"{escaped}\"")
}

/// Graphviz digraph of the significant edges: blue for positive weights,
/// red for negative, `penwidth = max(0.5, 4·|w| / max|w|)`.
pub fn render_dot(export: &NetworkExport) -> Result<String> {
    export.validate()?;
    let significant: Vec<&EdgeExport> = export.edges.iter().filter(|e| e.significant).collect();
    let max_abs = significant.iter().map(|e| e.weight.abs()).fold(0.0, f64::max);

    let mut out = String::from("digraph granger {\n  rankdir=LR;\n  node [shape=ellipse];\n");
    for n in &export.nodes {
        let label = match n.centrality {
            Some(c) => format!("{}\n{}\n{:.3}", n.id, n.domain, c),
            None => format!("{}\n{}", n.id, n.domain),
        };
        writeln!(out, "  {} [label={}];", quote(&n.id), quote(&label)).expect("write to string");
    }
    for e in significant {
        let color = if e.weight > 0.0 {
            "blue"
        } else if e.weight < 0.0 {
            "red"
        } else {
            "gray"
        };
        let width = if max_abs > 0.0 {
            (e.weight.abs() / max_abs * 4.0).max(0.5)
        } else {
            0.5
        };
        writeln!(
            out,
            "  {} -> {} [color={color}, penwidth={width}, label={}];",
            quote(&e.source),
            quote(&e.target),
            quote(&format!("{:.3}", e.weight))
        )
        .expect("write to string");
    }
    out.push_str("}\n");
    Ok(out)
}

pub fn export_dot(export: &NetworkExport, path: impl AsRef<Path>) -> Result<()> {
    let text = render_dot(export)?;
    std::fs::write(path.as_ref(), text).map_err(|e| Error::io(path.as_ref(), e))
}
