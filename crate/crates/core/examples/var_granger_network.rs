//! Fit a VAR(1) to the planted eight-node panel, test every coefficient,
//! keep the BH-significant edges and score the network.

use gridrisk::fixture::{self, PLANTED_NODES, SYNTHETIC_ALPHA};
use gridrisk::series::{align_panel, Aggregate, Frequency, Join};
use gridrisk::sri::{sri_report, Weighting};
use gridrisk::var::{fit_var, granger_network, Correction};

fn main() -> gridrisk::Result<()> {
    let series = fixture::synthetic_cri_panel(600, 7)?;
    let panel = align_panel(&series, Frequency::Monthly, Join::Intersect, Aggregate::Mean)?.standardize()?;
    let model = fit_var(&panel, 1)?;
    println!(
        "n = {}, d = {}, df = {}, spectral radius {:.3}",
        model.n(),
        model.d(),
        model.df(),
        model.spectral_radius()
    );

    let network = granger_network(&model, SYNTHETIC_ALPHA, Correction::BhFdr)?;
    for e in network.significant_edges() {
        println!(
            "  {:>13} -> {:<13} {:+.3}  t {:+6.2}  q {:.1e}",
            PLANTED_NODES[e.source], PLANTED_NODES[e.target], e.weight, e.t_stat, e.q_value
        );
    }

    let report = sri_report(&network, &panel, Weighting::Binary)?;
    println!("DGC {} ({} of {})", report.dgc, report.significant_edges, report.d * (report.d - 1));
    if let Some(c) = &report.centrality {
        let mut ranked: Vec<(&str, f64)> = PLANTED_NODES.iter().copied().zip(c.scores.iter().copied()).collect();
        ranked.sort_by(|a, b| b.1.total_cmp(&a.1));
        println!("centrality (damped: {}):", c.damped);
        for (id, s) in ranked {
            println!("  {id:<13} {s:.4}");
        }
    }
    println!("similarity of space_weather and climate: {:.3}", report.similarity[0][1]);
    Ok(())
}
