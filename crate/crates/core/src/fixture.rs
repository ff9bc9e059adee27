//! Seeded synthetic data: VAR(1) simulation and the labeled 8-CRI panel
//! with a planted 15-edge Granger network.

use chrono::NaiveDate;
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::io::render_series_csv;
use crate::series::{Frequency, TimeSeries};

const BURN_IN: usize = 200;

/// `n` draws of `y_t = Φ y_{t−1} + a_t`, `a_t ~ N(0, I)`, after a burn-in
/// from zero. Rows are time, columns are series.
pub fn simulate_var1<R: Rng + ?Sized>(phi: &DMatrix<f64>, n: usize, rng: &mut R) -> DMatrix<f64> {
    let d = phi.nrows();
    let mut y = DVector::zeros(d);
    let mut out = DMatrix::zeros(n, d);
    for t in 0..BURN_IN + n {
        let noise = DVector::from_fn(d, |_, _| rng.sample::<f64, _>(StandardNormal));
        y = phi * &y + noise;
        if t >= BURN_IN {
            out.set_row(t - BURN_IN, &y.transpose());
        }
    }
    out
}

/// Node order of the planted network.
pub const PLANTED_NODES: [&str; 8] = [
    "space_weather",
    "climate",
    "agri_a",
    "agri_b",
    "energy_a",
    "energy_b",
    "ecology",
    "finance",
];

/// Domain label per node, parallel to [`PLANTED_NODES`].
pub const PLANTED_DOMAINS: [&str; 8] = [
    "space weather",
    "climate",
    "agriculture",
    "agriculture",
    "energy",
    "energy",
    "ecology",
    "finance",
];

/// `(source, target, coefficient)`: the past of `source` drives `target`.
pub const PLANTED_EDGES: [(usize, usize, f64); 15] = [
    (0, 1, 0.4),
    (0, 2, 0.45),
    (0, 3, -0.4),
    (0, 4, 0.5),
    (0, 5, -0.45),
    (0, 6, 0.4),
    (0, 7, 0.4),
    (1, 2, 0.5),
    (1, 4, 0.45),
    (1, 6, -0.4),
    (2, 4, 0.4),
    (4, 2, -0.4),
    (4, 7, 0.5),
    (5, 7, -0.45),
    (6, 3, 0.4),
];

pub const PLANTED_DIAGONAL: f64 = 0.3;

/// `Φ` with `Φ[(target, source)]` set for each planted edge.
pub fn planted_phi() -> DMatrix<f64> {
    let mut phi = DMatrix::from_diagonal_element(8, 8, PLANTED_DIAGONAL);
    for &(source, target, w) in &PLANTED_EDGES {
        phi[(target, source)] = w;
    }
    phi
}

const LEVELS: [(f64, f64); 8] = [
    (40.0, 12.0),
    (0.2, 0.6),
    (-0.1, 1.0),
    (55.0, 8.0),
    (0.15, 0.05),
    (3.0, 1.5),
    (1.0, 0.1),
    (18.0, 6.0),
];

/// The planted network simulated for `n` months from January 1969, each
/// node shifted and scaled to its own units.
pub fn synthetic_cri_panel(n: usize, seed: u64) -> Result<Vec<TimeSeries>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = simulate_var1(&planted_phi(), n, &mut rng);
    let start = NaiveDate::from_ymd_opt(1969, 1, 1).expect("valid date");
    PLANTED_NODES
        .iter()
        .enumerate()
        .map(|(j, id)| {
            let (mean, scale) = LEVELS[j];
            TimeSeries::from_values(*id, Frequency::Monthly, start, data.column(j).iter().map(|x| mean + scale * x))
                .map(|s| s.with_flag("synthetic"))
        })
        .collect()
}

/// Significance level of the bundled configuration; see the README for how
/// exact recovery of the planted edges depends on it.
pub const SYNTHETIC_ALPHA: f64 = 0.001;

pub const SYNTHETIC_CSV: &str = "synthetic_cri.csv";
pub const SYNTHETIC_CONFIG: &str = "config.toml";

/// Pipeline configuration for [`SYNTHETIC_CSV`] in the same directory.
pub fn synthetic_config_toml() -> String {
    let mut out = String::from(
        "# Synthetic 8-CRI panel with a planted 15-edge Granger network.\n\
         version = 1\n\n\
         [[inputs]]\n",
    );
    out += &format!("path = \"{SYNTHETIC_CSV}\"\nfrequency = \"monthly\"\nseries = [\n");
    for (id, domain) in PLANTED_NODES.iter().zip(PLANTED_DOMAINS) {
        out += &format!("  {{ id = \"{id}\", role = \"cri\", domain = \"{domain}\" }},\n");
    }
    out += "]\n\n[panel]\nfrequency = \"monthly\"\njoin = \"intersect\"\ncenter = true\nstandardize = true\n\n";
    out += &format!(
        "[var]\nlag = 1\nalpha = {SYNTHETIC_ALPHA}\ncorrection = \"bh_fdr\"\nweighting = \"binary\"\n\n\
         [output]\ndir = \"out\"\nformats = [\"json\", \"dot\", \"csv\"]\n"
    );
    out
}

/// Writes [`SYNTHETIC_CSV`] and [`SYNTHETIC_CONFIG`] into `dir` and returns
/// the config path.
pub fn write_synthetic_fixture(dir: impl AsRef<std::path::Path>, months: usize, seed: u64) -> Result<std::path::PathBuf> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let csv = dir.join(SYNTHETIC_CSV);
    std::fs::write(&csv, render_series_csv(&synthetic_cri_panel(months, seed)?)).map_err(|e| Error::io(&csv, e))?;
    let config = dir.join(SYNTHETIC_CONFIG);
    std::fs::write(&config, synthetic_config_toml()).map_err(|e| Error::io(&config, e))?;
    Ok(config)
}
