use std::collections::HashMap;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::config::{Format, Operation, PipelineConfig, Recipe};
use super::graph::{render_dot, NetworkExport, Provenance};
use super::tabular::{load_interruptions, load_long_csv, load_long_csv_as, render_panel_csv, render_report_csv, render_series_csv};
use crate::cri::{
    equal_weighted_index, lpi, monthly_reliability, reserve_margin_series, spi_with, AbundancePanel, CustomerBase, SpiOptions,
};
use crate::error::{Error, Result};
use crate::series::{
    align_panel, anomaly_series, degree_days, monthly_climatology, percentile_rank, simple_returns, standardize,
    threshold_day_count, Aggregate, Join, Panel, TimeSeries, DEFAULT_BASELINE,
};
use crate::sri::{sri_report, SriReport};
use crate::var::{fit_var, granger_network, GrangerNetwork, VarModel, VarModelExport};

/// How far a run goes. Each stage includes the ones before it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    /// Ingest and compute CRIs.
    Cri,
    /// Build the panel and fit the VAR.
    Fit,
    /// Test coefficients and build the Granger network.
    Network,
    /// Systemic risk indicators.
    #[default]
    Report,
}

impl std::str::FromStr for Stage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cri" => Ok(Stage::Cri),
            "fit" => Ok(Stage::Fit),
            "network" => Ok(Stage::Network),
            "report" => Ok(Stage::Report),
            other => Err(Error::Config(format!("unknown stage `{other}` (cri, fit, network, report)"))),
        }
    }
}

/// Per-run settings that sit outside the config file.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub stage: Stage,
    pub alpha: Option<f64>,
    pub lag: Option<usize>,
    pub formats: Option<Vec<Format>>,
    /// Overrides the configured output directory.
    pub out_dir: Option<PathBuf>,
    /// Fixed provenance timestamp; the current time when `None`.
    pub generated_at: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutputFile {
    pub name: String,
    pub contents: String,
}

/// Everything a run produced, with output files rendered but not written.
#[derive(Debug, Clone)]
pub struct PipelineRun {
    pub config: PipelineConfig,
    /// Network nodes in panel order.
    pub cris: Vec<TimeSeries>,
    pub domains: Vec<String>,
    pub panel: Option<Panel>,
    pub model: Option<VarModel>,
    pub network: Option<GrangerNetwork>,
    pub report: Option<SriReport>,
    pub export: Option<NetworkExport>,
    pub files: Vec<OutputFile>,
    pub out_dir: PathBuf,
}

impl PipelineRun {
    pub fn file(&self, name: &str) -> Option<&str> {
        self.files.iter().find(|f| f.name == name).map(|f| f.contents.as_str())
    }

    /// Writes every rendered file. Files go to temporary names first and are
    /// renamed once all of them have been written.
    pub fn write(&self) -> Result<Vec<PathBuf>> {
        let dir = &self.out_dir;
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let mut staged = Vec::new();
        for f in &self.files {
            let tmp = dir.join(format!(".{}.partial", f.name));
            if let Err(e) = std::fs::write(&tmp, &f.contents) {
                for (t, _) in &staged {
                    let _ = std::fs::remove_file(t);
                }
                let _ = std::fs::remove_file(&tmp);
                return Err(Error::io(&tmp, e));
            }
            staged.push((tmp, dir.join(&f.name)));
        }
        let mut written = Vec::new();
        for (tmp, fin) in staged {
            std::fs::rename(&tmp, &fin).map_err(|e| Error::io(&fin, e))?;
            written.push(fin);
        }
        Ok(written)
    }
}

fn read_inputs(config: &PipelineConfig) -> Result<HashMap<String, TimeSeries>> {
    let mut out = HashMap::new();
    for file in &config.inputs {
        let path = config.resolve(&file.path);
        let name = path.display().to_string();
        let loaded = match file.frequency {
            Some(f) => load_long_csv_as(&path, f),
            None => load_long_csv(&path),
        }
        .map_err(|e| e.at_stage("ingest", Some(&name)))?;
        let mut by_id: HashMap<String, TimeSeries> = loaded.into_iter().map(|s| (s.id().to_owned(), s)).collect();
        for decl in &file.series {
            let s = by_id.remove(&decl.id).ok_or_else(|| {
                Error::Coverage(format!("`{}` declares series `{}` but it has no rows", name, decl.id))
                    .at_stage("ingest", Some(&decl.id))
            })?;
            out.insert(decl.id.clone(), s);
        }
    }
    Ok(out)
}

fn parse_month(s: &str) -> Result<NaiveDate> {
    NaiveDate::parse_from_str(&format!("{s}-01"), "%Y-%m-%d")
        .map_err(|_| Error::Config(format!("`{s}` is not a YYYY-MM month")))
}

fn apply(config: &PipelineConfig, recipe: &Recipe, known: &HashMap<String, TimeSeries>) -> Result<TimeSeries> {
    let get = |id: &str| known.get(id).expect("validated reference");
    let gather = |ids: &[String]| ids.iter().map(|id| get(id).clone()).collect::<Vec<_>>();
    let out = match &recipe.op {
        Operation::Identity { input } => get(input).clone(),
        Operation::Monthly { input, aggregate } => get(input).to_monthly(*aggregate)?,
        Operation::Anomaly { input, baseline, strict } => {
            let [y0, y1] = baseline.unwrap_or([DEFAULT_BASELINE.0, DEFAULT_BASELINE.1]);
            let s = get(input);
            let clim = monthly_climatology(s, y0, y1, *strict)?;
            anomaly_series(&s.to_monthly(Aggregate::Mean)?, &clim)?
        }
        Operation::Spi { input, scale, baseline, strict } => {
            let monthly = get(input).to_monthly(Aggregate::Sum)?;
            let options = SpiOptions {
                scale_months: *scale,
                baseline: baseline.map(|[a, b]| (a, b)),
                strict: *strict,
            };
            spi_with(&monthly, &options)?.series
        }
        Operation::ThresholdDays { input, comparator, threshold } => threshold_day_count(get(input), *comparator, *threshold)?,
        Operation::DegreeDays { input, base, mode } => degree_days(get(input), *base, *mode)?,
        Operation::Percentile { input, grouping, baseline } => percentile_rank(get(input), *grouping, (baseline[0], baseline[1]))?,
        Operation::Standardize { input } => standardize(get(input))?,
        Operation::Returns { input, mode } => simple_returns(get(input), *mode)?,
        Operation::ReserveMargin { generation, demand } => reserve_margin_series(get(generation), get(demand))?,
        Operation::Reliability {
            interruptions,
            customers,
            index,
            start,
            months,
        } => {
            let log = load_interruptions(config.resolve(interruptions))?;
            let s = monthly_reliability(&recipe.id, &log.records, CustomerBase::new(*customers)?, parse_month(start)?, *months, *index)?;
            if log.momentary_skipped > 0 {
                s.with_flag(format!("momentary_skipped:{}", log.momentary_skipped))
            } else {
                s
            }
        }
        Operation::Lpi { inputs, base_year, zeros } => lpi(&AbundancePanel::new(gather(inputs))?, *base_year, *zeros)?,
        Operation::EqualWeighted { inputs } => {
            let series = gather(inputs);
            let panel = if series.len() == 1 {
                let s = &series[0];
                let values: Option<Vec<f64>> = s.values().iter().copied().collect();
                let values = values.ok_or_else(|| Error::Gap {
                    id: s.id().to_owned(),
                    date: "within the series".into(),
                })?;
                Panel::new(vec![s.id().to_owned()], s.frequency(), s.start(), nalgebra::DMatrix::from_column_slice(values.len(), 1, &values))?
            } else {
                align_panel(&series, series[0].frequency(), Join::Intersect, Aggregate::Mean)?
            };
            equal_weighted_index(&panel)?
        }
    };
    Ok(out.renamed(recipe.id.clone()))
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable output");
    s.push('\n');
    s
}

/// Runs the configured stages in memory and renders the output files.
/// Nothing is written; see [`run_pipeline`].
pub fn execute(config: &PipelineConfig, options: &RunOptions) -> Result<PipelineRun> {
    let mut config = config.clone();
    if let Some(alpha) = options.alpha {
        config.var.alpha = alpha;
    }
    if let Some(lag) = options.lag {
        config.var.lag = lag;
    }
    if let Some(formats) = &options.formats {
        config.output.formats = formats.clone();
    }
    config.validate()?;
    let formats = &config.output.formats;
    let out_dir = options
        .out_dir
        .clone()
        .unwrap_or_else(|| config.resolve(&config.output.dir));

    let mut known = read_inputs(&config)?;
    for recipe in &config.recipes {
        let s = apply(&config, recipe, &known).map_err(|e| e.at_stage("cri", Some(&recipe.id)))?;
        known.insert(recipe.id.clone(), s);
    }
    let nodes = config.nodes();
    let cris: Vec<TimeSeries> = nodes.iter().map(|n| known[&n.id].clone()).collect();
    let domains: Vec<String> = nodes.iter().map(|n| n.domain.clone()).collect();

    let mut run = PipelineRun {
        cris,
        domains,
        panel: None,
        model: None,
        network: None,
        report: None,
        export: None,
        files: Vec::new(),
        out_dir,
        config: config.clone(),
    };
    let mut files = Vec::new();
    let mut emit = |wanted: Format, name: &str, contents: String| {
        if formats.contains(&wanted) {
            files.push(OutputFile {
                name: name.to_owned(),
                contents,
            });
        }
    };
    emit(Format::Csv, "cri.csv", render_series_csv(&run.cris));

    if options.stage >= Stage::Fit {
        let opts = &config.panel;
        let mut panel = align_panel(&run.cris, opts.frequency, opts.join, opts.aggregate).map_err(|e| e.at_stage("panel", None))?;
        panel = if opts.standardize {
            panel.standardize().map_err(|e| e.at_stage("panel", None))?
        } else {
            panel.center()
        };
        emit(Format::Csv, "panel.csv", render_panel_csv(&panel));
        let model = fit_var(&panel, config.var.lag).map_err(|e| e.at_stage("fit", None))?;
        run.panel = Some(panel);

        if options.stage >= Stage::Network {
            let network = granger_network(&model, config.var.alpha, config.var.correction).map_err(|e| e.at_stage("network", None))?;
            emit(Format::Json, "model.json", json(&VarModelExport::new(&model, Some(&network))));

            let panel = run.panel.as_ref().expect("built above");
            let report = sri_report(&network, panel, config.var.weighting).map_err(|e| e.at_stage("report", None))?;
            let provenance = Provenance {
                config_hash: config.hash(),
                generated_at: options
                    .generated_at
                    .clone()
                    .unwrap_or_else(|| chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)),
                generator: format!("gridrisk {}", env!("CARGO_PKG_VERSION")),
            };
            let export = NetworkExport::new(&network, &report, &run.domains, provenance).map_err(|e| e.at_stage("export", None))?;
            emit(Format::Json, "network.json", json(&export));
            emit(Format::Dot, "network.dot", render_dot(&export).map_err(|e| e.at_stage("export", None))?);
            if options.stage >= Stage::Report {
                emit(Format::Json, "report.json", json(&report));
                emit(Format::Csv, "report.csv", render_report_csv(&report));
                run.report = Some(report);
            }
            run.network = Some(network);
            run.export = Some(export);
        } else {
            emit(Format::Json, "model.json", json(&VarModelExport::new(&model, None)));
        }
        run.model = Some(model);
    }
    run.files = files;
    Ok(run)
}

/// Ingestion, CRI recipes, panel alignment, VAR fit, Granger network and
/// SRI report, then every declared output written to the output directory.
/// Outputs are only written when all stages succeed.
pub fn run_pipeline(config: &PipelineConfig, options: &RunOptions) -> Result<PipelineRun> {
    let run = execute(config, options)?;
    run.write().map_err(|e| e.at_stage("write", None))?;
    Ok(run)
}

/// Reads the config at `path` and runs it.
pub fn run_pipeline_file(path: impl AsRef<Path>, options: &RunOptions) -> Result<PipelineRun> {
    run_pipeline(&PipelineConfig::from_path(path)?, options)
}
