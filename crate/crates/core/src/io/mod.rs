//! Ingestion, pipeline configuration and exporters.

mod config;
mod graph;
mod pipeline;
mod tabular;

pub use config::{
    Format, InputFile, NodeDecl, Operation, OutputOptions, PanelOptions, PipelineConfig, Recipe, SeriesDecl, SeriesRole,
    VarOptions, CONFIG_VERSION,
};
pub use graph::{export_dot, render_dot, EdgeExport, NetworkExport, NetworkMetrics, NodeExport, Provenance};
pub use pipeline::{execute, run_pipeline, run_pipeline_file, OutputFile, PipelineRun, RunOptions, Stage};
pub use tabular::{
    emit_plot_data, load_interruptions, load_long_csv, load_long_csv_as, load_option_chain, parse_interruptions,
    parse_long_csv, parse_option_chain, render_panel_csv, render_report_csv, render_series_csv, InterruptionLog, PlotData,
    LONG_HEADER, REPORT_HEADER,
};
