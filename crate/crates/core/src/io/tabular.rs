use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::path::Path;

use chrono::{Datelike, NaiveDate, NaiveDateTime};

use crate::cri::{InterruptionRecord, OptionChain, OptionQuote, SUSTAINED_MINUTES};
use crate::error::{Error, Result};
use crate::series::{Frequency, Panel, TimeSeries};
use crate::sri::SriReport;

pub const LONG_HEADER: [&str; 3] = ["timestamp", "series", "value"];
pub const REPORT_HEADER: [&str; 3] = ["metric", "node", "value"];

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn parse_err(line: u64, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// `YYYY-MM` (month precision) or `YYYY-MM-DD`.
fn parse_timestamp(s: &str) -> Option<(NaiveDate, bool)> {
    let s = s.trim();
    if let Ok(d) = NaiveDate::parse_from_str(s, "%Y-%m-%d") {
        return Some((d, false));
    }
    if s.len() == 7 {
        return NaiveDate::parse_from_str(&format!("{s}-01"), "%Y-%m-%d")
            .ok()
            .map(|d| (d, true));
    }
    None
}

pub(crate) fn format_timestamp(date: NaiveDate, frequency: Frequency) -> String {
    match frequency {
        Frequency::Monthly => format!("{:04}-{:02}", date.year(), date.month()),
        Frequency::Daily => date.format("%Y-%m-%d").to_string(),
    }
}

fn parse_value(s: &str) -> Option<Option<f64>> {
    let s = s.trim();
    if s.is_empty() || s.eq_ignore_ascii_case("na") || s.eq_ignore_ascii_case("nan") {
        return Some(None);
    }
    s.parse::<f64>().ok().filter(|x| x.is_finite()).map(Some)
}

struct Row {
    date: NaiveDate,
    month_precision: bool,
    value: Option<f64>,
}

fn infer_frequency(id: &str, rows: &[Row]) -> Result<Frequency> {
    let any_month = rows.iter().any(|r| r.month_precision);
    let all_first = rows.iter().all(|r| r.date.day() == 1);
    if any_month {
        if !all_first {
            return Err(Error::Frequency(format!(
                "series `{id}` mixes month and day timestamps"
            )));
        }
        return Ok(Frequency::Monthly);
    }
    let consecutive_months = rows.windows(2).all(|w| {
        Frequency::Monthly.ordinal(w[1].date) - Frequency::Monthly.ordinal(w[0].date) == 1
    });
    if rows.len() > 1 && all_first && consecutive_months {
        Ok(Frequency::Monthly)
    } else {
        Ok(Frequency::Daily)
    }
}

/// Reads a long-format CSV (`timestamp,series,value`) into one series per
/// id, in order of first appearance.
///
/// Rows may come in any order. `NA`, `NaN` or an empty value mark a missing
/// observation; every period between a series' first and last timestamp
/// must have a row. The frequency is inferred per series.
pub fn load_long_csv(path: impl AsRef<Path>) -> Result<Vec<TimeSeries>> {
    parse_long_csv(&read(path.as_ref())?, None)
}

/// As [`load_long_csv`], checking every series against a declared frequency.
pub fn load_long_csv_as(path: impl AsRef<Path>, frequency: Frequency) -> Result<Vec<TimeSeries>> {
    parse_long_csv(&read(path.as_ref())?, Some(frequency))
}

pub fn parse_long_csv(text: &str, declared: Option<Frequency>) -> Result<Vec<TimeSeries>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| parse_err(1, e.to_string()))?;
    if header.iter().collect::<Vec<_>>() != LONG_HEADER {
        return Err(parse_err(1, format!("expected header `{}`", LONG_HEADER.join(","))));
    }

    let mut order: Vec<String> = Vec::new();
    let mut rows: HashMap<String, Vec<Row>> = HashMap::new();
    let mut seen: HashMap<(String, NaiveDate), u64> = HashMap::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_err(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != 3 {
            return Err(parse_err(line, format!("expected 3 fields, got {}", record.len())));
        }
        let (date, month_precision) = parse_timestamp(&record[0])
            .ok_or_else(|| parse_err(line, format!("bad timestamp `{}`", &record[0])))?;
        let id = record[1].to_owned();
        if id.is_empty() {
            return Err(parse_err(line, "empty series id"));
        }
        let value = parse_value(&record[2])
            .ok_or_else(|| parse_err(line, format!("bad value `{}`", &record[2])))?;
        if let Some(first) = seen.insert((id.clone(), date), line) {
            return Err(parse_err(
                line,
                format!("duplicate row for `{id}` at {date} (first on line {first})"),
            ));
        }
        if !rows.contains_key(&id) {
            order.push(id.clone());
        }
        rows.entry(id).or_default().push(Row {
            date,
            month_precision,
            value,
        });
    }

    order
        .into_iter()
        .map(|id| {
            let mut rows = rows.remove(&id).expect("collected");
            rows.sort_by_key(|r| r.date);
            let frequency = match declared {
                Some(f) => {
                    if f == Frequency::Daily && rows.iter().any(|r| r.month_precision) {
                        return Err(Error::Frequency(format!(
                            "series `{id}` has month timestamps but daily was declared"
                        )));
                    }
                    f
                }
                None => infer_frequency(&id, &rows)?,
            };
            if let Some(r) = rows.iter().find(|r| !frequency.is_on_grid(r.date)) {
                return Err(Error::Frequency(format!(
                    "series `{id}`: {} is not on the {frequency} grid",
                    r.date
                )));
            }
            if let Some(w) = rows
                .windows(2)
                .find(|w| frequency.ordinal(w[1].date) - frequency.ordinal(w[0].date) != 1)
            {
                return Err(Error::Frequency(format!(
                    "series `{id}` jumps from {} to {}; {frequency} rows must be contiguous",
                    w[0].date, w[1].date
                )));
            }
            TimeSeries::new(
                id,
                frequency,
                rows[0].date,
                rows.iter().map(|r| r.value).collect(),
            )
        })
        .collect()
}

fn push_value(out: &mut String, v: Option<f64>) {
    match v {
        Some(x) => write!(out, "{x}").expect("write to string"),
        None => out.push_str("NA"),
    }
}

/// Long-format CSV for series; the inverse of [`parse_long_csv`].
pub fn render_series_csv(series: &[TimeSeries]) -> String {
    let mut out = LONG_HEADER.join(",");
    out.push('\n');
    for s in series {
        for (date, v) in s.iter() {
            write!(out, "{},{},", format_timestamp(date, s.frequency()), s.id()).expect("write to string");
            push_value(&mut out, v);
            out.push('\n');
        }
    }
    out
}

/// Long-format dump of every panel cell, `n·d` rows.
pub fn render_panel_csv(panel: &Panel) -> String {
    let series: Vec<TimeSeries> = (0..panel.d()).map(|j| panel.series(j)).collect();
    render_series_csv(&series)
}

/// `metric,node,value`: one centrality row per node (`NA` when centrality
/// is absent) and one `dgc` row.
pub fn render_report_csv(report: &SriReport) -> String {
    let mut out = REPORT_HEADER.join(",");
    out.push('\n');
    for (j, node) in report.node_ids.iter().enumerate() {
        write!(out, "centrality,{node},").expect("write to string");
        push_value(&mut out, report.centrality.as_ref().map(|c| c.scores[j]));
        out.push('\n');
    }
    writeln!(out, "dgc,,{}", report.dgc).expect("write to string");
    out
}

/// What [`emit_plot_data`] writes.
#[derive(Debug, Clone, Copy)]
pub enum PlotData<'a> {
    Series(&'a [TimeSeries]),
    Panel(&'a Panel),
    Report(&'a SriReport),
}

/// Tidy CSV for plotting: `timestamp,series,value` for series and panels,
/// `metric,node,value` for reports.
pub fn emit_plot_data(data: PlotData<'_>, path: impl AsRef<Path>) -> Result<()> {
    let text = match data {
        PlotData::Series(s) => render_series_csv(s),
        PlotData::Panel(p) => render_panel_csv(p),
        PlotData::Report(r) => render_report_csv(r),
    };
    std::fs::write(path.as_ref(), text).map_err(|e| Error::io(path.as_ref(), e))
}

/// Interruptions parsed from `start,duration_minutes,customers_affected`.
#[derive(Debug, Clone, PartialEq)]
pub struct InterruptionLog {
    pub records: Vec<InterruptionRecord>,
    /// Rows of momentary interruptions (at most five minutes) left out.
    pub momentary_skipped: usize,
}

fn parse_datetime(s: &str) -> Option<NaiveDateTime> {
    ["%Y-%m-%d %H:%M:%S", "%Y-%m-%dT%H:%M:%S", "%Y-%m-%d %H:%M", "%Y-%m-%dT%H:%M"]
        .iter()
        .find_map(|f| NaiveDateTime::parse_from_str(s.trim(), f).ok())
}

pub fn load_interruptions(path: impl AsRef<Path>) -> Result<InterruptionLog> {
    parse_interruptions(&read(path.as_ref())?)
}

pub fn parse_interruptions(text: &str) -> Result<InterruptionLog> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| parse_err(1, e.to_string()))?;
    let expected = ["start", "duration_minutes", "customers_affected"];
    if header.iter().collect::<Vec<_>>() != expected {
        return Err(parse_err(1, format!("expected header `{}`", expected.join(","))));
    }
    let mut log = InterruptionLog {
        records: Vec::new(),
        momentary_skipped: 0,
    };
    for record in reader.records() {
        let record = record.map_err(|e| parse_err(e.position().map_or(0, |p| p.line()), e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line());
        let start = parse_datetime(&record[0])
            .ok_or_else(|| parse_err(line, format!("bad start time `{}`", &record[0])))?;
        let duration: f64 = record[1]
            .parse()
            .map_err(|_| parse_err(line, format!("bad duration `{}`", &record[1])))?;
        let customers: u64 = record[2]
            .parse()
            .map_err(|_| parse_err(line, format!("bad customer count `{}`", &record[2])))?;
        if duration <= SUSTAINED_MINUTES {
            log.momentary_skipped += 1;
            continue;
        }
        let r = InterruptionRecord::new(start, duration, customers).map_err(|e| parse_err(line, e.to_string()))?;
        log.records.push(r);
    }
    Ok(log)
}

/// Option chain file: `# forward=…`, `# expiry_years=…` and
/// `# risk_free_rate=…` lines, then `strike,put_price,call_price` rows in
/// increasing strike order.
pub fn load_option_chain(path: impl AsRef<Path>) -> Result<OptionChain> {
    parse_option_chain(&read(path.as_ref())?)
}

pub fn parse_option_chain(text: &str) -> Result<OptionChain> {
    let mut meta = BTreeMap::new();
    let mut body = String::new();
    let mut body_offset = 0u64;
    for (k, line) in text.lines().enumerate() {
        if let Some(rest) = line.trim().strip_prefix('#') {
            let (key, value) = rest
                .split_once('=')
                .ok_or_else(|| parse_err(k as u64 + 1, "metadata lines are `# key=value`"))?;
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|_| parse_err(k as u64 + 1, format!("bad number for `{}`", key.trim())))?;
            meta.insert(key.trim().to_owned(), value);
            body_offset = k as u64 + 1;
        } else {
            body.push_str(line);
            body.push('\n');
        }
    }
    let get = |key: &str| {
        meta.get(key)
            .copied()
            .ok_or_else(|| parse_err(1, format!("missing `# {key}=` metadata")))
    };
    let (forward, expiry, rate) = (get("forward")?, get("expiry_years")?, get("risk_free_rate")?);

    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(body.as_bytes());
    let expected = ["strike", "put_price", "call_price"];
    let header = reader.headers().map_err(|e| parse_err(body_offset + 1, e.to_string()))?;
    if header.iter().collect::<Vec<_>>() != expected {
        return Err(parse_err(body_offset + 1, format!("expected header `{}`", expected.join(","))));
    }
    let mut quotes = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| parse_err(body_offset + e.position().map_or(0, |p| p.line()), e.to_string()))?;
        let line = body_offset + record.position().map_or(0, |p| p.line());
        let num = |i: usize| {
            record[i]
                .parse::<f64>()
                .map_err(|_| parse_err(line, format!("bad number `{}`", &record[i])))
        };
        quotes.push(OptionQuote {
            strike: num(0)?,
            put_price: num(1)?,
            call_price: num(2)?,
        });
    }
    OptionChain::new(forward, expiry, rate, quotes)
}
