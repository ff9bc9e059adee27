use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::cri::{ReliabilityIndex, ZeroPolicy};
use crate::error::{Error, Result};
use crate::series::{Aggregate, Comparator, DegreeDayMode, Frequency, Grouping, Join, ReturnMode};
use crate::sri::Weighting;
use crate::var::Correction;

pub const CONFIG_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesRole {
    /// Only consumed by recipes.
    #[default]
    Raw,
    /// Enters the panel as a network node unchanged.
    Cri,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesDecl {
    pub id: String,
    #[serde(default)]
    pub role: SeriesRole,
    pub domain: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputFile {
    /// Long-format CSV, relative to the config file.
    pub path: PathBuf,
    pub frequency: Option<Frequency>,
    pub series: Vec<SeriesDecl>,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Operation {
    Identity {
        input: String,
    },
    Monthly {
        input: String,
        #[serde(default)]
        aggregate: Aggregate,
    },
    Anomaly {
        input: String,
        baseline: Option<[i32; 2]>,
        #[serde(default)]
        strict: bool,
    },
    Spi {
        input: String,
        scale: usize,
        baseline: Option<[i32; 2]>,
        #[serde(default = "yes")]
        strict: bool,
    },
    ThresholdDays {
        input: String,
        comparator: Comparator,
        threshold: f64,
    },
    DegreeDays {
        input: String,
        base: f64,
        mode: DegreeDayMode,
    },
    Percentile {
        input: String,
        grouping: Grouping,
        baseline: [i32; 2],
    },
    Standardize {
        input: String,
    },
    Returns {
        input: String,
        mode: ReturnMode,
    },
    ReserveMargin {
        generation: String,
        demand: String,
    },
    Reliability {
        /// `start,duration_minutes,customers_affected` CSV, relative to the
        /// config file.
        interruptions: PathBuf,
        customers: u64,
        index: ReliabilityIndex,
        /// `YYYY-MM`
        start: String,
        months: usize,
    },
    Lpi {
        inputs: Vec<String>,
        base_year: i32,
        #[serde(default)]
        zeros: ZeroPolicy,
    },
    EqualWeighted {
        inputs: Vec<String>,
    },
}

impl Operation {
    pub fn inputs(&self) -> Vec<&str> {
        match self {
            Operation::Identity { input }
            | Operation::Monthly { input, .. }
            | Operation::Anomaly { input, .. }
            | Operation::Spi { input, .. }
            | Operation::ThresholdDays { input, .. }
            | Operation::DegreeDays { input, .. }
            | Operation::Percentile { input, .. }
            | Operation::Standardize { input }
            | Operation::Returns { input, .. } => vec![input],
            Operation::ReserveMargin { generation, demand } => vec![generation, demand],
            Operation::Reliability { .. } => vec![],
            Operation::Lpi { inputs, .. } | Operation::EqualWeighted { inputs } => {
                inputs.iter().map(String::as_str).collect()
            }
        }
    }

    /// Whether the output is always monthly, whatever the input frequency.
    pub fn yields_monthly(&self) -> bool {
        matches!(
            self,
            Operation::Monthly { .. }
                | Operation::Anomaly { .. }
                | Operation::Spi { .. }
                | Operation::ThresholdDays { .. }
                | Operation::DegreeDays { .. }
                | Operation::Reliability { .. }
        )
    }
}

/// One derived series. Recipes run in order and may consume declared input
/// series or the outputs of earlier recipes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Recipe {
    pub id: String,
    pub domain: Option<String>,
    /// Whether the output becomes a network node.
    #[serde(default = "yes")]
    pub node: bool,
    #[serde(flatten)]
    pub op: Operation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PanelOptions {
    pub frequency: Frequency,
    #[serde(default)]
    pub join: Join,
    #[serde(default)]
    pub aggregate: Aggregate,
    #[serde(default = "yes")]
    pub center: bool,
    #[serde(default = "yes")]
    pub standardize: bool,
}

fn default_lag() -> usize {
    1
}

fn default_alpha() -> f64 {
    0.05
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarOptions {
    #[serde(default = "default_lag")]
    pub lag: usize,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default)]
    pub correction: Correction,
    #[serde(default)]
    pub weighting: Weighting,
}

impl Default for VarOptions {
    fn default() -> Self {
        VarOptions {
            lag: default_lag(),
            alpha: default_alpha(),
            correction: Correction::default(),
            weighting: Weighting::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Dot,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "dot" => Ok(Format::Dot),
            "csv" => Ok(Format::Csv),
            other => Err(Error::Config(format!("unknown format `{other}` (json, dot, csv)"))),
        }
    }
}

fn all_formats() -> Vec<Format> {
    vec![Format::Json, Format::Dot, Format::Csv]
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputOptions {
    /// Relative to the config file.
    #[serde(default = "default_out_dir")]
    pub dir: PathBuf,
    #[serde(default = "all_formats")]
    pub formats: Vec<Format>,
}

impl Default for OutputOptions {
    fn default() -> Self {
        OutputOptions {
            dir: default_out_dir(),
            formats: all_formats(),
        }
    }
}

/// Pipeline configuration, read from TOML.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub version: u32,
    pub inputs: Vec<InputFile>,
    #[serde(default, rename = "cri")]
    pub recipes: Vec<Recipe>,
    pub panel: PanelOptions,
    #[serde(default)]
    pub var: VarOptions,
    #[serde(default)]
    pub output: OutputOptions,
    /// Directory relative paths are resolved against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

/// A network node: its id and domain label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeDecl {
    pub id: String,
    pub domain: String,
}

impl PipelineConfig {
    pub fn from_toml_str(text: &str, base_dir: impl Into<PathBuf>) -> Result<Self> {
        let mut config: PipelineConfig =
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.base_dir = base_dir.into();
        config.validate()?;
        Ok(config)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::from_toml_str(&text, base).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn resolve(&self, path: &Path) -> PathBuf {
        if path.is_absolute() {
            path.to_path_buf()
        } else {
            self.base_dir.join(path)
        }
    }

    /// Network nodes in panel column order: `cri` inputs as declared, then
    /// recipe outputs marked as nodes.
    pub fn nodes(&self) -> Vec<NodeDecl> {
        let inputs = self
            .inputs
            .iter()
            .flat_map(|f| &f.series)
            .filter(|s| s.role == SeriesRole::Cri)
            .map(|s| NodeDecl {
                id: s.id.clone(),
                domain: s.domain.clone().unwrap_or_else(|| s.id.clone()),
            });
        let recipes = self.recipes.iter().filter(|r| r.node).map(|r| NodeDecl {
            id: r.id.clone(),
            domain: r.domain.clone().unwrap_or_else(|| r.id.clone()),
        });
        inputs.chain(recipes).collect()
    }

    /// Checks references, uniqueness and option ranges without touching any
    /// data.
    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config(m));
        if self.version != CONFIG_VERSION {
            return fail(format!(
                "unsupported config version {} (expected {CONFIG_VERSION})",
                self.version
            ));
        }
        if self.inputs.is_empty() {
            return fail("no input files declared".into());
        }
        let mut declared: HashSet<&str> = HashSet::new();
        for f in &self.inputs {
            if f.series.is_empty() {
                return fail(format!("input `{}` declares no series", f.path.display()));
            }
            for s in &f.series {
                if !declared.insert(&s.id) {
                    return fail(format!("series `{}` is declared twice", s.id));
                }
            }
        }
        for r in &self.recipes {
            for input in r.op.inputs() {
                if !declared.contains(input) {
                    return fail(format!(
                        "recipe `{}` references undeclared series `{input}`",
                        r.id
                    ));
                }
            }
            if let Operation::Lpi { inputs, .. } | Operation::EqualWeighted { inputs } = &r.op {
                if inputs.is_empty() {
                    return fail(format!("recipe `{}` needs at least one input", r.id));
                }
            }
            if self.panel.frequency == Frequency::Daily && r.node && r.op.yields_monthly() {
                return fail(format!(
                    "recipe `{}` produces a monthly series but the panel is daily",
                    r.id
                ));
            }
            if !declared.insert(&r.id) {
                return fail(format!("recipe output `{}` clashes with an existing series", r.id));
            }
        }
        if self.panel.frequency == Frequency::Daily {
            for f in &self.inputs {
                if f.frequency == Some(Frequency::Monthly) && f.series.iter().any(|s| s.role == SeriesRole::Cri) {
                    return fail(format!(
                        "input `{}` is monthly but feeds a daily panel",
                        f.path.display()
                    ));
                }
            }
        }
        let nodes = self.nodes().len();
        if nodes < 2 {
            return fail(format!("the panel needs at least two nodes, got {nodes}"));
        }
        if !self.panel.center {
            return fail("VAR estimation requires panel.center = true".into());
        }
        if self.var.lag < 1 {
            return fail("var.lag must be at least 1".into());
        }
        if !(self.var.alpha > 0.0 && self.var.alpha < 1.0) {
            return fail(format!("var.alpha must lie in (0, 1), got {}", self.var.alpha));
        }
        Ok(())
    }

    /// SHA-256 of the configuration in canonical JSON form, hex encoded.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        Sha256::digest(canonical.as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
version = 1

[[inputs]]
path = "data.csv"
series = [
  { id = "a", role = "cri", domain = "energy" },
  { id = "b", role = "cri" },
  { id = "t" },
]

[[cri]]
id = "t_anom"
op = "anomaly"
input = "t"
baseline = [1990, 2000]

[panel]
frequency = "monthly"

[var]
alpha = 0.01
"#;

    #[test]
    fn parses_with_defaults() {
        let c = PipelineConfig::from_toml_str(MINIMAL, "/data").unwrap();
        assert_eq!(c.var.lag, 1);
        assert_eq!(c.var.correction, Correction::BhFdr);
        assert_eq!(c.output.formats, all_formats());
        assert!(c.panel.center && c.panel.standardize);
        let nodes: Vec<String> = c.nodes().into_iter().map(|n| format!("{}:{}", n.id, n.domain)).collect();
        assert_eq!(nodes, vec!["a:energy", "b:b", "t_anom:t_anom"]);
        assert_eq!(c.resolve(Path::new("x.csv")), PathBuf::from("/data/x.csv"));
        assert!(matches!(c.recipes[0].op, Operation::Anomaly { strict: false, baseline: Some([1990, 2000]), .. }));
    }

    #[test]
    fn toml_round_trip_keeps_hash() {
        let c = PipelineConfig::from_toml_str(MINIMAL, "").unwrap();
        let again = PipelineConfig::from_toml_str(&c.to_toml_string().unwrap(), "").unwrap();
        assert_eq!(c, again);
        assert_eq!(c.hash(), again.hash());
        assert_eq!(c.hash().len(), 64);
        let mut other = c.clone();
        other.var.alpha = 0.02;
        assert_ne!(c.hash(), other.hash());
    }

    #[test]
    fn rejects_bad_configs() {
        let cases = [
            MINIMAL.replace("input = \"t\"", "input = \"nope\""),
            MINIMAL.replace("version = 1", "version = 2"),
            MINIMAL.replace("alpha = 0.01", "alpha = 0.0"),
            MINIMAL.replace("[var]", "[var]\nlag = 0"),
            MINIMAL.replace("frequency = \"monthly\"", "frequency = \"monthly\"\ncenter = false"),
            MINIMAL.replace("frequency = \"monthly\"", "frequency = \"daily\""),
            MINIMAL.replace("id = \"t_anom\"", "id = \"a\""),
            MINIMAL.replace("op = \"anomaly\"", "op = \"bogus\""),
        ];
        for text in &cases {
            assert!(matches!(PipelineConfig::from_toml_str(text, ""), Err(Error::Config(_))), "{text}");
        }
    }
}
