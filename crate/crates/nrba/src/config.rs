//! Analysis configuration, read from TOML.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use nrba_core::dataset::ColumnSpec;
use nrba_core::ppmm::DEFAULT_PHIS;
use serde::{Deserialize, Serialize};

use crate::error::{NrbaError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NrbaConfig {
    /// Input file; relative paths resolve against the config file.
    pub input: PathBuf,
    #[serde(default = "default_delimiter")]
    pub delimiter: char,
    pub columns: Vec<ColumnSpec>,
    /// Key survey outcomes.
    pub outcomes: Vec<String>,
    /// Candidate main effects, observed for respondents and nonrespondents.
    pub auxiliaries: Vec<String>,
    /// Extra predictors whose contribution to the proxy is reported
    /// separately.
    #[serde(default)]
    pub late_auxiliaries: Vec<String>,
    /// Interaction candidates given explicitly, as column-name pairs.
    #[serde(default)]
    pub interactions: Vec<[String; 2]>,
    #[serde(default)]
    pub interaction_screen: Option<TreeScreen>,
    /// Final unit response indicator.
    pub response_indicator: String,
    /// Indicators of earlier nested response stages, outermost first.
    #[serde(default)]
    pub prior_stages: Vec<String>,
    #[serde(default)]
    pub subgroups: Vec<String>,
    #[serde(default)]
    pub design: DesignColumns,
    /// Columns defining nonresponse adjustment classes; propensity
    /// quintiles when empty.
    #[serde(default)]
    pub weighting_classes: Vec<String>,
    #[serde(default)]
    pub margins: Vec<MarginConfig>,
    #[serde(default)]
    pub benchmarks: Vec<Benchmark>,
    /// Named groups of columns for the joint instrument response table.
    #[serde(default)]
    pub instrument_groups: BTreeMap<String, Vec<String>>,
    #[serde(default = "default_phis")]
    pub phis: Vec<f64>,
    #[serde(default = "default_clamp")]
    pub clamp: [f64; 2],
    #[serde(default = "default_bins")]
    pub histogram_bins: usize,
    pub output_dir: PathBuf,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignColumns {
    pub weight: Option<String>,
    pub base_weight: Option<String>,
    pub psu: Option<String>,
    pub stratum: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TreeScreen {
    pub max_depth: usize,
    pub min_node: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarginConfig {
    pub column: String,
    /// Category label → control total.
    pub targets: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Benchmark {
    /// Outcome name the benchmark refers to.
    pub label: String,
    pub mean: f64,
    pub se: f64,
}

fn default_delimiter() -> char {
    ','
}

fn default_phis() -> Vec<f64> {
    DEFAULT_PHIS.to_vec()
}

fn default_clamp() -> [f64; 2] {
    [0.01, 0.99]
}

fn default_bins() -> usize {
    20
}

impl NrbaConfig {
    pub fn from_toml(text: &str, origin: &Path) -> Result<Self> {
        let cfg: NrbaConfig = toml::from_str(text).map_err(|e| NrbaError::Config {
            path: origin.to_path_buf(),
            message: e.to_string(),
        })?;
        cfg.validate(origin)?;
        Ok(cfg)
    }

    /// Reads a config and resolves relative paths against its directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| NrbaError::io(path, e))?;
        let mut cfg = Self::from_toml(&text, path)?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        if cfg.input.is_relative() {
            cfg.input = base.join(&cfg.input);
        }
        if cfg.output_dir.is_relative() {
            cfg.output_dir = base.join(&cfg.output_dir);
        }
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self, origin: &Path) -> Result<()> {
        let bad = |message: String| NrbaError::Config {
            path: origin.to_path_buf(),
            message,
        };
        if self.outcomes.is_empty() {
            return Err(bad("at least one outcome is required".into()));
        }
        if let Some(p) = self.phis.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(bad(format!("phi {p} outside [0, 1]")));
        }
        if self.phis.is_empty() {
            return Err(bad("phi grid is empty".into()));
        }
        if !self.delimiter.is_ascii() {
            return Err(bad(format!("delimiter {:?} is not ASCII", self.delimiter)));
        }
        let [lo, hi] = self.clamp;
        if !(lo > 0.0 && lo < hi && hi < 1.0) {
            return Err(bad(format!("clamp [{lo}, {hi}] must satisfy 0 < lo < hi < 1")));
        }
        let known = |n: &String| self.columns.iter().any(|c| &c.name == n);
        let design = [
            &self.design.weight,
            &self.design.base_weight,
            &self.design.psu,
            &self.design.stratum,
        ];
        let named = self
            .outcomes
            .iter()
            .chain(&self.auxiliaries)
            .chain(&self.late_auxiliaries)
            .chain(self.interactions.iter().flatten())
            .chain(std::iter::once(&self.response_indicator))
            .chain(&self.prior_stages)
            .chain(&self.subgroups)
            .chain(&self.weighting_classes)
            .chain(self.margins.iter().map(|m| &m.column))
            .chain(self.instrument_groups.values().flatten())
            .chain(design.into_iter().flatten());
        for n in named {
            if !known(n) {
                return Err(bad(format!("column {n} is not declared in columns")));
            }
        }
        Ok(())
    }

    pub fn delimiter_byte(&self) -> u8 {
        self.delimiter as u8
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
input = "data.csv"
output_dir = "out"
outcomes = ["y"]
auxiliaries = ["x"]
response_indicator = "r"

[[columns]]
name = "y"
role = "outcome"
missing-sentinels = ["-9"]

[[columns]]
name = "x"
role = "auxiliary"

[[columns]]
name = "r"
role = "response-indicator"
"#;

    #[test]
    fn defaults_applied() {
        let c = NrbaConfig::from_toml(MINIMAL, Path::new("c.toml")).unwrap();
        assert_eq!(c.phis, vec![0.0, 0.5, 1.0]);
        assert_eq!(c.delimiter, ',');
        assert_eq!(c.columns[0].missing_sentinels, vec!["-9"]);
        let again = NrbaConfig::from_toml(&c.to_toml(), Path::new("c.toml")).unwrap();
        assert_eq!(again, c);
    }

    #[test]
    fn rejects_bad_phi_and_unknown_columns() {
        let text = format!("phis = [0.0, 1.5]\n{MINIMAL}");
        assert!(NrbaConfig::from_toml(&text, Path::new("c.toml")).is_err());
        let text = MINIMAL.replace("auxiliaries = [\"x\"]", "auxiliaries = [\"q\"]");
        let e = NrbaConfig::from_toml(&text, Path::new("c.toml")).unwrap_err();
        assert!(e.to_string().contains("column q"));
    }
}
