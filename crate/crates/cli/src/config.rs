//! Experiment configuration: JSON file values overridden by flags.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use bvquad::runner::geometric_grid;
use bvquad::{RuleFamily, TestFunction, WeightSpec};

use crate::CliError;

pub const OUTPUT_DIR_ENV: &str = "BVQUAD_OUTPUT_DIR";
const DEFAULT_OUTPUT_DIR: &str = "bvquad-output";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Svg,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "svg" => Ok(Format::Svg),
            other => Err(format!("unknown format '{other}' (json, csv, svg)")),
        }
    }
}

/// Field names match the JSON config file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub families: Option<Vec<String>>,
    #[serde(default)]
    pub functions: Option<Vec<String>>,
    #[serde(default)]
    pub weight: Option<String>,
    #[serde(default)]
    pub n_min: Option<usize>,
    #[serde(default)]
    pub n_max: Option<usize>,
    #[serde(default)]
    pub geometric_ratio: Option<f64>,
    #[serde(default)]
    pub s_list: Option<Vec<u32>>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub formats: Option<Vec<Format>>,
}

impl ExperimentConfig {
    pub fn load(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("bad config {}: {e}", path.display())))
    }

    /// Values set in `over` replace those in `self`.
    pub fn overridden_by(self, over: ExperimentConfig) -> Self {
        ExperimentConfig {
            families: over.families.or(self.families),
            functions: over.functions.or(self.functions),
            weight: over.weight.or(self.weight),
            n_min: over.n_min.or(self.n_min),
            n_max: over.n_max.or(self.n_max),
            geometric_ratio: over.geometric_ratio.or(self.geometric_ratio),
            s_list: over.s_list.or(self.s_list),
            output_dir: over.output_dir.or(self.output_dir),
            formats: over.formats.or(self.formats),
        }
    }

    pub fn resolve(self) -> Result<Experiment, CliError> {
        let families: Vec<RuleFamily> = self
            .families
            .unwrap_or_default()
            .iter()
            .map(|f| f.parse().map_err(|e| CliError::Usage(format!("{e}"))))
            .collect::<Result<_, _>>()?;
        if families.is_empty() {
            return Err(CliError::Usage("no rule family given (--family)".into()));
        }
        let s_list = self.s_list.unwrap_or_else(|| vec![0, 1, 2, 3]);
        let mut functions = Vec::new();
        let descriptors = self
            .functions
            .unwrap_or_else(|| vec![format!("truncpower:{}", bvquad::DEFAULT_SINGULARITY)]);
        for d in &descriptors {
            functions.extend(parse_functions(d, &s_list)?);
        }
        if functions.is_empty() {
            return Err(CliError::Usage("no test function given (--function)".into()));
        }
        let weight: WeightSpec = self
            .weight
            .as_deref()
            .unwrap_or("legendre")
            .parse()
            .map_err(|e| CliError::Usage(format!("{e}")))?;
        let n_min = self.n_min.unwrap_or(4);
        let n_max = self.n_max.unwrap_or(1024);
        let ratio = self.geometric_ratio.unwrap_or(2.0);
        if n_min < 1 || n_max < n_min || !(ratio > 1.0) {
            return Err(CliError::Usage(format!(
                "bad n grid {n_min}:{n_max}:{ratio} (need 1 <= min <= max, ratio > 1)"
            )));
        }
        let n_grid = geometric_grid(n_min, n_max, ratio);
        let output_dir = self
            .output_dir
            .or_else(|| std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR));
        let mut formats = self.formats.unwrap_or_else(|| vec![Format::Json, Format::Csv]);
        formats.dedup();
        Ok(Experiment {
            families,
            functions,
            weight,
            n_grid,
            output_dir,
            formats,
        })
    }
}

/// `truncpower:c` without an order expands over the s list.
fn parse_functions(descriptor: &str, s_list: &[u32]) -> Result<Vec<TestFunction>, CliError> {
    let usage = |e: bvquad::QuadError| CliError::Usage(format!("{e}"));
    let parts: Vec<&str> = descriptor.trim().split(':').collect();
    if let ["truncpower", c] = parts.as_slice() {
        let c: f64 = c
            .parse()
            .map_err(|_| CliError::Usage(format!("bad function descriptor '{descriptor}'")))?;
        return s_list
            .iter()
            .map(|&s| TestFunction::trunc_power(c, s).map_err(usage))
            .collect();
    }
    Ok(vec![descriptor.parse().map_err(usage)?])
}

#[derive(Debug, Clone)]
pub struct Experiment {
    pub families: Vec<RuleFamily>,
    pub functions: Vec<TestFunction>,
    pub weight: WeightSpec,
    pub n_grid: Vec<usize>,
    pub output_dir: PathBuf,
    pub formats: Vec<Format>,
}

/// Parses `min:max:ratio`.
pub fn parse_grid(spec: &str) -> Result<(usize, usize, f64), String> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || format!("expected min:max:ratio, got '{spec}'");
    match parts.as_slice() {
        [a, b, r] => Ok((
            a.parse().map_err(|_| bad())?,
            b.parse().map_err(|_| bad())?,
            r.parse().map_err(|_| bad())?,
        )),
        _ => Err(bad()),
    }
}
