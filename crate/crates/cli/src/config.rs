//! Scenario files.
//!
//! One `section.key = value` pair per line; `#` starts a comment. Vectors are
//! comma-separated, sweep values are separated by `;`.
//!
//! ```text
//! model.beta = 0.1
//! model.x0 = 0.01
//! model.lambda = scaled_exponential   # scaled_exponential | power_law | sqrt | affine
//! model.lambda.c = 0.1
//!
//! sweep.key = model.x0                # optional: model.beta | model.x0
//! sweep.values = 0.01; 10; 20; 30
//!
//! grid.min = 1
//! grid.max = 10
//! grid.count = 10
//!
//! mc.n_paths = 100000
//! mc.n_steps = 1000
//! mc.seed = 20110101
//! mc.antithetic = false
//!
//! output.path = fig1.csv
//! output.format = csv
//! ```

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;

use hka_credit::curves::maturity_grid;
use hka_credit::mc::McConfig;
use hka_credit::{QuadraticModelParams, TimeChange};

use crate::error::{CliError, Result};

const KNOWN_KEYS: &[&str] = &[
    "model.beta",
    "model.x0",
    "model.lambda",
    "model.lambda.c",
    "model.lambda.p",
    "model.lambda.a",
    "model.lambda.b",
    "sweep.key",
    "sweep.values",
    "grid.min",
    "grid.max",
    "grid.count",
    "spread.h",
    "mc.n_paths",
    "mc.n_steps",
    "mc.seed",
    "mc.antithetic",
    "output.path",
    "output.format",
];

/// A model together with the label its curves carry.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledModel {
    pub label: String,
    pub params: QuadraticModelParams,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    /// One entry per sweep value; empty when the file has no `model` section.
    pub models: Vec<LabeledModel>,
    pub grid: Option<Vec<f64>>,
    pub spread_h: Option<f64>,
    pub mc: McConfig,
    pub output: Option<PathBuf>,
}

impl ScenarioConfig {
    pub fn models(&self) -> Result<&[LabeledModel]> {
        if self.models.is_empty() {
            return Err(CliError::config("model.beta", "missing"));
        }
        Ok(&self.models)
    }

    pub fn grid(&self) -> Result<&[f64]> {
        self.grid
            .as_deref()
            .ok_or_else(|| CliError::config("grid.count", "missing"))
    }
}

impl FromStr for ScenarioConfig {
    type Err = CliError;

    fn from_str(text: &str) -> Result<Self> {
        let raw = RawConfig::parse(text)?;
        Ok(ScenarioConfig {
            models: raw.models()?,
            grid: raw.grid()?,
            spread_h: raw.opt::<f64>("spread.h")?,
            mc: raw.mc()?,
            output: raw.get("output.path").map(PathBuf::from),
        })
    }
}

struct RawConfig {
    entries: BTreeMap<String, String>,
}

impl RawConfig {
    fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (no, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::config(
                    format!("line {}", no + 1),
                    "expected `section.key = value`",
                ));
            };
            let (key, value) = (key.trim(), value.trim());
            if !KNOWN_KEYS.contains(&key) {
                return Err(CliError::config(key, "unknown key"));
            }
            if entries.insert(key.to_string(), value.to_string()).is_some() {
                return Err(CliError::config(key, "given more than once"));
            }
        }
        Ok(RawConfig { entries })
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    fn opt<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.get(key).map(|v| parse_value(key, v)).transpose()
    }

    fn required<T: FromStr>(&self, key: &str) -> Result<T> {
        self.opt(key)?
            .ok_or_else(|| CliError::config(key, "missing"))
    }

    fn has_section(&self, section: &str) -> bool {
        self.entries.keys().any(|k| k.starts_with(section))
    }

    fn time_change(&self) -> Result<TimeChange> {
        let family = self
            .get("model.lambda")
            .ok_or_else(|| CliError::config("model.lambda", "missing"))?;
        let tc = match family {
            "scaled_exponential" => TimeChange::scaled_exponential(self.required("model.lambda.c")?),
            "power_law" => {
                TimeChange::power_law(self.required("model.lambda.c")?, self.required("model.lambda.p")?)
            }
            "sqrt" => Ok(TimeChange::sqrt()),
            "affine" => {
                TimeChange::affine(self.required("model.lambda.a")?, self.required("model.lambda.b")?)
            }
            other => {
                return Err(CliError::config(
                    "model.lambda",
                    format!("unknown family `{other}` (expected scaled_exponential, power_law, sqrt or affine)"),
                ))
            }
        };
        tc.map_err(CliError::from_model)
    }

    fn models(&self) -> Result<Vec<LabeledModel>> {
        if !self.has_section("model.") {
            if self.has_section("sweep.") {
                return Err(CliError::config("model.beta", "missing"));
            }
            return Ok(Vec::new());
        }
        let time_change = self.time_change()?;
        let sweep_key = self.get("sweep.key");
        // a swept key may be omitted from the model section
        let beta: f64 = match sweep_key {
            Some("model.beta") => self.opt("model.beta")?.unwrap_or(0.0),
            _ => self.required("model.beta")?,
        };
        let x0 = match (self.get("model.x0"), sweep_key) {
            (Some(v), _) => parse_vector("model.x0", v)?,
            (None, Some("model.x0")) => Vec::new(),
            (None, _) => return Err(CliError::config("model.x0", "missing")),
        };
        let build = |label: String, beta: f64, x0: Vec<f64>| -> Result<LabeledModel> {
            let params = QuadraticModelParams::new(beta, x0, time_change).map_err(CliError::from_model)?;
            Ok(LabeledModel { label, params })
        };

        let Some(sweep_key) = sweep_key else {
            return Ok(vec![build(format!("beta={beta}"), beta, x0)?]);
        };
        let values = self
            .get("sweep.values")
            .ok_or_else(|| CliError::config("sweep.values", "missing"))?;
        let values: Vec<&str> = values.split(';').map(str::trim).collect();
        if values.iter().any(|v| v.is_empty()) {
            return Err(CliError::config("sweep.values", "empty entry"));
        }
        match sweep_key {
            "model.beta" => values
                .iter()
                .map(|v| {
                    let b: f64 = parse_value("sweep.values", v)?;
                    build(format!("beta={b}"), b, x0.clone())
                })
                .collect(),
            "model.x0" => values
                .iter()
                .map(|v| {
                    let x = parse_vector("sweep.values", v)?;
                    let text: Vec<String> = x.iter().map(f64::to_string).collect();
                    build(format!("x0={}", text.join(" ")), beta, x)
                })
                .collect(),
            other => Err(CliError::config(
                "sweep.key",
                format!("cannot sweep `{other}` (expected model.beta or model.x0)"),
            )),
        }
    }

    fn grid(&self) -> Result<Option<Vec<f64>>> {
        if !self.has_section("grid.") {
            return Ok(None);
        }
        let count: usize = self.required("grid.count")?;
        if count == 0 {
            return Err(CliError::config("grid.count", "grid is empty"));
        }
        let min: f64 = self.required("grid.min")?;
        let max: f64 = if count == 1 {
            self.opt("grid.max")?.unwrap_or(min)
        } else {
            self.required("grid.max")?
        };
        maturity_grid(min, max, count)
            .map(Some)
            .map_err(CliError::from_model)
    }

    fn mc(&self) -> Result<McConfig> {
        let mut mc = McConfig::default();
        if let Some(n) = self.opt("mc.n_paths")? {
            mc.n_paths = n;
        }
        if let Some(n) = self.opt("mc.n_steps")? {
            mc.n_steps = n;
        }
        if let Some(s) = self.opt("mc.seed")? {
            mc.seed = s;
        }
        if let Some(a) = self.opt("mc.antithetic")? {
            mc.antithetic = a;
        }
        mc.validate().map_err(CliError::from_model)?;
        if let Some(format) = self.get("output.format") {
            if format != "csv" {
                return Err(CliError::config("output.format", format!("unsupported format `{format}`")));
            }
        }
        Ok(mc)
    }
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| CliError::config(key, format!("cannot parse `{value}`")))
}

fn parse_vector(key: &str, value: &str) -> Result<Vec<f64>> {
    value
        .split(',')
        .map(|v| parse_value(key, v.trim()))
        .collect()
}
