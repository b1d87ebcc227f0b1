use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use hka_credit::curves::{spread_curve, yield_curve, Curve};
use hka_credit::pricing::{credit_spread, default_spread_step, price_default_free, price_defaultable};
use hka_credit::validate::{run_validation, ValidationOptions};

use crate::config::ScenarioConfig;
use crate::csv;
use crate::error::{CliError, Result};

pub fn load_config(path: &Path) -> Result<ScenarioConfig> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::config("config", format!("{}: {e}", path.display())))?;
    text.parse()
}

/// Writes to `out` if given, else to the config's `output.path`, else to `stdout`.
fn emit(text: &str, out: Option<&Path>, cfg: &ScenarioConfig, stdout: &mut dyn Write) -> Result<()> {
    let target: Option<PathBuf> = out.map(Path::to_path_buf).or_else(|| cfg.output.clone());
    match target {
        Some(path) => fs::write(&path, text)
            .map_err(|e| CliError::config("output.path", format!("{}: {e}", path.display()))),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| CliError::config("output.path", format!("stdout: {e}"))),
    }
}

/// Prices at `(t, T)`: one line per model in the config.
pub fn cmd_price(
    cfg: &ScenarioConfig,
    t: f64,
    maturity: f64,
    survived: bool,
    stdout: &mut dyn Write,
) -> Result<()> {
    let mut out = String::new();
    for m in cfg.models()? {
        let pd = price_defaultable(t, maturity, survived, &m.params)?;
        let pf = price_default_free(t, maturity, &m.params)?;
        let h = cfg
            .spread_h
            .unwrap_or_else(|| default_spread_step(maturity))
            .min(0.5 * (maturity - t));
        let spread = credit_spread(t, maturity, &m.params, h)?;
        out.push_str(&format!(
            "{}\tt={t}\tT={maturity}\tsurvived={survived}\tdefaultable={}\tdefault_free={}\tspread={}\n",
            m.label, pd.price, pf.price, spread.spread
        ));
    }
    stdout
        .write_all(out.as_bytes())
        .map_err(|e| CliError::config("output.path", format!("stdout: {e}")))
}

pub fn yield_curves(cfg: &ScenarioConfig) -> Result<Vec<Curve>> {
    let grid = cfg.grid()?;
    cfg.models()?
        .iter()
        .map(|m| Ok(yield_curve(grid, &m.params)?.with_label(&m.label)))
        .collect()
}

pub fn spread_curves(cfg: &ScenarioConfig) -> Result<Vec<Curve>> {
    let grid = cfg.grid()?;
    cfg.models()?
        .iter()
        .map(|m| Ok(spread_curve(grid, &m.params, cfg.spread_h)?.with_label(&m.label)))
        .collect()
}

pub fn cmd_yield_curve(cfg: &ScenarioConfig, out: Option<&Path>, stdout: &mut dyn Write) -> Result<()> {
    let curves = yield_curves(cfg)?;
    emit(&csv::render(&curves), out, cfg, stdout)
}

pub fn cmd_spread_curve(cfg: &ScenarioConfig, out: Option<&Path>, stdout: &mut dyn Write) -> Result<()> {
    let curves = spread_curves(cfg)?;
    emit(&csv::render(&curves), out, cfg, stdout)
}

/// Runs the oracle comparison and writes the table followed by a verdict
/// line. Fails with [`CliError::ValidationFailed`] after writing the report.
pub fn cmd_validate(
    cfg: &ScenarioConfig,
    minus_sign: bool,
    out: Option<&Path>,
    stdout: &mut dyn Write,
) -> Result<()> {
    let opts = ValidationOptions {
        mc: cfg.mc,
        minus_sign,
        ..ValidationOptions::default()
    };
    let report = run_validation(&opts)?;
    let mut text = report.to_table();
    let passed = report.passed();
    text.push_str(if passed { "verdict: pass\n" } else { "verdict: fail\n" });
    emit(&text, out, cfg, stdout)?;
    if passed {
        Ok(())
    } else {
        Err(CliError::ValidationFailed {
            failed: report.rows.iter().filter(|r| !r.passed()).count(),
            total: report.rows.len(),
        })
    }
}
