//! Closed form vs Monte Carlo comparison table.

use std::fmt::Write as _;

use crate::error::Result;
use crate::mc::{
    mc_laplace, mc_price_defaultable, mc_propagation_check, mc_q, mc_qhat, McConfig, McEstimate,
};
use crate::model::{
    laplace_quadratic, laplace_quadratic_minus_variant, propagator_q, propagator_qhat,
    QuadraticModelParams, TimeChange,
};
use crate::pricing::price_defaultable;

/// A closed form is accepted when its z-score is at most this in magnitude.
pub const MATCH_Z: f64 = 3.0;
/// The sign-flipped Laplace value must be rejected by at least this many SE.
pub const REJECT_Z: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Expectation {
    Match,
    Reject,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationRow {
    pub quantity: String,
    pub closed_form: f64,
    pub estimate: McEstimate,
    pub expect: Expectation,
}

impl ValidationRow {
    pub fn z(&self) -> f64 {
        self.estimate.z_score(self.closed_form)
    }

    pub fn passed(&self) -> bool {
        let z = self.z().abs();
        match self.expect {
            Expectation::Match => z <= MATCH_Z,
            Expectation::Reject => z >= REJECT_Z,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub rows: Vec<ValidationRow>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(ValidationRow::passed)
    }

    /// Tab-separated table, one row per comparison.
    pub fn to_table(&self) -> String {
        let mut out = String::from("quantity\tclosed_form\tmc_mean\tstd_error\tz\texpect\tstatus\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{:.3}\t{}\t{}",
                r.quantity,
                r.closed_form,
                r.estimate.mean,
                r.estimate.std_error,
                r.z(),
                match r.expect {
                    Expectation::Match => "match",
                    Expectation::Reject => "reject",
                },
                if r.passed() { "ok" } else { "FAIL" },
            );
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridPoint {
    pub beta: f64,
    pub x0: Vec<f64>,
    pub horizon: f64,
    pub time_change: TimeChange,
}

impl GridPoint {
    fn new(beta: f64, x0: &[f64], horizon: f64, time_change: TimeChange) -> Self {
        GridPoint {
            beta,
            x0: x0.to_vec(),
            horizon,
            time_change,
        }
    }

    fn tag(&self) -> String {
        format!(
            "beta={},x={:?},d={},lambda={}",
            self.beta,
            self.x0,
            self.x0.len(),
            self.time_change
        )
    }
}

/// Twelve points covering `d in {1, 2}`, `beta in {0.1, 0.5, 1}`,
/// `|x| in {0, 1, 10}` and horizons `{1, 5}`. Two-dimensional start points
/// are off the coordinate axes.
pub fn acceptance_grid() -> Vec<GridPoint> {
    let sqrt = TimeChange::sqrt();
    let exp10 = TimeChange::ScaledExponential { c: 0.1 };
    let exp100 = TimeChange::ScaledExponential { c: 0.01 };
    vec![
        GridPoint::new(0.1, &[0.0], 1.0, sqrt),
        GridPoint::new(0.5, &[1.0], 1.0, exp10),
        GridPoint::new(1.0, &[0.0], 1.0, exp100),
        GridPoint::new(0.1, &[10.0], 1.0, sqrt),
        GridPoint::new(0.5, &[0.0], 5.0, exp10),
        GridPoint::new(0.1, &[10.0], 5.0, exp100),
        GridPoint::new(1.0, &[1.0], 5.0, sqrt),
        GridPoint::new(0.5, &[0.6, 0.8], 1.0, sqrt),
        GridPoint::new(1.0, &[0.0, 0.0], 1.0, exp10),
        GridPoint::new(0.1, &[6.0, 8.0], 1.0, exp100),
        GridPoint::new(0.5, &[0.6, 0.8], 5.0, sqrt),
        GridPoint::new(0.1, &[0.0, 0.0], 5.0, exp10),
    ]
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationOptions {
    pub mc: McConfig,
    pub grid: Vec<GridPoint>,
    /// Use the sign-flipped Laplace formula as the closed form.
    pub minus_sign: bool,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        ValidationOptions {
            mc: McConfig::default(),
            grid: acceptance_grid(),
            minus_sign: false,
        }
    }
}

fn laplace_closed_form(minus_sign: bool, alpha: f64, beta: f64, t: f64, x2: f64, d: usize) -> Result<f64> {
    if minus_sign {
        laplace_quadratic_minus_variant(alpha, beta, t, x2, d)
    } else {
        Ok(laplace_quadratic(alpha, beta, t, x2, d)?.value())
    }
}

/// Rows for one grid point: `q`, `qhat` over the second half of the horizon,
/// the Laplace functional, the propagation identity and the defaultable price.
pub fn validate_point(point: &GridPoint, cfg: &McConfig, minus_sign: bool) -> Result<Vec<ValidationRow>> {
    let p = QuadraticModelParams::new(point.beta, point.x0.clone(), point.time_change)?;
    let h = point.horizon;
    let tag = point.tag();
    let row = |quantity: String, closed_form: f64, estimate: McEstimate| ValidationRow {
        quantity,
        closed_form,
        estimate,
        expect: Expectation::Match,
    };

    let mut rows = Vec::with_capacity(5);
    rows.push(row(
        format!("q(t={h};{tag})"),
        propagator_q(h, &p)?.value(),
        mc_q(h, &p, cfg)?,
    ));
    let s = 0.5 * h;
    rows.push(row(
        format!("qhat(t={h},s={s};{tag})"),
        propagator_qhat(h, s, &p)?.value(),
        mc_qhat(h, s, &p, cfg)?,
    ));
    // keep exp(-alpha |X_t|^2) well conditioned for distant start points
    let alpha = 0.2 / p.x_norm_sq().max(1.0);
    rows.push(row(
        format!("laplace(alpha={alpha},t={h};{tag})"),
        laplace_closed_form(minus_sign, alpha, point.beta, h, p.x_norm_sq(), p.dim())?,
        mc_laplace(alpha, point.beta, h, &p, cfg)?,
    ));
    rows.push(row(
        format!("propagation(s={s},t={h};{tag})"),
        propagator_q(h + s, &p)?.value(),
        mc_propagation_check(s, h, &p, cfg)?,
    ));
    rows.push(row(
        format!("price_defaultable(T={h};{tag})"),
        price_defaultable(0.0, h, true, &p)?.price,
        mc_price_defaultable(h, &p, cfg)?,
    ));
    Ok(rows)
}

/// The sign-discrimination experiment at `alpha = 0.2, beta = 0.5, t = 1,
/// |x|^2 = 1, d = 2`: the estimate must match the `+` numerator and reject
/// the `-` numerator.
pub fn sign_discrimination(cfg: &McConfig, minus_sign: bool) -> Result<Vec<ValidationRow>> {
    let (alpha, beta, t) = (0.2, 0.5, 1.0);
    let p = QuadraticModelParams::new(beta, vec![0.6, 0.8], TimeChange::sqrt())?;
    let est = mc_laplace(alpha, beta, t, &p, cfg)?;
    let tag = "alpha=0.2,beta=0.5,t=1,x=[0.6, 0.8],d=2";
    Ok(vec![
        ValidationRow {
            quantity: format!("laplace_plus_sign({tag})"),
            closed_form: laplace_closed_form(minus_sign, alpha, beta, t, 1.0, 2)?,
            estimate: est,
            expect: Expectation::Match,
        },
        ValidationRow {
            quantity: format!("laplace_minus_sign({tag})"),
            closed_form: laplace_quadratic_minus_variant(alpha, beta, t, 1.0, 2)?,
            estimate: est,
            expect: Expectation::Reject,
        },
    ])
}

pub fn run_validation(opts: &ValidationOptions) -> Result<ValidationReport> {
    let mut rows = Vec::new();
    for point in &opts.grid {
        rows.extend(validate_point(point, &opts.mc, opts.minus_sign)?);
    }
    rows.extend(sign_discrimination(&opts.mc, opts.minus_sign)?);
    Ok(ValidationReport { rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_spans_required_ranges() {
        let g = acceptance_grid();
        assert!(g.len() >= 12);
        for d in [1, 2] {
            assert!(g.iter().any(|p| p.x0.len() == d));
        }
        for beta in [0.1, 0.5, 1.0] {
            assert!(g.iter().any(|p| p.beta == beta));
        }
        for norm in [0.0, 1.0, 10.0] {
            assert!(g.iter().any(|p| (p.x0.iter().map(|v| v * v).sum::<f64>().sqrt() - norm).abs() < 1e-12));
        }
        for h in [1.0, 5.0] {
            assert!(g.iter().any(|p| p.horizon == h));
        }
    }

    #[test]
    fn row_verdicts() {
        let est = McEstimate { mean: 1.0, std_error: 0.01, n_effective: 100 };
        let r = ValidationRow { quantity: "x".into(), closed_form: 1.02, estimate: est, expect: Expectation::Match };
        assert!(r.passed());
        let r = ValidationRow { closed_form: 1.05, ..r };
        assert!(!r.passed());
        let r = ValidationRow { expect: Expectation::Reject, closed_form: 1.2, ..r };
        assert!(r.passed());
    }

    #[test]
    fn small_run_produces_table() {
        let opts = ValidationOptions {
            mc: McConfig::new(2_000, 50, 1),
            grid: acceptance_grid().into_iter().take(2).collect(),
            minus_sign: false,
        };
        let report = run_validation(&opts).unwrap();
        assert_eq!(report.rows.len(), 12);
        let table = report.to_table();
        assert_eq!(table.lines().count(), 13);
        assert!(table.starts_with("quantity\t"));
    }
}
