//! Maturity sweeps and shape diagnostics.

use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::QuadraticModelParams;
use crate::pricing::{credit_spread, default_spread_step, yield_default_free};

/// Differences within this band count as ties.
pub const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveKind {
    Yield,
    Spread,
    Price,
}

impl fmt::Display for CurveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CurveKind::Yield => "yield",
            CurveKind::Spread => "spread",
            CurveKind::Price => "price",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub label: String,
    pub kind: CurveKind,
    points: Vec<(f64, f64)>,
}

impl Curve {
    /// Maturities must be strictly increasing and values finite.
    pub fn new(label: impl Into<String>, kind: CurveKind, points: Vec<(f64, f64)>) -> Result<Self> {
        if let Some(w) = points.windows(2).find(|w| w[1].0.partial_cmp(&w[0].0) != Some(std::cmp::Ordering::Greater)) {
            return Err(Error::domain(
                "grid",
                format!("maturities must be strictly increasing ({} then {})", w[0].0, w[1].0),
            ));
        }
        if let Some(&(m, v)) = points.iter().find(|(m, v)| !m.is_finite() || !v.is_finite()) {
            return Err(Error::domain("curve", format!("non-finite point ({m}, {v})")));
        }
        Ok(Curve {
            label: label.into(),
            kind,
            points,
        })
    }

    pub fn with_label(self, label: impl Into<String>) -> Self {
        Curve {
            label: label.into(),
            ..self
        }
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn maturities(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.0)
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapeReport {
    pub monotone_nondecreasing: bool,
    pub monotone_nonincreasing: bool,
    /// Maturity of the highest interior strict local maximum.
    pub hump_at: Option<f64>,
    /// Sign changes between successive non-tied differences.
    pub crossings: usize,
}

/// `count` equispaced maturities over `[min, max]`.
pub fn maturity_grid(min: f64, max: f64, count: usize) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(Error::domain("grid.count", "must be at least 1"));
    }
    if !min.is_finite() || !max.is_finite() || min <= 0.0 {
        return Err(Error::domain("grid.min", format!("need 0 < min, finite bounds; got [{min}, {max}]")));
    }
    if count == 1 {
        return Ok(vec![min]);
    }
    if max <= min {
        return Err(Error::domain("grid.max", format!("must exceed grid.min = {min}, got {max}")));
    }
    let step = (max - min) / (count - 1) as f64;
    Ok((0..count)
        .map(|i| if i == count - 1 { max } else { min + step * i as f64 })
        .collect())
}

fn sweep(maturities: &[f64], f: impl Fn(f64) -> Result<f64> + Sync) -> Result<Vec<(f64, f64)>> {
    maturities
        .par_iter()
        .map(|&m| f(m).map(|v| (m, v)))
        .collect()
}

/// Default-free yields `-ln P_f(0, T) / T` at each maturity.
pub fn yield_curve(maturities: &[f64], params: &QuadraticModelParams) -> Result<Curve> {
    let points = sweep(maturities, |m| yield_default_free(m, params))?;
    Curve::new(format!("beta={}", params.beta()), CurveKind::Yield, points)
}

/// Credit spreads at `t = 0`. `h = None` uses [`default_spread_step`] per maturity.
pub fn spread_curve(maturities: &[f64], params: &QuadraticModelParams, h: Option<f64>) -> Result<Curve> {
    let points = sweep(maturities, |m| {
        let step = h.unwrap_or_else(|| default_spread_step(m));
        Ok(credit_spread(0.0, m, params, step)?.spread)
    })?;
    Curve::new(format!("beta={}", params.beta()), CurveKind::Spread, points)
}

pub fn shape_report(curve: &Curve) -> Result<ShapeReport> {
    let pts = curve.points();
    if pts.len() < 3 {
        return Err(Error::domain("curve", format!("need at least 3 points, got {}", pts.len())));
    }
    let diffs: Vec<f64> = pts.windows(2).map(|w| w[1].1 - w[0].1).collect();
    let monotone_nondecreasing = diffs.iter().all(|&d| d >= -TIE_TOLERANCE);
    let monotone_nonincreasing = diffs.iter().all(|&d| d <= TIE_TOLERANCE);

    let hump_at = (1..pts.len() - 1)
        .filter(|&i| diffs[i - 1] > TIE_TOLERANCE && diffs[i] < -TIE_TOLERANCE)
        .max_by(|&a, &b| pts[a].1.total_cmp(&pts[b].1))
        .map(|i| pts[i].0);

    let signs: Vec<bool> = diffs
        .iter()
        .filter(|d| d.abs() > TIE_TOLERANCE)
        .map(|&d| d > 0.0)
        .collect();
    let crossings = signs.windows(2).filter(|w| w[0] != w[1]).count();

    Ok(ShapeReport {
        monotone_nondecreasing,
        monotone_nonincreasing,
        hump_at,
        crossings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::TimeChange;

    fn curve(values: &[f64]) -> Curve {
        let pts = values.iter().enumerate().map(|(i, &v)| (1.0 + i as f64, v)).collect();
        Curve::new("c", CurveKind::Yield, pts).unwrap()
    }

    #[test]
    fn shape_of_simple_curves() {
        let r = shape_report(&curve(&[1.0, 2.0, 3.0])).unwrap();
        assert!(r.monotone_nondecreasing && !r.monotone_nonincreasing);
        assert_eq!(r.hump_at, None);
        assert_eq!(r.crossings, 0);

        let r = shape_report(&curve(&[1.0, 3.0, 2.0])).unwrap();
        assert_eq!(r.hump_at, Some(2.0));
        assert!(!r.monotone_nondecreasing && !r.monotone_nonincreasing);
        assert_eq!(r.crossings, 1);

        let r = shape_report(&curve(&[2.0, 2.0, 2.0 + 1e-13])).unwrap();
        assert!(r.monotone_nondecreasing && r.monotone_nonincreasing);
        assert_eq!(r.hump_at, None);
    }

    #[test]
    fn hump_picks_highest_interior_maximum() {
        let r = shape_report(&curve(&[0.0, 2.0, 1.0, 5.0, 4.0, 6.0])).unwrap();
        assert_eq!(r.hump_at, Some(4.0));
        assert_eq!(r.crossings, 4);
    }

    #[test]
    fn short_curves_rejected() {
        assert!(shape_report(&curve(&[1.0, 2.0])).is_err());
    }

    #[test]
    fn curve_invariants() {
        assert!(Curve::new("c", CurveKind::Price, vec![(1.0, 0.0), (1.0, 0.0)]).is_err());
        assert!(Curve::new("c", CurveKind::Price, vec![(1.0, f64::NAN)]).is_err());
    }

    #[test]
    fn grid_construction() {
        assert_eq!(maturity_grid(1.0, 10.0, 10).unwrap(), (1..=10).map(f64::from).collect::<Vec<_>>());
        assert!(maturity_grid(1.0, 10.0, 0).is_err());
        assert!(maturity_grid(0.0, 10.0, 3).is_err());
        assert!(maturity_grid(5.0, 1.0, 3).is_err());
    }

    #[test]
    fn zero_potential_curves_are_flat_zero() {
        let p = QuadraticModelParams::new(0.0, vec![3.0], TimeChange::sqrt()).unwrap();
        let grid = maturity_grid(0.5, 10.0, 20).unwrap();
        assert!(yield_curve(&grid, &p).unwrap().values().all(|v| v == 0.0));
        assert!(spread_curve(&grid, &p, None).unwrap().values().all(|v| v.abs() <= 1e-10));
    }

    #[test]
    fn spread_curves_rise_and_widen_with_beta() {
        let grid = maturity_grid(0.5, 10.0, 20).unwrap();
        let mk = |beta| {
            let p = QuadraticModelParams::new(beta, vec![0.0], TimeChange::sqrt()).unwrap();
            spread_curve(&grid, &p, None).unwrap()
        };
        let lo = mk(0.1);
        let hi = mk(1.0);
        assert!(shape_report(&lo).unwrap().monotone_nondecreasing);
        assert!(shape_report(&hi).unwrap().monotone_nondecreasing);
        assert!(lo.values().zip(hi.values()).all(|(a, b)| b > a));
    }
}
