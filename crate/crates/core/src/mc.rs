//! Monte Carlo oracle for the closed forms.
//!
//! Wiener paths are sampled with exact Gaussian increments on a uniform grid,
//! so the only discretization error is the trapezoid quadrature of
//! `int V(X_s) ds`. Default times are Cox times: the first crossing of the
//! integrated hazard over an independent unit-exponential threshold.
//!
//! Every sampling unit (a path, or an antithetic pair) draws from its own
//! ChaCha8 stream `(seed, unit index)`, so an estimate does not depend on how
//! the units are split across threads. Per-unit payoffs are collected in index
//! order and reduced sequentially.

use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{ensure_finite, ensure_non_negative, Error, Result};
use crate::model::{propagator_q, propagator_q_at, QuadraticModelParams};

/// Stored values (`n_paths * (n_steps + 1) * dim`) allowed in [`simulate_paths`].
pub const DEFAULT_PATH_BUDGET: usize = 50_000_000;

/// `default_time` of a path that never crosses its threshold on the grid.
pub const NO_DEFAULT: f64 = f64::INFINITY;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McConfig {
    pub n_paths: usize,
    /// Total number of grid intervals over the simulated window.
    pub n_steps: usize,
    pub seed: u64,
    pub antithetic: bool,
    pub path_budget: usize,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig {
            n_paths: 100_000,
            n_steps: 1_000,
            seed: 20_110_101,
            antithetic: false,
            path_budget: DEFAULT_PATH_BUDGET,
        }
    }
}

impl McConfig {
    pub fn new(n_paths: usize, n_steps: usize, seed: u64) -> Self {
        McConfig {
            n_paths,
            n_steps,
            seed,
            ..McConfig::default()
        }
    }

    pub fn antithetic(self, antithetic: bool) -> Self {
        McConfig { antithetic, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_paths < 2 {
            return Err(Error::domain("mc.n_paths", "must be at least 2"));
        }
        if self.n_steps < 2 {
            return Err(Error::domain("mc.n_steps", "must be at least 2"));
        }
        if self.antithetic && (!self.n_paths.is_multiple_of(2) || self.n_paths < 4) {
            return Err(Error::domain(
                "mc.n_paths",
                "antithetic runs need an even number of paths, at least 4",
            ));
        }
        Ok(())
    }

    /// Independent sampling units: pairs for antithetic runs, paths otherwise.
    fn units(&self) -> usize {
        if self.antithetic {
            self.n_paths / 2
        } else {
            self.n_paths
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    /// Number of i.i.d. samples behind the standard error.
    pub n_effective: usize,
}

impl McEstimate {
    /// `(mean - reference) / std_error`; zero when both agree exactly.
    pub fn z_score(&self, reference: f64) -> f64 {
        let diff = self.mean - reference;
        if diff == 0.0 {
            0.0
        } else {
            diff / self.std_error
        }
    }

    fn from_samples(samples: &[f64]) -> Self {
        let n = samples.len();
        let mean = samples.iter().sum::<f64>() / n as f64;
        let ss: f64 = samples.iter().map(|y| (y - mean) * (y - mean)).sum();
        let var = ss / (n - 1) as f64;
        McEstimate {
            mean,
            std_error: (var / n as f64).sqrt(),
            n_effective: n,
        }
    }
}

/// One simulated path with its cumulative hazard and Cox default time.
#[derive(Debug, Clone, PartialEq)]
pub struct DefaultScenario {
    pub grid: Vec<f64>,
    pub state_path: Vec<Vec<f64>>,
    /// Trapezoid cumulative of `V(X)` at each grid point.
    pub integrated_hazard: Vec<f64>,
    /// Linearly interpolated threshold crossing, or [`NO_DEFAULT`].
    pub default_time: f64,
}

impl DefaultScenario {
    pub fn survives_past(&self, t: f64) -> bool {
        self.default_time > t
    }
}

/// Grid layout for one estimator: an exact Gaussian jump of length `lead_in`,
/// then `n_steps` intervals of length `dt` along which the hazard accumulates.
struct Walk<'a> {
    seed: u64,
    x0: &'a [f64],
    lead_in: f64,
    dt: f64,
    n_steps: usize,
}

const SIGNS: [f64; 2] = [1.0, -1.0];

impl Walk<'_> {
    /// Runs sampling unit `unit` with `M` members (antithetic partners negate
    /// every Gaussian draw) and calls `visit(member, k, state)` at every grid
    /// point. Returns each member's exponential threshold.
    #[inline]
    fn run<const M: usize>(&self, unit: u64, mut visit: impl FnMut(usize, usize, &[f64])) -> [f64; M] {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(unit);
        let u: f64 = rng.sample(Open01);
        let thresholds = std::array::from_fn(|m| if m == 0 { -u.ln() } else { -(1.0 - u).ln() });

        let dim = self.x0.len();
        let mut states: [Vec<f64>; M] = std::array::from_fn(|_| self.x0.to_vec());
        if self.lead_in > 0.0 {
            let sd = self.lead_in.sqrt();
            for j in 0..dim {
                let z: f64 = rng.sample(StandardNormal);
                for (m, s) in states.iter_mut().enumerate() {
                    s[j] += SIGNS[m] * sd * z;
                }
            }
        }
        for (m, s) in states.iter().enumerate() {
            visit(m, 0, s);
        }
        let sd = self.dt.sqrt();
        for k in 1..=self.n_steps {
            for j in 0..dim {
                let z: f64 = rng.sample(StandardNormal);
                for (m, s) in states.iter_mut().enumerate() {
                    s[j] += SIGNS[m] * sd * z;
                }
            }
            for (m, s) in states.iter().enumerate() {
                visit(m, k, s);
            }
        }
        thresholds
    }

    /// Per-member cumulative hazard `scale * int |X|^2` (trapezoid), terminal
    /// `|X|^2` and threshold.
    #[inline]
    fn outcomes<const M: usize>(&self, unit: u64, hazard_scale: f64) -> [Outcome; M] {
        let c = 0.5 * hazard_scale * self.dt;
        let mut prev = [0.0; M];
        let mut acc = [0.0; M];
        let thresholds = self.run::<M>(unit, |m, k, x| {
            let s = norm_sq(x);
            if k > 0 {
                acc[m] += c * (prev[m] + s);
            }
            prev[m] = s;
        });
        std::array::from_fn(|m| Outcome {
            hazard: acc[m],
            terminal_norm_sq: prev[m],
            threshold: thresholds[m],
        })
    }
}

#[derive(Debug, Clone, Copy)]
struct Outcome {
    hazard: f64,
    terminal_norm_sq: f64,
    threshold: f64,
}

impl Outcome {
    fn survived(&self) -> bool {
        self.threshold > self.hazard
    }
}

#[inline]
fn norm_sq(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

/// Averages `payoff` over all sampling units.
fn estimate(walk: &Walk<'_>, cfg: &McConfig, hazard_scale: f64, payoff: impl Fn(&Outcome) -> f64 + Sync) -> McEstimate {
    let samples: Vec<f64> = if cfg.antithetic {
        (0..cfg.units() as u64)
            .into_par_iter()
            .map(|i| {
                let [a, b] = walk.outcomes::<2>(i, hazard_scale);
                0.5 * (payoff(&a) + payoff(&b))
            })
            .collect()
    } else {
        (0..cfg.units() as u64)
            .into_par_iter()
            .map(|i| {
                let [a] = walk.outcomes::<1>(i, hazard_scale);
                payoff(&a)
            })
            .collect()
    };
    McEstimate::from_samples(&samples)
}

fn hazard_scale(beta: f64) -> f64 {
    0.5 * beta * beta
}

fn check_positive(key: &'static str, v: f64) -> Result<f64> {
    ensure_finite(key, v)?;
    if v <= 0.0 {
        return Err(Error::domain(key, format!("must be positive, got {v}")));
    }
    Ok(v)
}

/// Simulates and stores full paths over `[0, horizon]`.
pub fn simulate_paths(
    horizon: f64,
    params: &QuadraticModelParams,
    cfg: &McConfig,
) -> Result<Vec<DefaultScenario>> {
    check_positive("horizon", horizon)?;
    cfg.validate()?;
    let requested = cfg.n_paths as u128 * (cfg.n_steps as u128 + 1) * params.dim() as u128;
    if requested > cfg.path_budget as u128 {
        return Err(Error::Resource {
            requested,
            budget: cfg.path_budget as u128,
        });
    }
    let walk = Walk {
        seed: cfg.seed,
        x0: params.x0(),
        lead_in: 0.0,
        dt: horizon / cfg.n_steps as f64,
        n_steps: cfg.n_steps,
    };
    let grid: Vec<f64> = (0..=cfg.n_steps).map(|k| k as f64 * walk.dt).collect();
    let scale = hazard_scale(params.beta());
    let record = |unit: u64, members: usize| -> Vec<DefaultScenario> {
        let mut paths = vec![Vec::with_capacity(cfg.n_steps + 1); members];
        let mut hazards = vec![Vec::with_capacity(cfg.n_steps + 1); members];
        let c = 0.5 * scale * walk.dt;
        let mut visit = |m: usize, k: usize, x: &[f64]| {
            let h = if k == 0 {
                0.0
            } else {
                let prev: &Vec<f64> = &paths[m][k - 1];
                hazards[m][k - 1] + c * (norm_sq(prev) + norm_sq(x))
            };
            paths[m].push(x.to_vec());
            hazards[m].push(h);
        };
        let thresholds: Vec<f64> = if members == 2 {
            walk.run::<2>(unit, &mut visit).to_vec()
        } else {
            walk.run::<1>(unit, &mut visit).to_vec()
        };
        paths
            .into_iter()
            .zip(hazards)
            .zip(thresholds)
            .map(|((state_path, integrated_hazard), threshold)| {
                let default_time = crossing_time(&grid, &integrated_hazard, threshold);
                DefaultScenario {
                    grid: grid.clone(),
                    state_path,
                    integrated_hazard,
                    default_time,
                }
            })
            .collect()
    };
    let members = if cfg.antithetic { 2 } else { 1 };
    let nested: Vec<Vec<DefaultScenario>> = (0..cfg.units() as u64)
        .into_par_iter()
        .map(|i| record(i, members))
        .collect();
    Ok(nested.into_iter().flatten().collect())
}

fn crossing_time(grid: &[f64], hazard: &[f64], threshold: f64) -> f64 {
    match hazard.iter().position(|&h| h >= threshold) {
        // hazard[0] = 0 < threshold, so k >= 1
        Some(k) => {
            let (h0, h1) = (hazard[k - 1], hazard[k]);
            grid[k - 1] + (threshold - h0) / (h1 - h0) * (grid[k] - grid[k - 1])
        }
        None => NO_DEFAULT,
    }
}

fn plain_walk<'a>(t: f64, params: &'a QuadraticModelParams, cfg: &McConfig) -> Walk<'a> {
    Walk {
        seed: cfg.seed,
        x0: params.x0(),
        lead_in: 0.0,
        dt: t / cfg.n_steps as f64,
        n_steps: cfg.n_steps,
    }
}

/// Estimates `q(t, x0) = E[exp(-int_0^t V(X_s) ds)]`.
pub fn mc_q(t: f64, params: &QuadraticModelParams, cfg: &McConfig) -> Result<McEstimate> {
    check_positive("t", t)?;
    cfg.validate()?;
    let walk = plain_walk(t, params, cfg);
    Ok(estimate(&walk, cfg, hazard_scale(params.beta()), |o| (-o.hazard).exp()))
}

/// Estimates `qhat(t, s, x0) = E[exp(-int_s^t V(X_u) du)]`. The state jumps
/// exactly to `X_s`, then `n_steps` intervals cover `[s, t]`.
pub fn mc_qhat(t: f64, s: f64, params: &QuadraticModelParams, cfg: &McConfig) -> Result<McEstimate> {
    check_positive("t", t)?;
    ensure_non_negative("s", s)?;
    if s > t {
        return Err(Error::domain("s", format!("must not exceed t = {t}, got {s}")));
    }
    cfg.validate()?;
    if s == t {
        return Ok(McEstimate {
            mean: 1.0,
            std_error: 0.0,
            n_effective: cfg.units(),
        });
    }
    let walk = Walk {
        seed: cfg.seed,
        x0: params.x0(),
        lead_in: s,
        dt: (t - s) / cfg.n_steps as f64,
        n_steps: cfg.n_steps,
    };
    Ok(estimate(&walk, cfg, hazard_scale(params.beta()), |o| (-o.hazard).exp()))
}

/// Estimates `E[exp(-alpha |X_t|^2 - (beta^2/2) int_0^t |X_s|^2 ds)]` from the
/// start point of `params`; `beta` overrides the model's potential scale.
pub fn mc_laplace(
    alpha: f64,
    beta: f64,
    t: f64,
    params: &QuadraticModelParams,
    cfg: &McConfig,
) -> Result<McEstimate> {
    ensure_non_negative("alpha", alpha)?;
    ensure_non_negative("beta", beta)?;
    check_positive("t", t)?;
    cfg.validate()?;
    let walk = plain_walk(t, params, cfg);
    Ok(estimate(&walk, cfg, hazard_scale(beta), |o| {
        (-alpha * o.terminal_norm_sq - o.hazard).exp()
    }))
}

/// Estimates `E[q(s, X_t) exp(-int_0^t V(X_u) du)]` with the closed-form `q`
/// inside the expectation. Equals `q(t + s, x0)` by the propagation property.
pub fn mc_propagation_check(
    s: f64,
    t: f64,
    params: &QuadraticModelParams,
    cfg: &McConfig,
) -> Result<McEstimate> {
    check_positive("s", s)?;
    check_positive("t", t)?;
    cfg.validate()?;
    let (beta, dim) = (params.beta(), params.dim());
    let walk = plain_walk(t, params, cfg);
    Ok(estimate(&walk, cfg, hazard_scale(beta), |o| {
        let q = propagator_q_at(s, beta, o.terminal_norm_sq, dim).expect("validated arguments");
        (q.ln() - o.hazard).exp()
    }))
}

/// Estimates `E[1{tau > T} q(lambda_T, X_T)] / q(lambda_0, x0)` with Cox
/// default times; equals the defaultable price at `t = 0`.
pub fn mc_price_defaultable(
    maturity: f64,
    params: &QuadraticModelParams,
    cfg: &McConfig,
) -> Result<McEstimate> {
    check_positive("T", maturity)?;
    cfg.validate()?;
    let (beta, dim) = (params.beta(), params.dim());
    let lambda_t = params.lambda(maturity);
    let ln_den = propagator_q(params.lambda(0.0), params)?.ln();
    let walk = plain_walk(maturity, params, cfg);
    Ok(estimate(&walk, cfg, hazard_scale(beta), |o| {
        if o.survived() {
            let q = propagator_q_at(lambda_t, beta, o.terminal_norm_sq, dim).expect("validated arguments");
            (q.ln() - ln_den).exp()
        } else {
            0.0
        }
    }))
}

/// Estimates `E[q(lambda_T, X_T)] / q(lambda_0, x0)`, the default-free price
/// at `t = 0`. Only the terminal state matters, so `X_T` is drawn in one step.
pub fn mc_price_default_free(
    maturity: f64,
    params: &QuadraticModelParams,
    cfg: &McConfig,
) -> Result<McEstimate> {
    check_positive("T", maturity)?;
    cfg.validate()?;
    let (beta, dim) = (params.beta(), params.dim());
    let lambda_t = params.lambda(maturity);
    let ln_den = propagator_q(params.lambda(0.0), params)?.ln();
    let walk = Walk {
        seed: cfg.seed,
        x0: params.x0(),
        lead_in: maturity,
        dt: 0.0,
        n_steps: 0,
    };
    Ok(estimate(&walk, cfg, 0.0, |o| {
        let q = propagator_q_at(lambda_t, beta, o.terminal_norm_sq, dim).expect("validated arguments");
        (q.ln() - ln_den).exp()
    }))
}

/// Estimates `q(t, x0)` twice on the same Wiener paths: with the trapezoid
/// rule on `n_steps` intervals (every other point of the path) and on the
/// `2 * n_steps` refinement. Returns `(coarse, fine)`. Coupling the two
/// quadratures isolates the discretization bias from sampling noise.
/// Always samples plain paths; `cfg.antithetic` is ignored.
pub fn mc_q_step_doubling(
    t: f64,
    params: &QuadraticModelParams,
    cfg: &McConfig,
) -> Result<(McEstimate, McEstimate)> {
    check_positive("t", t)?;
    cfg.validate()?;
    let walk = Walk {
        seed: cfg.seed,
        x0: params.x0(),
        lead_in: 0.0,
        dt: t / (2 * cfg.n_steps) as f64,
        n_steps: 2 * cfg.n_steps,
    };
    let scale = hazard_scale(params.beta());
    let (c_fine, c_coarse) = (0.5 * scale * walk.dt, scale * walk.dt);
    let path_pair = |unit: u64| -> (f64, f64) {
        let (mut prev, mut prev_even) = (0.0, 0.0);
        let (mut fine, mut coarse) = (0.0, 0.0);
        walk.run::<1>(unit, |_, k, x| {
            let s = norm_sq(x);
            if k > 0 {
                fine += c_fine * (prev + s);
                if k % 2 == 0 {
                    coarse += c_coarse * (prev_even + s);
                }
            }
            if k % 2 == 0 {
                prev_even = s;
            }
            prev = s;
        });
        ((-coarse).exp(), (-fine).exp())
    };
    let (coarse, fine): (Vec<f64>, Vec<f64>) = (0..cfg.n_paths as u64)
        .into_par_iter()
        .map(path_pair)
        .unzip();
    Ok((McEstimate::from_samples(&coarse), McEstimate::from_samples(&fine)))
}

/// Empirical survival fraction `P(tau > T)` under the Cox construction.
pub fn mc_survival(maturity: f64, params: &QuadraticModelParams, cfg: &McConfig) -> Result<McEstimate> {
    check_positive("T", maturity)?;
    cfg.validate()?;
    let walk = plain_walk(maturity, params, cfg);
    Ok(estimate(&walk, cfg, hazard_scale(params.beta()), |o| {
        if o.survived() {
            1.0
        } else {
            0.0
        }
    }))
}
