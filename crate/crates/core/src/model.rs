//! Model parameters, the time-change family and the closed-form propagators.
//!
//! All hyperbolic expressions are evaluated in log space so that `beta * t`
//! in the hundreds (long maturities under an exponential time change) never
//! overflows. A [`PropagatorValue`] therefore carries the logarithm of the
//! propagator; `value()` exponentiates on demand.

use std::fmt;

use crate::error::{ensure_finite, ensure_non_negative, Error, Result};

/// Number of sample points used to check a time change for monotonicity.
pub const MONOTONICITY_GRID_POINTS: usize = 10_001;

/// Horizon over which [`QuadraticModelParams::new`] validates the time change.
pub const DEFAULT_HORIZON: f64 = 30.0;

/// Above this argument `cosh`/`sinh` are evaluated through `exp(-2y)`.
const LARGE_ARG: f64 = 20.0;

/// Deterministic non-decreasing time change `lambda: [0, inf) -> [0, inf)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeChange {
    /// `c * e^t`
    ScaledExponential { c: f64 },
    /// `c * t^p`, `p > 0`
    PowerLaw { c: f64, p: f64 },
    /// `a + b * t`
    Affine { a: f64, b: f64 },
}

impl TimeChange {
    pub fn scaled_exponential(c: f64) -> Result<Self> {
        ensure_non_negative("lambda.c", c)?;
        Ok(TimeChange::ScaledExponential { c })
    }

    pub fn power_law(c: f64, p: f64) -> Result<Self> {
        ensure_non_negative("lambda.c", c)?;
        ensure_finite("lambda.p", p)?;
        if p <= 0.0 {
            return Err(Error::domain("lambda.p", format!("must be positive, got {p}")));
        }
        Ok(TimeChange::PowerLaw { c, p })
    }

    pub fn affine(a: f64, b: f64) -> Result<Self> {
        ensure_non_negative("lambda.a", a)?;
        ensure_non_negative("lambda.b", b)?;
        Ok(TimeChange::Affine { a, b })
    }

    /// `lambda_t = sqrt(t)`
    pub fn sqrt() -> Self {
        TimeChange::PowerLaw { c: 1.0, p: 0.5 }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            TimeChange::ScaledExponential { c } => c * t.exp(),
            TimeChange::PowerLaw { c, p } => c * t.powf(p),
            TimeChange::Affine { a, b } => a + b * t,
        }
    }

    /// Samples `lambda` on an equispaced grid over `[0, horizon]` and checks
    /// that it is finite, non-negative and non-decreasing.
    pub fn check_on(&self, horizon: f64) -> Result<()> {
        ensure_non_negative("horizon", horizon)?;
        let n = MONOTONICITY_GRID_POINTS - 1;
        let mut prev = f64::NEG_INFINITY;
        for i in 0..=n {
            let t = horizon * i as f64 / n as f64;
            let v = self.eval(t);
            if !v.is_finite() || v < 0.0 {
                return Err(Error::domain(
                    "lambda",
                    format!("evaluates to {v} at t = {t}"),
                ));
            }
            if v < prev {
                return Err(Error::domain(
                    "lambda",
                    format!("decreases between t = {} and t = {t}", horizon * (i - 1) as f64 / n as f64),
                ));
            }
            prev = v;
        }
        Ok(())
    }
}

impl fmt::Display for TimeChange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            TimeChange::ScaledExponential { c } => write!(f, "{c}*exp(t)"),
            TimeChange::PowerLaw { c, p } => write!(f, "{c}*t^{p}"),
            TimeChange::Affine { a, b } => write!(f, "{a}+{b}*t"),
        }
    }
}

/// Parameters of the quadratic model: potential scale, Wiener start point and
/// time change. The dimension is the length of the start point.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticModelParams {
    beta: f64,
    x0: Vec<f64>,
    x_norm_sq: f64,
    time_change: TimeChange,
}

impl QuadraticModelParams {
    pub fn new(beta: f64, x0: Vec<f64>, time_change: TimeChange) -> Result<Self> {
        Self::with_horizon(beta, x0, time_change, DEFAULT_HORIZON)
    }

    /// Like [`new`](Self::new) but validates the time change over `[0, horizon]`.
    pub fn with_horizon(
        beta: f64,
        x0: Vec<f64>,
        time_change: TimeChange,
        horizon: f64,
    ) -> Result<Self> {
        ensure_non_negative("model.beta", beta)?;
        if x0.is_empty() {
            return Err(Error::domain("model.x0", "dimension must be at least 1"));
        }
        for &xi in &x0 {
            ensure_finite("model.x0", xi)?;
        }
        time_change.check_on(horizon)?;
        let x_norm_sq = x0.iter().map(|v| v * v).sum();
        Ok(QuadraticModelParams {
            beta,
            x0,
            x_norm_sq,
            time_change,
        })
    }

    /// Same model observed at a different state, e.g. `X_t` for valuation at `t > 0`.
    pub fn with_state(&self, x: Vec<f64>) -> Result<Self> {
        if x.len() != self.dim() {
            return Err(Error::domain(
                "model.x0",
                format!("expected {} coordinates, got {}", self.dim(), x.len()),
            ));
        }
        for &xi in &x {
            ensure_finite("model.x0", xi)?;
        }
        let x_norm_sq = x.iter().map(|v| v * v).sum();
        Ok(QuadraticModelParams {
            x0: x,
            x_norm_sq,
            ..self.clone()
        })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn dim(&self) -> usize {
        self.x0.len()
    }

    pub fn x0(&self) -> &[f64] {
        &self.x0
    }

    /// `|x0|^2`; the closed forms depend on the start point only through it.
    pub fn x_norm_sq(&self) -> f64 {
        self.x_norm_sq
    }

    pub fn time_change(&self) -> &TimeChange {
        &self.time_change
    }

    pub fn lambda(&self, t: f64) -> f64 {
        self.time_change.eval(t)
    }
}

/// A propagator evaluation held in log space.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct PropagatorValue {
    ln: f64,
}

impl PropagatorValue {
    pub const ONE: PropagatorValue = PropagatorValue { ln: 0.0 };

    pub fn from_ln(ln: f64) -> Self {
        PropagatorValue { ln }
    }

    pub fn value(self) -> f64 {
        self.ln.exp()
    }

    pub fn ln(self) -> f64 {
        self.ln
    }
}

impl fmt::Display for PropagatorValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

/// `V(x) = beta^2 |x|^2 / 2`
pub fn potential_v(x: &[f64], beta: f64) -> Result<f64> {
    ensure_non_negative("beta", beta)?;
    let mut norm_sq = 0.0;
    for &xi in x {
        ensure_finite("x", xi)?;
        norm_sq += xi * xi;
    }
    Ok(0.5 * beta * beta * norm_sq)
}

/// `E[exp(-alpha |X_t|^2 - (beta^2/2) int_0^t |X_s|^2 ds)]` for a `dim`-dimensional
/// Wiener process started at `x` with `|x|^2 = x_norm_sq`.
///
/// For `beta > 0` this is
///
/// ```text
///   (cosh bt + (2a/b) sinh bt)^(-d/2)
///     * exp(-(b x^2 / 2) (b sinh bt + 2a cosh bt) / (b cosh bt + 2a sinh bt))
/// ```
///
/// and for `beta = 0` it reduces to `(2at + 1)^(-d/2) exp(-a x^2 / (2at + 1))`.
/// The `+ 2a cosh bt` numerator is the one that recovers `exp(-a x^2)` at
/// `t = 0` and the `beta = 0` branch as `beta -> 0`.
pub fn laplace_quadratic(
    alpha: f64,
    beta: f64,
    t: f64,
    x_norm_sq: f64,
    dim: usize,
) -> Result<PropagatorValue> {
    check_laplace_args(alpha, beta, t, x_norm_sq, dim)?;
    Ok(PropagatorValue::from_ln(ln_laplace(
        alpha, beta, t, x_norm_sq, dim, 1.0,
    )))
}

/// The same expression with the sign of `2a cosh bt` in the exponent's
/// numerator flipped. It violates the `t -> 0` limit; it exists so the Monte
/// Carlo oracle can demonstrate that it is rejected. Returns the raw value,
/// which may exceed one.
pub fn laplace_quadratic_minus_variant(
    alpha: f64,
    beta: f64,
    t: f64,
    x_norm_sq: f64,
    dim: usize,
) -> Result<f64> {
    check_laplace_args(alpha, beta, t, x_norm_sq, dim)?;
    Ok(ln_laplace(alpha, beta, t, x_norm_sq, dim, -1.0).exp())
}

fn check_laplace_args(alpha: f64, beta: f64, t: f64, x_norm_sq: f64, dim: usize) -> Result<()> {
    ensure_non_negative("alpha", alpha)?;
    ensure_non_negative("beta", beta)?;
    ensure_non_negative("t", t)?;
    ensure_non_negative("x_norm_sq", x_norm_sq)?;
    if dim == 0 {
        return Err(Error::domain("dim", "must be at least 1"));
    }
    Ok(())
}

fn ln_laplace(alpha: f64, beta: f64, t: f64, x_norm_sq: f64, dim: usize, sign: f64) -> f64 {
    let half_d = 0.5 * dim as f64;
    if beta == 0.0 {
        let g = 2.0 * alpha * t;
        return -half_d * g.ln_1p() - alpha * x_norm_sq / (1.0 + g);
    }
    let bt = beta * t;
    // cosh bt + (2a/b) sinh bt, with (2a/b) sinh bt = 2a t sinhc(bt)
    let ln_pref = ln_cosh_plus_c_sinh(bt, 2.0 * alpha * t * sinhc(bt), 2.0 * alpha / beta);
    // (b/2) (b tanh + 2a) / (b + 2a tanh) = (1/2) (b tanh + 2a) / (1 + 2a tanh / b)
    let th = bt.tanh();
    let exponent =
        0.5 * x_norm_sq * (beta * th + sign * 2.0 * alpha) / (1.0 + 2.0 * alpha * t * tanhc(bt));
    -half_d * ln_pref - exponent
}

/// `q(t, x) = (cosh bt)^(-d/2) exp(-(b |x|^2 / 2) tanh bt)`.
pub fn propagator_q(t: f64, params: &QuadraticModelParams) -> Result<PropagatorValue> {
    laplace_quadratic(0.0, params.beta(), t, params.x_norm_sq(), params.dim())
}

/// `q` at an arbitrary squared state norm, for use inside Monte Carlo payoffs.
pub fn propagator_q_at(t: f64, beta: f64, x_norm_sq: f64, dim: usize) -> Result<PropagatorValue> {
    laplace_quadratic(0.0, beta, t, x_norm_sq, dim)
}

/// `qhat(t, s, x) = E[exp(-int_s^t V(X_u^x) du)]`, `0 <= s <= t`:
///
/// ```text
///   (cosh b(t-s) + b s sinh b(t-s))^(-d/2)
///     * exp(-(b |x|^2 / 2) tanh b(t-s) / (1 + b s tanh b(t-s)))
/// ```
pub fn propagator_qhat(t: f64, s: f64, params: &QuadraticModelParams) -> Result<PropagatorValue> {
    ensure_non_negative("t", t)?;
    ensure_non_negative("s", s)?;
    if s > t {
        return Err(Error::domain("s", format!("must not exceed t = {t}, got {s}")));
    }
    let beta = params.beta();
    let a = beta * (t - s);
    let bs = beta * s;
    let ln_pref = ln_cosh_plus_c_sinh(a, bs * a.sinh(), bs);
    let th = a.tanh();
    let exponent = 0.5 * beta * params.x_norm_sq() * th / (1.0 + bs * th);
    Ok(PropagatorValue::from_ln(
        -0.5 * params.dim() as f64 * ln_pref - exponent,
    ))
}

/// `ln(cosh y + c sinh y)` for `y, c >= 0`. `c_sinh` is `c * sinh y`, supplied
/// by the caller so that `c` itself is only formed for large `y`.
fn ln_cosh_plus_c_sinh(y: f64, c_sinh: f64, c: f64) -> f64 {
    if y < LARGE_ARG {
        // cosh y - 1 = 2 sinh^2(y/2)
        let sh = (0.5 * y).sinh();
        (2.0 * sh * sh + c_sinh).ln_1p()
    } else {
        // cosh y + c sinh y = e^y (1 + (c - 1) m / 2), m = 1 - e^{-2y}
        let m = -(-2.0 * y).exp_m1();
        y + (0.5 * (c - 1.0) * m).ln_1p()
    }
}

fn sinhc(y: f64) -> f64 {
    if y == 0.0 {
        1.0
    } else {
        y.sinh() / y
    }
}

fn tanhc(y: f64) -> f64 {
    if y == 0.0 {
        1.0
    } else {
        y.tanh() / y
    }
}
