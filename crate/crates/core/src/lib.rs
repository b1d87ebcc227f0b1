//! Killed heat-kernel pricing of a single defaultable zero-coupon bond.
//!
//! The state is a `d`-dimensional Wiener process `X` started at `x0`, the
//! default intensity is the quadratic potential `V(x) = beta^2 |x|^2 / 2`, and
//! the state price density is `q(lambda_t, X_t)` where
//!
//! ```text
//!     q(t, x) = E[exp(-int_0^t V(X_s^x) ds)]
//! ```
//!
//! and `lambda` is a non-decreasing deterministic time change.
//!
//! * [`model`] holds the parameters and the closed-form propagators.
//! * [`pricing`] turns propagators into bond prices, yields and credit spreads.
//! * [`mc`] is an independent Monte Carlo oracle for every closed form.
//! * [`curves`] sweeps maturity grids and diagnoses curve shapes.
//! * [`validate`] runs the oracle against the closed forms and tabulates z-scores.

pub mod curves;
pub mod error;
pub mod mc;
pub mod model;
pub mod pricing;
pub mod validate;

pub use error::{Error, Result};
pub use model::{PropagatorValue, QuadraticModelParams, TimeChange};
