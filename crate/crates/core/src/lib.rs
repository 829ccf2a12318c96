//! Quarterly time-series econometrics for inflation forecasting studies.
//!
//! The crate covers series handling and CSV ingestion ([`series`],
//! [`csvio`]), correlograms and residual diagnostics ([`diagnostics`]),
//! mean-shift structural breaks ([`breaks`]), exact-likelihood ARIMA
//! estimation and forecasting ([`arima`]), OLS with lagged-covariate
//! designs ([`regress`]), and chained forecasting with out-of-sample
//! evaluation ([`harness`]).

pub mod arima;
pub mod breaks;
pub mod csvio;
pub mod diagnostics;
pub mod dist;
mod error;
pub mod harness;
pub mod linalg;
pub mod regress;
pub mod series;

pub use arima::InterceptPolicy;
pub use error::{Error, Result};
pub use series::{align, summary_stats, Frame, QuarterDate, Series, SummaryStats};
