//! Correlograms, residual diagnostics and unit-root testing.

mod adf;
mod correlogram;
mod normality;
mod residual;

pub use adf::{adf_test, mackinnon_critical_values, mackinnon_p_value, AdfResult, Deterministic, InfoCriterion, LagRule};
pub use correlogram::{acf, acf_values, durbin_levinson, pacf, CorrelogramPoint};
pub use normality::{jarque_bera, shapiro_wilk};
pub use residual::{ljung_box, ljung_box_from_acf, white_test, WhiteOptions};

/// Verdict level used throughout the toolkit.
pub const DEFAULT_LEVEL: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub struct TestResult {
    pub statistic: f64,
    pub p_value: f64,
    /// Degrees of freedom of the reference distribution, or the sample size
    /// for tests without one.
    pub dof: usize,
    /// Rejection of the null at 5%.
    pub reject: bool,
    pub note: Option<String>,
}

impl TestResult {
    pub(crate) fn from_p(statistic: f64, p_value: f64, dof: usize) -> Self {
        Self {
            statistic,
            p_value,
            dof,
            reject: p_value < DEFAULT_LEVEL,
            note: None,
        }
    }

    pub fn reject_at(&self, level: f64) -> bool {
        self.p_value < level
    }
}
