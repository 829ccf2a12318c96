//! Subset ARIMA models: exact Gaussian likelihood through the Kalman
//! filter, maximum-likelihood estimation, simulation, forecasting and
//! best-subset search under AIC.
//!
//! Sign conventions: the AR polynomial is `1 - phi_1 B - ... - phi_p B^p`
//! and the MA polynomial is `1 + theta_1 B + ... + theta_q B^q`, so the
//! differenced series `w_t` satisfies
//! `w_t - mu = sum phi_i (w_{t-i} - mu) + e_t + sum theta_j e_{t-j}`.
//! `mu` is the process mean, reported as the intercept.

mod estimate;
mod forecast;
pub mod kalman;
pub mod optim;
mod search;
mod simulate;
pub mod transform;

use std::fmt;

pub use estimate::{fit_mle, fit_mle_with, FitOptions};
pub use forecast::{forecast, ForecastPoint};
pub use search::{best_subset, best_subset_with, InterceptPolicy, SearchMode, SubsetSearch, MAX_SEARCH_ORDER};
pub use simulate::simulate;

use crate::error::{Error, Result};
use crate::series::Series;

/// Label for the MA sign convention used in reports.
pub const MA_CONVENTION: &str = "MA polynomial 1 + theta_1 B + ... + theta_q B^q";

pub const MAX_LAG: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ArimaSpec {
    d: usize,
    ar_lags: Vec<usize>,
    ma_lags: Vec<usize>,
    intercept: bool,
}

impl ArimaSpec {
    /// Lags are sorted and deduplicated; each must lie in `1..=12`.
    pub fn new(d: usize, ar_lags: &[usize], ma_lags: &[usize], intercept: bool) -> Result<Self> {
        let norm = |lags: &[usize], what: &str| -> Result<Vec<usize>> {
            let mut v = lags.to_vec();
            v.sort_unstable();
            v.dedup();
            if v.first() == Some(&0) || v.last().is_some_and(|&l| l > MAX_LAG) {
                return Err(Error::Domain(format!(
                    "{what} lags must lie in 1..={MAX_LAG}, got {lags:?}"
                )));
            }
            Ok(v)
        };
        Ok(Self {
            d,
            ar_lags: norm(ar_lags, "AR")?,
            ma_lags: norm(ma_lags, "MA")?,
            intercept,
        })
    }

    /// Full-window ARMA(p, q) differenced `d` times.
    pub fn arima(p: usize, d: usize, q: usize, intercept: bool) -> Result<Self> {
        let ar: Vec<usize> = (1..=p).collect();
        let ma: Vec<usize> = (1..=q).collect();
        Self::new(d, &ar, &ma, intercept)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn ar_lags(&self) -> &[usize] {
        &self.ar_lags
    }

    pub fn ma_lags(&self) -> &[usize] {
        &self.ma_lags
    }

    pub fn intercept(&self) -> bool {
        self.intercept
    }

    pub fn max_ar(&self) -> usize {
        self.ar_lags.last().copied().unwrap_or(0)
    }

    pub fn max_ma(&self) -> usize {
        self.ma_lags.last().copied().unwrap_or(0)
    }

    pub fn max_lag(&self) -> usize {
        self.max_ar().max(self.max_ma())
    }

    /// Estimated parameters including the innovation variance.
    pub fn n_params(&self) -> usize {
        self.ar_lags.len() + self.ma_lags.len() + usize::from(self.intercept) + 1
    }

    /// Lags are exactly `1..=max`.
    pub(crate) fn ar_contiguous(&self) -> bool {
        self.ar_lags.iter().enumerate().all(|(i, &l)| l == i + 1)
    }

    pub(crate) fn ma_contiguous(&self) -> bool {
        self.ma_lags.iter().enumerate().all(|(i, &l)| l == i + 1)
    }

    fn check_data(&self, n: usize) -> Result<()> {
        let k = self.ar_lags.len() + self.ma_lags.len() + 2;
        if n <= self.d || n - self.d <= k || n - self.d <= self.max_lag() {
            return Err(Error::Size(format!(
                "{self} needs more than {} observations, got {n}",
                self.d + k.max(self.max_lag())
            )));
        }
        Ok(())
    }
}

impl fmt::Display for ArimaSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lags = |v: &[usize]| {
            v.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(",")
        };
        write!(
            f,
            "ARIMA([{}],{},[{}]){}",
            lags(&self.ar_lags),
            self.d,
            lags(&self.ma_lags),
            if self.intercept { "+c" } else { "" }
        )
    }
}

/// Coefficients in the order of the spec's lag lists.
#[derive(Debug, Clone, PartialEq)]
pub struct ArimaParams {
    pub ar: Vec<f64>,
    pub ma: Vec<f64>,
    /// Mean of the differenced series; ignored without an intercept.
    pub mean: f64,
    pub sigma2: f64,
}

impl ArimaParams {
    pub fn new(ar: Vec<f64>, ma: Vec<f64>, mean: f64, sigma2: f64) -> Self {
        Self { ar, ma, mean, sigma2 }
    }

    fn check(&self, spec: &ArimaSpec) -> Result<()> {
        if self.ar.len() != spec.ar_lags.len() || self.ma.len() != spec.ma_lags.len() {
            return Err(Error::Domain(format!(
                "parameter lengths ({}, {}) do not match {spec}",
                self.ar.len(),
                self.ma.len()
            )));
        }
        if !(self.sigma2 >= 0.0) || !self.mean.is_finite() {
            return Err(Error::Domain("sigma2 must be >= 0 and mean finite".into()));
        }
        let (phi, theta) = dense_polys(spec, &self.ar, &self.ma);
        if !transform::is_stationary(&phi) {
            return Err(Error::Domain(format!("AR coefficients {:?} are not stationary", self.ar)));
        }
        if !transform::is_invertible(&theta) {
            return Err(Error::Domain(format!("MA coefficients {:?} are not invertible", self.ma)));
        }
        Ok(())
    }
}

/// Expand subset coefficients to dense lag polynomials.
pub(crate) fn dense_polys(spec: &ArimaSpec, ar: &[f64], ma: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let mut phi = vec![0.0; spec.max_ar()];
    for (&l, &c) in spec.ar_lags.iter().zip(ar) {
        phi[l - 1] = c;
    }
    let mut theta = vec![0.0; spec.max_ma()];
    for (&l, &c) in spec.ma_lags.iter().zip(ma) {
        theta[l - 1] = c;
    }
    (phi, theta)
}

/// `d`-th difference of `x`.
pub(crate) fn difference(x: &[f64], d: usize) -> Vec<f64> {
    let mut w = x.to_vec();
    for _ in 0..d {
        w = w.windows(2).map(|p| p[1] - p[0]).collect();
    }
    w
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArimaFit {
    pub spec: ArimaSpec,
    pub params: ArimaParams,
    pub loglik: f64,
    pub aic: f64,
    /// Standardized one-step innovations rescaled to data units, dated from
    /// `data.start + d`.
    pub residuals: Series,
    /// One-step-ahead predictions of the modeled variable.
    pub fitted: Series,
    pub converged: bool,
    /// The undifferenced series the model was estimated on.
    pub data: Series,
}

impl ArimaFit {
    /// Evaluate a model at fixed parameters on `data`.
    pub fn from_params(spec: &ArimaSpec, params: ArimaParams, data: &Series) -> Result<Self> {
        params.check(spec)?;
        spec.check_data(data.len())?;
        let out = run_filter(spec, &params, data.values());
        let loglik = if params.sigma2 > 0.0 {
            out.loglik(params.sigma2)
        } else {
            f64::INFINITY
        };
        build_fit(spec, params, loglik, &out, data, true)
    }

    pub fn ar_coeffs(&self) -> Vec<(usize, f64)> {
        self.spec.ar_lags.iter().copied().zip(self.params.ar.iter().copied()).collect()
    }

    pub fn ma_coeffs(&self) -> Vec<(usize, f64)> {
        self.spec.ma_lags.iter().copied().zip(self.params.ma.iter().copied()).collect()
    }

    pub fn intercept(&self) -> f64 {
        if self.spec.intercept {
            self.params.mean
        } else {
            0.0
        }
    }

    pub fn n_params(&self) -> usize {
        self.spec.n_params()
    }
}

pub(crate) fn run_filter(spec: &ArimaSpec, params: &ArimaParams, x: &[f64]) -> kalman::FilterOutput {
    let (phi, theta) = dense_polys(spec, &params.ar, &params.ma);
    let mu = if spec.intercept { params.mean } else { 0.0 };
    let w: Vec<f64> = difference(x, spec.d).into_iter().map(|v| v - mu).collect();
    kalman::filter(&kalman::StateSpace::new(&phi, &theta), &w)
}

pub(crate) fn build_fit(
    spec: &ArimaSpec,
    params: ArimaParams,
    loglik: f64,
    out: &kalman::FilterOutput,
    data: &Series,
    converged: bool,
) -> Result<ArimaFit> {
    let start = data.start().add(spec.d as i64);
    let resid: Vec<f64> = out
        .innovations
        .iter()
        .zip(&out.variances)
        .map(|(v, f)| v / f.sqrt())
        .collect();
    let fitted: Vec<f64> = data.values()[spec.d..]
        .iter()
        .zip(&out.innovations)
        .map(|(x, v)| x - v)
        .collect();
    let aic = -2.0 * loglik + 2.0 * spec.n_params() as f64;
    Ok(ArimaFit {
        spec: spec.clone(),
        params,
        loglik,
        aic,
        residuals: Series::new(format!("{}_resid", data.name()), start, resid)?,
        fitted: Series::new(format!("{}_fitted", data.name()), start, fitted)?,
        converged,
        data: data.clone(),
    })
}

/// Exact Gaussian log-likelihood of `data` under the given model.
pub fn loglik(spec: &ArimaSpec, params: &ArimaParams, data: &Series) -> Result<f64> {
    params.check(spec)?;
    if !(params.sigma2 > 0.0) {
        return Err(Error::Domain("sigma2 must be positive".into()));
    }
    spec.check_data(data.len())?;
    Ok(run_filter(spec, params, data.values()).loglik(params.sigma2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::QuarterDate;
    use std::f64::consts::PI;

    fn ser(v: Vec<f64>) -> Series {
        Series::new("y", QuarterDate::new(2000, 1).unwrap(), v).unwrap()
    }

    #[test]
    fn spec_validation() {
        assert!(ArimaSpec::new(0, &[0], &[], false).is_err());
        assert!(ArimaSpec::new(0, &[13], &[], false).is_err());
        let s = ArimaSpec::new(1, &[3, 1, 3], &[2], true).unwrap();
        assert_eq!(s.ar_lags(), &[1, 3]);
        assert_eq!(s.n_params(), 5);
        assert_eq!(s.to_string(), "ARIMA([1,3],1,[2])+c");
        assert!(!s.ar_contiguous());
        assert!(ArimaSpec::arima(2, 0, 1, false).unwrap().ar_contiguous());
    }

    #[test]
    fn iid_reduction() {
        let y = vec![0.3, 1.7, -0.4, 0.9, 1.1, 0.2];
        let spec = ArimaSpec::arima(0, 0, 0, true).unwrap();
        let p = ArimaParams::new(vec![], vec![], 0.5, 0.8);
        let ll = loglik(&spec, &p, &ser(y.clone())).unwrap();
        let direct: f64 = y
            .iter()
            .map(|v| -0.5 * (2.0 * PI * 0.8).ln() - (v - 0.5f64).powi(2) / 1.6)
            .sum();
        assert!((ll - direct).abs() < 1e-12);
    }

    #[test]
    fn ar1_closed_form() {
        let y = vec![0.3, 1.7, -0.4, 0.9, 1.1, 0.2, -0.8, 0.05];
        let (phi, s2) = (0.7, 1.3);
        let spec = ArimaSpec::arima(1, 0, 0, false).unwrap();
        let ll = loglik(&spec, &ArimaParams::new(vec![phi], vec![], 0.0, s2), &ser(y.clone())).unwrap();
        let v0 = s2 / (1.0 - phi * phi);
        let mut direct = -0.5 * (2.0 * PI * v0).ln() - y[0] * y[0] / (2.0 * v0);
        for t in 1..y.len() {
            let e = y[t] - phi * y[t - 1];
            direct += -0.5 * (2.0 * PI * s2).ln() - e * e / (2.0 * s2);
        }
        assert!((ll - direct).abs() < 1e-10, "{ll} vs {direct}");
    }

    #[test]
    fn rejects_inadmissible() {
        let spec = ArimaSpec::arima(1, 0, 0, false).unwrap();
        let e = loglik(&spec, &ArimaParams::new(vec![1.2], vec![], 0.0, 1.0), &ser(vec![0.0; 10]));
        assert!(matches!(e, Err(Error::Domain(_))));
    }

    #[test]
    fn aic_identity() {
        let spec = ArimaSpec::new(0, &[1], &[2], true).unwrap();
        let fit = ArimaFit::from_params(
            &spec,
            ArimaParams::new(vec![0.4], vec![0.3], 1.0, 0.5),
            &ser((0..20).map(|i| (i as f64 * 0.9).cos()).collect()),
        )
        .unwrap();
        assert_eq!(fit.aic, -2.0 * fit.loglik + 2.0 * 4.0);
        assert_eq!(fit.residuals.len(), 20);
    }
}
