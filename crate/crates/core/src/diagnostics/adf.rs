//! Augmented Dickey-Fuller test with MacKinnon critical values and
//! approximate p-values (single-series case).

use super::TestResult;
use crate::dist::normal_cdf;
use crate::error::{Error, Result};
use crate::linalg::{lstsq, Matrix};
use crate::series::Series;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Deterministic {
    /// Constant only.
    Drift,
    /// Constant and linear trend.
    Trend,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InfoCriterion {
    Aic,
    Bic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LagRule {
    Fixed(usize),
    /// Search `0..=max_lag` augmentation lags on a common sample.
    Auto { max_lag: usize, criterion: InfoCriterion },
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdfResult {
    /// `statistic` is the tau statistic; `reject` compares it with the 5%
    /// critical value.
    pub test: TestResult,
    pub lags: usize,
    pub nobs: usize,
    /// 1%, 5% and 10% critical values at `nobs`.
    pub critical_values: [f64; 3],
    pub deterministic: Deterministic,
}

// Response surfaces for N = 1: tau_crit(T) = b0 + b1/T + b2/T^2 + b3/T^3.
const CRIT_C: [[f64; 4]; 3] = [
    [-3.43035, -6.5393, -16.786, -79.433],
    [-2.86154, -2.8903, -4.234, -40.040],
    [-2.56677, -1.5384, -2.809, 0.0],
];
const CRIT_CT: [[f64; 4]; 3] = [
    [-3.95877, -9.0531, -28.428, -134.155],
    [-3.41049, -4.3904, -9.036, -45.374],
    [-3.12705, -2.5856, -3.925, -22.380],
];

// Asymptotic p-value surfaces, p = Phi(sum c_i tau^i).
struct PSurface {
    max: f64,
    min: f64,
    star: f64,
    small: [f64; 3],
    large: [f64; 4],
}

const P_C: PSurface = PSurface {
    max: 2.74,
    min: -18.83,
    star: -1.61,
    small: [2.1659, 1.4412, 3.8269e-2],
    large: [1.7339, 9.3202e-1, -1.2745e-1, -1.0368e-2],
};
const P_CT: PSurface = PSurface {
    max: 0.7,
    min: -16.18,
    star: -2.89,
    small: [3.2512, 1.6047, 4.9588e-2],
    large: [2.5261, 6.1654e-1, -3.7956e-1, -6.0285e-2],
};

fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ci| acc * x + ci)
}

pub fn mackinnon_critical_values(det: Deterministic, nobs: usize) -> [f64; 3] {
    let table = match det {
        Deterministic::Drift => &CRIT_C,
        Deterministic::Trend => &CRIT_CT,
    };
    let inv = 1.0 / nobs as f64;
    table.map(|b| horner(&b, inv))
}

pub fn mackinnon_p_value(det: Deterministic, tau: f64) -> f64 {
    let s = match det {
        Deterministic::Drift => &P_C,
        Deterministic::Trend => &P_CT,
    };
    if tau > s.max {
        1.0
    } else if tau < s.min {
        0.0
    } else if tau <= s.star {
        normal_cdf(horner(&s.small, tau))
    } else {
        normal_cdf(horner(&s.large, tau))
    }
}

struct AdfRegression {
    tau: f64,
    nobs: usize,
    /// Gaussian -2 log-likelihood at the MLE variance.
    neg2ll: f64,
    ncoef: usize,
}

/// Regress `dx_t` on deterministics, `x_{t-1}` and `lags` lagged
/// differences, using rows `t >= first` (indices into `x`).
fn adf_regression(x: &[f64], det: Deterministic, lags: usize, first: usize) -> Result<AdfRegression> {
    let n = x.len();
    let rows: Vec<usize> = (first..n).collect();
    let dx = |t: usize| x[t] - x[t - 1];
    let mut cols: Vec<Vec<f64>> = vec![vec![1.0; rows.len()]];
    if det == Deterministic::Trend {
        cols.push(rows.iter().map(|&t| t as f64).collect());
    }
    let level_col = cols.len();
    cols.push(rows.iter().map(|&t| x[t - 1]).collect());
    for i in 1..=lags {
        cols.push(rows.iter().map(|&t| dx(t - i)).collect());
    }
    let y: Vec<f64> = rows.iter().map(|&t| dx(t)).collect();
    let m = Matrix::from_columns(&cols);
    let ls = lstsq(&m, &y).map_err(|_| Error::Degenerate("ADF regression is rank deficient".into()))?;
    let nobs = rows.len();
    let k = cols.len();
    if nobs <= k {
        return Err(Error::Size(format!("ADF regression has {nobs} rows for {k} coefficients")));
    }
    let s2 = ls.rss / (nobs - k) as f64;
    let se = (s2 * ls.xtx_inv[level_col * k + level_col]).sqrt();
    let nf = nobs as f64;
    let neg2ll = nf * ((2.0 * std::f64::consts::PI).ln() + (ls.rss / nf).ln() + 1.0);
    Ok(AdfRegression {
        tau: ls.coef[level_col] / se,
        nobs,
        neg2ll,
        ncoef: k,
    })
}

/// Augmented Dickey-Fuller test of a unit root in `s`.
pub fn adf_test(s: &Series, det: Deterministic, rule: LagRule) -> Result<AdfResult> {
    let x = s.values();
    let n = x.len();
    let bound = match rule {
        LagRule::Fixed(k) => k,
        LagRule::Auto { max_lag, .. } => max_lag,
    };
    if n <= 4 * (bound + 3) {
        return Err(Error::Size(format!(
            "ADF on `{}` needs more than {} observations with {bound} lags, got {n}",
            s.name(),
            4 * (bound + 3)
        )));
    }
    let lags = match rule {
        LagRule::Fixed(k) => k,
        LagRule::Auto { max_lag, criterion } => {
            let mut best = (f64::INFINITY, 0);
            for k in 0..=max_lag {
                let r = adf_regression(x, det, k, max_lag + 1)?;
                let penalty = match criterion {
                    InfoCriterion::Aic => 2.0,
                    InfoCriterion::Bic => (r.nobs as f64).ln(),
                };
                let ic = r.neg2ll + penalty * r.ncoef as f64;
                if ic < best.0 {
                    best = (ic, k);
                }
            }
            best.1
        }
    };
    let reg = adf_regression(x, det, lags, lags + 1)?;
    let cv = mackinnon_critical_values(det, reg.nobs);
    let p = mackinnon_p_value(det, reg.tau);
    let test = TestResult {
        statistic: reg.tau,
        p_value: p,
        dof: reg.nobs,
        reject: reg.tau < cv[1],
        note: None,
    };
    Ok(AdfResult {
        test,
        lags,
        nobs: reg.nobs,
        critical_values: cv,
        deterministic: det,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::QuarterDate;

    #[test]
    fn asymptotic_five_percent_maps_to_p_five_percent() {
        let cv = mackinnon_critical_values(Deterministic::Drift, 1_000_000);
        assert!((cv[1] + 2.86154).abs() < 1e-4);
        assert!((mackinnon_p_value(Deterministic::Drift, cv[1]) - 0.05).abs() < 2e-3);
        let cv = mackinnon_critical_values(Deterministic::Trend, 1_000_000);
        assert!((mackinnon_p_value(Deterministic::Trend, cv[1]) - 0.05).abs() < 2e-3);
        assert_eq!(mackinnon_p_value(Deterministic::Drift, 5.0), 1.0);
        assert_eq!(mackinnon_p_value(Deterministic::Drift, -30.0), 0.0);
    }

    #[test]
    fn p_value_monotone() {
        for det in [Deterministic::Drift, Deterministic::Trend] {
            let mut prev = 0.0;
            let mut t = -15.0;
            while t < 0.6 {
                let p = mackinnon_p_value(det, t);
                assert!(p + 1e-12 >= prev, "{det:?} at {t}");
                prev = p;
                t += 0.01;
            }
        }
    }

    #[test]
    fn fixed_lag_used_exactly() {
        let x: Vec<f64> = (0..80).map(|i| ((i * 37) % 17) as f64 * 0.1 + (i as f64 * 0.7).sin()).collect();
        let s = Series::new("x", QuarterDate::new(1990, 1).unwrap(), x).unwrap();
        let r = adf_test(&s, Deterministic::Drift, LagRule::Fixed(4)).unwrap();
        assert_eq!(r.lags, 4);
        assert_eq!(r.nobs, 80 - 5);
        let r = adf_test(
            &s,
            Deterministic::Trend,
            LagRule::Auto { max_lag: 4, criterion: InfoCriterion::Aic },
        )
        .unwrap();
        assert!(r.lags <= 4);
    }

    #[test]
    fn too_short() {
        let s = Series::new("x", QuarterDate::new(1990, 1).unwrap(), (0..28).map(f64::from).collect()).unwrap();
        assert!(matches!(
            adf_test(&s, Deterministic::Drift, LagRule::Fixed(4)),
            Err(Error::Size(_))
        ));
    }
}
