use super::correlogram::acf_values;
use super::TestResult;
use crate::dist::chi2_sf;
use crate::error::{Error, Result};
use crate::linalg::{independent_columns, lstsq, Matrix};
use crate::series::{Frame, Series};

/// Ljung-Box portmanteau test on the first `lags` autocorrelations, with
/// `lags - fitted_params` degrees of freedom.
pub fn ljung_box(residuals: &Series, lags: usize, fitted_params: usize) -> Result<TestResult> {
    let n = residuals.len();
    if lags <= fitted_params {
        return Err(Error::Dof(format!(
            "ljung_box lags ({lags}) must exceed fitted parameters ({fitted_params})"
        )));
    }
    if lags >= n {
        return Err(Error::Size(format!("ljung_box lags {lags} must be below n = {n}")));
    }
    let r = acf_values(residuals.values(), lags)?;
    Ok(ljung_box_from_acf(&r[1..], n, fitted_params))
}

/// `Q = n (n + 2) sum_k r_k^2 / (n - k)` for `r = [r_1, .., r_L]`.
pub fn ljung_box_from_acf(r: &[f64], n: usize, fitted_params: usize) -> TestResult {
    let nf = n as f64;
    let q: f64 = nf
        * (nf + 2.0)
        * r.iter()
            .enumerate()
            .map(|(i, rk)| rk * rk / (nf - (i + 1) as f64))
            .sum::<f64>();
    let dof = r.len() - fitted_params;
    TestResult::from_p(q, chi2_sf(q, dof as f64), dof)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WhiteOptions {
    pub cross_products: bool,
}

impl Default for WhiteOptions {
    fn default() -> Self {
        Self {
            cross_products: true,
        }
    }
}

/// White's test: `LM = n R^2` from regressing squared residuals on a
/// constant, the regressors, their squares and (optionally) pairwise
/// products. Redundant auxiliary columns are dropped and listed in the note.
pub fn white_test(residuals: &Series, regressors: &Frame, opts: WhiteOptions) -> Result<TestResult> {
    let n = residuals.len();
    let mut cols: Vec<Vec<f64>> = Vec::new();
    let mut names: Vec<String> = Vec::new();
    let mut base: Vec<(String, Vec<f64>)> = Vec::new();
    for c in regressors.columns() {
        let v: Vec<f64> = residuals
            .dates()
            .map(|d| c.get(d))
            .collect::<Option<_>>()
            .ok_or_else(|| {
                Error::Range(format!(
                    "regressor `{}` ({}..{}) does not cover residual span {}..{}",
                    c.name(),
                    c.start(),
                    c.end(),
                    residuals.start(),
                    residuals.end()
                ))
            })?;
        base.push((c.name().to_string(), v));
    }
    cols.push(vec![1.0; n]);
    names.push("const".into());
    for (name, v) in &base {
        cols.push(v.clone());
        names.push(name.clone());
    }
    for (name, v) in &base {
        cols.push(v.iter().map(|x| x * x).collect());
        names.push(format!("{name}^2"));
    }
    if opts.cross_products {
        for i in 0..base.len() {
            for j in (i + 1)..base.len() {
                cols.push(base[i].1.iter().zip(&base[j].1).map(|(a, b)| a * b).collect());
                names.push(format!("{}*{}", base[i].0, base[j].0));
            }
        }
    }
    let x = Matrix::from_columns(&cols);
    let keep = independent_columns(&x);
    let dropped: Vec<&str> = (0..names.len())
        .filter(|j| !keep.contains(j))
        .map(|j| names[j].as_str())
        .collect();
    if n <= keep.len() {
        return Err(Error::Size(format!(
            "white auxiliary regression has {} terms but only {n} observations",
            keep.len()
        )));
    }
    let y: Vec<f64> = residuals.values().iter().map(|e| e * e).collect();
    let mean = y.iter().sum::<f64>() / n as f64;
    let tss: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    let dof = keep.len() - 1;
    let lm = if tss <= f64::EPSILON * mean * mean * n as f64 || dof == 0 {
        0.0
    } else {
        let ls = lstsq(&x.select_columns(&keep), &y).map_err(|_| Error::Rank {
            columns: dropped.iter().map(|s| s.to_string()).collect(),
        })?;
        let r2 = (1.0 - ls.rss / tss).max(0.0);
        n as f64 * r2
    };
    let p = if dof == 0 { 1.0 } else { chi2_sf(lm, dof as f64) };
    let mut res = TestResult::from_p(lm, p, dof);
    if !dropped.is_empty() {
        res.note = Some(format!("dropped redundant auxiliary terms: {}", dropped.join(", ")));
    }
    Ok(res)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{align, QuarterDate};

    fn ser(name: &str, v: Vec<f64>) -> Series {
        Series::new(name, QuarterDate::new(2000, 1).unwrap(), v).unwrap()
    }

    #[test]
    fn q_zero_when_acf_zero() {
        let r = ljung_box_from_acf(&[0.0; 5], 60, 0);
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.p_value, 1.0);
        assert_eq!(r.dof, 5);
    }

    #[test]
    fn q_single_lag() {
        let r = ljung_box_from_acf(&[0.3], 100, 0);
        let q = 100.0 * 102.0 * 0.09 / 99.0;
        assert!((r.statistic - q).abs() < 1e-12);
        assert!((r.statistic - 9.2727).abs() < 1e-4);
        // chi2(1) tail at 9.2727
        assert!((r.p_value - 0.002326).abs() < 2e-5, "{}", r.p_value);
        assert!(r.reject);
    }

    #[test]
    fn lb_dof_error() {
        let e = ser("e", (0..30).map(|i| (i as f64).sin()).collect());
        assert!(matches!(ljung_box(&e, 2, 2), Err(Error::Dof(_))));
        assert!(matches!(ljung_box(&e, 30, 0), Err(Error::Size(_))));
        assert_eq!(ljung_box(&e, 5, 2).unwrap().dof, 3);
    }

    #[test]
    fn white_constant_magnitude() {
        let e = ser("e", (0..20).map(|i| if i % 3 == 0 { 1.0 } else { -1.0 }).collect());
        let x = ser("x", (0..20).map(|i| i as f64 * 0.3).collect());
        let z = ser("z", (0..20).map(|i| ((i * i) % 7) as f64).collect());
        let f = align(vec![x, z]).unwrap();
        let r = white_test(&e, &f, WhiteOptions::default()).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.p_value, 1.0);
        assert_eq!(r.dof, 5);
    }

    #[test]
    fn white_drops_redundant() {
        // a dummy regressor equals its own square
        let e = ser("e", (0..30).map(|i| ((i * 13) % 11) as f64 - 5.0).collect());
        let d = ser("d", (0..30).map(|i| (i % 2) as f64).collect());
        let f = align(vec![d]).unwrap();
        let r = white_test(&e, &f, WhiteOptions::default()).unwrap();
        assert_eq!(r.dof, 1);
        assert!(r.note.unwrap().contains("d^2"));
    }
}
