use crate::error::{Error, Result};
use crate::series::Series;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelogramPoint {
    pub lag: usize,
    pub value: f64,
    /// Half-width of the approximate 95% band, `1.96 / sqrt(n)`.
    pub conf_bound: f64,
}

impl CorrelogramPoint {
    pub fn significant(&self) -> bool {
        self.value.abs() > self.conf_bound
    }
}

/// Sample autocorrelations `r_0..=r_max_lag` with the biased (1/n)
/// autocovariance convention.
pub fn acf_values(x: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    let n = x.len();
    if max_lag >= n {
        return Err(Error::Size(format!(
            "max_lag {max_lag} must be below series length {n}"
        )));
    }
    let mean = x.iter().sum::<f64>() / n as f64;
    let dev: Vec<f64> = x.iter().map(|v| v - mean).collect();
    let c0: f64 = dev.iter().map(|d| d * d).sum();
    let scale = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if c0 <= (f64::EPSILON * scale).powi(2) * n as f64 {
        return Err(Error::Degenerate("series has zero variance".into()));
    }
    Ok((0..=max_lag)
        .map(|k| {
            if k == 0 {
                1.0
            } else {
                dev[..n - k].iter().zip(&dev[k..]).map(|(a, b)| a * b).sum::<f64>() / c0
            }
        })
        .collect())
}

fn band(n: usize) -> f64 {
    1.96 / (n as f64).sqrt()
}

/// Autocorrelation function for lags `0..=max_lag`.
pub fn acf(s: &Series, max_lag: usize) -> Result<Vec<CorrelogramPoint>> {
    let r = acf_values(s.values(), max_lag)?;
    let b = band(s.len());
    Ok(r.into_iter()
        .enumerate()
        .map(|(lag, value)| CorrelogramPoint {
            lag,
            value,
            conf_bound: b,
        })
        .collect())
}

/// Durbin-Levinson recursion. `r[0]` must be 1; returns `phi_kk` for
/// `k = 1..r.len()`.
pub fn durbin_levinson(r: &[f64]) -> Vec<f64> {
    let m = r.len() - 1;
    let mut out = Vec::with_capacity(m);
    let mut phi: Vec<f64> = Vec::with_capacity(m);
    let mut v = 1.0;
    for k in 1..=m {
        let num = r[k] - (1..k).map(|j| phi[j - 1] * r[k - j]).sum::<f64>();
        let kk = num / v;
        let prev = phi.clone();
        for j in 1..k {
            phi[j - 1] = prev[j - 1] - kk * prev[k - j - 1];
        }
        phi.push(kk);
        v *= 1.0 - kk * kk;
        out.push(kk);
    }
    out
}

/// Partial autocorrelations for lags `1..=max_lag`; requires
/// `2 * max_lag < n`.
pub fn pacf(s: &Series, max_lag: usize) -> Result<Vec<CorrelogramPoint>> {
    let n = s.len();
    if max_lag == 0 || 2 * max_lag >= n {
        return Err(Error::Size(format!(
            "pacf max_lag {max_lag} must satisfy 1 <= max_lag < n/2 (n = {n})"
        )));
    }
    let r = acf_values(s.values(), max_lag)?;
    let b = band(n);
    Ok(durbin_levinson(&r)
        .into_iter()
        .enumerate()
        .map(|(i, value)| CorrelogramPoint {
            lag: i + 1,
            value,
            conf_bound: b,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::QuarterDate;

    fn ser(v: Vec<f64>) -> Series {
        Series::new("x", QuarterDate::new(2000, 1).unwrap(), v).unwrap()
    }

    #[test]
    fn lag_zero_is_one() {
        let a = acf(&ser(vec![0.3, 1.2, -0.4, 2.0, 0.1]), 3).unwrap();
        assert_eq!(a[0].value, 1.0);
        assert_eq!(a.len(), 4);
    }

    #[test]
    fn alternating() {
        let x: Vec<f64> = (0..8).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let a = acf(&ser(x), 1).unwrap();
        assert!((a[1].value + 0.875).abs() < 1e-15);
        assert!((a[1].conf_bound - 1.96 / 8f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn constant_is_degenerate() {
        assert!(matches!(acf(&ser(vec![2.0; 10]), 2), Err(Error::Degenerate(_))));
        assert!(matches!(pacf(&ser(vec![2.0; 10]), 2), Err(Error::Degenerate(_))));
    }

    #[test]
    fn pacf_base_case_and_bounds() {
        let s = ser(vec![0.5, -1.0, 2.0, 0.3, 0.7, -0.2, 1.1, 0.0]);
        let a = acf(&s, 1).unwrap();
        let p = pacf(&s, 3).unwrap();
        assert!((p[0].value - a[1].value).abs() < 1e-15);
        assert!(pacf(&s, 4).is_err());
    }
}
