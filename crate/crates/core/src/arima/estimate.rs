//! Maximum-likelihood estimation.
//!
//! The innovation variance is profiled out analytically; the remaining
//! parameters are optimized in an unconstrained space. Contiguous AR and MA
//! blocks go through the partial-autocorrelation transform, so every point
//! is admissible. Blocks with excluded intermediate lags cannot be mapped
//! that way and are optimized directly, with inadmissible points returning
//! an infinite objective.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::optim::{Bfgs, NelderMead};
use super::{build_fit, dense_polys, difference, kalman, transform, ArimaFit, ArimaParams, ArimaSpec};
use crate::error::{Error, Result};
use crate::linalg::{lstsq, Matrix};
use crate::series::Series;

#[derive(Debug, Clone, PartialEq)]
pub struct FitOptions {
    /// Number of simplex starts; the first is the Hannan-Rissanen point.
    pub restarts: usize,
    pub seed: u64,
    /// Standard deviation of the start jitter in unconstrained coordinates.
    pub jitter: f64,
    pub max_simplex_iter: usize,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            restarts: 5,
            seed: 0x5eed_a41a,
            jitter: 0.3,
            max_simplex_iter: 1500,
        }
    }
}

struct Layout<'a> {
    spec: &'a ArimaSpec,
    ar_transformed: bool,
    ma_transformed: bool,
    mean_center: f64,
    mean_scale: f64,
}

impl Layout<'_> {
    fn dim(&self) -> usize {
        self.spec.ar_lags().len() + self.spec.ma_lags().len() + usize::from(self.spec.intercept())
    }

    fn decode(&self, u: &[f64]) -> Option<(Vec<f64>, Vec<f64>, f64)> {
        let np = self.spec.ar_lags().len();
        let nq = self.spec.ma_lags().len();
        let ar = if self.ar_transformed {
            transform::unconstrained_to_ar(&u[..np])
        } else {
            u[..np].to_vec()
        };
        let ma = if self.ma_transformed {
            transform::unconstrained_to_ma(&u[np..np + nq])
        } else {
            u[np..np + nq].to_vec()
        };
        let mean = if self.spec.intercept() {
            self.mean_center + self.mean_scale * u[np + nq]
        } else {
            0.0
        };
        let (phi, theta) = dense_polys(self.spec, &ar, &ma);
        if !self.ar_transformed && !transform::is_stationary(&phi) {
            return None;
        }
        if !self.ma_transformed && !transform::is_invertible(&theta) {
            return None;
        }
        Some((ar, ma, mean))
    }

    fn encode(&self, ar: &[f64], ma: &[f64], mean: f64) -> Option<Vec<f64>> {
        let mut u = if self.ar_transformed {
            transform::ar_to_unconstrained(ar)?
        } else {
            ar.to_vec()
        };
        if self.ma_transformed {
            u.extend(transform::ma_to_unconstrained(ma)?);
        } else {
            u.extend_from_slice(ma);
        }
        if self.spec.intercept() {
            u.push((mean - self.mean_center) / self.mean_scale);
        }
        if u.iter().any(|v| !v.is_finite() || v.abs() > 4.0) {
            return None;
        }
        Some(u)
    }

    /// Negative profile log-likelihood per observation.
    fn objective(&self, w: &[f64], u: &[f64]) -> f64 {
        let Some((ar, ma, mean)) = self.decode(u) else {
            return f64::INFINITY;
        };
        let (phi, theta) = dense_polys(self.spec, &ar, &ma);
        let y: Vec<f64> = w.iter().map(|v| v - mean).collect();
        let out = kalman::filter(&kalman::StateSpace::new(&phi, &theta), &y);
        if !(out.sum_v2_over_f > 0.0) {
            return f64::INFINITY;
        }
        -out.profile_loglik() / w.len() as f64
    }
}

/// Hannan-Rissanen style starting values on the mean-adjusted series.
fn hannan_rissanen(spec: &ArimaSpec, z: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let np = spec.ar_lags().len();
    let nq = spec.ma_lags().len();
    let n = z.len();
    let zeros = (vec![0.0; np], vec![0.0; nq]);
    if np + nq == 0 {
        return zeros;
    }
    // innovations from a long autoregression
    let mut e = vec![0.0; n];
    let mut first = spec.max_ar();
    if nq > 0 {
        let m = (2 * spec.max_lag()).max(8).min(n / 3);
        if m == 0 || n <= 2 * m + 1 {
            return zeros;
        }
        let cols: Vec<Vec<f64>> = (1..=m).map(|i| (m..n).map(|t| z[t - i]).collect()).collect();
        let Ok(ls) = lstsq(&Matrix::from_columns(&cols), &z[m..]) else {
            return zeros;
        };
        for (t, r) in (m..n).zip(&ls.residuals) {
            e[t] = *r;
        }
        first = first.max(m + spec.max_ma());
    }
    if n <= first + np + nq + 1 {
        return zeros;
    }
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(np + nq);
    for &l in spec.ar_lags() {
        cols.push((first..n).map(|t| z[t - l]).collect());
    }
    for &l in spec.ma_lags() {
        cols.push((first..n).map(|t| e[t - l]).collect());
    }
    match lstsq(&Matrix::from_columns(&cols), &z[first..]) {
        Ok(ls) => (ls.coef[..np].to_vec(), ls.coef[np..].to_vec()),
        Err(_) => zeros,
    }
}

pub fn fit_mle(spec: &ArimaSpec, data: &Series) -> Result<ArimaFit> {
    fit_mle_with(spec, data, &FitOptions::default())
}

pub fn fit_mle_with(spec: &ArimaSpec, data: &Series, opts: &FitOptions) -> Result<ArimaFit> {
    spec.check_data(data.len())?;
    let w = difference(data.values(), spec.d());
    let n = w.len() as f64;
    let mean = w.iter().sum::<f64>() / n;
    let sd = (w.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
    let layout = Layout {
        spec,
        ar_transformed: spec.ar_contiguous(),
        ma_transformed: spec.ma_contiguous(),
        mean_center: if spec.intercept() { mean } else { 0.0 },
        mean_scale: if sd > 0.0 { sd } else { 1.0 },
    };
    let z: Vec<f64> = w.iter().map(|v| v - layout.mean_center).collect();
    let (mut ar0, mut ma0) = hannan_rissanen(spec, &z);
    let mut u0 = None;
    for _ in 0..80 {
        if let Some(u) = layout.encode(&ar0, &ma0, layout.mean_center) {
            if layout.decode(&u).is_some() {
                u0 = Some(u);
                break;
            }
        }
        ar0.iter_mut().chain(ma0.iter_mut()).for_each(|c| *c *= 0.9);
    }
    let u0 = u0.unwrap_or_else(|| vec![0.0; layout.dim()]);
    let f = |u: &[f64]| layout.objective(&w, u);

    let dim = layout.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let normal = Normal::new(0.0, opts.jitter.max(1e-12)).expect("valid jitter");
    let nm = NelderMead {
        max_iter: opts.max_simplex_iter,
        ..NelderMead::default()
    };
    let mut best: Option<super::optim::Minimum> = None;
    for r in 0..opts.restarts.max(1) {
        let start = if r == 0 || dim == 0 {
            u0.clone()
        } else {
            let mut cand = u0.clone();
            for shrink in 0..10 {
                let scale = 0.5f64.powi(shrink);
                let trial: Vec<f64> = u0.iter().map(|v| v + scale * normal.sample(&mut rng)).collect();
                if f(&trial).is_finite() {
                    cand = trial;
                    break;
                }
            }
            cand
        };
        let m = nm.minimize(f, &start);
        if best.as_ref().is_none_or(|b| m.value < b.value) {
            best = Some(m);
        }
        if dim == 0 {
            break;
        }
    }
    let best = best.expect("at least one start");
    let refined = Bfgs::default().minimize(f, &best.x);
    let (x, converged) = if refined.value <= best.value {
        (refined.x, refined.converged)
    } else {
        (best.x.clone(), best.converged)
    };
    let value = f(&x);
    if !value.is_finite() {
        return Err(Error::Estimation {
            message: format!("no admissible optimum found for {spec}"),
            best: Some(x),
        });
    }
    let (ar, ma, mean) = layout.decode(&x).expect("finite objective implies admissible");
    let mut params = ArimaParams::new(ar, ma, mean, 0.0);
    let out = super::run_filter(spec, &params, data.values());
    params.sigma2 = out.sigma2_hat();
    let loglik = out.profile_loglik();
    build_fit(spec, params, loglik, &out, data, converged)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arima::simulate;

    #[test]
    fn white_noise_closed_form() {
        let spec = ArimaSpec::arima(0, 0, 0, true).unwrap();
        let data = simulate(&spec, &ArimaParams::new(vec![], vec![], 2.0, 0.25), 300, 11).unwrap();
        let fit = fit_mle(&spec, &data).unwrap();
        let x = data.values();
        let m = x.iter().sum::<f64>() / x.len() as f64;
        let v = x.iter().map(|a| (a - m).powi(2)).sum::<f64>() / x.len() as f64;
        assert!((fit.params.mean - m).abs() < 1e-6 * v.sqrt(), "{} vs {m}", fit.params.mean);
        assert!((fit.params.sigma2 - v).abs() < 1e-8 * v);
        assert_eq!(fit.aic, -2.0 * fit.loglik + 4.0);
    }

    #[test]
    fn ma1_recovery() {
        let spec = ArimaSpec::arima(0, 0, 1, false).unwrap();
        let data = simulate(&spec, &ArimaParams::new(vec![], vec![0.5], 0.0, 1.0), 2000, 3).unwrap();
        let fit = fit_mle(&spec, &data).unwrap();
        assert!(fit.converged);
        assert!((0.4..=0.6).contains(&fit.params.ma[0]), "{:?}", fit.params);
    }

    #[test]
    fn subset_spec_estimates() {
        let spec = ArimaSpec::new(0, &[1, 3], &[], true).unwrap();
        let truth = ArimaParams::new(vec![0.5, -0.3], vec![], 1.0, 1.0);
        let data = simulate(&spec, &truth, 1500, 8).unwrap();
        let fit = fit_mle(&spec, &data).unwrap();
        assert!((fit.params.ar[0] - 0.5).abs() < 0.08);
        assert!((fit.params.ar[1] + 0.3).abs() < 0.08);
        assert!((fit.params.mean - 1.0).abs() < 0.15);
    }

    #[test]
    fn too_short_data() {
        let spec = ArimaSpec::arima(2, 0, 2, true).unwrap();
        let data = Series::new("x", crate::QuarterDate::new(2000, 1).unwrap(), vec![1.0, 2.0, 0.5, 0.3, 1.0, 2.0]).unwrap();
        assert!(matches!(fit_mle(&spec, &data), Err(Error::Size(_))));
    }
}
