use super::{difference, kalman, run_filter, ArimaFit};
use crate::series::QuarterDate;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForecastPoint {
    pub date: QuarterDate,
    pub mean: f64,
    pub std_error: f64,
}

/// `h`-step forecasts of the modeled variable (in levels when `d > 0`)
/// conditional on the full estimation sample.
pub fn forecast(fit: &ArimaFit, h: usize) -> Vec<ForecastPoint> {
    if h == 0 {
        return Vec::new();
    }
    let spec = &fit.spec;
    let (phi, theta) = super::dense_polys(spec, &fit.params.ar, &fit.params.ma);
    let ss = kalman::StateSpace::new(&phi, &theta);
    let out = run_filter(spec, &fit.params, fit.data.values());
    let (dm, dcov) = kalman::forecast(&ss, &out, h);
    let mu = fit.intercept();
    let mut means: Vec<f64> = dm.iter().map(|m| m + mu).collect();
    let mut cov: Vec<f64> = dcov.iter().map(|c| c * fit.params.sigma2).collect();

    // Undifference level by level: last observed value of each lower
    // differencing order seeds a cumulative sum.
    let x = fit.data.values();
    for level in (0..spec.d()).rev() {
        let last = *difference(x, level).last().expect("nonempty");
        let mut acc = last;
        for m in means.iter_mut() {
            acc += *m;
            *m = acc;
        }
        // cov <- S cov S' with S lower-triangular ones
        let mut partial = vec![0.0; h * h];
        for j in 0..h {
            let mut run = 0.0;
            for i in 0..h {
                run += cov[i * h + j];
                partial[i * h + j] = run;
            }
        }
        for i in 0..h {
            let mut run = 0.0;
            for j in 0..h {
                run += partial[i * h + j];
                cov[i * h + j] = run;
            }
        }
    }
    let end = fit.data.end();
    (0..h)
        .map(|i| ForecastPoint {
            date: end.add(i as i64 + 1),
            mean: means[i],
            std_error: cov[i * h + i].max(0.0).sqrt(),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arima::{ArimaParams, ArimaSpec};
    use crate::series::Series;

    fn ser(v: Vec<f64>) -> Series {
        Series::new("y", QuarterDate::new(2010, 1).unwrap(), v).unwrap()
    }

    #[test]
    fn ma_memory_bound() {
        let spec = ArimaSpec::arima(0, 0, 2, true).unwrap();
        let fit = ArimaFit::from_params(
            &spec,
            ArimaParams::new(vec![], vec![0.4, 0.2], 0.7, 0.3),
            &ser((0..30).map(|i| (i as f64).sin()).collect()),
        )
        .unwrap();
        let f = forecast(&fit, 6);
        for p in &f[2..] {
            assert_eq!(p.mean, 0.7);
        }
        assert_eq!(f[0].date.to_string(), "2017Q3");
        for w in f.windows(2) {
            assert!(w[1].std_error >= w[0].std_error - 1e-15);
        }
    }

    #[test]
    fn ar1_hand_recursion() {
        let spec = ArimaSpec::arima(1, 0, 0, true).unwrap();
        let y: Vec<f64> = (0..25).map(|i| 2.0 + (i as f64 * 1.3).cos()).collect();
        let last = *y.last().unwrap();
        let (mu, phi) = (2.1, 0.6);
        let fit = ArimaFit::from_params(&spec, ArimaParams::new(vec![phi], vec![], mu, 0.5), &ser(y)).unwrap();
        let f = forecast(&fit, 5);
        for (h, p) in f.iter().enumerate() {
            let want = mu + phi.powi(h as i32 + 1) * (last - mu);
            assert!((p.mean - want).abs() < 1e-12);
            let var: f64 = (0..=h).map(|j| phi.powi(2 * j as i32)).sum::<f64>() * 0.5;
            assert!((p.std_error - var.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn integrated_matches_cumulated_differences() {
        // dyadic values keep cumsum and differencing exact
        let w: Vec<f64> = (0..40).map(|i| ((i * 37 % 23) as f64 - 11.0) / 8.0).collect();
        let mut x = Vec::new();
        let mut acc = 0.0;
        for v in &w {
            acc += v;
            x.push(acc);
        }
        let params = ArimaParams::new(vec![0.5], vec![0.3], 0.25, 1.0);
        let f1 = ArimaFit::from_params(&ArimaSpec::arima(1, 1, 1, true).unwrap(), params.clone(), &ser(x.clone())).unwrap();
        let f0 = ArimaFit::from_params(
            &ArimaSpec::arima(1, 0, 1, true).unwrap(),
            params,
            &Series::new("w", QuarterDate::new(2010, 2).unwrap(), w[1..].to_vec()).unwrap(),
        )
        .unwrap();
        let a = forecast(&f1, 8);
        let b = forecast(&f0, 8);
        let mut level = *x.last().unwrap();
        let mut var = 0.0;
        for (i, (p1, p0)) in a.iter().zip(&b).enumerate() {
            level += p0.mean;
            assert!((p1.mean - level).abs() < 1e-10);
            assert_eq!(p1.date, p0.date);
            // variance of a cumulated error is at least the previous one
            assert!(p1.std_error * p1.std_error >= var - 1e-12, "step {i}");
            var = p1.std_error * p1.std_error;
        }
    }
}
