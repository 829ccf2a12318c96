use std::f64::consts::PI;

use super::TestResult;
use crate::dist::{chi2_sf, normal_quantile, normal_sf};
use crate::error::{Error, Result};
use crate::series::Series;

/// Central moments `(m2, m3, m4)` with 1/n normalization.
fn central_moments(x: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for v in x {
        let d = v - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    (m2 / n, m3 / n, m4 / n)
}

fn is_degenerate(x: &[f64], m2: f64) -> bool {
    let scale = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    m2 <= (f64::EPSILON * scale).powi(2)
}

/// Jarque-Bera: `JB = n/6 (S^2 + (K - 3)^2 / 4)`, chi-square(2) tail.
pub fn jarque_bera(residuals: &Series) -> Result<TestResult> {
    let x = residuals.values();
    let n = x.len();
    if n < 8 {
        return Err(Error::Size(format!("jarque_bera needs n >= 8, got {n}")));
    }
    let (m2, m3, m4) = central_moments(x);
    if is_degenerate(x, m2) {
        return Err(Error::Degenerate("residuals have zero variance".into()));
    }
    let skew = m3 / m2.powf(1.5);
    let kurt = m4 / (m2 * m2);
    let jb = n as f64 / 6.0 * (skew * skew + (kurt - 3.0).powi(2) / 4.0);
    Ok(TestResult::from_p(jb, chi2_sf(jb, 2.0), 2))
}

/// Evaluate `c[0] + c[1] x + c[2] x^2 + ...`.
fn poly(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ci| acc * x + ci)
}

/// Shapiro-Wilk W with Royston's AS R94 coefficients and p-value
/// approximation, valid for `3 <= n <= 5000`.
pub fn shapiro_wilk(residuals: &Series) -> Result<TestResult> {
    const C1: [f64; 6] = [0.0, 0.221157, -0.147981, -2.071190, 4.434685, -2.706056];
    const C2: [f64; 6] = [0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633];
    const C3: [f64; 4] = [0.5440, -0.39978, 0.025054, -6.714e-4];
    const C4: [f64; 4] = [1.3822, -0.77857, 0.062767, -0.0020322];
    const C5: [f64; 4] = [-1.5861, -0.31082, -0.083751, 0.0038915];
    const C6: [f64; 3] = [-0.4803, -0.082676, 0.0030302];
    const G: [f64; 2] = [-2.273, 0.459];

    let n = residuals.len();
    if !(3..=5000).contains(&n) {
        return Err(Error::Size(format!("shapiro_wilk needs 3 <= n <= 5000, got {n}")));
    }
    let mut x = residuals.values().to_vec();
    x.sort_by(|a, b| a.total_cmp(b));
    let (m2, _, _) = central_moments(&x);
    if is_degenerate(&x, m2) {
        return Err(Error::Degenerate("residuals have zero variance".into()));
    }
    let nf = n as f64;
    let half = n / 2;

    // Coefficients for the upper half, a[0] pairs with the extreme order
    // statistics. Antisymmetry gives the lower half.
    let mut a = vec![0.0; half];
    if n == 3 {
        a[0] = 0.5f64.sqrt();
    } else {
        let m: Vec<f64> = (1..=half)
            .map(|i| normal_quantile((i as f64 - 0.375) / (nf + 0.25)))
            .collect();
        let summ2 = 2.0 * m.iter().map(|v| v * v).sum::<f64>();
        let ssumm2 = summ2.sqrt();
        let rsn = 1.0 / nf.sqrt();
        let a1 = poly(&C1, rsn) - m[0] / ssumm2;
        let (first, fac) = if n > 5 {
            let a2 = -m[1] / ssumm2 + poly(&C2, rsn);
            let fac = ((summ2 - 2.0 * m[0] * m[0] - 2.0 * m[1] * m[1])
                / (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2))
                .sqrt();
            a[1] = a2;
            (2, fac)
        } else {
            let fac = ((summ2 - 2.0 * m[0] * m[0]) / (1.0 - 2.0 * a1 * a1)).sqrt();
            (1, fac)
        };
        a[0] = a1;
        for i in first..half {
            a[i] = -m[i] / fac;
        }
    }

    let mean = x.iter().sum::<f64>() / nf;
    let ss: f64 = x.iter().map(|v| (v - mean).powi(2)).sum();
    let b: f64 = (0..half).map(|i| a[i] * (x[n - 1 - i] - x[i])).sum();
    let w = (b * b / ss).min(1.0);

    let p = if n == 3 {
        // exact: 6/pi (asin(sqrt(W)) - asin(sqrt(3/4)))
        (6.0 / PI * (w.sqrt().asin() - (0.75f64).sqrt().asin())).clamp(0.0, 1.0)
    } else {
        let w1 = (1.0 - w).max(0.0);
        let y = w1.ln();
        if !y.is_finite() {
            1.0
        } else if n <= 11 {
            let gamma = poly(&G, nf);
            if y >= gamma {
                1e-99
            } else {
                let y = -(gamma - y).ln();
                let mu = poly(&C3, nf);
                let sd = poly(&C4, nf).exp();
                normal_sf((y - mu) / sd)
            }
        } else {
            let ln_n = nf.ln();
            let mu = poly(&C5, ln_n);
            let sd = poly(&C6, ln_n).exp();
            normal_sf((y - mu) / sd)
        }
    };
    Ok(TestResult::from_p(w, p.clamp(0.0, 1.0), n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::QuarterDate;

    fn ser(v: Vec<f64>) -> Series {
        Series::new("e", QuarterDate::new(2000, 1).unwrap(), v).unwrap()
    }

    #[test]
    fn jb_alternating() {
        let x: Vec<f64> = (0..12).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let r = jarque_bera(&ser(x)).unwrap();
        assert!((r.statistic - 2.0).abs() < 1e-12);
        assert!((r.p_value - (-1.0f64).exp()).abs() < 1e-9);
        assert!(!r.reject);
    }

    #[test]
    fn jb_outlier() {
        let mut x: Vec<f64> = (0..40).map(|i| ((i * 7) % 5) as f64 * 0.01).collect();
        x.push(50.0);
        // oracle: direct moments
        let n = x.len() as f64;
        let m = x.iter().sum::<f64>() / n;
        let m2 = x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / n;
        let m3 = x.iter().map(|v| (v - m).powi(3)).sum::<f64>() / n;
        let m4 = x.iter().map(|v| (v - m).powi(4)).sum::<f64>() / n;
        let jb = n / 6.0 * ((m3 / m2.powf(1.5)).powi(2) + (m4 / m2 / m2 - 3.0).powi(2) / 4.0);
        let r = jarque_bera(&ser(x)).unwrap();
        assert!((r.statistic - jb).abs() < 1e-9 * jb);
        assert!(r.p_value < 0.01);
    }

    #[test]
    fn jb_errors() {
        assert!(matches!(jarque_bera(&ser(vec![1.0; 7])), Err(Error::Size(_))));
        assert!(matches!(jarque_bera(&ser(vec![1.0; 9])), Err(Error::Degenerate(_))));
    }

    #[test]
    fn sw_three_linear() {
        let r = shapiro_wilk(&ser(vec![1.0, 2.0, 3.0])).unwrap();
        assert!((r.statistic - 1.0).abs() < 1e-12);
        assert!((r.p_value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn sw_reference_values() {
        // Reference W and p from an independent swilk implementation.
        let cases: [(&[f64], f64, f64); 4] = [
            (
                &[148.0, 154.0, 158.0, 160.0, 161.0, 162.0, 166.0, 170.0, 182.0, 195.0, 236.0],
                0.788815,
                0.006704,
            ),
            (
                &[
                    1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0, 11.0, 12.0, 13.0, 14.0,
                    15.0, 16.0, 17.0, 18.0, 19.0, 20.0,
                ],
                0.960375,
                0.551372,
            ),
            (&[1.0, 2.0, 4.0, 8.0, 9.0], 0.900963, 0.415232),
            (&[0.1, 0.5, 0.2, 3.0], 0.733518, 0.026739),
        ];
        for (x, w, p) in cases {
            let r = shapiro_wilk(&ser(x.to_vec())).unwrap();
            assert!((r.statistic - w).abs() < 1e-4, "W {} vs {w}", r.statistic);
            assert!((r.p_value - p).abs() < 1e-4, "p {} vs {p}", r.p_value);
        }
    }

    #[test]
    fn sw_errors() {
        assert!(matches!(shapiro_wilk(&ser(vec![1.0, 2.0])), Err(Error::Size(_))));
        assert!(matches!(shapiro_wilk(&ser(vec![3.0; 10])), Err(Error::Degenerate(_))));
    }
}
