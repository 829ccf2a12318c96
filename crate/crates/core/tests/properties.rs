use infcast_core::breaks::optimal_partitions;
use infcast_core::csvio::{read_csv, write_csv};
use infcast_core::diagnostics::{acf_values, jarque_bera, ljung_box, pacf, shapiro_wilk};
use infcast_core::dist::{chi2_cdf, normal_cdf};
use infcast_core::harness::metrics;
use infcast_core::linalg::{lstsq, Matrix};
use infcast_core::regress::{best_subset_regression, fit_regression, DesignSpec, Term};
use infcast_core::{align, Frame, InterceptPolicy, QuarterDate, Series};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

fn start() -> QuarterDate {
    QuarterDate::new(2001, 3).unwrap()
}

fn series(v: Vec<f64>) -> Series {
    Series::new("x", start(), v).unwrap()
}

/// Values with enough spread that no statistic is degenerate.
fn sample(min: usize, max: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-100.0f64..100.0, min..max)
        .prop_filter("non-constant", |v| {
            let m = v.iter().sum::<f64>() / v.len() as f64;
            v.iter().map(|x| (x - m).powi(2)).sum::<f64>() > 1e-3 * v.len() as f64
        })
}

fn affine() -> impl Strategy<Value = (f64, f64)> {
    (prop_oneof![-20.0f64..-0.05, 0.05f64..20.0], -50.0f64..50.0)
}

fn regression_frame(y: Vec<f64>, x1: Vec<f64>, x2: Vec<f64>) -> Frame {
    align(vec![
        Series::new("y", start(), y).unwrap(),
        Series::new("x1", start(), x1).unwrap(),
        Series::new("x2", start(), x2).unwrap(),
    ])
    .unwrap()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

#[test]
fn reference_tail_values() {
    assert!((chi2_cdf(3.841, 1.0) - 0.95).abs() < 1e-4);
    assert!((chi2_cdf(5.991, 2.0) - 0.95).abs() < 1e-4);
    assert!((normal_cdf(1.959964) - 0.975).abs() < 1e-4);
}

proptest! {
    // One more break can only help when some optimal segment is long
    // enough to split; with h = 1 that always holds.
    #[test]
    fn break_rss_is_monotone(x in sample(12, 60), h in 1usize..5) {
        let n = x.len();
        let parts = optimal_partitions(&x, 3, h);
        for w in parts.windows(2) {
            let mut bounds = vec![0];
            bounds.extend(&w[0].break_indices);
            bounds.push(n);
            let splittable = bounds.windows(2).any(|b| b[1] - b[0] >= 2 * h);
            if splittable {
                prop_assert!(w[1].rss <= w[0].rss * (1.0 + 1e-12) + 1e-12);
            }
        }
        let unit = optimal_partitions(&x, 3, 1);
        for w in unit.windows(2) {
            prop_assert!(w[1].rss <= w[0].rss * (1.0 + 1e-12) + 1e-12);
        }
    }

    #[test]
    fn breaks_are_affine_equivariant(x in sample(12, 60), (a, b) in affine()) {
        let y: Vec<f64> = x.iter().map(|v| a * v + b).collect();
        let px = optimal_partitions(&x, 2, 3);
        let py = optimal_partitions(&y, 2, 3);
        prop_assert_eq!(px.len(), py.len());
        for (p, q) in px.iter().zip(&py) {
            // exact ties are measure-zero for continuous draws
            prop_assert_eq!(&p.break_indices, &q.break_indices);
            prop_assert!(close(q.rss, a * a * p.rss, 1e-8), "{} vs {}", q.rss, a * a * p.rss);
        }
    }

    #[test]
    fn acf_is_reversal_symmetric(x in sample(5, 80)) {
        let k = x.len() - 1;
        let r = acf_values(&x, k).unwrap();
        let rev: Vec<f64> = x.iter().rev().copied().collect();
        let s = acf_values(&rev, k).unwrap();
        prop_assert_eq!(r[0], 1.0);
        for (a, b) in r.iter().zip(&s) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn statistics_are_affine_invariant(x in sample(20, 120), (a, b) in affine()) {
        let y: Vec<f64> = x.iter().map(|v| a * v + b).collect();
        let (sx, sy) = (series(x.clone()), series(y.clone()));
        let ra = acf_values(&x, 8).unwrap();
        let rb = acf_values(&y, 8).unwrap();
        for (u, v) in ra.iter().zip(&rb) {
            prop_assert!((u - v).abs() < 1e-9);
        }
        let pa = pacf(&sx, 8).unwrap();
        let pb = pacf(&sy, 8).unwrap();
        for (u, v) in pa.iter().zip(&pb) {
            prop_assert!((u.value - v.value).abs() < 1e-9);
        }
        let lb = (ljung_box(&sx, 6, 0).unwrap(), ljung_box(&sy, 6, 0).unwrap());
        prop_assert!(close(lb.0.statistic, lb.1.statistic, 1e-9));
        let jb = (jarque_bera(&sx).unwrap(), jarque_bera(&sy).unwrap());
        prop_assert!(close(jb.0.statistic, jb.1.statistic, 1e-9));
        let sw = (shapiro_wilk(&sx).unwrap(), shapiro_wilk(&sy).unwrap());
        prop_assert!(close(sw.0.statistic, sw.1.statistic, 1e-9));
    }

    #[test]
    fn qr_matches_normal_equations(
        cols in proptest::collection::vec(proptest::collection::vec(-5.0f64..5.0, 30), 1..5),
        y in proptest::collection::vec(-5.0f64..5.0, 30),
    ) {
        let x = Matrix::from_columns(&cols);
        let dm = DMatrix::from_fn(30, cols.len(), |i, j| cols[j][i]);
        let xtx = dm.transpose() * &dm;
        let Some(chol) = xtx.clone().cholesky() else { return Ok(()) };
        let beta = chol.solve(&(dm.transpose() * DVector::from_column_slice(&y)));
        let ls = lstsq(&x, &y).unwrap();
        for (a, b) in ls.coef.iter().zip(beta.iter()) {
            prop_assert!(close(*a, *b, 1e-8), "{a} vs {b}");
        }
        // residuals are orthogonal to every column
        for c in &cols {
            let dot: f64 = c.iter().zip(&ls.residuals).map(|(a, b)| a * b).sum();
            prop_assert!(dot.abs() < 1e-8 * (1.0 + ls.rss));
        }
    }

    #[test]
    fn lag_and_slice_commute(x in sample(10, 40), k in 1usize..4, from in 0i64..4, len in 2i64..5) {
        let s = series(x);
        let lo = s.start().add(k as i64 + from);
        let hi = lo.add(len);
        let a = s.lag(k).unwrap().slice(lo, hi).unwrap();
        let b = s.slice(lo.add(-(k as i64)), hi.add(-(k as i64))).unwrap();
        prop_assert_eq!(a.start(), lo);
        prop_assert_eq!(a.values(), b.values());
    }

    #[test]
    fn pct_change_compounds(x in proptest::collection::vec(1.0f64..50.0, 6..30)) {
        let s = series(x);
        let one = s.pct_change(1).unwrap();
        let four = s.pct_change(4).unwrap();
        for (t, v) in four.values().iter().enumerate() {
            let prod: f64 = one.values()[t..t + 4].iter().map(|g| 1.0 + g).product();
            prop_assert!(close(1.0 + v, prod, 1e-12));
        }
    }

    #[test]
    fn metrics_ignore_error_order(mut e in proptest::collection::vec(-10.0f64..10.0, 1..40)) {
        let m = metrics(&e);
        e.reverse();
        let r = metrics(&e);
        prop_assert!(close(m.rmse, r.rmse, 1e-12) && close(m.mae, r.mae, 1e-12));
    }

    #[test]
    fn csv_round_trip(a in proptest::collection::vec(-1e6f64..1e6, 1..30), scale in -12i32..12) {
        let b: Vec<f64> = a.iter().map(|v| v * 10f64.powi(scale)).collect();
        let frame = align(vec![
            Series::new("a", start(), a).unwrap(),
            Series::new("b", start(), b).unwrap(),
        ])
        .unwrap();
        let mut buf = Vec::new();
        write_csv(&frame, "date", &mut buf).unwrap();
        let back = read_csv(buf.as_slice(), "date", &[]).unwrap();
        prop_assert_eq!(back, frame);
    }

    #[test]
    fn regression_is_affine_in_the_target(
        data in proptest::collection::vec((-5.0f64..5.0, -5.0f64..5.0, -5.0f64..5.0), 20..50),
        (a, b) in affine(),
    ) {
        let (y, (x1, x2)): (Vec<f64>, (Vec<f64>, Vec<f64>)) = data.iter().map(|&(u, v, w)| (u, (v, w))).unzip();
        let ya: Vec<f64> = y.iter().map(|v| a * v + b).collect();
        let spec = DesignSpec::new("y", vec![Term::new("x1", 0), Term::new("x2", 1)], true).unwrap();
        let f = fit_regression(&regression_frame(y, x1.clone(), x2.clone()), &spec).unwrap();
        let g = fit_regression(&regression_frame(ya, x1, x2), &spec).unwrap();
        prop_assert!(close(g.coefficients[0], a * f.coefficients[0] + b, 1e-9));
        for i in 1..3 {
            prop_assert!(close(g.coefficients[i], a * f.coefficients[i], 1e-9));
            prop_assert!(close(g.t_values[i], a.signum() * f.t_values[i], 1e-9));
        }
    }

    #[test]
    fn subset_fits_share_a_window(
        data in proptest::collection::vec((-5.0f64..5.0, -5.0f64..5.0, -5.0f64..5.0), 20..40),
    ) {
        let (y, (x1, x2)): (Vec<f64>, (Vec<f64>, Vec<f64>)) = data.iter().map(|&(u, v, w)| (u, (v, w))).unzip();
        let frame = regression_frame(y, x1, x2);
        let menu = [Term::new("x1", 0), Term::new("x1", 3), Term::new("x2", 1), Term::new("y", 2)];
        let fits = best_subset_regression(&frame, "y", &menu, InterceptPolicy::Search).unwrap();
        prop_assert_eq!(fits.len(), 2 * 15);
        prop_assert!(fits.iter().all(|f| f.n_obs == frame.len() - 3));
        prop_assert!(fits.windows(2).all(|w| w[0].aic <= w[1].aic + 1e-9));
    }
}
