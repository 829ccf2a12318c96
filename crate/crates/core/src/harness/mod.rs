//! Chained forecasting of a regression whose covariates are projected by
//! their own ARIMA models, plus forecast evaluation and model comparison.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::arima::{self, best_subset_with, fit_mle_with, ArimaFit, ArimaSpec, FitOptions, SubsetSearch};
use crate::error::{Error, Result};
use crate::regress::{build_design_window, ols_fit, DesignSpec, RegressionFit};
use crate::series::{Frame, QuarterDate, Series};

#[derive(Debug, Clone, PartialEq)]
pub struct ChainedModel {
    pub main: RegressionFit,
    /// Best-subset ARIMA per covariate series other than the target.
    pub subsidiaries: BTreeMap<String, ArimaFit>,
}

impl ChainedModel {
    /// Last date of the estimation sample.
    pub fn sample_end(&self) -> QuarterDate {
        self.main.residuals.end()
    }
}

/// Fit the main regression on the window implied by `window_lag` (at least
/// the design's own maximal lag) and one subsidiary per covariate.
pub fn fit_chained(
    frame: &Frame,
    design: &DesignSpec,
    window_lag: usize,
    search: &SubsetSearch,
    opts: &FitOptions,
) -> Result<ChainedModel> {
    let main = ols_fit(&build_design_window(frame, design, window_lag)?, design)?;
    attach_subsidiaries(main, frame, search, opts)
}

/// Subsidiaries are searched on each covariate's full span in `frame`,
/// which ends at the main model's sample end.
pub fn attach_subsidiaries(
    main: RegressionFit,
    frame: &Frame,
    search: &SubsetSearch,
    opts: &FitOptions,
) -> Result<ChainedModel> {
    let end = main.residuals.end();
    let mut subsidiaries = BTreeMap::new();
    for name in main.spec.series_names() {
        if name == main.spec.target() {
            continue;
        }
        let col = frame.column(name)?.slice(frame.start(), end)?;
        let ranked = best_subset_with(&col, search, opts).map_err(|e| name_error(name, e))?;
        let best = ranked.into_iter().next().expect("ranking is non-empty");
        subsidiaries.insert(name.to_string(), best);
    }
    Ok(ChainedModel { main, subsidiaries })
}

fn name_error(series: &str, e: Error) -> Error {
    match e {
        Error::Estimation { message, best } => Error::Estimation {
            message: format!("subsidiary model for `{series}`: {message}"),
            best,
        },
        other => Error::Estimation {
            message: format!("subsidiary model for `{series}`: {other}"),
            best: None,
        },
    }
}

/// Target forecasts for the `h` quarters after the sample end. Covariate
/// values dated inside the sample come from `frame`; later ones from the
/// subsidiary forecasts, and lags of the target from its own forecasts.
pub fn forecast_chained(model: &ChainedModel, frame: &Frame, h: usize) -> Result<Vec<(QuarterDate, f64)>> {
    let end = model.sample_end();
    let spec = &model.main.spec;
    let mut paths: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
    for (name, fit) in &model.subsidiaries {
        let steps = (end.add(h as i64).quarters_since(fit.data.end())).max(0) as usize;
        paths.insert(name, arima::forecast(fit, steps).iter().map(|p| p.mean).collect());
    }
    let mut own: Vec<f64> = Vec::with_capacity(h);
    for s in 1..=h {
        let date = end.add(s as i64);
        let mut yhat = model.main.intercept();
        for (term, beta) in model.main.term_coefficients() {
            let at = date.add(-(term.lag as i64));
            let value = if at <= end {
                frame
                    .column(&term.series)?
                    .get(at)
                    .ok_or_else(|| Error::Range(format!("{} has no observation at {at}", term.series)))?
            } else if term.series == spec.target() {
                own[(at.quarters_since(end) - 1) as usize]
            } else {
                let fit = &model.subsidiaries[&term.series];
                let path = &paths[term.series.as_str()];
                path[(at.quarters_since(fit.data.end()) - 1) as usize]
            };
            yhat += beta * value;
        }
        own.push(yhat);
    }
    Ok(own.into_iter().enumerate().map(|(i, v)| (end.add(i as i64 + 1), v)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics {
    pub rmse: f64,
    pub mae: f64,
    pub mse: f64,
    pub n: usize,
}

/// Error metrics of `predicted` against `actual` over an identical span.
pub fn evaluate(actual: &Series, predicted: &Series) -> Result<Metrics> {
    if actual.start() != predicted.start() || actual.len() != predicted.len() {
        return Err(Error::Range(format!(
            "spans differ: {} {}..{} vs {} {}..{}",
            actual.name(),
            actual.start(),
            actual.end(),
            predicted.name(),
            predicted.start(),
            predicted.end()
        )));
    }
    Ok(metrics(
        &actual.values().iter().zip(predicted.values()).map(|(a, p)| a - p).collect::<Vec<_>>(),
    ))
}

/// Metrics of a raw error vector.
pub fn metrics(errors: &[f64]) -> Metrics {
    let n = errors.len() as f64;
    let mse = errors.iter().map(|e| e * e).sum::<f64>() / n;
    let mae = errors.iter().map(|e| e.abs()).sum::<f64>() / n;
    Metrics {
        rmse: mse.sqrt(),
        mae,
        mse,
        n: errors.len(),
    }
}

#[derive(Debug, Clone)]
pub enum ModelKind {
    /// Univariate model of `series`.
    Arima {
        series: String,
        spec: ArimaSpec,
        opts: FitOptions,
    },
    Chained {
        design: DesignSpec,
        window_lag: usize,
        subsidiary: SubsetSearch,
        opts: FitOptions,
    },
}

#[derive(Debug, Clone)]
pub struct Candidate {
    pub name: String,
    pub kind: ModelKind,
}

#[derive(Debug, Clone, PartialEq)]
pub enum FittedModel {
    Arima(ArimaFit),
    Chained(ChainedModel),
}

impl FittedModel {
    pub fn aic(&self) -> f64 {
        match self {
            FittedModel::Arima(f) => f.aic,
            FittedModel::Chained(c) => c.main.aic,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelOutcome {
    pub name: String,
    pub model: FittedModel,
    /// One-step in-sample predictions; chained models use observed
    /// covariates here.
    pub fitted: Series,
    pub forecast: Series,
    /// Forecast standard errors where the model provides them.
    pub forecast_se: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalRow {
    pub name: String,
    pub in_sample: Metrics,
    pub out_sample: Metrics,
    pub aic: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub rows: Vec<EvalRow>,
    pub horizon: usize,
    pub split: QuarterDate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub report: EvalReport,
    pub outcomes: Vec<ModelOutcome>,
}

fn target_of(c: &Candidate) -> &str {
    match &c.kind {
        ModelKind::Arima { series, .. } => series,
        ModelKind::Chained { design, .. } => design.target(),
    }
}

/// Fit each candidate on data through `split`, forecast `h` quarters and
/// score in and out of sample.
pub fn compare(candidates: &[Candidate], frame: &Frame, split: QuarterDate, h: usize) -> Result<Comparison> {
    if h == 0 {
        return Err(Error::Range("horizon must be at least 1".into()));
    }
    if split < frame.start() || split.add(h as i64) > frame.end() {
        return Err(Error::Range(format!(
            "split {split} with horizon {h} does not fit in {}..{}",
            frame.start(),
            frame.end()
        )));
    }
    let est = frame.slice(frame.start(), split)?;
    let outcomes = candidates
        .par_iter()
        .map(|c| run_candidate(c, &est, frame, h))
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::with_capacity(outcomes.len());
    for (c, o) in candidates.iter().zip(&outcomes) {
        let target = frame.column(target_of(c))?;
        let in_actual = target.slice(o.fitted.start(), o.fitted.end())?;
        let out_actual = target.slice(split.succ(), split.add(h as i64))?;
        rows.push(EvalRow {
            name: c.name.clone(),
            in_sample: evaluate(&in_actual, &o.fitted.clone().with_name(in_actual.name()))?,
            out_sample: evaluate(&out_actual, &o.forecast)?,
            aic: o.model.aic(),
        });
    }
    Ok(Comparison {
        report: EvalReport { rows, horizon: h, split },
        outcomes,
    })
}

fn run_candidate(c: &Candidate, est: &Frame, full: &Frame, h: usize) -> Result<ModelOutcome> {
    let start = est.end().succ();
    match &c.kind {
        ModelKind::Arima { series, spec, opts } => {
            let data = est.column(series)?;
            let fit = fit_mle_with(spec, data, opts)?;
            let fc = arima::forecast(&fit, h);
            let forecast = Series::new(format!("{}_forecast", c.name), start, fc.iter().map(|p| p.mean).collect())?;
            Ok(ModelOutcome {
                name: c.name.clone(),
                fitted: fit.fitted.clone(),
                forecast_se: Some(fc.iter().map(|p| p.std_error).collect()),
                forecast,
                model: FittedModel::Arima(fit),
            })
        }
        ModelKind::Chained {
            design,
            window_lag,
            subsidiary,
            opts,
        } => {
            let model = fit_chained(est, design, *window_lag, subsidiary, opts)?;
            // `full` is only read at dates up to the sample end
            let fc = forecast_chained(&model, full, h)?;
            let forecast = Series::new(format!("{}_forecast", c.name), start, fc.iter().map(|p| p.1).collect())?;
            Ok(ModelOutcome {
                name: c.name.clone(),
                fitted: model.main.fitted.clone(),
                forecast_se: None,
                forecast,
                model: FittedModel::Chained(model),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arima::{ArimaParams, InterceptPolicy};
    use crate::regress::{fit_regression, Term};
    use crate::series::align;

    fn q(y: i32, q: u8) -> QuarterDate {
        QuarterDate::new(y, q).unwrap()
    }

    #[test]
    fn metric_examples() {
        let a = Series::new("a", q(2000, 1), vec![1.0, 2.0]).unwrap();
        assert_eq!(evaluate(&a, &a).unwrap(), Metrics { rmse: 0.0, mae: 0.0, mse: 0.0, n: 2 });
        let m = metrics(&[1.0, -1.0]);
        assert_eq!((m.rmse, m.mae, m.mse), (1.0, 1.0, 1.0));
        let m = metrics(&[3.0, 4.0]);
        assert_eq!(m.mse, 12.5);
        assert_eq!(m.mae, 3.5);
        assert!((m.rmse - 3.5355339).abs() < 1e-6);
        let b = Series::new("b", q(2000, 2), vec![1.0, 2.0]).unwrap();
        assert!(matches!(evaluate(&a, &b), Err(Error::Range(_))));
    }

    /// y_t = 0.5 x_{t-1} with an AR(1) subsidiary for x.
    #[test]
    fn hand_recursion() {
        let x = vec![1.0, -2.0, 0.5, 3.0, -1.0, 2.0, 1.5, -0.5, 1.0, 4.0];
        let mut y = vec![0.3];
        y.extend(x[..9].iter().map(|v| 0.5 * v));
        let frame = align(vec![
            Series::new("y", q(2000, 1), y).unwrap(),
            Series::new("x", q(2000, 1), x.clone()).unwrap(),
        ])
        .unwrap();
        let spec = DesignSpec::new("y", vec![Term::new("x", 1)], false).unwrap();
        let main = fit_regression(&frame, &spec).unwrap();
        assert!((main.coefficients[0] - 0.5).abs() < 1e-12);
        let sub = ArimaFit::from_params(
            &ArimaSpec::arima(1, 0, 0, false).unwrap(),
            ArimaParams::new(vec![0.5], vec![], 0.0, 1.0),
            frame.column("x").unwrap(),
        )
        .unwrap();
        let model = ChainedModel {
            main,
            subsidiaries: BTreeMap::from([("x".to_string(), sub)]),
        };
        let f = forecast_chained(&model, &frame, 2).unwrap();
        assert_eq!(f[0].0, q(2002, 3));
        assert!((f[0].1 - 2.0).abs() < 1e-10);
        assert!((f[1].1 - 1.0).abs() < 1e-10);
    }

    #[test]
    fn self_comparison_identical_rows() {
        let spec = ArimaSpec::arima(1, 0, 0, true).unwrap();
        let y = arima::simulate(&spec, &ArimaParams::new(vec![0.5], vec![], 1.0, 1.0), 60, 4).unwrap();
        let frame = align(vec![y.with_name("y")]).unwrap();
        let cand = Candidate {
            name: "ar1".into(),
            kind: ModelKind::Arima {
                series: "y".into(),
                spec,
                opts: FitOptions::default(),
            },
        };
        let split = frame.date_at(55);
        let cmp = compare(&[cand.clone(), cand], &frame, split, 4).unwrap();
        let r = &cmp.report.rows;
        assert_eq!(r[0].in_sample, r[1].in_sample);
        assert_eq!(r[0].out_sample, r[1].out_sample);
        assert_eq!(r[0].out_sample.n, 4);
        assert!(compare(&[], &frame, frame.date_at(57), 4).is_err());
    }

    #[test]
    fn white_noise_subsidiary_is_mean() {
        let wn = ArimaSpec::arima(0, 0, 0, true).unwrap();
        let x = arima::simulate(&wn, &ArimaParams::new(vec![], vec![], 2.0, 1.0), 80, 21).unwrap().with_name("x");
        let y = arima::simulate(&wn, &ArimaParams::new(vec![], vec![], 0.0, 1.0), 80, 22).unwrap().with_name("y");
        let frame = align(vec![y, x]).unwrap();
        let design = DesignSpec::new("y", vec![Term::new("x", 0)], true).unwrap();
        let search = SubsetSearch::new(1, 1, InterceptPolicy::Always);
        let model = fit_chained(&frame, &design, 0, &search, &FitOptions::default()).unwrap();
        let sub = &model.subsidiaries["x"];
        assert!(sub.spec.ar_lags().is_empty() && sub.spec.ma_lags().is_empty());
        let f = forecast_chained(&model, &frame, 3).unwrap();
        let want = model.main.coefficients[0] + model.main.coefficients[1] * sub.params.mean;
        assert!(f.iter().all(|p| (p.1 - want).abs() < 1e-12));
    }
}
