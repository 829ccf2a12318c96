//! End-to-end study: ingest, break scan, estimation, diagnostics,
//! comparison and report emission.

use std::fmt;
use std::path::{Path, PathBuf};

use infcast_core::arima::{best_subset_with, ArimaFit, ArimaSpec, FitOptions, SubsetSearch, MA_CONVENTION};
use infcast_core::breaks::{detect_breaks, BreakResult};
use infcast_core::csvio::load_csv;
use infcast_core::diagnostics::{
    acf, adf_test, jarque_bera, ljung_box, pacf, shapiro_wilk, white_test, Deterministic, InfoCriterion, LagRule,
    WhiteOptions,
};
use infcast_core::harness::{compare, Candidate, ChainedModel, Comparison, FittedModel, ModelKind, ModelOutcome};
use infcast_core::regress::{best_subset_regression, build_design_window, DesignSpec, RegressionFit};
use infcast_core::{align, summary_stats, Error, Frame, QuarterDate, Series};
use log::info;

use crate::config::{Criterion, PipelineConfig, Problem, Transform};
use crate::table::{num, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Validation,
    Data,
    Estimation,
}

impl ErrorKind {
    pub fn exit_code(self) -> u8 {
        match self {
            ErrorKind::Validation => 2,
            ErrorKind::Data => 3,
            ErrorKind::Estimation => 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct PipelineError {
    pub stage: &'static str,
    pub kind: ErrorKind,
    pub message: String,
}

impl fmt::Display for PipelineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} failed: {}", self.stage, self.message)
    }
}

fn fail(stage: &'static str, kind: ErrorKind) -> impl Fn(Error) -> PipelineError {
    move |e| PipelineError {
        stage,
        kind,
        message: e.to_string(),
    }
}

fn invalid(problems: &[Problem]) -> PipelineError {
    PipelineError {
        stage: "validate",
        kind: ErrorKind::Validation,
        message: problems.iter().map(Problem::to_string).collect::<Vec<_>>().join("; "),
    }
}

fn io(stage: &'static str) -> impl Fn(std::io::Error) -> PipelineError {
    move |e| PipelineError {
        stage,
        kind: ErrorKind::Data,
        message: e.to_string(),
    }
}

/// Command-line values that replace config fields.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub output_dir: Option<PathBuf>,
    pub horizon: Option<usize>,
    pub split: Option<String>,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut PipelineConfig) {
        if let Some(d) = &self.output_dir {
            cfg.output_dir = d.to_string_lossy().into_owned();
        }
        if let Some(h) = self.horizon {
            cfg.horizon = h;
        }
        if let Some(s) = &self.split {
            cfg.split = s.clone();
        }
    }
}

/// Load a config file, apply overrides and list every problem.
pub fn load_and_validate(path: &Path, overrides: &Overrides) -> Result<(PipelineConfig, PathBuf), Vec<Problem>> {
    let mut cfg = PipelineConfig::load(path).map_err(|p| vec![p])?;
    overrides.apply(&mut cfg);
    let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let dir = if dir.as_os_str().is_empty() { PathBuf::from(".") } else { dir };
    let problems = cfg.validate(&dir);
    if problems.is_empty() {
        Ok((cfg, dir))
    } else {
        Err(problems)
    }
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub output_dir: PathBuf,
    pub artifacts: Vec<PathBuf>,
}

pub fn run(config_path: &Path, overrides: &Overrides) -> Result<RunSummary, PipelineError> {
    let (cfg, dir) = load_and_validate(config_path, overrides).map_err(|p| invalid(&p))?;
    run_config(&cfg, &dir)
}

fn apply_transform(s: &Series, t: &Transform) -> infcast_core::Result<Series> {
    match t {
        Transform::Level => Ok(s.clone()),
        Transform::Log => s.ln(),
        Transform::PctChange(k) => s.pct_change(*k),
    }
}

fn parse_date(s: &Option<String>) -> Option<QuarterDate> {
    s.as_ref().and_then(|v| v.parse().ok())
}

struct Context {
    out: PathBuf,
    artifacts: Vec<PathBuf>,
    opts: FitOptions,
}

impl Context {
    fn emit(&mut self, table: &Table, stem: &str) -> Result<(), PipelineError> {
        table.write(&self.out, stem).map_err(io("write"))?;
        self.artifacts.push(self.out.join(format!("{stem}.csv")));
        self.artifacts.push(self.out.join(format!("{stem}.txt")));
        Ok(())
    }
}

/// Transformed columns (target first), their common span, and the
/// configured sample window of it.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub columns: Vec<Series>,
    pub full: Frame,
    pub sample: Frame,
}

pub fn load_dataset(cfg: &PipelineConfig, base: &Path) -> Result<Dataset, PipelineError> {
    let data_err = |stage| fail(stage, ErrorKind::Data);
    info!("loading {}", cfg.data_file);
    let raw = load_csv(cfg.data_path(base), &cfg.date_column, &cfg.columns()).map_err(data_err("load"))?;
    let transformed: Vec<Series> = cfg
        .columns()
        .iter()
        .map(|c| apply_transform(raw.column(c)?, &cfg.transform(c)))
        .collect::<infcast_core::Result<_>>()
        .map_err(data_err("transform"))?;
    let full = align(transformed.clone()).map_err(data_err("align"))?;
    let lo = parse_date(&cfg.sample_start).unwrap_or(full.start()).max(full.start());
    let hi = parse_date(&cfg.sample_end).unwrap_or(full.end()).min(full.end());
    let sample = full.slice(lo, hi).map_err(data_err("sample"))?;
    Ok(Dataset {
        columns: transformed,
        full,
        sample,
    })
}

/// Run a validated config; relative paths resolve against `base`.
pub fn run_config(cfg: &PipelineConfig, base: &Path) -> Result<RunSummary, PipelineError> {
    let data_err = |stage| fail(stage, ErrorKind::Data);
    let est_err = |stage| fail(stage, ErrorKind::Estimation);

    let Dataset {
        columns: transformed,
        sample,
        ..
    } = load_dataset(cfg, base)?;
    let split: QuarterDate = cfg.split.parse().map_err(data_err("sample"))?;
    if split <= sample.start() || split >= sample.end() || (sample.end().quarters_since(split) as usize) < cfg.horizon {
        return Err(invalid(&[Problem {
            field: "split".into(),
            message: format!(
                "{split} with horizon {} does not fit in the loaded sample {}..{}",
                cfg.horizon,
                sample.start(),
                sample.end()
            ),
        }]));
    }
    let est = sample.slice(sample.start(), split).map_err(data_err("sample"))?;

    let out = {
        let p = Path::new(&cfg.output_dir);
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            base.join(p)
        }
    };
    std::fs::create_dir_all(&out).map_err(io("write"))?;
    let mut ctx = Context {
        out: out.clone(),
        artifacts: Vec::new(),
        opts: FitOptions {
            seed: cfg.seed,
            ..FitOptions::default()
        },
    };

    ctx.emit(&metadata_table(cfg, &sample, &est), "00_metadata")?;

    info!("break scan");
    let (segments, scores) = if cfg.break_scan {
        let target = &transformed[0];
        let from = parse_date(&cfg.break_start).unwrap_or(target.start());
        let to = parse_date(&cfg.break_end).unwrap_or(target.end());
        let window = target.slice(from, to).map_err(data_err("breaks"))?;
        let br = detect_breaks(&window, cfg.break_max, cfg.break_trim).map_err(data_err("breaks"))?;
        break_tables(&window, &br)
    } else {
        let mut a = Table::new("Structural breaks", &["regime", "start", "end", "n_obs", "mean"]);
        let mut b = Table::new("Break count selection", &["m", "rss", "bic", "break_dates", "chosen"]);
        a.note("break scan disabled in config");
        b.note("break scan disabled in config");
        (a, b)
    };
    ctx.emit(&segments, "01_breaks")?;
    ctx.emit(&scores, "01_break_scores")?;

    let (summary, corr) = summary_tables(&sample);
    ctx.emit(&summary, "02_summary")?;
    ctx.emit(&corr, "02_correlations")?;

    let target_est = est.column(&cfg.target).map_err(data_err("correlogram"))?;
    ctx.emit(&correlogram_table(target_est, cfg.acf_max_lag).map_err(data_err("correlogram"))?, "03_correlogram")?;

    info!("stationarity grid");
    ctx.emit(&stationarity_table(cfg, &sample), "04_stationarity")?;

    info!("univariate search");
    let search = SubsetSearch {
        max_p: cfg.max_p,
        max_q: cfg.max_q,
        d: cfg.arima_d,
        intercept: (&cfg.arima_intercept).into(),
        mode: (&cfg.arima_mode).into(),
    };
    let ranking = best_subset_with(target_est, &search, &ctx.opts).map_err(est_err("univariate"))?;
    let chosen_spec = match &cfg.univariate_pin {
        Some(p) => ArimaSpec::new(cfg.arima_d, &p.ar, &p.ma, p.intercept).map_err(est_err("univariate"))?,
        None => ranking[0].spec.clone(),
    };
    ctx.emit(&arima_ranking_table(&ranking, &chosen_spec), "05_univariate_ranking")?;

    info!("multivariate search");
    let mut window_lag = 0;
    let mut multi: Option<(DesignSpec, Table)> = None;
    if cfg.has_multivariate() {
        let menu = cfg.menu_terms();
        window_lag = menu.iter().map(|t| t.lag).max().unwrap_or(0);
        let ranked = if menu.is_empty() {
            Vec::new()
        } else {
            best_subset_regression(&est, &cfg.target, &menu, (&cfg.regression_intercept).into())
                .map_err(est_err("multivariate"))?
        };
        let design = match cfg.pinned_terms() {
            Some(terms) => {
                let spec = DesignSpec::new(
                    cfg.target.clone(),
                    terms,
                    cfg.regression_pin_intercept.unwrap_or(true),
                )
                .map_err(est_err("multivariate"))?;
                window_lag = window_lag.max(spec.max_lag());
                spec
            }
            None => ranked[0].spec.clone(),
        };
        multi = Some((design.clone(), regression_ranking_table(&ranked, &design)));
    }
    let ranking_table = multi.as_ref().map(|m| m.1.clone()).unwrap_or_else(|| {
        let mut t = Table::new("Multivariate ranking", &["rank", "model", "n_coef", "loglik", "aic", "r2", "chosen"]);
        t.note("no lag_menu or regression_pin configured");
        t
    });
    ctx.emit(&ranking_table, "06_multivariate_ranking")?;

    info!("comparison");
    let mut candidates = vec![Candidate {
        name: "univariate".into(),
        kind: ModelKind::Arima {
            series: cfg.target.clone(),
            spec: chosen_spec,
            opts: ctx.opts.clone(),
        },
    }];
    if let Some((design, _)) = &multi {
        candidates.push(Candidate {
            name: "multivariate".into(),
            kind: ModelKind::Chained {
                design: design.clone(),
                window_lag,
                subsidiary: SubsetSearch {
                    max_p: cfg.subsidiary_max_p,
                    max_q: cfg.subsidiary_max_q,
                    d: 0,
                    intercept: (&cfg.subsidiary_intercept).into(),
                    mode: infcast_core::arima::SearchMode::Lags,
                },
                opts: ctx.opts.clone(),
            },
        });
    }
    let cmp = compare(&candidates, &sample, split, cfg.horizon).map_err(est_err("comparison"))?;

    let (uni_fit, chained) = split_outcomes(&cmp);
    ctx.emit(&arima_fit_table("Univariate model", uni_fit), "05_univariate_fit")?;
    ctx.emit(&regression_fit_table(chained.map(|c| &c.main)), "06_multivariate_fit")?;
    ctx.emit(&subsidiary_table(chained), "07_subsidiaries")?;

    info!("residual diagnostics");
    let (grid, normality) = diagnostics_tables(cfg, &est, uni_fit, chained, window_lag).map_err(est_err("diagnostics"))?;
    ctx.emit(&grid, "08_residual_diagnostics")?;
    ctx.emit(&normality, "08_normality")?;

    ctx.emit(&comparison_table(&cmp), "09_comparison")?;

    for o in &cmp.outcomes {
        let target = sample.column(&cfg.target).map_err(data_err("plot"))?;
        ctx.emit(&plot_table(target, o), &format!("10_plot_{}", o.name))?;
    }
    info!("wrote {} files to {}", ctx.artifacts.len(), out.display());
    Ok(RunSummary {
        output_dir: out,
        artifacts: ctx.artifacts,
    })
}

fn split_outcomes(cmp: &Comparison) -> (&ArimaFit, Option<&ChainedModel>) {
    let mut uni = None;
    let mut chained = None;
    for o in &cmp.outcomes {
        match &o.model {
            FittedModel::Arima(f) => uni = uni.or(Some(f)),
            FittedModel::Chained(c) => chained = chained.or(Some(c)),
        }
    }
    (uni.expect("univariate candidate always present"), chained)
}

fn metadata_table(cfg: &PipelineConfig, sample: &Frame, est: &Frame) -> Table {
    let mut t = Table::new("Run metadata", &["key", "value"]);
    let mut kv = |k: &str, v: String| t.push(vec![k.into(), v]);
    kv("target", cfg.target.clone());
    kv("covariates", cfg.covariates.join(";"));
    for c in cfg.columns() {
        kv(&format!("transform.{c}"), cfg.transform(c).to_string());
    }
    kv("sample", format!("{}..{}", sample.start(), sample.end()));
    kv("estimation_sample", format!("{}..{}", est.start(), est.end()));
    kv("split", cfg.split.clone());
    kv("horizon", cfg.horizon.to_string());
    kv("break_model", "mean shift, global RSS minimization".into());
    kv("break_selection", "BIC = n ln(RSS/n) + 2(m+1) ln n".into());
    kv("break_trim", num(cfg.break_trim));
    kv("break_max", cfg.break_max.to_string());
    kv("ma_convention", MA_CONVENTION.into());
    kv("arima_intercept", "process mean of the differenced series".into());
    kv("regression_window", "common window of the largest menu lag".into());
    kv("chained_in_sample", "observed covariates (one-step, full information)".into());
    kv("chained_out_of_sample", "covariates at future dates from subsidiary forecasts".into());
    kv("adf_criterion", format!("{:?}", cfg.adf_criterion).to_lowercase());
    kv("verdict_level", "0.05".into());
    kv("seed", cfg.seed.to_string());
    t
}

fn break_tables(s: &Series, br: &BreakResult) -> (Table, Table) {
    let mut seg = Table::new(
        format!("Structural breaks in {} ({}..{})", s.name(), s.start(), s.end()),
        &["regime", "start", "end", "n_obs", "mean"],
    );
    let mut bounds = vec![0];
    bounds.extend(br.break_indices.iter().copied());
    bounds.push(s.len());
    for (i, w) in bounds.windows(2).enumerate() {
        seg.push(vec![
            (i + 1).to_string(),
            s.date_at(w[0]).to_string(),
            s.date_at(w[1] - 1).to_string(),
            (w[1] - w[0]).to_string(),
            num(br.segment_means[i]),
        ]);
    }
    seg.note(format!(
        "breaks: {}",
        if br.break_dates.is_empty() {
            "none".to_string()
        } else {
            br.break_dates.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(", ")
        }
    ));
    seg.note(format!("trim {} (minimum segment {} observations)", br.trim, br.min_segment));
    let mut sc = Table::new("Break count selection", &["m", "rss", "bic", "break_dates", "chosen"]);
    for (p, &(m, bic)) in br.partitions.iter().zip(&br.criterion_scores) {
        sc.push(vec![
            m.to_string(),
            num(p.rss),
            num(bic),
            p.break_indices.iter().map(|&i| s.date_at(i).to_string()).collect::<Vec<_>>().join(";"),
            (m == br.n_breaks()).to_string(),
        ]);
    }
    (seg, sc)
}

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma).powi(2);
        sbb += (y - mb).powi(2);
    }
    sab / (saa * sbb).sqrt()
}

fn summary_tables(sample: &Frame) -> (Table, Table) {
    let mut t = Table::new(
        format!("Summary statistics ({}..{})", sample.start(), sample.end()),
        &["variable", "n", "min", "q1", "median", "mean", "q3", "max"],
    );
    for c in sample.columns() {
        let s = summary_stats(c);
        t.push(vec![
            c.name().into(),
            c.len().to_string(),
            num(s.min),
            num(s.q1),
            num(s.median),
            num(s.mean),
            num(s.q3),
            num(s.max),
        ]);
    }
    t.note("quartiles by linear interpolation between order statistics");
    let names: Vec<&str> = sample.names().collect();
    let mut headers = vec!["variable"];
    headers.extend(names.iter().copied());
    let mut c = Table::new("Correlations", &headers);
    for a in sample.columns() {
        let mut row = vec![a.name().to_string()];
        row.extend(sample.columns().iter().map(|b| num(pearson(a.values(), b.values()))));
        c.push(row);
    }
    (t, c)
}

fn correlogram_table(s: &Series, max_lag: usize) -> infcast_core::Result<Table> {
    let lags = max_lag.min((s.len() - 1) / 2);
    let a = acf(s, lags)?;
    let p = pacf(s, lags)?;
    let mut t = Table::new(
        format!("Correlogram of {} ({}..{})", s.name(), s.start(), s.end()),
        &["lag", "acf", "pacf", "bound", "acf_significant", "pacf_significant"],
    );
    for (ap, pp) in a[1..].iter().zip(&p) {
        t.push(vec![
            ap.lag.to_string(),
            num(ap.value),
            num(pp.value),
            num(ap.conf_bound),
            ap.significant().to_string(),
            pp.significant().to_string(),
        ]);
    }
    if lags < max_lag {
        t.note(format!("lags truncated to {lags} by sample size"));
    }
    Ok(t)
}

fn stationarity_table(cfg: &PipelineConfig, sample: &Frame) -> Table {
    let crit = match cfg.adf_criterion {
        Criterion::Aic => InfoCriterion::Aic,
        Criterion::Bic => InfoCriterion::Bic,
    };
    let mut t = Table::new(
        format!("Augmented Dickey-Fuller tests ({}..{})", sample.start(), sample.end()),
        &["variable", "deterministic", "lag_rule", "lags", "nobs", "tau", "p_value", "cv_1pct", "cv_5pct", "cv_10pct", "reject_5pct"],
    );
    for c in sample.columns() {
        for (det, dname) in [(Deterministic::Drift, "drift"), (Deterministic::Trend, "trend")] {
            for (rule, rname) in [
                (
                    LagRule::Auto {
                        max_lag: cfg.adf_max_lag,
                        criterion: crit,
                    },
                    format!("auto(max {})", cfg.adf_max_lag),
                ),
                (LagRule::Fixed(cfg.adf_fixed_lag), format!("fixed({})", cfg.adf_fixed_lag)),
            ] {
                let mut row = vec![c.name().to_string(), dname.into(), rname];
                match adf_test(c, det, rule) {
                    Ok(r) => {
                        row.extend([
                            r.lags.to_string(),
                            r.nobs.to_string(),
                            num(r.test.statistic),
                            num(r.test.p_value),
                            num(r.critical_values[0]),
                            num(r.critical_values[1]),
                            num(r.critical_values[2]),
                            r.test.reject.to_string(),
                        ]);
                    }
                    Err(e) => {
                        row.extend(std::iter::repeat_n("NA".to_string(), 8));
                        t.note(format!("{} {}: {e}", c.name(), dname));
                    }
                }
                t.push(row);
            }
        }
    }
    t.note("H0: unit root; verdict compares tau with the 5% critical value");
    t
}

fn arima_ranking_table(ranking: &[ArimaFit], chosen: &ArimaSpec) -> Table {
    let mut t = Table::new(
        "Univariate best-subset ranking (AIC)",
        &["rank", "model", "n_params", "loglik", "aic", "chosen"],
    );
    for (i, f) in ranking.iter().enumerate() {
        t.push(vec![
            (i + 1).to_string(),
            f.spec.to_string(),
            f.n_params().to_string(),
            num(f.loglik),
            num(f.aic),
            (&f.spec == chosen).to_string(),
        ]);
    }
    if !ranking.iter().any(|f| &f.spec == chosen) {
        t.note(format!("pinned model {chosen} is outside the searched set"));
    } else if &ranking[0].spec != chosen {
        t.note(format!("pinned model {chosen} chosen over the AIC leader"));
    }
    t
}

fn arima_fit_table(title: &str, f: &ArimaFit) -> Table {
    let mut t = Table::new(format!("{title}: {}", f.spec), &["parameter", "lag", "estimate"]);
    for (l, c) in f.ar_coeffs() {
        t.push(vec!["ar".into(), l.to_string(), num(c)]);
    }
    for (l, c) in f.ma_coeffs() {
        t.push(vec!["ma".into(), l.to_string(), num(c)]);
    }
    if f.spec.intercept() {
        t.push(vec!["mean".into(), "NA".into(), num(f.params.mean)]);
    }
    t.push(vec!["sigma2".into(), "NA".into(), num(f.params.sigma2)]);
    t.push(vec!["loglik".into(), "NA".into(), num(f.loglik)]);
    t.push(vec!["aic".into(), "NA".into(), num(f.aic)]);
    t.note(MA_CONVENTION);
    t.note(format!(
        "estimated on {}..{}; converged: {}",
        f.data.start(),
        f.data.end(),
        f.converged
    ));
    t
}

fn regression_ranking_table(ranked: &[RegressionFit], chosen: &DesignSpec) -> Table {
    const SHOWN: usize = 50;
    let mut t = Table::new(
        "Multivariate best-subset ranking (AIC)",
        &["rank", "model", "n_coef", "loglik", "aic", "r2", "chosen"],
    );
    for (i, f) in ranked.iter().take(SHOWN).enumerate() {
        t.push(vec![
            (i + 1).to_string(),
            f.spec.to_string(),
            f.n_coefficients().to_string(),
            num(f.loglik),
            num(f.aic),
            num(f.r2),
            (&f.spec == chosen).to_string(),
        ]);
    }
    if ranked.len() > SHOWN {
        t.note(format!("top {SHOWN} of {} fitted subsets shown", ranked.len()));
    }
    if let Some(f) = ranked.first() {
        t.note(format!("common estimation window: {}..{} ({} obs)", f.residuals.start(), f.residuals.end(), f.n_obs));
    }
    t
}

fn regression_fit_table(fit: Option<&RegressionFit>) -> Table {
    let Some(f) = fit else {
        let mut t = Table::new("Multivariate model", &["term", "estimate", "std_error", "t_value", "p_value"]);
        t.note("no multivariate model configured");
        return t;
    };
    let mut t = Table::new(
        format!("Multivariate model: {}", f.spec),
        &["term", "estimate", "std_error", "t_value", "p_value"],
    );
    for i in 0..f.names.len() {
        t.push(vec![
            f.names[i].clone(),
            num(f.coefficients[i]),
            num(f.std_errors[i]),
            num(f.t_values[i]),
            num(f.p_values[i]),
        ]);
    }
    t.note(format!(
        "n = {}, sigma2 = {}, r2 = {}, loglik = {}, aic = {}",
        f.n_obs,
        num(f.sigma2),
        num(f.r2),
        num(f.loglik),
        num(f.aic)
    ));
    t.note(format!("estimated on {}..{}", f.residuals.start(), f.residuals.end()));
    t
}

fn subsidiary_table(chained: Option<&ChainedModel>) -> Table {
    let mut t = Table::new(
        "Subsidiary covariate models",
        &["series", "model", "parameter", "lag", "estimate", "aic"],
    );
    let Some(c) = chained else {
        t.note("no multivariate model configured");
        return t;
    };
    for (name, f) in &c.subsidiaries {
        let mut push = |p: &str, lag: String, v: f64| {
            t.push(vec![name.clone(), f.spec.to_string(), p.into(), lag, num(v), num(f.aic)]);
        };
        for (l, v) in f.ar_coeffs() {
            push("ar", l.to_string(), v);
        }
        for (l, v) in f.ma_coeffs() {
            push("ma", l.to_string(), v);
        }
        if f.spec.intercept() {
            push("mean", "NA".into(), f.params.mean);
        }
        push("sigma2", "NA".into(), f.params.sigma2);
    }
    t.note(MA_CONVENTION);
    t
}

fn lagged_frame(s: &Series, lags: usize) -> infcast_core::Result<Frame> {
    align((1..=lags).map(|k| s.lag(k)).collect::<infcast_core::Result<Vec<_>>>()?)
}

fn diagnostics_tables(
    cfg: &PipelineConfig,
    est: &Frame,
    uni: &ArimaFit,
    chained: Option<&ChainedModel>,
    window_lag: usize,
) -> infcast_core::Result<(Table, Table)> {
    let mut grid = Table::new(
        "Residual diagnostics by lag",
        &["model", "lag", "ljung_box_q", "ljung_box_dof", "ljung_box_p", "white_lm", "white_dof", "white_p"],
    );
    let mut norm = Table::new(
        "Residual normality",
        &["model", "n", "jarque_bera", "jarque_bera_p", "shapiro_w", "shapiro_p"],
    );
    let mut models: Vec<(&str, &Series, usize, Option<Frame>)> = vec![(
        "univariate",
        &uni.residuals,
        uni.spec.ar_lags().len() + uni.spec.ma_lags().len(),
        None,
    )];
    if let Some(c) = chained {
        let design = build_design_window(est, &c.main.spec, window_lag)?;
        let off = usize::from(c.main.spec.intercept());
        let cols = (off..design.x.cols())
            .map(|j| Series::new(design.names[j].clone(), design.start, design.x.col(j).to_vec()))
            .collect::<infcast_core::Result<Vec<_>>>()?;
        let regs = if cols.is_empty() { None } else { Some(align(cols)?) };
        models.push(("multivariate", &c.main.residuals, 0, regs));
    }
    let data = &uni.data;
    for (name, resid, fitted, regs) in &models {
        for l in 1..=cfg.diagnostic_lags {
            let mut row = vec![name.to_string(), l.to_string()];
            match ljung_box(resid, l, *fitted) {
                Ok(r) => row.extend([num(r.statistic), r.dof.to_string(), num(r.p_value)]),
                Err(_) => row.extend(["NA".to_string(), "NA".into(), "NA".into()]),
            }
            // ARIMA residuals are tested against lags 1..l of the modeled
            // series; regression residuals against the design columns.
            let frame = match regs {
                Some(f) => Some(f.clone()),
                None => lagged_frame(data, l).ok(),
            };
            let white = frame.and_then(|f| {
                let lo = resid.start().max(f.start());
                let hi = resid.end().min(f.end());
                let r = resid.slice(lo, hi).ok()?;
                white_test(&r, &f, WhiteOptions::default())
                    .or_else(|_| white_test(&r, &f, WhiteOptions { cross_products: false }))
                    .ok()
            });
            match white {
                Some(w) => {
                    if let Some(n) = &w.note {
                        grid.note(format!("{name} lag {l}: {n}"));
                    }
                    row.extend([num(w.statistic), w.dof.to_string(), num(w.p_value)]);
                }
                None => row.extend(["NA".to_string(), "NA".into(), "NA".into()]),
            }
            grid.push(row);
        }
        let jb = jarque_bera(resid).ok();
        let sw = shapiro_wilk(resid).ok();
        norm.push(vec![
            name.to_string(),
            resid.len().to_string(),
            jb.as_ref().map_or("NA".into(), |r| num(r.statistic)),
            jb.as_ref().map_or("NA".into(), |r| num(r.p_value)),
            sw.as_ref().map_or("NA".into(), |r| num(r.statistic)),
            sw.as_ref().map_or("NA".into(), |r| num(r.p_value)),
        ]);
    }
    grid.note("Ljung-Box dof = lag - fitted ARMA coefficients; NA where lag does not exceed them");
    grid.note("White test falls back to squares only when cross-products exhaust the sample");
    Ok((grid, norm))
}

fn comparison_table(cmp: &Comparison) -> Table {
    let r = &cmp.report;
    let mut t = Table::new(
        format!("Forecast comparison (split {}, horizon {})", r.split, r.horizon),
        &["model", "rmse_in", "mae_in", "mse_in", "rmse_out", "mae_out", "mse_out", "aic", "n_in", "n_out"],
    );
    for row in &r.rows {
        t.push(vec![
            row.name.clone(),
            num(row.in_sample.rmse),
            num(row.in_sample.mae),
            num(row.in_sample.mse),
            num(row.out_sample.rmse),
            num(row.out_sample.mae),
            num(row.out_sample.mse),
            num(row.aic),
            row.in_sample.n.to_string(),
            row.out_sample.n.to_string(),
        ]);
    }
    t.note("in-sample multivariate fit uses observed covariates");
    t
}

fn plot_table(actual: &Series, o: &ModelOutcome) -> Table {
    let mut t = Table::new(
        format!("Plot data: {}", o.name),
        &["date", "actual", "fitted", "forecast", "forecast_se"],
    );
    for (i, d) in actual.dates().enumerate() {
        let fc_idx = o.forecast.get(d).map(|_| d.quarters_since(o.forecast.start()) as usize);
        t.push(vec![
            d.to_string(),
            num(actual.values()[i]),
            o.fitted.get(d).map_or("NA".into(), num),
            o.forecast.get(d).map_or("NA".into(), num),
            match (&o.forecast_se, fc_idx) {
                (Some(se), Some(k)) => num(se[k]),
                _ => "NA".into(),
            },
        ]);
    }
    t
}
