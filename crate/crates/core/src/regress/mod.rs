//! OLS on lagged-covariate designs with classical inference and
//! best-subset selection under AIC.

use std::f64::consts::PI;
use std::fmt;

use rayon::prelude::*;

use crate::arima::InterceptPolicy;
use crate::dist::student_t_two_sided;
use crate::error::{Error, Result};
use crate::linalg::{lstsq, Matrix};
use crate::series::{Frame, QuarterDate, Series};

/// Largest candidate menu accepted by [`best_subset_regression`].
pub const MAX_CANDIDATES: usize = 20;

/// Label of the intercept column.
pub const INTERCEPT: &str = "const";

/// A covariate entering at date `t` with value from `t - lag`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Term {
    pub series: String,
    pub lag: usize,
}

impl Term {
    pub fn new(series: impl Into<String>, lag: usize) -> Self {
        Self {
            series: series.into(),
            lag,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lag == 0 {
            write!(f, "{}", self.series)
        } else {
            write!(f, "{}_lag{}", self.series, self.lag)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DesignSpec {
    target: String,
    terms: Vec<Term>,
    intercept: bool,
}

impl DesignSpec {
    /// Rejects duplicate terms and the unlagged target as a regressor.
    pub fn new(target: impl Into<String>, terms: Vec<Term>, intercept: bool) -> Result<Self> {
        let target = target.into();
        for (i, t) in terms.iter().enumerate() {
            if terms[..i].contains(t) {
                return Err(Error::Domain(format!("duplicate term {t}")));
            }
            if t.series == target && t.lag == 0 {
                return Err(Error::Domain(format!("target `{target}` cannot enter at lag 0")));
            }
        }
        Ok(Self {
            target,
            terms,
            intercept,
        })
    }

    pub fn target(&self) -> &str {
        &self.target
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn intercept(&self) -> bool {
        self.intercept
    }

    pub fn max_lag(&self) -> usize {
        self.terms.iter().map(|t| t.lag).max().unwrap_or(0)
    }

    /// Coefficient labels in column order, intercept first.
    pub fn column_names(&self) -> Vec<String> {
        let mut v = Vec::with_capacity(self.terms.len() + 1);
        if self.intercept {
            v.push(INTERCEPT.to_string());
        }
        v.extend(self.terms.iter().map(Term::to_string));
        v
    }

    /// Distinct covariate series referenced, in first-appearance order.
    pub fn series_names(&self) -> Vec<&str> {
        let mut v: Vec<&str> = Vec::new();
        for t in &self.terms {
            if !v.contains(&t.series.as_str()) {
                v.push(&t.series);
            }
        }
        v
    }
}

impl fmt::Display for DesignSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ~ {}", self.target, self.column_names().join(" + "))
    }
}

#[derive(Debug, Clone)]
pub struct Design {
    pub y: Vec<f64>,
    pub x: Matrix,
    /// Date of the first row; rows are consecutive quarters.
    pub start: QuarterDate,
    pub names: Vec<String>,
}

impl Design {
    pub fn dates(&self) -> Vec<QuarterDate> {
        (0..self.y.len()).map(|i| self.start.add(i as i64)).collect()
    }
}

pub fn build_design(frame: &Frame, spec: &DesignSpec) -> Result<Design> {
    build_design_window(frame, spec, spec.max_lag())
}

/// Like [`build_design`] but dropping the first `window_lag` rows even if
/// the spec's own lags need fewer, so designs from a common menu share a
/// window.
pub fn build_design_window(frame: &Frame, spec: &DesignSpec, window_lag: usize) -> Result<Design> {
    let skip = window_lag.max(spec.max_lag());
    let target = frame.column(&spec.target)?.values();
    let sources = spec
        .terms
        .iter()
        .map(|t| frame.column(&t.series).map(Series::values))
        .collect::<Result<Vec<_>>>()?;
    let n = frame.len();
    if skip >= n {
        return Err(Error::Range(format!(
            "{spec}: lag {skip} leaves no usable rows in {} observations ({}..{})",
            n,
            frame.start(),
            frame.end()
        )));
    }
    let mut cols = Vec::with_capacity(spec.terms.len() + 1);
    if spec.intercept {
        cols.push(vec![1.0; n - skip]);
    }
    for (t, src) in spec.terms.iter().zip(&sources) {
        cols.push((skip..n).map(|i| src[i - t.lag]).collect());
    }
    Ok(Design {
        y: target[skip..].to_vec(),
        x: Matrix::from_columns(&cols),
        start: frame.date_at(skip),
        names: spec.column_names(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegressionFit {
    pub spec: DesignSpec,
    /// Column labels, intercept first.
    pub names: Vec<String>,
    pub coefficients: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub t_values: Vec<f64>,
    pub p_values: Vec<f64>,
    /// Unbiased `RSS / (n - k)`.
    pub sigma2: f64,
    pub loglik: f64,
    pub aic: f64,
    /// Centered with an intercept, uncentered without.
    pub r2: f64,
    pub residuals: Series,
    pub fitted: Series,
    pub n_obs: usize,
}

impl RegressionFit {
    pub fn n_coefficients(&self) -> usize {
        self.coefficients.len()
    }

    pub fn intercept(&self) -> f64 {
        if self.spec.intercept {
            self.coefficients[0]
        } else {
            0.0
        }
    }

    /// `(term, coefficient)` pairs excluding the intercept.
    pub fn term_coefficients(&self) -> impl Iterator<Item = (&Term, f64)> {
        let off = usize::from(self.spec.intercept);
        self.spec.terms.iter().zip(self.coefficients[off..].iter().copied())
    }

    pub fn coefficient(&self, name: &str) -> Option<f64> {
        self.names.iter().position(|n| n == name).map(|i| self.coefficients[i])
    }
}

/// QR least squares on a built design.
pub fn ols_fit(design: &Design, spec: &DesignSpec) -> Result<RegressionFit> {
    let n = design.y.len();
    let k = design.x.cols();
    if n <= k {
        return Err(Error::Size(format!("{spec}: {n} observations for {k} coefficients")));
    }
    let ls = lstsq(&design.x, &design.y).map_err(|dep| Error::Rank {
        columns: dep.iter().map(|&j| design.names[j].clone()).collect(),
    })?;
    let dof = (n - k) as f64;
    let sigma2 = ls.rss / dof;
    let std_errors: Vec<f64> = (0..k).map(|j| (sigma2 * ls.xtx_inv[j * k + j]).sqrt()).collect();
    let t_values: Vec<f64> = ls.coef.iter().zip(&std_errors).map(|(b, s)| b / s).collect();
    let p_values = t_values.iter().map(|&t| student_t_two_sided(t, dof)).collect();
    let nf = n as f64;
    let loglik = if ls.rss > 0.0 {
        -0.5 * nf * ((2.0 * PI).ln() + (ls.rss / nf).ln() + 1.0)
    } else {
        f64::INFINITY
    };
    let aic = -2.0 * loglik + 2.0 * (k + 1) as f64;
    let tss = if spec.intercept {
        let m = design.y.iter().sum::<f64>() / nf;
        design.y.iter().map(|v| (v - m).powi(2)).sum::<f64>()
    } else {
        design.y.iter().map(|v| v * v).sum::<f64>()
    };
    let r2 = if tss > 0.0 { 1.0 - ls.rss / tss } else { 1.0 };
    let fitted: Vec<f64> = design.y.iter().zip(&ls.residuals).map(|(y, e)| y - e).collect();
    Ok(RegressionFit {
        spec: spec.clone(),
        names: design.names.clone(),
        coefficients: ls.coef,
        std_errors,
        t_values,
        p_values,
        sigma2,
        loglik,
        aic,
        r2,
        residuals: Series::new(format!("{}_resid", spec.target), design.start, ls.residuals)?,
        fitted: Series::new(format!("{}_fitted", spec.target), design.start, fitted)?,
        n_obs: n,
    })
}

/// Build the design on its own window and fit.
pub fn fit_regression(frame: &Frame, spec: &DesignSpec) -> Result<RegressionFit> {
    ols_fit(&build_design(frame, spec)?, spec)
}

/// AIC closer than this counts as a tie.
const AIC_TIE: f64 = 1e-9;

/// Fits every non-empty subset of `candidates` on the window of the
/// largest candidate lag and ranks by ascending AIC; ties go to fewer
/// coefficients, then enumeration order. Rank-deficient subsets are skipped.
pub fn best_subset_regression(
    frame: &Frame,
    target: &str,
    candidates: &[Term],
    intercept: InterceptPolicy,
) -> Result<Vec<RegressionFit>> {
    let m = candidates.len();
    if m == 0 || m > MAX_CANDIDATES {
        return Err(Error::Domain(format!(
            "candidate menu must have 1..={MAX_CANDIDATES} terms, got {m}"
        )));
    }
    // validates the full menu once
    let full = DesignSpec::new(target, candidates.to_vec(), false)?;
    let window = full.max_lag();
    build_design_window(frame, &full, window)?;
    let intercepts: &[bool] = match intercept {
        InterceptPolicy::Always => &[true],
        InterceptPolicy::Never => &[false],
        InterceptPolicy::Search => &[true, false],
    };
    let jobs: Vec<(u32, bool)> = (1u32..1 << m)
        .flat_map(|mask| intercepts.iter().map(move |&c| (mask, c)))
        .collect();
    let results: Vec<(usize, Result<RegressionFit>)> = jobs
        .par_iter()
        .enumerate()
        .map(|(i, &(mask, c))| {
            let terms = (0..m).filter(|j| mask & (1 << j) != 0).map(|j| candidates[j].clone()).collect();
            let res = DesignSpec::new(target, terms, c)
                .and_then(|s| build_design_window(frame, &s, window).and_then(|d| ols_fit(&d, &s)));
            (i, res)
        })
        .collect();
    let mut first_err = None;
    let mut fits = Vec::new();
    for (i, r) in results {
        match r {
            Ok(f) if f.aic.is_finite() => fits.push((i, f)),
            Ok(_) => {}
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    if fits.is_empty() {
        return Err(first_err.unwrap_or_else(|| Error::estimation("no regression subset could be fitted")));
    }
    fits.sort_by(|(ia, a), (ib, b)| {
        if (a.aic - b.aic).abs() >= AIC_TIE {
            a.aic.total_cmp(&b.aic)
        } else {
            a.n_coefficients().cmp(&b.n_coefficients()).then(ia.cmp(ib))
        }
    });
    Ok(fits.into_iter().map(|(_, f)| f).collect())
}
