use std::cmp::Ordering;

use rayon::prelude::*;

use super::{fit_mle_with, ArimaFit, ArimaSpec, FitOptions};
use crate::error::{Error, Result};
use crate::series::Series;

/// Largest order accepted by the exhaustive search.
pub const MAX_SEARCH_ORDER: usize = 6;

/// AIC values closer than this are treated as tied.
pub const AIC_TIE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InterceptPolicy {
    Always,
    Never,
    /// Try each candidate with and without an intercept.
    Search,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMode {
    /// Every subset of `{1..max_p}` x `{1..max_q}`; intermediate lags may be
    /// excluded.
    Lags,
    /// Full-window ARMA(p, q) for `p <= max_p`, `q <= max_q`.
    Orders,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubsetSearch {
    pub max_p: usize,
    pub max_q: usize,
    pub d: usize,
    pub intercept: InterceptPolicy,
    pub mode: SearchMode,
}

impl SubsetSearch {
    pub fn new(max_p: usize, max_q: usize, intercept: InterceptPolicy) -> Self {
        Self {
            max_p,
            max_q,
            d: 0,
            intercept,
            mode: SearchMode::Lags,
        }
    }

    /// Candidate specs in enumeration order.
    pub fn candidates(&self) -> Result<Vec<ArimaSpec>> {
        if self.max_p > MAX_SEARCH_ORDER || self.max_q > MAX_SEARCH_ORDER {
            return Err(Error::Domain(format!(
                "search orders must be <= {MAX_SEARCH_ORDER}, got p={} q={}",
                self.max_p, self.max_q
            )));
        }
        let sets = |max: usize| -> Vec<Vec<usize>> {
            match self.mode {
                SearchMode::Orders => (0..=max).map(|k| (1..=k).collect()).collect(),
                SearchMode::Lags => (0u32..1 << max)
                    .map(|mask| (1..=max).filter(|l| mask & (1 << (l - 1)) != 0).collect())
                    .collect(),
            }
        };
        let intercepts: &[bool] = match self.intercept {
            InterceptPolicy::Always => &[true],
            InterceptPolicy::Never => &[false],
            InterceptPolicy::Search => &[true, false],
        };
        let mut out = Vec::new();
        for ar in sets(self.max_p) {
            for ma in sets(self.max_q) {
                for &c in intercepts {
                    out.push(ArimaSpec::new(self.d, &ar, &ma, c)?);
                }
            }
        }
        Ok(out)
    }
}

/// Exhaustive lag-subset search on the undifferenced data, ranked by AIC.
pub fn best_subset(data: &Series, max_p: usize, max_q: usize, intercept: InterceptPolicy) -> Result<Vec<ArimaFit>> {
    best_subset_with(data, &SubsetSearch::new(max_p, max_q, intercept), &FitOptions::default())
}

/// Fits every candidate, drops failures and non-converged fits, and ranks
/// by ascending AIC. Ties go to fewer parameters, then lower max lag, then
/// enumeration order.
pub fn best_subset_with(data: &Series, search: &SubsetSearch, opts: &FitOptions) -> Result<Vec<ArimaFit>> {
    let specs = search.candidates()?;
    let total = specs.len();
    let mut fits: Vec<(usize, ArimaFit)> = specs
        .par_iter()
        .enumerate()
        .filter_map(|(i, s)| match fit_mle_with(s, data, opts) {
            Ok(f) if f.converged && f.aic.is_finite() => Some((i, f)),
            _ => None,
        })
        .collect();
    if fits.is_empty() {
        return Err(Error::estimation(format!("all {total} candidate models failed to fit")));
    }
    fits.sort_by(|a, b| rank_order((a.0, &a.1), (b.0, &b.1)));
    Ok(fits.into_iter().map(|(_, f)| f).collect())
}

fn rank_order(a: (usize, &ArimaFit), b: (usize, &ArimaFit)) -> Ordering {
    let (ia, fa) = a;
    let (ib, fb) = b;
    if (fa.aic - fb.aic).abs() >= AIC_TIE {
        return fa.aic.total_cmp(&fb.aic);
    }
    fa.n_params()
        .cmp(&fb.n_params())
        .then(fa.spec.max_lag().cmp(&fb.spec.max_lag()))
        .then(ia.cmp(&ib))
}
