//! Pipeline configuration: a flat TOML file checked in full before any
//! computation.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use infcast_core::arima::{InterceptPolicy, SearchMode, MAX_LAG};
use infcast_core::regress::{Term, MAX_CANDIDATES};
use infcast_core::QuarterDate;
use serde::Deserialize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Transform {
    Level,
    Log,
    PctChange(usize),
}

impl FromStr for Transform {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        match t {
            "level" => return Ok(Transform::Level),
            "log" => return Ok(Transform::Log),
            _ => {}
        }
        let inner = t
            .strip_prefix("pct_change(")
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| format!("unknown transform `{s}`; expected level, log or pct_change(k)"))?;
        match inner.trim().parse::<usize>() {
            Ok(k) if k >= 1 => Ok(Transform::PctChange(k)),
            _ => Err(format!("pct_change period must be a positive integer, got `{inner}`")),
        }
    }
}

impl fmt::Display for Transform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Transform::Level => write!(f, "level"),
            Transform::Log => write!(f, "log"),
            Transform::PctChange(k) => write!(f, "pct_change({k})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Intercept {
    Always,
    Never,
    Search,
}

impl From<&Intercept> for InterceptPolicy {
    fn from(i: &Intercept) -> Self {
        match i {
            Intercept::Always => InterceptPolicy::Always,
            Intercept::Never => InterceptPolicy::Never,
            Intercept::Search => InterceptPolicy::Search,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Lags,
    Orders,
}

impl From<&Mode> for SearchMode {
    fn from(m: &Mode) -> Self {
        match m {
            Mode::Lags => SearchMode::Lags,
            Mode::Orders => SearchMode::Orders,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Criterion {
    Aic,
    Bic,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnivariatePin {
    #[serde(default)]
    pub ar: Vec<usize>,
    #[serde(default)]
    pub ma: Vec<usize>,
    #[serde(default = "yes")]
    pub intercept: bool,
}

fn yes() -> bool {
    true
}

macro_rules! defaults {
    ($($name:ident: $ty:ty = $val:expr;)*) => {
        $(fn $name() -> $ty { $val })*
    };
}

defaults! {
    d_date_column: String = "date".into();
    d_horizon: usize = 4;
    d_output_dir: String = "output".into();
    d_break_max: usize = 3;
    d_break_trim: f64 = 0.15;
    d_max_pq: usize = 3;
    d_sub_max_p: usize = 4;
    d_sub_max_q: usize = 2;
    d_intercept: Intercept = Intercept::Search;
    d_mode: Mode = Mode::Lags;
    d_adf_max_lag: usize = 8;
    d_adf_fixed_lag: usize = 4;
    d_criterion: Criterion = Criterion::Aic;
    d_diag_lags: usize = 8;
    d_acf_lags: usize = 12;
    d_seed: u64 = 0x5eed_a41a;
}

/// Every field except `data_file`, `target` and `split` has a default.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    /// Relative paths resolve against the config file's directory.
    pub data_file: String,
    #[serde(default = "d_date_column")]
    pub date_column: String,
    pub target: String,
    #[serde(default)]
    pub covariates: Vec<String>,
    /// Column name to `level`, `log` or `pct_change(k)`; unlisted columns
    /// stay in levels.
    #[serde(default)]
    pub transforms: BTreeMap<String, String>,
    pub sample_start: Option<String>,
    pub sample_end: Option<String>,
    /// Last quarter of the estimation sample.
    pub split: String,
    #[serde(default = "d_horizon")]
    pub horizon: usize,
    #[serde(default = "d_output_dir")]
    pub output_dir: String,

    #[serde(default = "yes")]
    pub break_scan: bool,
    #[serde(default = "d_break_max")]
    pub break_max: usize,
    #[serde(default = "d_break_trim")]
    pub break_trim: f64,
    /// Break scan window; defaults to the target's full loaded span.
    pub break_start: Option<String>,
    pub break_end: Option<String>,

    #[serde(default = "d_max_pq")]
    pub max_p: usize,
    #[serde(default = "d_max_pq")]
    pub max_q: usize,
    #[serde(default)]
    pub arima_d: usize,
    #[serde(default = "d_intercept")]
    pub arima_intercept: Intercept,
    #[serde(default = "d_mode")]
    pub arima_mode: Mode,
    pub univariate_pin: Option<UnivariatePin>,

    /// Series name to candidate lags; the target may appear with lags >= 1.
    #[serde(default)]
    pub lag_menu: BTreeMap<String, Vec<usize>>,
    #[serde(default = "d_intercept")]
    pub regression_intercept: Intercept,
    /// Terms written `name` (lag 0) or `name:k`.
    pub regression_pin: Option<Vec<String>>,
    pub regression_pin_intercept: Option<bool>,

    #[serde(default = "d_sub_max_p")]
    pub subsidiary_max_p: usize,
    #[serde(default = "d_sub_max_q")]
    pub subsidiary_max_q: usize,
    #[serde(default = "d_intercept")]
    pub subsidiary_intercept: Intercept,

    #[serde(default = "d_adf_max_lag")]
    pub adf_max_lag: usize,
    #[serde(default = "d_adf_fixed_lag")]
    pub adf_fixed_lag: usize,
    #[serde(default = "d_criterion")]
    pub adf_criterion: Criterion,
    #[serde(default = "d_diag_lags")]
    pub diagnostic_lags: usize,
    #[serde(default = "d_acf_lags")]
    pub acf_max_lag: usize,
    #[serde(default = "d_seed")]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Problem {
    pub field: String,
    pub message: String,
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

fn problem(field: impl Into<String>, message: impl Into<String>) -> Problem {
    Problem {
        field: field.into(),
        message: message.into(),
    }
}

/// Parse `name` or `name:lag`.
pub fn parse_term(s: &str) -> Result<Term, String> {
    match s.split_once(':') {
        None if !s.trim().is_empty() => Ok(Term::new(s.trim(), 0)),
        Some((name, lag)) if !name.trim().is_empty() => lag
            .trim()
            .parse::<usize>()
            .map(|l| Term::new(name.trim(), l))
            .map_err(|_| format!("bad lag in term `{s}`")),
        _ => Err(format!("bad term `{s}`")),
    }
}

impl PipelineConfig {
    pub fn from_toml(text: &str) -> Result<Self, Problem> {
        toml::from_str(text).map_err(|e| problem("config", e.message().to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, Problem> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| problem("config", format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn data_path(&self, config_dir: &Path) -> PathBuf {
        let p = Path::new(&self.data_file);
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            config_dir.join(p)
        }
    }

    /// Mapped column names: target first, then covariates.
    pub fn columns(&self) -> Vec<&str> {
        std::iter::once(self.target.as_str())
            .chain(self.covariates.iter().map(String::as_str))
            .collect()
    }

    pub fn transform(&self, column: &str) -> Transform {
        self.transforms
            .get(column)
            .and_then(|t| t.parse().ok())
            .unwrap_or(Transform::Level)
    }

    /// Regression candidate terms in a fixed order.
    pub fn menu_terms(&self) -> Vec<Term> {
        let mut v = Vec::new();
        for (name, lags) in &self.lag_menu {
            let mut lags = lags.clone();
            lags.sort_unstable();
            lags.dedup();
            v.extend(lags.into_iter().map(|l| Term::new(name.clone(), l)));
        }
        v
    }

    pub fn pinned_terms(&self) -> Option<Vec<Term>> {
        self.regression_pin
            .as_ref()
            .map(|p| p.iter().filter_map(|s| parse_term(s).ok()).collect())
    }

    pub fn has_multivariate(&self) -> bool {
        !self.lag_menu.is_empty() || self.regression_pin.is_some()
    }

    /// Checks that need no data. An empty list means the run may start.
    pub fn validate(&self, config_dir: &Path) -> Vec<Problem> {
        let mut out = Vec::new();
        let path = self.data_path(config_dir);
        if !path.is_file() {
            out.push(problem("data_file", format!("{} does not exist", path.display())));
        }
        if self.target.trim().is_empty() {
            out.push(problem("target", "must name a column"));
        }
        for (i, c) in self.covariates.iter().enumerate() {
            if c == &self.target || self.covariates[..i].contains(c) {
                out.push(problem("covariates", format!("`{c}` listed twice")));
            }
            if c == &self.date_column {
                out.push(problem("covariates", format!("`{c}` is the date column")));
            }
        }
        let mapped = self.columns();
        for (col, t) in &self.transforms {
            if !mapped.contains(&col.as_str()) {
                out.push(problem(col.clone(), "transform given for a column that is neither target nor covariate"));
            }
            if let Err(e) = t.parse::<Transform>() {
                out.push(problem(format!("transforms.{col}"), e));
            }
        }

        let date = |field: &str, v: &Option<String>, out: &mut Vec<Problem>| -> Option<QuarterDate> {
            v.as_ref().and_then(|s| match s.parse::<QuarterDate>() {
                Ok(d) => Some(d),
                Err(e) => {
                    out.push(problem(field, e.to_string()));
                    None
                }
            })
        };
        let start = date("sample_start", &self.sample_start, &mut out);
        let end = date("sample_end", &self.sample_end, &mut out);
        let split = date("split", &Some(self.split.clone()), &mut out);
        if let (Some(s), Some(e)) = (start, end) {
            if s >= e {
                out.push(problem("sample_end", format!("{e} is not after sample_start {s}")));
            }
        }
        if let Some(sp) = split {
            if start.is_some_and(|s| sp <= s) || end.is_some_and(|e| sp >= e) {
                out.push(problem("split", format!("{sp} is not strictly inside the sample")));
            } else if let Some(e) = end {
                if (e.quarters_since(sp) as usize) < self.horizon {
                    out.push(problem(
                        "split",
                        format!("{sp} leaves fewer than horizon={} quarters before {e}", self.horizon),
                    ));
                }
            }
        }
        if self.horizon == 0 {
            out.push(problem("horizon", "must be at least 1"));
        }
        let bs = date("break_start", &self.break_start, &mut out);
        let be = date("break_end", &self.break_end, &mut out);
        if let (Some(s), Some(e)) = (bs, be) {
            if s >= e {
                out.push(problem("break_end", format!("{e} is not after break_start {s}")));
            }
        }
        if self.break_max == 0 {
            out.push(problem("break_max", "must be at least 1"));
        }
        if !(self.break_trim > 0.0 && self.break_trim < 0.5) {
            out.push(problem("break_trim", "must lie in (0, 0.5)"));
        }

        for (field, v) in [
            ("max_p", self.max_p),
            ("max_q", self.max_q),
            ("subsidiary_max_p", self.subsidiary_max_p),
            ("subsidiary_max_q", self.subsidiary_max_q),
        ] {
            if v > infcast_core::arima::MAX_SEARCH_ORDER {
                out.push(problem(field, format!("must be <= {}", infcast_core::arima::MAX_SEARCH_ORDER)));
            }
        }
        if self.arima_d > 2 {
            out.push(problem("arima_d", "must be 0, 1 or 2"));
        }
        if let Some(p) = &self.univariate_pin {
            if p.ar.iter().chain(&p.ma).any(|&l| l == 0 || l > MAX_LAG) {
                out.push(problem("univariate_pin", format!("lags must lie in 1..={MAX_LAG}")));
            }
        }

        for (name, lags) in &self.lag_menu {
            if !mapped.contains(&name.as_str()) {
                out.push(problem(name.clone(), "lag_menu references an unmapped column"));
            }
            if name == &self.target && lags.contains(&0) {
                out.push(problem(format!("lag_menu.{name}"), "the target can only enter with lags >= 1"));
            }
            if lags.is_empty() {
                out.push(problem(format!("lag_menu.{name}"), "empty lag list"));
            }
        }
        let menu = self.menu_terms().len();
        if menu > MAX_CANDIDATES {
            out.push(problem("lag_menu", format!("{menu} terms exceed the limit of {MAX_CANDIDATES}")));
        }
        if let Some(pin) = &self.regression_pin {
            if pin.is_empty() {
                out.push(problem("regression_pin", "must list at least one term"));
            }
            for s in pin {
                match parse_term(s) {
                    Ok(t) if !mapped.contains(&t.series.as_str()) => {
                        out.push(problem(t.series.clone(), "regression_pin references an unmapped column"))
                    }
                    Ok(t) if t.series == self.target && t.lag == 0 => {
                        out.push(problem("regression_pin", "the target cannot enter at lag 0"))
                    }
                    Ok(_) => {}
                    Err(e) => out.push(problem("regression_pin", e)),
                }
            }
        }
        if self.regression_pin_intercept.is_some() && self.regression_pin.is_none() {
            out.push(problem("regression_pin_intercept", "set without regression_pin"));
        }
        if self.diagnostic_lags == 0 {
            out.push(problem("diagnostic_lags", "must be at least 1"));
        }
        if self.acf_max_lag == 0 {
            out.push(problem("acf_max_lag", "must be at least 1"));
        }
        out
    }
}
