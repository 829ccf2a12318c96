//! Quarterly series container, calendar arithmetic and transformations.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A calendar quarter. Ordered by `(year, quarter)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuarterDate {
    year: i32,
    quarter: u8,
}

impl QuarterDate {
    pub fn new(year: i32, quarter: u8) -> Result<Self> {
        if !(1..=4).contains(&quarter) {
            return Err(Error::Domain(format!(
                "quarter must be in 1..=4, got {quarter}"
            )));
        }
        Ok(Self { year, quarter })
    }

    pub fn year(self) -> i32 {
        self.year
    }

    pub fn quarter(self) -> u8 {
        self.quarter
    }

    /// Quarters elapsed since year 0 Q1; used for date arithmetic.
    fn ordinal(self) -> i64 {
        self.year as i64 * 4 + (self.quarter as i64 - 1)
    }

    fn from_ordinal(ord: i64) -> Self {
        Self {
            year: ord.div_euclid(4) as i32,
            quarter: (ord.rem_euclid(4) + 1) as u8,
        }
    }

    pub fn succ(self) -> Self {
        self.add(1)
    }

    pub fn pred(self) -> Self {
        self.add(-1)
    }

    /// Shift by `quarters` (may be negative).
    pub fn add(self, quarters: i64) -> Self {
        Self::from_ordinal(self.ordinal() + quarters)
    }

    /// Signed number of quarters from `earlier` to `self`.
    pub fn quarters_since(self, earlier: QuarterDate) -> i64 {
        self.ordinal() - earlier.ordinal()
    }
}

impl fmt::Display for QuarterDate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}Q{}", self.year, self.quarter)
    }
}

impl FromStr for QuarterDate {
    type Err = Error;

    /// Parses `YYYYQn`, e.g. `2009Q1`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Domain(format!("invalid quarter date `{s}`, expected YYYYQn"));
        let s = s.trim();
        let (y, q) = s.split_once(['Q', 'q']).ok_or_else(bad)?;
        if y.len() != 4 || q.len() != 1 || !y.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let year: i32 = y.parse().map_err(|_| bad())?;
        let quarter: u8 = q.parse().map_err(|_| bad())?;
        QuarterDate::new(year, quarter).map_err(|_| bad())
    }
}

/// A named, gap-free quarterly sequence of finite values.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    name: String,
    start: QuarterDate,
    values: Vec<f64>,
}

impl Series {
    pub fn new(name: impl Into<String>, start: QuarterDate, values: Vec<f64>) -> Result<Self> {
        let name = name.into();
        if values.is_empty() {
            return Err(Error::Length(format!("series `{name}` is empty")));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain(format!(
                "series `{name}` has a non-finite value at {}",
                start.add(i as i64)
            )));
        }
        Ok(Self {
            name,
            start,
            values,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn start(&self) -> QuarterDate {
        self.start
    }

    pub fn end(&self) -> QuarterDate {
        self.start.add(self.values.len() as i64 - 1)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn date_at(&self, index: usize) -> QuarterDate {
        self.start.add(index as i64)
    }

    pub fn dates(&self) -> impl Iterator<Item = QuarterDate> + '_ {
        (0..self.values.len()).map(move |i| self.date_at(i))
    }

    /// Value observed at `date`, if inside the span.
    pub fn get(&self, date: QuarterDate) -> Option<f64> {
        let i = date.quarters_since(self.start);
        if i < 0 {
            return None;
        }
        self.values.get(i as usize).copied()
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// `out[i] = s[i + periods] / s[i] - 1`.
    pub fn pct_change(&self, periods: usize) -> Result<Series> {
        if periods == 0 {
            return Err(Error::Domain("pct_change periods must be >= 1".into()));
        }
        if self.len() <= periods {
            return Err(Error::Length(format!(
                "series `{}` has {} observations, need more than {periods}",
                self.name,
                self.len()
            )));
        }
        if let Some(i) = self.values.iter().position(|&v| v <= 0.0) {
            return Err(Error::Domain(format!(
                "series `{}` has non-positive level {} at {}",
                self.name,
                self.values[i],
                self.date_at(i)
            )));
        }
        let values = self
            .values
            .windows(periods + 1)
            .map(|w| w[periods] / w[0] - 1.0)
            .collect();
        Series::new(self.name.clone(), self.start.add(periods as i64), values)
    }

    /// Natural log of a strictly positive series.
    pub fn ln(&self) -> Result<Series> {
        if let Some(i) = self.values.iter().position(|&v| v <= 0.0) {
            return Err(Error::Domain(format!(
                "series `{}` has non-positive value at {}; log undefined",
                self.name,
                self.date_at(i)
            )));
        }
        Series::new(
            self.name.clone(),
            self.start,
            self.values.iter().map(|v| v.ln()).collect(),
        )
    }

    /// Lag by `k` quarters: the value dated `t` in the output is `s[t - k]`.
    pub fn lag(&self, k: usize) -> Result<Series> {
        if k == 0 {
            return Err(Error::Domain("lag order must be >= 1".into()));
        }
        if k >= self.len() {
            return Err(Error::Length(format!(
                "cannot lag `{}` ({} obs) by {k}",
                self.name,
                self.len()
            )));
        }
        let (base, prev) = split_lag_suffix(&self.name);
        Series::new(
            format!("{base}_lag{}", prev + k),
            self.start.add(k as i64),
            self.values[..self.len() - k].to_vec(),
        )
    }

    /// Subseries on the intersection of `[from, to]` with the span.
    pub fn slice(&self, from: QuarterDate, to: QuarterDate) -> Result<Series> {
        if from > to {
            return Err(Error::Range(format!("slice bounds reversed: {from} > {to}")));
        }
        let lo = from.max(self.start);
        let hi = to.min(self.end());
        if lo > hi {
            return Err(Error::Range(format!(
                "window {from}..{to} does not intersect `{}` span {}..{}",
                self.name,
                self.start,
                self.end()
            )));
        }
        let a = lo.quarters_since(self.start) as usize;
        let b = hi.quarters_since(self.start) as usize;
        Series::new(self.name.clone(), lo, self.values[a..=b].to_vec())
    }
}

fn split_lag_suffix(name: &str) -> (&str, usize) {
    if let Some((base, n)) = name.rsplit_once("_lag") {
        if let Ok(n) = n.parse::<usize>() {
            return (base, n);
        }
    }
    (name, 0)
}

/// Equal-span columns sharing a start date.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    start: QuarterDate,
    len: usize,
    columns: Vec<Series>,
}

impl Frame {
    pub fn start(&self) -> QuarterDate {
        self.start
    }

    pub fn end(&self) -> QuarterDate {
        self.start.add(self.len as i64 - 1)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn columns(&self) -> &[Series] {
        &self.columns
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.columns.iter().map(|c| c.name())
    }

    pub fn column(&self, name: &str) -> Result<&Series> {
        self.columns
            .iter()
            .find(|c| c.name() == name)
            .ok_or_else(|| Error::Lookup(name.to_string()))
    }

    pub fn date_at(&self, index: usize) -> QuarterDate {
        self.start.add(index as i64)
    }

    /// Restrict every column to `[from, to]`.
    pub fn slice(&self, from: QuarterDate, to: QuarterDate) -> Result<Frame> {
        let cols = self
            .columns
            .iter()
            .map(|c| c.slice(from, to))
            .collect::<Result<Vec<_>>>()?;
        align(cols)
    }
}

/// Intersect spans and build a [`Frame`] over the maximal common window.
pub fn align(columns: Vec<Series>) -> Result<Frame> {
    if columns.is_empty() {
        return Err(Error::Range("align needs at least one column".into()));
    }
    for (i, c) in columns.iter().enumerate() {
        if columns[..i].iter().any(|o| o.name() == c.name()) {
            return Err(Error::Domain(format!("duplicate column `{}`", c.name())));
        }
    }
    let lo = columns.iter().map(Series::start).max().unwrap();
    let hi = columns.iter().map(Series::end).min().unwrap();
    if lo > hi {
        let spans: Vec<String> = columns
            .iter()
            .map(|c| format!("{} {}..{}", c.name(), c.start(), c.end()))
            .collect();
        return Err(Error::Range(format!(
            "columns have no common span: {}",
            spans.join("; ")
        )));
    }
    let columns = columns
        .iter()
        .map(|c| c.slice(lo, hi))
        .collect::<Result<Vec<_>>>()?;
    Ok(Frame {
        start: lo,
        len: (hi.quarters_since(lo) + 1) as usize,
        columns,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SummaryStats {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub mean: f64,
    pub q3: f64,
    pub max: f64,
}

/// Six-number summary with type-7 quantiles, `h = (n - 1) p`.
pub fn summary_stats(s: &Series) -> SummaryStats {
    let mut sorted = s.values().to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
    let n = sorted.len();
    SummaryStats {
        min: sorted[0],
        q1: quantile_sorted(&sorted, 0.25),
        median: quantile_sorted(&sorted, 0.5),
        mean: sorted.iter().sum::<f64>() / n as f64,
        q3: quantile_sorted(&sorted, 0.75),
        max: sorted[n - 1],
    }
}

fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> QuarterDate {
        s.parse().unwrap()
    }

    fn ser(start: &str, v: &[f64]) -> Series {
        Series::new("x", q(start), v.to_vec()).unwrap()
    }

    #[test]
    fn quarter_arithmetic() {
        assert_eq!(q("2009Q4").succ(), q("2010Q1"));
        assert_eq!(q("2010Q1").pred(), q("2009Q4"));
        assert_eq!(q("2021Q4").quarters_since(q("2009Q1")), 51);
        assert!(q("2009Q4") < q("2010Q1"));
        assert!(QuarterDate::new(2000, 5).is_err());
        assert!("2009-03".parse::<QuarterDate>().is_err());
        assert!("2009Q5".parse::<QuarterDate>().is_err());
        assert_eq!(q("1999Q3").to_string(), "1999Q3");
    }

    #[test]
    fn pct_change_examples() {
        let s = ser("2009Q1", &[100.0, 110.0]).pct_change(1).unwrap();
        assert!((s.values()[0] - 0.10).abs() < 1e-15);
        assert_eq!(s.start(), q("2009Q2"));
        let s = ser("2009Q1", &[100.0, 100.0, 100.0]).pct_change(1).unwrap();
        assert_eq!(s.values(), &[0.0, 0.0]);
        let s = ser("2009Q1", &[100.0, 105.0, 110.25]).pct_change(2).unwrap();
        assert!((s.values()[0] - 0.1025).abs() < 1e-12);
        assert_eq!(s.len(), 1);
    }

    #[test]
    fn pct_change_errors() {
        let e = ser("2009Q1", &[100.0, 0.0, 3.0]).pct_change(1).unwrap_err();
        assert!(matches!(e, Error::Domain(ref m) if m.contains("2009Q2")));
        let e = ser("2009Q1", &[100.0]).pct_change(1).unwrap_err();
        assert!(matches!(e, Error::Length(_)));
    }

    #[test]
    fn lag_examples() {
        let s = ser("2009Q1", &[1.0, 2.0, 3.0]);
        let l1 = s.lag(1).unwrap();
        assert_eq!(l1.values(), &[1.0, 2.0]);
        assert_eq!(l1.start(), q("2009Q2"));
        assert_eq!(l1.name(), "x_lag1");
        let l2 = s.lag(2).unwrap();
        assert_eq!(l2.values(), &[1.0]);
        assert_eq!(l2.start(), q("2009Q3"));
        assert_eq!(l1.lag(1).unwrap(), l2);
        assert!(matches!(s.lag(3), Err(Error::Length(_))));
    }

    #[test]
    fn slice_examples() {
        let s = ser("2009Q1", &vec![1.0; 52]);
        assert_eq!(s.end(), q("2021Q4"));
        assert_eq!(s.slice(s.start(), s.end()).unwrap(), s);
        assert_eq!(s.slice(q("2009Q1"), q("2018Q4")).unwrap().len(), 40);
        assert!(matches!(
            s.slice(q("2050Q1"), q("2051Q1")),
            Err(Error::Range(_))
        ));
    }

    #[test]
    fn align_examples() {
        let a = Series::new("a", q("2009Q1"), vec![0.0; 40]).unwrap();
        let b = Series::new("b", q("2010Q1"), vec![1.0; 40]).unwrap();
        let f = align(vec![a.clone(), a.clone().with_name("a2")]).unwrap();
        assert_eq!((f.start(), f.end()), (a.start(), a.end()));
        let f = align(vec![a.clone(), b]).unwrap();
        assert_eq!(f.start(), q("2010Q1"));
        assert_eq!(f.end(), q("2018Q4"));
        assert!(f.columns().iter().all(|c| c.len() == f.len()));
        let c = Series::new("c", q("2030Q1"), vec![1.0; 4]).unwrap();
        assert!(matches!(align(vec![a, c]), Err(Error::Range(_))));
    }

    #[test]
    fn summary_examples() {
        let s = summary_stats(&ser("2000Q1", &[1.0, 2.0, 3.0, 4.0, 5.0]));
        assert_eq!(
            (s.min, s.q1, s.median, s.mean, s.q3, s.max),
            (1.0, 2.0, 3.0, 3.0, 4.0, 5.0)
        );
        let s = summary_stats(&ser("2000Q1", &[2.5; 7]));
        assert!([s.min, s.q1, s.median, s.mean, s.q3, s.max]
            .iter()
            .all(|&v| v == 2.5));
    }

    #[test]
    fn rejects_non_finite() {
        assert!(Series::new("x", q("2000Q1"), vec![1.0, f64::NAN]).is_err());
        assert!(Series::new("x", q("2000Q1"), vec![]).is_err());
    }
}
