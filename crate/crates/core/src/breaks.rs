//! Multiple mean-shift break detection by global RSS minimization.
//!
//! For each break count `m`, a dynamic program over the segment-cost table
//! finds the partition into `m + 1` segments (each at least `h` long) with
//! the smallest total residual sum of squares around segment means. The
//! reported count minimizes `BIC = n ln(RSS_m / n) + 2 (m + 1) ln n`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::series::{QuarterDate, Series};

pub const DEFAULT_TRIM: f64 = 0.15;
pub const DEFAULT_MAX_BREAKS: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    /// Index of the first observation of each new regime.
    pub break_indices: Vec<usize>,
    pub rss: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BreakResult {
    /// First date of each new regime for the selected break count.
    pub break_dates: Vec<QuarterDate>,
    pub break_indices: Vec<usize>,
    pub segment_means: Vec<f64>,
    pub total_rss: f64,
    pub n_breaks_considered: usize,
    /// `(m, BIC)` for every feasible `m`, starting at 0.
    pub criterion_scores: Vec<(usize, f64)>,
    /// Optimal partition per feasible `m`.
    pub partitions: Vec<Partition>,
    pub trim: f64,
    pub min_segment: usize,
}

impl BreakResult {
    pub fn n_breaks(&self) -> usize {
        self.break_dates.len()
    }
}

/// `cost[i][j - i]` is the RSS of `x[i..=j]` around its mean, for segments of
/// length >= h; shorter entries are never read.
struct CostTable {
    rows: Vec<Vec<f64>>,
}

impl CostTable {
    fn new(x: &[f64], h: usize) -> Self {
        let n = x.len();
        let rows = (0..n)
            .into_par_iter()
            .map(|i| {
                let mut row = Vec::with_capacity(n - i);
                let (mut mean, mut m2) = (0.0, 0.0);
                for (k, &v) in x[i..].iter().enumerate() {
                    let d = v - mean;
                    mean += d / (k + 1) as f64;
                    m2 += d * (v - mean);
                    row.push(if k + 1 >= h { m2.max(0.0) } else { f64::NAN });
                }
                row
            })
            .collect();
        Self { rows }
    }

    fn get(&self, i: usize, j: usize) -> f64 {
        self.rows[i][j - i]
    }
}

/// Optimal partitions for `m = 0..=max_m` (only feasible ones returned).
pub fn optimal_partitions(x: &[f64], max_m: usize, h: usize) -> Vec<Partition> {
    let n = x.len();
    let h = h.max(1);
    let cost = CostTable::new(x, h);
    // best[m][j]: min RSS over x[0..=j] split into m + 1 segments.
    let mut best: Vec<Vec<f64>> = vec![vec![f64::INFINITY; n]; max_m + 1];
    let mut arg: Vec<Vec<usize>> = vec![vec![usize::MAX; n]; max_m + 1];
    for j in (h - 1)..n {
        best[0][j] = cost.get(0, j);
    }
    for m in 1..=max_m {
        if (m + 1) * h > n {
            break;
        }
        for j in ((m + 1) * h - 1)..n {
            // last segment (i + 1)..=j, previous split ends at i
            let mut b = f64::INFINITY;
            let mut a = usize::MAX;
            for i in (m * h - 1)..=(j - h) {
                let c = best[m - 1][i] + cost.get(i + 1, j);
                if c < b {
                    b = c;
                    a = i;
                }
            }
            best[m][j] = b;
            arg[m][j] = a;
        }
    }
    let mut out = Vec::new();
    for m in 0..=max_m {
        if (m + 1) * h > n {
            break;
        }
        let mut breaks = Vec::with_capacity(m);
        let mut j = n - 1;
        for mm in (1..=m).rev() {
            let i = arg[mm][j];
            breaks.push(i + 1);
            j = i;
        }
        breaks.reverse();
        out.push(Partition {
            break_indices: breaks,
            rss: best[m][n - 1],
        });
    }
    out
}

/// Detect up to `max_breaks` mean shifts in `s` with minimum segment length
/// `ceil(trim * n)`.
pub fn detect_breaks(s: &Series, max_breaks: usize, trim: f64) -> Result<BreakResult> {
    if max_breaks == 0 {
        return Err(Error::Domain("max_breaks must be >= 1".into()));
    }
    if !(trim > 0.0 && trim < 0.5) {
        return Err(Error::Domain(format!("trim must be in (0, 0.5), got {trim}")));
    }
    let x = s.values();
    let n = x.len();
    let h = ((trim * n as f64).ceil() as usize).max(1);
    if n < (max_breaks + 1) * h {
        return Err(Error::Size(format!(
            "`{}` has {n} observations; {max_breaks} breaks with minimum segment {h} need {}",
            s.name(),
            (max_breaks + 1) * h
        )));
    }
    let partitions = optimal_partitions(x, max_breaks, h);
    let nf = n as f64;
    let criterion_scores: Vec<(usize, f64)> = partitions
        .iter()
        .enumerate()
        .map(|(m, p)| {
            let fit = if p.rss > 0.0 {
                nf * (p.rss / nf).ln()
            } else {
                f64::NEG_INFINITY
            };
            (m, fit + 2.0 * (m + 1) as f64 * nf.ln())
        })
        .collect();
    let (chosen, _) = criterion_scores
        .iter()
        .fold((0usize, f64::INFINITY), |(bm, bs), &(m, sc)| {
            if sc < bs {
                (m, sc)
            } else {
                (bm, bs)
            }
        });
    let part = &partitions[chosen];
    let mut bounds = vec![0];
    bounds.extend(&part.break_indices);
    bounds.push(n);
    let segment_means = bounds
        .windows(2)
        .map(|w| x[w[0]..w[1]].iter().sum::<f64>() / (w[1] - w[0]) as f64)
        .collect();
    Ok(BreakResult {
        break_dates: part.break_indices.iter().map(|&i| s.date_at(i)).collect(),
        break_indices: part.break_indices.clone(),
        segment_means,
        total_rss: part.rss,
        n_breaks_considered: max_breaks,
        criterion_scores,
        partitions,
        trim,
        min_segment: h,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ser(v: Vec<f64>) -> Series {
        Series::new("pi", QuarterDate::new(1976, 1).unwrap(), v).unwrap()
    }

    #[test]
    fn constant_series_has_no_break() {
        let r = detect_breaks(&ser(vec![0.5; 60]), DEFAULT_MAX_BREAKS, DEFAULT_TRIM).unwrap();
        assert!(r.break_dates.is_empty());
        assert_eq!(r.total_rss, 0.0);
        assert_eq!(r.segment_means, vec![0.5]);
    }

    #[test]
    fn noise_free_step() {
        let mut v = vec![0.0; 40];
        v.extend(vec![1.0; 40]);
        let s = ser(v);
        let r = detect_breaks(&s, DEFAULT_MAX_BREAKS, DEFAULT_TRIM).unwrap();
        assert_eq!(r.break_indices, vec![40]);
        assert_eq!(r.break_dates, vec![s.date_at(40)]);
        assert_eq!(r.total_rss, 0.0);
        assert_eq!(r.segment_means, vec![0.0, 1.0]);
        // exhaustive single-break scan agrees
        let best = (12..=68)
            .map(|b| {
                let rss = |seg: &[f64]| {
                    let m = seg.iter().sum::<f64>() / seg.len() as f64;
                    seg.iter().map(|v| (v - m).powi(2)).sum::<f64>()
                };
                (rss(&s.values()[..b]) + rss(&s.values()[b..]), b)
            })
            .fold((f64::INFINITY, 0), |a, c| if c.0 < a.0 { c } else { a });
        assert_eq!(best.1, 40);
    }

    #[test]
    fn rss_non_increasing() {
        let v: Vec<f64> = (0..90).map(|i| ((i * 31) % 13) as f64 + if i > 50 { 4.0 } else { 0.0 }).collect();
        let r = detect_breaks(&ser(v), 4, 0.1).unwrap();
        for w in r.partitions.windows(2) {
            assert!(w[1].rss <= w[0].rss + 1e-9);
        }
        for p in &r.partitions {
            let mut b = vec![0];
            b.extend(&p.break_indices);
            b.push(90);
            assert!(b.windows(2).all(|w| w[1] - w[0] >= r.min_segment));
        }
    }

    #[test]
    fn infeasible_sizes() {
        assert!(matches!(detect_breaks(&ser(vec![0.0; 10]), 3, 0.3), Err(Error::Size(_))));
        assert!(detect_breaks(&ser(vec![0.0; 10]), 0, 0.15).is_err());
        assert!(detect_breaks(&ser(vec![0.0; 10]), 1, 0.5).is_err());
    }
}
