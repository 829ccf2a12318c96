//! Synthetic two-regime dataset used by the bundled example config.
//!
//! Inflation has mean 0.03 until 2007Q4; from 2008Q1 it follows a
//! regression on contemporaneous expectations, the output gap at lag 2 and
//! imported inflation at lag 1. The CSV carries a price index, so the
//! config recovers inflation with `pct_change(1)`.

use std::fmt::Write as _;
use std::path::Path;

use infcast_core::arima::{simulate, ArimaParams, ArimaSpec};
use infcast_core::{QuarterDate, Result};

pub const START: (i32, u8) = (1989, 4);
pub const LEN: usize = 133;
pub const BREAK: (i32, u8) = (2008, 1);

pub const CONFIG: &str = r#"# Synthetic example: inflation from a price index with a regime change in 2008Q1.
data_file = "synthetic.csv"
date_column = "date"
target = "cpi"
covariates = ["expectations", "gap", "imports", "fx"]
transforms = { cpi = "pct_change(1)", fx = "log" }
sample_start = "2009Q1"
sample_end = "2022Q4"
split = "2021Q4"
horizon = 4
output_dir = "output"

break_scan = true
break_max = 3
break_trim = 0.15

max_p = 3
max_q = 3
arima_intercept = "search"

lag_menu = { expectations = [0, 1, 2], gap = [0, 1, 2, 3, 4], imports = [0, 1, 2], fx = [0] }
regression_intercept = "search"

subsidiary_max_p = 3
subsidiary_max_q = 1

adf_max_lag = 8
adf_fixed_lag = 4
diagnostic_lags = 8
"#;

fn draw(p: usize, q: usize, ar: Vec<f64>, ma: Vec<f64>, mean: f64, sd: f64, seed: u64) -> Result<Vec<f64>> {
    let spec = ArimaSpec::arima(p, 0, q, true)?;
    Ok(simulate(&spec, &ArimaParams::new(ar, ma, mean, sd * sd), LEN, seed)?.values().to_vec())
}

/// CSV text of the synthetic dataset; deterministic.
pub fn synthetic_csv() -> Result<String> {
    let expectations = draw(2, 0, vec![1.2631, -0.3435], vec![], 0.035, 0.002, 101)?;
    let gap = draw(2, 0, vec![0.8, -0.2], vec![], 0.0, 0.01, 102)?;
    let imports = draw(0, 0, vec![], vec![], 0.01, 0.02, 103)?;
    let fx_steps = draw(0, 0, vec![], vec![], 0.005, 0.02, 104)?;
    let noise = draw(0, 0, vec![], vec![], 0.0, 1.0, 105)?;

    let start = QuarterDate::new(START.0, START.1)?;
    let brk = QuarterDate::new(BREAK.0, BREAK.1)?;
    let round6 = |v: f64| (v * 1e6).round() / 1e6;
    let mut out = String::from("date,cpi,expectations,gap,imports,fx\n");
    let mut cpi = 100.0f64;
    let mut log_fx = 500f64.ln();
    for t in 0..LEN {
        let date = start.add(t as i64);
        let (e, g, m) = (round6(expectations[t]), round6(gap[t]), round6(imports[t]));
        if t > 0 {
            let pi = if date < brk {
                0.03 + 0.004 * noise[t]
            } else {
                0.25 * e - 0.04 * round6(gap[t - 2]) + 0.02 * round6(imports[t - 1]) + 0.003 * noise[t]
            };
            cpi = (cpi * (1.0 + pi) * 1e4).round() / 1e4;
            log_fx += fx_steps[t];
        }
        let fx = (log_fx.exp() * 1e4).round() / 1e4;
        writeln!(out, "{date},{cpi},{e},{g},{m},{fx}").expect("string write");
    }
    Ok(out)
}

/// Write `synthetic.csv` and `synthetic.toml` into `dir`.
pub fn write_fixture(dir: &Path) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    let csv = synthetic_csv().map_err(std::io::Error::other)?;
    std::fs::write(dir.join("synthetic.csv"), csv)?;
    std::fs::write(dir.join("synthetic.toml"), CONFIG)
}
