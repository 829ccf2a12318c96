//! Shared inputs for the benchmarks under `benches/`.

use infcast_core::arima::{simulate, ArimaParams, ArimaSpec};
use infcast_core::Series;

/// ARMA(1,1) with intercept, the workhorse univariate model.
pub fn arma11() -> (ArimaSpec, ArimaParams) {
    (
        ArimaSpec::arima(1, 0, 1, true).expect("valid spec"),
        ArimaParams::new(vec![0.6], vec![0.3], 0.02, 1e-4),
    )
}

pub fn arma11_series(n: usize, seed: u64) -> Series {
    let (spec, params) = arma11();
    simulate(&spec, &params, n, seed).expect("admissible parameters")
}

/// Two mean shifts at thirds of the sample.
pub fn shifted(n: usize, seed: u64) -> Vec<f64> {
    let base = arma11_series(n, seed);
    base.values()
        .iter()
        .enumerate()
        .map(|(i, v)| v + 0.01 * (3 * i / n) as f64)
        .collect()
}
