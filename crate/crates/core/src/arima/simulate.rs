use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{dense_polys, ArimaParams, ArimaSpec};
use crate::error::{Error, Result};
use crate::series::{QuarterDate, Series};

/// Gaussian sample path of length `n`, starting 2000Q1. A burn-in of
/// `10 * max_lag` draws is discarded; paths are deterministic per seed.
/// Integrated models start their levels at zero.
pub fn simulate(spec: &ArimaSpec, params: &ArimaParams, n: usize, seed: u64) -> Result<Series> {
    if n == 0 {
        return Err(Error::Length("simulate needs n >= 1".into()));
    }
    params.check(spec)?;
    let (phi, theta) = dense_polys(spec, &params.ar, &params.ma);
    let mu = if spec.intercept() { params.mean } else { 0.0 };
    let sd = params.sigma2.sqrt();
    let burn = 10 * spec.max_lag();
    let total = burn + n;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut e = vec![0.0; total];
    let mut z = vec![0.0; total];
    for t in 0..total {
        let draw: f64 = StandardNormal.sample(&mut rng);
        let et = sd * draw;
        e[t] = et;
        let mut v = et;
        for (i, &p) in phi.iter().enumerate() {
            if t > i {
                v += p * z[t - i - 1];
            }
        }
        for (j, &q) in theta.iter().enumerate() {
            if t > j {
                v += q * e[t - j - 1];
            }
        }
        z[t] = v;
    }
    let mut x: Vec<f64> = z[burn..].iter().map(|v| v + mu).collect();
    for _ in 0..spec.d() {
        let mut acc = 0.0;
        for v in x.iter_mut() {
            acc += *v;
            *v = acc;
        }
    }
    Series::new("simulated", QuarterDate::new(2000, 1)?, x)
}
