//! Harvey state-space form of a zero-mean ARMA process and its exact
//! Kalman filter.
//!
//! With `r = max(p, q + 1)` the state evolves as `a_{t+1} = T a_t + R e_t`
//! where `T` has `phi` in its first column and ones on the superdiagonal,
//! `R = (1, theta_1, .., theta_{r-1})'`, and the observation is the first
//! state element. Covariances are kept in units of the innovation variance
//! so that it can be profiled out of the likelihood.

use std::f64::consts::PI;

/// Dense `r x r` row-major matrix helpers for the small state dimension.
#[derive(Debug, Clone)]
pub struct StateSpace {
    r: usize,
    /// `phi` padded to length `r`.
    phi: Vec<f64>,
    /// `(1, theta_1, ..)` padded to length `r`.
    rvec: Vec<f64>,
}

impl StateSpace {
    /// `phi[i]` is the coefficient on lag `i + 1`, likewise `theta`.
    pub fn new(phi: &[f64], theta: &[f64]) -> Self {
        let r = phi.len().max(theta.len() + 1);
        let mut p = phi.to_vec();
        p.resize(r, 0.0);
        let mut rv = vec![1.0];
        rv.extend_from_slice(theta);
        rv.resize(r, 0.0);
        Self { r, phi: p, rvec: rv }
    }

    pub fn dim(&self) -> usize {
        self.r
    }

    /// `T a`.
    fn t_vec(&self, a: &[f64]) -> Vec<f64> {
        let r = self.r;
        (0..r)
            .map(|i| self.phi[i] * a[0] + if i + 1 < r { a[i + 1] } else { 0.0 })
            .collect()
    }

    /// `T M` for row-major `M`.
    fn t_mat(&self, m: &[f64]) -> Vec<f64> {
        let r = self.r;
        let mut out = vec![0.0; r * r];
        for i in 0..r {
            for j in 0..r {
                let below = if i + 1 < r { m[(i + 1) * r + j] } else { 0.0 };
                out[i * r + j] = self.phi[i] * m[j] + below;
            }
        }
        out
    }

    /// `T M T'` for symmetric `M`.
    fn t_sandwich(&self, m: &[f64]) -> Vec<f64> {
        let r = self.r;
        let tm = self.t_mat(m);
        // (T M) T' = (T (T M)')' and T M T' is symmetric.
        let mut tmt = vec![0.0; r * r];
        for i in 0..r {
            for j in 0..r {
                let right = if j + 1 < r { tm[i * r + j + 1] } else { 0.0 };
                tmt[i * r + j] = self.phi[j] * tm[i * r] + right;
            }
        }
        tmt
    }

    fn rrt(&self) -> Vec<f64> {
        let r = self.r;
        let mut out = vec![0.0; r * r];
        for i in 0..r {
            for j in 0..r {
                out[i * r + j] = self.rvec[i] * self.rvec[j];
            }
        }
        out
    }

    /// Stationary state covariance `P = T P T' + R R'` by the doubling
    /// iteration. Requires a stationary `phi`.
    pub fn stationary_covariance(&self) -> Vec<f64> {
        let r = self.r;
        let mut p = self.rrt();
        // A_k = T^(2^k); P_{k+1} = P_k + A_k P_k A_k'
        let mut a: Vec<f64> = {
            let mut t = vec![0.0; r * r];
            for i in 0..r {
                t[i * r] = self.phi[i];
                if i + 1 < r {
                    t[i * r + i + 1] = 1.0;
                }
            }
            t
        };
        for _ in 0..64 {
            let apa = mul(&mul(&a, &p, r), &transpose(&a, r), r);
            let scale = p.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let delta = apa.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            for (pi, d) in p.iter_mut().zip(&apa) {
                *pi += d;
            }
            if delta <= 1e-17 * scale {
                break;
            }
            a = mul(&a, &a, r);
        }
        symmetrize(&mut p, r);
        p
    }
}

fn mul(a: &[f64], b: &[f64], r: usize) -> Vec<f64> {
    let mut out = vec![0.0; r * r];
    for i in 0..r {
        for k in 0..r {
            let aik = a[i * r + k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..r {
                out[i * r + j] += aik * b[k * r + j];
            }
        }
    }
    out
}

fn transpose(a: &[f64], r: usize) -> Vec<f64> {
    let mut out = vec![0.0; r * r];
    for i in 0..r {
        for j in 0..r {
            out[j * r + i] = a[i * r + j];
        }
    }
    out
}

fn symmetrize(p: &mut [f64], r: usize) {
    for i in 0..r {
        for j in (i + 1)..r {
            let m = 0.5 * (p[i * r + j] + p[j * r + i]);
            p[i * r + j] = m;
            p[j * r + i] = m;
        }
    }
}

/// Filter output in unit-variance scale.
#[derive(Debug, Clone)]
pub struct FilterOutput {
    /// One-step prediction errors `v_t`.
    pub innovations: Vec<f64>,
    /// Prediction variances `f_t` (multiply by sigma^2).
    pub variances: Vec<f64>,
    pub sum_log_f: f64,
    pub sum_v2_over_f: f64,
    /// Predicted state and covariance for the period after the sample.
    pub next_state: Vec<f64>,
    pub next_cov: Vec<f64>,
}

impl FilterOutput {
    pub fn n(&self) -> usize {
        self.innovations.len()
    }

    /// Exact Gaussian log-likelihood at innovation variance `sigma2`.
    pub fn loglik(&self, sigma2: f64) -> f64 {
        let n = self.n() as f64;
        -0.5 * (n * (2.0 * PI).ln() + n * sigma2.ln() + self.sum_log_f + self.sum_v2_over_f / sigma2)
    }

    /// Maximizing innovation variance.
    pub fn sigma2_hat(&self) -> f64 {
        self.sum_v2_over_f / self.n() as f64
    }

    /// Log-likelihood with the innovation variance profiled out.
    pub fn profile_loglik(&self) -> f64 {
        self.loglik(self.sigma2_hat())
    }
}

/// Run the exact filter over zero-mean data `y` from the stationary initial
/// state. Once the covariance recursion settles the gain is frozen.
pub fn filter(ss: &StateSpace, y: &[f64]) -> FilterOutput {
    let r = ss.dim();
    let rrt = ss.rrt();
    let mut a = vec![0.0; r];
    let mut p = ss.stationary_covariance();
    let mut innovations = Vec::with_capacity(y.len());
    let mut variances = Vec::with_capacity(y.len());
    let (mut slf, mut sv2) = (0.0, 0.0);
    let mut steady: Option<(f64, Vec<f64>)> = None;
    for &yt in y {
        let v = yt - a[0];
        let (f, k) = match &steady {
            Some((f, k)) => (*f, k.clone()),
            None => {
                let f = p[0];
                let pz: Vec<f64> = (0..r).map(|i| p[i * r]).collect();
                let k: Vec<f64> = ss.t_vec(&pz).into_iter().map(|t| t / f).collect();
                (f, k)
            }
        };
        innovations.push(v);
        variances.push(f);
        slf += f.ln();
        sv2 += v * v / f;
        let ta = ss.t_vec(&a);
        for i in 0..r {
            a[i] = ta[i] + k[i] * v;
        }
        if steady.is_none() {
            let mut pn = ss.t_sandwich(&p);
            for i in 0..r {
                for j in 0..r {
                    pn[i * r + j] += rrt[i * r + j] - f * k[i] * k[j];
                }
            }
            symmetrize(&mut pn, r);
            let scale = pn.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let delta = pn
                .iter()
                .zip(&p)
                .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
            p = pn;
            if delta <= 1e-15 * scale.max(1.0) {
                let f = p[0];
                let pz: Vec<f64> = (0..r).map(|i| p[i * r]).collect();
                let k: Vec<f64> = ss.t_vec(&pz).into_iter().map(|t| t / f).collect();
                steady = Some((f, k));
            }
        }
    }
    FilterOutput {
        innovations,
        variances,
        sum_log_f: slf,
        sum_v2_over_f: sv2,
        next_state: a,
        next_cov: p,
    }
}

/// Mean path and error covariance (unit variance) of the next `h` values
/// given the filter's terminal prediction. `cov[i * h + j]` is the covariance
/// of the step `i + 1` and step `j + 1` forecast errors.
pub fn forecast(ss: &StateSpace, out: &FilterOutput, h: usize) -> (Vec<f64>, Vec<f64>) {
    let rrt = ss.rrt();
    let mut a = out.next_state.clone();
    let mut p = out.next_cov.clone();
    let mut means = Vec::with_capacity(h);
    let mut cov = vec![0.0; h * h];
    for i in 0..h {
        means.push(a[0]);
        // Cov(e_i, e_j) = [T^(j-i) P_i]_{00}
        let mut m = p.clone();
        for j in i..h {
            cov[i * h + j] = m[0];
            cov[j * h + i] = m[0];
            if j + 1 < h {
                m = ss.t_mat(&m);
            }
        }
        a = ss.t_vec(&a);
        let mut pn = ss.t_sandwich(&p);
        for (x, q) in pn.iter_mut().zip(&rrt) {
            *x += q;
        }
        p = pn;
    }
    (means, cov)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ar1_stationary_variance() {
        let ss = StateSpace::new(&[0.8], &[]);
        let p = ss.stationary_covariance();
        assert!((p[0] - 1.0 / (1.0 - 0.64)).abs() < 1e-12);
    }

    #[test]
    fn ma1_stationary_covariance() {
        let ss = StateSpace::new(&[], &[0.5]);
        let p = ss.stationary_covariance();
        // state (y_t, theta e_t): var y = 1 + theta^2
        assert!((p[0] - 1.25).abs() < 1e-14);
        assert!((p[1] - 0.5).abs() < 1e-14);
        assert!((p[3] - 0.25).abs() < 1e-14);
    }

    #[test]
    fn white_noise_filter() {
        let ss = StateSpace::new(&[], &[]);
        let y = [0.5, -1.0, 2.0];
        let out = filter(&ss, &y);
        assert_eq!(out.innovations, y.to_vec());
        assert!(out.variances.iter().all(|&f| (f - 1.0).abs() < 1e-15));
        let s2 = 2.0;
        let direct: f64 = y
            .iter()
            .map(|v| -0.5 * ((2.0 * PI * s2).ln() + v * v / s2))
            .sum();
        assert!((out.loglik(s2) - direct).abs() < 1e-12);
    }

    #[test]
    fn ar1_forecast_recursion() {
        let ss = StateSpace::new(&[0.6], &[]);
        let y = [0.3, -0.2, 1.5];
        let out = filter(&ss, &y);
        let (m, cov) = forecast(&ss, &out, 3);
        for h in 0..3 {
            assert!((m[h] - 0.6f64.powi(h as i32 + 1) * 1.5).abs() < 1e-12);
        }
        assert!((cov[0] - 1.0).abs() < 1e-12);
        assert!((cov[4] - 1.36).abs() < 1e-12);
        assert!((cov[1] - 0.6).abs() < 1e-12);
    }
}
