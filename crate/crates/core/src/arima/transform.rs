//! Maps between lag polynomials and partial autocorrelations.
//!
//! An AR polynomial `1 - phi_1 z - ... - phi_p z^p` has all roots outside the
//! unit circle exactly when its partial autocorrelations all lie in
//! `(-1, 1)`. Composing with `tanh` gives an unconstrained parameterization
//! of the stationary region; the MA block reuses it with `theta = -phi`.

/// Durbin-Levinson step-up: partial autocorrelations to AR coefficients.
pub fn pacf_to_ar(pacf: &[f64]) -> Vec<f64> {
    let mut phi: Vec<f64> = Vec::with_capacity(pacf.len());
    for (k, &a) in pacf.iter().enumerate() {
        let prev = phi.clone();
        for j in 0..k {
            phi[j] = prev[j] - a * prev[k - 1 - j];
        }
        phi.push(a);
    }
    phi
}

/// Step-down recursion. `None` when some partial autocorrelation has
/// modulus >= 1, i.e. the polynomial is not stationary.
pub fn ar_to_pacf(phi: &[f64]) -> Option<Vec<f64>> {
    let p = phi.len();
    let mut cur = phi.to_vec();
    let mut out = vec![0.0; p];
    for k in (0..p).rev() {
        let a = cur[k];
        if !a.is_finite() || a.abs() >= 1.0 {
            return None;
        }
        out[k] = a;
        let denom = 1.0 - a * a;
        let prev: Vec<f64> = (0..k).map(|j| (cur[j] + a * cur[k - 1 - j]) / denom).collect();
        cur.truncate(k);
        cur.copy_from_slice(&prev);
    }
    Some(out)
}

/// Roots of `1 - sum phi_i z^i` strictly outside the unit circle.
pub fn is_stationary(phi: &[f64]) -> bool {
    strip_trailing_zeros(phi).is_empty() || ar_to_pacf(strip_trailing_zeros(phi)).is_some()
}

/// Roots of `1 + sum theta_j z^j` strictly outside the unit circle.
pub fn is_invertible(theta: &[f64]) -> bool {
    let neg: Vec<f64> = theta.iter().map(|t| -t).collect();
    is_stationary(&neg)
}

fn strip_trailing_zeros(c: &[f64]) -> &[f64] {
    let end = c.iter().rposition(|&v| v != 0.0).map_or(0, |i| i + 1);
    &c[..end]
}

pub fn unconstrained_to_ar(u: &[f64]) -> Vec<f64> {
    pacf_to_ar(&u.iter().map(|v| v.tanh()).collect::<Vec<_>>())
}

pub fn ar_to_unconstrained(phi: &[f64]) -> Option<Vec<f64>> {
    ar_to_pacf(phi).map(|p| p.into_iter().map(f64::atanh).collect())
}

pub fn unconstrained_to_ma(u: &[f64]) -> Vec<f64> {
    unconstrained_to_ar(u).into_iter().map(|v| -v).collect()
}

pub fn ma_to_unconstrained(theta: &[f64]) -> Option<Vec<f64>> {
    ar_to_unconstrained(&theta.iter().map(|t| -t).collect::<Vec<_>>())
}
