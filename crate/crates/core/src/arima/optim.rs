//! Derivative-free simplex search followed by quasi-Newton refinement.
//!
//! Objectives may return `+inf` (or NaN) to mark inadmissible points.

#[derive(Debug, Clone)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    /// False when the iteration cap was reached before the stopping rule.
    pub converged: bool,
}

fn sanitize(v: f64) -> f64 {
    if v.is_nan() {
        f64::INFINITY
    } else {
        v
    }
}

pub struct NelderMead {
    pub step: f64,
    pub max_iter: usize,
    pub f_tol: f64,
    pub x_tol: f64,
}

impl Default for NelderMead {
    fn default() -> Self {
        Self {
            step: 0.1,
            max_iter: 2000,
            f_tol: 1e-10,
            x_tol: 1e-8,
        }
    }
}

impl NelderMead {
    pub fn minimize<F: FnMut(&[f64]) -> f64>(&self, mut f: F, x0: &[f64]) -> Minimum {
        let n = x0.len();
        let mut eval = |x: &[f64]| sanitize(f(x));
        if n == 0 {
            return Minimum {
                x: vec![],
                value: eval(&[]),
                iterations: 0,
                converged: true,
            };
        }
        let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
        simplex.push((x0.to_vec(), eval(x0)));
        for i in 0..n {
            let mut x = x0.to_vec();
            x[i] += if x[i].abs() > 1.0 { self.step * x[i].abs() } else { self.step };
            let v = eval(&x);
            simplex.push((x, v));
        }
        let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
        let mut iterations = 0;
        let mut converged = false;
        while iterations < self.max_iter {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            let best = simplex[0].1;
            let worst = simplex[n].1;
            let spread = (worst - best).abs();
            let size = simplex[1..]
                .iter()
                .flat_map(|(x, _)| x.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()))
                .fold(0.0f64, f64::max);
            if best.is_finite() && spread <= self.f_tol * (1.0 + best.abs()) && size <= self.x_tol {
                converged = true;
                break;
            }
            iterations += 1;
            let centroid: Vec<f64> = (0..n)
                .map(|j| simplex[..n].iter().map(|(x, _)| x[j]).sum::<f64>() / n as f64)
                .collect();
            let along = |t: f64| -> Vec<f64> {
                centroid
                    .iter()
                    .zip(&simplex[n].0)
                    .map(|(c, w)| c + t * (c - w))
                    .collect()
            };
            let xr = along(alpha);
            let fr = eval(&xr);
            if fr < simplex[0].1 {
                let xe = along(gamma);
                let fe = eval(&xe);
                simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
                continue;
            }
            if fr < simplex[n - 1].1 {
                simplex[n] = (xr, fr);
                continue;
            }
            let (xc, fc) = if fr < simplex[n].1 {
                let xc = along(rho);
                let fc = eval(&xc);
                (xc, fc)
            } else {
                let xc = along(-rho);
                let fc = eval(&xc);
                (xc, fc)
            };
            if fc < fr.min(simplex[n].1) {
                simplex[n] = (xc, fc);
                continue;
            }
            let x_best = simplex[0].0.clone();
            for item in simplex.iter_mut().skip(1) {
                let x: Vec<f64> = x_best
                    .iter()
                    .zip(&item.0)
                    .map(|(b, xi)| b + sigma * (xi - b))
                    .collect();
                let v = eval(&x);
                *item = (x, v);
            }
        }
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let (x, value) = simplex.swap_remove(0);
        Minimum {
            x,
            value,
            iterations,
            converged,
        }
    }
}

pub struct Bfgs {
    pub max_iter: usize,
    pub g_tol: f64,
    pub f_tol: f64,
}

impl Default for Bfgs {
    fn default() -> Self {
        Self {
            max_iter: 200,
            g_tol: 1e-7,
            f_tol: 1e-13,
        }
    }
}

fn gradient<F: FnMut(&[f64]) -> f64>(f: &mut F, x: &[f64], fx: f64) -> Vec<f64> {
    let mut g = vec![0.0; x.len()];
    let mut xp = x.to_vec();
    for i in 0..x.len() {
        let h = 1e-6 * (1.0 + x[i].abs());
        xp[i] = x[i] + h;
        let fp = sanitize(f(&xp));
        xp[i] = x[i] - h;
        let fm = sanitize(f(&xp));
        xp[i] = x[i];
        g[i] = if fp.is_finite() && fm.is_finite() {
            (fp - fm) / (2.0 * h)
        } else if fp.is_finite() {
            (fp - fx) / h
        } else if fm.is_finite() {
            (fx - fm) / h
        } else {
            0.0
        };
    }
    g
}

impl Bfgs {
    pub fn minimize<F: FnMut(&[f64]) -> f64>(&self, mut f: F, x0: &[f64]) -> Minimum {
        let n = x0.len();
        let mut x = x0.to_vec();
        let mut fx = sanitize(f(&x));
        if n == 0 || !fx.is_finite() {
            return Minimum {
                x,
                value: fx,
                iterations: 0,
                converged: n == 0,
            };
        }
        let mut g = gradient(&mut f, &x, fx);
        // inverse Hessian approximation, row-major
        let mut hinv = identity(n);
        let mut converged = false;
        let mut iterations = 0;
        while iterations < self.max_iter {
            if g.iter().fold(0.0f64, |m, v| m.max(v.abs())) <= self.g_tol {
                converged = true;
                break;
            }
            iterations += 1;
            let mut d: Vec<f64> = (0..n)
                .map(|i| -(0..n).map(|j| hinv[i * n + j] * g[j]).sum::<f64>())
                .collect();
            let mut slope: f64 = d.iter().zip(&g).map(|(a, b)| a * b).sum();
            if slope >= 0.0 {
                hinv = identity(n);
                d = g.iter().map(|v| -v).collect();
                slope = -g.iter().map(|v| v * v).sum::<f64>();
            }
            let mut t = 1.0;
            let mut accepted = None;
            for _ in 0..40 {
                let xn: Vec<f64> = x.iter().zip(&d).map(|(a, b)| a + t * b).collect();
                let fnew = sanitize(f(&xn));
                if fnew.is_finite() && fnew <= fx + 1e-4 * t * slope {
                    accepted = Some((xn, fnew));
                    break;
                }
                t *= 0.5;
            }
            let Some((xn, fnew)) = accepted else {
                // no descent possible along the quasi-Newton direction
                converged = true;
                break;
            };
            let gn = gradient(&mut f, &xn, fnew);
            let s: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
            let yv: Vec<f64> = gn.iter().zip(&g).map(|(a, b)| a - b).collect();
            let sy: f64 = s.iter().zip(&yv).map(|(a, b)| a * b).sum();
            let df = fx - fnew;
            x = xn;
            g = gn;
            fx = fnew;
            if sy > 1e-12 {
                let hy: Vec<f64> = (0..n)
                    .map(|i| (0..n).map(|j| hinv[i * n + j] * yv[j]).sum())
                    .collect();
                let yhy: f64 = yv.iter().zip(&hy).map(|(a, b)| a * b).sum();
                for i in 0..n {
                    for j in 0..n {
                        hinv[i * n + j] += (sy + yhy) * s[i] * s[j] / (sy * sy)
                            - (hy[i] * s[j] + s[i] * hy[j]) / sy;
                    }
                }
            }
            if df.abs() <= self.f_tol * (1.0 + fx.abs()) {
                converged = true;
                break;
            }
        }
        Minimum {
            x,
            value: fx,
            iterations,
            converged,
        }
    }
}

fn identity(n: usize) -> Vec<f64> {
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        m[i * n + i] = 1.0;
    }
    m
}
