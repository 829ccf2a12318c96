//! Distribution helpers used for p-values.

use statrs::distribution::{ChiSquared, ContinuousCDF, Normal, StudentsT};

pub fn normal_cdf(x: f64) -> f64 {
    Normal::standard().cdf(x)
}

pub fn normal_sf(x: f64) -> f64 {
    Normal::standard().sf(x)
}

pub fn normal_quantile(p: f64) -> f64 {
    Normal::standard().inverse_cdf(p)
}

pub fn chi2_cdf(x: f64, dof: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    ChiSquared::new(dof).expect("positive dof").cdf(x)
}

/// Upper tail `P(X > x)`.
pub fn chi2_sf(x: f64, dof: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    ChiSquared::new(dof).expect("positive dof").sf(x).clamp(0.0, 1.0)
}

/// Two-sided Student-t p-value for statistic `t`.
pub fn student_t_two_sided(t: f64, dof: f64) -> f64 {
    if t.is_nan() {
        return f64::NAN;
    }
    if t.is_infinite() {
        return 0.0;
    }
    let d = StudentsT::new(0.0, 1.0, dof).expect("positive dof");
    (2.0 * d.sf(t.abs())).clamp(0.0, 1.0)
}
