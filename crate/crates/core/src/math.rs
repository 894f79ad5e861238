// Thin aliases so the numeric code reads like ordinary f64 math without std.
pub(crate) use libm::{cos, cosh, exp, log, pow, sin, sinh, sqrt, tan, tanh, tgamma};

pub(crate) const PI: f64 = core::f64::consts::PI;

#[inline]
pub(crate) fn abs(x: f64) -> f64 {
    libm::fabs(x)
}

#[inline]
pub(crate) fn powi(x: f64, n: i32) -> f64 {
    libm::pow(x, n as f64)
}

/// Area of the unit sphere `S^{m-1}` in `R^m`.
pub(crate) fn unit_sphere_area(m: f64) -> f64 {
    2.0 * pow(PI, 0.5 * m) / tgamma(0.5 * m)
}

/// `ln(sinh x)` without overflow for large `x`.
pub(crate) fn ln_sinh(x: f64) -> f64 {
    if x > 20.0 {
        x - core::f64::consts::LN_2 + log(1.0 - exp(-2.0 * x))
    } else {
        log(sinh(x))
    }
}
