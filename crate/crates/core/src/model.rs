//! Weighted model spaces `(M^m_w, dr^2 + w(r)^2 dθ^2, e^{f(r)})`.

use alloc::format;

use crate::math;
use crate::profile::{Jet2, LogGrowth, LogWeight, RadialProfile, WarpingFunction};
use crate::quadrature::{integrate_tol, Tolerance};
use crate::{Error, Result};

/// Below this radius the isoperimetric quotient and the mean curvature of
/// geodesic spheres are taken from their Taylor expansions at the pole.
pub const SERIES_RADIUS: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedModelSpace {
    m: u32,
    w: WarpingFunction,
    f: LogWeight,
    sphere_area: f64,
}

impl WeightedModelSpace {
    /// Model with density `e^{f - f(0)}`.
    pub fn new(m: u32, w: WarpingFunction, f: RadialProfile) -> Result<Self> {
        Self::with_log_weight(m, w, LogWeight::anchored(f)?)
    }

    pub fn unweighted(m: u32, w: WarpingFunction) -> Result<Self> {
        Self::with_log_weight(m, w, LogWeight::Zero)
    }

    /// Model with an arbitrary log-weight, used as given.
    pub fn with_log_weight(m: u32, w: WarpingFunction, f: LogWeight) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidArgument(format!("dimension must be at least 2, got {m}")));
        }
        let sphere_area = math::unit_sphere_area(m as f64);
        Ok(WeightedModelSpace { m, w, f, sphere_area })
    }

    pub fn dim(&self) -> u32 {
        self.m
    }

    pub fn warping(&self) -> &WarpingFunction {
        &self.w
    }

    pub fn log_weight(&self) -> &LogWeight {
        &self.f
    }

    /// Area of the unit sphere `S^{m-1}`.
    pub fn unit_sphere_area(&self) -> f64 {
        self.sphere_area
    }

    pub fn domain_sup(&self) -> f64 {
        self.w.domain_sup()
    }

    fn check_radius(&self, r: f64, allow_zero: bool) -> Result<()> {
        let ok = if allow_zero { r >= 0.0 } else { r > 0.0 };
        if !ok || !(r < self.domain_sup()) {
            return Err(Error::InvalidArgument(format!("radius {r} outside the model domain (0, {})", self.domain_sup())));
        }
        Ok(())
    }

    /// `w^{m-1}(r) e^{f(r)}`, the weighted area density of geodesic spheres.
    #[inline]
    pub fn area_density(&self, r: f64) -> f64 {
        if r == 0.0 {
            return 0.0;
        }
        math::exp((self.m - 1) as f64 * self.w.ln_value(r) + self.f.value(r))
    }

    /// `w^{1-m}(r) e^{-f(r)}`, the flux density of radial capacity potentials.
    #[inline]
    pub fn flux_density(&self, r: f64) -> f64 {
        math::exp((1.0 - self.m as f64) * self.w.ln_value(r) - self.f.value(r))
    }

    /// Growth of `ln(w^{m-1} e^f)` at infinity.
    pub fn area_growth(&self) -> Option<LogGrowth> {
        let (w, f) = (self.w.growth()?, self.f.growth()?);
        Some(w.scale((self.m - 1) as f64).plus(f))
    }

    /// `∫_0^R w^{m-1} e^f`, the weighted volume without the sphere constant.
    pub fn volume_integral(&self, big_r: f64) -> Result<f64> {
        self.check_radius(big_r, true)?;
        Ok(integrate_tol(|t| self.area_density(t), 0.0, big_r, Tolerance::PRECISE)?.value)
    }

    /// Weighted volume of the geodesic ball `B_R`.
    pub fn volume_ball(&self, big_r: f64) -> Result<f64> {
        Ok(self.sphere_area * self.volume_integral(big_r)?)
    }

    /// Weighted area of the geodesic sphere `∂B_R`.
    pub fn area_sphere(&self, big_r: f64) -> Result<f64> {
        self.check_radius(big_r, true)?;
        finite(self.sphere_area * self.area_density(big_r), big_r)
    }

    /// `Vol_f(B_R) / Vol_f(∂B_R)`.
    pub fn iso_quotient(&self, big_r: f64) -> Result<f64> {
        self.check_radius(big_r, true)?;
        if big_r < SERIES_RADIUS {
            return Ok(self.iso_quotient_series(big_r));
        }
        finite(self.volume_integral(big_r)? / self.area_density(big_r), big_r)
    }

    // With w = r + w2 r^2/2 + ... and f = f1 r + ..., the density is
    // r^{m-1}(1 + α r + ...) where α = (m-1) w2/2 + f1, giving
    // q(R) = R/m - α R^2 / (m (m+1)) + O(R^3).
    fn iso_quotient_series(&self, big_r: f64) -> f64 {
        let m = self.m as f64;
        let alpha = 0.5 * (m - 1.0) * self.w.jet(0.0).d2 + self.f.jet(0.0).d1;
        big_r / m - alpha * big_r * big_r / (m * (m + 1.0))
    }

    /// `w'/w`, the mean curvature of the geodesic sphere of radius `r`.
    pub fn sphere_mean_curvature(&self, r: f64) -> Result<f64> {
        self.check_radius(r, false)?;
        if r < SERIES_RADIUS {
            return Ok(1.0 / r + 0.5 * self.w.jet(0.0).d2);
        }
        Ok(self.warp_ratios(r)?.0)
    }

    // (w'/w, w''/w)
    fn warp_ratios(&self, r: f64) -> Result<(f64, f64)> {
        self.check_radius(r, false)?;
        let (eta, lam) = self.w.ratios(r);
        if eta.is_finite() && lam.is_finite() && self.w.ln_value(r).is_finite() {
            Ok((eta, lam))
        } else {
            Err(Error::Domain { r })
        }
    }

    fn weight_jet(&self, r: f64) -> Result<Jet2> {
        let j = self.f.jet(r);
        if j.is_finite() {
            Ok(j)
        } else {
            Err(Error::Domain { r })
        }
    }

    /// `f'(r)`, the radial derivative of the log-weight.
    pub fn weight_derivative(&self, r: f64) -> Result<f64> {
        Ok(self.weight_jet(r)?.d1)
    }

    /// Sectional curvature `-w''/w` of planes containing `∂_r`.
    pub fn radial_sec(&self, r: f64) -> Result<f64> {
        Ok(-self.warp_ratios(r)?.1)
    }

    /// `Ric(∂_r, ∂_r) = -(m-1) w''/w`.
    pub fn radial_ric(&self, r: f64) -> Result<f64> {
        Ok((self.m - 1) as f64 * self.radial_sec(r)?)
    }

    fn check_q(q: f64) -> Result<()> {
        if !(q > 0.0) {
            return Err(Error::InvalidArgument(format!("q must be positive or infinite, got {q}")));
        }
        Ok(())
    }

    /// Radial `q`-Bakry-Émery Ricci curvature; `q = f64::INFINITY` gives the `∞` version.
    pub fn radial_ric_h(&self, r: f64, q: f64) -> Result<f64> {
        Self::check_q(q)?;
        let f = self.weight_jet(r)?;
        let penalty = if q.is_infinite() { 0.0 } else { f.d1 * f.d1 / q };
        Ok(self.radial_ric(r)? - f.d2 - penalty)
    }

    /// Radial `q`-Bakry-Émery sectional curvature.
    pub fn radial_sec_h(&self, r: f64, q: f64) -> Result<f64> {
        Self::check_q(q)?;
        let f = self.weight_jet(r)?;
        let m1 = (self.m - 1) as f64;
        let penalty = if q.is_infinite() { 0.0 } else { f.d1 * f.d1 / (m1 * q) };
        Ok(self.radial_sec(r)? - f.d2 / m1 - penalty)
    }

    /// Weighted Laplacian of the distance, `(m-1) w'/w + f'`.
    pub fn laplacian_distance(&self, r: f64) -> Result<f64> {
        Ok((self.m - 1) as f64 * self.warp_ratios(r)?.0 + self.weight_jet(r)?.d1)
    }

    /// `Hess r(X, X) = w'/w` for unit `X` orthogonal to `∂_r`.
    pub fn hessian_distance(&self, r: f64) -> Result<f64> {
        Ok(self.warp_ratios(r)?.0)
    }
}

fn finite(v: f64, r: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Domain { r })
    }
}
