//! Capacities, capacity potentials, parabolicity and mean exit times.

use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use crate::math;
use crate::model::WeightedModelSpace;
use crate::profile::{LogGrowth, LogWeight, RadialProfile, WarpingFunction};
use crate::quadrature::{classify_improper, integrate_tol, IntegralVerdict, Tolerance};
use crate::{Error, Result};

/// Tolerance for capacity integrals.
pub const CAPACITY_TOL: Tolerance = Tolerance { abs: 1e-300, rel: 1e-12 };

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParabolicityVerdict {
    Parabolic,
    Hyperbolic,
    Inconclusive,
}

impl fmt::Display for ParabolicityVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ParabolicityVerdict::Parabolic => "Parabolic",
            ParabolicityVerdict::Hyperbolic => "Hyperbolic",
            ParabolicityVerdict::Inconclusive => "Inconclusive",
        })
    }
}

impl From<IntegralVerdict> for ParabolicityVerdict {
    fn from(v: IntegralVerdict) -> Self {
        match v {
            IntegralVerdict::Converges { .. } => ParabolicityVerdict::Hyperbolic,
            IntegralVerdict::Diverges => ParabolicityVerdict::Parabolic,
            IntegralVerdict::Inconclusive => ParabolicityVerdict::Inconclusive,
        }
    }
}

/// Radial data `w^{1-k} e^{-f}` for a real effective dimension `k`.
///
/// With `k = m` and the model's own weight this is the flux density of the
/// weighted capacity potential; other choices give the potentials of the
/// drift operator `F'' + F'((k-1) w'/w + f')`.
#[derive(Debug, Clone, PartialEq)]
pub struct FluxDensity {
    w: WarpingFunction,
    k: f64,
    f: LogWeight,
}

impl FluxDensity {
    pub fn new(w: WarpingFunction, k: f64, f: LogWeight) -> Self {
        FluxDensity { w, k, f }
    }

    pub fn of_model(model: &WeightedModelSpace) -> Self {
        FluxDensity::new(model.warping().clone(), model.dim() as f64, model.log_weight().clone())
    }

    pub fn warping(&self) -> &WarpingFunction {
        &self.w
    }

    pub fn effective_dim(&self) -> f64 {
        self.k
    }

    pub fn log_weight(&self) -> &LogWeight {
        &self.f
    }

    #[inline]
    pub fn value(&self, r: f64) -> f64 {
        math::exp((1.0 - self.k) * self.w.ln_value(r) - self.f.value(r))
    }

    /// `(g, g')` with `g' = g ((1-k) w'/w - f')`.
    pub fn value_and_derivative(&self, r: f64) -> (f64, f64) {
        let f = self.f.jet(r);
        let g = self.value(r);
        (g, g * ((1.0 - self.k) * self.w.ratios(r).0 - f.d1))
    }

    /// Drift coefficient `(k-1) w'/w + f'` of the radial operator.
    pub fn drift(&self, r: f64) -> f64 {
        (self.k - 1.0) * self.w.ratios(r).0 + self.f.jet(r).d1
    }

    pub fn growth(&self) -> Option<LogGrowth> {
        Some(self.w.growth()?.scale(1.0 - self.k).plus(self.f.growth()?.scale(-1.0)))
    }

    /// `∫_a^b g`.
    pub fn integral(&self, a: f64, b: f64) -> Result<f64> {
        Ok(integrate_tol(|t| self.value(t), a, b, CAPACITY_TOL)?.value)
    }

    /// Classification and value of `∫_ρ^∞ g`.
    pub fn tail(&self, rho: f64) -> Result<IntegralVerdict> {
        if self.w.domain_sup().is_finite() {
            return Err(Error::InvalidArgument(format!(
                "the model is compact (radius {}); capacity at infinity is undefined",
                self.w.domain_sup()
            )));
        }
        let meta = self.growth().map(|g| g.order());
        classify_improper(|t| self.value(t), rho, meta, CAPACITY_TOL)
    }
}

/// Radial capacity potential of the annulus `ρ < r < R`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialPotential {
    density: FluxDensity,
    rho: f64,
    big_r: f64,
    denominator: f64,
}

impl RadialPotential {
    pub fn new(density: FluxDensity, rho: f64, big_r: f64) -> Result<Self> {
        let sup = density.w.domain_sup();
        if !(0.0 < rho && rho < big_r && big_r < sup) {
            return Err(Error::InvalidArgument(format!("need 0 < ρ < R < {sup}, got ρ = {rho}, R = {big_r}")));
        }
        let denominator = density.integral(rho, big_r)?;
        Ok(RadialPotential { density, rho, big_r, denominator })
    }

    pub fn inner(&self) -> f64 {
        self.rho
    }

    pub fn outer(&self) -> f64 {
        self.big_r
    }

    /// `∫_ρ^R g`.
    pub fn denominator(&self) -> f64 {
        self.denominator
    }

    pub fn value(&self, r: f64) -> Result<f64> {
        if r <= self.rho {
            return Ok(1.0);
        }
        if r >= self.big_r {
            return Ok(0.0);
        }
        Ok(self.density.integral(r, self.big_r)? / self.denominator)
    }

    pub fn derivative(&self, r: f64) -> f64 {
        -self.density.value(r) / self.denominator
    }

    pub fn second_derivative(&self, r: f64) -> f64 {
        -self.density.value_and_derivative(r).1 / self.denominator
    }

    /// `|φ'(ρ)|`, the flux through the inner sphere per unit weighted area.
    pub fn flux(&self) -> f64 {
        -self.derivative(self.rho)
    }

    /// `φ'' + φ' ((k-1) w'/w + f')`, which vanishes for the exact potential.
    pub fn ode_residual(&self, r: f64) -> f64 {
        self.second_derivative(r) + self.derivative(r) * self.density.drift(r)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CapacityResult {
    /// `Cap_f(B_ρ, B_R)`
    pub capacity: f64,
    pub potential: RadialPotential,
}

/// Weighted capacity of the capacitor `(B_ρ, B_R)` and its potential.
pub fn potential(model: &WeightedModelSpace, rho: f64, big_r: f64) -> Result<CapacityResult> {
    let potential = RadialPotential::new(FluxDensity::of_model(model), rho, big_r)?;
    Ok(CapacityResult { capacity: model.unit_sphere_area() / potential.denominator, potential })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapacityAtInfinity {
    /// `Cap_f(B_ρ)`; zero when parabolic, `None` when inconclusive.
    pub value: Option<f64>,
    pub verdict: ParabolicityVerdict,
    /// `∫_ρ^∞ w^{1-m} e^{-f}`
    pub tail: IntegralVerdict,
}

pub fn capacity_at_infinity(model: &WeightedModelSpace, rho: f64) -> Result<CapacityAtInfinity> {
    if !(rho > 0.0) {
        return Err(Error::InvalidArgument(format!("ρ must be positive, got {rho}")));
    }
    let tail = FluxDensity::of_model(model).tail(rho)?;
    let value = match tail {
        IntegralVerdict::Converges { value, .. } => Some(model.unit_sphere_area() / value),
        IntegralVerdict::Diverges => Some(0.0),
        IntegralVerdict::Inconclusive => None,
    };
    Ok(CapacityAtInfinity { value, verdict: tail.into(), tail })
}

/// Parabolic exactly when `∫_ρ^∞ w^{1-m} e^{-f}` diverges.
pub fn classify_parabolicity(model: &WeightedModelSpace, rho: f64) -> Result<ParabolicityVerdict> {
    Ok(capacity_at_infinity(model, rho)?.verdict)
}

/// Potential of the radial operator with effective dimension `k` and drift
/// `-θ`, i.e. with weight `f = -∫_ρ θ`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralizedPotential {
    pub potential: RadialPotential,
    pub flux: f64,
    pub tail: ParabolicityVerdict,
}

pub fn generalized_potential(w: &WarpingFunction, k: f64, theta: &RadialProfile, rho: f64, big_r: f64) -> Result<GeneralizedPotential> {
    if !(k > 1.0) {
        return Err(Error::InvalidArgument(format!("effective dimension must exceed 1, got {k}")));
    }
    let density = FluxDensity::new(w.clone(), k, LogWeight::drift(theta.clone(), rho, -1.0));
    let tail = if w.domain_sup().is_finite() { ParabolicityVerdict::Inconclusive } else { density.tail(rho)?.into() };
    let potential = RadialPotential::new(density, rho, big_r)?;
    Ok(GeneralizedPotential { flux: potential.flux(), potential, tail })
}

/// Mean exit time of `B_R` transplanted from the model:
/// `φ_R(s) = ∫_s^R q_{w,f}(t) dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExitTime {
    model: WeightedModelSpace,
    big_r: f64,
}

pub fn exit_time_transplant(model: &WeightedModelSpace, big_r: f64) -> Result<ExitTime> {
    if !(big_r > 0.0 && big_r < model.domain_sup()) {
        return Err(Error::InvalidArgument(format!("radius {big_r} outside the model domain")));
    }
    Ok(ExitTime { model: model.clone(), big_r })
}

impl ExitTime {
    pub fn radius(&self) -> f64 {
        self.big_r
    }

    pub fn value(&self, s: f64) -> Result<f64> {
        Ok(self.values_on(&[s])?[0])
    }

    /// `φ_R` at each of the given radii, which must be increasing and in `[0, R]`.
    ///
    /// The quotient on each segment is built from the volume accumulated at
    /// its left end, so every nested integral stays short.
    pub fn values_on(&self, nodes: &[f64]) -> Result<Vec<f64>> {
        let r = self.big_r;
        if nodes.windows(2).any(|p| p[0] > p[1]) || nodes.iter().any(|&s| !(0.0..=r).contains(&s)) {
            return Err(Error::InvalidArgument(format!("nodes must be increasing within [0, {r}]")));
        }
        let mut xs: Vec<f64> = Vec::with_capacity(nodes.len() + 2);
        xs.push(0.0);
        xs.extend(nodes.iter().copied().filter(|&s| s > 0.0));
        xs.push(r);
        xs.dedup();
        let m = &self.model;
        let mut segs = Vec::with_capacity(xs.len());
        let mut vol = 0.0;
        for win in xs.windows(2) {
            let (a, b) = (win[0], win[1]);
            let v0 = vol;
            let quotient = |t: f64| {
                if t < crate::model::SERIES_RADIUS {
                    return m.iso_quotient(t).unwrap_or(f64::NAN);
                }
                let inner = integrate_tol(|u| m.area_density(u), a, t, Tolerance::PRECISE).map(|q| q.value);
                inner.map(|i| (v0 + i) / m.area_density(t)).unwrap_or(f64::NAN)
            };
            segs.push(integrate_tol(quotient, a, b, Tolerance::PRECISE)?.value);
            vol += integrate_tol(|u| m.area_density(u), a, b, Tolerance::PRECISE)?.value;
        }
        // Suffix sums give φ at every breakpoint.
        let mut phi = alloc::vec![0.0; xs.len()];
        for i in (0..segs.len()).rev() {
            phi[i] = phi[i + 1] + segs[i];
        }
        Ok(nodes
            .iter()
            .map(|&s| {
                let i = xs.partition_point(|&x| x < s);
                phi[i]
            })
            .collect())
    }

    pub fn derivative(&self, s: f64) -> Result<f64> {
        Ok(-self.model.iso_quotient(s)?)
    }

    /// `φ'' + φ'((m-1) w'/w + f') + 1` with `φ''` from a central difference of `-q`.
    pub fn poisson_residual(&self, s: f64) -> Result<f64> {
        let h = 1e-4 * s.max(1e-2);
        let d2 = -(self.model.iso_quotient(s + h)? - self.model.iso_quotient(s - h)?) / (2.0 * h);
        Ok(d2 + self.derivative(s)? * self.model.laplacian_distance(s)? + 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    fn space(m: u32, b: f64) -> WeightedModelSpace {
        WeightedModelSpace::unweighted(m, WarpingFunction::space_form(b).unwrap()).unwrap()
    }

    #[test]
    fn euclidean_capacities() {
        let e3 = space(3, 0.0);
        let c = potential(&e3, 1.0, 2.0).unwrap();
        assert!((c.capacity - 8.0 * PI).abs() < 1e-12 * 8.0 * PI);
        assert!((c.potential.value(1.5).unwrap() - 1.0 / 3.0).abs() < 1e-13);
        let inf = capacity_at_infinity(&e3, 1.0).unwrap();
        assert!((inf.value.unwrap() - 4.0 * PI).abs() < 1e-9 * 4.0 * PI);
        assert_eq!(inf.verdict, ParabolicityVerdict::Hyperbolic);
        assert_eq!(classify_parabolicity(&space(2, 0.0), 1.0).unwrap(), ParabolicityVerdict::Parabolic);
    }

    #[test]
    fn hyperbolic_capacity_at_infinity() {
        let h3 = space(3, -1.0);
        let v = capacity_at_infinity(&h3, 1.0).unwrap().value.unwrap();
        let exact = 4.0 * PI / (1.0 / 1f64.tanh() - 1.0);
        assert!((v - exact).abs() < 1e-9 * exact);
    }

    #[test]
    fn potential_solves_ode() {
        let g = WeightedModelSpace::new(4, WarpingFunction::space_form(-0.5).unwrap(), RadialProfile::parse("0.3*r - 0.2*r^2").unwrap())
            .unwrap();
        let c = potential(&g, 0.5, 2.5).unwrap();
        for i in 0..50 {
            let r = 0.5 + 2.0 * i as f64 / 49.0;
            assert!(c.potential.ode_residual(r).abs() < 1e-10);
        }
    }

    #[test]
    fn compact_models_have_no_capacity_at_infinity() {
        assert!(capacity_at_infinity(&space(3, 1.0), 1.0).is_err());
    }

    #[test]
    fn generalized_potential_reduces_to_weighted() {
        // Drift -f' with k = m reproduces the weighted potential of (w, f).
        let f = RadialProfile::parse("0.5*r^2 - r").unwrap();
        let model = WeightedModelSpace::new(3, WarpingFunction::space_form(-1.0).unwrap(), f).unwrap();
        let cap = potential(&model, 0.8, 2.0).unwrap();
        let theta = RadialProfile::parse("-(r - 1)").unwrap();
        let gen = generalized_potential(model.warping(), 3.0, &theta, 0.8, 2.0).unwrap();
        for r in [0.9, 1.2, 1.7] {
            let (a, b) = (cap.potential.value(r).unwrap(), gen.potential.value(r).unwrap());
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
        let area = model.area_sphere(0.8).unwrap();
        assert!((gen.flux * area - cap.capacity).abs() < 1e-10 * cap.capacity);
    }

    #[test]
    fn euclidean_exit_time() {
        let e3 = space(3, 0.0);
        let t = exit_time_transplant(&e3, 1.0).unwrap();
        let vals = t.values_on(&[0.0, 0.25, 0.5, 1.0]).unwrap();
        for (s, v) in [0.0, 0.25, 0.5, 1.0].iter().zip(vals) {
            assert!((v - (1.0 - s * s) / 6.0).abs() < 1e-13);
        }
        assert!(t.poisson_residual(0.4).unwrap().abs() < 1e-7);
    }
}
