//! Radial profiles: parsed expressions in `r` with second-order jets.

mod expr;
mod growth;
mod jet;

use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

pub use expr::{Expr, Func};
pub use growth::{infer_drift, infer_log_weight, infer_positive, AsymptoticOrder, LogGrowth, OrderKind};
pub use jet::Jet2;

use crate::math;
use crate::quadrature::{integrate_tol, Tolerance};
use crate::{Error, Result};

/// A scalar function of the radial coordinate.
///
/// The optional growth annotation is interpreted by the role the profile
/// plays: `ln w` for a warping function, `f` for a log-weight and `∫ θ`
/// for a drift. When absent it is inferred from the expression where
/// possible.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    expr: Arc<Expr>,
    growth: Option<LogGrowth>,
}

impl RadialProfile {
    pub fn parse(src: &str) -> Result<Self> {
        Ok(Self::from_expr(Expr::parse(src)?))
    }

    pub fn from_expr(expr: Expr) -> Self {
        RadialProfile { expr: Arc::new(expr), growth: None }
    }

    pub fn constant(c: f64) -> Self {
        Self::from_expr(Expr::Num(c))
    }

    pub fn with_growth(mut self, g: LogGrowth) -> Self {
        self.growth = Some(g);
        self
    }

    pub fn explicit_growth(&self) -> Option<LogGrowth> {
        self.growth
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    /// Value at `r`; NaN outside the domain.
    #[inline]
    pub fn value_unchecked(&self, r: f64) -> f64 {
        self.expr.eval(r)
    }

    #[inline]
    pub fn jet_unchecked(&self, r: f64) -> Jet2 {
        self.expr.eval_jet(r)
    }

    pub fn value(&self, r: f64) -> Result<f64> {
        let v = self.expr.eval(r);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Domain { r })
        }
    }

    /// Value and first two derivatives at `r`.
    pub fn jet(&self, r: f64) -> Result<Jet2> {
        let j = self.expr.eval_jet(r);
        if j.is_finite() {
            Ok(j)
        } else {
            Err(Error::Domain { r })
        }
    }

    /// Symbolic derivative. Its growth annotation, read in the drift role,
    /// is this profile's growth read as a log-weight.
    pub fn derivative(&self) -> RadialProfile {
        let d = RadialProfile::from_expr(self.expr.derivative());
        match self.growth.or_else(|| infer_log_weight(&self.expr)) {
            Some(g) => d.with_growth(g),
            None => d,
        }
    }

    /// Derivative of the given order (0, 1 or 2) at `r`.
    pub fn eval(&self, r: f64, order: u8) -> Result<f64> {
        let j = self.jet(r)?;
        match order {
            0 => Ok(j.v),
            1 => Ok(j.d1),
            2 => Ok(j.d2),
            _ => Err(Error::InvalidArgument(format!("derivative order {order} is not supported"))),
        }
    }
}

impl fmt::Display for RadialProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.expr.fmt(f)
    }
}

const WARPING_TOL: f64 = 1e-12;
const POSITIVITY_POINTS: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq)]
enum WarpingKind {
    SpaceForm(f64),
    LinearExponential(f64),
    General,
}

/// Warping function `w` of a model metric `dr^2 + w(r)^2 dθ^2`.
///
/// Construction checks `w(0) = 0`, `w'(0) = 1` and positivity on a
/// log-spaced sample of the domain.
#[derive(Debug, Clone, PartialEq)]
pub struct WarpingFunction {
    profile: RadialProfile,
    domain_sup: f64,
    kind: WarpingKind,
}

impl WarpingFunction {
    pub fn new(profile: RadialProfile, domain_sup: f64) -> Result<Self> {
        Self::build(profile, domain_sup, WarpingKind::General)
    }

    pub fn parse(src: &str) -> Result<Self> {
        Self::new(RadialProfile::parse(src)?, f64::INFINITY)
    }

    /// Warping of the simply connected space form of curvature `b`.
    pub fn space_form(b: f64) -> Result<Self> {
        if !b.is_finite() {
            return Err(Error::InvalidArgument(format!("curvature must be finite, got {b}")));
        }
        if b == 0.0 {
            let p = RadialProfile::parse("r")?.with_growth(LogGrowth::new(0.0, 0.0, 1.0));
            return Self::build(p, f64::INFINITY, WarpingKind::SpaceForm(0.0));
        }
        let s = math::sqrt(math::abs(b));
        let (func, sup, growth) =
            if b > 0.0 { ("sin", math::PI / s, None) } else { ("sinh", f64::INFINITY, Some(LogGrowth::new(0.0, s, 0.0))) };
        let mut p = RadialProfile::parse(&format!("{func}({s:?}*r)/{s:?}"))?;
        p.growth = growth;
        Self::build(p, sup, WarpingKind::SpaceForm(b))
    }

    /// `w(r) = r e^{α r}`.
    pub fn linear_exponential(alpha: f64) -> Result<Self> {
        let p = RadialProfile::parse(&format!("r*exp({alpha:?}*r)"))?.with_growth(LogGrowth::new(0.0, alpha, 1.0));
        Self::build(p, f64::INFINITY, WarpingKind::LinearExponential(alpha))
    }

    fn build(profile: RadialProfile, domain_sup: f64, kind: WarpingKind) -> Result<Self> {
        if !(domain_sup > 0.0) {
            return Err(Error::InvalidWarping(format!("domain supremum must be positive, got {domain_sup}")));
        }
        let j = profile.jet_unchecked(0.0);
        if !(math::abs(j.v) <= WARPING_TOL) {
            return Err(Error::InvalidWarping(format!("w(0) = {} is not 0", j.v)));
        }
        if !(math::abs(j.d1 - 1.0) <= WARPING_TOL) {
            return Err(Error::InvalidWarping(format!("w'(0) = {} is not 1", j.d1)));
        }
        let hi = if domain_sup.is_finite() { domain_sup * (1.0 - 1e-9) } else { 100.0 }.min(100.0);
        let (l0, l1) = (math::log(1e-8), math::log(hi));
        for i in 0..POSITIVITY_POINTS {
            let r = math::exp(l0 + (l1 - l0) * i as f64 / (POSITIVITY_POINTS - 1) as f64);
            let v = profile.value_unchecked(r);
            // An underflowed value still counts when its logarithm is finite.
            if !(v > 0.0 || (v == 0.0 && profile.expr.ln_jet(r).v.is_finite())) {
                return Err(Error::InvalidWarping(format!("w({r}) = {v} is not positive")));
            }
        }
        Ok(WarpingFunction { profile, domain_sup, kind })
    }

    pub fn profile(&self) -> &RadialProfile {
        &self.profile
    }

    pub fn domain_sup(&self) -> f64 {
        self.domain_sup
    }

    /// Curvature of the space form this warping came from, if any.
    pub fn space_form_curvature(&self) -> Option<f64> {
        match self.kind {
            WarpingKind::SpaceForm(b) => Some(b),
            _ => None,
        }
    }

    pub fn growth(&self) -> Option<LogGrowth> {
        if self.domain_sup.is_finite() {
            return None;
        }
        self.profile.growth.or_else(|| infer_positive(self.profile.expr()))
    }

    #[inline]
    pub fn value(&self, r: f64) -> f64 {
        self.profile.value_unchecked(r)
    }

    #[inline]
    pub fn jet(&self, r: f64) -> Jet2 {
        self.profile.jet_unchecked(r)
    }

    /// `(w'/w, w''/w)`, stable for large `r` on the built-in families.
    pub fn ratios(&self, r: f64) -> (f64, f64) {
        match self.kind {
            WarpingKind::SpaceForm(b) if b < 0.0 => {
                let s = math::sqrt(-b);
                (s / math::tanh(s * r), -b)
            }
            WarpingKind::SpaceForm(b) if b > 0.0 => {
                let s = math::sqrt(b);
                (s / math::tan(s * r), -b)
            }
            WarpingKind::SpaceForm(_) => (1.0 / r, 0.0),
            WarpingKind::LinearExponential(a) => (1.0 / r + a, 2.0 * a / r + a * a),
            WarpingKind::General => {
                let l = self.profile.expr.ln_jet(r);
                (l.d1, l.d2 + l.d1 * l.d1)
            }
        }
    }

    /// `ln w(r)`, stable for large `r` on the built-in families.
    pub fn ln_value(&self, r: f64) -> f64 {
        match self.kind {
            WarpingKind::SpaceForm(b) if b < 0.0 => {
                let s = math::sqrt(-b);
                math::ln_sinh(s * r) - math::log(s)
            }
            WarpingKind::SpaceForm(0.0) => math::log(r),
            WarpingKind::LinearExponential(a) => math::log(r) + a * r,
            _ => self.profile.expr.ln_jet(r).v,
        }
    }
}

/// The logarithm `f` of a radial density `e^f`.
#[derive(Debug, Clone, PartialEq)]
pub enum LogWeight {
    Zero,
    /// `f(r) - shift`
    Profile {
        f: RadialProfile,
        shift: f64,
    },
    /// `sign * ∫_anchor^r θ`
    Drift(IntegratedDrift),
}

impl LogWeight {
    /// `f` shifted so that it vanishes at the origin.
    pub fn anchored(f: RadialProfile) -> Result<Self> {
        let shift = f.value(0.0)?;
        Ok(LogWeight::Profile { f, shift })
    }

    /// `f` taken as given.
    pub fn raw(f: RadialProfile) -> Self {
        LogWeight::Profile { f, shift: 0.0 }
    }

    pub fn drift(theta: RadialProfile, anchor: f64, sign: f64) -> Self {
        LogWeight::Drift(IntegratedDrift::new(theta, anchor, sign))
    }

    #[inline]
    pub fn value(&self, r: f64) -> f64 {
        match self {
            LogWeight::Zero => 0.0,
            LogWeight::Profile { f, shift } => f.value_unchecked(r) - shift,
            LogWeight::Drift(d) => d.value(r),
        }
    }

    /// `(f, f', f'')` at `r`.
    pub fn jet(&self, r: f64) -> Jet2 {
        match self {
            LogWeight::Zero => Jet2::constant(0.0),
            LogWeight::Profile { f, shift } => f.jet_unchecked(r) + (-shift),
            LogWeight::Drift(d) => d.jet(r),
        }
    }

    pub fn growth(&self) -> Option<LogGrowth> {
        match self {
            LogWeight::Zero => Some(LogGrowth::ZERO),
            LogWeight::Profile { f, .. } => f.growth.or_else(|| infer_log_weight(f.expr())),
            LogWeight::Drift(d) => d.growth(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, LogWeight::Zero)
    }

    /// `f'` as a profile.
    pub fn derivative(&self) -> RadialProfile {
        match self {
            LogWeight::Zero => RadialProfile::constant(0.0).with_growth(LogGrowth::ZERO),
            LogWeight::Profile { f, .. } => f.derivative(),
            LogWeight::Drift(d) if d.sign == 1.0 => d.theta.clone(),
            LogWeight::Drift(d) => {
                let e = Expr::Mul(alloc::boxed::Box::new(Expr::Num(d.sign)), alloc::boxed::Box::new((*d.theta.expr).clone()));
                let p = RadialProfile::from_expr(e);
                match d.growth() {
                    Some(g) => p.with_growth(g),
                    None => p,
                }
            }
        }
    }
}

/// `sign * ∫_anchor^r θ(s) ds`, exact for polynomial `θ` and by quadrature otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegratedDrift {
    theta: RadialProfile,
    anchor: f64,
    sign: f64,
    antiderivative: Option<Vec<f64>>,
}

impl IntegratedDrift {
    pub fn new(theta: RadialProfile, anchor: f64, sign: f64) -> Self {
        let antiderivative = growth::exact_polynomial(theta.expr()).map(|p| {
            let mut q = Vec::with_capacity(p.len() + 1);
            q.push(0.0);
            q.extend(p.iter().enumerate().map(|(i, c)| c / (i + 1) as f64));
            q
        });
        IntegratedDrift { theta, anchor, sign, antiderivative }
    }

    pub fn theta(&self) -> &RadialProfile {
        &self.theta
    }

    pub fn anchor(&self) -> f64 {
        self.anchor
    }

    pub fn sign(&self) -> f64 {
        self.sign
    }

    fn integral(&self, r: f64) -> f64 {
        if let Some(q) = &self.antiderivative {
            let horner = |x: f64| q.iter().rev().fold(0.0, |acc, c| acc * x + c);
            return horner(r) - horner(self.anchor);
        }
        let g = |s| self.theta.value_unchecked(s);
        integrate_tol(g, self.anchor, r, Tolerance::new(1e-300, 1e-13))
            .or_else(|_| integrate_tol(g, self.anchor, r, Tolerance::new(1e-14, 1e-10)))
            .map(|q| q.value)
            .unwrap_or(f64::NAN)
    }

    pub fn value(&self, r: f64) -> f64 {
        self.sign * self.integral(r)
    }

    pub fn jet(&self, r: f64) -> Jet2 {
        let t = self.theta.jet_unchecked(r);
        Jet2::new(self.value(r), self.sign * t.v, self.sign * t.d1)
    }

    pub fn growth(&self) -> Option<LogGrowth> {
        self.theta.growth.or_else(|| infer_drift(self.theta.expr())).map(|g| g.scale(self.sign))
    }
}

/// Log-spaced radii on `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return alloc::vec![lo];
    }
    let (a, b) = (math::log(lo), math::log(hi));
    let mut g: Vec<f64> = (0..n).map(|i| math::exp(a + (b - a) * i as f64 / (n - 1) as f64)).collect();
    g[0] = lo;
    g[n - 1] = hi;
    g
}

/// Evenly spaced radii on `[lo, hi]`.
pub fn linear_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return alloc::vec![lo];
    }
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn space_forms() {
        let h = WarpingFunction::space_form(-1.0).unwrap();
        assert!((h.value(1.0) - 1f64.sinh()).abs() < 1e-15);
        assert_eq!(h.growth(), Some(LogGrowth::new(0.0, 1.0, 0.0)));
        assert!((h.ln_value(800.0) - (800.0 - 2f64.ln())).abs() < 1e-12);
        let s = WarpingFunction::space_form(4.0).unwrap();
        assert!((s.domain_sup() - core::f64::consts::FRAC_PI_2).abs() < 1e-15);
        assert!((s.value(0.5) - 1f64.sin() / 2.0).abs() < 1e-15);
        assert_eq!(s.growth(), None);
        let e = WarpingFunction::space_form(0.0).unwrap();
        assert_eq!(e.value(3.0), 3.0);
    }

    #[test]
    fn warping_validation() {
        assert!(matches!(WarpingFunction::parse("r + 1"), Err(Error::InvalidWarping(_))));
        assert!(matches!(WarpingFunction::parse("2*r"), Err(Error::InvalidWarping(_))));
        assert!(matches!(WarpingFunction::parse("sin(r)"), Err(Error::InvalidWarping(_))));
        assert!(WarpingFunction::new(RadialProfile::parse("sin(r)").unwrap(), core::f64::consts::PI).is_ok());
        assert!(WarpingFunction::parse("r*exp(-r)").is_ok());
    }

    #[test]
    fn anchored_weight_vanishes_at_origin() {
        let f = LogWeight::anchored(RadialProfile::parse("3 + r").unwrap()).unwrap();
        assert_eq!(f.value(0.0), 0.0);
        assert_eq!(f.value(2.0), 2.0);
    }

    #[test]
    fn drift_integral_matches_antiderivative() {
        let poly = LogWeight::drift(RadialProfile::parse("-2*r + 1").unwrap(), 0.5, 1.0);
        let expect = |r: f64| (-r * r + r) - (-0.25 + 0.5);
        assert!((poly.value(2.0) - expect(2.0)).abs() < 1e-14);
        let quad = LogWeight::drift(RadialProfile::parse("cosh(r)/sinh(r)").unwrap(), 1.0, -1.0);
        let exact = -(3f64.sinh().ln() - 1f64.sinh().ln());
        assert!((quad.value(3.0) - exact).abs() < 1e-12);
        let j = quad.jet(3.0);
        assert!((j.d1 + 1.0 / 3f64.tanh()).abs() < 1e-14);
        assert_eq!(quad.growth(), None);
    }

    #[test]
    fn eval_orders() {
        let p = RadialProfile::parse("r^3").unwrap();
        assert_eq!(p.eval(2.0, 0).unwrap(), 8.0);
        assert_eq!(p.eval(2.0, 1).unwrap(), 12.0);
        assert_eq!(p.eval(2.0, 2).unwrap(), 12.0);
        assert!(p.eval(2.0, 3).is_err());
        assert!(matches!(RadialProfile::parse("log(r)").unwrap().value(0.0), Err(Error::Domain { .. })));
    }
}
