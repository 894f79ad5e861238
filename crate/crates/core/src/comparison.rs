//! Comparison of an ambient weighted model against a comparison model.
//!
//! Each [`Theorem`] pairs curvature and weight hypotheses on the ambient
//! space with inequalities between ambient and comparison quantities. The
//! checks evaluate both sides on a grid of radii and report scale-aware
//! margins, positive when the stated relation holds.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::capacity::FluxDensity;
use crate::math;
use crate::model::WeightedModelSpace;
use crate::profile::{log_grid, LogWeight, RadialProfile, WarpingFunction};
use crate::quadrature::{integrate_tol, IntegralVerdict, Tolerance};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Theorem {
    /// Quotient and volume bounds from `Ric^h_∞` and a non-decreasing drift bound.
    IsoperimetricInfinity,
    /// Capacity bounds from `Ric^h_∞` and a non-decreasing drift bound.
    CapacityInfinity,
    /// Quotient and volume bounds from `Ric` and `<∇h, ∇r> <= θ`.
    IsoperimetricRicci,
    /// Reversed quotient and volume bounds from radial `Sec` and `<∇h, ∇r> >= θ`.
    IsoperimetricSectional,
    /// Capacity upper bound and parabolicity from `Ric` and `<∇h, ∇r> <= θ` beyond `ρ0`.
    ParabolicityRicci,
    /// Capacity lower bound and hyperbolicity from radial `Sec` and `<∇h, ∇r> >= θ` beyond `ρ0`.
    HyperbolicitySectional,
    /// Quotient bound from `Ric^h_q`.
    IsoperimetricQ,
    /// Capacity bound from `Ric^h_q`.
    CapacityQ,
    /// Riemannian capacity bound from `Ric^h_q` and `<∇h, ∇r> >= θ` beyond `ρ0`.
    RiemannianParabolicityQ,
}

impl Theorem {
    pub const ALL: [Theorem; 9] = [
        Theorem::IsoperimetricInfinity,
        Theorem::CapacityInfinity,
        Theorem::IsoperimetricRicci,
        Theorem::IsoperimetricSectional,
        Theorem::ParabolicityRicci,
        Theorem::HyperbolicitySectional,
        Theorem::IsoperimetricQ,
        Theorem::CapacityQ,
        Theorem::RiemannianParabolicityQ,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Theorem::IsoperimetricInfinity => "isoperimetric-infinity",
            Theorem::CapacityInfinity => "capacity-infinity",
            Theorem::IsoperimetricRicci => "isoperimetric-ricci",
            Theorem::IsoperimetricSectional => "isoperimetric-sectional",
            Theorem::ParabolicityRicci => "parabolicity-ricci",
            Theorem::HyperbolicitySectional => "hyperbolicity-sectional",
            Theorem::IsoperimetricQ => "isoperimetric-q",
            Theorem::CapacityQ => "capacity-q",
            Theorem::RiemannianParabolicityQ => "riemannian-parabolicity-q",
        }
    }

    pub fn from_name(s: &str) -> Option<Theorem> {
        Theorem::ALL.into_iter().find(|t| t.name() == s)
    }

    pub fn needs_theta(self) -> bool {
        !matches!(self, Theorem::IsoperimetricQ | Theorem::CapacityQ)
    }

    pub fn needs_q(self) -> bool {
        matches!(self, Theorem::IsoperimetricQ | Theorem::CapacityQ | Theorem::RiemannianParabolicityQ)
    }

    fn uses_rho0(self) -> bool {
        matches!(self, Theorem::ParabolicityRicci | Theorem::HyperbolicitySectional | Theorem::RiemannianParabolicityQ)
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    AtMost,
    AtLeast,
}

/// Pass rule: `raw >= -(abs + rel * scale)` with `scale = max(|lhs|, |rhs|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub abs: f64,
    pub rel: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { abs: 1e-9, rel: 1e-6 }
    }
}

/// One evaluation of `lhs <= rhs` or `lhs >= rhs`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Margin {
    pub r: f64,
    /// Outer radius for statements about pairs of radii.
    pub outer: Option<f64>,
    pub lhs: f64,
    pub rhs: f64,
    pub relation: Relation,
}

impl Margin {
    pub(crate) fn new(r: f64, lhs: f64, rhs: f64, relation: Relation) -> Self {
        Margin { r, outer: None, lhs, rhs, relation }
    }

    /// Signed slack, positive when the relation holds.
    pub fn raw(&self) -> f64 {
        if self.lhs == self.rhs {
            return 0.0;
        }
        match self.relation {
            Relation::AtMost => self.rhs - self.lhs,
            Relation::AtLeast => self.lhs - self.rhs,
        }
    }

    pub fn scale(&self) -> f64 {
        math::abs(self.lhs).max(math::abs(self.rhs))
    }

    /// Slack relative to the larger side; zero when both sides vanish.
    pub fn normalized(&self) -> f64 {
        let s = self.scale();
        if s == 0.0 {
            0.0
        } else {
            self.raw() / s
        }
    }

    pub fn holds(&self, tol: &Tolerances) -> bool {
        self.raw() >= -(tol.abs + tol.rel * self.scale())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MarginSeries {
    pub statement: String,
    pub margins: Vec<Margin>,
}

impl MarginSeries {
    pub(crate) fn new(statement: &str) -> Self {
        MarginSeries { statement: statement.to_string(), margins: Vec::new() }
    }

    pub fn first_failure(&self, tol: &Tolerances) -> Option<&Margin> {
        self.margins.iter().find(|m| !m.holds(tol))
    }

    /// Margin with the smallest normalized slack.
    pub fn tightest(&self) -> Option<&Margin> {
        self.margins.iter().min_by(|a, b| a.normalized().total_cmp(&b.normalized()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    Pass,
    HypothesisFail { clause: String, r: f64, margin: f64 },
    InequalityViolation { inequality: String, r: f64, outer: Option<f64>, margin: f64 },
    Inconclusive { reason: String },
}

impl Verdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Pass => f.write_str("Pass"),
            Verdict::HypothesisFail { clause, r, margin } => {
                write!(f, "HypothesisFail: {clause} at r = {r} (margin {margin:e})")
            }
            Verdict::InequalityViolation { inequality, r, outer, margin } => match outer {
                Some(o) => write!(f, "InequalityViolation: {inequality} at ({r}, {o}) (margin {margin:e})"),
                None => write!(f, "InequalityViolation: {inequality} at r = {r} (margin {margin:e})"),
            },
            Verdict::Inconclusive { reason } => write!(f, "Inconclusive: {reason}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub theorem: Theorem,
    pub hypotheses: Vec<MarginSeries>,
    pub inequalities: Vec<MarginSeries>,
    pub verdict: Verdict,
}

/// Ambient model, comparison warping and the bounds that tie them together.
#[derive(Debug, Clone, PartialEq)]
pub struct IntrinsicScenario {
    pub ambient: WeightedModelSpace,
    pub comparison_w: WarpingFunction,
    pub theta: Option<RadialProfile>,
    pub q: Option<f64>,
    pub rho0: f64,
    pub radii: Vec<f64>,
}

pub const DEFAULT_RADII: usize = 64;

impl IntrinsicScenario {
    /// Scenario with 64 log-spaced radii on `[0.05, 10]`, clipped to both domains.
    pub fn new(ambient: WeightedModelSpace, comparison_w: WarpingFunction) -> Self {
        let sup = ambient.domain_sup().min(comparison_w.domain_sup());
        let hi = 10f64.min(0.95 * sup);
        IntrinsicScenario {
            radii: log_grid(0.05f64.min(0.5 * hi), hi, DEFAULT_RADII),
            ambient,
            comparison_w,
            theta: None,
            q: None,
            rho0: 0.0,
        }
    }

    pub fn with_theta(mut self, theta: RadialProfile) -> Self {
        self.theta = Some(theta);
        self
    }

    pub fn with_q(mut self, q: f64) -> Self {
        self.q = Some(q);
        self
    }

    pub fn with_rho0(mut self, rho0: f64) -> Self {
        self.rho0 = rho0;
        self
    }

    pub fn with_radii(mut self, radii: Vec<f64>) -> Self {
        self.radii = radii;
        self
    }

    fn validate(&self, th: Theorem) -> Result<()> {
        if th.needs_theta() && self.theta.is_none() {
            return Err(Error::MissingField("theta"));
        }
        if th.needs_q() {
            match self.q {
                None => return Err(Error::MissingField("q")),
                Some(q) if !(q > 0.0 && q.is_finite()) => {
                    return Err(Error::InvalidArgument(format!("q must be positive and finite, got {q}")))
                }
                _ => {}
            }
        }
        if !(self.rho0 >= 0.0) {
            return Err(Error::InvalidArgument(format!("ρ0 must be non-negative, got {}", self.rho0)));
        }
        let sup = self.ambient.domain_sup().min(self.comparison_w.domain_sup());
        if self.radii.is_empty() || self.radii.windows(2).any(|p| !(p[0] < p[1])) {
            return Err(Error::InvalidArgument("radii must be non-empty and strictly increasing".to_string()));
        }
        if !(self.radii[0] > 0.0) || !(self.radii[self.radii.len() - 1] < sup) {
            return Err(Error::InvalidArgument(format!("radii must lie in (0, {sup})")));
        }
        Ok(())
    }

    fn m(&self) -> f64 {
        self.ambient.dim() as f64
    }

    fn q(&self) -> Result<f64> {
        self.q.ok_or(Error::MissingField("q"))
    }

    fn theta_profile(&self) -> Result<&RadialProfile> {
        self.theta.as_ref().ok_or(Error::MissingField("theta"))
    }

    fn theta_at(&self, r: f64) -> Result<f64> {
        self.theta_profile()?.value(r)
    }

    // w''/w and w'/w of the comparison warping.
    fn comparison_ratios(&self, r: f64) -> Result<(f64, f64)> {
        let (eta, lam) = self.comparison_w.ratios(r);
        if !(eta.is_finite() && lam.is_finite() && self.comparison_w.ln_value(r).is_finite()) {
            return Err(Error::Domain { r });
        }
        Ok((lam, eta))
    }

    fn h_at_pole(&self) -> f64 {
        self.ambient.log_weight().value(0.0)
    }
}

/// Which upper bound for the Laplacian or Hessian of the distance to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundVariant {
    /// From a lower bound on `Ric^h_q` (or `Sec^h_q`).
    Q,
    /// From a lower bound on `Ric^h_∞` (or `Sec^h_∞`) together with `θ`.
    Infinity,
}

/// Upper bound for `Δ^h r`.
pub fn laplacian_bound(sc: &IntrinsicScenario, variant: BoundVariant, r: f64) -> Result<f64> {
    let (_, eta) = sc.comparison_ratios(r)?;
    let m = sc.m();
    match variant {
        BoundVariant::Q => Ok((m + sc.q()? - 1.0) * eta),
        BoundVariant::Infinity => Ok((m - 1.0) * eta + sc.theta_at(r)?),
    }
}

/// Upper bound for `Hess r(x, x) + <∇h, ∇r>/(m-1)` with `x` a unit vector orthogonal to `∇r`.
pub fn hessian_bound(sc: &IntrinsicScenario, variant: BoundVariant, r: f64) -> Result<f64> {
    let (_, eta) = sc.comparison_ratios(r)?;
    let m = sc.m();
    match variant {
        BoundVariant::Q => Ok((m + sc.q()? - 1.0) / (m - 1.0) * eta),
        BoundVariant::Infinity => Ok(eta + sc.theta_at(r)? / (m - 1.0)),
    }
}

/// Upper bound for `Hess r(y, y)` for an arbitrary vector `y`, given `|y|^2`
/// and `<y, ∇r>`. The radial part of `y` does not contribute.
pub fn hessian_bound_vector(sc: &IntrinsicScenario, variant: BoundVariant, r: f64, y_norm_sq: f64, y_radial: f64) -> Result<f64> {
    let tangential = y_norm_sq - y_radial * y_radial;
    if tangential < -1e-12 * y_norm_sq.max(1.0) {
        return Err(Error::InvalidArgument(format!("|<y, ∇r>|^2 = {} exceeds |y|^2 = {y_norm_sq}", y_radial * y_radial)));
    }
    let dh = sc.ambient.weight_derivative(r)?;
    let m = sc.m();
    Ok(tangential.max(0.0) * (hessian_bound(sc, variant, r)? - dh / (m - 1.0)))
}

const RIC_INF: &str = "Ric^h_inf(dr,dr) >= -(m-1) w''/w";
const THETA_W: &str = "<grad h, grad r> w' <= theta w'";
const THETA_MONO: &str = "theta' >= 0";
const RIC: &str = "Ric(dr,dr) >= -(m-1) w''/w";
const SEC: &str = "Sec(radial planes) <= -w''/w";
const DH_LE: &str = "<grad h, grad r> <= theta";
const DH_GE: &str = "<grad h, grad r> >= theta";
const RIC_Q: &str = "Ric^h_q(dr,dr) >= -(m+q-1) w''/w";

/// Evaluates each hypothesis clause of `th` on the scenario radii.
///
/// Clauses that only apply beyond `ρ0` are evaluated on radii `r >= ρ0`.
pub fn check_hypotheses(sc: &IntrinsicScenario, th: Theorem) -> Result<Vec<MarginSeries>> {
    sc.validate(th)?;
    let amb = &sc.ambient;
    let m = sc.m();
    let mut out = Vec::new();
    let mut series = |statement: &str, from: f64, f: &dyn Fn(f64) -> Result<Margin>| -> Result<()> {
        let mut s = MarginSeries::new(statement);
        for &r in sc.radii.iter().filter(|&&r| r >= from) {
            s.margins.push(f(r)?);
        }
        out.push(s);
        Ok(())
    };
    let ge = Relation::AtLeast;
    let le = Relation::AtMost;
    let lam = |r: f64| sc.comparison_ratios(r).map(|x| x.0);
    let rho0 = if th.uses_rho0() { sc.rho0 } else { 0.0 };
    match th {
        Theorem::IsoperimetricInfinity | Theorem::CapacityInfinity => {
            series(RIC_INF, 0.0, &|r| Ok(Margin::new(r, amb.radial_ric_h(r, f64::INFINITY)?, -(m - 1.0) * lam(r)?, ge)))?;
            series(THETA_W, 0.0, &|r| {
                let dw = sc.comparison_w.jet(r).d1;
                Ok(Margin::new(r, amb.weight_derivative(r)? * dw, sc.theta_at(r)? * dw, le))
            })?;
            series(THETA_MONO, 0.0, &|r| Ok(Margin::new(r, sc.theta_profile()?.eval(r, 1)?, 0.0, ge)))?;
        }
        Theorem::IsoperimetricRicci | Theorem::ParabolicityRicci => {
            series(RIC, 0.0, &|r| Ok(Margin::new(r, amb.radial_ric(r)?, -(m - 1.0) * lam(r)?, ge)))?;
            series(DH_LE, rho0, &|r| Ok(Margin::new(r, amb.weight_derivative(r)?, sc.theta_at(r)?, le)))?;
        }
        Theorem::IsoperimetricSectional | Theorem::HyperbolicitySectional => {
            series(SEC, 0.0, &|r| Ok(Margin::new(r, amb.radial_sec(r)?, -lam(r)?, le)))?;
            series(DH_GE, rho0, &|r| Ok(Margin::new(r, amb.weight_derivative(r)?, sc.theta_at(r)?, ge)))?;
        }
        Theorem::IsoperimetricQ | Theorem::CapacityQ | Theorem::RiemannianParabolicityQ => {
            let q = sc.q()?;
            series(RIC_Q, 0.0, &|r| Ok(Margin::new(r, amb.radial_ric_h(r, q)?, -(m + q - 1.0) * lam(r)?, ge)))?;
            if th == Theorem::RiemannianParabolicityQ {
                series(DH_GE, rho0, &|r| Ok(Margin::new(r, amb.weight_derivative(r)?, sc.theta_at(r)?, ge)))?;
            }
        }
    }
    Ok(out)
}

/// Weighted volumes and areas of balls at increasing radii.
fn volumes(model: &WeightedModelSpace, rs: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let c = model.unit_sphere_area();
    let mut vol = Vec::with_capacity(rs.len());
    let mut acc = 0.0;
    let mut prev = 0.0;
    for &r in rs {
        acc += integrate_tol(|t| model.area_density(t), prev, r, Tolerance::PRECISE)?.value;
        prev = r;
        vol.push(c * acc);
    }
    let area = rs.iter().map(|&r| c * model.area_density(r)).collect();
    Ok((vol, area))
}

/// Flux density sampled on the radii together with segment integrals and
/// the tail beyond the last radius. Sums are taken over segments so small
/// annuli keep full relative accuracy.
struct FluxTable {
    g: Vec<f64>,
    segs: Vec<f64>,
    tail: IntegralVerdict,
}

impl FluxTable {
    fn new(d: &FluxDensity, rs: &[f64]) -> Result<Self> {
        let g = rs.iter().map(|&r| d.value(r)).collect();
        let segs = rs.windows(2).map(|p| d.integral(p[0], p[1])).collect::<Result<Vec<_>>>()?;
        let tail = d.tail(rs[rs.len() - 1])?;
        Ok(FluxTable { g, segs, tail })
    }

    fn annulus(&self, i: usize, j: usize) -> f64 {
        self.segs[i..j].iter().sum()
    }

    /// `∫_{r_i}^∞ g`; infinite when divergent and `None` when inconclusive.
    fn to_infinity(&self, i: usize) -> Option<f64> {
        match self.tail {
            IntegralVerdict::Converges { value, .. } => Some(value + self.segs[i..].iter().sum::<f64>()),
            IntegralVerdict::Diverges => Some(f64::INFINITY),
            IntegralVerdict::Inconclusive => None,
        }
    }

    /// `g(r_i) / ∫_{r_i}^∞ g`, which is `Cap/Area` of the ball.
    fn ratio(&self, i: usize) -> Option<f64> {
        self.to_infinity(i).map(|t| self.g[i] / t)
    }
}

fn flip(rel: Relation, reversed: bool) -> Relation {
    match (rel, reversed) {
        (r, false) => r,
        (Relation::AtMost, true) => Relation::AtLeast,
        (Relation::AtLeast, true) => Relation::AtMost,
    }
}

fn isoperimetric_series(sc: &IntrinsicScenario, comparison: &WeightedModelSpace, reversed: bool) -> Result<Vec<MarginSeries>> {
    let rs = &sc.radii;
    let (va, aa) = volumes(&sc.ambient, rs)?;
    let (vc, ac) = volumes(comparison, rs)?;
    let eh = math::exp(sc.h_at_pole());
    let (le, ge) = (flip(Relation::AtMost, reversed), flip(Relation::AtLeast, reversed));
    let sym = |r: Relation| if r == Relation::AtMost { "<=" } else { ">=" };
    let mut quotient = MarginSeries::new(&format!("Vol_h(B_R)/Vol_h(dB_R) {} q_(w,f)(R)", sym(ge)));
    let mut volume = MarginSeries::new(&format!("Vol_h(B_R) {} e^h(o) Vol_f(B^w_R)", sym(le)));
    let mut area = MarginSeries::new(&format!("Vol_h(dB_R) {} e^h(o) Vol_f(dB^w_R)", sym(le)));
    let mut monotone =
        MarginSeries::new(if reversed { "Vol_h(B_R)/Vol_f(B^w_R) non-decreasing" } else { "Vol_h(B_R)/Vol_f(B^w_R) non-increasing" });
    for (i, &r) in rs.iter().enumerate() {
        quotient.margins.push(Margin::new(r, va[i] / aa[i], vc[i] / ac[i], ge));
        volume.margins.push(Margin::new(r, va[i], eh * vc[i], le));
        area.margins.push(Margin::new(r, aa[i], eh * ac[i], le));
        if i + 1 < rs.len() {
            let mut mg = Margin::new(r, va[i + 1] / vc[i + 1], va[i] / vc[i], le);
            mg.outer = Some(rs[i + 1]);
            monotone.margins.push(mg);
        }
    }
    Ok(alloc::vec![quotient, volume, area, monotone])
}

struct CapacityPlan<'a> {
    lhs: FluxDensity,
    rhs: FluxDensity,
    from: f64,
    relation: Relation,
    // Also compare absolute capacities (only when both sides are anchored at the pole).
    absolute: bool,
    label: &'a str,
}

fn capacity_series(sc: &IntrinsicScenario, plan: CapacityPlan<'_>) -> Result<(Vec<MarginSeries>, Option<String>)> {
    let rs: Vec<f64> = sc.radii.iter().copied().filter(|&r| r >= plan.from).collect();
    if rs.is_empty() {
        return Err(Error::InvalidArgument(format!("no radii at or beyond ρ0 = {}", plan.from)));
    }
    let a = FluxTable::new(&plan.lhs, &rs)?;
    let c = FluxTable::new(&plan.rhs, &rs)?;
    let sym = if plan.relation == Relation::AtMost { "<=" } else { ">=" };
    let mut at_inf = MarginSeries::new(&format!("Cap(B_rho)/Vol(dB_rho) {sym} {}", plan.label));
    let mut annuli = MarginSeries::new(&format!("Cap(B_rho,B_R)/Vol(dB_rho) {sym} {} on annuli, R >= 2 rho", plan.label));
    let mut absolute = MarginSeries::new(&format!("Cap^h(B_rho) {sym} e^h(o) Cap^f(B^w_rho)"));
    let mut inconclusive = None;
    let v0 = sc.ambient.unit_sphere_area();
    let eh = math::exp(sc.h_at_pole());
    for (i, &r) in rs.iter().enumerate() {
        match (a.ratio(i), c.ratio(i)) {
            (Some(x), Some(y)) => {
                at_inf.margins.push(Margin::new(r, x, y, plan.relation));
                if plan.absolute {
                    let (ta, tc) = (a.to_infinity(i).unwrap_or(f64::NAN), c.to_infinity(i).unwrap_or(f64::NAN));
                    absolute.margins.push(Margin::new(r, v0 / ta, eh * v0 / tc, plan.relation));
                }
            }
            _ => {
                inconclusive.get_or_insert_with(|| format!("tail integral beyond r = {} is inconclusive", rs[rs.len() - 1]));
            }
        }
        for (j, &outer) in rs.iter().enumerate().skip(i + 1) {
            if outer < 2.0 * r {
                continue;
            }
            let mut mg = Margin::new(r, a.g[i] / a.annulus(i, j), c.g[i] / c.annulus(i, j), plan.relation);
            mg.outer = Some(outer);
            annuli.margins.push(mg);
        }
    }
    let mut out = alloc::vec![at_inf, annuli];
    if plan.absolute {
        out.push(absolute);
    }
    Ok((out, inconclusive))
}

/// Evaluates the conclusions of `th` on the scenario radii.
///
/// Returns the margin series and, when a tail integral could not be
/// classified, the reason the affected comparisons were skipped.
pub fn check_inequalities(sc: &IntrinsicScenario, th: Theorem) -> Result<(Vec<MarginSeries>, Option<String>)> {
    sc.validate(th)?;
    let m = sc.ambient.dim();
    let mf = m as f64;
    let w = &sc.comparison_w;
    let theta = || sc.theta_profile().cloned();
    let own = FluxDensity::of_model(&sc.ambient);
    match th {
        Theorem::IsoperimetricInfinity | Theorem::IsoperimetricRicci | Theorem::IsoperimetricSectional => {
            let f = LogWeight::drift(theta()?, 0.0, 1.0);
            let comparison = WeightedModelSpace::with_log_weight(m, w.clone(), f)?;
            Ok((isoperimetric_series(sc, &comparison, th == Theorem::IsoperimetricSectional)?, None))
        }
        Theorem::CapacityInfinity => capacity_series(
            sc,
            CapacityPlan {
                lhs: own,
                rhs: FluxDensity::new(w.clone(), mf, LogWeight::drift(theta()?, 0.0, 1.0)),
                from: 0.0,
                relation: Relation::AtMost,
                absolute: true,
                label: "Cap^f(B^w_rho)/Vol_f(dB^w_rho)",
            },
        ),
        Theorem::ParabolicityRicci | Theorem::HyperbolicitySectional => capacity_series(
            sc,
            CapacityPlan {
                lhs: own,
                rhs: FluxDensity::new(w.clone(), mf, LogWeight::drift(theta()?, sc.rho0, 1.0)),
                from: sc.rho0,
                relation: if th == Theorem::ParabolicityRicci { Relation::AtMost } else { Relation::AtLeast },
                absolute: sc.rho0 == 0.0,
                label: "Cap^f(B^w_rho)/Vol_f(dB^w_rho)",
            },
        ),
        Theorem::IsoperimetricQ => {
            let k = mf + sc.q()?;
            let rs = &sc.radii;
            let (va, aa) = volumes(&sc.ambient, rs)?;
            let mut s = MarginSeries::new("Vol_h(B_R)/Vol_h(dB_R) >= int_0^R w^(m+q-1) / w^(m+q-1)(R)");
            // Running integral of (w(t)/w(r))^(k-1), rescaled as the reference radius moves.
            let mut acc = 0.0;
            let mut prev = 0.0;
            for (i, &r) in rs.iter().enumerate() {
                if i > 0 {
                    acc *= math::exp((k - 1.0) * (w.ln_value(prev) - w.ln_value(r)));
                }
                acc += integrate_tol(|t| math::exp((k - 1.0) * (w.ln_value(t) - w.ln_value(r))), prev, r, Tolerance::PRECISE)?.value;
                s.margins.push(Margin::new(r, va[i] / aa[i], acc, Relation::AtLeast));
                prev = r;
            }
            Ok((alloc::vec![s], None))
        }
        Theorem::CapacityQ => capacity_series(
            sc,
            CapacityPlan {
                lhs: own,
                rhs: FluxDensity::new(w.clone(), mf + sc.q()?, LogWeight::Zero),
                from: 0.0,
                relation: Relation::AtMost,
                absolute: false,
                label: "w^(1-m-q)(rho) / int_rho w^(1-m-q)",
            },
        ),
        Theorem::RiemannianParabolicityQ => capacity_series(
            sc,
            CapacityPlan {
                lhs: FluxDensity::new(sc.ambient.warping().clone(), mf, LogWeight::Zero),
                rhs: FluxDensity::new(w.clone(), mf + sc.q()?, LogWeight::drift(theta()?, sc.rho0, -1.0)),
                from: sc.rho0,
                relation: Relation::AtMost,
                absolute: false,
                label: "w^(1-m-q)(rho) e^(-f(rho)) / int_rho w^(1-m-q) e^(-f)",
            },
        ),
    }
}

/// Checks hypotheses, then inequalities, and condenses both into a verdict.
///
/// Inequalities are always evaluated and reported, but a violation only
/// counts when every hypothesis holds.
pub fn verify(sc: &IntrinsicScenario, th: Theorem, tol: &Tolerances) -> Result<ComparisonReport> {
    let hypotheses = check_hypotheses(sc, th)?;
    let (inequalities, inconclusive) = check_inequalities(sc, th)?;
    let failed_hyp = hypotheses.iter().find_map(|s| s.first_failure(tol).map(|m| (s.statement.clone(), *m)));
    let failed_ineq = inequalities.iter().find_map(|s| s.first_failure(tol).map(|m| (s.statement.clone(), *m)));
    let verdict = if let Some((clause, m)) = failed_hyp {
        Verdict::HypothesisFail { clause, r: m.r, margin: m.raw() }
    } else if let Some((inequality, m)) = failed_ineq {
        Verdict::InequalityViolation { inequality, r: m.r, outer: m.outer, margin: m.normalized() }
    } else if let Some(reason) = inconclusive {
        Verdict::Inconclusive { reason }
    } else {
        Verdict::Pass
    };
    Ok(ComparisonReport { theorem: th, hypotheses, inequalities, verdict })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(m: u32, b: f64, f: &str) -> WeightedModelSpace {
        WeightedModelSpace::new(m, WarpingFunction::space_form(b).unwrap(), RadialProfile::parse(f).unwrap()).unwrap()
    }

    fn theta(s: &str) -> RadialProfile {
        RadialProfile::parse(s).unwrap()
    }

    #[test]
    fn theorem_names_round_trip() {
        for t in Theorem::ALL {
            assert_eq!(Theorem::from_name(t.name()), Some(t));
        }
        assert_eq!(Theorem::from_name("nope"), None);
    }

    #[test]
    fn gaussian_hypotheses() {
        let sc = IntrinsicScenario::new(model(3, 0.0, "-r^2"), WarpingFunction::space_form(0.0).unwrap())
            .with_theta(theta("-2*r"))
            .with_radii(alloc::vec![0.5, 1.0, 2.0]);
        let h = check_hypotheses(&sc, Theorem::IsoperimetricInfinity).unwrap();
        assert!(h[0].margins.iter().all(|m| (m.raw() - 2.0).abs() < 1e-14));
        assert!(h[1].margins.iter().all(|m| m.raw() == 0.0));
        assert!(h[2].margins.iter().all(|m| (m.raw() + 2.0).abs() < 1e-14));
        let report = verify(&sc, Theorem::IsoperimetricInfinity, &Tolerances::default()).unwrap();
        assert!(matches!(report.verdict, Verdict::HypothesisFail { ref clause, .. } if clause == THETA_MONO));
    }

    #[test]
    fn missing_fields() {
        let sc = IntrinsicScenario::new(model(3, 0.0, "0"), WarpingFunction::space_form(0.0).unwrap());
        assert_eq!(verify(&sc, Theorem::CapacityInfinity, &Tolerances::default()), Err(Error::MissingField("theta")));
        assert_eq!(verify(&sc, Theorem::CapacityQ, &Tolerances::default()), Err(Error::MissingField("q")));
    }

    #[test]
    fn euclidean_against_hyperbolic() {
        let sc = IntrinsicScenario::new(model(3, 0.0, "0"), WarpingFunction::space_form(-1.0).unwrap())
            .with_theta(theta("0"))
            .with_radii(alloc::vec![0.5, 1.0, 2.0, 4.0]);
        let rep = verify(&sc, Theorem::ParabolicityRicci, &Tolerances::default()).unwrap();
        assert!(rep.verdict.is_pass(), "{}", rep.verdict);
        let at1 = rep.inequalities[0].margins[1];
        assert!((at1.lhs - 1.0).abs() < 1e-10);
        let expect = 1.0 / ((1.0 / 1f64.tanh() - 1.0) * 1f64.sinh().powi(2));
        assert!((at1.rhs - expect).abs() < 1e-9 * expect);
    }

    #[test]
    fn q_quotient_matches_closed_form() {
        // Euclidean comparison: ∫_0^R s^(k-1) / R^(k-1) = R/k.
        let sc = IntrinsicScenario::new(model(3, 0.0, "0"), WarpingFunction::space_form(0.0).unwrap())
            .with_q(1.5)
            .with_radii(alloc::vec![0.3, 1.0, 3.0]);
        let (s, _) = check_inequalities(&sc, Theorem::IsoperimetricQ).unwrap();
        for m in &s[0].margins {
            assert!((m.rhs - m.r / 4.5).abs() < 1e-13 * m.r, "{m:?}");
            assert!((m.lhs - m.r / 3.0).abs() < 1e-13 * m.r);
        }
    }

    #[test]
    fn bounds_in_the_model_are_sharp() {
        let sc = IntrinsicScenario::new(model(3, -1.0, "0"), WarpingFunction::space_form(-1.0).unwrap()).with_theta(theta("0")).with_q(1.0);
        let r = 1.3;
        let h = sc.ambient.hessian_distance(r).unwrap();
        assert!((hessian_bound(&sc, BoundVariant::Infinity, r).unwrap() - h).abs() < 1e-15);
        assert!((laplacian_bound(&sc, BoundVariant::Infinity, r).unwrap() - sc.ambient.laplacian_distance(r).unwrap()).abs() < 1e-14);
        assert!((laplacian_bound(&sc, BoundVariant::Q, r).unwrap() - 3.0 / r.tanh()).abs() < 1e-14);
        assert!((hessian_bound_vector(&sc, BoundVariant::Q, r, 2.0, 1.0).unwrap() - 1.5 / r.tanh()).abs() < 1e-14);
        assert!(hessian_bound_vector(&sc, BoundVariant::Q, r, 1.0, 2.0).is_err());
    }

    #[test]
    fn bound_values() {
        let flat = || IntrinsicScenario::new(model(3, 0.0, "0"), WarpingFunction::space_form(0.0).unwrap());
        let sc = flat().with_theta(theta("0")).with_q(1.0);
        assert!((laplacian_bound(&sc, BoundVariant::Infinity, 2.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((laplacian_bound(&sc, BoundVariant::Q, 1.0).unwrap() - 3.0).abs() < 1e-15);
        assert!((hessian_bound(&sc, BoundVariant::Infinity, 4.0).unwrap() - 0.25).abs() < 1e-15);
        let hyp = IntrinsicScenario::new(model(3, 0.0, "0"), WarpingFunction::space_form(-1.0).unwrap()).with_q(2.0);
        assert!((hessian_bound(&hyp, BoundVariant::Q, 1.0).unwrap() - 2.0 / 1f64.tanh()).abs() < 1e-14);
        assert_eq!(laplacian_bound(&flat(), BoundVariant::Q, 1.0), Err(Error::MissingField("q")));
        assert_eq!(hessian_bound(&flat(), BoundVariant::Infinity, 1.0), Err(Error::MissingField("theta")));
    }

    #[test]
    fn opposite_directions_both_pass() {
        let radii = alloc::vec![0.5, 1.0, 2.0, 4.0];
        let r3 = IntrinsicScenario::new(model(3, 0.0, "0"), WarpingFunction::space_form(-1.0).unwrap())
            .with_theta(theta("0"))
            .with_radii(radii.clone());
        let h3 =
            IntrinsicScenario::new(model(3, -1.0, "0"), WarpingFunction::space_form(0.0).unwrap()).with_theta(theta("0")).with_radii(radii);
        let a = verify(&r3, Theorem::ParabolicityRicci, &Tolerances::default()).unwrap();
        let b = verify(&h3, Theorem::HyperbolicitySectional, &Tolerances::default()).unwrap();
        assert!(a.verdict.is_pass() && b.verdict.is_pass(), "{} / {}", a.verdict, b.verdict);
        let (ma, mb) = (a.inequalities[0].margins[1], b.inequalities[0].margins[1]);
        assert!((mb.lhs - ma.rhs).abs() < 1e-9 * ma.rhs && (mb.rhs - 1.0).abs() < 1e-10);
        assert!(ma.raw() > 1.0 && mb.raw() > 1.0);
    }

    #[test]
    fn equality_case_saturates() {
        let tol = Tolerances::default();
        for (b, wname) in [(0.0, "r"), (-1.0, "sinh r")] {
            for (f, df) in [("0", "0"), ("r", "1"), ("-r^2", "-2*r")] {
                let amb = model(3, b, f);
                let sc = IntrinsicScenario::new(amb, WarpingFunction::space_form(b).unwrap())
                    .with_theta(theta(df))
                    .with_radii(log_grid(0.05, 6.0, 16));
                for th in
                    [Theorem::IsoperimetricInfinity, Theorem::CapacityInfinity, Theorem::IsoperimetricRicci, Theorem::ParabolicityRicci]
                {
                    let (series, inc) = check_inequalities(&sc, th).unwrap();
                    for s in series {
                        for m in &s.margins {
                            assert!(m.normalized().abs() <= 1e-9, "{wname} f={f} {th} {}: {m:?}", s.statement);
                            assert!(m.holds(&tol));
                        }
                    }
                    if inc.is_some() {
                        assert_eq!((b, f), (0.0, "0"));
                    }
                }
            }
        }
    }
}
