//! Submanifolds: extrinsic Laplacian bounds, balance conditions and
//! parabolicity criteria for bounding profiles, plus exact checks on
//! totally geodesic sub-models of a model space.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::capacity::{classify_parabolicity, FluxDensity, ParabolicityVerdict};
use crate::comparison::{Margin, MarginSeries, Relation, Tolerances, Verdict};
use crate::math;
use crate::model::WeightedModelSpace;
use crate::profile::{infer_drift, log_grid, Expr, Func, LogGrowth, LogWeight, RadialProfile, WarpingFunction};
use crate::quadrature::{classify_improper, integrate_tol, IntegralVerdict, Tolerance};
use crate::{Error, Result};

/// Radial bounds on a submanifold `P^n` outside the extrinsic ball `D_ρ`:
/// `<∇h, ∇r>` against `ψ` and `<H^h_P, ∇r>` against `φ`.
///
/// `sense` is `AtMost` for upper bounds and `AtLeast` for lower bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct SubmanifoldProfile {
    pub n: u32,
    pub psi: RadialProfile,
    pub phi: RadialProfile,
    pub rho: f64,
    pub sense: Relation,
}

impl SubmanifoldProfile {
    pub fn new(n: u32, psi: RadialProfile, phi: RadialProfile, rho: f64, sense: Relation) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidArgument("submanifold dimension must be at least 1".to_string()));
        }
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(Error::InvalidArgument(format!("ρ must be positive, got {rho}")));
        }
        Ok(SubmanifoldProfile { n, psi, phi, rho, sense })
    }

    /// Same bounds with the inner radius moved to `rho`.
    pub fn reanchored(&self, rho: f64) -> Result<Self> {
        SubmanifoldProfile::new(self.n, self.psi.clone(), self.phi.clone(), rho, self.sense)
    }
}

/// A totally geodesic radial `n`-dimensional slice of a model space.
///
/// The slice is itself the `n`-dimensional model with the same warping
/// and weight. Along it `|∇_P r| = 1` and the weighted mean curvature
/// vector vanishes.
#[derive(Debug, Clone, PartialEq)]
pub struct SubModel {
    ambient: WeightedModelSpace,
    n: u32,
    induced: WeightedModelSpace,
}

pub fn totally_geodesic_submodel(ambient: &WeightedModelSpace, n: u32) -> Result<SubModel> {
    if n < 2 || n > ambient.dim() {
        return Err(Error::InvalidArgument(format!("need 2 <= n <= {}, got n = {n}", ambient.dim())));
    }
    let induced = WeightedModelSpace::with_log_weight(n, ambient.warping().clone(), ambient.log_weight().clone())?;
    Ok(SubModel { ambient: ambient.clone(), n, induced })
}

impl SubModel {
    pub fn ambient(&self) -> &WeightedModelSpace {
        &self.ambient
    }

    pub fn induced(&self) -> &WeightedModelSpace {
        &self.induced
    }

    pub fn dim(&self) -> u32 {
        self.n
    }

    /// Bounds attained with equality: `ψ = f'`, `φ = 0`.
    pub fn equality_profile(&self, rho: f64, sense: Relation) -> Result<SubmanifoldProfile> {
        SubmanifoldProfile::new(self.n, self.ambient.log_weight().derivative(), RadialProfile::constant(0.0), rho, sense)
    }

    /// Exact data at radius `r` for `F` with derivatives `f1`, `f2`.
    pub fn point_data(&self, r: f64, f1: f64, f2: f64) -> Result<ExtrinsicPointData> {
        Ok(ExtrinsicPointData {
            n: self.n,
            log_derivative: self.ambient.sphere_mean_curvature(r)?,
            weight_slope: self.ambient.weight_derivative(r)?,
            mean_curvature: 0.0,
            grad_norm: 1.0,
            f1,
            f2,
        })
    }

    /// `Δ^f (F∘r)` in the induced model: `F'' + F'((n-1) w'/w + f')`.
    pub fn induced_laplacian(&self, r: f64, f1: f64, f2: f64) -> Result<f64> {
        let eta = self.induced.sphere_mean_curvature(r)?;
        Ok(f2 + f1 * ((self.n as f64 - 1.0) * eta + self.induced.weight_derivative(r)?))
    }
}

/// Both sides of `<n H_P, ∇r> + <∇_P h, ∇_P r> = <H^h_P, ∇r> + <∇h, ∇r>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanCurvatureResidual {
    pub r: f64,
    pub lhs: f64,
    pub rhs: f64,
}

impl MeanCurvatureResidual {
    pub fn residual(&self) -> f64 {
        math::abs(self.lhs - self.rhs)
    }
}

/// Evaluates the relation between Riemannian and weighted mean curvature
/// on the sub-model. The radial gradient of `h` is tangent to the slice,
/// so the normal parts vanish and both sides reduce to `f'`.
pub fn mean_curvature_relation_check(sub: &SubModel, grid: &[f64]) -> Result<Vec<MeanCurvatureResidual>> {
    grid.iter()
        .map(|&r| {
            let dh = sub.ambient.weight_derivative(r)?;
            let (mean, weighted_mean, grad_norm) = (0.0, 0.0, 1.0);
            let tangential = dh * grad_norm * grad_norm;
            Ok(MeanCurvatureResidual { r, lhs: sub.n as f64 * mean + tangential, rhs: weighted_mean + dh })
        })
        .collect()
}

/// Pointwise data entering the extrinsic Laplacian of `F∘r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtrinsicPointData {
    pub n: u32,
    /// `w'/w` of the comparison warping.
    pub log_derivative: f64,
    /// `<∇h, ∇r>`
    pub weight_slope: f64,
    /// `<H^h_P, ∇r>`
    pub mean_curvature: f64,
    /// `|∇_P r|`, in `[0, 1]`.
    pub grad_norm: f64,
    /// `F'(r)`, which must be non-positive.
    pub f1: f64,
    /// `F''(r)`
    pub f2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LaplacianVariant {
    /// `Sec >= -w''/w`; the bound is a lower bound.
    SecLower,
    /// `Sec <= -w''/w`; the bound is an upper bound.
    SecUpper,
    /// `Sec^h_q >= -(m+q-1)/(m-1) w''/w` in an ambient of dimension `m`; lower bound.
    QWeighted { m: u32, q: f64 },
}

/// `Δ^h_P (F∘r)` compared with `value` in the direction `relation`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtrinsicBound {
    pub value: f64,
    pub relation: Relation,
}

pub fn extrinsic_laplacian_bound(d: &ExtrinsicPointData, variant: LaplacianVariant) -> Result<ExtrinsicBound> {
    if d.f1 > 0.0 {
        return Err(Error::InvalidArgument(format!("F' must be non-positive, got {}", d.f1)));
    }
    if !(0.0..=1.0).contains(&d.grad_norm) {
        return Err(Error::InvalidArgument(format!("|∇_P r| must lie in [0, 1], got {}", d.grad_norm)));
    }
    if d.n < 1 {
        return Err(Error::InvalidArgument("submanifold dimension must be at least 1".to_string()));
    }
    let n = d.n as f64;
    let eta = d.log_derivative;
    let g2 = d.grad_norm * d.grad_norm;
    let (value, relation) = match variant {
        LaplacianVariant::SecLower | LaplacianVariant::SecUpper => {
            let v = (d.f2 - d.f1 * eta) * g2 + d.f1 * (n * eta + d.mean_curvature + d.weight_slope);
            let rel = if variant == LaplacianVariant::SecLower { Relation::AtLeast } else { Relation::AtMost };
            (v, rel)
        }
        LaplacianVariant::QWeighted { m, q } => {
            if m < 2 || d.n > m {
                return Err(Error::InvalidArgument(format!("need 1 <= n <= m with m >= 2, got n = {}, m = {m}", d.n)));
            }
            if !(q > 0.0 && q.is_finite()) {
                return Err(Error::InvalidArgument(format!("q must be positive and finite, got {q}")));
            }
            let mf = m as f64;
            let c = (mf + q - 1.0) / (mf - 1.0);
            let v = (d.f2 - d.f1 / (mf - 1.0) * ((mf + q - 1.0) * eta - d.weight_slope)) * g2
                + d.f1 * (n * c * eta + (mf - n - 1.0) / (mf - 1.0) * d.weight_slope + d.mean_curvature);
            (v, Relation::AtLeast)
        }
    };
    Ok(ExtrinsicBound { value, relation })
}

/// Which balance condition to test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BalanceTheorem {
    /// `n w'/w + ψ + φ` against `1/q_{w,f}` with `f = ∫_0 (ψ + φ)`; volume comparison.
    Simpson,
    /// `ψ + φ` against `-n w'/w`; parabolicity and hyperbolicity.
    SubParabolicity,
    /// `(m-n-1)/(m-1) ψ + φ <= -n (m+q-1)/(m-1) w'/w`; parabolicity from `Sec^h_q`.
    SubQ { m: u32, q: f64 },
}

fn drift_growth(p: &RadialProfile) -> Option<LogGrowth> {
    p.explicit_growth().or_else(|| infer_drift(p.expr()))
}

/// `a ψ + φ` as a drift profile, carrying combined growth when both are known.
fn combined_drift(a: f64, psi: &RadialProfile, phi: &RadialProfile) -> RadialProfile {
    let scaled = if a == 1.0 { psi.expr().clone() } else { Expr::Mul(Box::new(Expr::Num(a)), Box::new(psi.expr().clone())) };
    let p = RadialProfile::from_expr(Expr::Add(Box::new(scaled), Box::new(phi.expr().clone())));
    match (drift_growth(psi), drift_growth(phi)) {
        (Some(gp), Some(gf)) => p.with_growth(gp.scale(a).plus(gf)),
        _ => p,
    }
}

fn check_q(m: u32, q: f64, n: u32) -> Result<()> {
    if m < 2 || n > m {
        return Err(Error::InvalidArgument(format!("need n <= m with m >= 2, got n = {n}, m = {m}")));
    }
    if !(q > 0.0 && q.is_finite()) {
        return Err(Error::InvalidArgument(format!("q must be positive and finite, got {q}")));
    }
    Ok(())
}

fn check_grid(grid: &[f64], from: f64, sup: f64) -> Result<()> {
    if grid.is_empty() || grid.windows(2).any(|p| !(p[0] < p[1])) {
        return Err(Error::InvalidArgument("grid must be non-empty and strictly increasing".to_string()));
    }
    if !(grid[0] >= from && grid[0] > 0.0) || !(grid[grid.len() - 1] < sup) {
        return Err(Error::InvalidArgument(format!("grid must lie in [{from}, {sup})")));
    }
    Ok(())
}

/// Balance-condition margins on `grid`, in the direction of `prof.sense`.
///
/// The grid must start at or beyond `prof.rho`, except for the volume
/// comparison, whose condition is imposed on all of `P - {o}`.
pub fn check_balance(th: BalanceTheorem, prof: &SubmanifoldProfile, comp_w: &WarpingFunction, grid: &[f64]) -> Result<MarginSeries> {
    let from = if th == BalanceTheorem::Simpson { 0.0 } else { prof.rho };
    check_grid(grid, from, comp_w.domain_sup())?;
    let n = prof.n as f64;
    let eta = |r: f64| comp_w.ratios(r).0;
    let mut s;
    match th {
        BalanceTheorem::Simpson => {
            s = MarginSeries::new("n w'/w + psi + phi vs 1/q_(w,f)");
            let f = LogWeight::drift(combined_drift(1.0, &prof.psi, &prof.phi), 0.0, 1.0);
            let model = WeightedModelSpace::with_log_weight(prof.n.max(2), comp_w.clone(), f)?;
            if prof.n < 2 {
                return Err(Error::InvalidArgument("the volume comparison needs n >= 2".to_string()));
            }
            for &r in grid {
                let lhs = n * eta(r) + prof.psi.value(r)? + prof.phi.value(r)?;
                s.margins.push(Margin::new(r, lhs, 1.0 / model.iso_quotient(r)?, prof.sense));
            }
        }
        BalanceTheorem::SubParabolicity => {
            s = MarginSeries::new("psi + phi vs -n w'/w");
            for &r in grid {
                s.margins.push(Margin::new(r, prof.psi.value(r)? + prof.phi.value(r)?, -n * eta(r), prof.sense));
            }
        }
        BalanceTheorem::SubQ { m, q } => {
            check_q(m, q, prof.n)?;
            if prof.sense != Relation::AtMost {
                return Err(Error::InvalidArgument("the q-weighted balance condition only has the upper-bound form".to_string()));
            }
            let mf = m as f64;
            s = MarginSeries::new("(m-n-1)/(m-1) psi + phi <= -n (m+q-1)/(m-1) w'/w");
            for &r in grid {
                let lhs = (mf - n - 1.0) / (mf - 1.0) * prof.psi.value(r)? + prof.phi.value(r)?;
                s.margins.push(Margin::new(r, lhs, -n * (mf + q - 1.0) / (mf - 1.0) * eta(r), Relation::AtMost));
            }
        }
    }
    Ok(s)
}

/// Outcome of the weighted volume comparison on a sub-model.
#[derive(Debug, Clone, PartialEq)]
pub struct SimpsonReport {
    pub radius: f64,
    /// Direction in which the balance condition holds.
    pub sense: Option<Relation>,
    pub hypotheses: Vec<MarginSeries>,
    pub inequality: MarginSeries,
    pub verdict: Verdict,
}

/// Checks `Vol_h(D_R)` against `q_{w,f}(R) ∫_{∂D_R} |∇_P r| da_h` on a
/// sub-model, with the equality-case bounds `ψ = f'`, `φ = 0`.
///
/// The left side comes from the induced model and the right side from the
/// comparison model built by integrating `ψ + φ`, so agreement exercises
/// two independent code paths. The balance condition is tested in both
/// directions; the inequality is read in the direction that holds.
pub fn verify_simpson(sub: &SubModel, big_r: f64, tol: &Tolerances) -> Result<SimpsonReport> {
    let w = sub.ambient.warping();
    if !(big_r > 0.0 && big_r < w.domain_sup()) {
        return Err(Error::InvalidArgument(format!("R must lie in (0, {}), got {big_r}", w.domain_sup())));
    }
    let grid = log_grid(0.05f64.min(0.5 * big_r), big_r, 64);
    let upper = check_balance(BalanceTheorem::Simpson, &sub.equality_profile(1.0, Relation::AtMost)?, w, &grid)?;
    let lower = check_balance(BalanceTheorem::Simpson, &sub.equality_profile(1.0, Relation::AtLeast)?, w, &grid)?;
    let mut sec = MarginSeries::new("Sec(radial planes) = -w''/w");
    for &r in &grid {
        sec.margins.push(Margin::new(r, sub.ambient.radial_sec(r)?, -w.ratios(r).1, Relation::AtLeast));
    }
    let sense = if upper.first_failure(tol).is_none() {
        Some(Relation::AtMost)
    } else if lower.first_failure(tol).is_none() {
        Some(Relation::AtLeast)
    } else {
        None
    };
    let prof = sub.equality_profile(1.0, sense.unwrap_or(Relation::AtMost))?;
    let f = LogWeight::drift(combined_drift(1.0, &prof.psi, &prof.phi), 0.0, 1.0);
    let comparison = WeightedModelSpace::with_log_weight(sub.n, w.clone(), f)?;
    let lhs = sub.induced.volume_ball(big_r)?;
    let rhs = comparison.iso_quotient(big_r)? * sub.induced.area_sphere(big_r)?;
    // Upper balance bounds give the lower volume bound and vice versa.
    let relation = match sense {
        Some(Relation::AtLeast) => Relation::AtMost,
        _ => Relation::AtLeast,
    };
    let mut inequality = MarginSeries::new("Vol_h(D_R) vs q_(w,f)(R) int_(dD_R) |grad_P r| da_h");
    inequality.margins.push(Margin::new(big_r, lhs, rhs, relation));
    let verdict = if let Some(m) = sec.first_failure(tol) {
        Verdict::HypothesisFail { clause: sec.statement.clone(), r: m.r, margin: m.raw() }
    } else if sense.is_none() {
        let m = upper.tightest().copied().unwrap_or(upper.margins[0]);
        Verdict::HypothesisFail { clause: "balance condition in either direction".to_string(), r: m.r, margin: m.raw() }
    } else if let Some(m) = inequality.first_failure(tol) {
        Verdict::InequalityViolation { inequality: inequality.statement.clone(), r: big_r, outer: None, margin: m.normalized() }
    } else {
        Verdict::Pass
    };
    let hypotheses = alloc::vec![sec, if sense == Some(Relation::AtLeast) { lower } else { upper }];
    Ok(SimpsonReport { radius: big_r, sense, hypotheses, inequality, verdict })
}

/// Curvature hypothesis behind a classification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClassifyVariant {
    /// Bounds on the radial sectional curvature.
    Sec,
    /// Lower bound on `Sec^h_q` in an ambient of dimension `m`.
    QWeighted { m: u32, q: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubmanifoldClassification {
    /// Classification of the comparison integral `∫_ρ^∞ g`.
    pub verdict: ParabolicityVerdict,
    pub integral: IntegralVerdict,
    /// `g(ρ) / ∫_ρ^∞ g`, the capacity-to-area bound at the inner radius;
    /// zero when the integral diverges.
    pub capacity_ratio: Option<f64>,
    pub balance: MarginSeries,
    /// True when the balance condition holds and the direction of the
    /// bounds lets the theorem conclude `verdict` for the submanifold.
    pub guaranteed: bool,
}

/// Radial density `g` of the comparison integral for the variant.
pub fn comparison_density(prof: &SubmanifoldProfile, comp_w: &WarpingFunction, variant: ClassifyVariant) -> Result<FluxDensity> {
    let n = prof.n as f64;
    let (k, a) = match variant {
        ClassifyVariant::Sec => (n, 1.0),
        ClassifyVariant::QWeighted { m, q } => {
            check_q(m, q, prof.n)?;
            let mf = m as f64;
            (1.0 + (n - 1.0) * (mf + q - 1.0) / (mf - 1.0), (mf - n) / (mf - 1.0))
        }
    };
    let f = LogWeight::drift(combined_drift(a, &prof.psi, &prof.phi), prof.rho, 1.0);
    Ok(FluxDensity::new(comp_w.clone(), k, f))
}

/// 64 log-spaced radii from `ρ` to `max(10, 4ρ)`, clipped to the domain.
pub fn default_grid(prof: &SubmanifoldProfile, comp_w: &WarpingFunction) -> Vec<f64> {
    let hi = (10f64).max(4.0 * prof.rho).min(0.95 * comp_w.domain_sup());
    log_grid(prof.rho, hi.max(prof.rho * (1.0 + 1e-9)), 64)
}

pub fn classify_submanifold(
    prof: &SubmanifoldProfile,
    comp_w: &WarpingFunction,
    variant: ClassifyVariant,
    grid: &[f64],
    tol: &Tolerances,
) -> Result<SubmanifoldClassification> {
    let balance = match variant {
        ClassifyVariant::Sec => check_balance(BalanceTheorem::SubParabolicity, prof, comp_w, grid)?,
        ClassifyVariant::QWeighted { m, q } => check_balance(BalanceTheorem::SubQ { m, q }, prof, comp_w, grid)?,
    };
    let density = comparison_density(prof, comp_w, variant)?;
    let integral = density.tail(prof.rho)?;
    let verdict = ParabolicityVerdict::from(integral);
    let capacity_ratio = match integral {
        IntegralVerdict::Converges { value, .. } => Some(density.value(prof.rho) / value),
        IntegralVerdict::Diverges => Some(0.0),
        IntegralVerdict::Inconclusive => None,
    };
    let concludes = matches!(
        (prof.sense, verdict),
        (Relation::AtMost, ParabolicityVerdict::Parabolic) | (Relation::AtLeast, ParabolicityVerdict::Hyperbolic)
    );
    let guaranteed = concludes && balance.first_failure(tol).is_none();
    Ok(SubmanifoldClassification { verdict, integral, capacity_ratio, balance, guaranteed })
}

/// Bounds `<∇h, ∇r> >= ψ` under which `h`-minimal submanifolds of a
/// Cartan-Hadamard manifold with `Sec <= b <= 0` are hyperbolic, together
/// with the comparison warping of curvature `b`.
pub fn minimal_hyperbolicity_profile(b: f64, n: u32, eps: f64, rho: f64) -> Result<(SubmanifoldProfile, WarpingFunction)> {
    if !(b <= 0.0) {
        return Err(Error::InvalidArgument(format!("curvature bound must be non-positive, got {b}")));
    }
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument(format!("ε must be positive, got {eps}")));
    }
    if n < 2 {
        return Err(Error::InvalidArgument("submanifold dimension must be at least 2".to_string()));
    }
    let nf = n as f64;
    let psi = if b == 0.0 {
        let c = nf - 2.0 - eps;
        RadialProfile::from_expr(Expr::Div(Box::new(Expr::Num(-c)), Box::new(Expr::Var))).with_growth(LogGrowth::new(0.0, 0.0, -c))
    } else {
        let s = math::sqrt(-b);
        let c = (nf - 1.0 - eps) * s;
        // coth(s r) = 1 + 2 / (e^{2 s r} - 1), finite for large r.
        let e2 = Expr::Call(Func::Exp, Box::new(Expr::Mul(Box::new(Expr::Num(2.0 * s)), Box::new(Expr::Var))));
        let coth = Expr::Add(
            Box::new(Expr::Num(1.0)),
            Box::new(Expr::Div(Box::new(Expr::Num(2.0)), Box::new(Expr::Sub(Box::new(e2), Box::new(Expr::Num(1.0)))))),
        );
        RadialProfile::from_expr(Expr::Mul(Box::new(Expr::Num(-c)), Box::new(coth))).with_growth(LogGrowth::new(0.0, -c, 0.0))
    };
    let prof = SubmanifoldProfile::new(n, psi, RadialProfile::constant(0.0).with_growth(LogGrowth::ZERO), rho, Relation::AtLeast)?;
    Ok((prof, WarpingFunction::space_form(b)?))
}

#[derive(Debug, Clone, PartialEq)]
pub enum CriterionOutcome {
    Concluded { rho: f64, classification: SubmanifoldClassification },
    PremiseFail { premise: String },
}

impl CriterionOutcome {
    pub fn verdict(&self) -> Option<ParabolicityVerdict> {
        match self {
            CriterionOutcome::Concluded { classification, .. } => Some(classification.verdict),
            CriterionOutcome::PremiseFail { .. } => None,
        }
    }
}

const SCAN_POINTS: usize = 256;

fn premise(msg: &str) -> CriterionOutcome {
    CriterionOutcome::PremiseFail { premise: msg.to_string() }
}

// Radii from ρ out to 100 (or 20ρ), shortened while w leaves floating-point range.
fn scan_grid(rho: f64, w: &WarpingFunction) -> Vec<f64> {
    let mut hi = (100f64).max(20.0 * rho).min(0.95 * w.domain_sup());
    while hi > 2.0 * rho && !(w.ln_value(hi).is_finite() && w.ratios(hi).0.is_finite()) {
        hi *= 0.5;
    }
    log_grid(rho, hi, SCAN_POINTS)
}

/// Parabolicity (`direction = AtMost`) or hyperbolicity (`AtLeast`) of a
/// submanifold with `|H^h_P| <= c`, given `<∇h, ∇r>` bounded by `prof.psi`.
///
/// Checks that `∫_0^∞ w` diverges (converges), that `w'/w` stays bounded
/// and that `ψ` tends to `-∞` (`+∞`), moves `ρ` outward until the balance
/// condition holds with `φ = ±c`, then classifies.
pub fn check_bounded_mean_curvature_criterion(
    prof: &SubmanifoldProfile,
    comp_w: &WarpingFunction,
    c: f64,
    direction: Relation,
    tol: &Tolerances,
) -> Result<CriterionOutcome> {
    if !(c >= 0.0 && c.is_finite()) {
        return Err(Error::InvalidArgument(format!("mean curvature bound must be non-negative, got {c}")));
    }
    let Some(wg) = comp_w.growth() else {
        return Ok(premise("non-compact comparison model with known growth"));
    };
    // ∫_0^1 w is finite, so the tail decides.
    let w_tail = classify_improper(|t| comp_w.value(t), 1.0, Some(wg.order()), Tolerance::IMPROPER)?;
    match (direction, w_tail) {
        (Relation::AtMost, IntegralVerdict::Diverges) | (Relation::AtLeast, IntegralVerdict::Converges { .. }) => {}
        (Relation::AtMost, _) => return Ok(premise("int_0^inf w = inf")),
        (Relation::AtLeast, _) => return Ok(premise("int_0^inf w < inf")),
    }
    if wg.quadratic != 0.0 {
        return Ok(premise("w'/w bounded at infinity"));
    }
    let Some(pg) = drift_growth(&prof.psi) else {
        return Ok(premise("psi with known growth"));
    };
    match direction {
        Relation::AtMost if pg.quadratic < 0.0 => {}
        Relation::AtLeast if pg.quadratic > 0.0 => {}
        Relation::AtMost => return Ok(premise("psi -> -inf")),
        Relation::AtLeast => return Ok(premise("psi -> +inf")),
    }
    let phi_c = match direction {
        Relation::AtMost => c,
        Relation::AtLeast => -c,
    };
    let phi = RadialProfile::constant(phi_c).with_growth(LogGrowth::new(0.0, phi_c, 0.0));
    let candidate = SubmanifoldProfile::new(prof.n, prof.psi.clone(), phi, prof.rho, direction)?;
    let scan = scan_grid(prof.rho, comp_w);
    let balance = check_balance(BalanceTheorem::SubParabolicity, &candidate, comp_w, &scan)?;
    let last_bad = balance.margins.iter().rposition(|m| !m.holds(tol));
    let rho = match last_bad {
        None => prof.rho,
        Some(i) if i + 1 < scan.len() => scan[i + 1],
        Some(_) => return Ok(premise("balance condition holds beyond some radius")),
    };
    let reanchored = candidate.reanchored(rho)?;
    let grid = default_grid(&reanchored, comp_w);
    let classification = classify_submanifold(&reanchored, comp_w, ClassifyVariant::Sec, &grid, tol)?;
    Ok(CriterionOutcome::Concluded { rho, classification })
}

/// Parabolicity of `h`-minimal hypersurfaces in an `m`-dimensional ambient
/// with `Sec^h_q >= -(m+q-1)/(m-1) w''/w`, `w` non-increasing beyond `ρ`
/// and radial `h <= 0`.
pub fn check_h_minimal_hypersurface_criterion(
    w: &WarpingFunction,
    h: &RadialProfile,
    m: u32,
    q: f64,
    rho: f64,
    tol: &Tolerances,
) -> Result<CriterionOutcome> {
    if m < 2 {
        return Err(Error::InvalidArgument(format!("ambient dimension must be at least 2, got {m}")));
    }
    check_q(m, q, m - 1)?;
    if !w.domain_sup().is_infinite() {
        return Ok(premise("non-compact comparison model"));
    }
    let scan = scan_grid(rho, w);
    if scan.iter().any(|&r| w.jet(r).d1 > tol.abs) {
        return Ok(premise("w non-increasing on [rho, inf)"));
    }
    let mut h_points = log_grid(1e-6, scan[scan.len() - 1], SCAN_POINTS);
    h_points.insert(0, 0.0);
    for &r in &h_points {
        if h.value(r)? > tol.abs {
            return Ok(premise("h <= 0"));
        }
    }
    let psi = h.derivative();
    let prof = SubmanifoldProfile::new(m - 1, psi, RadialProfile::constant(0.0).with_growth(LogGrowth::ZERO), rho, Relation::AtMost)?;
    let grid = default_grid(&prof, w);
    let classification = classify_submanifold(&prof, w, ClassifyVariant::QWeighted { m, q }, &grid, tol)?;
    Ok(CriterionOutcome::Concluded { rho, classification })
}

/// Intrinsic classification of the induced model, for cross-checks.
pub fn induced_parabolicity(sub: &SubModel, rho: f64) -> Result<ParabolicityVerdict> {
    classify_parabolicity(&sub.induced, rho)
}

/// `Vol_h(D_R)` on the sub-model by direct quadrature of the induced density.
pub fn extrinsic_ball_volume(sub: &SubModel, big_r: f64) -> Result<f64> {
    let v = integrate_tol(|t| sub.induced.area_density(t), 0.0, big_r, Tolerance::PRECISE)?.value;
    Ok(sub.induced.unit_sphere_area() * v)
}
