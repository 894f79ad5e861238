//! One function per subcommand, each producing a [`Report`].

use wgeom_core::capacity::{capacity_at_infinity, exit_time_transplant, potential, CapacityAtInfinity, ParabolicityVerdict};
use wgeom_core::comparison::{verify, ComparisonReport, IntrinsicScenario, MarginSeries, Relation, Tolerances, Verdict};
use wgeom_core::extrinsic::{
    classify_submanifold, default_grid, induced_parabolicity, totally_geodesic_submodel, verify_simpson, ClassifyVariant,
};
use wgeom_core::oracle::{minimize_dirichlet_energy, solve_exit_time, Spacing};
use wgeom_core::profile::{linear_grid, RadialProfile};
use wgeom_core::quadrature::IntegralVerdict;

use crate::error::{input, CliError};
use crate::format::{g12, opt};
use crate::scenario::{Command, Scenario};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    Violation,
    Inconclusive,
}

impl Status {
    pub fn exit_code(self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::Violation => 1,
            Status::Inconclusive => 2,
        }
    }

    fn worst(self, other: Status) -> Status {
        match (self, other) {
            (Status::Violation, _) | (_, Status::Violation) => Status::Violation,
            (Status::Inconclusive, _) | (_, Status::Inconclusive) => Status::Inconclusive,
            _ => Status::Ok,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub status: Status,
    pub lines: Vec<(String, String)>,
    /// What `--quiet` prints.
    pub primary: Vec<String>,
    pub table: Option<Table>,
}

impl Report {
    fn new(status: Status) -> Self {
        Report { status, lines: Vec::new(), primary: Vec::new(), table: None }
    }

    fn line(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.lines.push((key.into(), value.into()));
    }

    fn primary(&mut self, key: &str, value: String) {
        self.line(key, value.clone());
        self.primary.push(value);
    }
}

pub fn execute(sc: &Scenario) -> Result<Report, CliError> {
    match sc.command() {
        Command::Classify => classify(sc),
        Command::Capacity => capacity(sc),
        Command::Volume => volume(sc, false),
        Command::Quotient => volume(sc, true),
        Command::ExitTime => exit_time(sc),
        Command::Compare => compare(sc),
        Command::Extrinsic => extrinsic(sc),
        Command::Oracle => oracle(sc),
        Command::Sweep => sweep(sc),
    }
}

fn verdict_status(v: ParabolicityVerdict) -> Status {
    match v {
        ParabolicityVerdict::Inconclusive => Status::Inconclusive,
        _ => Status::Ok,
    }
}

fn describe_integral(v: IntegralVerdict) -> String {
    match v {
        IntegralVerdict::Converges { value, error } => format!("converges to {} (error {})", g12(value), g12(error)),
        IntegralVerdict::Diverges => "diverges".into(),
        IntegralVerdict::Inconclusive => "inconclusive".into(),
    }
}

fn cap_text(c: &CapacityAtInfinity) -> String {
    c.value.map_or_else(|| "inconclusive".into(), g12)
}

fn classify(sc: &Scenario) -> Result<Report, CliError> {
    let model = sc.model()?;
    let rho = sc.rho()?;
    let cap = capacity_at_infinity(&model, rho)?;
    let mut rep = Report::new(verdict_status(cap.verdict));
    rep.primary("verdict", cap.verdict.to_string());
    rep.line("flux integral from rho to infinity", describe_integral(cap.tail));
    rep.line("Cap(B_rho)", cap_text(&cap));
    rep.table = Some(Table {
        header: vec!["rho", "verdict", "Cap_to_infinity"],
        rows: vec![vec![g12(rho), cap.verdict.to_string(), cap_text(&cap)]],
    });
    Ok(rep)
}

fn capacity(sc: &Scenario) -> Result<Report, CliError> {
    let model = sc.model()?;
    let rho = sc.rho()?;
    let Some(big_r) = sc.action.big_r else {
        let cap = capacity_at_infinity(&model, rho)?;
        let mut rep = Report::new(verdict_status(cap.verdict));
        rep.primary("Cap(B_rho)", cap_text(&cap));
        rep.line("verdict", cap.verdict.to_string());
        rep.line("flux integral from rho to infinity", describe_integral(cap.tail));
        return Ok(rep);
    };
    let res = potential(&model, rho, big_r)?;
    let pot = &res.potential;
    let mut rep = Report::new(Status::Ok);
    rep.primary("Cap(B_rho, B_R)", g12(res.capacity));
    rep.line("phi'(rho)", g12(pot.derivative(rho)));
    rep.line("phi'(R)", g12(pot.derivative(big_r)));
    let nodes = linear_grid(rho, big_r, 65);
    let mut rows = Vec::with_capacity(nodes.len());
    let mut residual = 0.0f64;
    for &r in &nodes {
        residual = residual.max(pot.ode_residual(r).abs());
        rows.push(vec![g12(r), g12(pot.value(r)?), g12(pot.derivative(r))]);
    }
    rep.line("max ODE residual on 65 radii", g12(residual));
    rep.table = Some(Table { header: vec!["r", "phi", "dphi"], rows });
    Ok(rep)
}

fn volume(sc: &Scenario, quotient_first: bool) -> Result<Report, CliError> {
    let model = sc.model()?;
    let big_r = sc.big_r()?;
    let (vol, area, q) = (model.volume_ball(big_r)?, model.area_sphere(big_r)?, model.iso_quotient(big_r)?);
    let mut rep = Report::new(Status::Ok);
    if quotient_first {
        rep.primary("q_iso(R)", g12(q));
        rep.line("Vol_h(B_R)", g12(vol));
        rep.line("Area_h(S_R)", g12(area));
    } else {
        rep.primary("Vol_h(B_R)", g12(vol));
        rep.line("Area_h(S_R)", g12(area));
        rep.line("q_iso(R)", g12(q));
    }
    rep.table = Some(Table { header: vec!["R", "Vol_h", "Area_h", "q_iso"], rows: vec![vec![g12(big_r), g12(vol), g12(area), g12(q)]] });
    Ok(rep)
}

fn exit_time(sc: &Scenario) -> Result<Report, CliError> {
    let model = sc.model()?;
    let big_r = sc.big_r()?;
    let cells = sc.grid();
    let exact = exit_time_transplant(&model, big_r)?;
    let grid = solve_exit_time(&model, big_r, cells)?;
    let values = exact.values_on(&grid.nodes)?;
    let err = grid.values.iter().zip(&values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let mut rep = Report::new(Status::Ok);
    rep.primary("E(0)", g12(exact.value(0.0)?));
    rep.line("oracle sup error", g12(err));
    rep.line("oracle cells", cells.to_string());
    rep.table = Some(Table {
        header: vec!["r", "transplant", "oracle"],
        rows: grid.nodes.iter().zip(&values).zip(&grid.values).map(|((r, e), o)| vec![g12(*r), g12(*e), g12(*o)]).collect(),
    });
    Ok(rep)
}

fn verdict_status_of(v: &Verdict) -> Status {
    match v {
        Verdict::Pass => Status::Ok,
        Verdict::InequalityViolation { .. } => Status::Violation,
        Verdict::HypothesisFail { .. } | Verdict::Inconclusive { .. } => Status::Inconclusive,
    }
}

fn intrinsic(sc: &Scenario) -> Result<IntrinsicScenario, CliError> {
    let c = sc.comparison()?;
    let mut s = IntrinsicScenario::new(sc.model()?, c.w.build()?).with_rho0(c.rho0).with_radii(sc.radii().to_vec());
    if let Some(t) = &c.theta {
        s = s.with_theta(RadialProfile::parse(t)?);
    }
    if let Some(q) = c.q {
        s = s.with_q(q);
    }
    Ok(s)
}

fn summarize(rep: &mut Report, kind: &str, series: &[MarginSeries], tol: &Tolerances) {
    for s in series {
        let failures = s.margins.iter().filter(|m| !m.holds(tol)).count();
        let tight = match s.tightest() {
            Some(m) => format!(
                "tightest at r = {}{}: lhs {} rhs {} normalized margin {}",
                g12(m.r),
                m.outer.map_or_else(String::new, |o| format!(", R = {}", g12(o))),
                g12(m.lhs),
                g12(m.rhs),
                g12(m.normalized())
            ),
            None => "no margins".into(),
        };
        rep.line(format!("{kind} {}", s.statement), format!("{} of {} fail; {tight}", failures, s.margins.len()));
    }
}

fn margin_rows(report: &ComparisonReport, tol: &Tolerances) -> Vec<Vec<String>> {
    let tagged = report.hypotheses.iter().map(|s| ("hypothesis", s)).chain(report.inequalities.iter().map(|s| ("inequality", s)));
    let mut rows = Vec::new();
    for (kind, s) in tagged {
        for m in &s.margins {
            rows.push(vec![
                kind.to_string(),
                s.statement.clone(),
                g12(m.r),
                opt(m.outer),
                g12(m.lhs),
                g12(m.rhs),
                g12(m.raw()),
                g12(m.normalized()),
                m.holds(tol).to_string(),
            ]);
        }
    }
    rows
}

const MARGIN_HEADER: [&str; 9] = ["kind", "statement", "r", "R", "lhs", "rhs", "raw_margin", "normalized_margin", "holds"];

fn compare(sc: &Scenario) -> Result<Report, CliError> {
    let th = sc.theorem()?;
    let tol = sc.tolerances();
    let report = verify(&intrinsic(sc)?, th, &tol)?;
    let mut rep = Report::new(verdict_status_of(&report.verdict));
    rep.primary("verdict", report.verdict.to_string());
    summarize(&mut rep, "hypothesis", &report.hypotheses, &tol);
    summarize(&mut rep, "inequality", &report.inequalities, &tol);
    rep.table = Some(Table { header: MARGIN_HEADER.to_vec(), rows: margin_rows(&report, &tol) });
    Ok(rep)
}

fn extrinsic(sc: &Scenario) -> Result<Report, CliError> {
    let tol = sc.tolerances();
    if let Some(spec) = &sc.submanifold {
        let prof = spec.build()?;
        let c = sc.comparison()?;
        let comp_w = c.w.build()?;
        let variant = match sc.action.theorem.as_deref() {
            Some("sub-parabolicity") => ClassifyVariant::Sec,
            Some("sub-q") => {
                let m = sc.model.as_ref().ok_or_else(|| input("sub-q needs the ambient dimension from the model section"))?.m;
                let q = c.q.ok_or_else(|| input("sub-q needs comparison.q"))?;
                ClassifyVariant::QWeighted { m, q }
            }
            other => return Err(input(format!("unknown extrinsic theorem {other:?}; expected sub-parabolicity or sub-q"))),
        };
        let grid = match sc.action.radii.as_deref() {
            Some(r) => r.to_vec(),
            None => default_grid(&prof, &comp_w),
        };
        let cls = classify_submanifold(&prof, &comp_w, variant, &grid, &tol)?;
        let status = if cls.verdict == ParabolicityVerdict::Inconclusive || !cls.guaranteed { Status::Inconclusive } else { Status::Ok };
        let mut rep = Report::new(status);
        rep.primary("verdict", cls.verdict.to_string());
        rep.line("guaranteed", cls.guaranteed.to_string());
        rep.line("comparison integral", describe_integral(cls.integral));
        rep.line("capacity ratio bound", opt(cls.capacity_ratio));
        summarize(&mut rep, "balance", std::slice::from_ref(&cls.balance), &tol);
        rep.table = Some(Table {
            header: vec!["r", "lhs", "rhs", "normalized_margin", "holds"],
            rows: cls
                .balance
                .margins
                .iter()
                .map(|m| vec![g12(m.r), g12(m.lhs), g12(m.rhs), g12(m.normalized()), m.holds(&tol).to_string()])
                .collect(),
        });
        return Ok(rep);
    }
    let n = sc.action.n.ok_or_else(|| input("extrinsic needs action.n (sub-model dimension) or a submanifold section"))?;
    let sub = totally_geodesic_submodel(&sc.model()?, n)?;
    let (rho, big_r) = (sc.rho()?, sc.big_r()?);
    let simpson = verify_simpson(&sub, big_r, &tol)?;
    let prof = sub.equality_profile(rho, Relation::AtMost)?;
    let w = sub.ambient().warping();
    let cls = classify_submanifold(&prof, w, ClassifyVariant::Sec, &default_grid(&prof, w), &tol)?;
    let induced = induced_parabolicity(&sub, rho)?;
    let agree = cls.verdict == induced && induced != ParabolicityVerdict::Inconclusive;
    let mut status = verdict_status_of(&simpson.verdict);
    if !agree {
        status = status.worst(if cls.verdict == ParabolicityVerdict::Inconclusive { Status::Inconclusive } else { Status::Violation });
    }
    let mut rep = Report::new(status);
    rep.primary("simpson", simpson.verdict.to_string());
    rep.line("balance direction", simpson.sense.map_or("none", |s| if s == Relation::AtMost { "at-most" } else { "at-least" }));
    summarize(&mut rep, "inequality", std::slice::from_ref(&simpson.inequality), &tol);
    rep.primary("classification", cls.verdict.to_string());
    rep.line("induced model", induced.to_string());
    rep.line("agree", agree.to_string());
    rep.table = Some(Table {
        header: vec!["R", "lhs", "rhs", "normalized_margin", "holds"],
        rows: simpson
            .inequality
            .margins
            .iter()
            .map(|m| vec![g12(m.r), g12(m.lhs), g12(m.rhs), g12(m.normalized()), m.holds(&tol).to_string()])
            .collect(),
    });
    Ok(rep)
}

fn oracle(sc: &Scenario) -> Result<Report, CliError> {
    let model = sc.model()?;
    let (rho, big_r, cells) = (sc.rho()?, sc.big_r()?, sc.grid());
    if cells < 4 {
        return Err(input(format!("oracle needs at least 4 cells, got {cells}")));
    }
    let exact = potential(&model, rho, big_r)?;
    let fine = minimize_dirichlet_energy(&model, rho, big_r, cells, Spacing::Uniform)?;
    let coarse = minimize_dirichlet_energy(&model, rho, big_r, cells / 2, Spacing::Uniform)?;
    let (ef, ec) = ((fine.energy - exact.capacity).abs() / exact.capacity, (coarse.energy - exact.capacity).abs() / exact.capacity);
    let mut rep = Report::new(Status::Ok);
    rep.primary("relative error", g12(ef));
    rep.line("analytic capacity", g12(exact.capacity));
    rep.line("discrete energy", g12(fine.energy));
    rep.line(format!("relative error at {} cells", cells / 2), g12(ec));
    rep.line("observed order", g12((ec / ef).log2()));
    let mut rows = Vec::with_capacity(fine.grid.nodes.len());
    for (r, u) in fine.grid.nodes.iter().zip(&fine.grid.values) {
        rows.push(vec![g12(*r), g12(*u), g12(exact.potential.value(*r)?)]);
    }
    rep.table = Some(Table { header: vec!["r", "discrete", "analytic"], rows });
    Ok(rep)
}

fn sweep(sc: &Scenario) -> Result<Report, CliError> {
    let model = sc.model()?;
    let tol = sc.tolerances();
    let radii = sc.radii();
    let comparison = match (&sc.action.theorem, &sc.comparison) {
        (Some(_), Some(_)) => Some(verify(&intrinsic(sc)?, sc.theorem()?, &tol)?),
        (Some(_), None) => return Err(input("a theorem in a sweep needs a comparison section")),
        _ => None,
    };
    let mut status = comparison.as_ref().map_or(Status::Ok, |c| verdict_status_of(&c.verdict));
    let mut rows = Vec::with_capacity(radii.len());
    for &r in radii {
        let cap = capacity_at_infinity(&model, r)?;
        status = status.worst(verdict_status(cap.verdict));
        let mut flags = cap.verdict.to_string().to_lowercase();
        if let Some(c) = &comparison {
            for (key, series) in [("hyp", &c.hypotheses), ("ineq", &c.inequalities)] {
                let at_r: Vec<_> = series.iter().flat_map(|s| &s.margins).filter(|m| m.r == r).collect();
                let state = match (at_r.is_empty(), at_r.iter().all(|m| m.holds(&tol))) {
                    (true, _) => "na",
                    (false, true) => "pass",
                    (false, false) => "fail",
                };
                flags.push_str(&format!(";{key}={state}"));
            }
        }
        rows.push(vec![g12(r), g12(model.volume_ball(r)?), g12(model.area_sphere(r)?), g12(model.iso_quotient(r)?), cap_text(&cap), flags]);
    }
    let mut rep = Report::new(status);
    rep.line("radii", radii.len().to_string());
    if let Some(c) = &comparison {
        rep.primary("verdict", c.verdict.to_string());
    }
    rep.table = Some(Table { header: vec!["r", "Vol_h", "Area_h", "q_iso", "Cap_to_infinity", "verdict_flags"], rows });
    Ok(rep)
}
