//! Closed-form values across the public API.

use std::f64::consts::{E, PI};

use wgeom_core::capacity::{
    capacity_at_infinity, classify_parabolicity, exit_time_transplant, generalized_potential, potential, ParabolicityVerdict,
};
use wgeom_core::comparison::{hessian_bound, laplacian_bound, BoundVariant, IntrinsicScenario};
use wgeom_core::model::WeightedModelSpace;
use wgeom_core::oracle::{minimize_dirichlet_energy, solve_exit_time, solve_radial_bvp, Spacing};
use wgeom_core::profile::{RadialProfile, WarpingFunction};
use wgeom_core::quadrature::{classify_improper, integrate, IntegralVerdict, Tolerance};

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + b.abs())
}

fn model(m: u32, w: &str, f: &str) -> WeightedModelSpace {
    let w = match w {
        "r" => WarpingFunction::space_form(0.0),
        "sinh" => WarpingFunction::space_form(-1.0),
        "sin" => WarpingFunction::space_form(1.0),
        other => WarpingFunction::parse(other),
    };
    WeightedModelSpace::new(m, w.unwrap(), RadialProfile::parse(f).unwrap()).unwrap()
}

fn coth1() -> f64 {
    1f64.cosh() / 1f64.sinh()
}

#[test]
fn profiles() {
    assert_eq!(RadialProfile::parse("r^2 - 1").unwrap().value(2.0).unwrap(), 3.0);
    assert!(close(RadialProfile::parse("exp(-r^2)").unwrap().value(1.0).unwrap(), 0.36788, 1e-5));
    let s = RadialProfile::parse("sinh(r)").unwrap();
    assert!(close(s.eval(1.0, 0).unwrap(), 1.1752012, 1e-7));
    assert_eq!(s.eval(0.0, 1).unwrap(), 1.0);
    assert_eq!(RadialProfile::parse("r").unwrap().eval(3.7, 2).unwrap(), 0.0);
    assert_eq!(WarpingFunction::space_form(0.0).unwrap().value(2.0), 2.0);
    assert!(close(WarpingFunction::space_form(-1.0).unwrap().value(1.0), 1.1752012, 1e-7));
    assert!(close(WarpingFunction::space_form(1.0).unwrap().value(PI / 2.0), 1.0, 1e-15));
}

#[test]
fn quadrature() {
    let tol = Tolerance::new(1e-14, 1e-12);
    assert!(close(integrate(|s| s * s, 1.0, 2.0, 1e-12).unwrap(), 7.0 / 3.0, 1e-12));
    assert!(close(integrate(|s| s * s, 0.0, 1.0, 1e-12).unwrap(), 1.0 / 3.0, 1e-12));
    let sinh2 = integrate(|s: f64| s.sinh().powi(2), 0.0, 1.0, 1e-12).unwrap();
    assert!(close(sinh2, (2f64.sinh() / 2.0 - 1.0) / 2.0, 1e-12));
    assert!(close(sinh2, 0.40672, 1e-5));
    match classify_improper(|s| s.powi(-2), 1.0, None, tol).unwrap() {
        IntegralVerdict::Converges { value, .. } => assert!(close(value, 1.0, 1e-9)),
        v => panic!("{v:?}"),
    }
    assert_eq!(classify_improper(|s| 1.0 / s, 1.0, None, tol).unwrap(), IntegralVerdict::Diverges);
    match classify_improper(|s: f64| s.sinh().powi(-2), 1.0, None, tol).unwrap() {
        IntegralVerdict::Converges { value, .. } => assert!(close(value, coth1() - 1.0, 1e-9)),
        v => panic!("{v:?}"),
    }
}

#[test]
fn volumes_areas_quotients() {
    assert!(close(model(2, "r", "0").unit_sphere_area(), 2.0 * PI, 1e-14));
    assert!(close(model(3, "r", "0").unit_sphere_area(), 4.0 * PI, 1e-14));
    assert!(close(model(4, "r", "0").unit_sphere_area(), 2.0 * PI * PI, 1e-14));
    assert!(close(model(3, "r", "0").volume_ball(1.0).unwrap(), 4.0 * PI / 3.0, 1e-12));
    assert!(close(model(2, "sinh", "0").volume_ball(1.0).unwrap(), 2.0 * PI * (1f64.cosh() - 1.0), 1e-12));
    assert!(close(model(3, "r", "0").area_sphere(2.0).unwrap(), 16.0 * PI, 1e-14));
    assert!(close(model(2, "sinh", "0").area_sphere(1.0).unwrap(), 2.0 * PI * 1f64.sinh(), 1e-14));
    assert!(close(model(3, "r", "-r^2").area_sphere(1.0).unwrap(), 4.0 * PI / E, 1e-14));
    assert!(close(model(3, "r", "0").iso_quotient(2.0).unwrap(), 2.0 / 3.0, 1e-12));
    assert_eq!(model(3, "r", "0").iso_quotient(0.0).unwrap(), 0.0);
    // q(R) ~ R/m near the pole.
    let h = 1e-4;
    assert!(close(model(4, "sinh", "r").iso_quotient(h).unwrap() / h, 0.25, 1e-3));
}

#[test]
fn curvatures() {
    let e3 = model(3, "r", "0");
    let h3 = model(3, "sinh", "0");
    let gauss = model(3, "r", "-r^2");
    assert!(close(e3.sphere_mean_curvature(2.0).unwrap(), 0.5, 1e-14));
    assert!(close(h3.sphere_mean_curvature(1.0).unwrap(), coth1(), 1e-14));
    assert!(close(model(2, "sin", "0").sphere_mean_curvature(PI / 2.0).unwrap(), 0.0, 1e-14));
    assert!(close(h3.radial_sec(0.7).unwrap(), -1.0, 1e-14));
    assert_eq!(e3.radial_sec(0.7).unwrap(), 0.0);
    assert!(close(h3.radial_ric(2.0).unwrap(), -2.0, 1e-14));
    assert!(close(gauss.radial_ric_h(1.0, f64::INFINITY).unwrap(), 2.0, 1e-14));
    assert!(close(gauss.radial_ric_h(1.0, 1.0).unwrap(), -2.0, 1e-14));
    assert!(close(gauss.radial_sec_h(1.0, f64::INFINITY).unwrap(), 1.0, 1e-14));
    assert!(close(gauss.radial_sec_h(1.0, 4.0).unwrap(), 0.5, 1e-14));
    assert!(close(e3.laplacian_distance(2.0).unwrap(), 1.0, 1e-14));
    assert!(close(model(2, "sinh", "0").laplacian_distance(1.0).unwrap(), coth1(), 1e-14));
    assert!(close(gauss.laplacian_distance(1.0).unwrap(), 0.0, 1e-14));
    assert!(close(e3.hessian_distance(3.0).unwrap(), 1.0 / 3.0, 1e-14));
}

#[test]
fn capacities() {
    let e3 = model(3, "r", "0");
    let c = potential(&e3, 1.0, 2.0).unwrap();
    assert!(close(c.capacity, 8.0 * PI, 1e-12));
    assert!(close(c.potential.value(1.0).unwrap(), 1.0, 1e-15));
    assert!(close(c.potential.value(2.0).unwrap(), 0.0, 1e-15));
    assert!(close(potential(&model(2, "r", "0"), 1.0, E).unwrap().capacity, 2.0 * PI, 1e-12));
    assert!(close(capacity_at_infinity(&e3, 1.0).unwrap().value.unwrap(), 4.0 * PI, 1e-12));
    assert_eq!(capacity_at_infinity(&model(2, "r", "0"), 3.0).unwrap().value, Some(0.0));
    let h3 = capacity_at_infinity(&model(3, "sinh", "0"), 1.0).unwrap().value.unwrap();
    assert!(close(h3, 4.0 * PI / (coth1() - 1.0), 1e-10));
    assert_eq!(classify_parabolicity(&e3, 1.0).unwrap(), ParabolicityVerdict::Hyperbolic);
    assert_eq!(classify_parabolicity(&model(3, "r", "-r^2"), 1.0).unwrap(), ParabolicityVerdict::Parabolic);
    assert_eq!(classify_parabolicity(&model(2, "r", "0"), 1.0).unwrap(), ParabolicityVerdict::Parabolic);
}

#[test]
fn exit_times() {
    let t = exit_time_transplant(&model(3, "r", "0"), 1.0).unwrap();
    assert!(close(t.value(0.0).unwrap(), 1.0 / 6.0, 1e-13));
    assert_eq!(t.value(1.0).unwrap(), 0.0);
    let t2 = exit_time_transplant(&model(2, "r", "0"), 2.0).unwrap();
    assert!(close(t2.value(0.0).unwrap(), 1.0, 1e-13));
    assert!(close(t2.value(1.0).unwrap(), 0.75, 1e-13));
}

#[test]
fn generalized_potentials() {
    let w = WarpingFunction::space_form(0.0).unwrap();
    let zero = RadialProfile::parse("0").unwrap();
    let g = generalized_potential(&w, 3.0, &zero, 1.0, 2.0).unwrap();
    assert!(close(g.potential.derivative(1.0).abs(), 2.0, 1e-12));
    assert!(close(g.potential.derivative(1.5), -2.0 / 2.25, 1e-12));
    assert_eq!(g.tail, ParabolicityVerdict::Hyperbolic);
    assert_eq!(generalized_potential(&w, 2.5, &zero, 1.0, 2.0).unwrap().tail, ParabolicityVerdict::Hyperbolic);
    assert_eq!(generalized_potential(&w, 2.0, &zero, 1.0, 2.0).unwrap().tail, ParabolicityVerdict::Parabolic);
    // Integer dimension with drift -f' reduces to the weighted potential.
    let m = model(3, "r", "0.5*r^2");
    let theta = RadialProfile::parse("-r").unwrap();
    let g = generalized_potential(&w, 3.0, &theta, 0.8, 2.3).unwrap();
    let p = potential(&m, 0.8, 2.3).unwrap();
    for r in [0.8, 1.0, 1.7, 2.3] {
        assert!(close(g.potential.value(r).unwrap(), p.potential.value(r).unwrap(), 1e-12));
    }
}

#[test]
fn discrete_oracles() {
    let e3 = model(3, "r", "0");
    let bvp = solve_radial_bvp(&e3, 1.0, 2.0, 1024, Spacing::Uniform).unwrap();
    assert_eq!((bvp.values[0], *bvp.values.last().unwrap()), (1.0, 0.0));
    assert!((bvp.interpolate(1.5) - 1.0 / 3.0).abs() <= 1e-5);
    let exact = |r: f64| (1.0 / r - 0.5) / 0.5;
    let sup = |n: usize| {
        let g = solve_radial_bvp(&e3, 1.0, 2.0, n, Spacing::Uniform).unwrap();
        g.nodes.iter().zip(&g.values).map(|(r, u)| (u - exact(*r)).abs()).fold(0.0, f64::max)
    };
    let ratio = sup(256) / sup(512);
    assert!((3.6..4.4).contains(&ratio), "ratio {ratio}");
    let geo = solve_radial_bvp(&e3, 1.0, 2.0, 256, Spacing::Geometric).unwrap();
    assert!((geo.nodes[1] / geo.nodes[0] - geo.nodes[2] / geo.nodes[1]).abs() < 1e-14);

    let e = minimize_dirichlet_energy(&e3, 1.0, 2.0, 4096, Spacing::Uniform).unwrap().energy;
    assert!(close(e, 8.0 * PI, 1e-4));
    let e2 = minimize_dirichlet_energy(&model(2, "r", "0"), 1.0, E, 4096, Spacing::Uniform).unwrap().energy;
    assert!(close(e2, 2.0 * PI, 1e-4));
    let thin = |gap: f64| minimize_dirichlet_energy(&e3, 1.0, 1.0 + gap, 64, Spacing::Uniform).unwrap().energy;
    assert!(thin(1e-3) > 50.0 * thin(1e-1));

    let ex = solve_exit_time(&e3, 1.0, 2048).unwrap();
    assert!((ex.values[0] - 1.0 / 6.0).abs() <= 1e-5);
    assert_eq!(*ex.values.last().unwrap(), 0.0);
    let ex2 = solve_exit_time(&model(2, "r", "0"), 2.0, 2048).unwrap();
    assert!((ex2.values[0] - 1.0).abs() <= 1e-5);
}

#[test]
fn comparison_bounds() {
    let sc = |w: WarpingFunction| IntrinsicScenario::new(model(3, "r", "0"), w).with_theta(RadialProfile::parse("0").unwrap());
    let flat = sc(WarpingFunction::space_form(0.0).unwrap());
    assert!(close(laplacian_bound(&flat, BoundVariant::Infinity, 2.0).unwrap(), 1.0, 1e-14));
    assert!(close(laplacian_bound(&flat.clone().with_q(1.0), BoundVariant::Q, 1.0).unwrap(), 3.0, 1e-14));
    assert!(close(hessian_bound(&flat, BoundVariant::Infinity, 4.0).unwrap(), 0.25, 1e-14));
    let hyp = sc(WarpingFunction::space_form(-1.0).unwrap()).with_q(2.0);
    assert!(close(hessian_bound(&hyp, BoundVariant::Q, 1.0).unwrap(), 2.0 * coth1(), 1e-14));
    assert!(close(2.0 * coth1(), 2.6261, 1e-4));
}
