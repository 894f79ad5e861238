use proptest::prelude::*;

use wgeom_core::capacity::{capacity_at_infinity, potential, ParabolicityVerdict};
use wgeom_core::comparison::{verify, IntrinsicScenario, Relation, Theorem, Tolerances};
use wgeom_core::extrinsic::{classify_submanifold, default_grid, totally_geodesic_submodel, ClassifyVariant};
use wgeom_core::model::WeightedModelSpace;
use wgeom_core::profile::{RadialProfile, WarpingFunction};

fn arb_model() -> impl Strategy<Value = WeightedModelSpace> {
    (2u32..=6, -2.0f64..=0.0, -0.5f64..=0.5, -0.4f64..=0.4, any::<bool>(), -0.5f64..=0.5).prop_map(|(m, b, c1, c2, space, a)| {
        let w = if space { WarpingFunction::space_form(b) } else { WarpingFunction::linear_exponential(a) }.unwrap();
        let f = RadialProfile::parse(&format!("{c1:?}*r + {c2:?}*r^2")).unwrap();
        WeightedModelSpace::new(m, w, f).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn capacity_decreases_with_the_outer_radius(model in arb_model(), rho in 0.2f64..1.5, d1 in 0.1f64..1.0, d2 in 0.1f64..1.0) {
        let a = potential(&model, rho, rho + d1).unwrap().capacity;
        let b = potential(&model, rho, rho + d1 + d2).unwrap().capacity;
        prop_assert!(b < a);
        if let Some(inf) = capacity_at_infinity(&model, rho).unwrap().value {
            prop_assert!(inf <= b * (1.0 + 1e-12));
        }
    }

    #[test]
    fn volume_derivative_is_area(model in arb_model(), r in 0.2f64..2.0) {
        let h = 1e-5 * r;
        let dv = (model.volume_ball(r + h).unwrap() - model.volume_ball(r - h).unwrap()) / (2.0 * h);
        let area = model.area_sphere(r).unwrap();
        prop_assert!((dv - area).abs() <= 1e-6 * area, "{dv} vs {area}");
    }

    #[test]
    fn potential_is_monotone_between_its_boundary_values(model in arb_model(), rho in 0.2f64..1.5, d in 0.1f64..2.0, t in 0.0f64..1.0) {
        let p = potential(&model, rho, rho + d).unwrap().potential;
        let r = rho + t * d;
        let v = p.value(r).unwrap();
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&v));
        prop_assert!(p.derivative(r) < 0.0);
    }

    #[test]
    fn a_model_satisfies_its_own_comparison_theorems(model in arb_model()) {
        let theta = model.log_weight().derivative();
        let sc = IntrinsicScenario::new(model.clone(), model.warping().clone()).with_theta(theta).with_radii(vec![0.3, 0.9, 2.0]);
        for th in [Theorem::IsoperimetricRicci, Theorem::ParabolicityRicci, Theorem::IsoperimetricSectional, Theorem::HyperbolicitySectional] {
            let rep = verify(&sc, th, &Tolerances::default()).unwrap();
            prop_assert!(rep.verdict.is_pass(), "{th}: {}", rep.verdict);
        }
    }

    #[test]
    fn classification_survives_reanchoring(model in arb_model(), n in 2u32..=3, shift in 0.5f64..3.0) {
        prop_assume!(n <= model.dim());
        let sub = totally_geodesic_submodel(&model, n).unwrap();
        let w = model.warping();
        let tol = Tolerances::default();
        let prof = sub.equality_profile(1.0, Relation::AtMost).unwrap();
        let moved = prof.reanchored(1.0 + shift).unwrap();
        let a = classify_submanifold(&prof, w, ClassifyVariant::Sec, &default_grid(&prof, w), &tol).unwrap().verdict;
        let b = classify_submanifold(&moved, w, ClassifyVariant::Sec, &default_grid(&moved, w), &tol).unwrap().verdict;
        prop_assert_ne!(a, ParabolicityVerdict::Inconclusive);
        prop_assert_eq!(a, b);
    }
}
