//! Property tests for identities that hold for every input.

use casimir_pfa::io::{read_curve, write_curve};
use casimir_pfa::model::symbolic_coefficient_set;
use casimir_pfa::*;
use proptest::prelude::*;
use BoundaryCondition::*;

fn paraboloid_pair(
    r1: (f64, f64),
    r2: (f64, f64),
    d: f64,
) -> (HeightProfile<f64>, HeightProfile<f64>) {
    let below = HeightProfile::paraboloid(-r1.0, -r1.1, 0.0);
    let above = HeightProfile::paraboloid(r2.0, r2.1, d);
    (below, above)
}

fn surface_kind() -> impl Strategy<Value = BoundaryCondition> {
    prop_oneof![Just(D), Just(N), Just(EM)]
}

fn domain() -> IntegrationDomain<f64> {
    IntegrationDomain::disk(0.15).with_slope_cap(0.2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn tilt_sum_rule_holds_for_supported_pairs(a in surface_kind(), b in surface_kind()) {
        if let Ok(s) = symbolic_coefficient_set(a, b) {
            let c = s.eval::<f64>();
            prop_assert!((c.beta1 + c.beta2 + c.beta_cross - 2.0).abs() < 1e-14);
            prop_assert!(c.tilt_residual().abs() < 1e-14);
        }
    }

    #[test]
    fn em_energy_is_sum_of_scalar_energies(
        r1 in (1.0f64..10.0, 1.0f64..10.0),
        r2 in (1.0f64..10.0, 1.0f64..10.0),
        d in 1e-4f64..1e-3,
    ) {
        let (h1, h2) = paraboloid_pair(r1, r2, d);
        let e = |bc| {
            let c = CoefficientSet::<f64>::for_kind(bc);
            gradient_energy(&h1, &h2, &c, &c.law(), &domain()).unwrap().energy
        };
        let (ed, en, eem) = (e(D), e(N), e(EM));
        prop_assert!(((ed + en) - eem).abs() <= 1e-12 * eem.abs());
    }

    #[test]
    fn small_tilt_changes_energy_at_second_order(
        kind in prop_oneof![Just(D), Just(N), Just(EM), Just(DN), Just(ND)],
        r1 in (1.0f64..10.0, 1.0f64..10.0),
        r2 in (1.0f64..10.0, 1.0f64..10.0),
        d in 1e-4f64..1e-3,
        eps in -0.03f64..0.03,
    ) {
        let (h1, h2) = paraboloid_pair(r1, r2, d);
        let c = CoefficientSet::<f64>::for_kind(kind);
        let law = c.law();
        let e0 = gradient_energy(&h1, &h2, &c, &law, &domain()).unwrap().energy;
        let (t1, t2) = (tilt_transform(&h1, eps), tilt_transform(&h2, eps));
        let e1 = gradient_energy(&t1, &t2, &c, &law, &domain()).unwrap().energy;
        prop_assert!((e1 - e0).abs() <= 5.0 * eps * eps * e0.abs() + 1e-9 * e0.abs());
    }

    #[test]
    fn two_sphere_closed_form_is_scale_invariant_and_symmetric(
        kind in surface_kind(),
        r1 in 0.1f64..10.0,
        r2 in 0.1f64..10.0,
        d in 1e-4f64..1e-2,
        s in 0.01f64..100.0,
    ) {
        let c = CoefficientSet::<f64>::for_kind(kind);
        let a = closed_form_two_spheres(r1, Some(r2), d, &c).unwrap();
        let b = closed_form_two_spheres(s * r1, Some(s * r2), s * d, &c).unwrap();
        let swapped = closed_form_two_spheres(r2, Some(r1), d, &c).unwrap();
        prop_assert!((a.ratio - b.ratio).abs() <= 1e-13);
        prop_assert!((a.ratio - swapped.ratio).abs() <= 1e-13);
    }

    #[test]
    fn plate_law_scales_with_inverse_cube(kind in surface_kind(), h in 1e-3f64..10.0, s in 0.1f64..10.0) {
        let law = CoefficientSet::<f64>::for_kind(kind).law();
        let u = law.energy_per_area(h).unwrap();
        let us = law.energy_per_area(s * h).unwrap();
        prop_assert!((us * s.powi(3) - u).abs() <= 1e-13 * u.abs());
        prop_assert!(u < 0.0);
    }

    #[test]
    fn curve_csv_keeps_twelve_digits(values in prop::collection::vec(0.5f64..2.0, 1..20)) {
        let samples: Vec<(f64, f64)> = values
            .iter()
            .enumerate()
            .map(|(i, &v)| (0.01 * (i + 1) as f64, v))
            .collect();
        let curve = EnergyCurve::new(samples, Provenance::Oracle).unwrap();
        let mut buf = Vec::new();
        write_curve(&mut buf, &curve).unwrap();
        let back = read_curve(&buf[..], Provenance::Oracle).unwrap();
        for (a, b) in curve.samples.iter().zip(&back.samples) {
            prop_assert!((a.0 - b.0).abs() <= 1e-11 * a.0.abs());
            prop_assert!((a.1 - b.1).abs() <= 1e-11 * a.1.abs());
        }
    }
}
