use nalgebra::DVector;
use num_complex::Complex64;
use proptest::prelude::*;
use sphfn::{
    bessel_j, build_group, closed_form_spherical, equivalent, eval_spherical, posdef_verdict, quasicharacter, ClosedFormQuery,
    EvalConfig, GroupHandle, GroupSpec, MethodPreference, SpectralParam, Verdict,
};

fn finite_group() -> impl Strategy<Value = GroupSpec> {
    prop_oneof![(1usize..=8).prop_map(GroupSpec::cyclic), (1usize..=6).prop_map(GroupSpec::dihedral)]
}

fn plane_xi() -> impl Strategy<Value = SpectralParam> {
    prop::array::uniform4(-2.0f64..2.0).prop_map(|a| SpectralParam::from_parts(&a[..2], &[0.5 * a[2], 0.5 * a[3]]).unwrap())
}

fn plane_point() -> impl Strategy<Value = DVector<f64>> {
    prop::array::uniform2(-3.0f64..3.0).prop_map(|a| DVector::from_column_slice(&a))
}

fn value(h: &GroupHandle, xi: &SpectralParam, x: &DVector<f64>) -> Complex64 {
    eval_spherical(h, xi, x, &EvalConfig::default()).unwrap().value
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn finite_groups_are_bi_invariant(spec in finite_group(), xi in plane_xi(), x in plane_point()) {
        let h = build_group(&spec).unwrap();
        let base = value(&h, &xi, &x);
        let scale = base.norm().max(1.0);
        for k in h.elements().unwrap() {
            // left invariance in x and invariance of the parameter orbit
            prop_assert!((value(&h, &xi, &k.act(&x)) - base).norm() <= 1e-12 * scale);
            prop_assert!((value(&h, &xi.transformed(k.matrix()), &x) - base).norm() <= 1e-12 * scale);
        }
        prop_assert!((value(&h, &xi, &DVector::zeros(2)) - Complex64::new(1.0, 0.0)).norm() <= 1e-14);
    }

    #[test]
    fn orbit_mates_are_equivalent(spec in finite_group(), xi in plane_xi()) {
        let h = build_group(&spec).unwrap();
        for k in h.elements().unwrap() {
            prop_assert!(equivalent(&h, &xi, &xi.transformed(k.matrix()), 1e-9).unwrap());
        }
    }

    #[test]
    fn circle_average_is_the_bessel_function(lre in 0.0f64..4.0, lim in -1.0f64..1.0, r in 0.0f64..3.0) {
        let so2 = build_group(&GroupSpec::SpecialOrthogonal { n: 2 }).unwrap();
        let xi = SpectralParam::new(vec![Complex64::new(lre, lim), Complex64::new(0.0, 0.0)]);
        let x = DVector::from_column_slice(&[0.0, r]);
        let avg = value(&so2, &xi, &x);
        let j0 = bessel_j(0.0, Complex64::new(lre, lim) * r).unwrap();
        prop_assert!((avg - j0).norm() <= 1e-10 * j0.norm().max(1.0), "{avg} vs {j0}");
    }

    #[test]
    fn closed_form_matches_group_average_in_three_dimensions(l in 0.1f64..3.0, r in 0.1f64..3.0) {
        let t = l * r;
        let cf = closed_form_spherical(&ClosedFormQuery::new(3, Complex64::new(l, 0.0), r)).unwrap();
        prop_assert!((cf.re - t.sin() / t).abs() <= 1e-12);
        let so3 = build_group(&GroupSpec::SpecialOrthogonal { n: 3 }).unwrap();
        let cfg = EvalConfig::default().with_method(MethodPreference::MonteCarlo).with_samples(4000);
        let mc = eval_spherical(&so3, &SpectralParam::real(&[l, 0.0, 0.0]), &DVector::from_column_slice(&[0.0, r, 0.0]), &cfg).unwrap();
        prop_assert!((mc.value - cf).norm() <= 5.0 * mc.stderr, "{} vs {cf} (stderr {})", mc.value, mc.stderr);
    }

    #[test]
    fn quasicharacter_is_multiplicative(xi in plane_xi(), x in plane_point(), y in plane_point()) {
        let lhs = quasicharacter(&(&x + &y), &xi).unwrap();
        let rhs = quasicharacter(&x, &xi).unwrap() * quasicharacter(&y, &xi).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-12 * lhs.norm().max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn real_parameters_are_positive_definite(spec in finite_group(), a in prop::array::uniform2(-2.0f64..2.0)) {
        let h = build_group(&spec).unwrap();
        let cfg = EvalConfig { gram_points: 12, ..EvalConfig::default() };
        let report = posdef_verdict(&h, &SpectralParam::real(&a), &cfg).unwrap();
        prop_assert_eq!(report.verdict, Verdict::ConsistentPSD);
        prop_assert!(report.min_eigenvalue >= -1e-9);
    }
}

#[test]
fn monte_carlo_error_shrinks_like_inverse_root() {
    let so3 = build_group(&GroupSpec::SpecialOrthogonal { n: 3 }).unwrap();
    let xi = SpectralParam::real(&[2.0, 0.0, 0.0]);
    let x = DVector::from_column_slice(&[0.5, 0.5, 0.0]);
    let base = EvalConfig::default().with_method(MethodPreference::MonteCarlo);
    let small = eval_spherical(&so3, &xi, &x, &base.with_samples(10_000)).unwrap();
    let large = eval_spherical(&so3, &xi, &x, &base.with_samples(160_000)).unwrap();
    let ratio = small.stderr / large.stderr;
    assert!((ratio - 4.0).abs() < 0.4, "stderr ratio {ratio}");
    let t = 2.0 * 0.5f64.sqrt();
    assert!((large.value.re - t.sin() / t).abs() < 4.0 * large.stderr);
}
