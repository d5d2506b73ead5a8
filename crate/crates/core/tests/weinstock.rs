use bcurrent::geometry::{build_chart_cover, presets, CoverOptions};
use bcurrent::pairing::{
    force_pairing, stokes_oracle, weinstock_test, Current, Cutoff, LimitMethod, Schedule, TestForm,
};
use bcurrent::quadrature::QuadratureSpec;
use bcurrent::{Domain, Error, Form, Function, C};

#[test]
fn corner_pole_annihilates_holomorphic_forms() {
    let d: Domain = presets::square();
    let cover = build_chart_cover(&d, &CoverOptions::default()).unwrap();
    let f = Function::parse("1/z", 1).unwrap();
    // cutoff ≡ 1 on a neighbourhood of the closed square
    let cut = Cutoff::radial([C::new(1.0, 1.0), C::new(0.0, 0.0)], 1.5, 2.5);
    let forms: Vec<Form> = (0..=5).map(|k| TestForm::parse(1, &[&format!("z^{k}")], cut.clone()).unwrap()).collect();
    let current = Current::Function { f: &f, cover: &cover, schedule: Schedule::default() };
    let r = weinstock_test(&d, &current, &forms, 1e-6, &QuadratureSpec::default()).unwrap();
    assert_eq!(r.entries.len(), 6);
    for e in &r.entries {
        assert_eq!(e.method, LimitMethod::Richardson);
        assert!(e.value.norm() < 1e-6, "{}: {}", e.form, e.value);
    }
    assert!(r.pass);
}

#[test]
fn form_with_dbar_inside_is_rejected() {
    let d: Domain = presets::square();
    let cover = build_chart_cover(&d, &CoverOptions::default()).unwrap();
    let f = Function::parse("1/z", 1).unwrap();
    let form = TestForm::parse(1, &["x"], Cutoff::None).unwrap();
    let current = Current::Function { f: &f, cover: &cover, schedule: Schedule::default() };
    let err = weinstock_test(&d, &current, &[form], 1e-6, &QuadratureSpec::default()).unwrap_err();
    assert!(matches!(err, Error::FormNotClosed { .. }), "{err:?}");
}

#[test]
fn bidisc_polynomial_against_closed_forms_and_control() {
    let d: Domain = presets::bidisc();
    let cover = build_chart_cover(&d, &CoverOptions::default()).unwrap();
    let spec = QuadratureSpec::default();
    assert!(spec.max_subdivisions <= 1_000_000);
    let cut = Cutoff::radial([C::new(0.0, 0.0); 2], 1.2, 2.0);
    let f = Function::parse("1 + z1*z2 + z2^3", 2).unwrap();
    let forms = vec![
        TestForm::parse(2, &["zbar1*z2", "0"], cut.clone()).unwrap(),
        TestForm::parse(2, &["0", "zbar2*z1^2"], cut.clone()).unwrap(),
    ];
    let current = Current::Function { f: &f, cover: &cover, schedule: Schedule::default() };
    let r = weinstock_test(&d, &current, &forms, 1e-4, &spec).unwrap();
    for e in &r.entries {
        assert!(e.value.norm() < 1e-4, "{}: {}", e.form, e.value);
    }
    assert!(r.pass);

    let one = Function::parse("1", 2).unwrap();
    let control = TestForm::parse(2, &["zbar2", "0"], cut).unwrap();
    let current = Current::Function { f: &one, cover: &cover, schedule: Schedule::default() };
    let err = weinstock_test(&d, &current, std::slice::from_ref(&control), 1e-4, &spec).unwrap_err();
    assert!(matches!(err, Error::FormNotClosed { .. }), "{err:?}");
    let (forced, _, _) = force_pairing(&d, &current, &control, &spec).unwrap();
    let volume = stokes_oracle(&d, &one, &control, &spec).unwrap().value;
    assert!(forced.norm() > 1.0);
    assert!((forced - volume).norm() < 1e-4 * volume.norm(), "{forced} vs {volume}");
    // constant density −4 over a volume of π²
    let pi2 = std::f64::consts::PI.powi(2);
    assert!((volume - C::new(-4.0 * pi2, 0.0)).norm() < 1e-6 * pi2);
}
