use bcurrent::asymptotics::{fit_models, DEFAULT_WINDOW};
use bcurrent::geometry::{build_chart_cover, presets, CoverOptions};
use bcurrent::pairing::{
    face_distribution_pairing, pairing_at_epsilon, pairing_sequence, Cutoff, FaceDistribution, Schedule, TestForm,
};
use bcurrent::quadrature::QuadratureSpec;
use bcurrent::{Domain, Function, C};

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

#[test]
fn pairing_approaches_face_restriction_at_first_order() {
    let d: Domain = presets::square();
    let cover = build_chart_cover(&d, &CoverOptions::default()).unwrap();
    let spec = QuadratureSpec::default();
    let form = TestForm::parse(1, &["x"], Cutoff::radial([C::new(0.0, 0.0); 2], 1.0, 1.5)).unwrap();
    let eps: Vec<f64> = (0..6).map(|k| 0.1 * 0.5f64.powi(k)).collect();
    for src in ["1", "z", "z^2"] {
        let f = Function::parse(src, 1).unwrap();
        let faces = FaceDistribution::restrictions(&d, &f);
        let target = face_distribution_pairing(&d, &faces, &form, &spec).unwrap().value;
        let errs: Vec<f64> = eps
            .iter()
            .map(|&e| (pairing_at_epsilon(&d, &f, &form, &cover, e, &spec).unwrap().value - target).norm())
            .collect();
        if src == "1" {
            // constant f does not feel the translation at all
            assert!(errs.iter().all(|e| *e < 1e-10), "{errs:?}");
            continue;
        }
        let k =
            slope(&eps.iter().map(|e| e.ln()).collect::<Vec<_>>(), &errs.iter().map(|e| e.ln()).collect::<Vec<_>>());
        assert!(k >= 0.9, "{src}: order {k}, errors {errs:?}");
        assert!(errs.windows(2).all(|w| w[1] < w[0]), "{src}: {errs:?}");
    }
}

#[test]
fn face_value_matches_sequence_limit_without_cutoff() {
    let d: Domain = presets::square();
    let cover = build_chart_cover(&d, &CoverOptions::default()).unwrap();
    let spec = QuadratureSpec::default();
    let form = TestForm::parse(1, &["x"], Cutoff::None).unwrap();
    let f = Function::parse("z", 1).unwrap();
    let faces = FaceDistribution::restrictions(&d, &f);
    let direct = face_distribution_pairing(&d, &faces, &form, &spec).unwrap().value;
    // ∮ z x dz around (0,2)² by hand: −4 + 4i
    assert!((direct - C::new(-4.0, 4.0)).norm() < 1e-10, "{direct}");
    let s = pairing_sequence(&d, &f, &form, &cover, &Schedule { steps: 8, ..Default::default() }, &spec).unwrap();
    let limit = fit_models(&s, DEFAULT_WINDOW).unwrap().limit.unwrap();
    assert!((limit - direct).norm() < 1e-6, "{limit} vs {direct}");
}
