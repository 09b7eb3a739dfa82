use fountain_shift::analysis::{
    calibrate_amplitude, collisional_extrapolation, fit_linear_zero_crossing, fit_parabola_vertex,
    CalibrationOptions, Curvature, DensityPair, FitOptions, WeightedPoint,
};
use fountain_shift::Error;
use proptest::prelude::*;

fn line(xs: &[f64], x0: f64, slope: f64, wiggle: &[f64]) -> Vec<WeightedPoint> {
    xs.iter()
        .zip(wiggle.iter().cycle())
        .map(|(&x, &w)| WeightedPoint::new(x, slope * (x - x0) + w, 0.1 + w.abs()))
        .collect()
}

proptest! {
    #[test]
    fn zero_crossing_is_translation_equivariant(
        x0 in -2.0f64..2.0, slope in 0.5f64..3.0, c in -5.0f64..5.0,
        wiggle in prop::collection::vec(-0.05f64..0.05, 7),
    ) {
        let xs: Vec<f64> = (0..7).map(|i| i as f64 - 3.0).collect();
        let pts = line(&xs, x0, slope, &wiggle);
        let shifted: Vec<WeightedPoint> = pts.iter().map(|p| WeightedPoint::new(p.x + c, p.y, p.sigma)).collect();
        let a = fit_linear_zero_crossing(&pts, FitOptions::default()).unwrap();
        let b = fit_linear_zero_crossing(&shifted, FitOptions::default()).unwrap();
        prop_assert!((b.root - a.root - c).abs() < 1e-10);
        prop_assert!((b.root_sigma - a.root_sigma).abs() < 1e-10 * a.root_sigma.max(1e-12));
    }

    #[test]
    fn zero_crossing_is_invariant_under_y_scaling(
        x0 in -2.0f64..2.0, slope in 0.5f64..3.0, s in 0.01f64..100.0,
        wiggle in prop::collection::vec(-0.05f64..0.05, 7),
    ) {
        let xs: Vec<f64> = (0..7).map(|i| i as f64 - 3.0).collect();
        let pts = line(&xs, x0, slope, &wiggle);
        let scaled: Vec<WeightedPoint> = pts.iter().map(|p| WeightedPoint::new(p.x, s * p.y, s * p.sigma)).collect();
        let a = fit_linear_zero_crossing(&pts, FitOptions::default()).unwrap();
        let b = fit_linear_zero_crossing(&scaled, FitOptions::default()).unwrap();
        prop_assert!((b.root - a.root).abs() < 1e-10);
        for (ra, rb) in a.residuals.iter().zip(&b.residuals) {
            prop_assert!((rb - s * ra).abs() <= 1e-9 * (s * ra.abs()).max(1e-12));
        }
    }

    #[test]
    fn noise_free_data_fit_exactly(x0 in -2.0f64..2.0, slope in -3.0f64..-0.5, curv in 0.2f64..2.0, y0 in -1.0f64..1.0) {
        let xs: Vec<f64> = (0..9).map(|i| 0.5 * i as f64 - 2.0).collect();
        let lin: Vec<WeightedPoint> = xs.iter().map(|&x| WeightedPoint::new(x, slope * (x - x0), 0.1)).collect();
        let f = fit_linear_zero_crossing(&lin, FitOptions::default()).unwrap();
        prop_assert!(f.chi2 < 1e-18);
        prop_assert!((f.root - x0).abs() < 1e-9);
        let par: Vec<WeightedPoint> = xs.iter().map(|&x| WeightedPoint::new(x, y0 + curv * (x - x0).powi(2), 0.1)).collect();
        let p = fit_parabola_vertex(&par, Curvature::Minimum, FitOptions::default()).unwrap();
        prop_assert!(p.chi2 < 1e-18);
        prop_assert!((p.root - x0).abs() < 1e-8);
    }

    #[test]
    fn collisional_correction_moves_with_a_common_offset(
        dnu in -5e-15f64..5e-15, kappa in 1.5f64..20.0, rel in 0.0f64..0.3, off in -1e-14f64..1e-14,
    ) {
        let p = DensityPair { nu_high: dnu, nu_low: 0.0, kappa, kappa_rel_unc: rel };
        let q = DensityPair { nu_high: dnu + off, nu_low: off, ..p };
        let a = collisional_extrapolation(&p).unwrap();
        let b = collisional_extrapolation(&q).unwrap();
        prop_assert!((b.corrected - a.corrected - off).abs() < 1e-28);
        prop_assert!((b.type_b - a.type_b).abs() <= 1e-12 * a.type_b.max(1e-40));
    }

    #[test]
    fn calibration_ignores_contrast_units(scale in 0.4f64..1.5, k in 0.01f64..50.0) {
        let scan: Vec<(f64, f64)> = (1..=1200)
            .map(|i| {
                let d = i as f64 * 0.01;
                (d, (std::f64::consts::FRAC_PI_2 * scale * d).sin().abs())
            })
            .collect();
        let opts = CalibrationOptions::default();
        let a = calibrate_amplitude(&scan, None, &opts).unwrap();
        let scaled: Vec<(f64, f64)> = scan.iter().map(|&(d, c)| (d, k * c)).collect();
        let b = calibrate_amplitude(&scaled, None, &opts).unwrap();
        prop_assert_eq!(a.scale, b.scale);
        prop_assert!((a.scale / scale - 1.0).abs() < 0.01);
    }
}

#[test]
fn degenerate_fits_are_reported() {
    let flat: Vec<WeightedPoint> = (0..5).map(|i| WeightedPoint::new(i as f64, 1.0, 0.1)).collect();
    assert!(matches!(
        fit_linear_zero_crossing(&flat, FitOptions::default()),
        Err(Error::SlopeDegenerate { .. })
    ));
    let straight: Vec<WeightedPoint> = (0..5).map(|i| WeightedPoint::new(i as f64, i as f64, 0.1)).collect();
    assert!(matches!(
        fit_parabola_vertex(&straight, Curvature::Either, FitOptions::default()),
        Err(Error::VertexUndetermined { .. })
    ));
}

#[test]
fn inflation_scales_errors_by_reduced_chi2() {
    let pts: Vec<WeightedPoint> = [(-2.0, -4.3), (-1.0, -1.7), (0.0, 0.4), (1.0, 1.8), (2.0, 4.2)]
        .iter()
        .map(|&(x, y)| WeightedPoint::new(x, y, 0.05))
        .collect();
    let plain = fit_linear_zero_crossing(&pts, FitOptions::default()).unwrap();
    let infl = fit_linear_zero_crossing(&pts, FitOptions { inflate_chi2: true }).unwrap();
    let factor = plain.chi2_per_dof().sqrt();
    assert!(factor > 1.0);
    assert!((infl.root_sigma / plain.root_sigma - factor).abs() < 1e-9);
    assert_eq!(infl.root, plain.root);
}

#[test]
fn calibration_with_model_positions() {
    // maxima placed at b = 0.93, 2.9, 4.9 for a drive scale of 0.5
    let expected = [0.93, 2.9, 4.9];
    let scan: Vec<(f64, f64)> = (1..=1200)
        .map(|i| {
            let d = i as f64 * 0.01;
            let b = 0.5 * d;
            let c = expected.iter().map(|e| (-(b - e).powi(2) / 0.3).exp()).sum::<f64>();
            (d, c)
        })
        .collect();
    let cal = calibrate_amplitude(&scan, Some(&expected), &CalibrationOptions::default()).unwrap();
    assert!((cal.scale - 0.5).abs() < 2e-3, "{}", cal.scale);
    assert_eq!(cal.maxima.len(), 3);
}
