use std::path::Path;

use fountain_shift::config::RunConfig;
use fountain_shift::constants::STANDARD_GRAVITY;
use fountain_shift::dcp::{
    corner_clearance, dp_to_frequency, phase_imbalance_residual, simulate_dp, tilt_scan,
    worst_case_clearance, DcpConfig, FeedConfig, FeedMode, PhaseField, PhaseMap, Profile,
};
use fountain_shift::{Error, Fountain, Vec2};
use proptest::prelude::*;

fn cfg(samples: usize) -> DcpConfig {
    let mut c = RunConfig::default();
    c.samples = samples;
    c.dcp_config().unwrap()
}

fn toy(m: u32, amp: f64) -> PhaseField {
    PhaseField::toy(m, amp, &Fountain::default().geometry).unwrap()
}

fn within(a: f64, b: f64, ea: f64, eb: f64, k: f64) -> bool {
    (a - b).abs() <= k * ea.hypot(eb)
}

#[test]
fn zero_field_gives_exact_zero_for_every_order_and_feed() {
    let c = cfg(20_000);
    for m in 0..=2 {
        for mode in [FeedMode::BothBalanced, FeedMode::SinglePhi0, FeedMode::SinglePi] {
            let r = simulate_dp(&c, &toy(m, 0.0), &FeedConfig::new(mode), Vec2::new(2e-3, -1e-3)).unwrap();
            assert_eq!(r.delta_p, 0.0);
            assert_eq!(r.shift_rel, 0.0);
        }
    }
}

#[test]
fn zero_tilt_on_axis_gives_no_shift() {
    let c = cfg(50_000);
    for m in 1..=2 {
        let r = simulate_dp(&c, &toy(m, 1e-3), &FeedConfig::new(FeedMode::SinglePhi0), Vec2::ZERO).unwrap();
        assert!(r.delta_p.abs() <= 3.0 * r.stat_err.max(1e-30), "m {m}: {} +- {}", r.delta_p, r.stat_err);
    }
}

#[test]
fn quadrupole_shift_is_even_in_offset() {
    let c = cfg(100_000);
    let f = toy(2, 1e-3);
    for d in [0.5e-3, 1.1e-3] {
        let mut plus = c;
        plus.fountain.cloud.offset = Vec2::new(d, 0.0);
        let mut minus = c;
        minus.fountain.cloud.offset = Vec2::new(-d, 0.0);
        let p = simulate_dp(&plus, &f, &FeedConfig::default(), Vec2::ZERO).unwrap();
        let m = simulate_dp(&minus, &f, &FeedConfig::default(), Vec2::ZERO).unwrap();
        assert!(within(p.delta_p, m.delta_p, p.stat_err, m.stat_err, 3.0), "{p:?} {m:?}");
    }
}

#[test]
fn intrinsic_gradient_tracks_centroid_displacement() {
    let c = cfg(100_000);
    let f = toy(1, 1e-3).with_feed_driven(false);
    let feed = FeedConfig::default();
    let a = simulate_dp(&c, &f, &feed, Vec2::new(1e-3, 0.0)).unwrap();
    let b = simulate_dp(&c, &f, &feed, Vec2::new(2e-3, 0.0)).unwrap();
    let ra = a.delta_p / a.centroid_displacement.x;
    let rb = b.delta_p / b.centroid_displacement.x;
    assert!(
        within(ra, rb, a.stat_err / a.centroid_displacement.x, b.stat_err / b.centroid_displacement.x, 3.0),
        "{ra:e} {rb:e}"
    );
    let z = simulate_dp(&c, &f, &feed, Vec2::ZERO).unwrap();
    assert!(z.centroid_displacement.norm() < 1e-9);
    assert!(z.delta_p.abs() <= 3.0 * z.stat_err.max(1e-30));
}

#[test]
fn balanced_feeds_cancel_a_feed_driven_gradient() {
    let c = cfg(20_000);
    let r = simulate_dp(&c, &toy(1, 1e-3), &FeedConfig::new(FeedMode::BothBalanced), Vec2::new(2e-3, 0.0)).unwrap();
    assert_eq!(r.delta_p, 0.0);
}

#[test]
fn symmetric_field_ignores_detector_orientation() {
    let run = |axis: &str| {
        let mut rc = RunConfig::default();
        rc.samples = 100_000;
        for (k, v) in [("detection", "gaussian"), ("w_det_mm", "7"), ("detection_axis_deg", axis)] {
            rc.set(k, v).unwrap();
        }
        simulate_dp(&rc.dcp_config().unwrap(), &toy(0, 1e-3), &FeedConfig::default(), Vec2::ZERO).unwrap()
    };
    let (x, y) = (run("0"), run("90"));
    assert!(within(x.delta_p, y.delta_p, x.stat_err, y.stat_err, 3.0), "{x:?} {y:?}");
}

#[test]
fn tilt_scan_is_odd_and_rejects_large_steps() {
    let c = cfg(50_000);
    let scan = tilt_scan(&c, &toy(1, 1e-3), Vec2::new(1.0, 0.0), &[-1.5e-3, 1.5e-3, 12e-3]);
    let (lo, hi) = (scan[0].1.as_ref().unwrap(), scan[1].1.as_ref().unwrap());
    assert!((lo.shift_rel + hi.shift_rel).abs() <= 3.0 * lo.stat_err.hypot(hi.stat_err));
    assert!(hi.shift_rel.abs() > 5.0 * hi.stat_err);
    assert!(matches!(scan[2].1, Err(Error::InvalidArgument { .. })));
}

#[test]
fn tilt_scan_steps_about_the_configured_tilt() {
    let mut c = cfg(50_000);
    c.fountain.cloud.tilt = Vec2::new(0.7e-3, 0.0);
    let scan = tilt_scan(&c, &toy(1, 1e-3), Vec2::new(1.0, 0.0), &[-0.7e-3]);
    let d = scan[0].1.as_ref().unwrap();
    assert!(d.shift_rel.abs() <= 3.0 * d.stat_err.max(1e-30), "{d:?}");
}

#[test]
fn statistics_bound_and_empty_ensemble_errors() {
    let mut c = cfg(4096);
    c.max_stat_err = Some(1e-30);
    assert!(matches!(
        simulate_dp(&c, &toy(1, 1e-3), &FeedConfig::new(FeedMode::SinglePhi0), Vec2::new(1e-3, 0.0)),
        Err(Error::StatisticsNotReached { .. })
    ));
    let mut far = cfg(4096);
    far.fountain.cloud.offset = Vec2::new(0.2, 0.0);
    assert!(matches!(
        simulate_dp(&far, &toy(1, 1e-3), &FeedConfig::default(), Vec2::ZERO),
        Err(Error::NoAtoms)
    ));
}

#[test]
fn fringe_slope_conversion() {
    let nu = fountain_shift::PhysicalConstants::cesium().nu_clock;
    let fwhm = 1.0 / (2.0 * 0.52);
    let s = dp_to_frequency(18e-6, fwhm, nu).unwrap();
    assert!((s / 1.25e-15 - 1.0).abs() < 0.08, "{s:e}");
    assert_eq!(dp_to_frequency(0.0, fwhm, nu).unwrap(), 0.0);
    assert_eq!(dp_to_frequency(18e-6, 2.0 * fwhm, nu).unwrap(), 2.0 * s);
    assert!(dp_to_frequency(1e-6, 0.0, nu).is_err());
    assert!(dp_to_frequency(1e-6, -1.0, nu).is_err());
}

#[test]
fn imbalance_residual_examples() {
    assert_eq!(phase_imbalance_residual(1.25e-15, 10e-3, 0.0).unwrap(), 0.0);
    let one = phase_imbalance_residual(1.25e-15, 10e-3, 1.0 / 15.0).unwrap();
    let two = phase_imbalance_residual(1.25e-15, 20e-3, 1.0 / 15.0).unwrap();
    assert!((two - 2.0 * one).abs() < 1e-33);
    assert!(phase_imbalance_residual(1e-15, 0.2, 0.1).is_err());
    assert!(phase_imbalance_residual(1e-15, 0.01, 0.6).is_err());
}

/// Dense scan over launch-ring points and surviving transverse velocities.
fn brute_clearance(f: &Fountain, tilt: Vec2, offset: Vec2) -> f64 {
    let g = STANDARD_GRAVITY;
    let (geo, t) = (&f.geometry, &f.timing);
    let acc = tilt * g;
    let times: Vec<f64> = geo.corner_z.iter().flat_map(|&z| t.crossing_times(z, g)).collect();
    let pos = |r0: Vec2, v: Vec2, tt: f64| r0 + v * tt + acc * (0.5 * tt * tt);
    let mut worst: f64 = 0.0;
    let n_ring = 180;
    let n_v = 120;
    for i in 0..n_ring {
        let r0 = offset + Vec2::polar(f.cloud.w0, 2.0 * std::f64::consts::PI * i as f64 / n_ring as f64);
        // the t2L constraint is the tighter disk in velocity space
        let centre = (r0 + acc * (0.5 * t.t2l * t.t2l)) * (-1.0 / t.t2l);
        let radius = geo.a_sel / t.t2l;
        for a in 0..n_v {
            for b in 0..n_v {
                let v = centre
                    + Vec2::new(
                        radius * (2.0 * a as f64 / (n_v - 1) as f64 - 1.0),
                        radius * (2.0 * b as f64 / (n_v - 1) as f64 - 1.0),
                    );
                if pos(r0, v, t.t1l).norm() >= geo.a_sel || pos(r0, v, t.t2l).norm() >= geo.a_sel {
                    continue;
                }
                for &tc in &times {
                    worst = worst.max(pos(r0, v, tc).norm());
                }
            }
        }
    }
    geo.a_cutoff - worst
}

#[test]
fn clearance_agrees_with_brute_force_scan() {
    let f = Fountain::default();
    for (tilt, offset) in [
        (Vec2::ZERO, Vec2::ZERO),
        (Vec2::new(0.33e-3, 0.0), Vec2::new(1.1e-3, 0.0)),
        (Vec2::new(-0.33e-3, 0.0), Vec2::new(1.1e-3, 0.0)),
        (Vec2::new(0.0, 0.5e-3), Vec2::new(0.4e-3, -0.8e-3)),
    ] {
        let prod = corner_clearance(&f, tilt, offset);
        let brute = brute_clearance(&f, tilt, offset);
        // the grid can only miss the extreme atom, never invent one
        assert!(brute >= prod - 1e-9, "{tilt:?} {offset:?}: {brute} < {prod}");
        assert!(brute - prod < 20e-6, "{tilt:?} {offset:?}: {brute} vs {prod}");
    }
}

#[test]
fn clearance_bound_and_monotone_in_offset() {
    let f = Fountain::default();
    let base = worst_case_clearance(&f, 0.33e-3, 1.1e-3);
    assert!(base >= 100e-6, "{base}");
    let mut prev = worst_case_clearance(&f, 0.33e-3, 0.3e-3);
    for d in [0.6e-3, 1.2e-3, 2.4e-3] {
        let c = worst_case_clearance(&f, 0.33e-3, d);
        assert!(c < prev, "offset {d}: {c} !< {prev}");
        prev = c;
    }
}

#[test]
fn malformed_phase_map_reports_line() {
    let text = "m = 1\nnr = 2\nnz = 2\nr_mm = 0, 5\nz_mm = -10, 10\n0, 0\n1e-3, oops\n";
    match PhaseMap::parse(text, Path::new("map.txt")) {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 7),
        other => panic!("{other:?}"),
    }
}

#[test]
fn phase_map_text_round_trip() {
    let profile = Profile::Analytic {
        radial_power: 2,
        z_coeffs: vec![0.3, -0.1, 0.05],
        r_ref: 5e-3,
        z_ref: 10e-3,
    };
    let map = PhaseMap::sample(2, &profile, 9, 7, (0.0, 6e-3), (-12e-3, 12e-3));
    let back = PhaseMap::parse(&map.to_text(), Path::new("round.txt")).unwrap();
    assert_eq!(back.values, map.values);
    assert_eq!((back.nr, back.nz, back.m), (9, 7, 2));
}

proptest! {
    #[test]
    fn toy_fields_vanish_on_axis_as_r_to_the_m(m in 1u32..=2, r in 1e-5f64..2e-4, az in 0.0f64..6.283, orient in 0.0f64..3.14) {
        let f = toy(m, 1e-3).with_orientation(orient);
        let p1 = f.phase(Vec2::polar(r, az), 0.0);
        let p2 = f.phase(Vec2::polar(2.0 * r, az), 0.0);
        prop_assume!(p1.abs() > 1e-15);
        let ratio = p2 / p1;
        prop_assert!((ratio / 2f64.powi(m as i32) - 1.0).abs() < 1e-6, "ratio {}", ratio);
    }

    #[test]
    fn phase_follows_cos_m_phi(m in 0u32..=2, r in 1e-4f64..4e-3, az in 0.0f64..6.283, orient in -3.14f64..3.14) {
        let f = toy(m, 1e-3).with_orientation(orient);
        let aligned = f.phase(Vec2::polar(r, orient), 0.0);
        let p = f.phase(Vec2::polar(r, az), 0.0);
        let expect = aligned * (m as f64 * (az - orient)).cos();
        prop_assert!((p - expect).abs() <= 1e-12 * aligned.abs().max(1e-20));
    }
}
