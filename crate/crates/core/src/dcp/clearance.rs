//! Closest approach to the cutoff-waveguide / endcap corners.
//!
//! Atoms start on the 1/e ring of the (offset) launch envelope. An atom launched at `r0`
//! with transverse velocity `v` is at `r0 + v t + g ψ t²/2`; only velocities that clear the
//! selection aperture on both passages (`t1L`, `t2L`) survive. Both constraints are disks in
//! velocity space, and the radial excursion at a fixed time is the distance from a point,
//! so the worst surviving atom sits at a vertex of the disk intersection.

use crate::constants::STANDARD_GRAVITY;
use crate::fountain::Fountain;
use crate::vec2::Vec2;

const RING_SAMPLES: usize = 720;

/// Distance from the corner ring (radius `a_cutoff`) of the surviving atom that comes
/// closest to it. `f64::INFINITY` if no atom from the envelope clears the selection aperture.
pub fn corner_clearance(fountain: &Fountain, tilt: Vec2, offset: Vec2) -> f64 {
    let excursion = max_corner_excursion(fountain, tilt, offset);
    match excursion {
        Some(r) => fountain.geometry.a_cutoff - r,
        None => f64::INFINITY,
    }
}

/// Clearance minimised over the relative orientation of offset and tilt (offset along x,
/// tilt direction scanned in 5° steps).
pub fn worst_case_clearance(fountain: &Fountain, tilt: f64, offset: f64) -> f64 {
    (0..72)
        .map(|i| {
            let beta = i as f64 * std::f64::consts::PI / 36.0;
            corner_clearance(fountain, Vec2::polar(tilt, beta), Vec2::new(offset, 0.0))
        })
        .fold(f64::INFINITY, f64::min)
}

/// Largest radius at which a surviving envelope atom crosses either corner plane.
pub fn max_corner_excursion(fountain: &Fountain, tilt: Vec2, offset: Vec2) -> Option<f64> {
    let g = STANDARD_GRAVITY;
    let geo = &fountain.geometry;
    let timing = &fountain.timing;
    let acc = tilt * g;
    let times: Vec<f64> = geo
        .corner_z
        .iter()
        .flat_map(|&z| timing.crossing_times(z, g))
        .filter(|&t| t > 0.0)
        .collect();
    let w0 = fountain.cloud.w0;

    let at = |theta: f64| -> Option<f64> {
        let r0 = offset + Vec2::polar(w0, theta);
        times
            .iter()
            .filter_map(|&tc| excursion_from(r0, acc, tc, timing.t1l, timing.t2l, geo.a_sel))
            .reduce(f64::max)
    };

    let step = 2.0 * std::f64::consts::PI / RING_SAMPLES as f64;
    let samples: Vec<Option<f64>> = (0..RING_SAMPLES).map(|i| at(i as f64 * step)).collect();
    let (best_i, best) = samples
        .iter()
        .enumerate()
        .filter_map(|(i, v)| v.map(|v| (i, v)))
        .max_by(|a, b| a.1.total_cmp(&b.1))?;
    if w0 == 0.0 {
        return Some(best);
    }

    // golden-section polish around the best ring sample
    let f = |th: f64| at(th).unwrap_or(f64::NEG_INFINITY);
    let (mut lo, mut hi) = ((best_i as f64 - 1.0) * step, (best_i as f64 + 1.0) * step);
    let gr = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - gr * (hi - lo);
    let mut x2 = lo + gr * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..60 {
        if f1 > f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = f(x2);
        }
    }
    Some(best.max(f1).max(f2))
}

/// Max over admissible velocities of `|r0 + v tc + acc tc²/2|`.
fn excursion_from(r0: Vec2, acc: Vec2, tc: f64, t1l: f64, t2l: f64, a_sel: f64) -> Option<f64> {
    let drift = |t: f64| r0 + acc * (0.5 * t * t);
    // |drift(t) + v t| < a_sel  <=>  v in disk(-drift(t)/t, a_sel/t)
    let ca = drift(t1l) * (-1.0 / t1l);
    let cb = drift(t2l) * (-1.0 / t2l);
    let p = drift(tc) * (-1.0 / tc);
    farthest_in_lens(p, ca, a_sel / t1l, cb, a_sel / t2l).map(|d| d * tc)
}

/// Largest distance from `p` to a point of the intersection of two closed disks.
fn farthest_in_lens(p: Vec2, ca: Vec2, ra: f64, cb: Vec2, rb: f64) -> Option<f64> {
    let eps = 1e-12 * (ra + rb);
    let inside = |q: Vec2, c: Vec2, r: f64| (q - c).norm() <= r + eps;
    let far_point = |c: Vec2, r: f64| {
        let d = c - p;
        let dir = if d.norm() > 0.0 { d.unit() } else { Vec2::new(1.0, 0.0) };
        c + dir * r
    };
    let mut best: Option<f64> = None;
    let mut consider = |q: Vec2| {
        let d = (q - p).norm();
        best = Some(best.map_or(d, |b: f64| b.max(d)));
    };
    let fa = far_point(ca, ra);
    if inside(fa, cb, rb) {
        consider(fa);
    }
    let fb = far_point(cb, rb);
    if inside(fb, ca, ra) {
        consider(fb);
    }
    let d = (cb - ca).norm();
    if d > 0.0 && d <= ra + rb && d >= (ra - rb).abs() {
        let x = (d * d + ra * ra - rb * rb) / (2.0 * d);
        let h = (ra * ra - x * x).max(0.0).sqrt();
        let e = (cb - ca) * (1.0 / d);
        let n = Vec2::new(-e.y, e.x);
        consider(ca + e * x + n * h);
        consider(ca + e * x - n * h);
    }
    best
}
