//! Independent oracles shared by the integration tests.

#![allow(dead_code)]

use std::f64::consts::{FRAC_PI_2, PI};

use fountain_shift::{Fountain, Vec2};

// Power series are ample for k r < 2.
pub fn j0s(x: f64) -> f64 {
    let (mut term, mut sum) = (1.0, 1.0);
    for m in 1..30 {
        term *= -0.25 * x * x / (m as f64 * m as f64);
        sum += term;
    }
    sum
}

pub fn j1s(x: f64) -> f64 {
    let (mut term, mut sum) = (0.5 * x, 0.5 * x);
    for m in 1..30 {
        term *= -0.25 * x * x / (m as f64 * (m + 1) as f64);
        sum += term;
    }
    sum
}

/// Brute-force δP from the two dressed-state integrals: each state is given its full kick
/// `±δv(r1)`, the landing point in the lower aperture is the integration variable (so the
/// aperture is a fixed disk), and the difference of the two states is a central difference
/// in the recoil frequency. Midpoint sums in polar coordinates on `n × n` grids for both
/// `r1` and `r2L`. Radial Gaussian or uniform detection.
pub fn riemann_delta_p(f: &Fountain, w_det: Option<f64>, n: usize) -> f64 {
    let a = f.geometry.a;
    let t = f.timing;
    let (tau, dt2, dtd) = (t.t2l - t.t1, t.t2 - t.t1, t.td - t.t1);
    let (k, nu_r) = (f.constants.k, f.constants.nu_r);
    let (b1, b2, eta) = (f.drive.b1, f.drive.b2, f.drive.eta);
    let (w0, u) = (f.cloud.w0, f.cloud.u);
    let disk: Vec<(Vec2, f64)> = (0..n)
        .flat_map(|i| {
            let r = (i as f64 + 0.5) * a / n as f64;
            (0..n).map(move |j| {
                let phi = (j as f64 + 0.5) * 2.0 * PI / n as f64;
                (Vec2::new(r * phi.cos(), r * phi.sin()), r * (a / n as f64) * (2.0 * PI / n as f64))
            })
        })
        .collect();
    let wd = |p: Vec2| w_det.map_or(1.0, |w| (-2.0 * p.norm2() / (w * w)).exp());
    let sin2 = |p: Vec2| (FRAC_PI_2 * b2 * eta * j0s(k * p.norm())).sin();
    let source = |r1: Vec2, v: Vec2| {
        let r0 = r1 - v * t.t1 - f.cloud.offset;
        (-v.norm2() / (u * u) - r0.norm2() / (w0 * w0)).exp()
    };
    let (mut diff, mut norm) = (0.0, 0.0);
    for &(r1, w1) in &disk {
        let r = r1.norm();
        let dv = r1 * (b1 * eta * PI * PI * nu_r / k * j1s(k * r) / r);
        for &(p, w2) in &disk {
            let mut states = [0.0; 2];
            for (slot, s) in [(0, -1.0), (1, 1.0)] {
                let kick = dv * s;
                let v = (p - r1) * (1.0 / tau) - kick;
                let vk = v + kick;
                states[slot] = source(r1, v) * sin2(r1 + vk * dt2) * wd(r1 + vk * dtd);
            }
            diff += w1 * w2 * (states[0] - states[1]);
            let v0 = (p - r1) * (1.0 / tau);
            norm += w1 * w2 * source(r1, v0) * wd(r1 + v0 * dtd);
        }
    }
    diff / (4.0 * norm)
}
