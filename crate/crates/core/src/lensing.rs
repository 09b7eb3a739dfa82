//! Microwave lensing frequency shift.
//!
//! The dipole force of the standing wave during the upward cavity passage kicks the two
//! dressed states by `±δv(r1)`. To first order in the recoil frequency the resulting change
//! of transition probability splits into a line integral around the lower aperture (atoms
//! pushed across its rim) and a surface integral over it (the kick moves atoms across the
//! tipping-angle and detection profiles). Both are integrated over the position `r1` at the
//! first passage, with the undeflected landing point `r2L0` in the lower aperture as the
//! second variable:
//!
//! ```text
//! δP = a τ/(2N) ∫ |δv(r1)| ∮ P sinθ(r2) cos φ dφ dr1  +  ν_R/(2N) ∫∫ ∂_νR[P sinθ(r2)] dr2L0 dr1
//! P  = W_T(v) W_r0(r0) W_d(r_d) Θ(a_sel - r1L),   v = (r2L0 - r1)/τ,   τ = t2L - t1
//! ```
//!
//! The ν_R derivative follows the inward-kicked (focused) state. The shift is
//! `δν/ν = δP / (π T ΔP_R ν)` with `ΔP_R` the detected-ensemble average of
//! `sinθ(r1) sinθ(r2)`.

use std::f64::consts::{FRAC_PI_2, PI};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fountain::Fountain;
use crate::quadrature::{gauss_legendre, periodic_trapezoid, Rule};
use crate::special::{j0, j1};
use crate::vec2::Vec2;

/// Below this the Ramsey fringe is considered gone.
pub const MIN_FRINGE_AMPLITUDE: f64 = 1e-6;

/// Gaussian weights are integrated out to this many 1/e radii.
const GAUSS_CUTOFF: f64 = 6.0;

const FIRST_LEVEL: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExpansionOrder {
    /// Bessel functions expanded to second order in k: J0 -> 1 - x²/4, J1 -> x/2.
    K2Truncated,
    AllOrders,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum R1Domain {
    /// The first-passage position ranges over the whole cloud.
    Unbounded,
    /// Restricted to the Ramsey cavity aperture, `r1 < a`.
    ClippedToAperture,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LensingConfig {
    pub fountain: Fountain,
    pub order: ExpansionOrder,
    pub r1_domain: R1Domain,
    /// Include the `Θ(a_sel - r1L)` factor for the lower aperture on the way up.
    pub include_lower_aperture: bool,
    /// Relative change between successive grid doublings at which the quadrature stops.
    pub tolerance: f64,
    /// Largest radial/azimuthal node count tried before giving up.
    pub max_nodes: usize,
}

impl LensingConfig {
    pub fn new(fountain: Fountain) -> Self {
        Self {
            fountain,
            order: ExpansionOrder::AllOrders,
            r1_domain: R1Domain::ClippedToAperture,
            include_lower_aperture: false,
            tolerance: 1e-3,
            max_nodes: 256,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.fountain.validate()?;
        if !(self.tolerance > 0.0) {
            return Err(Error::invalid("tolerance", "must be positive"));
        }
        if self.max_nodes < FIRST_LEVEL {
            return Err(Error::invalid("max_nodes", format!("must be at least {FIRST_LEVEL}")));
        }
        Ok(())
    }
}

impl Default for LensingConfig {
    fn default() -> Self {
        Self::new(Fountain::npl_csf2())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LensingResult {
    /// Line-integral (aperture rim) contribution to δP.
    pub delta_p_term1: f64,
    /// Surface-integral contribution to δP.
    pub delta_p_term2: f64,
    /// Detected-atom normalisation (m⁴ measure over r1 and r2L0).
    pub n: f64,
    /// Ramsey fringe amplitude ΔP_R.
    pub fringe_amplitude: f64,
    /// δν/ν.
    pub shift_rel: f64,
    /// Estimated relative quadrature error.
    pub quadrature_error: f64,
    /// Radial node count of the accepted grid.
    pub nodes: usize,
}

impl LensingResult {
    pub fn delta_p(&self) -> f64 {
        self.delta_p_term1 + self.delta_p_term2
    }

    fn to_shift(&self, delta_p: f64) -> f64 {
        self.shift_rel * delta_p / self.delta_p()
    }

    /// First-term share of `shift_rel`.
    pub fn shift_term1(&self) -> f64 {
        if self.delta_p() == 0.0 {
            0.0
        } else {
            self.to_shift(self.delta_p_term1)
        }
    }

    pub fn shift_term2(&self) -> f64 {
        if self.delta_p() == 0.0 {
            0.0
        } else {
            self.to_shift(self.delta_p_term2)
        }
    }
}

/// Closed-form shift for a small cloud, uniform detection and terms to second order in k.
pub fn analytic_shift(cfg: &LensingConfig) -> Result<f64> {
    cfg.validate()?;
    let f = &cfg.fountain;
    let (c, t, cl) = (&f.constants, &f.timing, &f.cloud);
    let a = f.geometry.a;
    let x = f.drive.b1 * f.drive.eta * FRAC_PI_2;
    let s = x.sin();
    // distance to the nearest multiple of pi, relative to the sine
    if s.abs() < 1e-6 {
        return Err(Error::DegenerateAmplitude { sine: s });
    }
    let pulse = if x == 0.0 { 1.0 } else { x / s };
    let w2l2 = cl.w0 * cl.w0 + cl.u * cl.u * t.t2l * t.t2l;
    let num = a * a * (cl.w0 * cl.w0 + t.t1 * t.t2l * cl.u * cl.u) * (t.t2l - t.t1);
    let den = w2l2 * w2l2 * (a * a / w2l2).exp_m1() * (t.t2 - t.t1);
    Ok(c.recoil_fraction() * pulse * num / den)
}

/// Velocity change of the outward-kicked dressed state during the upward passage,
/// `-b1 η π² (ν_R/k²) ∇J0(k r1)`: radial, magnitude `b1 η π² (ν_R/k) J1(k r1)`.
pub fn velocity_kick(r1: Vec2, fountain: &Fountain) -> Vec2 {
    let c = &fountain.constants;
    let d = &fountain.drive;
    let r = r1.norm();
    if r == 0.0 {
        return Vec2::ZERO;
    }
    r1 * (d.b1 * d.eta * PI * PI * c.nu_r / c.k * j1(c.k * r) / r)
}

pub use crate::fountain::tipping_angle;

/// Evaluates both terms, the normalisation and the fringe amplitude, doubling the grid until
/// successive results agree to `cfg.tolerance`.
pub fn full_shift(cfg: &LensingConfig) -> Result<LensingResult> {
    cfg.validate()?;
    let model = Model::new(cfg);
    let mut n = FIRST_LEVEL;
    let mut prev = model.evaluate(n, true);
    let mut best = prev;
    let mut err = f64::INFINITY;
    while n * 2 <= cfg.max_nodes {
        n *= 2;
        let cur = model.evaluate(n, true);
        err = cur.relative_change(&prev);
        best = cur;
        if err <= cfg.tolerance {
            break;
        }
        prev = cur;
    }
    let result = model.finish(&best, err, n)?;
    if err > cfg.tolerance {
        return Err(Error::AccuracyNotReached {
            tolerance: cfg.tolerance,
            estimate: err,
            best: Box::new(result),
        });
    }
    Ok(result)
}

/// Ramsey fringe amplitude ΔP_R for `b1 = b2 = b`, at a fixed grid.
pub fn fringe_amplitude(cfg: &LensingConfig, b: f64, nodes: usize) -> Result<f64> {
    let mut cfg = *cfg;
    cfg.fountain.drive.b1 = b;
    cfg.fountain.drive.b2 = b;
    cfg.validate()?;
    let s = Model::new(&cfg).evaluate(nodes.max(2), false);
    Ok(s.ramsey / s.n)
}

/// Amplitudes `b` near the odd pulse-area multiples `order × π/2` where the cloud-averaged
/// fringe amplitude peaks. For a small centred cloud these sit somewhat below 1, 3, 5, ...
pub fn contrast_maxima(cfg: &LensingConfig, orders: &[u32]) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(orders.len());
    for &n in orders {
        if n % 2 == 0 {
            return Err(Error::invalid("orders", format!("{n} is not an odd multiple")));
        }
        let nf = n as f64;
        let f = |b: f64| fringe_amplitude(cfg, b, 32).map(|v| -v.abs());
        let (mut lo, mut hi) = (nf - 0.45, nf + 0.3);
        let g = 0.5 * (5f64.sqrt() - 1.0);
        let mut x1 = hi - g * (hi - lo);
        let mut x2 = lo + g * (hi - lo);
        let (mut f1, mut f2) = (f(x1)?, f(x2)?);
        while hi - lo > 1e-7 {
            if f1 < f2 {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - g * (hi - lo);
                f1 = f(x1)?;
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + g * (hi - lo);
                f2 = f(x2)?;
            }
        }
        out.push(0.5 * (lo + hi));
    }
    Ok(out)
}

/// Full shift at each second-pulse amplitude. Failing points carry their error; the scan
/// itself does not abort.
pub fn amplitude_scan(cfg: &LensingConfig, b2_values: &[f64]) -> Vec<(f64, Result<LensingResult>)> {
    b2_values
        .iter()
        .map(|&b2| {
            let mut c = *cfg;
            c.fountain.drive.b2 = b2;
            (b2, full_shift(&c))
        })
        .collect()
}

/// δP at each first-pulse amplitude with b2 held fixed; δP is linear in b1.
pub fn b1_response(cfg: &LensingConfig, b1_values: &[f64]) -> Result<Vec<(f64, f64)>> {
    b1_values
        .iter()
        .map(|&b1| {
            let mut c = *cfg;
            c.fountain.drive.b1 = b1;
            full_shift(&c).map(|r| (b1, r.delta_p()))
        })
        .collect()
}

/// Grid sums for one quadrature level.
#[derive(Debug, Clone, Copy, Default)]
struct Sums {
    n: f64,
    ramsey: f64,
    /// Σ w P ∂(W_d sinθ2)/∂ν_R per unit ν_R (to be scaled by ν_R / 2N).
    surface: f64,
    /// Σ w |δv| ∮ P sinθ2 cos φ (to be scaled by a τ / 2N).
    rim: f64,
}

impl Sums {
    fn add(mut self, o: Sums) -> Sums {
        self.n += o.n;
        self.ramsey += o.ramsey;
        self.surface += o.surface;
        self.rim += o.rim;
        self
    }

    fn relative_change(&self, prev: &Sums) -> f64 {
        let rel = |a: f64, b: f64, scale: f64| {
            if scale == 0.0 {
                if a == b {
                    0.0
                } else {
                    f64::INFINITY
                }
            } else {
                (a - b).abs() / scale
            }
        };
        let (t1, t2) = (self.rim / self.n, self.surface / self.n);
        let (p1, p2) = (prev.rim / prev.n, prev.surface / prev.n);
        let scale = t1.abs() + t2.abs();
        let fr = self.ramsey / self.n;
        let pfr = prev.ramsey / prev.n;
        rel(t1, p1, scale)
            .max(rel(t2, p2, scale))
            .max(rel(fr, pfr, fr.abs()))
    }
}

struct Model<'a> {
    cfg: &'a LensingConfig,
    tau: f64,
    radial: bool,
    r1_max: f64,
    /// |δv| per unit ν_R at radius r is `kick_scale * J1(k r)`.
    kick_scale: f64,
}

impl<'a> Model<'a> {
    fn new(cfg: &'a LensingConfig) -> Self {
        let f = &cfg.fountain;
        let t = &f.timing;
        let radial = f.cloud.offset == Vec2::ZERO && f.detection.is_radial();
        let r1_max = match cfg.r1_domain {
            R1Domain::ClippedToAperture => f.geometry.a,
            R1Domain::Unbounded => f
                .geometry
                .a
                .max(f.cloud.offset.norm() + GAUSS_CUTOFF * f.cloud.radius_at(t.t1)),
        };
        Self {
            cfg,
            tau: t.t2l - t.t1,
            radial,
            r1_max,
            kick_scale: f.drive.b1 * f.drive.eta * PI * PI / f.constants.k,
        }
    }

    fn bessel0(&self, x: f64) -> f64 {
        match self.cfg.order {
            ExpansionOrder::AllOrders => j0(x),
            ExpansionOrder::K2Truncated => 1.0 - 0.25 * x * x,
        }
    }

    fn bessel1(&self, x: f64) -> f64 {
        match self.cfg.order {
            ExpansionOrder::AllOrders => j1(x),
            ExpansionOrder::K2Truncated => 0.5 * x,
        }
    }

    fn theta(&self, r: f64, b: f64) -> f64 {
        let d = &self.cfg.fountain.drive;
        FRAC_PI_2 * b * d.eta * self.bessel0(self.cfg.fountain.constants.k * r)
    }

    fn dtheta_dr(&self, r: f64, b: f64) -> f64 {
        let d = &self.cfg.fountain.drive;
        let k = self.cfg.fountain.constants.k;
        -FRAC_PI_2 * b * d.eta * k * self.bessel1(k * r)
    }

    /// Source weight without the detection factor: `W_T(v) W_r0(r0) Θ(a_sel - r1L)`.
    fn source(&self, r1: Vec2, v: Vec2) -> f64 {
        let f = &self.cfg.fountain;
        let t = &f.timing;
        if self.cfg.include_lower_aperture {
            let r1l = r1 - v * (t.t1 - t.t1l);
            if r1l.norm2() >= f.geometry.a_sel * f.geometry.a_sel {
                return 0.0;
            }
        }
        let r0 = r1 - v * t.t1 - f.cloud.offset;
        let u2 = f.cloud.u * f.cloud.u;
        let w02 = f.cloud.w0 * f.cloud.w0;
        (-v.norm2() / u2 - r0.norm2() / w02).exp()
    }

    fn r1_nodes(&self, n: usize) -> Vec<(Vec2, f64)> {
        let radial = gauss_legendre(n, 0.0, self.r1_max);
        let az: Rule = if self.radial {
            Rule {
                nodes: vec![0.0],
                weights: vec![2.0 * PI],
            }
        } else {
            periodic_trapezoid(n)
        };
        let mut out = Vec::with_capacity(radial.len() * az.len());
        for (r, wr) in radial.iter() {
            for (phi, wp) in az.iter() {
                out.push((Vec2::polar(r, phi), wr * r * wp));
            }
        }
        out
    }

    fn evaluate(&self, n: usize, with_shift: bool) -> Sums {
        let f = &self.cfg.fountain;
        let t = f.timing;
        let d = f.drive;
        let k = f.constants.k;
        let a = f.geometry.a;
        let det = f.detection;
        let (dt2, dtd) = (t.t2 - t.t1, t.td - t.t1);

        let rho = gauss_legendre(n, 0.0, a);
        let psi = periodic_trapezoid(n);
        let dirs: Vec<(Vec2, f64)> = psi.iter().map(|(p, w)| (Vec2::polar(1.0, p), w)).collect();
        let r2l0: Vec<(Vec2, f64)> = rho
            .iter()
            .flat_map(|(r, wr)| dirs.iter().map(move |&(e, wp)| (e * r, wr * r * wp)))
            .collect();
        let r1_nodes = self.r1_nodes(n);

        let partial: Vec<Sums> = r1_nodes
            .par_iter()
            .map(|&(r1, w1)| {
                let mut s = Sums::default();
                let r1n = r1.norm();
                let r1hat = r1.unit();
                let sin1 = self.theta(r1n, d.b1).sin();
                // inward kick direction per unit ν_R
                let kick = self.kick_scale * self.bessel1(k * r1n);
                let inward = r1hat * (-kick);
                for &(p, w2) in &r2l0 {
                    let v = (p - r1) * (1.0 / self.tau);
                    let src = self.source(r1, v);
                    if src == 0.0 {
                        continue;
                    }
                    let (wd, grad_wd) = det.weight_and_gradient(r1 + v * dtd);
                    let r2 = r1 + v * dt2;
                    let r2n = r2.norm();
                    let th2 = self.theta(r2n, d.b2);
                    let (s2, c2) = th2.sin_cos();
                    let wp = w2 * src;
                    s.n += wp * wd;
                    s.ramsey += wp * wd * sin1 * s2;
                    if with_shift {
                        let radial_step = if r2n > 0.0 { r2.dot(inward) / r2n } else { 0.0 };
                        let deriv = wd * c2 * self.dtheta_dr(r2n, d.b2) * radial_step * dt2
                            + s2 * grad_wd.dot(inward) * dtd;
                        s.surface += wp * deriv;
                    }
                }
                if with_shift && kick != 0.0 {
                    let mut ring = 0.0;
                    for &(e, wp) in &dirs {
                        let p = e * a;
                        let v = (p - r1) * (1.0 / self.tau);
                        let src = self.source(r1, v);
                        if src == 0.0 {
                            continue;
                        }
                        let wd = det.weight(r1 + v * dtd);
                        let s2 = self.theta((r1 + v * dt2).norm(), d.b2).sin();
                        ring += wp * src * wd * s2 * e.dot(r1hat);
                    }
                    s.rim += kick * ring;
                }
                s.n *= w1;
                s.ramsey *= w1;
                s.surface *= w1;
                s.rim *= w1;
                s
            })
            .collect();
        partial.into_iter().fold(Sums::default(), Sums::add)
    }

    fn finish(&self, s: &Sums, err: f64, nodes: usize) -> Result<LensingResult> {
        let f = &self.cfg.fountain;
        if !(s.n > 0.0) {
            return Err(Error::NoAtoms);
        }
        let nu_r = f.constants.nu_r;
        let a = f.geometry.a;
        let term1 = a * self.tau * nu_r * s.rim / (2.0 * s.n);
        let term2 = nu_r * s.surface / (2.0 * s.n);
        let fringe = s.ramsey / s.n;
        if fringe.abs() < MIN_FRINGE_AMPLITUDE {
            return Err(Error::DegenerateContrast { fringe });
        }
        let shift = (term1 + term2) / (PI * f.timing.ramsey_time() * fringe * f.constants.nu_clock);
        Ok(LensingResult {
            delta_p_term1: term1,
            delta_p_term2: term2,
            n: s.n,
            fringe_amplitude: fringe,
            shift_rel: shift,
            quadrature_error: if err.is_finite() { err } else { f64::MAX },
            nodes,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fountain::{BeamShape, DetectionProfile};

    fn npl() -> LensingConfig {
        LensingConfig::default()
    }

    #[test]
    fn analytic_reproduces_direct_substitution() {
        // Hand substitution of the rounded parameters: 6.559e-17
        let s = analytic_shift(&npl()).unwrap();
        assert!((s / 6.5592e-17 - 1.0).abs() < 2e-4, "{s:e}");
    }

    #[test]
    fn analytic_vanishes_for_huge_aperture() {
        let mut cfg = npl();
        let base = analytic_shift(&cfg).unwrap();
        let w = crate::fountain::w2l(&cfg.fountain.cloud, &cfg.fountain.timing);
        cfg.fountain.geometry.a = 10.0 * w;
        let big = analytic_shift(&cfg).unwrap();
        assert!(big.abs() < 1e-4 * base.abs(), "{big:e}");
    }

    #[test]
    fn analytic_rejects_degenerate_amplitude() {
        let mut cfg = npl();
        cfg.fountain.drive.b1 = 2.0 / cfg.fountain.drive.eta;
        assert!(matches!(analytic_shift(&cfg), Err(Error::DegenerateAmplitude { .. })));
    }

    #[test]
    fn kick_is_radial_and_linear_in_b1() {
        let f = Fountain::npl_csf2();
        assert_eq!(velocity_kick(Vec2::ZERO, &f), Vec2::ZERO);
        let r = Vec2::new(3e-3, 4e-3);
        let v = velocity_kick(r, &f);
        assert!((v.x * r.y - v.y * r.x).abs() < 1e-24);
        assert!(v.dot(r) > 0.0);
        let mut f2 = f;
        f2.drive.b1 *= 2.0;
        let v2 = velocity_kick(r, &f2);
        assert_eq!(v2, v * 2.0);
    }

    #[test]
    fn kick_magnitude_at_aperture_rim() {
        let f = Fountain::npl_csf2();
        let c = f.constants;
        let r = Vec2::new(5e-3, 0.0);
        // b1 η π² ν_R J1(k a) / k from the constants directly
        let expect = 0.9386 * 1.12 * PI * PI * c.nu_r * crate::special::j1(c.k * 5e-3) / c.k;
        let got = velocity_kick(r, &f).norm();
        assert!((got - expect).abs() < 1e-20);
        assert!((got / 3.3e-8 - 1.0).abs() < 0.05, "{got:e}");
    }

    #[test]
    fn no_recoil_no_shift() {
        let mut cfg = npl();
        cfg.fountain.constants = cfg.fountain.constants.with_recoil_frequency(0.0).unwrap();
        let r = full_shift(&cfg).unwrap();
        assert_eq!(r.shift_rel, 0.0);
        assert_eq!(r.delta_p(), 0.0);
    }

    #[test]
    fn deterministic() {
        let cfg = npl();
        assert_eq!(full_shift(&cfg).unwrap(), full_shift(&cfg).unwrap());
    }

    #[test]
    fn k2_full_shift_matches_closed_form() {
        let mut cfg = npl();
        cfg.order = ExpansionOrder::K2Truncated;
        cfg.r1_domain = R1Domain::Unbounded;
        let full = full_shift(&cfg).unwrap();
        let closed = analytic_shift(&cfg).unwrap();
        assert!((full.shift_rel / closed - 1.0).abs() < 0.02, "{:e} {closed:e}", full.shift_rel);
    }

    #[test]
    fn positive_for_moderate_amplitudes() {
        for b1 in [0.3, 0.9386, 1.2] {
            for b2 in [0.3, 0.9386, 1.2] {
                let mut cfg = npl();
                cfg.tolerance = 1e-2;
                cfg.fountain.drive.b1 = b1;
                cfg.fountain.drive.b2 = b2;
                let r = full_shift(&cfg).unwrap();
                assert!(r.shift_rel > 0.0, "b1 {b1} b2 {b2}: {:e}", r.shift_rel);
            }
        }
    }

    #[test]
    fn surface_term_vanishes_without_profiles() {
        // k -> 0 flattens the tipping angle, and detection is uniform
        let mut cfg = npl();
        cfg.fountain.constants.k = 1e-6;
        let r = full_shift(&cfg).unwrap();
        assert!(r.delta_p_term2.abs() < 1e-9 * r.delta_p_term1.abs().max(1e-300));
    }

    #[test]
    fn lower_aperture_does_not_matter_here() {
        let mut cfg = npl();
        let open = full_shift(&cfg).unwrap();
        cfg.include_lower_aperture = true;
        let clipped = full_shift(&cfg).unwrap();
        assert!((open.shift_rel / clipped.shift_rel - 1.0).abs() < 1e-3);
    }

    #[test]
    fn symmetric_and_general_paths_agree() {
        let mut cfg = npl();
        cfg.tolerance = 1e-4;
        cfg.fountain.detection = DetectionProfile::gaussian(7e-3, BeamShape::Radial);
        let sym = full_shift(&cfg).unwrap();
        // an offset of 1e-12 m forces the 4D path without changing the physics measurably
        cfg.fountain.cloud.offset = Vec2::new(1e-12, 0.0);
        cfg.max_nodes = 64;
        cfg.tolerance = 1e-2;
        let gen = full_shift(&cfg).unwrap();
        assert!((sym.shift_rel / gen.shift_rel - 1.0).abs() < 1e-3);
        assert!((sym.delta_p_term2 / gen.delta_p_term2 - 1.0).abs() < 1e-3);
    }

    #[test]
    fn accuracy_error_carries_best_estimate() {
        let mut cfg = npl();
        cfg.tolerance = 1e-15;
        cfg.max_nodes = 32;
        match full_shift(&cfg) {
            Err(Error::AccuracyNotReached { best, .. }) => assert!(best.shift_rel > 0.0),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn contrast_zero_is_reported() {
        let mut cfg = npl();
        cfg.fountain.drive.b2 = 0.0;
        assert!(matches!(full_shift(&cfg), Err(Error::DegenerateContrast { .. })));
    }

    #[test]
    fn first_contrast_maximum_near_nominal_b1() {
        let m = contrast_maxima(&npl(), &[1]).unwrap();
        // 0.9326 for the rounded parameter set, within 1% of the quoted b1
        assert!((m[0] - 0.9386).abs() < 1e-2, "{m:?}");
        assert!(m[0] < 1.0);
    }

    #[test]
    fn scan_of_one_equals_single_call() {
        let cfg = npl();
        let scan = amplitude_scan(&cfg, &[cfg.fountain.drive.b2]);
        assert_eq!(scan.len(), 1);
        assert_eq!(scan[0].1.as_ref().unwrap(), &full_shift(&cfg).unwrap());
    }
}
