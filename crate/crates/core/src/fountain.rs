//! Fountain description: geometry, timing, atomic cloud, detection and microwave drive.
//!
//! All quantities are SI. Cloud radii follow the 1/e convention (`exp(-r^2/w0^2)`), laser
//! beam radii the 1/e^2 intensity convention (`exp(-2 r^2/w^2)`).

use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};
use crate::special::{gauss_1e2, j0};
use crate::vec2::Vec2;

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("must be positive, got {v}")))
    }
}

fn non_negative(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("must be non-negative, got {v}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FountainGeometry {
    /// Ramsey cavity aperture radius.
    pub a: f64,
    /// Lower (state-selection) aperture radius, passed at `t1L` and `t2L`.
    pub a_sel: f64,
    /// Cutoff waveguide radius; its junction with the endcaps forms the "corners".
    pub a_cutoff: f64,
    /// Heights of the lower and upper endcap planes relative to the cavity midplane.
    pub corner_z: [f64; 2],
    /// Launch-to-detection lever arm used to turn a cloud offset into a tilt.
    pub l_det: f64,
}

impl FountainGeometry {
    pub fn validate(&self) -> Result<()> {
        positive("a", self.a)?;
        positive("a_sel", self.a_sel)?;
        positive("a_cutoff", self.a_cutoff)?;
        positive("l_det", self.l_det)?;
        if !(self.corner_z[0] < 0.0 && self.corner_z[1] > 0.0) {
            return Err(Error::invalid("corner_z", "endcaps must straddle the midplane"));
        }
        Ok(())
    }

    pub fn cavity_half_height(&self) -> f64 {
        0.5 * (self.corner_z[1] - self.corner_z[0])
    }
}

impl Default for FountainGeometry {
    fn default() -> Self {
        Self {
            a: 5e-3,
            a_sel: 5e-3,
            a_cutoff: 5e-3,
            corner_z: [-21.5e-3, 21.5e-3],
            // 1.1 mm of offset maps onto 0.3 mrad of tilt
            l_det: 1.1e-3 / 0.3e-3,
        }
    }
}

/// Passage times measured from launch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimingSchedule {
    /// Ramsey cavity, upward.
    pub t1: f64,
    /// Ramsey cavity, downward.
    pub t2: f64,
    /// Lower aperture, upward.
    pub t1l: f64,
    /// Lower aperture, downward.
    pub t2l: f64,
    /// Detection.
    pub td: f64,
}

impl TimingSchedule {
    pub fn validate(&self) -> Result<()> {
        let ok = 0.0 < self.t1l
            && self.t1l <= self.t1
            && self.t1 < self.t2
            && self.t2 <= self.t2l
            && self.t2l <= self.td
            && self.td.is_finite();
        if ok {
            Ok(())
        } else {
            Err(Error::invalid(
                "timing",
                format!("need 0 < t1L <= t1 < t2 <= t2L <= t_d, got {self:?}"),
            ))
        }
    }

    pub fn ramsey_time(&self) -> f64 {
        self.t2 - self.t1
    }

    /// Full width of the central Ramsey fringe, `1 / (2 T)`.
    pub fn fringe_fwhm(&self) -> f64 {
        0.5 / self.ramsey_time()
    }

    /// Vertical speed at the cavity midplane for a ballistic flight.
    pub fn cavity_speed(&self, g: f64) -> f64 {
        0.5 * g * self.ramsey_time()
    }

    /// Times at which the vertical trajectory crosses height `z` above the midplane, in
    /// increasing order (empty if the apex is below `z`).
    pub fn crossing_times(&self, z: f64, g: f64) -> Vec<f64> {
        let v = self.cavity_speed(g);
        let disc = v * v - 2.0 * g * z;
        if disc < 0.0 {
            return Vec::new();
        }
        let s = disc.sqrt();
        vec![self.t1 + (v - s) / g, self.t1 + (v + s) / g]
    }
}

impl Default for TimingSchedule {
    fn default() -> Self {
        let (t1, t2, t2l) = (0.18, 0.7, 0.837);
        Self {
            t1,
            t2,
            t1l: t1 - (t2l - t2),
            t2l,
            td: t2l,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CloudState {
    /// 1/e launch radius.
    pub w0: f64,
    /// Thermal velocity `sqrt(2 kB T / m)`; `W_T(v) = exp(-v^2/u^2)`.
    pub u: f64,
    /// Transverse launch offset.
    pub offset: Vec2,
    /// Fountain tilt (rad); gravity then has a transverse component `g * tilt` in the cavity frame.
    pub tilt: Vec2,
}

impl CloudState {
    pub fn validate(&self) -> Result<()> {
        positive("w0", self.w0)?;
        positive("u", self.u)
    }

    /// 1/e cloud radius at time `t`.
    pub fn radius_at(&self, t: f64) -> f64 {
        (self.w0 * self.w0 + self.u * self.u * t * t).sqrt()
    }
}

impl Default for CloudState {
    fn default() -> Self {
        Self {
            w0: 1.1e-3,
            u: 15e-3,
            offset: Vec2::ZERO,
            tilt: Vec2::ZERO,
        }
    }
}

/// Final cloud size at the lower aperture, `sqrt(w0^2 + u^2 t2L^2)`.
pub fn w2l(cloud: &CloudState, timing: &TimingSchedule) -> f64 {
    cloud.radius_at(timing.t2l)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BeamShape {
    /// `exp(-2 r^2 / w^2)` about the detection axis.
    Radial,
    /// A beam whose intensity varies only along the horizontal direction at `angle`
    /// (it propagates perpendicular to that direction).
    SingleAxis { angle: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DetectionMode {
    Uniform,
    Gaussian { w_det: f64, beam: BeamShape },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionProfile {
    pub mode: DetectionMode,
    /// Optional 1/e^2 radius of the fluorescence collection, applied radially.
    pub collection_radius: Option<f64>,
    /// Rigid displacement of the detection region from the fountain axis.
    pub offset: Vec2,
}

impl Default for DetectionProfile {
    fn default() -> Self {
        Self::uniform()
    }
}

impl DetectionProfile {
    pub fn uniform() -> Self {
        Self {
            mode: DetectionMode::Uniform,
            collection_radius: None,
            offset: Vec2::ZERO,
        }
    }

    pub fn gaussian(w_det: f64, beam: BeamShape) -> Self {
        Self {
            mode: DetectionMode::Gaussian { w_det, beam },
            collection_radius: None,
            offset: Vec2::ZERO,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let DetectionMode::Gaussian { w_det, .. } = self.mode {
            positive("w_det", w_det)?;
        }
        if let Some(r) = self.collection_radius {
            positive("collection_radius", r)?;
        }
        Ok(())
    }

    /// True when the weight depends on |r_d| only.
    pub fn is_radial(&self) -> bool {
        self.offset == Vec2::ZERO
            && !matches!(
                self.mode,
                DetectionMode::Gaussian {
                    beam: BeamShape::SingleAxis { .. },
                    ..
                }
            )
    }

    pub fn weight(&self, rd: Vec2) -> f64 {
        self.weight_and_gradient(rd).0
    }

    /// `W_d(r_d)` and its transverse gradient.
    pub fn weight_and_gradient(&self, rd: Vec2) -> (f64, Vec2) {
        let r = rd - self.offset;
        let (mut w, mut grad_log) = (1.0, Vec2::ZERO);
        if let DetectionMode::Gaussian { w_det, beam } = self.mode {
            let s = -4.0 / (w_det * w_det);
            match beam {
                BeamShape::Radial => {
                    w *= gauss_1e2(r.norm2(), w_det);
                    grad_log += r * s;
                }
                BeamShape::SingleAxis { angle } => {
                    let e = Vec2::polar(1.0, angle);
                    let p = r.dot(e);
                    w *= gauss_1e2(p * p, w_det);
                    grad_log += e * (s * p);
                }
            }
        }
        if let Some(rc) = self.collection_radius {
            w *= gauss_1e2(r.norm2(), rc);
            grad_log += r * (-4.0 / (rc * rc));
        }
        (w, grad_log * w)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MicrowaveDrive {
    /// Scaled amplitude of the upward passage; 1 is an aperture-averaged pi/2 pulse.
    pub b1: f64,
    /// Scaled amplitude of the downward passage.
    pub b2: f64,
    /// On-axis to aperture-average pulse-area ratio (1.120 for a 5 mm aperture).
    pub eta: f64,
    pub feed_amplitudes: [f64; 2],
    pub feed_phases: [f64; 2],
    /// Cavity resonance full width, Hz.
    pub cavity_linewidth: f64,
    /// Cavity detuning from the clock transition, Hz.
    pub cavity_detuning: f64,
}

impl MicrowaveDrive {
    pub fn validate(&self) -> Result<()> {
        non_negative("b1", self.b1)?;
        non_negative("b2", self.b2)?;
        positive("eta", self.eta)?;
        positive("cavity_linewidth", self.cavity_linewidth)?;
        if (self.feed_phases[0] - self.feed_phases[1]).abs() >= std::f64::consts::PI {
            return Err(Error::invalid("feed_phases", "feed phase difference must be below pi"));
        }
        Ok(())
    }

    /// Cavity detuning in units of the resonance full width.
    pub fn detuning_ratio(&self) -> f64 {
        self.cavity_detuning / self.cavity_linewidth
    }
}

impl Default for MicrowaveDrive {
    fn default() -> Self {
        Self {
            b1: 0.9386,
            b2: 0.9386,
            eta: 1.120,
            feed_amplitudes: [1.0, 1.0],
            feed_phases: [0.0, 0.0],
            // Q = 19000 at 9.19 GHz
            cavity_linewidth: crate::constants::CS_CLOCK_FREQUENCY / 19_000.0,
            cavity_detuning: 0.0,
        }
    }
}

/// Tipping angle of a pass through the cavity at transverse position `r`:
/// `(pi/2) b eta J0(k |r|)`.
pub fn tipping_angle(r: Vec2, b: f64, eta: f64, k: f64) -> f64 {
    std::f64::consts::FRAC_PI_2 * b * eta * j0(k * r.norm())
}

/// Everything needed to describe one fountain configuration.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Fountain {
    pub constants: PhysicalConstants,
    pub geometry: FountainGeometry,
    pub timing: TimingSchedule,
    pub cloud: CloudState,
    pub drive: MicrowaveDrive,
    pub detection: DetectionProfile,
}

impl Fountain {
    /// The NPL-CsF2 parameter set with uniform detection.
    pub fn npl_csf2() -> Self {
        Self::default()
    }

    pub fn validate(&self) -> Result<()> {
        self.geometry.validate()?;
        self.timing.validate()?;
        self.cloud.validate()?;
        self.drive.validate()?;
        self.detection.validate()
    }
}
