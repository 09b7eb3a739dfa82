//! Run configuration: flat `key = value` text with unit-suffixed keys.
//!
//! Values are stored in the units of their keys (mm, mm/s, mrad, s, Hz) and converted to SI
//! only when a library configuration is built, so writing a configuration back out and
//! reading it again reproduces every number exactly. Unset optional keys fall back to values
//! derived from the others (`t1l_s`, `td_s`, `nu_r_hz`).

use std::path::{Path, PathBuf};

use crate::constants::PhysicalConstants;
use crate::dcp::{DcpConfig, Sampling};
use crate::error::{Error, Result};
use crate::fountain::{
    BeamShape, CloudState, DetectionMode, DetectionProfile, Fountain, FountainGeometry,
    MicrowaveDrive, TimingSchedule,
};
use crate::lensing::{ExpansionOrder, LensingConfig, R1Domain};
use crate::vec2::Vec2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DetectionKind {
    Uniform,
    Gaussian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BeamKind {
    Radial,
    SingleAxis,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub nu_r_hz: Option<f64>,

    pub a_mm: f64,
    pub a_sel_mm: f64,
    pub a_cutoff_mm: f64,
    pub corner_z_lower_mm: f64,
    pub corner_z_upper_mm: f64,
    pub l_det_m: f64,

    pub t1_s: f64,
    pub t2_s: f64,
    pub t1l_s: Option<f64>,
    pub t2l_s: f64,
    pub td_s: Option<f64>,

    pub w0_mm: f64,
    pub u_mm_s: f64,
    pub offset_x_mm: f64,
    pub offset_y_mm: f64,
    pub tilt_x_mrad: f64,
    pub tilt_y_mrad: f64,

    pub b1: f64,
    pub b2: f64,
    pub eta: f64,
    pub cavity_q: f64,
    pub cavity_detuning_hz: f64,

    pub detection: DetectionKind,
    pub w_det_mm: f64,
    pub detection_beam: BeamKind,
    pub detection_axis_deg: f64,
    pub collection_radius_mm: Option<f64>,
    pub detection_offset_x_mm: f64,
    pub detection_offset_y_mm: f64,

    pub order: ExpansionOrder,
    pub r1_domain: R1Domain,
    pub lower_aperture: bool,
    pub tolerance: f64,
    pub max_nodes: usize,

    pub samples: usize,
    pub seed: u64,
    pub sampling: Sampling,
    pub antithetic: bool,
    pub workers: usize,
    pub z_nodes: usize,
    pub max_stat_err: Option<f64>,
    pub fringe_fwhm_hz: Option<f64>,

    pub output_dir: PathBuf,
}

impl Default for RunConfig {
    /// The NPL-CsF2 parameter set.
    fn default() -> Self {
        let f = Fountain::default();
        let d = DcpConfig::default();
        Self {
            nu_r_hz: None,
            a_mm: f.geometry.a * 1e3,
            a_sel_mm: f.geometry.a_sel * 1e3,
            a_cutoff_mm: f.geometry.a_cutoff * 1e3,
            corner_z_lower_mm: -21.5,
            corner_z_upper_mm: 21.5,
            l_det_m: 1.1 / 0.3,
            t1_s: 0.18,
            t2_s: 0.7,
            t1l_s: None,
            t2l_s: 0.837,
            td_s: None,
            w0_mm: 1.1,
            u_mm_s: 15.0,
            offset_x_mm: 0.0,
            offset_y_mm: 0.0,
            tilt_x_mrad: 0.0,
            tilt_y_mrad: 0.0,
            b1: f.drive.b1,
            b2: f.drive.b2,
            eta: f.drive.eta,
            cavity_q: 19_000.0,
            cavity_detuning_hz: 0.0,
            detection: DetectionKind::Uniform,
            w_det_mm: 7.0,
            detection_beam: BeamKind::SingleAxis,
            detection_axis_deg: 0.0,
            collection_radius_mm: None,
            detection_offset_x_mm: 0.0,
            detection_offset_y_mm: 0.0,
            order: ExpansionOrder::AllOrders,
            r1_domain: R1Domain::ClippedToAperture,
            lower_aperture: false,
            tolerance: 1e-3,
            max_nodes: 256,
            samples: d.samples,
            seed: d.seed,
            sampling: d.sampling,
            antithetic: d.antithetic,
            workers: d.workers,
            z_nodes: d.z_nodes,
            max_stat_err: None,
            fringe_fwhm_hz: None,
            output_dir: PathBuf::from("."),
        }
    }
}

fn bad(key: &str, reason: impl Into<String>) -> Error {
    Error::Config {
        key: key.to_string(),
        reason: reason.into(),
    }
}

fn num(key: &str, v: &str) -> Result<f64> {
    let x: f64 = v.parse().map_err(|_| bad(key, format!("`{v}` is not a number")))?;
    if !x.is_finite() {
        return Err(bad(key, "must be finite"));
    }
    Ok(x)
}

fn opt_num(key: &str, v: &str) -> Result<Option<f64>> {
    if v.is_empty() || v == "auto" {
        Ok(None)
    } else {
        num(key, v).map(Some)
    }
}

fn int<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| bad(key, format!("`{v}` is not a non-negative integer")))
}

fn boolean(key: &str, v: &str) -> Result<bool> {
    match v {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(bad(key, format!("`{v}` is not a boolean"))),
    }
}

fn opt_str(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_else(|| "auto".into())
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text, path)
    }

    /// Applies `key = value` lines on top of the defaults. `#` starts a comment.
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let mut cfg = Self::default();
        cfg.apply_text(text, path)?;
        Ok(cfg)
    }

    pub fn apply_text(&mut self, text: &str, path: &Path) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(path, i + 1, "expected `key = value`"))?;
            self.set(k.trim(), v.trim())
                .map_err(|e| Error::parse(path, i + 1, e.to_string()))?;
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, v: &str) -> Result<()> {
        match key {
            "nu_r_hz" => self.nu_r_hz = opt_num(key, v)?,
            "a_mm" => self.a_mm = num(key, v)?,
            "a_sel_mm" => self.a_sel_mm = num(key, v)?,
            "a_cutoff_mm" => self.a_cutoff_mm = num(key, v)?,
            "corner_z_lower_mm" => self.corner_z_lower_mm = num(key, v)?,
            "corner_z_upper_mm" => self.corner_z_upper_mm = num(key, v)?,
            "l_det_m" => self.l_det_m = num(key, v)?,
            "t1_s" => self.t1_s = num(key, v)?,
            "t2_s" => self.t2_s = num(key, v)?,
            "t1l_s" => self.t1l_s = opt_num(key, v)?,
            "t2l_s" => self.t2l_s = num(key, v)?,
            "td_s" => self.td_s = opt_num(key, v)?,
            "w0_mm" => self.w0_mm = num(key, v)?,
            "u_mm_s" => self.u_mm_s = num(key, v)?,
            "offset_x_mm" => self.offset_x_mm = num(key, v)?,
            "offset_y_mm" => self.offset_y_mm = num(key, v)?,
            "tilt_x_mrad" => self.tilt_x_mrad = num(key, v)?,
            "tilt_y_mrad" => self.tilt_y_mrad = num(key, v)?,
            "b1" => self.b1 = num(key, v)?,
            "b2" => self.b2 = num(key, v)?,
            "eta" => self.eta = num(key, v)?,
            "cavity_q" => self.cavity_q = num(key, v)?,
            "cavity_detuning_hz" => self.cavity_detuning_hz = num(key, v)?,
            "detection" => {
                self.detection = match v {
                    "uniform" => DetectionKind::Uniform,
                    "gaussian" => DetectionKind::Gaussian,
                    _ => return Err(bad(key, "expected `uniform` or `gaussian`")),
                }
            }
            "w_det_mm" => self.w_det_mm = num(key, v)?,
            "detection_beam" => {
                self.detection_beam = match v {
                    "radial" => BeamKind::Radial,
                    "single_axis" => BeamKind::SingleAxis,
                    _ => return Err(bad(key, "expected `radial` or `single_axis`")),
                }
            }
            "detection_axis_deg" => self.detection_axis_deg = num(key, v)?,
            "collection_radius_mm" => self.collection_radius_mm = opt_num(key, v)?,
            "detection_offset_x_mm" => self.detection_offset_x_mm = num(key, v)?,
            "detection_offset_y_mm" => self.detection_offset_y_mm = num(key, v)?,
            "order" => {
                self.order = match v {
                    "all" => ExpansionOrder::AllOrders,
                    "k2" => ExpansionOrder::K2Truncated,
                    _ => return Err(bad(key, "expected `all` or `k2`")),
                }
            }
            "r1_domain" => {
                self.r1_domain = match v {
                    "clipped" => R1Domain::ClippedToAperture,
                    "unbounded" => R1Domain::Unbounded,
                    _ => return Err(bad(key, "expected `clipped` or `unbounded`")),
                }
            }
            "lower_aperture" => self.lower_aperture = boolean(key, v)?,
            "tolerance" => self.tolerance = num(key, v)?,
            "max_nodes" => self.max_nodes = int(key, v)?,
            "samples" => self.samples = int(key, v)?,
            "seed" => self.seed = int(key, v)?,
            "sampling" => {
                self.sampling = match v {
                    "pseudo" => Sampling::Pseudo,
                    "halton" => Sampling::Halton,
                    "stratified" => Sampling::Stratified,
                    _ => return Err(bad(key, "expected `pseudo`, `halton` or `stratified`")),
                }
            }
            "antithetic" => self.antithetic = boolean(key, v)?,
            "workers" => self.workers = int(key, v)?,
            "z_nodes" => self.z_nodes = int(key, v)?,
            "max_stat_err" => self.max_stat_err = opt_num(key, v)?,
            "fringe_fwhm_hz" => self.fringe_fwhm_hz = opt_num(key, v)?,
            "output_dir" => self.output_dir = PathBuf::from(v),
            _ => return Err(bad(key, "unknown key")),
        }
        Ok(())
    }

    /// Every key with its current value, in a fixed order.
    pub fn pairs(&self) -> Vec<(&'static str, String)> {
        let s = |x: f64| x.to_string();
        vec![
            ("nu_r_hz", opt_str(self.nu_r_hz)),
            ("a_mm", s(self.a_mm)),
            ("a_sel_mm", s(self.a_sel_mm)),
            ("a_cutoff_mm", s(self.a_cutoff_mm)),
            ("corner_z_lower_mm", s(self.corner_z_lower_mm)),
            ("corner_z_upper_mm", s(self.corner_z_upper_mm)),
            ("l_det_m", s(self.l_det_m)),
            ("t1_s", s(self.t1_s)),
            ("t2_s", s(self.t2_s)),
            ("t1l_s", opt_str(self.t1l_s)),
            ("t2l_s", s(self.t2l_s)),
            ("td_s", opt_str(self.td_s)),
            ("w0_mm", s(self.w0_mm)),
            ("u_mm_s", s(self.u_mm_s)),
            ("offset_x_mm", s(self.offset_x_mm)),
            ("offset_y_mm", s(self.offset_y_mm)),
            ("tilt_x_mrad", s(self.tilt_x_mrad)),
            ("tilt_y_mrad", s(self.tilt_y_mrad)),
            ("b1", s(self.b1)),
            ("b2", s(self.b2)),
            ("eta", s(self.eta)),
            ("cavity_q", s(self.cavity_q)),
            ("cavity_detuning_hz", s(self.cavity_detuning_hz)),
            (
                "detection",
                match self.detection {
                    DetectionKind::Uniform => "uniform",
                    DetectionKind::Gaussian => "gaussian",
                }
                .into(),
            ),
            ("w_det_mm", s(self.w_det_mm)),
            (
                "detection_beam",
                match self.detection_beam {
                    BeamKind::Radial => "radial",
                    BeamKind::SingleAxis => "single_axis",
                }
                .into(),
            ),
            ("detection_axis_deg", s(self.detection_axis_deg)),
            ("collection_radius_mm", opt_str(self.collection_radius_mm)),
            ("detection_offset_x_mm", s(self.detection_offset_x_mm)),
            ("detection_offset_y_mm", s(self.detection_offset_y_mm)),
            (
                "order",
                match self.order {
                    ExpansionOrder::AllOrders => "all",
                    ExpansionOrder::K2Truncated => "k2",
                }
                .into(),
            ),
            (
                "r1_domain",
                match self.r1_domain {
                    R1Domain::ClippedToAperture => "clipped",
                    R1Domain::Unbounded => "unbounded",
                }
                .into(),
            ),
            ("lower_aperture", self.lower_aperture.to_string()),
            ("tolerance", s(self.tolerance)),
            ("max_nodes", self.max_nodes.to_string()),
            ("samples", self.samples.to_string()),
            ("seed", self.seed.to_string()),
            (
                "sampling",
                match self.sampling {
                    Sampling::Pseudo => "pseudo",
                    Sampling::Halton => "halton",
                    Sampling::Stratified => "stratified",
                }
                .into(),
            ),
            ("antithetic", self.antithetic.to_string()),
            ("workers", self.workers.to_string()),
            ("z_nodes", self.z_nodes.to_string()),
            ("max_stat_err", opt_str(self.max_stat_err)),
            ("fringe_fwhm_hz", opt_str(self.fringe_fwhm_hz)),
            ("output_dir", self.output_dir.display().to_string()),
        ]
    }

    pub fn to_text(&self) -> String {
        self.pairs()
            .into_iter()
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect()
    }

    pub fn fountain(&self) -> Result<Fountain> {
        let mm = 1e-3;
        let mut constants = PhysicalConstants::cesium();
        if let Some(nu_r) = self.nu_r_hz {
            constants = constants.with_recoil_frequency(nu_r)?;
        }
        let geometry = FountainGeometry {
            a: self.a_mm * mm,
            a_sel: self.a_sel_mm * mm,
            a_cutoff: self.a_cutoff_mm * mm,
            corner_z: [self.corner_z_lower_mm * mm, self.corner_z_upper_mm * mm],
            l_det: self.l_det_m,
        };
        let timing = TimingSchedule {
            t1: self.t1_s,
            t2: self.t2_s,
            t1l: self.t1l_s.unwrap_or(self.t1_s - (self.t2l_s - self.t2_s)),
            t2l: self.t2l_s,
            td: self.td_s.unwrap_or(self.t2l_s),
        };
        let cloud = CloudState {
            w0: self.w0_mm * mm,
            u: self.u_mm_s * mm,
            offset: Vec2::new(self.offset_x_mm, self.offset_y_mm) * mm,
            tilt: Vec2::new(self.tilt_x_mrad, self.tilt_y_mrad) * 1e-3,
        };
        let drive = MicrowaveDrive {
            b1: self.b1,
            b2: self.b2,
            eta: self.eta,
            cavity_linewidth: constants.nu_clock / self.cavity_q,
            cavity_detuning: self.cavity_detuning_hz,
            ..MicrowaveDrive::default()
        };
        let mode = match self.detection {
            DetectionKind::Uniform => DetectionMode::Uniform,
            DetectionKind::Gaussian => DetectionMode::Gaussian {
                w_det: self.w_det_mm * mm,
                beam: match self.detection_beam {
                    BeamKind::Radial => BeamShape::Radial,
                    BeamKind::SingleAxis => BeamShape::SingleAxis {
                        angle: self.detection_axis_deg.to_radians(),
                    },
                },
            },
        };
        let detection = DetectionProfile {
            mode,
            collection_radius: self.collection_radius_mm.map(|r| r * mm),
            offset: Vec2::new(self.detection_offset_x_mm, self.detection_offset_y_mm) * mm,
        };
        if !(self.cavity_q > 0.0) {
            return Err(bad("cavity_q", "must be positive"));
        }
        let f = Fountain {
            constants,
            geometry,
            timing,
            cloud,
            drive,
            detection,
        };
        f.geometry.validate()?;
        f.timing.validate()?;
        f.drive.validate()?;
        f.detection.validate()?;
        Ok(f)
    }

    pub fn lensing_config(&self) -> Result<LensingConfig> {
        let cfg = LensingConfig {
            fountain: self.fountain()?,
            order: self.order,
            r1_domain: self.r1_domain,
            include_lower_aperture: self.lower_aperture,
            tolerance: self.tolerance,
            max_nodes: self.max_nodes,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn dcp_config(&self) -> Result<DcpConfig> {
        let cfg = DcpConfig {
            fountain: self.fountain()?,
            samples: self.samples,
            seed: self.seed,
            sampling: self.sampling,
            workers: self.workers,
            antithetic: self.antithetic,
            z_nodes: self.z_nodes,
            max_stat_err: self.max_stat_err,
            fringe_fwhm: self.fringe_fwhm_hz,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_matches_library_defaults() {
        let f = RunConfig::default().fountain().unwrap();
        let d = Fountain::default();
        assert!((f.geometry.a - d.geometry.a).abs() < 1e-18);
        assert!((f.cloud.w0 - d.cloud.w0).abs() < 1e-18);
        assert!((f.cloud.u - d.cloud.u).abs() < 1e-18);
        assert!((f.timing.t1l - d.timing.t1l).abs() < 1e-15);
        assert_eq!(f.timing.td, d.timing.td);
        assert!((f.drive.cavity_linewidth / d.drive.cavity_linewidth - 1.0).abs() < 1e-15);
    }

    #[test]
    fn echo_round_trips_exactly() {
        let mut c = RunConfig::default();
        c.set("w0_mm", "1.234567890123").unwrap();
        c.set("tilt_x_mrad", "-0.55").unwrap();
        c.set("td_s", "0.95").unwrap();
        c.set("detection", "gaussian").unwrap();
        c.set("sampling", "halton").unwrap();
        let back = RunConfig::parse(&c.to_text(), Path::new("echo")).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn errors_name_key_and_line() {
        let e = RunConfig::parse("w0_mm = 1\nbogus = 2\n", Path::new("c.conf")).unwrap_err();
        match e {
            Error::Parse { line, msg, .. } => {
                assert_eq!(line, 2);
                assert!(msg.contains("bogus"));
            }
            other => panic!("{other:?}"),
        }
        assert!(RunConfig::parse("w0_mm 1\n", Path::new("c")).is_err());
        let mut c = RunConfig::default();
        assert!(c.set("b1", "abc").is_err());
        c.set("a_mm", "-1").unwrap();
        assert!(c.fountain().is_err());
    }

    #[test]
    fn recoil_override() {
        let mut c = RunConfig::default();
        c.set("nu_r_hz", "0").unwrap();
        assert_eq!(c.fountain().unwrap().constants.nu_r, 0.0);
        c.set("nu_r_hz", "auto").unwrap();
        assert!(c.fountain().unwrap().constants.nu_r > 0.0);
    }
}
