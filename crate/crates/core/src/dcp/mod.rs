//! Distributed cavity phase: transition-probability and frequency shifts from the spatial
//! phase of the Ramsey cavity field, sampled over a Monte Carlo atom ensemble.
//!
//! Each atom follows `r(t) = r0 + v t + g ψ t²/2`. The phase it picks up on a passage is the
//! cavity phase averaged along its path through the cavity with weight `cos(π z / 2h)`
//! (the TE011 field envelope). Its contribution to the transition probability at half
//! fringe is `½ sinθ1 sinθ2 (φ_down - φ_up)`.

mod clearance;
mod field;
mod sampling;

pub use clearance::{corner_clearance, max_corner_excursion, worst_case_clearance};
pub use field::{PhaseField, PhaseMap, Profile};
pub use sampling::Sampling;

use rayon::prelude::*;

use crate::constants::STANDARD_GRAVITY;
use crate::error::{Error, Result};
use crate::fountain::{tipping_angle, Fountain, TimingSchedule};
use crate::quadrature::{gauss_legendre, Rule};
use crate::vec2::Vec2;
use sampling::Sampler;

const CHUNK: usize = 4096;
pub const MAX_SCAN_TILT: f64 = 10e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FeedMode {
    #[default]
    BothBalanced,
    SinglePhi0,
    SinglePi,
    Imbalanced,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FeedConfig {
    pub mode: FeedMode,
    /// Fractional amplitude difference between the two feeds.
    pub amplitude_imbalance: f64,
    /// Phase difference between the two feeds, rad.
    pub phase_imbalance: f64,
}

impl FeedConfig {
    pub fn new(mode: FeedMode) -> Self {
        Self {
            mode,
            ..Self::default()
        }
    }

    /// Scale applied to a feed-driven m = 1 component, relative to a single feed at φ = 0.
    pub fn m1_factor(&self, detuning_ratio: f64) -> f64 {
        match self.mode {
            FeedMode::BothBalanced => 0.0,
            FeedMode::SinglePhi0 => 1.0,
            FeedMode::SinglePi => -1.0,
            FeedMode::Imbalanced => {
                0.5 * self.amplitude_imbalance
                    + suppression_factor(self.phase_imbalance, detuning_ratio)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DcpConfig {
    pub fountain: Fountain,
    pub samples: usize,
    pub seed: u64,
    pub sampling: Sampling,
    /// Worker threads; 0 uses the global rayon pool. Results do not depend on it.
    pub workers: usize,
    /// Pair every atom with its mirror image (launch deviation and velocity negated).
    pub antithetic: bool,
    /// Gauss-Legendre nodes along each cavity passage.
    pub z_nodes: usize,
    /// Fail with `StatisticsNotReached` if the standard error of δP exceeds this.
    pub max_stat_err: Option<f64>,
    /// Fringe width for the δP to δν conversion; defaults to `1/(2T)`.
    pub fringe_fwhm: Option<f64>,
}

impl Default for DcpConfig {
    fn default() -> Self {
        Self {
            fountain: Fountain::default(),
            samples: 100_000,
            seed: 1,
            sampling: Sampling::Pseudo,
            workers: 0,
            antithetic: true,
            z_nodes: 8,
            max_stat_err: None,
            fringe_fwhm: None,
        }
    }
}

impl DcpConfig {
    pub fn validate(&self) -> Result<()> {
        self.fountain.geometry.validate()?;
        self.fountain.timing.validate()?;
        self.fountain.drive.validate()?;
        self.fountain.detection.validate()?;
        let c = &self.fountain.cloud;
        if !(c.w0.is_finite() && c.w0 >= 0.0 && c.u.is_finite() && c.u >= 0.0) {
            return Err(Error::invalid("cloud", "w0 and u must be finite and non-negative"));
        }
        if self.samples < 2 {
            return Err(Error::invalid("samples", "need at least 2 samples"));
        }
        if self.z_nodes == 0 {
            return Err(Error::invalid("z_nodes", "need at least one node"));
        }
        if let Some(w) = self.fringe_fwhm {
            if !(w > 0.0) {
                return Err(Error::invalid("fringe_fwhm", "must be positive"));
            }
        }
        Ok(())
    }

    fn fwhm(&self) -> f64 {
        self.fringe_fwhm
            .unwrap_or_else(|| self.fountain.timing.fringe_fwhm())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DcpResult {
    pub delta_p: f64,
    /// Standard error of the weighted mean δP.
    pub stat_err: f64,
    pub shift_rel: f64,
    pub shift_stat_err: f64,
    /// Detection-weighted fraction of launched atoms.
    pub detected_fraction: f64,
    /// Weighted mean of `r(t2) - r(t1)` over detected atoms.
    pub centroid_displacement: Vec2,
    pub samples: usize,
}

/// δP → δν/ν using the slope of the central fringe, `δν = δP · 2 Δν_FWHM / π`.
pub fn dp_to_frequency(delta_p: f64, fringe_fwhm: f64, nu_clock: f64) -> Result<f64> {
    if !(fringe_fwhm > 0.0) {
        return Err(Error::invalid("fringe_fwhm", "must be positive"));
    }
    Ok(delta_p * 2.0 * fringe_fwhm / std::f64::consts::PI / nu_clock)
}

/// Default fringe width `1/(2T)` for a timing schedule.
pub fn default_fringe_fwhm(timing: &TimingSchedule) -> f64 {
    timing.fringe_fwhm()
}

/// Fraction of the single-feed m = 1 shift left by a feed phase imbalance at a cavity detuning
/// of `detuning_ratio` linewidths.
pub fn suppression_factor(phase_imbalance: f64, detuning_ratio: f64) -> f64 {
    0.5 * phase_imbalance * 2.0 * detuning_ratio
}

pub fn phase_imbalance_residual(
    single_feed_shift: f64,
    phase_imbalance: f64,
    detuning_ratio: f64,
) -> Result<f64> {
    if !(phase_imbalance.abs() < 0.1) {
        return Err(Error::invalid("phase_imbalance", "must satisfy |φ| < 0.1 rad"));
    }
    if !(detuning_ratio.abs() <= 0.5) {
        return Err(Error::invalid("detuning_ratio", "must satisfy |δc/Γ| <= 0.5"));
    }
    Ok(single_feed_shift * suppression_factor(phase_imbalance, detuning_ratio))
}

/// Sums over independent sampling units (an atom, or an antithetic pair) of the unit
/// weight `W` and weighted response `Y`, enough for a ratio estimate and its standard error.
#[derive(Default, Clone, Copy)]
struct Acc {
    w: f64,
    y: f64,
    ww: f64,
    wy: f64,
    yy: f64,
    wdx: Vec2,
}

impl Acc {
    fn add_unit(&mut self, w: f64, y: f64, wdx: Vec2) {
        self.w += w;
        self.y += y;
        self.ww += w * w;
        self.wy += w * y;
        self.yy += y * y;
        self.wdx += wdx;
    }

    fn merge(mut self, o: &Acc) -> Acc {
        self.w += o.w;
        self.y += o.y;
        self.ww += o.ww;
        self.wy += o.wy;
        self.yy += o.yy;
        self.wdx += o.wdx;
        self
    }
}

struct Passage {
    rule: Rule,
    vz: f64,
}

impl Passage {
    fn new(h: f64, n: usize, vz: f64) -> Self {
        let mut rule = gauss_legendre(n, -h, h);
        let half_pi_over_h = std::f64::consts::FRAC_PI_2 / h;
        for (w, z) in rule.weights.iter_mut().zip(&rule.nodes) {
            *w *= (half_pi_over_h * z).cos();
        }
        let total: f64 = rule.weights.iter().sum();
        for w in &mut rule.weights {
            *w /= total;
        }
        Self { rule, vz }
    }

    /// Envelope-weighted phase seen while crossing the cavity around time `t_mid`.
    /// `sign` is +1 going up, -1 coming down.
    fn phase(&self, field: &PhaseField, pos: impl Fn(f64) -> Vec2, t_mid: f64, sign: f64) -> f64 {
        self.rule
            .iter()
            .map(|(z, w)| w * field.phase(pos(t_mid + sign * z / self.vz), z))
            .sum()
    }
}

/// Ensemble δP for one phase component, feed configuration and tilt. `tilt` replaces
/// `cfg.fountain.cloud.tilt`.
pub fn simulate_dp(
    cfg: &DcpConfig,
    field: &PhaseField,
    feed: &FeedConfig,
    tilt: Vec2,
) -> Result<DcpResult> {
    cfg.validate()?;
    field.validate()?;
    if !(tilt.x.is_finite() && tilt.y.is_finite()) {
        return Err(Error::invalid("tilt", "must be finite"));
    }
    let f = &cfg.fountain;
    let (geo, timing, cloud, drive) = (&f.geometry, &f.timing, &f.cloud, &f.drive);
    let k = f.constants.k;
    let g = STANDARD_GRAVITY;
    let acc = tilt * g;

    let scale = if field.feed_driven && field.m == 1 {
        feed.m1_factor(drive.detuning_ratio())
    } else {
        1.0
    };
    let vz = timing.cavity_speed(g);
    let passage = Passage::new(geo.cavity_half_height(), cfg.z_nodes, vz);
    let per_unit = if cfg.antithetic { 2 } else { 1 };
    let units = cfg.samples.div_ceil(per_unit);
    let sampler = Sampler::new(cfg.sampling, cfg.seed, units);
    let spread_r = cloud.w0 / std::f64::consts::SQRT_2;
    let spread_v = cloud.u / std::f64::consts::SQRT_2;

    // (detection weight, response, transverse displacement between passages)
    let atom = |n: [f64; 4]| -> Option<(f64, f64, Vec2)> {
        let r0 = cloud.offset + Vec2::new(n[0], n[1]) * spread_r;
        let v = Vec2::new(n[2], n[3]) * spread_v;
        let pos = |t: f64| r0 + v * t + acc * (0.5 * t * t);
        let r1 = pos(timing.t1);
        let r2 = pos(timing.t2);
        if pos(timing.t1l).norm() >= geo.a_sel
            || r1.norm() >= geo.a
            || r2.norm() >= geo.a
            || pos(timing.t2l).norm() >= geo.a_sel
        {
            return None;
        }
        let w = f.detection.weight(pos(timing.td));
        if w == 0.0 {
            return None;
        }
        let y = if scale == 0.0 || field.amplitude == 0.0 {
            0.0
        } else {
            let up = passage.phase(field, pos, timing.t1, 1.0);
            let down = passage.phase(field, pos, timing.t2, -1.0);
            let s1 = tipping_angle(r1, drive.b1, drive.eta, k).sin();
            let s2 = tipping_angle(r2, drive.b2, drive.eta, k).sin();
            0.5 * s1 * s2 * scale * (down - up)
        };
        Some((w, y, r2 - r1))
    };

    let n_chunks = units.div_ceil(CHUNK);
    let run_chunk = |c: usize| {
        let mut a = Acc::default();
        for u in c * CHUNK..((c + 1) * CHUNK).min(units) {
            let n = sampler.normals(u);
            let (mut w, mut y, mut dx) = (0.0, 0.0, Vec2::ZERO);
            let mut take = |r: Option<(f64, f64, Vec2)>| {
                if let Some((wi, yi, dxi)) = r {
                    w += wi;
                    y += wi * yi;
                    dx += dxi * wi;
                }
            };
            take(atom(n));
            // the last unit of an odd-sized antithetic run holds a single atom
            if per_unit == 2 && 2 * u + 1 < cfg.samples {
                take(atom(n.map(|x| -x)));
            }
            a.add_unit(w, y, dx);
        }
        a
    };
    let chunks: Vec<Acc> = if cfg.workers == 0 {
        (0..n_chunks).into_par_iter().map(run_chunk).collect()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.workers)
            .build()
            .map_err(|e| Error::invalid("workers", e.to_string()))?
            .install(|| (0..n_chunks).into_par_iter().map(run_chunk).collect())
    };
    let total = chunks.iter().fold(Acc::default(), |a, b| a.merge(b));

    if total.w <= 0.0 {
        return Err(Error::NoAtoms);
    }
    let mean = total.y / total.w;
    let var_num = (total.yy - 2.0 * mean * total.wy + mean * mean * total.ww).max(0.0);
    let stat_err = var_num.sqrt() / total.w;
    if let Some(bound) = cfg.max_stat_err {
        if stat_err > bound {
            return Err(Error::StatisticsNotReached { stat_err, bound });
        }
    }
    let nu = f.constants.nu_clock;
    let fwhm = cfg.fwhm();
    Ok(DcpResult {
        delta_p: mean,
        stat_err,
        shift_rel: dp_to_frequency(mean, fwhm, nu)?,
        shift_stat_err: dp_to_frequency(stat_err, fwhm, nu)?,
        detected_fraction: total.w / cfg.samples as f64,
        centroid_displacement: total.wdx * (1.0 / total.w),
        samples: cfg.samples,
    })
}

/// Half the difference between single-feed runs at φ = 0 and φ = π.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DifferentialShift {
    pub shift_rel: f64,
    /// Both feeds share the same atoms, so the two errors add linearly.
    pub stat_err: f64,
}

pub fn differential_shift(cfg: &DcpConfig, field: &PhaseField, tilt: Vec2) -> Result<DifferentialShift> {
    let p = simulate_dp(cfg, field, &FeedConfig::new(FeedMode::SinglePhi0), tilt)?;
    let m = simulate_dp(cfg, field, &FeedConfig::new(FeedMode::SinglePi), tilt)?;
    Ok(DifferentialShift {
        shift_rel: 0.5 * (p.shift_rel - m.shift_rel),
        stat_err: 0.5 * (p.shift_stat_err + m.shift_stat_err),
    })
}

/// Differential shift with the tilt stepped along `direction` about the configured cloud tilt,
/// as when scanning a tilt adjustment whose true vertical is unknown. Steps are limited to
/// ±10 mrad.
pub fn tilt_scan(
    cfg: &DcpConfig,
    field: &PhaseField,
    direction: Vec2,
    tilts: &[f64],
) -> Vec<(f64, Result<DifferentialShift>)> {
    let dir = if direction.norm() > 0.0 { direction.unit() } else { direction };
    tilts
        .iter()
        .map(|&t| {
            let r = if !(t.abs() <= MAX_SCAN_TILT) {
                Err(Error::invalid("tilt", format!("{t} rad outside ±10 mrad")))
            } else if dir.norm() == 0.0 {
                Err(Error::invalid("direction", "must be non-zero"))
            } else {
                differential_shift(cfg, field, cfg.fountain.cloud.tilt + dir * t)
            };
            (t, r)
        })
        .collect()
}

/// δP with the launch offset stepped along `direction` about the configured offset.
pub fn offset_scan(
    cfg: &DcpConfig,
    field: &PhaseField,
    feed: &FeedConfig,
    direction: Vec2,
    offsets: &[f64],
) -> Vec<(f64, Result<DcpResult>)> {
    let dir = if direction.norm() > 0.0 { direction.unit() } else { direction };
    offsets
        .iter()
        .map(|&d| {
            let mut c = *cfg;
            c.fountain.cloud.offset = cfg.fountain.cloud.offset + dir * d;
            (d, simulate_dp(&c, field, feed, cfg.fountain.cloud.tilt))
        })
        .collect()
}
