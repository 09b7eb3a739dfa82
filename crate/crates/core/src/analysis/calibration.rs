//! Microwave amplitude calibration from the maxima of a fringe-contrast scan.
//!
//! The k-th contrast maximum (counting from the lowest drive) is taken to be the
//! `n = 2k + 1` multiple of a π/2 pulse. A single scale `b = s · drive` is fitted by least
//! squares through the origin. For a real cloud the maxima sit slightly below the odd
//! integers, so the expected positions can be supplied per order instead.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationOptions {
    /// Peaks with a topographic prominence below this fraction of the scan's range are
    /// ignored.
    pub min_prominence: f64,
}

impl Default for CalibrationOptions {
    fn default() -> Self {
        Self {
            min_prominence: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Calibration {
    /// `b` per unit drive.
    pub scale: f64,
    /// `(n, drive at the maximum, expected b)` for every matched maximum.
    pub maxima: Vec<(u32, f64, f64)>,
    /// RMS of `scale · drive - expected b` over the matched maxima.
    pub residual_rms: f64,
}

fn median3(a: f64, b: f64, c: f64) -> f64 {
    a.max(b).min(a.min(b).max(c))
}

fn smooth(v: &[f64]) -> Vec<f64> {
    let n = v.len();
    (0..n)
        .map(|i| {
            if i == 0 || i + 1 == n {
                v[i]
            } else {
                median3(v[i - 1], v[i], v[i + 1])
            }
        })
        .collect()
}

fn prominence(s: &[f64], i: usize) -> f64 {
    let h = s[i];
    let side = |range: &mut dyn Iterator<Item = usize>| {
        let mut low = h;
        for j in range {
            if s[j] > h {
                break;
            }
            low = low.min(s[j]);
        }
        low
    };
    let left = side(&mut (0..i).rev());
    let right = side(&mut (i + 1..s.len()));
    h - left.max(right)
}

/// Vertex of the parabola through three points.
fn parabolic_peak(x: [f64; 3], y: [f64; 3]) -> f64 {
    let d1 = (y[1] - y[0]) / (x[1] - x[0]);
    let d2 = (y[2] - y[1]) / (x[2] - x[1]);
    let a = (d2 - d1) / (x[2] - x[0]);
    if a >= 0.0 {
        return x[1];
    }
    let b = d1 - a * (x[0] + x[1]);
    (-b / (2.0 * a)).clamp(x[0], x[2])
}

/// Drive settings of the contrast maxima, in increasing order.
pub fn contrast_peaks(scan: &[(f64, f64)], opts: &CalibrationOptions) -> Result<Vec<f64>> {
    if scan.iter().any(|(d, c)| !d.is_finite() || !c.is_finite()) {
        return Err(Error::invalid("contrast_scan", "values must be finite"));
    }
    let mut pts = scan.to_vec();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    if pts.windows(2).any(|w| w[0].0 == w[1].0) {
        return Err(Error::invalid("contrast_scan", "duplicate drive settings"));
    }
    let x: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let s = smooth(&pts.iter().map(|p| p.1.abs()).collect::<Vec<_>>());
    let (lo, hi) = s
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
    let threshold = opts.min_prominence * (hi - lo);
    let mut peaks = Vec::new();
    let mut i = 1;
    while i + 1 < s.len() {
        if s[i] > s[i - 1] {
            // plateau: walk to its end, use its middle
            let mut j = i;
            while j + 1 < s.len() && s[j + 1] == s[i] {
                j += 1;
            }
            if j + 1 < s.len() && s[j + 1] < s[i] && prominence(&s, i) >= threshold && threshold > 0.0 {
                let m = (i + j) / 2;
                let peak = if i == j {
                    parabolic_peak([x[i - 1], x[i], x[i + 1]], [s[i - 1], s[i], s[i + 1]])
                } else {
                    x[m]
                };
                peaks.push(peak);
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    Ok(peaks)
}

/// Fits the drive-to-b scale. `expected` gives the b value of the n = 1, 3, 5, ... maxima;
/// `None` uses the odd integers themselves.
pub fn calibrate_amplitude(
    scan: &[(f64, f64)],
    expected: Option<&[f64]>,
    opts: &CalibrationOptions,
) -> Result<Calibration> {
    let peaks = contrast_peaks(scan, opts)?;
    if peaks.len() < 2 {
        return Err(Error::InsufficientScan { found: peaks.len() });
    }
    let targets: Vec<f64> = match expected {
        Some(e) => {
            if e.len() < peaks.len() {
                return Err(Error::AmbiguousCalibration(format!(
                    "{} maxima found but only {} expected positions given",
                    peaks.len(),
                    e.len()
                )));
            }
            if e.windows(2).any(|w| w[1] <= w[0]) {
                return Err(Error::AmbiguousCalibration(
                    "expected positions must increase with n".into(),
                ));
            }
            e[..peaks.len()].to_vec()
        }
        None => (0..peaks.len()).map(|k| (2 * k + 1) as f64).collect(),
    };
    if peaks[0] <= 0.0 {
        return Err(Error::AmbiguousCalibration("maximum at non-positive drive".into()));
    }
    let sdd: f64 = peaks.iter().map(|d| d * d).sum();
    let sde: f64 = peaks.iter().zip(&targets).map(|(d, e)| d * e).sum();
    let scale = sde / sdd;
    let resid: Vec<f64> = peaks.iter().zip(&targets).map(|(d, e)| scale * d - e).collect();
    // orders are 2 apart in b; allow a quarter of that before calling the match ambiguous
    if resid.iter().any(|r| r.abs() >= 0.5) {
        return Err(Error::AmbiguousCalibration(format!(
            "maxima at drives {peaks:?} do not follow the 1, 3, 5 ... sequence"
        )));
    }
    let residual_rms = (resid.iter().map(|r| r * r).sum::<f64>() / resid.len() as f64).sqrt();
    Ok(Calibration {
        scale,
        maxima: peaks
            .iter()
            .zip(&targets)
            .enumerate()
            .map(|(k, (&d, &e))| ((2 * k + 1) as u32, d, e))
            .collect(),
        residual_rms,
    })
}
