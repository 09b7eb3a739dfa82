//! Azimuthal Fourier components of the cavity phase, `amplitude · g_m(r, z) · cos(m(φ - φ_0))`.

use std::path::Path;

use crate::error::{Error, Result};
use crate::fountain::FountainGeometry;
use crate::vec2::Vec2;

#[derive(Debug, Clone, PartialEq)]
pub enum Profile {
    /// `(r / r_ref)^radial_power · Σ_j z_coeffs[j] (z / z_ref)^j`
    Analytic {
        radial_power: u32,
        z_coeffs: Vec<f64>,
        r_ref: f64,
        z_ref: f64,
    },
    Tabulated(PhaseMap),
}

impl Profile {
    pub fn eval(&self, r: f64, z: f64) -> f64 {
        match self {
            Profile::Analytic {
                radial_power,
                z_coeffs,
                r_ref,
                z_ref,
            } => {
                let zs = z / z_ref;
                let poly = z_coeffs.iter().rev().fold(0.0, |acc, c| acc * zs + c);
                (r / r_ref).powi(*radial_power as i32) * poly
            }
            Profile::Tabulated(map) => map.eval(r, z),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseField {
    /// Azimuthal order, 0, 1 or 2.
    pub m: u32,
    /// Phase scale, rad.
    pub amplitude: f64,
    /// Direction of the cos(mφ) lobe, rad.
    pub orientation: f64,
    pub profile: Profile,
    /// Whether the component originates in the feeds (and so follows the feed configuration)
    /// rather than in the cavity walls.
    pub feed_driven: bool,
}

impl PhaseField {
    /// Analytic toy profiles: m = 0 quadratic in r and odd in z, m = 1 and 2 as (r/a)^m and
    /// uniform along z.
    pub fn toy(m: u32, amplitude: f64, geometry: &FountainGeometry) -> Result<Self> {
        let (radial_power, z_coeffs) = match m {
            0 => (2, vec![0.0, 1.0]),
            1 => (1, vec![1.0]),
            2 => (2, vec![1.0]),
            _ => return Err(Error::invalid("m", format!("azimuthal order {m} not supported"))),
        };
        Ok(Self {
            m,
            amplitude,
            orientation: 0.0,
            profile: Profile::Analytic {
                radial_power,
                z_coeffs,
                r_ref: geometry.a,
                z_ref: geometry.cavity_half_height(),
            },
            feed_driven: m == 1,
        })
    }

    pub fn from_map(map: PhaseMap, amplitude: f64) -> Self {
        Self {
            m: map.m,
            amplitude,
            orientation: 0.0,
            feed_driven: map.m == 1,
            profile: Profile::Tabulated(map),
        }
    }

    pub fn with_orientation(mut self, orientation: f64) -> Self {
        self.orientation = orientation;
        self
    }

    pub fn with_feed_driven(mut self, feed_driven: bool) -> Self {
        self.feed_driven = feed_driven;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.m > 2 {
            return Err(Error::invalid("m", "only m = 0, 1, 2 are modelled"));
        }
        if !self.amplitude.is_finite() {
            return Err(Error::invalid("amplitude", "must be finite"));
        }
        if let Profile::Analytic {
            radial_power,
            r_ref,
            z_ref,
            ..
        } = &self.profile
        {
            if *radial_power < self.m {
                return Err(Error::invalid("radial_power", "must be at least m"));
            }
            if !(*r_ref > 0.0 && *z_ref > 0.0) {
                return Err(Error::invalid("profile", "reference lengths must be positive"));
            }
        }
        Ok(())
    }

    /// Phase at transverse position `r` and height `z` above the midplane.
    pub fn phase(&self, r: Vec2, z: f64) -> f64 {
        if self.amplitude == 0.0 {
            return 0.0;
        }
        let rn = r.norm();
        let angular = if self.m == 0 {
            1.0
        } else if rn == 0.0 {
            return 0.0;
        } else {
            (self.m as f64 * (r.angle() - self.orientation)).cos()
        };
        self.amplitude * self.profile.eval(rn, z) * angular
    }
}

/// Tabulated `g_m(r, z)` on a uniform rectangular grid, bilinearly interpolated and clamped
/// at the edges.
///
/// Text format: `key = value` header lines (`m`, `nr`, `nz`, `r_mm = lo, hi`,
/// `z_mm = lo, hi`), then `nr` CSV rows of `nz` values each, row i at radius
/// `r_lo + i (r_hi - r_lo)/(nr - 1)`. Lines starting with `#` are ignored.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseMap {
    pub m: u32,
    pub nr: usize,
    pub nz: usize,
    pub r_range: (f64, f64),
    pub z_range: (f64, f64),
    /// Row-major, `values[i * nz + j]` at (r_i, z_j).
    pub values: Vec<f64>,
}

impl PhaseMap {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text, path)
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let mut m = None;
        let mut nr = None;
        let mut nz = None;
        let mut r_range = None;
        let mut z_range = None;
        let mut values = Vec::new();
        let mut rows = 0usize;
        let mut last_line = 0;

        let pair = |v: &str, line: usize| -> Result<(f64, f64)> {
            let parts: Vec<&str> = v.split(',').map(str::trim).collect();
            if parts.len() != 2 {
                return Err(Error::parse(path, line, "expected `lo, hi`"));
            }
            let lo: f64 = parts[0]
                .parse()
                .map_err(|_| Error::parse(path, line, format!("bad number `{}`", parts[0])))?;
            let hi: f64 = parts[1]
                .parse()
                .map_err(|_| Error::parse(path, line, format!("bad number `{}`", parts[1])))?;
            if !(hi > lo) {
                return Err(Error::parse(path, line, "range must be increasing"));
            }
            Ok((lo * 1e-3, hi * 1e-3))
        };
        let count = |v: &str, line: usize| -> Result<usize> {
            v.trim()
                .parse()
                .map_err(|_| Error::parse(path, line, format!("bad integer `{}`", v.trim())))
        };

        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            last_line = line;
            let l = raw.trim();
            if l.is_empty() || l.starts_with('#') {
                continue;
            }
            if let Some((k, v)) = l.split_once('=') {
                if rows > 0 {
                    return Err(Error::parse(path, line, "header line after data rows"));
                }
                match k.trim() {
                    "m" => m = Some(count(v, line)? as u32),
                    "nr" => nr = Some(count(v, line)?),
                    "nz" => nz = Some(count(v, line)?),
                    "r_mm" => r_range = Some(pair(v, line)?),
                    "z_mm" => z_range = Some(pair(v, line)?),
                    other => return Err(Error::parse(path, line, format!("unknown key `{other}`"))),
                }
                continue;
            }
            let want = nz.ok_or_else(|| Error::parse(path, line, "data before `nz` header"))?;
            let row: Vec<f64> = l
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::parse(path, line, format!("bad number `{}`", s.trim())))
                })
                .collect::<Result<_>>()?;
            if row.len() != want {
                return Err(Error::parse(
                    path,
                    line,
                    format!("expected {want} values, found {}", row.len()),
                ));
            }
            values.extend(row);
            rows += 1;
        }

        let missing = |what: &str| Error::parse(path, last_line, format!("missing `{what}` header"));
        let m = m.ok_or_else(|| missing("m"))?;
        let nr = nr.ok_or_else(|| missing("nr"))?;
        let nz = nz.ok_or_else(|| missing("nz"))?;
        let r_range = r_range.ok_or_else(|| missing("r_mm"))?;
        let z_range = z_range.ok_or_else(|| missing("z_mm"))?;
        if m > 2 {
            return Err(Error::parse(path, last_line, format!("m = {m} not supported")));
        }
        if nr < 2 || nz < 2 {
            return Err(Error::parse(path, last_line, "grid needs at least 2 x 2 points"));
        }
        if rows != nr {
            return Err(Error::parse(path, last_line, format!("expected {nr} rows, found {rows}")));
        }
        if r_range.0 < 0.0 {
            return Err(Error::parse(path, last_line, "radii must be non-negative"));
        }
        let map = Self {
            m,
            nr,
            nz,
            r_range,
            z_range,
            values,
        };
        if m >= 1 && r_range.0 == 0.0 && map.values[..nz].iter().any(|&g| g != 0.0) {
            return Err(Error::parse(
                path,
                last_line,
                "phase must vanish on axis for m >= 1 (first row must be zero)",
            ));
        }
        Ok(map)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!(
            "m = {}\nnr = {}\nnz = {}\nr_mm = {}, {}\nz_mm = {}, {}\n",
            self.m,
            self.nr,
            self.nz,
            self.r_range.0 * 1e3,
            self.r_range.1 * 1e3,
            self.z_range.0 * 1e3,
            self.z_range.1 * 1e3
        );
        for row in self.values.chunks(self.nz) {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
            s.push_str(&cells.join(", "));
            s.push('\n');
        }
        s
    }

    /// Samples an analytic profile onto a grid.
    pub fn sample(
        m: u32,
        profile: &Profile,
        nr: usize,
        nz: usize,
        r_range: (f64, f64),
        z_range: (f64, f64),
    ) -> Self {
        let mut values = Vec::with_capacity(nr * nz);
        for i in 0..nr {
            let r = r_range.0 + (r_range.1 - r_range.0) * i as f64 / (nr - 1) as f64;
            for j in 0..nz {
                let z = z_range.0 + (z_range.1 - z_range.0) * j as f64 / (nz - 1) as f64;
                values.push(profile.eval(r, z));
            }
        }
        Self {
            m,
            nr,
            nz,
            r_range,
            z_range,
            values,
        }
    }

    pub fn eval(&self, r: f64, z: f64) -> f64 {
        let locate = |x: f64, (lo, hi): (f64, f64), n: usize| -> (usize, f64) {
            let s = ((x - lo) / (hi - lo) * (n - 1) as f64).clamp(0.0, (n - 1) as f64);
            let i = (s.floor() as usize).min(n - 2);
            (i, s - i as f64)
        };
        let (i, fr) = locate(r, self.r_range, self.nr);
        let (j, fz) = locate(z, self.z_range, self.nz);
        let g = |i: usize, j: usize| self.values[i * self.nz + j];
        (1.0 - fr) * ((1.0 - fz) * g(i, j) + fz * g(i, j + 1))
            + fr * ((1.0 - fz) * g(i + 1, j) + fz * g(i + 1, j + 1))
    }
}
