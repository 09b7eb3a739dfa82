//! Physical constants and the derived recoil quantities.

use crate::error::{Error, Result};

/// Planck constant, J s (exact, SI 2019).
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Speed of light in vacuum, m/s (exact).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Unified atomic mass unit, kg (CODATA 2018).
pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;
/// Mass of 133Cs, kg.
pub const CS133_MASS: f64 = 132.905_451_961 * ATOMIC_MASS_UNIT;
/// Cs ground-state hyperfine frequency, Hz (defines the SI second).
pub const CS_CLOCK_FREQUENCY: f64 = 9_192_631_770.0;
/// Standard gravity, m/s^2.
pub const STANDARD_GRAVITY: f64 = 9.806_65;

/// Fundamental constants plus the recoil frequency `nu_r = h nu^2 / (2 m c^2)` and the
/// microwave wavenumber `k = 2 pi nu / c` that follow from them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    pub h: f64,
    pub m_cs: f64,
    pub c: f64,
    pub nu_clock: f64,
    pub nu_r: f64,
    pub k: f64,
}

impl PhysicalConstants {
    pub fn derive(h: f64, m_cs: f64, c: f64, nu_clock: f64) -> Result<Self> {
        for (name, v) in [("h", h), ("m_cs", m_cs), ("c", c), ("nu_clock", nu_clock)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(name, format!("must be positive and finite, got {v}")));
            }
        }
        Ok(Self {
            h,
            m_cs,
            c,
            nu_clock,
            nu_r: h * nu_clock * nu_clock / (2.0 * m_cs * c * c),
            k: 2.0 * std::f64::consts::PI * nu_clock / c,
        })
    }

    /// Cs-133 with exact SI constants.
    pub fn cesium() -> Self {
        Self::derive(PLANCK, CS133_MASS, SPEED_OF_LIGHT, CS_CLOCK_FREQUENCY)
            .expect("built-in constants are positive")
    }

    /// Overrides the recoil frequency, e.g. to switch the lensing force off (`nu_r = 0`).
    pub fn with_recoil_frequency(mut self, nu_r: f64) -> Result<Self> {
        if !(nu_r.is_finite() && nu_r >= 0.0) {
            return Err(Error::invalid("nu_r", format!("must be non-negative, got {nu_r}")));
        }
        self.nu_r = nu_r;
        Ok(self)
    }

    /// The simplistic microwave recoil shift, `nu_r / nu`.
    pub fn recoil_fraction(&self) -> f64 {
        self.nu_r / self.nu_clock
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::cesium()
    }
}

/// Free function form of [`PhysicalConstants::derive`].
pub fn derive_constants(h: f64, m_cs: f64, c: f64, nu_clock: f64) -> Result<PhysicalConstants> {
    PhysicalConstants::derive(h, m_cs, c, nu_clock)
}
