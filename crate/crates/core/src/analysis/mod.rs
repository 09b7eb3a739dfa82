//! Measurement analyses: tilt zero-crossing and parabola-vertex fits, microwave amplitude
//! calibration, and the zero-density extrapolation of the collisional shift.

mod calibration;
mod fit;

pub use calibration::{calibrate_amplitude, contrast_peaks, Calibration, CalibrationOptions};
pub use fit::{
    cluster_means, fit_linear_zero_crossing, fit_parabola_vertex, Curvature, FitOptions,
    FitResult, WeightedPoint,
};

use crate::error::{Error, Result};

/// Fractional frequencies measured at two atomic densities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityPair {
    pub nu_high: f64,
    pub nu_low: f64,
    /// High-to-low density ratio.
    pub kappa: f64,
    /// Relative standard uncertainty of `kappa`.
    pub kappa_rel_unc: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extrapolation {
    /// Zero-density fractional frequency.
    pub corrected: f64,
    /// Type-B uncertainty from the uncertainty of `kappa`.
    pub type_b: f64,
}

/// Linear extrapolation to zero density:
/// `ν0 = ν_low - Δν/(κ - 1)`, `u_B = |Δν| κ u_rel(κ) / (κ - 1)²`.
pub fn collisional_extrapolation(pair: &DensityPair) -> Result<Extrapolation> {
    let DensityPair {
        nu_high,
        nu_low,
        kappa,
        kappa_rel_unc,
    } = *pair;
    if !(kappa > 1.0) {
        return Err(Error::InvalidRatio(kappa));
    }
    if !(kappa_rel_unc >= 0.0) {
        return Err(Error::invalid("kappa_rel_unc", "must be non-negative"));
    }
    let dnu = nu_high - nu_low;
    if kappa.is_infinite() {
        return Ok(Extrapolation {
            corrected: nu_low,
            type_b: 0.0,
        });
    }
    let km1 = kappa - 1.0;
    Ok(Extrapolation {
        corrected: nu_low - dnu / km1,
        type_b: dnu.abs() * kappa * kappa_rel_unc / (km1 * km1),
    })
}
