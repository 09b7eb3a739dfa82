//! Bessel functions J0, J1 and the Gaussian weights used throughout.
//!
//! The argument is `k r` with r inside the fountain apertures, so x stays below ~4 in
//! practice. The ascending series is used up to [`SERIES_LIMIT`], where its largest term
//! is ~1e2 and cancellation costs at most two digits; above it the Hankel asymptotic
//! expansion takes over.

use crate::error::{Error, Result};

const SERIES_LIMIT: f64 = 8.0;

/// Bessel function of the first kind, order 0 or 1, for `x >= 0`.
pub fn bessel_j(order: u32, x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::invalid("x", format!("Bessel argument must be >= 0, got {x}")));
    }
    match order {
        0 => Ok(j0(x)),
        1 => Ok(j1(x)),
        _ => Err(Error::invalid("order", format!("only orders 0 and 1 are provided, got {order}"))),
    }
}

/// J0(x). Even in x.
pub fn j0(x: f64) -> f64 {
    let x = x.abs();
    if x < SERIES_LIMIT {
        series(0, x)
    } else {
        asymptotic(0, x)
    }
}

/// J1(x). Odd in x.
pub fn j1(x: f64) -> f64 {
    let s = x.signum();
    let x = x.abs();
    s * if x < SERIES_LIMIT { series(1, x) } else { asymptotic(1, x) }
}

/// sum_k (-1)^k (x/2)^(2k+n) / (k! (k+n)!)
fn series(n: u32, x: f64) -> f64 {
    let q = -0.25 * x * x;
    let mut term = if n == 0 { 1.0 } else { 0.5 * x };
    let mut sum = term;
    let mut k = 1.0;
    while k < 200.0 {
        term *= q / (k * (k + n as f64));
        sum += term;
        if term.abs() < 1e-17 * sum.abs().max(1e-300) {
            break;
        }
        k += 1.0;
    }
    sum
}

// Hankel's expansion, J_n(x) ~ sqrt(2/(pi x)) (P cos chi - Q sin chi), chi = x - (2n+1)pi/4.
fn asymptotic(n: u32, x: f64) -> f64 {
    let mu = 4.0 * (n * n) as f64;
    let z = 8.0 * x;
    let (mut p, mut q) = (1.0, 0.0);
    let mut term = 1.0;
    let mut prev = f64::INFINITY;
    for k in 1..30 {
        let kf = k as f64;
        term *= (mu - (2.0 * kf - 1.0).powi(2)) / (kf * z);
        if term.abs() > prev {
            break;
        }
        prev = term.abs();
        // k odd feeds Q, k even feeds P, with alternating signs in each.
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
    }
    let chi = x - (2.0 * n as f64 + 1.0) * std::f64::consts::FRAC_PI_4;
    (2.0 / (std::f64::consts::PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// Weight for a cloud radius in the 1/e convention: `exp(-r^2 / w^2)`.
#[inline]
pub fn gauss_1e(r2: f64, w: f64) -> f64 {
    (-r2 / (w * w)).exp()
}

/// Intensity weight for a laser beam radius in the 1/e^2 convention: `exp(-2 r^2 / w^2)`.
#[inline]
pub fn gauss_1e2(r2: f64, w: f64) -> f64 {
    (-2.0 * r2 / (w * w)).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    // Independent oracle: the same series summed in extended form with explicit factorials,
    // no shared code path with `series`.
    fn series_oracle(n: u32, x: f64) -> f64 {
        let mut s = 0.0;
        let mut fact_k = 1.0f64;
        for k in 0..40u32 {
            if k > 0 {
                fact_k *= k as f64;
            }
            let fact_kn: f64 = (1..=k + n).map(|i| i as f64).product();
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            s += sign * (x / 2.0).powi((2 * k + n) as i32) / (fact_k * fact_kn);
        }
        s
    }

    #[test]
    fn values_at_zero() {
        assert_eq!(j0(0.0), 1.0);
        assert_eq!(j1(0.0), 0.0);
    }

    #[test]
    fn first_root_of_j0() {
        // bisection on the oracle series
        let (mut lo, mut hi) = (2.0, 3.0);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if series_oracle(0, mid) > 0.0 {
                lo = mid
            } else {
                hi = mid
            }
        }
        assert!((lo - 2.404_825_557_695_773).abs() < 1e-12);
        assert!(j0(2.404826).abs() < 1e-6);
    }

    #[test]
    fn j1_reference_point() {
        assert!((j1(0.963) - series_oracle(1, 0.963)).abs() < 1e-14);
        assert!((j1(0.963) - 0.427_799_540_785_970).abs() < 1e-13, "{}", j1(0.963));
    }

    #[test]
    fn matches_oracle_on_domain() {
        for i in 0..=300 {
            let x = i as f64 * 0.01;
            assert!((j0(x) - series_oracle(0, x)).abs() < 1e-12, "J0({x})");
            assert!((j1(x) - series_oracle(1, x)).abs() < 1e-12, "J1({x})");
        }
    }

    #[test]
    fn asymptotic_branch_is_continuous() {
        // tabulated J0(10) = -0.2459357644513483, J1(10) = 0.04347274616886144
        assert!((j0(10.0) + 0.245_935_764_451_348_3).abs() < 1e-9);
        assert!((j1(10.0) - 0.043_472_746_168_861_44).abs() < 1e-9);
        let below = series(0, SERIES_LIMIT - 1e-9);
        let above = asymptotic(0, SERIES_LIMIT + 1e-9);
        assert!((below - above).abs() < 1e-8, "{below} {above}");
    }

    #[test]
    fn j1_is_minus_derivative_of_j0() {
        let h = 1e-5;
        for i in 0..=29 {
            let x = 0.1 + i as f64 * 0.1;
            let d = (j0(x + h) - j0(x - h)) / (2.0 * h);
            assert!((j1(x) + d).abs() < 1e-9, "x = {x}");
        }
    }

    #[test]
    fn domain_errors() {
        assert!(bessel_j(0, -0.1).is_err());
        assert!(bessel_j(2, 1.0).is_err());
        assert_eq!(bessel_j(1, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn gaussians_peak_at_one() {
        assert_eq!(gauss_1e(0.0, 1.1e-3), 1.0);
        assert_eq!(gauss_1e2(0.0, 7e-3), 1.0);
        assert!((gauss_1e(1.0, 1.0) - (-1.0f64).exp()).abs() < 1e-15);
        assert!((gauss_1e2(1.0, 1.0) - (-2.0f64).exp()).abs() < 1e-15);
        for i in 0..100 {
            let r = i as f64 * 1e-3;
            assert!(gauss_1e(r * r, 2e-3) >= 0.0 && gauss_1e2(r * r, 2e-3) >= 0.0);
        }
    }
}
