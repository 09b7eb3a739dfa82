//! Weighted polynomial fits: zero crossing of a line and vertex of a parabola.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedPoint {
    pub x: f64,
    pub y: f64,
    pub sigma: f64,
}

impl WeightedPoint {
    pub fn new(x: f64, y: f64, sigma: f64) -> Self {
        Self { x, y, sigma }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct FitOptions {
    /// Scale the covariance by χ²/dof (Birge ratio squared) when dof > 0.
    pub inflate_chi2: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Curvature {
    #[default]
    Either,
    /// Expect a maximum (negative quadratic coefficient).
    Maximum,
    Minimum,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    /// Polynomial coefficients, constant term first.
    pub params: Vec<f64>,
    pub covariance: Vec<Vec<f64>>,
    pub chi2: f64,
    pub dof: usize,
    /// Zero crossing (line) or vertex (parabola).
    pub root: f64,
    pub root_sigma: f64,
    /// `y - model(x)` per input point.
    pub residuals: Vec<f64>,
}

impl FitResult {
    pub fn chi2_per_dof(&self) -> f64 {
        if self.dof == 0 {
            f64::NAN
        } else {
            self.chi2 / self.dof as f64
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.params.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }
}

/// Coefficients and covariance in the scaled variable `t = (x - centre) / scale`.
struct Scaled {
    c: Vec<f64>,
    cov: Vec<Vec<f64>>,
    centre: f64,
    scale: f64,
    chi2: f64,
    dof: usize,
}

fn check_points(points: &[WeightedPoint], min: usize) -> Result<()> {
    if points.len() < min {
        return Err(Error::invalid("points", format!("need at least {min} points")));
    }
    for p in points {
        if !(p.x.is_finite() && p.y.is_finite()) {
            return Err(Error::invalid("points", "coordinates must be finite"));
        }
        if !(p.sigma > 0.0 && p.sigma.is_finite()) {
            return Err(Error::invalid("sigma", format!("must be positive, got {}", p.sigma)));
        }
    }
    let mut xs: Vec<f64> = points.iter().map(|p| p.x).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    if xs.len() < min {
        return Err(Error::invalid("points", format!("need at least {min} distinct x values")));
    }
    Ok(())
}

fn weighted_polyfit(points: &[WeightedPoint], degree: usize, opts: FitOptions) -> Result<Scaled> {
    let n = degree + 1;
    let (lo, hi) = points
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), p| (l.min(p.x), h.max(p.x)));
    let centre = 0.5 * (lo + hi);
    let scale = 0.5 * (hi - lo);

    let mut a = vec![vec![0.0; n]; n];
    let mut b = vec![0.0; n];
    for p in points {
        let t = (p.x - centre) / scale;
        let w = 1.0 / (p.sigma * p.sigma);
        let basis: Vec<f64> = (0..n).map(|j| t.powi(j as i32)).collect();
        for i in 0..n {
            b[i] += w * basis[i] * p.y;
            for j in 0..n {
                a[i][j] += w * basis[i] * basis[j];
            }
        }
    }
    let mut cov = invert(&a)?;
    let c: Vec<f64> = (0..n).map(|i| (0..n).map(|j| cov[i][j] * b[j]).sum()).collect();
    let chi2: f64 = points
        .iter()
        .map(|p| {
            let t = (p.x - centre) / scale;
            let m = c.iter().rev().fold(0.0, |acc, ci| acc * t + ci);
            ((p.y - m) / p.sigma).powi(2)
        })
        .sum();
    let dof = points.len() - n;
    if opts.inflate_chi2 && dof > 0 {
        let f = chi2 / dof as f64;
        for row in &mut cov {
            for v in row {
                *v *= f;
            }
        }
    }
    Ok(Scaled {
        c,
        cov,
        centre,
        scale,
        chi2,
        dof,
    })
}

/// Inverse of a symmetric positive matrix: unit-diagonal equilibration, then Gauss-Jordan
/// elimination with partial pivoting.
fn invert(a: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let n = a.len();
    let d: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    if d.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
        return Err(Error::Singular);
    }
    let d: Vec<f64> = d.iter().map(|v| 1.0 / v.sqrt()).collect();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r: Vec<f64> = row.iter().enumerate().map(|(j, v)| v * d[i] * d[j]).collect();
            r.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            r
        })
        .collect();
    let norm = m.iter().flat_map(|r| &r[..n]).fold(0.0f64, |acc, v| acc.max(v.abs()));
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .unwrap();
        if m[piv][col].abs() <= 1e-14 * norm {
            return Err(Error::Singular);
        }
        m.swap(col, piv);
        let d = m[col][col];
        for v in &mut m[col] {
            *v /= d;
        }
        for r in 0..n {
            if r != col {
                let f = m[r][col];
                if f != 0.0 {
                    for k in 0..2 * n {
                        m[r][k] -= f * m[col][k];
                    }
                }
            }
        }
    }
    Ok(m
        .into_iter()
        .enumerate()
        .map(|(i, r)| r[n..].iter().enumerate().map(|(j, v)| v * d[i] * d[j]).collect())
        .collect())
}

/// Polynomial in `t = (x - c)/s` rewritten in powers of `x`, with the covariance carried by
/// the same linear map.
fn unscale(s: &Scaled) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = s.c.len();
    // m[k][j]: coefficient of x^k contributed by t^j
    let mut m = vec![vec![0.0; n]; n];
    for j in 0..n {
        // ((x - c)/s)^j = s^-j Σ_k C(j,k) x^k (-c)^(j-k)
        let mut binom = 1.0;
        for k in 0..=j {
            m[k][j] = binom * (-s.centre).powi((j - k) as i32) / s.scale.powi(j as i32);
            binom = binom * (j - k) as f64 / (k + 1) as f64;
        }
    }
    let p: Vec<f64> = (0..n).map(|k| (0..n).map(|j| m[k][j] * s.c[j]).sum()).collect();
    let mut cov = vec![vec![0.0; n]; n];
    for a in 0..n {
        for b in 0..n {
            let mut v = 0.0;
            for i in 0..n {
                for j in 0..n {
                    v += m[a][i] * s.cov[i][j] * m[b][j];
                }
            }
            cov[a][b] = v;
        }
    }
    (p, cov)
}

fn residuals(points: &[WeightedPoint], params: &[f64]) -> Vec<f64> {
    points
        .iter()
        .map(|p| p.y - params.iter().rev().fold(0.0, |acc, c| acc * p.x + c))
        .collect()
}

/// Weighted straight line `y = p0 + p1 x` and its zero crossing `x0 = -p0/p1`.
pub fn fit_linear_zero_crossing(points: &[WeightedPoint], opts: FitOptions) -> Result<FitResult> {
    check_points(points, 2)?;
    let s = weighted_polyfit(points, 1, opts)?;
    let (c0, c1) = (s.c[0], s.c[1]);
    let sig1 = s.cov[1][1].sqrt();
    if c1.abs() <= sig1 {
        return Err(Error::SlopeDegenerate {
            slope: c1 / s.scale,
            sigma: sig1 / s.scale,
        });
    }
    let t0 = -c0 / c1;
    let var_t0 = (s.cov[0][0] + 2.0 * t0 * s.cov[0][1] + t0 * t0 * s.cov[1][1]) / (c1 * c1);
    let (params, covariance) = unscale(&s);
    Ok(FitResult {
        residuals: residuals(points, &params),
        params,
        covariance,
        chi2: s.chi2,
        dof: s.dof,
        root: s.centre + s.scale * t0,
        root_sigma: s.scale * var_t0.max(0.0).sqrt(),
    })
}

/// Weighted parabola `y = p0 + p1 x + p2 x²` and its vertex `-p1 / (2 p2)`.
pub fn fit_parabola_vertex(
    points: &[WeightedPoint],
    curvature: Curvature,
    opts: FitOptions,
) -> Result<FitResult> {
    check_points(points, 3)?;
    let s = weighted_polyfit(points, 2, opts)?;
    let (c1, c2) = (s.c[1], s.c[2]);
    let sig2 = s.cov[2][2].sqrt();
    if c2.abs() <= sig2 || c2 == 0.0 {
        let k = s.scale * s.scale;
        return Err(Error::VertexUndetermined {
            curvature: c2 / k,
            sigma: sig2 / k,
        });
    }
    match curvature {
        Curvature::Maximum if c2 > 0.0 => {
            return Err(Error::invalid("points", "fitted parabola opens upward, expected a maximum"))
        }
        Curvature::Minimum if c2 < 0.0 => {
            return Err(Error::invalid("points", "fitted parabola opens downward, expected a minimum"))
        }
        _ => {}
    }
    let tv = -c1 / (2.0 * c2);
    let g1 = -1.0 / (2.0 * c2);
    let g2 = c1 / (2.0 * c2 * c2);
    let var = g1 * g1 * s.cov[1][1] + 2.0 * g1 * g2 * s.cov[1][2] + g2 * g2 * s.cov[2][2];
    let (params, covariance) = unscale(&s);
    Ok(FitResult {
        residuals: residuals(points, &params),
        params,
        covariance,
        chi2: s.chi2,
        dof: s.dof,
        root: s.centre + s.scale * tv,
        root_sigma: s.scale * var.max(0.0).sqrt(),
    })
}

/// Collapse points whose abscissae lie within `tolerance` of the first point of a group into
/// their weighted mean.
pub fn cluster_means(points: &[WeightedPoint], tolerance: f64) -> Vec<WeightedPoint> {
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| a.x.total_cmp(&b.x));
    let mut out = Vec::new();
    let mut i = 0;
    while i < sorted.len() {
        let x_start = sorted[i].x;
        let mut j = i;
        let (mut sw, mut swx, mut swy) = (0.0, 0.0, 0.0);
        while j < sorted.len() && sorted[j].x - x_start <= tolerance {
            let w = 1.0 / (sorted[j].sigma * sorted[j].sigma);
            sw += w;
            swx += w * sorted[j].x;
            swy += w * sorted[j].y;
            j += 1;
        }
        out.push(WeightedPoint::new(swx / sw, swy / sw, 1.0 / sw.sqrt()));
        i = j;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(v: &[(f64, f64, f64)]) -> Vec<WeightedPoint> {
        v.iter().map(|&(x, y, s)| WeightedPoint::new(x, y, s)).collect()
    }

    #[test]
    fn symmetric_line() {
        for eps in [1e-3, 1e-1] {
            let r = fit_linear_zero_crossing(&pts(&[(-1.0, -2.0, eps), (1.0, 2.0, eps)]), FitOptions::default())
                .unwrap();
            assert!(r.root.abs() < 1e-15);
            // sigma_x0 = sigma_p0 / |p1| = (eps / sqrt 2) / 2
            assert!((r.root_sigma - eps / (2.0 * 2f64.sqrt())).abs() < 1e-12 * eps.max(1.0));
            assert!(r.chi2 < 1e-20);
            assert!((r.params[1] - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn exact_parabola() {
        let r = fit_parabola_vertex(
            &pts(&[(0.0, 4.0, 0.1), (1.0, 5.0, 0.1), (2.0, 4.0, 0.1)]),
            Curvature::Maximum,
            FitOptions::default(),
        )
        .unwrap();
        assert!((r.root - 1.0).abs() < 1e-14);
        assert!((r.params[2] + 1.0).abs() < 1e-12);
        assert!((r.params[1] - 2.0).abs() < 1e-12);
        assert!((r.params[0] - 4.0).abs() < 1e-12);
        assert!(r.chi2 < 1e-20);
        assert!(fit_parabola_vertex(
            &pts(&[(0.0, 4.0, 0.1), (1.0, 5.0, 0.1), (2.0, 4.0, 0.1)]),
            Curvature::Minimum,
            FitOptions::default()
        )
        .is_err());
    }

    #[test]
    fn degenerate_inputs() {
        let flat = pts(&[(-1.0, 0.1, 1.0), (0.0, -0.1, 1.0), (1.0, 0.05, 1.0)]);
        assert!(matches!(
            fit_linear_zero_crossing(&flat, FitOptions::default()),
            Err(Error::SlopeDegenerate { .. })
        ));
        let line = pts(&[(0.0, 1.0, 0.1), (1.0, 2.0, 0.1), (2.0, 3.0, 0.1), (3.0, 4.0, 0.1)]);
        assert!(matches!(
            fit_parabola_vertex(&line, Curvature::Either, FitOptions::default()),
            Err(Error::VertexUndetermined { .. })
        ));
        assert!(fit_linear_zero_crossing(&pts(&[(1.0, 1.0, 0.1), (1.0, 2.0, 0.1)]), FitOptions::default()).is_err());
        assert!(fit_linear_zero_crossing(&pts(&[(0.0, 1.0, 0.0), (1.0, 2.0, 0.1)]), FitOptions::default()).is_err());
    }

    #[test]
    fn covariance_is_symmetric_psd() {
        let p = pts(&[(0.0, 1.0, 0.2), (1.0, 2.9, 0.1), (2.5, 3.8, 0.3), (4.0, 5.5, 0.2)]);
        let r = fit_parabola_vertex(&p, Curvature::Either, FitOptions::default());
        let r = match r {
            Ok(r) => r,
            Err(_) => fit_linear_zero_crossing(&p, FitOptions::default()).unwrap(),
        };
        let c = &r.covariance;
        for i in 0..c.len() {
            assert!(c[i][i] >= 0.0);
            for j in 0..c.len() {
                assert!((c[i][j] - c[j][i]).abs() <= 1e-12 * (c[i][i] * c[j][j]).sqrt());
                assert!(c[i][j].powi(2) <= c[i][i] * c[j][j] * (1.0 + 1e-9));
            }
        }
    }

    #[test]
    fn inflation_scales_sigma_by_birge_ratio() {
        let p = pts(&[(-2.0, -4.3, 0.1), (-1.0, -1.7, 0.1), (1.0, 2.4, 0.1), (2.0, 3.8, 0.1)]);
        let plain = fit_linear_zero_crossing(&p, FitOptions::default()).unwrap();
        let infl = fit_linear_zero_crossing(&p, FitOptions { inflate_chi2: true }).unwrap();
        let ratio = infl.root_sigma / plain.root_sigma;
        assert!((ratio - plain.chi2_per_dof().sqrt()).abs() < 1e-12);
        assert_eq!(infl.root, plain.root);
    }

    #[test]
    fn clusters() {
        let p = pts(&[(-2.5, 1.0, 1.0), (-2.4, 3.0, 1.0), (2.5, 0.0, 2.0), (2.6, 0.0, 2.0)]);
        let c = cluster_means(&p, 0.5);
        assert_eq!(c.len(), 2);
        assert!((c[0].y - 2.0).abs() < 1e-15);
        assert!((c[0].sigma - 1.0 / 2f64.sqrt()).abs() < 1e-15);
        assert!((c[1].x - 2.55).abs() < 1e-12);
    }
}
