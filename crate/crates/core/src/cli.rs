//! Command-line front end.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use sha2::{Digest, Sha256};

use crate::analysis::{
    calibrate_amplitude, cluster_means, collisional_extrapolation, fit_linear_zero_crossing,
    fit_parabola_vertex, CalibrationOptions, Curvature, DensityPair, FitOptions, FitResult,
    WeightedPoint,
};
use crate::budget::{Budget, Rounding};
use crate::config::RunConfig;
use crate::dcp::{self, FeedConfig, FeedMode, PhaseField, PhaseMap};
use crate::error::{Error, Result};
use crate::lensing;
use crate::vec2::Vec2;

#[derive(Debug, Parser)]
#[command(name = "fountain-shift", version, about = "Microwave lensing and distributed cavity phase shifts of an atomic fountain clock")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone, Default)]
pub struct Common {
    /// Configuration file (`key = value` lines).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Override a configuration key, e.g. `--set w0_mm=1.2`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    pub set: Vec<String>,
    /// Output directory (overrides `output_dir`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Recoil frequency override in Hz (`nu_r_hz`).
    #[arg(long = "nu-r", global = true)]
    pub nu_r: Option<f64>,
    /// Random seed (`seed`).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Monte Carlo sample count (`samples`).
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Worker threads, 0 for all cores (`workers`).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Analytic and full lensing shift, optionally scanned over b2 or b1.
    Lensing {
        /// Second-pulse amplitude scan, `lo:hi:step` (inclusive) or a comma list.
        #[arg(long = "b2-scan")]
        b2_scan: Option<String>,
        /// First-pulse amplitude scan of δP at fixed b2.
        #[arg(long = "b1-scan")]
        b1_scan: Option<String>,
    },
    /// DCP tilt or offset scan for a toy or tabulated phase field.
    DcpScan(DcpScanArgs),
    /// Weighted zero crossing of a line through (x, y, sigma) points.
    TiltFit {
        points: PathBuf,
        /// Merge points within this x distance into weighted means before fitting.
        #[arg(long)]
        cluster: Option<f64>,
        /// Scale the covariance by chi2/dof.
        #[arg(long)]
        inflate: bool,
    },
    /// Weighted parabola vertex through (x, y, sigma) points.
    ParabolaFit {
        points: PathBuf,
        #[arg(long, value_enum, default_value_t = CurvatureArg::Either)]
        curvature: CurvatureArg,
        #[arg(long)]
        inflate: bool,
    },
    /// Drive-to-b scale from a (drive, contrast) scan.
    CalibrateB {
        scan: PathBuf,
        /// Expected b of the n = 1, 3, 5, ... maxima, comma separated.
        #[arg(long, conflicts_with = "model")]
        expected: Option<String>,
        /// Take the expected maxima from the cloud-averaged fringe amplitude of the configuration.
        #[arg(long)]
        model: bool,
    },
    /// Zero-density extrapolation of a high/low density frequency pair.
    Collisional {
        #[arg(long = "nu-high", allow_hyphen_values = true)]
        nu_high: f64,
        #[arg(long = "nu-low", allow_hyphen_values = true)]
        nu_low: f64,
        #[arg(long)]
        kappa: f64,
        #[arg(long = "kappa-rel-unc")]
        kappa_rel_unc: f64,
    },
    /// Uncertainty budget report.
    Budget {
        /// Budget CSV; defaults to the bundled uncertainty budget.
        file: Option<PathBuf>,
        /// Use the bundled DCP table.
        #[arg(long, conflicts_with_all = ["file", "table2"])]
        table1: bool,
        /// Use the bundled uncertainty budget.
        #[arg(long, conflicts_with = "file")]
        table2: bool,
        /// Type-A uncertainty in units of 1e-16, replacing the file's type-A rows.
        #[arg(long = "u-a")]
        u_a: Option<f64>,
        /// Rounding of the displayed totals.
        #[arg(long, value_enum, default_value_t = RoundingArg::Up)]
        rounding: RoundingArg,
    },
}

#[derive(Debug, Args)]
pub struct DcpScanArgs {
    /// Azimuthal order of the toy field.
    #[arg(long, default_value_t = 1)]
    pub m: u32,
    /// Phase amplitude in rad.
    #[arg(long, default_value_t = 1e-3)]
    pub amplitude: f64,
    /// Tabulated phase map instead of the toy profile.
    #[arg(long = "field-map")]
    pub field_map: Option<PathBuf>,
    /// Orientation of the cos(m φ) lobe, degrees.
    #[arg(long = "orientation-deg", default_value_t = 0.0)]
    pub orientation_deg: f64,
    /// Treat an m = 1 field as intrinsic to the cavity rather than feed driven.
    #[arg(long)]
    pub intrinsic: bool,
    #[arg(long, value_enum, default_value_t = ScanKind::Tilt)]
    pub scan: ScanKind,
    /// Scan values (mrad for tilt, mm for offset), `lo:hi:step` or a comma list.
    #[arg(long, allow_hyphen_values = true)]
    pub values: String,
    /// Scan direction, degrees from x.
    #[arg(long = "direction-deg", default_value_t = 0.0)]
    pub direction_deg: f64,
    /// Feed configuration for offset scans (tilt scans are always the φ = 0 / π differential).
    #[arg(long, value_enum, default_value_t = FeedArg::BothBalanced)]
    pub feed: FeedArg,
    #[arg(long = "amplitude-imbalance", default_value_t = 0.0)]
    pub amplitude_imbalance: f64,
    #[arg(long = "phase-imbalance", default_value_t = 0.0)]
    pub phase_imbalance: f64,
    /// Fit the zero crossing of the scan.
    #[arg(long = "fit-zero")]
    pub fit_zero: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ScanKind {
    Tilt,
    Offset,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FeedArg {
    BothBalanced,
    SinglePhi0,
    SinglePi,
    Imbalanced,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum CurvatureArg {
    Either,
    Max,
    Min,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum RoundingArg {
    Up,
    HalfEven,
}

/// Parses `lo:hi:step` (inclusive of `hi` up to rounding) or `a,b,c`.
pub fn parse_values(spec: &str) -> Result<Vec<f64>> {
    let bad = |why: &str| Error::Config {
        key: "values".into(),
        reason: format!("`{spec}`: {why}"),
    };
    let parse = |s: &str| s.trim().parse::<f64>().map_err(|_| bad("not a number"));
    let parts: Vec<&str> = spec.split(':').collect();
    let out = match parts.len() {
        1 => spec.split(',').map(parse).collect::<Result<Vec<_>>>()?,
        3 => {
            let (lo, hi, step) = (parse(parts[0])?, parse(parts[1])?, parse(parts[2])?);
            if !(step > 0.0) || hi < lo {
                return Err(bad("need lo <= hi and step > 0"));
            }
            let n = ((hi - lo) / step + 1e-9).floor() as usize + 1;
            (0..n).map(|i| lo + i as f64 * step).collect()
        }
        _ => return Err(bad("expected lo:hi:step or a comma list")),
    };
    if out.is_empty() || out.iter().any(|v| !v.is_finite()) {
        return Err(bad("no usable values"));
    }
    Ok(out)
}

/// Writes to stdout, ignoring a closed pipe.
fn emit(s: &str) {
    use std::io::Write;
    let _ = std::io::stdout().lock().write_all(s.as_bytes());
}

/// Nine significant digits in scientific notation.
pub fn sci(x: f64) -> String {
    format!("{x:.8e}")
}

fn resolve_config(common: &Common) -> Result<RunConfig> {
    let mut cfg = match &common.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    for kv in &common.set {
        let (k, v) = kv.split_once('=').ok_or_else(|| Error::Config {
            key: kv.clone(),
            reason: "expected KEY=VALUE".into(),
        })?;
        cfg.set(k.trim(), v.trim())?;
    }
    if let Some(nu) = common.nu_r {
        cfg.set("nu_r_hz", &nu.to_string())?;
    }
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    if let Some(n) = common.samples {
        cfg.samples = n;
    }
    if let Some(w) = common.workers {
        cfg.workers = w;
    }
    if let Some(o) = &common.out {
        cfg.output_dir = o.clone();
    }
    Ok(cfg)
}

/// Collects outputs of a run and writes them together with the manifest.
struct Run {
    cfg: RunConfig,
    command: String,
    files: Vec<(String, Vec<u8>)>,
    point_errors: usize,
}

impl Run {
    fn add(&mut self, name: &str, content: String) {
        self.files.push((name.to_string(), content.into_bytes()));
    }

    fn finish(self) -> Result<(PathBuf, usize)> {
        let dir = &self.cfg.output_dir;
        fs::create_dir_all(dir)?;
        let mut manifest = String::new();
        let _ = writeln!(manifest, "# fountain-shift run manifest");
        let _ = writeln!(manifest, "# version = {}", env!("CARGO_PKG_VERSION"));
        let _ = writeln!(manifest, "# command = {}", self.command);
        let ts = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        let _ = writeln!(manifest, "# timestamp_unix = {ts}");
        for (name, bytes) in &self.files {
            fs::write(dir.join(name), bytes)?;
            let digest = Sha256::digest(bytes);
            let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
            let _ = writeln!(manifest, "# output {name} sha256 = {hex}");
        }
        let _ = writeln!(manifest, "# resolved configuration (usable with --config)");
        manifest.push_str(&self.cfg.to_text());
        let path = dir.join("manifest.txt");
        fs::write(&path, manifest)?;
        Ok((path, self.point_errors))
    }
}

/// Runs the CLI; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let (cli, common) = match parse_args(args) {
        Ok(v) => v,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli, &common) {
        Ok(0) => 0,
        Ok(n) => {
            eprintln!("error: {n} scan point(s) failed; see the status column");
            1
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "fountain-shift", version, about = "Microwave lensing and distributed cavity phase shifts of an atomic fountain clock")]
struct Full {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

fn parse_args<I, T>(args: I) -> std::result::Result<(Cli, Common), clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let full = Full::try_parse_from(args)?;
    Ok((
        Cli {
            command: full.command,
        },
        full.common,
    ))
}

fn command_line() -> String {
    std::env::args().skip(1).collect::<Vec<_>>().join(" ")
}

fn dispatch(cli: Cli, common: &Common) -> Result<usize> {
    let cfg = resolve_config(common)?;
    let mut run = Run {
        cfg: cfg.clone(),
        command: command_line(),
        files: Vec::new(),
        point_errors: 0,
    };
    match cli.command {
        Command::Lensing { b2_scan, b1_scan } => cmd_lensing(&cfg, b2_scan, b1_scan, &mut run)?,
        Command::DcpScan(a) => cmd_dcp_scan(&cfg, &a, &mut run)?,
        Command::TiltFit {
            points,
            cluster,
            inflate,
        } => {
            let mut pts = read_points(&points)?;
            if let Some(tol) = cluster {
                pts = cluster_means(&pts, tol);
            }
            let fit = fit_linear_zero_crossing(&pts, FitOptions { inflate_chi2: inflate })?;
            emit_fit("tilt_fit", "x0", &pts, &fit, &mut run);
        }
        Command::ParabolaFit {
            points,
            curvature,
            inflate,
        } => {
            let pts = read_points(&points)?;
            let c = match curvature {
                CurvatureArg::Either => Curvature::Either,
                CurvatureArg::Max => Curvature::Maximum,
                CurvatureArg::Min => Curvature::Minimum,
            };
            let fit = fit_parabola_vertex(&pts, c, FitOptions { inflate_chi2: inflate })?;
            emit_fit("parabola_fit", "vertex", &pts, &fit, &mut run);
        }
        Command::CalibrateB {
            scan,
            expected,
            model,
        } => cmd_calibrate(&cfg, &scan, expected, model, &mut run)?,
        Command::Collisional {
            nu_high,
            nu_low,
            kappa,
            kappa_rel_unc,
        } => {
            let e = collisional_extrapolation(&DensityPair {
                nu_high,
                nu_low,
                kappa,
                kappa_rel_unc,
            })?;
            let mut s = String::new();
            let _ = writeln!(s, "delta_nu = {}", sci(nu_high - nu_low));
            let _ = writeln!(s, "kappa = {kappa}");
            let _ = writeln!(s, "corrected = {}", sci(e.corrected));
            let _ = writeln!(s, "type_b = {}", sci(e.type_b));
            emit(&s);
            run.add("collisional.txt", s);
        }
        Command::Budget {
            file,
            table1,
            table2: _,
            u_a,
            rounding,
        } => {
            let budget = if table1 {
                Budget::table1()
            } else if let Some(f) = file {
                Budget::load(&f)?
            } else {
                Budget::table2()
            };
            let r = match rounding {
                RoundingArg::Up => Rounding::Up,
                RoundingArg::HalfEven => Rounding::HalfEven,
            };
            let report = budget.report(u_a, r);
            emit(&report);
            run.add("budget_report.txt", report);
            run.add("budget_report.csv", budget.report_csv(u_a, r));
        }
    }
    let (manifest, errors) = run.finish()?;
    emit(&format!("manifest: {}\n", manifest.display()));
    Ok(errors)
}

fn cmd_lensing(cfg: &RunConfig, b2_scan: Option<String>, b1_scan: Option<String>, run: &mut Run) -> Result<()> {
    let lc = cfg.lensing_config()?;
    let f = &lc.fountain;
    let nu = f.constants.nu_clock;
    let t = f.timing.ramsey_time();
    let norm = std::f64::consts::PI * t * nu;
    let analytic = lensing::analytic_shift(&lc)?;
    let full = match lensing::full_shift(&lc) {
        Ok(r) => r,
        Err(Error::AccuracyNotReached { best, tolerance, estimate }) => {
            eprintln!("warning: quadrature estimate {estimate:e} above tolerance {tolerance:e}");
            run.point_errors += 1;
            *best
        }
        Err(e) => return Err(e),
    };
    let recoil = f.constants.recoil_fraction();
    let mut s = String::new();
    let _ = writeln!(s, "analytic shift (k^2 order, unbounded r1) = {}", sci(analytic));
    let _ = writeln!(s, "full shift term1 = {}", sci(full.shift_term1()));
    let _ = writeln!(s, "full shift term2 = {}", sci(full.shift_term2()));
    let _ = writeln!(s, "full shift total = {}", sci(full.shift_rel));
    let _ = writeln!(s, "quadrature error (relative) = {}", sci(full.quadrature_error));
    let _ = writeln!(s, "quadrature nodes = {}", full.nodes);
    let _ = writeln!(s, "fringe amplitude = {}", sci(full.fringe_amplitude));
    let _ = writeln!(s, "recoil shift nu_R/nu = {}", sci(recoil));
    if recoil > 0.0 {
        let _ = writeln!(s, "ratio total/(nu_R/nu) = {:.4}", full.shift_rel / recoil);
    } else {
        let _ = writeln!(s, "ratio total/(nu_R/nu) = n/a");
    }
    emit(&s);
    run.add("lensing_report.txt", s);

    if let Some(spec) = b2_scan {
        let b2s = parse_values(&spec)?;
        let mut csv = String::from("b2,term1,term2,total,fringe_amplitude,shift_rel,quadrature_error,status\n");
        for (b2, r) in lensing::amplitude_scan(&lc, &b2s) {
            let (res, status) = match r {
                Ok(r) => (Some(r), "ok".to_string()),
                Err(Error::AccuracyNotReached { best, .. }) => (Some(*best), "accuracy-not-reached".into()),
                Err(e) => (None, e.to_string().replace(',', ";")),
            };
            if status != "ok" {
                run.point_errors += 1;
            }
            match res {
                Some(r) => {
                    let _ = writeln!(
                        csv,
                        "{},{},{},{},{},{},{},{status}",
                        sci(b2),
                        sci(r.delta_p_term1 / norm),
                        sci(r.delta_p_term2 / norm),
                        sci(r.delta_p() / norm),
                        sci(r.fringe_amplitude),
                        sci(r.shift_rel),
                        sci(r.quadrature_error)
                    );
                }
                None => {
                    let _ = writeln!(csv, "{},NaN,NaN,NaN,NaN,NaN,NaN,{status}", sci(b2));
                }
            }
        }
        run.add("lensing_b2_scan.csv", csv);
    }
    if let Some(spec) = b1_scan {
        let b1s = parse_values(&spec)?;
        let mut csv = String::from("b1,delta_p\n");
        for (b1, dp) in lensing::b1_response(&lc, &b1s)? {
            let _ = writeln!(csv, "{},{}", sci(b1), sci(dp));
        }
        run.add("lensing_b1_scan.csv", csv);
    }
    Ok(())
}

fn cmd_dcp_scan(cfg: &RunConfig, a: &DcpScanArgs, run: &mut Run) -> Result<()> {
    let dc = cfg.dcp_config()?;
    let field = match &a.field_map {
        Some(p) => PhaseField::from_map(PhaseMap::load(p)?, a.amplitude),
        None => PhaseField::toy(a.m, a.amplitude, &dc.fountain.geometry)?,
    }
    .with_orientation(a.orientation_deg.to_radians());
    let field = if a.intrinsic { field.with_feed_driven(false) } else { field };
    let values = parse_values(&a.values)?;
    let dir = Vec2::polar(1.0, a.direction_deg.to_radians());
    let mut points = Vec::new();
    let mut csv;
    match a.scan {
        ScanKind::Tilt => {
            csv = String::from("tilt_mrad,shift_rel,stat_err,status\n");
            let tilts: Vec<f64> = values.iter().map(|v| v * 1e-3).collect();
            for (t, r) in dcp::tilt_scan(&dc, &field, dir, &tilts) {
                match r {
                    Ok(d) => {
                        let _ = writeln!(csv, "{},{},{},ok", sci(t * 1e3), sci(d.shift_rel), sci(d.stat_err));
                        points.push(WeightedPoint::new(t * 1e3, d.shift_rel, d.stat_err));
                    }
                    Err(e) => {
                        run.point_errors += 1;
                        let _ = writeln!(csv, "{},NaN,NaN,{}", sci(t * 1e3), e.to_string().replace(',', ";"));
                    }
                }
            }
        }
        ScanKind::Offset => {
            let feed = FeedConfig {
                mode: match a.feed {
                    FeedArg::BothBalanced => FeedMode::BothBalanced,
                    FeedArg::SinglePhi0 => FeedMode::SinglePhi0,
                    FeedArg::SinglePi => FeedMode::SinglePi,
                    FeedArg::Imbalanced => FeedMode::Imbalanced,
                },
                amplitude_imbalance: a.amplitude_imbalance,
                phase_imbalance: a.phase_imbalance,
            };
            csv = String::from("offset_mm,delta_p,shift_rel,stat_err,detected_fraction,status\n");
            let offsets: Vec<f64> = values.iter().map(|v| v * 1e-3).collect();
            for (d, r) in dcp::offset_scan(&dc, &field, &feed, dir, &offsets) {
                match r {
                    Ok(r) => {
                        let _ = writeln!(
                            csv,
                            "{},{},{},{},{},ok",
                            sci(d * 1e3),
                            sci(r.delta_p),
                            sci(r.shift_rel),
                            sci(r.shift_stat_err),
                            sci(r.detected_fraction)
                        );
                        points.push(WeightedPoint::new(d * 1e3, r.shift_rel, r.shift_stat_err));
                    }
                    Err(e) => {
                        run.point_errors += 1;
                        let _ = writeln!(csv, "{},NaN,NaN,NaN,NaN,{}", sci(d * 1e3), e.to_string().replace(',', ";"));
                    }
                }
            }
        }
    }
    emit(&csv);
    let name = match a.scan {
        ScanKind::Tilt => "dcp_tilt_scan.csv",
        ScanKind::Offset => "dcp_offset_scan.csv",
    };
    run.add(name, csv);
    if a.fit_zero {
        // a point that cancels exactly (zero tilt at zero offset) reports a rounding-level
        // error; cap its weight relative to the noisiest point
        let floor = 1e-9 * points.iter().map(|p| p.sigma).fold(0.0, f64::max);
        if !(floor > 0.0) {
            return Err(Error::invalid("fit-zero", "scan points without statistical error cannot be fitted"));
        }
        for p in &mut points {
            p.sigma = p.sigma.max(floor);
        }
        let fit = fit_linear_zero_crossing(&points, FitOptions::default())?;
        emit_fit("dcp_zero_fit", "x0", &points, &fit, run);
    }
    Ok(())
}

fn cmd_calibrate(cfg: &RunConfig, scan: &Path, expected: Option<String>, model: bool, run: &mut Run) -> Result<()> {
    let pts = read_points(scan)?;
    let data: Vec<(f64, f64)> = pts.iter().map(|p| (p.x, p.y)).collect();
    let expected: Option<Vec<f64>> = if model {
        let lc = cfg.lensing_config()?;
        Some(lensing::contrast_maxima(&lc, &[1, 3, 5, 7, 9])?)
    } else {
        expected.map(|e| parse_values(&e)).transpose()?
    };
    let cal = calibrate_amplitude(&data, expected.as_deref(), &CalibrationOptions::default())?;
    let mut s = String::new();
    let _ = writeln!(s, "scale = {}", sci(cal.scale));
    let _ = writeln!(s, "residual_rms = {}", sci(cal.residual_rms));
    for (n, d, e) in &cal.maxima {
        let _ = writeln!(s, "maximum n={n} drive = {} expected_b = {} fitted_b = {}", sci(*d), sci(*e), sci(cal.scale * d));
    }
    emit(&s);
    run.add("calibration.txt", s);
    Ok(())
}

fn emit_fit(stem: &str, root_name: &str, pts: &[WeightedPoint], fit: &FitResult, run: &mut Run) {
    let mut s = String::new();
    let _ = writeln!(s, "{root_name} = {}", sci(fit.root));
    let _ = writeln!(s, "sigma_{root_name} = {}", sci(fit.root_sigma));
    for (i, p) in fit.params.iter().enumerate() {
        let _ = writeln!(s, "p{i} = {}", sci(*p));
        let _ = writeln!(s, "sigma_p{i} = {}", sci(fit.covariance[i][i].sqrt()));
    }
    let _ = writeln!(s, "chi2 = {}", sci(fit.chi2));
    let _ = writeln!(s, "dof = {}", fit.dof);
    emit(&s);
    run.add(&format!("{stem}.txt"), s);
    let mut csv = String::from("x,y,sigma,residual\n");
    for (p, r) in pts.iter().zip(&fit.residuals) {
        let _ = writeln!(csv, "{},{},{},{}", sci(p.x), sci(p.y), sci(p.sigma), sci(*r));
    }
    run.add(&format!("{stem}_residuals.csv"), csv);
}

/// Reads `x,y[,sigma]` rows. A non-numeric first row is a header; `#` starts a comment.
/// Missing sigma defaults to 1.
pub fn read_points(path: &Path) -> Result<Vec<WeightedPoint>> {
    let text = fs::read_to_string(path)?;
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line()) as usize;
            Error::parse(path, line, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line()) as usize;
        let vals: std::result::Result<Vec<f64>, _> = rec.iter().map(str::parse::<f64>).collect();
        let vals = match vals {
            Ok(v) => v,
            Err(_) if i == 0 => continue,
            Err(_) => return Err(Error::parse(path, line, "non-numeric value")),
        };
        let p = match vals.as_slice() {
            [x, y] => WeightedPoint::new(*x, *y, 1.0),
            [x, y, s, ..] => WeightedPoint::new(*x, *y, *s),
            _ => return Err(Error::parse(path, line, "expected x,y[,sigma]")),
        };
        out.push(p);
    }
    Ok(out)
}
