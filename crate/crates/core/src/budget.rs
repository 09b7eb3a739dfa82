//! Uncertainty budgets: quadrature combination of shift and uncertainty entries, the
//! sensitivity products used to size individual entries, and fixed-width text reports.
//!
//! Entries hold their values in units of 1e-16 exactly as read from the budget file, so a
//! budget written out and read back gives bit-identical totals.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

/// Unit in which budget files and reports express fractional frequencies.
pub const UNIT: f64 = 1e-16;

pub const TABLE1_CSV: &str = include_str!("../data/table1.csv");
pub const TABLE2_CSV: &str = include_str!("../data/table2.csv");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    TypeA,
    TypeB,
}

impl Kind {
    fn label(self) -> &'static str {
        match self {
            Kind::TypeA => "A",
            Kind::TypeB => "B",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UncertaintyEntry {
    pub name: String,
    /// Fractional shift in units of 1e-16, if the entry carries one.
    pub shift_1e16: Option<f64>,
    /// Standard uncertainty in units of 1e-16.
    pub unc_1e16: f64,
    pub kind: Kind,
    /// Entries sharing a label are fully correlated; `None` is a group of its own.
    pub group: Option<String>,
}

impl UncertaintyEntry {
    pub fn new(name: impl Into<String>, shift_1e16: Option<f64>, unc_1e16: f64, kind: Kind) -> Self {
        Self {
            name: name.into(),
            shift_1e16,
            unc_1e16,
            kind,
            group: None,
        }
    }

    pub fn with_group(mut self, group: impl Into<String>) -> Self {
        self.group = Some(group.into());
        self
    }

    pub fn shift(&self) -> f64 {
        self.shift_1e16.unwrap_or(0.0) * UNIT
    }

    pub fn uncertainty(&self) -> f64 {
        self.unc_1e16 * UNIT
    }
}

/// Combined shift and uncertainty, in units of 1e-16.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Combined {
    pub shift_1e16: f64,
    pub unc_1e16: f64,
}

/// Shifts add; uncertainties add linearly inside a correlation group and in quadrature
/// across groups.
pub fn combine_quadrature(entries: &[UncertaintyEntry]) -> Combined {
    let mut groups: BTreeMap<&str, f64> = BTreeMap::new();
    let mut sum_sq = 0.0;
    for e in entries {
        match &e.group {
            Some(g) => *groups.entry(g.as_str()).or_insert(0.0) += e.unc_1e16,
            None => sum_sq += e.unc_1e16 * e.unc_1e16,
        }
    }
    sum_sq += groups.values().map(|u| u * u).sum::<f64>();
    Combined {
        shift_1e16: entries.iter().filter_map(|e| e.shift_1e16).sum(),
        unc_1e16: sum_sq.sqrt(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Totals {
    pub u_b: f64,
    pub u_a: f64,
    pub total: f64,
}

/// Type-B total of `entries` and the grand total with `u_a`, all in units of 1e-16.
pub fn table2_totals(entries: &[UncertaintyEntry], u_a_1e16: f64) -> Totals {
    let b: Vec<UncertaintyEntry> = entries.iter().filter(|e| e.kind == Kind::TypeB).cloned().collect();
    let u_b = combine_quadrature(&b).unc_1e16;
    Totals {
        u_b,
        u_a: u_a_1e16,
        total: u_b.hypot(u_a_1e16),
    }
}

/// `tilt_unc · sqrt(sensitivity² + sensitivity_unc²)`; sensitivities per mrad, tilt in mrad.
pub fn tilt_sensitivity_uncertainty(sensitivity: f64, sensitivity_unc: f64, tilt_unc: f64) -> Result<f64> {
    if !(tilt_unc >= 0.0) {
        return Err(Error::invalid("tilt_unc", "must be non-negative"));
    }
    Ok(tilt_unc * sensitivity.hypot(sensitivity_unc))
}

/// Root-sum-square of independent position uncertainties.
pub fn offset_uncertainty(components: &[f64]) -> Result<f64> {
    if components.iter().any(|c| !(*c >= 0.0)) {
        return Err(Error::invalid("components", "must be non-negative"));
    }
    Ok(components.iter().map(|c| c * c).sum::<f64>().sqrt())
}

/// Half the magnitude of a correction, the policy for calculated but unobserved shifts.
pub fn halve_as_uncertainty(shift: f64) -> f64 {
    0.5 * shift.abs()
}

/// Tilt equivalent to a lateral offset at lever arm `l_det`.
pub fn offset_to_tilt(offset: f64, l_det: f64) -> Result<f64> {
    if !(l_det > 0.0) {
        return Err(Error::invalid("l_det", "must be positive"));
    }
    Ok(offset / l_det)
}

/// Display rounding. Intermediate values are quoted to the nearest digit; final budget
/// totals are rounded up, the conservative convention for a combined standard uncertainty.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Rounding {
    /// Round half to even.
    #[default]
    HalfEven,
    /// Round away from zero.
    Up,
}

/// `x` rounded to `digits` significant figures.
pub fn round_sig(x: f64, digits: u32, mode: Rounding) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let e = x.abs().log10().floor() as i32;
    let p = digits as i32 - 1 - e;
    let scale = 10f64.powi(p.abs());
    let y = if p >= 0 { x * scale } else { x / scale };
    let r = match mode {
        Rounding::HalfEven => y.round_ties_even(),
        // tolerate representation error so 0.77000000001 stays 0.77
        Rounding::Up => (y.abs() - 1e-9).ceil().copysign(y),
    };
    if p >= 0 {
        r / scale
    } else {
        r * scale
    }
}

/// Formats `x` to `digits` significant figures without exponent.
pub fn format_sig(x: f64, digits: u32, mode: Rounding) -> String {
    let r = round_sig(x, digits, mode);
    if r == 0.0 {
        return format!("{:.*}", digits.saturating_sub(1) as usize, 0.0);
    }
    let e = r.abs().log10().floor() as i32;
    let decimals = (digits as i32 - 1 - e).max(0) as usize;
    format!("{r:.decimals$}")
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Budget {
    pub entries: Vec<UncertaintyEntry>,
}

impl Budget {
    pub fn new(entries: Vec<UncertaintyEntry>) -> Self {
        Self { entries }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text, path)
    }

    /// Reads `name,shift_1e16,unc_1e16,kind,group` rows; `#` lines are comments.
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .flexible(true)
            .from_reader(text.as_bytes());
        let header_line = rdr.position().line();
        let headers = rdr
            .headers()
            .map_err(|e| Error::parse(path, header_line.max(1) as usize, e.to_string()))?
            .clone();
        let expected = ["name", "shift_1e16", "unc_1e16", "kind", "group"];
        if headers.len() < 4 || headers.iter().zip(expected).any(|(h, e)| h != e) {
            return Err(Error::parse(
                path,
                1,
                format!("expected header `{}`", expected.join(",")),
            ));
        }
        let mut entries = Vec::new();
        for rec in rdr.records() {
            let rec = rec.map_err(|e| {
                let line = e.position().map_or(0, |p| p.line()) as usize;
                Error::parse(path, line, e.to_string())
            })?;
            let line = rec.position().map_or(0, |p| p.line()) as usize;
            let field = |i: usize| rec.get(i).unwrap_or("");
            let number = |i: usize, what: &str| -> Result<f64> {
                field(i)
                    .parse::<f64>()
                    .map_err(|_| Error::parse(path, line, format!("bad {what} `{}`", field(i))))
            };
            if rec.len() < 4 {
                return Err(Error::parse(path, line, "expected at least 4 columns"));
            }
            let name = field(0).to_string();
            if name.is_empty() {
                return Err(Error::parse(path, line, "empty name"));
            }
            let shift_1e16 = if field(1).is_empty() {
                None
            } else {
                Some(number(1, "shift")?)
            };
            let unc_1e16 = number(2, "uncertainty")?;
            if !(unc_1e16 >= 0.0) || !unc_1e16.is_finite() {
                return Err(Error::parse(path, line, "uncertainty must be non-negative"));
            }
            let kind = match field(3) {
                "A" | "a" | "typeA" => Kind::TypeA,
                "B" | "b" | "typeB" => Kind::TypeB,
                other => return Err(Error::parse(path, line, format!("unknown kind `{other}`"))),
            };
            let group = Some(field(4).to_string()).filter(|g| !g.is_empty());
            entries.push(UncertaintyEntry {
                name,
                shift_1e16,
                unc_1e16,
                kind,
                group,
            });
        }
        Ok(Self { entries })
    }

    pub fn table1() -> Self {
        Self::parse(TABLE1_CSV, Path::new("table1.csv")).expect("bundled table1.csv is valid")
    }

    pub fn table2() -> Self {
        Self::parse(TABLE2_CSV, Path::new("table2.csv")).expect("bundled table2.csv is valid")
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["name", "shift_1e16", "unc_1e16", "kind", "group"])
            .expect("in-memory write");
        for e in &self.entries {
            let shift = e.shift_1e16.map(|s| s.to_string()).unwrap_or_default();
            w.write_record([
                e.name.as_str(),
                shift.as_str(),
                &e.unc_1e16.to_string(),
                e.kind.label(),
                e.group.as_deref().unwrap_or(""),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 output")
    }

    fn of_kind(&self, kind: Kind) -> Vec<UncertaintyEntry> {
        self.entries.iter().filter(|e| e.kind == kind).cloned().collect()
    }

    /// Totals in units of 1e-16. `u_a_override` replaces the type-A entries.
    pub fn totals(&self, u_a_override: Option<f64>) -> Totals {
        let u_a = u_a_override.unwrap_or_else(|| combine_quadrature(&self.of_kind(Kind::TypeA)).unc_1e16);
        table2_totals(&self.entries, u_a)
    }

    pub fn shift_total(&self) -> Option<f64> {
        if self.entries.iter().all(|e| e.shift_1e16.is_none()) {
            None
        } else {
            Some(combine_quadrature(&self.entries).shift_1e16)
        }
    }

    /// Aligned text table. Totals are shown rounded with `rounding` and at full precision
    /// in brackets.
    pub fn report(&self, u_a_override: Option<f64>, rounding: Rounding) -> String {
        let t = self.totals(u_a_override);
        let width = self.entries.iter().map(|e| e.name.len()).max().unwrap_or(0).max(24);
        let mut s = String::new();
        let _ = writeln!(s, "{:<width$}  {:>12}  {:>12}", "effect", "shift/1e-16", "unc/1e-16");
        for e in &self.entries {
            let shift = e.shift_1e16.map(|v| v.to_string()).unwrap_or_else(|| "-".into());
            let _ = writeln!(
                s,
                "{:<width$}  {:>12}  {:>12}  {}",
                e.name,
                shift,
                e.unc_1e16,
                e.kind.label()
            );
        }
        let _ = writeln!(s, "{}", "-".repeat(width + 30));
        if let Some(sh) = self.shift_total() {
            let c = combine_quadrature(&self.entries);
            let _ = writeln!(
                s,
                "{:<width$}  {:>12}  {:>12}  ({sh:.4}, {:.4})",
                "total",
                format_sig(sh, 3, rounding),
                format_sig(c.unc_1e16, 3, rounding),
                c.unc_1e16
            );
        }
        if u_a_override.is_none() && self.of_kind(Kind::TypeA).is_empty() {
            return s;
        }
        let _ = writeln!(
            s,
            "{:<width$}  {:>12}  {:>12}  ({:.4})",
            "uB (1 sigma)",
            "",
            format_sig(t.u_b, 2, rounding),
            t.u_b
        );
        let _ = writeln!(
            s,
            "{:<width$}  {:>12}  {:>12}  ({:.4})",
            "uA (1 sigma)",
            "",
            format_sig(t.u_a, 2, rounding),
            t.u_a
        );
        let _ = writeln!(
            s,
            "{:<width$}  {:>12}  {:>12}  ({:.4})",
            "Total uncertainty",
            "",
            format_sig(t.total, 2, rounding),
            t.total
        );
        s
    }

    /// CSV twin of `report`: one row per entry, then the totals.
    pub fn report_csv(&self, u_a_override: Option<f64>, rounding: Rounding) -> String {
        let t = self.totals(u_a_override);
        let mut w = csv::Writer::from_writer(Vec::new());
        let _ = w.write_record(["name", "shift_1e16", "unc_1e16", "kind", "unc_rounded"]);
        for e in &self.entries {
            let shift = e.shift_1e16.map(|v| v.to_string()).unwrap_or_default();
            let _ = w.write_record([
                e.name.clone(),
                shift,
                e.unc_1e16.to_string(),
                e.kind.label().to_string(),
                e.unc_1e16.to_string(),
            ]);
        }
        let c = combine_quadrature(&self.entries);
        if let Some(sh) = self.shift_total() {
            let _ = w.write_record([
                "total".to_string(),
                sh.to_string(),
                c.unc_1e16.to_string(),
                String::new(),
                format_sig(c.unc_1e16, 3, rounding),
            ]);
        }
        for (name, v, kind) in [("uB", t.u_b, "B"), ("uA", t.u_a, "A"), ("total_uncertainty", t.total, "")] {
            let _ = w.write_record([
                name.to_string(),
                String::new(),
                v.to_string(),
                kind.to_string(),
                format_sig(v, 2, rounding),
            ]);
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 output")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(name: &str, u: f64) -> UncertaintyEntry {
        UncertaintyEntry::new(name, None, u, Kind::TypeB)
    }

    #[test]
    fn table1_combination() {
        let t = Budget::table1();
        let m1 = combine_quadrature(&t.entries[1..3]);
        assert!((m1.unc_1e16 - 0.61f64.hypot(0.47)).abs() < 1e-15);
        assert_eq!(format_sig(m1.unc_1e16, 2, Rounding::HalfEven), "0.77");
        let all = combine_quadrature(&t.entries);
        assert_eq!(format_sig(all.unc_1e16, 3, Rounding::Up), "1.11");
        assert!((all.shift_1e16 - 1.54).abs() < 1e-12);
    }

    #[test]
    fn table2_combination() {
        let t = Budget::table2();
        assert_eq!(t.entries.len(), 15);
        assert_eq!(t.entries[7].name, "Rabi, Ramsey pulling");
        let tot = t.totals(None);
        assert!((tot.u_b - 5.01f64.sqrt()).abs() < 1e-12);
        assert_eq!(format_sig(tot.u_b, 2, Rounding::Up), "2.3");
        assert_eq!(format_sig(tot.total, 2, Rounding::Up), "3.3");
        let zero: Vec<UncertaintyEntry> = (0..14).map(|i| b(&i.to_string(), 0.0)).collect();
        assert_eq!(table2_totals(&zero, 0.0).u_b, 0.0);
    }

    #[test]
    fn groups_add_linearly() {
        let e = vec![b("a", 3.0).with_group("g"), b("b", 1.0).with_group("g"), b("c", 3.0)];
        assert!((combine_quadrature(&e).unc_1e16 - 5.0).abs() < 1e-15);
        assert_eq!(combine_quadrature(&[b("x", 0.7)]).unc_1e16, 0.7);
    }

    #[test]
    fn sensitivity_products() {
        let u = tilt_sensitivity_uncertainty(1.2e-16, 1.4e-16, 0.33).unwrap();
        assert_eq!(format_sig(u / 1e-17, 2, Rounding::HalfEven), "6.1");
        let u = tilt_sensitivity_uncertainty(1.1e-16, 1.1e-16, 0.3).unwrap();
        assert_eq!(format_sig(u / 1e-17, 2, Rounding::HalfEven), "4.7");
        assert_eq!(tilt_sensitivity_uncertainty(1.0, 1.0, 0.0).unwrap(), 0.0);
        assert!(tilt_sensitivity_uncertainty(1.0, 1.0, -0.1).is_err());
    }

    #[test]
    fn offsets_and_halving() {
        let o = offset_uncertainty(&[1.0, 0.5]).unwrap();
        assert_eq!(format_sig(o, 2, Rounding::HalfEven), "1.1");
        assert_eq!(offset_uncertainty(&[3.0, 4.0]).unwrap(), 5.0);
        assert_eq!(offset_uncertainty(&[0.4]).unwrap(), 0.4);
        assert!(offset_uncertainty(&[-1.0]).is_err());
        assert_eq!(format_sig(halve_as_uncertainty(6.2), 2, Rounding::HalfEven), "3.1");
        let m2 = halve_as_uncertainty(13.8).hypot(3.6);
        assert_eq!(format_sig(m2, 2, Rounding::HalfEven), "7.8");
        assert_eq!(halve_as_uncertainty(0.0), 0.0);
    }

    #[test]
    fn rounding_modes() {
        assert_eq!(round_sig(2.25, 2, Rounding::HalfEven), 2.2);
        assert_eq!(round_sig(2.238, 2, Rounding::Up), 2.3);
        assert_eq!(round_sig(2.2, 2, Rounding::Up), 2.2);
        assert_eq!(round_sig(1234.0, 2, Rounding::HalfEven), 1200.0);
        assert_eq!(format_sig(0.0, 2, Rounding::Up), "0.0");
        assert_eq!(format_sig(-0.0477, 2, Rounding::Up), "-0.048");
    }

    #[test]
    fn serialization_round_trip_is_bit_identical() {
        for t in [Budget::table1(), Budget::table2()] {
            let back = Budget::parse(&t.to_csv(), Path::new("x")).unwrap();
            assert_eq!(back, t);
            assert_eq!(back.totals(None).total.to_bits(), t.totals(None).total.to_bits());
        }
    }

    #[test]
    fn parse_errors_name_the_line() {
        let text = "name,shift_1e16,unc_1e16,kind,group\na,,0.1,B,\nb,,zz,B,\n";
        match Budget::parse(text, Path::new("f.csv")) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        let text = "name,shift_1e16,unc_1e16,kind,group\na,,-1,B,\n";
        assert!(Budget::parse(text, Path::new("f.csv")).is_err());
    }
}
