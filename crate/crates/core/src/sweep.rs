//! Strain sweeps, critical-strain bisection, and CSV/JSON reports.

use std::fmt;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::energetics::ModelKind;
use crate::error::{EamError, Result};
use crate::potentials::PotentialSet;
use crate::scalar::{Scalar, Sign};
use crate::stability::{coefficients, min_eigenvalue, CaseLabel, SpectrumMode, StabilityVerdict};

/// Minimum eigenvalues of the three models at one strain.
///
/// A row whose strain falls outside a potential's domain is kept with NaN
/// eigenvalues, `false` stability flags, and unknown signs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow<T> {
    pub strain: T,
    pub lam_a: T,
    pub lam_cv: T,
    pub lam_cr: T,
    pub stable_a: bool,
    pub stable_cv: bool,
    pub stable_cr: bool,
    pub b_sign: Option<Sign>,
    pub kappa_sign: Option<Sign>,
}

impl<T: Scalar> SweepRow<T> {
    pub fn is_valid(&self) -> bool {
        self.lam_a.is_finite() && self.lam_cv.is_finite() && self.lam_cr.is_finite()
    }

    fn invalid(strain: T) -> Self {
        Self {
            strain,
            lam_a: T::nan(),
            lam_cv: T::nan(),
            lam_cr: T::nan(),
            stable_a: false,
            stable_cv: false,
            stable_cr: false,
            b_sign: None,
            kappa_sign: None,
        }
    }

    pub fn lambda(&self, model: ModelKind) -> T {
        match model {
            ModelKind::Atomistic => self.lam_a,
            ModelKind::VolumeLocal => self.lam_cv,
            ModelKind::ReconstructionLocal => self.lam_cr,
        }
    }
}

fn sweep_row<T: Scalar>(p: &PotentialSet<T>, f: T, mode: SpectrumMode) -> SweepRow<T> {
    let Ok(c) = coefficients(p, f) else {
        return SweepRow::invalid(f);
    };
    let a = min_eigenvalue(&c, ModelKind::Atomistic, mode);
    let cv = min_eigenvalue(&c, ModelKind::VolumeLocal, mode);
    let cr = min_eigenvalue(&c, ModelKind::ReconstructionLocal, mode);
    SweepRow {
        strain: f,
        lam_a: a.lambda_min,
        lam_cv: cv.lambda_min,
        lam_cr: cr.lambda_min,
        stable_a: a.stable,
        stable_cv: cv.stable,
        stable_cr: cr.stable,
        b_sign: Some(c.b_sign()),
        kappa_sign: Some(c.kappa_sign()),
    }
}

/// Evaluates every grid point in parallel; rows come back in grid order.
pub fn sweep_strains<T: Scalar>(p: &PotentialSet<T>, grid: &[T], mode: SpectrumMode) -> Result<Vec<SweepRow<T>>> {
    if grid.windows(2).any(|w| !(w[0] < w[1])) || grid.iter().any(|f| !f.is_finite()) {
        return Err(EamError::GridNotIncreasing);
    }
    Ok(grid.par_iter().map(|&f| sweep_row(p, f, mode)).collect())
}

/// `steps + 1` equally spaced strains from `lo` to `hi` inclusive.
pub fn linear_grid<T: Scalar>(lo: T, hi: T, steps: usize) -> Vec<T> {
    if steps == 0 {
        return vec![lo];
    }
    let n = T::from_count(steps);
    (0..=steps).map(|i| if i == steps { hi } else { lo + (hi - lo) * T::from_count(i) / n }).collect()
}

/// Result of bisecting a sign change.
#[derive(Debug, Clone, PartialEq)]
pub struct Bisection<T> {
    pub root: T,
    /// Final bracket.
    pub lo: T,
    pub hi: T,
    pub iterations: usize,
    /// Value at the initial lower end.
    pub f_lo: T,
}

/// Bisection of `f` on `[lo, hi]` until the bracket is no wider than `tol`.
/// Each step halves the bracket; the midpoint of the final bracket is returned.
pub fn bisect<T: Scalar>(mut f: impl FnMut(T) -> Result<T>, lo: T, hi: T, tol: T) -> Result<Bisection<T>> {
    if !(tol > T::zero()) {
        return Err(EamError::invalid("tol", "must be positive"));
    }
    if !(lo < hi) {
        return Err(EamError::invalid("bracket", "lower end must be below upper end"));
    }
    let (f_lo, f_hi) = (f(lo)?, f(hi)?);
    let no_change =
        || EamError::NoSignChange { lo: lo.as_f64(), hi: hi.as_f64(), f_lo: f_lo.as_f64(), f_hi: f_hi.as_f64() };
    if !(f_lo.is_finite() && f_hi.is_finite())
        || (f_lo > T::zero()) == (f_hi > T::zero()) && f_lo != T::zero() && f_hi != T::zero()
    {
        return Err(no_change());
    }
    let lo_positive = f_lo > T::zero();
    let (mut a, mut b) = (lo, hi);
    let mut iterations = 0;
    let half = T::lit(0.5);
    while b - a > tol {
        let mid = a + (b - a) * half;
        if !(mid > a && mid < b) {
            break;
        }
        let fm = f(mid)?;
        iterations += 1;
        if fm == T::zero() {
            a = mid;
            b = mid;
            break;
        }
        if (fm > T::zero()) == lo_positive {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(Bisection { root: a + (b - a) * half, lo: a, hi: b, iterations, f_lo })
}

/// `ceil(log2(width / tol))`, the bisection step count for a bracket of `width`.
pub fn bisection_budget<T: Scalar>(width: T, tol: T) -> usize {
    let ratio = (width / tol).as_f64();
    if ratio <= 1.0 {
        0
    } else {
        ratio.log2().ceil() as usize
    }
}

/// Direction in which stability is lost.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// Stable below the critical strain, unstable above.
    Tensile,
    /// Stable above the critical strain, unstable below.
    Compressive,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Tensile => "tensile",
            Side::Compressive => "compressive",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriticalStrainReport<T> {
    pub model: ModelKind,
    pub mode: SpectrumMode,
    pub f_crit: T,
    /// Final bracket.
    pub bracket: (T, T),
    pub tol: T,
    pub iterations: usize,
    pub side: Side,
    /// Distinct case labels met along the bisection, in order of first appearance.
    pub cases: Vec<CaseLabel>,
}

/// Critical strain of `model`: bisection on `F -> lambda_min(F)` over `bracket`.
pub fn critical_strain<T: Scalar>(
    p: &PotentialSet<T>,
    model: ModelKind,
    bracket: (T, T),
    tol: T,
    mode: SpectrumMode,
) -> Result<CriticalStrainReport<T>> {
    let mut cases = Vec::new();
    let eval = |f: T| -> Result<StabilityVerdict<T>> { Ok(min_eigenvalue(&coefficients(p, f)?, model, mode)) };
    let out = bisect(
        |f| {
            let v = eval(f)?;
            if !cases.contains(&v.case_label) {
                cases.push(v.case_label);
            }
            Ok(v.lambda_min)
        },
        bracket.0,
        bracket.1,
        tol,
    )?;
    Ok(CriticalStrainReport {
        model,
        mode,
        f_crit: out.root,
        bracket: (out.lo, out.hi),
        tol,
        iterations: out.iterations,
        side: if out.f_lo > T::zero() { Side::Tensile } else { Side::Compressive },
        cases,
    })
}

/// Output format of the report emitters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = EamError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(EamError::Parse(format!("unknown format `{s}` (expected csv or json)"))),
        }
    }
}

pub const SWEEP_HEADER: &str = "F,lam_a,lam_cv,lam_cr,stable_a,stable_cv,stable_cr,B_sign,kappa_sign";
pub const CRITICAL_HEADER: &str = "model,mode,F_crit,F_lo,F_hi,tol,side,iterations";

fn num<T: Scalar>(x: T) -> String {
    format!("{:.16e}", x.as_f64())
}

fn json_num<T: Scalar>(x: T) -> String {
    if x.is_finite() {
        num(x)
    } else {
        "null".to_string()
    }
}

fn sign_symbol(s: Option<Sign>) -> &'static str {
    s.map_or("?", Sign::symbol)
}

pub fn emit_sweep<T: Scalar>(rows: &[SweepRow<T>], format: Format) -> String {
    let mut out = String::new();
    match format {
        Format::Csv => {
            out.push_str(SWEEP_HEADER);
            out.push('\n');
            for r in rows {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{}",
                    num(r.strain),
                    num(r.lam_a),
                    num(r.lam_cv),
                    num(r.lam_cr),
                    r.stable_a,
                    r.stable_cv,
                    r.stable_cr,
                    sign_symbol(r.b_sign),
                    sign_symbol(r.kappa_sign)
                );
            }
        }
        Format::Json => {
            out.push('[');
            for (i, r) in rows.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                let _ = write!(
                    out,
                    "\n  {{\"F\": {}, \"lam_a\": {}, \"lam_cv\": {}, \"lam_cr\": {}, \"stable_a\": {}, \"stable_cv\": {}, \"stable_cr\": {}, \"B_sign\": \"{}\", \"kappa_sign\": \"{}\"}}",
                    json_num(r.strain),
                    json_num(r.lam_a),
                    json_num(r.lam_cv),
                    json_num(r.lam_cr),
                    r.stable_a,
                    r.stable_cv,
                    r.stable_cr,
                    sign_symbol(r.b_sign),
                    sign_symbol(r.kappa_sign)
                );
            }
            out.push_str(if rows.is_empty() { "]\n" } else { "\n]\n" });
        }
    }
    out
}

pub fn emit_critical<T: Scalar>(reports: &[CriticalStrainReport<T>], format: Format) -> String {
    let mut out = String::new();
    match format {
        Format::Csv => {
            out.push_str(CRITICAL_HEADER);
            out.push('\n');
            for r in reports {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{},{}",
                    r.model,
                    r.mode,
                    num(r.f_crit),
                    num(r.bracket.0),
                    num(r.bracket.1),
                    num(r.tol),
                    r.side,
                    r.iterations
                );
            }
        }
        Format::Json => {
            out.push('[');
            for (i, r) in reports.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                let cases: Vec<String> = r.cases.iter().map(|c| format!("\"{c}\"")).collect();
                let _ = write!(
                    out,
                    "\n  {{\"model\": \"{}\", \"mode\": \"{}\", \"F_crit\": {}, \"F_lo\": {}, \"F_hi\": {}, \"tol\": {}, \"side\": \"{}\", \"iterations\": {}, \"cases\": [{}]}}",
                    r.model,
                    r.mode,
                    json_num(r.f_crit),
                    json_num(r.bracket.0),
                    json_num(r.bracket.1),
                    json_num(r.tol),
                    r.side,
                    r.iterations,
                    cases.join(", ")
                );
            }
            out.push_str(if reports.is_empty() { "]\n" } else { "\n]\n" });
        }
    }
    out
}

/// Sweep rows followed by critical strains: two CSV sections separated by a
/// blank line, or a JSON object `{"sweep": [...], "critical": [...]}`.
pub fn emit_report<T: Scalar>(rows: &[SweepRow<T>], reports: &[CriticalStrainReport<T>], format: Format) -> String {
    match format {
        Format::Csv => format!("{}\n{}", emit_sweep(rows, format), emit_critical(reports, format)),
        Format::Json => format!(
            "{{\"sweep\": {}, \"critical\": {}}}\n",
            emit_sweep(rows, format).trim_end(),
            emit_critical(reports, format).trim_end()
        ),
    }
}

fn parse_num<T: Scalar>(s: &str) -> Result<T> {
    s.trim().parse::<f64>().map(T::lit).map_err(|e| EamError::Parse(format!("`{s}`: {e}")))
}

fn parse_bool(s: &str) -> Result<bool> {
    s.trim().parse().map_err(|_| EamError::Parse(format!("`{s}` is not a boolean")))
}

fn parse_sign(s: &str) -> Result<Option<Sign>> {
    match s.trim() {
        "?" => Ok(None),
        other => Sign::from_symbol(other).map(Some).ok_or_else(|| EamError::Parse(format!("`{other}` is not a sign"))),
    }
}

/// Inverse of [`emit_sweep`] in CSV format.
pub fn parse_sweep_csv<T: Scalar>(text: &str) -> Result<Vec<SweepRow<T>>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == SWEEP_HEADER => {}
        _ => return Err(EamError::Parse("missing sweep header".into())),
    }
    lines
        .filter(|l| !l.trim().is_empty())
        .map(|line| {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 9 {
                return Err(EamError::Parse(format!("expected 9 fields, found {}", f.len())));
            }
            Ok(SweepRow {
                strain: parse_num(f[0])?,
                lam_a: parse_num(f[1])?,
                lam_cv: parse_num(f[2])?,
                lam_cr: parse_num(f[3])?,
                stable_a: parse_bool(f[4])?,
                stable_cv: parse_bool(f[5])?,
                stable_cr: parse_bool(f[6])?,
                b_sign: parse_sign(f[7])?,
                kappa_sign: parse_sign(f[8])?,
            })
        })
        .collect()
}

fn json_field<T: Scalar>(obj: &serde_json::Value, key: &str) -> Result<T> {
    match obj.get(key) {
        Some(serde_json::Value::Null) => Ok(T::nan()),
        Some(v) => v.as_f64().map(T::lit).ok_or_else(|| EamError::Parse(format!("`{key}` is not a number"))),
        None => Err(EamError::Parse(format!("missing `{key}`"))),
    }
}

fn json_bool(obj: &serde_json::Value, key: &str) -> Result<bool> {
    obj.get(key).and_then(|v| v.as_bool()).ok_or_else(|| EamError::Parse(format!("`{key}` is not a boolean")))
}

fn json_str<'a>(obj: &'a serde_json::Value, key: &str) -> Result<&'a str> {
    obj.get(key).and_then(|v| v.as_str()).ok_or_else(|| EamError::Parse(format!("`{key}` is not a string")))
}

/// Inverse of [`emit_sweep`] in JSON format.
pub fn parse_sweep_json<T: Scalar>(text: &str) -> Result<Vec<SweepRow<T>>> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| EamError::Parse(e.to_string()))?;
    let items = value.as_array().ok_or_else(|| EamError::Parse("expected a JSON array".into()))?;
    items
        .iter()
        .map(|o| {
            Ok(SweepRow {
                strain: json_field(o, "F")?,
                lam_a: json_field(o, "lam_a")?,
                lam_cv: json_field(o, "lam_cv")?,
                lam_cr: json_field(o, "lam_cr")?,
                stable_a: json_bool(o, "stable_a")?,
                stable_cv: json_bool(o, "stable_cv")?,
                stable_cr: json_bool(o, "stable_cr")?,
                b_sign: parse_sign(json_str(o, "B_sign")?)?,
                kappa_sign: parse_sign(json_str(o, "kappa_sign")?)?,
            })
        })
        .collect()
}

fn parse_side(s: &str) -> Result<Side> {
    match s.trim() {
        "tensile" => Ok(Side::Tensile),
        "compressive" => Ok(Side::Compressive),
        other => Err(EamError::Parse(format!("unknown side `{other}`"))),
    }
}

fn parse_case(s: &str) -> Result<CaseLabel> {
    match s.trim() {
        "boundary0" => Ok(CaseLabel::Boundary0),
        "boundary4" => Ok(CaseLabel::Boundary4),
        "interior" => Ok(CaseLabel::Interior),
        other => Err(EamError::Parse(format!("unknown case `{other}`"))),
    }
}

/// Inverse of [`emit_critical`] in CSV format. The case list is not part of the CSV and comes back empty.
pub fn parse_critical_csv<T: Scalar>(text: &str) -> Result<Vec<CriticalStrainReport<T>>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == CRITICAL_HEADER => {}
        _ => return Err(EamError::Parse("missing critical-strain header".into())),
    }
    lines
        .filter(|l| !l.trim().is_empty())
        .map(|line| {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 8 {
                return Err(EamError::Parse(format!("expected 8 fields, found {}", f.len())));
            }
            Ok(CriticalStrainReport {
                model: f[0].parse()?,
                mode: f[1].parse()?,
                f_crit: parse_num(f[2])?,
                bracket: (parse_num(f[3])?, parse_num(f[4])?),
                tol: parse_num(f[5])?,
                side: parse_side(f[6])?,
                iterations: f[7]
                    .trim()
                    .parse()
                    .map_err(|_| EamError::Parse(format!("bad iteration count `{}`", f[7])))?,
                cases: Vec::new(),
            })
        })
        .collect()
}

/// Inverse of [`emit_critical`] in JSON format.
pub fn parse_critical_json<T: Scalar>(text: &str) -> Result<Vec<CriticalStrainReport<T>>> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| EamError::Parse(e.to_string()))?;
    let items = value.as_array().ok_or_else(|| EamError::Parse("expected a JSON array".into()))?;
    items
        .iter()
        .map(|o| {
            let cases = o
                .get("cases")
                .and_then(|c| c.as_array())
                .ok_or_else(|| EamError::Parse("missing `cases`".into()))?
                .iter()
                .map(|c| c.as_str().ok_or_else(|| EamError::Parse("case is not a string".into())).and_then(parse_case))
                .collect::<Result<Vec<_>>>()?;
            Ok(CriticalStrainReport {
                model: json_str(o, "model")?.parse()?,
                mode: json_str(o, "mode")?.parse()?,
                f_crit: json_field(o, "F_crit")?,
                bracket: (json_field(o, "F_lo")?, json_field(o, "F_hi")?),
                tol: json_field(o, "tol")?,
                side: parse_side(json_str(o, "side")?)?,
                iterations: o
                    .get("iterations")
                    .and_then(|v| v.as_u64())
                    .ok_or_else(|| EamError::Parse("missing `iterations`".into()))?
                    as usize,
                cases,
            })
        })
        .collect()
}
