//! Report documents and curve files.
//!
//! Reports are pretty-printed JSON with a fixed field order. Both kinds of
//! artifact are written to a sibling temporary file and renamed into place.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::disk::{DECISION_TOL, DERIVATIVE_FLOOR, WINDING_GUARD};
use crate::error::{Error, Result};
use crate::forms::DOMINANT_TAIL_TOL;
use crate::lashin::QUADRATURE_TOL;
use crate::presets::Preset;
use crate::series::circle_points;
use crate::verifier::{FuzzSummary, TheoremId, TrialReport, JITTER, MUTATION_FACTOR, TAIL_TOL};
use crate::{Grid, Series, C64};

pub const SCHEMA_VERSION: u32 = 1;

/// Header of every curve file.
pub const CURVE_HEADER: &str = "theta,re,im";

/// Fixed numeric settings a report was produced under.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ToleranceBlock {
    pub decision_tol: f64,
    pub winding_guard: f64,
    pub derivative_floor: f64,
    pub grid_radii: Vec<f64>,
    pub angular_count: usize,
    /// Subordination verdicts refer to the disk of this radius.
    pub containment_radius: f64,
    pub tail_tol: f64,
    pub dominant_tail_tol: f64,
    pub quadrature_tol: f64,
    pub mutation_factor: f64,
    pub jitter: f64,
}

impl ToleranceBlock {
    pub fn new(grid: &Grid) -> Self {
        Self {
            decision_tol: DECISION_TOL,
            winding_guard: WINDING_GUARD,
            derivative_floor: DERIVATIVE_FLOOR,
            grid_radii: grid.radii().to_vec(),
            angular_count: grid.angular_count(),
            containment_radius: grid.outer(),
            tail_tol: TAIL_TOL,
            dominant_tail_tol: DOMINANT_TAIL_TOL,
            quadrature_tol: QUADRATURE_TOL,
            mutation_factor: MUTATION_FACTOR,
            jitter: JITTER,
        }
    }
}

/// One sample point of `op eval`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OperatorSample {
    pub z: [f64; 2],
    pub series: [f64; 2],
    pub quadrature: [f64; 2],
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OperatorEval {
    pub alpha: f64,
    pub beta: f64,
    pub radius: f64,
    pub recurrence_residual: f64,
    pub max_residual: f64,
    pub tolerance: f64,
    pub samples: Vec<OperatorSample>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveSummary {
    pub label: String,
    pub radius: f64,
    pub count: usize,
    pub path: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvesPayload {
    pub curves: Vec<CurveSummary>,
    /// Subordination of the principal expression to the dominant.
    pub subordination: Option<crate::Verdict>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Payload {
    Fuzz(FuzzSummary),
    Trial(TrialReport),
    OperatorEval(OperatorEval),
    Presets(Vec<Preset>),
    Curves(CurvesPayload),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportDocument {
    pub schema_version: u32,
    /// The argument vector that produced this report.
    pub command: Vec<String>,
    pub theorem: Option<TheoremId>,
    pub preset: Option<String>,
    pub payload: Payload,
    pub tolerances: ToleranceBlock,
    /// Seconds; only recorded on request so that reports stay reproducible.
    pub wall_time: Option<f64>,
    pub notes: Vec<String>,
}

impl ReportDocument {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

fn temp_sibling(path: &Path) -> PathBuf {
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!(".{name}.{}.tmp", std::process::id()))
}

/// Writes `contents` to `path` through a temporary file and a rename.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let tmp = temp_sibling(path);
    let written = fs::File::create(&tmp).and_then(|mut f| {
        f.write_all(contents.as_bytes())?;
        f.sync_all()
    });
    if let Err(e) = written.and_then(|_| fs::rename(&tmp, path)) {
        let _ = fs::remove_file(&tmp);
        return Err(Error::Io(format!("{}: {e}", path.display())));
    }
    Ok(())
}

pub fn emit_report(doc: &ReportDocument, path: &Path) -> Result<()> {
    write_atomic(path, &doc.to_json())
}

/// Boundary samples `s(r e^{i theta})` of a series.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveFile {
    pub label: String,
    pub radius: f64,
    pub rows: Vec<(f64, C64)>,
}

impl CurveFile {
    pub fn sample(label: &str, series: &Series, radius: f64, n: usize) -> Result<Self> {
        if !(radius > 0.0 && radius <= 0.95) {
            return Err(Error::Usage(format!("curve radius {radius} outside (0, 0.95]")));
        }
        let values = series.sample_circle(radius, n)?;
        let rows = circle_points(radius, n)
            .into_iter()
            .zip(values)
            .enumerate()
            .map(|(j, (_, v))| (std::f64::consts::TAU * j as f64 / n as f64, v))
            .collect();
        Ok(Self { label: label.to_string(), radius, rows })
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(32 * (self.rows.len() + 1));
        out.push_str(CURVE_HEADER);
        out.push('\n');
        for (theta, v) in &self.rows {
            out.push_str(&format!("{theta},{},{}\n", v.re, v.im));
        }
        out
    }
}

/// Samples `series` on `|z| = radius` at `n` points and writes the CSV to `path`.
pub fn emit_curves(label: &str, series: &Series, radius: f64, n: usize, path: &Path) -> Result<CurveFile> {
    let curve = CurveFile::sample(label, series, radius, n)?;
    write_atomic(path, &curve.to_csv())?;
    Ok(curve)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets::all_presets;
    use num_complex::Complex;

    fn doc() -> ReportDocument {
        let grid = Grid::default();
        ReportDocument {
            schema_version: SCHEMA_VERSION,
            command: vec!["merosub".into(), "presets".into()],
            theorem: None,
            preset: None,
            payload: Payload::Presets(all_presets()),
            tolerances: ToleranceBlock::new(&grid),
            wall_time: None,
            notes: vec![],
        }
    }

    #[test]
    fn report_round_trips_byte_identically() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.json");
        emit_report(&doc(), &path).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        let again = serde_json::to_string_pretty(&value).unwrap() + "\n";
        assert_eq!(text, again);
        let keys: Vec<_> = value.as_object().unwrap().keys().cloned().collect();
        assert_eq!(
            keys,
            ["schema_version", "command", "theorem", "preset", "payload", "tolerances", "wall_time", "notes"]
        );
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    #[test]
    fn unwritable_report_path_is_an_io_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("missing").join("r.json");
        assert!(matches!(emit_report(&doc(), &path), Err(Error::Io(_))));
    }

    #[test]
    fn identity_curve_rows() {
        let z = Series::identity(4);
        let c = CurveFile::sample("z", &z, 0.5, 4).unwrap();
        let expect = [(0.0, 0.5, 0.0), (std::f64::consts::FRAC_PI_2, 0.0, 0.5), (std::f64::consts::PI, -0.5, 0.0)];
        for ((t, v), (et, er, ei)) in c.rows.iter().zip(expect) {
            assert!((t - et).abs() < 1e-15);
            assert!((v.re - er).abs() < 1e-15 && (v.im - ei).abs() < 1e-15);
        }
        let csv = c.to_csv();
        assert_eq!(csv.lines().next(), Some(CURVE_HEADER));
        assert_eq!(csv.lines().count(), 5);
    }

    #[test]
    fn moebius_curve_lies_in_right_half_plane() {
        let q = crate::forms::q_family(&crate::forms::QFamilySpec::macovei(0.5)).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("q.csv");
        let c = emit_curves("q", &q, 0.95, 512, &path).unwrap();
        assert!(c.rows.iter().all(|(_, v)| v.re > 0.0));
        let text = fs::read_to_string(&path).unwrap();
        let thetas: Vec<f64> = text.lines().skip(1).map(|l| l.split(',').next().unwrap().parse().unwrap()).collect();
        assert_eq!(thetas.len(), 512);
        assert!(thetas.windows(2).all(|w| w[0] < w[1]));
        assert!(thetas[0] == 0.0 && *thetas.last().unwrap() < std::f64::consts::TAU);
        // Exact image of 0.95: (1 + 0.475)/(1 - 0.475).
        assert!((c.rows[0].1 - Complex::new(1.475 / 0.525, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn curve_radius_is_bounded() {
        let z = Series::identity(4);
        assert!(CurveFile::sample("z", &z, 0.99, 8).is_err());
    }
}
