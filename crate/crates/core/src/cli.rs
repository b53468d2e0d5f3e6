//! Batch front end: JSON config in, JSON report (and optional CSV) out.
//!
//! Config schema:
//!
//! ```json
//! {
//!   "polygon_vertices": [[0,0],[2,0],[1,1],[0,1]],
//!   "weights": [ {"point": [0,0], "q": "1"}, {"point": [1,0], "q": 0.25}, ... ],
//!   "mode": "both",
//!   "rel_tol": 1e-10,
//!   "u_grid": [8, 10, 12, 14, 16]
//! }
//! ```
//!
//! Weights given as strings ("1/2", "3") are parsed exactly; plain numbers
//! are converted through their binary expansion with a warning when the
//! result looks like a rounded decimal. Reports carry no timestamps, so
//! identical configs produce byte-identical output.

use std::collections::BTreeMap;
use std::path::Path;

use num::{BigInt, BigRational, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::diagram::{build_diagram, rat_from_f64, LatticePolygon, NewtonDiagram};
use crate::functional::{
    aubin_yau_numeric, j_functional_numeric, mixed_energy_numeric, slope_fit, QuadParams,
};
use crate::slope::{compute_slope, SlopeReport};
use crate::{Error, Rat, Result};

/// Relative agreement tolerance for the formula/oracle comparison block.
pub const COMPARISON_REL_TOL: f64 = 2e-2;

fn default_rel_tol() -> f64 {
    1e-10
}

fn default_u_grid() -> Vec<f64> {
    vec![8.0, 10.0, 12.0, 14.0, 16.0]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Formula,
    Oracle,
    Both,
}

impl Mode {
    pub fn runs_formula(self) -> bool {
        matches!(self, Mode::Formula | Mode::Both)
    }
    pub fn runs_oracle(self) -> bool {
        matches!(self, Mode::Oracle | Mode::Both)
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "formula" => Ok(Mode::Formula),
            "oracle" => Ok(Mode::Oracle),
            "both" => Ok(Mode::Both),
            other => Err(Error::Config(format!(
                "mode must be formula, oracle or both, got {other:?}"
            ))),
        }
    }
}

/// A weight value: exact string rational or a plain number.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WeightValue {
    Text(String),
    Number(f64),
}

impl WeightValue {
    /// Exact rational value; numbers go through their binary expansion.
    /// Returns (value, warning) where the warning flags suspiciously deep
    /// denominators from rounded decimals.
    pub fn to_rat(&self) -> Result<(Rat, Option<String>)> {
        match self {
            WeightValue::Text(s) => Ok((parse_rational(s)?, None)),
            WeightValue::Number(x) => {
                let r = rat_from_f64(*x)
                    .ok_or_else(|| Error::Config(format!("weight {x} is not finite")))?;
                let warning = if r.denom() > &BigInt::from(1_000_000) {
                    Some(format!(
                        "weight {x} converted through its binary expansion {r}; pass a string rational for exactness"
                    ))
                } else {
                    None
                };
                Ok((r, warning))
            }
        }
    }
}

/// Parse "a/b", "a" or a decimal such as "0.25" into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rat> {
    let s = s.trim();
    let bad = |_| Error::Config(format!("cannot parse rational from {s:?}"));
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num.trim().parse().map_err(bad)?;
        let d: BigInt = den.trim().parse().map_err(bad)?;
        if d.is_zero() {
            return Err(Error::Config(format!("zero denominator in {s:?}")));
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let digits = frac.len() as u32;
        let int: BigInt = if int.is_empty() { BigInt::zero() } else { int.parse().map_err(bad)? };
        let frac_n: BigInt = frac.parse().map_err(bad)?;
        let den = BigInt::from(10u32).pow(digits);
        let sign = if s.starts_with('-') { -1 } else { 1 };
        return Ok(BigRational::new(int * &den + BigInt::from(sign) * frac_n, den));
    }
    let n: BigInt = s.parse().map_err(bad)?;
    Ok(BigRational::from_integer(n))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightEntry {
    pub point: [i64; 2],
    pub q: WeightValue,
}

/// The run configuration, serializable both ways (round-trip identity).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub polygon_vertices: Vec<[i64; 2]>,
    pub weights: Vec<WeightEntry>,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default = "default_rel_tol")]
    pub rel_tol: f64,
    #[serde(default = "default_u_grid")]
    pub u_grid: Vec<f64>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return Err(Error::Config(format!(
                "rel_tol must be in (0, 1), got {}",
                self.rel_tol
            )));
        }
        if self.mode.runs_oracle() {
            if self.u_grid.len() < 3 {
                return Err(Error::Config(
                    "u_grid needs at least 3 entries in oracle mode".into(),
                ));
            }
            if self.u_grid.windows(2).any(|p| p[1] <= p[0]) {
                return Err(Error::Config("u_grid must be strictly increasing".into()));
            }
            if self.u_grid.iter().any(|&u| u < 0.0) {
                return Err(Error::Config("u_grid entries must be nonnegative".into()));
            }
        }
        Ok(())
    }

    /// Build the diagram, collecting conversion warnings.
    pub fn diagram(&self) -> Result<(NewtonDiagram, Vec<String>)> {
        let polygon = LatticePolygon::new(self.polygon_vertices.clone())?;
        let mut warnings = Vec::new();
        let mut map: BTreeMap<(i64, i64), Rat> = BTreeMap::new();
        for entry in &self.weights {
            let (value, warn) = entry.q.to_rat()?;
            if let Some(w) = warn {
                warnings.push(w);
            }
            if map.insert((entry.point[0], entry.point[1]), value).is_some() {
                return Err(Error::Config(format!(
                    "duplicate weight entry for point ({}, {})",
                    entry.point[0], entry.point[1]
                )));
            }
        }
        let diagram = build_diagram(&polygon, &map)?;
        Ok((diagram, warnings))
    }
}

// ---------------------------------------------------------------------------
// report DTOs (exact rationals rendered as strings)

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SelectionReport {
    /// Diagram indices of the four chosen points (sorted multiset).
    pub points: [usize; 4],
    pub d4: String,
    pub integral: f64,
    /// D4 * I.
    pub weighted: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FaceReport {
    pub normal_a: String,
    pub normal_b: String,
    pub offset: String,
    pub members: Vec<usize>,
    pub selections: usize,
    pub terms: Vec<SelectionReport>,
    pub subtotal: f64,
    pub error_bound: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FormulaReport {
    pub mu: f64,
    pub trivial_term: String,
    pub trivial_term_value: f64,
    pub nontrivial_total: f64,
    pub volume: String,
    pub faces: Vec<FaceReport>,
    pub zero_offset_faces: usize,
    pub normalization_shift: Option<String>,
    pub quadrature_error_bound: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OracleSample {
    pub u: f64,
    pub f0: f64,
    pub j: f64,
    pub mixed_i0: f64,
    pub mixed_i1: f64,
    pub mixed_i2: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OracleReport {
    pub samples: Vec<OracleSample>,
    pub fitted_slope: f64,
    pub fit_stderr: f64,
    pub fit_non_monotone: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub mu_formula: f64,
    pub mu_oracle: f64,
    pub abs_gap: f64,
    pub rel_gap: f64,
    pub rel_tolerance: f64,
    pub agrees: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunReport {
    pub config: RunConfig,
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub formula: Option<FormulaReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub comparison: Option<ComparisonReport>,
}

fn formula_report(slope: &SlopeReport, diagram: &NewtonDiagram) -> FormulaReport {
    FormulaReport {
        mu: slope.mu,
        trivial_term: slope.trivial_term.to_string(),
        trivial_term_value: slope.trivial_term.to_f64().unwrap(),
        nontrivial_total: slope.nontrivial_total,
        volume: diagram.volume().to_string(),
        faces: slope
            .per_face
            .iter()
            .map(|c| FaceReport {
                normal_a: c.face.normal_a.to_string(),
                normal_b: c.face.normal_b.to_string(),
                offset: c.face.offset.to_string(),
                members: c.face.member_indices.clone(),
                selections: c.selection_terms.len(),
                terms: c
                    .selection_terms
                    .iter()
                    .map(|t| SelectionReport {
                        points: t.diagram_indices,
                        d4: t.selection.d4.to_string(),
                        integral: t.integral,
                        weighted: t.weighted,
                    })
                    .collect(),
                subtotal: c.subtotal,
                error_bound: c.abs_error,
            })
            .collect(),
        zero_offset_faces: slope.diagnostics.zero_offset_faces,
        normalization_shift: slope
            .diagnostics
            .normalization_shift
            .as_ref()
            .map(|s| s.to_string()),
        quadrature_error_bound: slope.diagnostics.quadrature_error_bound,
    }
}

/// Execute the configured run and assemble the report.
pub fn run(config: &RunConfig) -> Result<RunReport> {
    config.validate()?;
    let (diagram, warnings) = config.diagram()?;

    let formula = if config.mode.runs_formula() {
        let slope = compute_slope(&diagram, config.rel_tol)?;
        Some(formula_report(&slope, &diagram))
    } else {
        None
    };

    let oracle = if config.mode.runs_oracle() {
        // face-formula tolerances are far below what slope fitting can use;
        // the oracle integrals run at a floor that keeps them affordable
        let quad = QuadParams { rel_tol: config.rel_tol.max(1e-8), ..QuadParams::default() };
        let mut samples = Vec::new();
        for &u in &config.u_grid {
            samples.push(OracleSample {
                u,
                f0: aubin_yau_numeric(&diagram, u, &quad)?,
                j: j_functional_numeric(&diagram, u, &quad)?,
                mixed_i0: mixed_energy_numeric(&diagram, u, 0, &quad)?,
                mixed_i1: mixed_energy_numeric(&diagram, u, 1, &quad)?,
                mixed_i2: mixed_energy_numeric(&diagram, u, 2, &quad)?,
            });
        }
        let fit = slope_fit(
            &samples.iter().map(|s| (s.u, s.f0)).collect::<Vec<_>>(),
        )?;
        Some(OracleReport {
            samples,
            fitted_slope: fit.slope,
            fit_stderr: fit.stderr,
            fit_non_monotone: fit.non_monotone,
        })
    } else {
        None
    };

    let comparison = match (&formula, &oracle) {
        (Some(f), Some(o)) => {
            let abs_gap = (f.mu - o.fitted_slope).abs();
            let scale = f.mu.abs().max(o.fitted_slope.abs()).max(1e-12);
            let rel_gap = abs_gap / scale;
            Some(ComparisonReport {
                mu_formula: f.mu,
                mu_oracle: o.fitted_slope,
                abs_gap,
                rel_gap,
                rel_tolerance: COMPARISON_REL_TOL,
                agrees: rel_gap <= COMPARISON_REL_TOL,
            })
        }
        _ => None,
    };

    Ok(RunReport { config: config.clone(), warnings, formula, oracle, comparison })
}

/// Render the report as pretty JSON (deterministic field order, no
/// timestamps).
pub fn report_json(report: &RunReport) -> Result<String> {
    Ok(serde_json::to_string_pretty(report)?)
}

/// CSV table of the oracle samples, fixed column order.
pub fn report_csv(report: &RunReport) -> Option<String> {
    let oracle = report.oracle.as_ref()?;
    let mut out = String::from("u,F0,J,mixed_i0,mixed_i1,mixed_i2\n");
    for s in &oracle.samples {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            s.u, s.f0, s.j, s.mixed_i0, s.mixed_i1, s.mixed_i2
        ));
    }
    Some(out)
}

/// Write report artifacts to disk.
pub fn write_outputs(report: &RunReport, out: Option<&Path>, csv: Option<&Path>) -> Result<()> {
    if let Some(path) = out {
        std::fs::write(path, report_json(report)?)?;
    }
    if let Some(path) = csv {
        if let Some(table) = report_csv(report) {
            std::fs::write(path, table)?;
        } else {
            return Err(Error::Config(
                "csv output requested but oracle mode is not enabled".into(),
            ));
        }
    }
    Ok(())
}
