//! Per-scene checks behind `iak verify`.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::boxcount::verify_theorem_bounds_with;
use crate::error::{IakError, Result};
use crate::hausdorff::{classify, closed_form_self_similar, lower_k1_root, orbital_measure_ratio_empirical};
use crate::ifs::{MapFamily, Sampling};
use crate::pressure::{similarity_dimension, upper_lipschitz_dimension};
use crate::scene::Scene;
use crate::stopping::delta_stopping;

/// δ values for the stopping audits.
pub const AUDIT_DELTAS: [f64; 3] = [0.25, 1.0 / 64.0, 1.0 / 512.0];
/// Raster side for the area-ratio check.
pub const RATIO_RESOLUTION: usize = 1024;
/// Relative tolerance for the area-ratio check.
pub const RATIO_TOL: f64 = 0.03;

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    /// Replaces every scene's ladder slack when set.
    pub slack: Option<f64>,
    pub seed: Option<u64>,
    pub tol: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { slack: None, seed: None, tol: crate::pressure::DEFAULT_TOL }
    }
}

/// One row of the summary table.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckRow {
    pub scene: String,
    pub check: String,
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    pub holds: bool,
    pub note: String,
}

impl CheckRow {
    fn within(scene: &str, check: impl Into<String>, value: f64, lower: f64, upper: f64) -> Self {
        CheckRow {
            scene: scene.to_string(),
            check: check.into(),
            value,
            lower,
            upper,
            holds: lower <= value && value <= upper,
            note: String::new(),
        }
    }

    fn flag(scene: &str, check: impl Into<String>, holds: bool, note: impl Into<String>) -> Self {
        let v = if holds { 1.0 } else { 0.0 };
        CheckRow { scene: scene.to_string(), check: check.into(), value: v, lower: 1.0, upper: 1.0, holds, note: note.into() }
    }

    fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SuiteReport {
    pub rows: Vec<CheckRow>,
    /// Per-scene warnings and errors.
    pub diagnostics: Vec<String>,
}

impl SuiteReport {
    pub fn all_hold(&self) -> bool {
        self.rows.iter().all(|r| r.holds)
    }

    pub fn exit_code(&self) -> i32 {
        if self.all_hold() {
            0
        } else {
            1
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("scene,check,value,lower,upper,holds,note\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.scene,
                r.check,
                fmt_num(r.value),
                fmt_num(r.lower),
                fmt_num(r.upper),
                r.holds,
                r.note
            );
        }
        out
    }
}

/// Fixed-precision formatting so CSV output is stable across runs.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.10}")
    }
}

fn check_expected(scene: &Scene, rows: &mut Vec<CheckRow>) -> Result<()> {
    for e in &scene.expected {
        let value = match e.quantity.as_str() {
            "similarity_dimension" => similarity_dimension(&scene.ifs)?,
            "upper_lipschitz_dimension" => {
                upper_lipschitz_dimension(&scene.ifs, scene.ifs.budget(), crate::pressure::DEFAULT_TOL).best_upper_bound
            }
            "closed_form_measure" => {
                let h = scene
                    .condensation
                    .hausdorff()
                    .ok_or_else(|| IakError::InvalidInput("closed_form_measure needs a Hausdorff value for C".into()))?;
                closed_form_self_similar(&scene.ifs, h)?
            }
            "orbital_ratio" => {
                orbital_measure_ratio_empirical(&scene.ifs, &scene.condensation, &scene.bounding_box, RATIO_RESOLUTION)?
                    .closed_ratio
            }
            other => return Err(IakError::InvalidInput(format!("unknown expected quantity {other}"))),
        };
        let row = if e.value.is_infinite() {
            CheckRow::flag(&scene.name, format!("expected:{}", e.quantity), value == e.value, e.source.clone())
        } else {
            CheckRow::within(&scene.name, format!("expected:{}", e.quantity), value, e.value - e.tol, e.value + e.tol)
                .with_note(e.source.clone())
        };
        rows.push(row);
    }
    Ok(())
}

fn scene_rows(scene: &Scene, opts: &VerifyOptions) -> Result<Vec<CheckRow>> {
    let name = scene.name.as_str();
    let ifs = &scene.ifs;
    let c = &scene.condensation;
    let mut rows = Vec::new();

    let dim = upper_lipschitz_dimension(ifs, ifs.budget(), opts.tol);
    let s1 = dim.s_k_sequence[0].s_k;
    let monotone = dim.s_k_sequence.windows(2).all(|w| w[1].s_k <= w[0].s_k + 2.0 * opts.tol);
    rows.push(CheckRow::flag(name, "pressure:doubling_monotone", monotone, format!("k_max={}", dim.s_k_sequence.last().unwrap().k)));
    if ifs.family() == MapFamily::Similarity {
        let spread = dim.s_k_sequence.iter().map(|e| (e.s_k - s1).abs()).fold(0.0, f64::max);
        rows.push(CheckRow::within(name, "pressure:similarity_constant", spread, 0.0, 10.0 * opts.tol));
    }

    let t = s1 + 0.1;
    for &delta in &AUDIT_DELTAS {
        let stopping = delta_stopping(ifs, delta)?;
        let audit = stopping.audit(ifs, Some(t))?;
        rows.push(CheckRow::flag(
            name,
            format!("stopping:audit@{}", fmt_num(delta)),
            audit.all_hold(),
            format!("words={}", stopping.len()),
        ));
    }

    if ifs.has_point_action() {
        let mut ladder = scene.ladder.clone();
        if let Some(s) = opts.slack {
            ladder.slack = s;
        }
        let sampling = opts.seed.map_or(Sampling::Grid, Sampling::Jittered);
        let report = verify_theorem_bounds_with(ifs, c, ladder.max_render_delta(), &ladder, sampling)?;
        let lo = report.lower - ladder.slack;
        let hi = report.upper + ladder.slack;
        rows.push(
            CheckRow::within(name, "box:theorem_bounds", report.estimate, lo, hi)
                .with_note(format!("r2={:.4}", report.fit.r_squared)),
        );
    }

    if let Some(h) = c.hausdorff() {
        let report = classify(ifs, h, dim.best_upper_bound, lower_k1_root(ifs), 40)?;
        if let Some(cf) = report.closed_form {
            let inside = report.lower_bound <= cf * (1.0 + 1e-12) && cf <= report.upper_bound * (1.0 + 1e-12);
            rows.push(CheckRow::flag(name, "measure:closed_form_in_bounds", inside, report.regime.to_string()));
        } else {
            let ordered = report.lower_bound <= report.upper_bound;
            rows.push(CheckRow::flag(name, "measure:bounds_ordered", ordered, report.regime.to_string()));
        }
    }

    if c.is_full_dimensional() && ifs.flags().cosc && ifs.has_point_action() {
        let r = orbital_measure_ratio_empirical(ifs, c, &scene.bounding_box, RATIO_RESOLUTION)?;
        if !r.low_resolution {
            rows.push(
                CheckRow::within(name, "measure:area_ratio", r.relative_error(), 0.0, RATIO_TOL)
                    .with_note(format!("ratio={:.6} closed={:.6}", r.ratio, r.closed_ratio)),
            );
        }
    }

    check_expected(scene, &mut rows)?;
    Ok(rows)
}

/// Runs every check on every scene. Scenes run in parallel; rows keep the
/// input order.
pub fn run_verification_suite(scenes: &[Scene], opts: &VerifyOptions) -> SuiteReport {
    let per_scene: Vec<(Vec<CheckRow>, Vec<String>)> = scenes
        .par_iter()
        .map(|scene| {
            let mut diags: Vec<String> = scene.warnings.iter().map(|w| format!("{}: warning: {w}", scene.name)).collect();
            let rows = match scene_rows(scene, opts) {
                Ok(rows) => rows,
                Err(e) => {
                    diags.push(format!("{}: error: {e}", scene.name));
                    vec![CheckRow::flag(&scene.name, "error", false, e.to_string().replace(',', ";"))]
                }
            };
            for r in rows.iter().filter(|r| !r.holds) {
                diags.push(format!(
                    "{}: {} failed: value {} not in [{}, {}]",
                    scene.name,
                    r.check,
                    fmt_num(r.value),
                    fmt_num(r.lower),
                    fmt_num(r.upper)
                ));
            }
            (rows, diags)
        })
        .collect();
    let mut report = SuiteReport::default();
    for (rows, diags) in per_scene {
        report.rows.extend(rows);
        report.diagnostics.extend(diags);
    }
    report
}
