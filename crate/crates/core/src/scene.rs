//! JSON scene files: a system, a condensation set, the ambient box X and
//! optional expected values.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::boxcount::Ladder;
use crate::error::{IakError, Result};
use crate::geometry::AxisBox;
use crate::ifs::{CondensationSet, ContractionMap, HausdorffValue, IFSystem, SeparationFlags, WordBudget};
use crate::linalg::{matrix_from_rows, Vector};

/// Tolerance for `S_i(X) ⊆ X` on box corners.
pub const CONTAINMENT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum MapSpec {
    Similarity {
        ratio: f64,
        /// Row-major orthogonal matrix; identity when omitted.
        #[serde(default)]
        isometry: Option<Vec<Vec<f64>>>,
        translation: Vec<f64>,
    },
    Affine {
        linear: Vec<Vec<f64>>,
        translation: Vec<f64>,
    },
    Abstract {
        lip_plus: f64,
        lip_minus: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum CondensationSpec {
    Points {
        points: Vec<Vec<f64>>,
        #[serde(default)]
        hausdorff: Option<HausdorffSpec>,
    },
    Segment {
        endpoints: [Vec<f64>; 2],
        #[serde(default)]
        hausdorff: Option<HausdorffSpec>,
    },
    Box {
        corner: Vec<f64>,
        widths: Vec<f64>,
        #[serde(default)]
        hausdorff: Option<HausdorffSpec>,
    },
    Disk {
        center: Vec<f64>,
        radius: f64,
        #[serde(default)]
        hausdorff: Option<HausdorffSpec>,
    },
    Cloud {
        points: Vec<Vec<f64>>,
        box_dim: f64,
        #[serde(default)]
        hausdorff: Option<HausdorffSpec>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HausdorffSpec {
    pub d: f64,
    pub measure: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlagSpec {
    #[serde(default)]
    pub sosc: bool,
    #[serde(default)]
    pub cosc: bool,
    #[serde(default, rename = "bounded_distortion_L")]
    pub bounded_distortion_l: Option<f64>,
    /// Open set U witnessing COSC, as an axis box.
    #[serde(default)]
    pub cosc_open_set: Option<BoxSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxSpec {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpectedValue {
    pub quantity: String,
    pub value: f64,
    pub tol: f64,
    /// Where the value comes from, e.g. `closed-form` or `hand-enumeration`.
    pub source: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneFile {
    pub name: String,
    pub ambient_dim: usize,
    pub bounding_box: BoxSpec,
    pub maps: Vec<MapSpec>,
    pub condensation: CondensationSpec,
    #[serde(default)]
    pub flags: FlagSpec,
    #[serde(default)]
    pub budget: Option<usize>,
    #[serde(default)]
    pub ladder: Option<LadderSpec>,
    #[serde(default)]
    pub expected: Vec<ExpectedValue>,
}

/// Overrides for the box-counting ladder used by `verify`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LadderSpec {
    pub delta_hi: f64,
    pub levels: usize,
    #[serde(default)]
    pub ratio: Option<f64>,
    #[serde(default)]
    pub slack: Option<f64>,
}

/// A validated scene.
#[derive(Debug, Clone)]
pub struct Scene {
    pub name: String,
    pub ifs: IFSystem,
    pub condensation: CondensationSet,
    pub bounding_box: AxisBox,
    pub ladder: Ladder,
    pub expected: Vec<ExpectedValue>,
    pub warnings: Vec<String>,
}

impl Scene {
    pub fn expected(&self, quantity: &str) -> Option<&ExpectedValue> {
        self.expected.iter().find(|e| e.quantity == quantity)
    }
}

fn build_map(spec: &MapSpec, dim: usize) -> Result<ContractionMap> {
    match spec {
        MapSpec::Similarity { ratio, isometry, translation } => {
            let q = match isometry {
                Some(rows) => matrix_from_rows(rows).ok_or_else(|| IakError::Parse("ragged isometry matrix".into()))?,
                None => crate::linalg::Matrix::identity(dim, dim),
            };
            ContractionMap::similarity(*ratio, q, Vector::from_vec(translation.clone()))
        }
        MapSpec::Affine { linear, translation } => {
            let a = matrix_from_rows(linear).ok_or_else(|| IakError::Parse("ragged linear matrix".into()))?;
            ContractionMap::affine(a, Vector::from_vec(translation.clone()))
        }
        MapSpec::Abstract { lip_plus, lip_minus } => ContractionMap::abstract_lipschitz(*lip_plus, *lip_minus),
    }
}

fn build_condensation(spec: &CondensationSpec) -> Result<CondensationSet> {
    let (set, h) = match spec {
        CondensationSpec::Points { points, hausdorff } => (CondensationSet::points(points.clone())?, hausdorff),
        CondensationSpec::Segment { endpoints, hausdorff } => {
            (CondensationSet::segment(endpoints[0].clone(), endpoints[1].clone())?, hausdorff)
        }
        CondensationSpec::Box { corner, widths, hausdorff } => {
            (CondensationSet::axis_box(corner.clone(), widths.clone())?, hausdorff)
        }
        CondensationSpec::Disk { center, radius, hausdorff } => {
            (CondensationSet::disk(center.clone(), *radius)?, hausdorff)
        }
        CondensationSpec::Cloud { points, box_dim, hausdorff } => {
            (CondensationSet::cloud(points.clone(), *box_dim)?, hausdorff)
        }
    };
    match h {
        Some(h) => set.with_hausdorff(Some(HausdorffValue { d: h.d, measure: h.measure })),
        None => Ok(set),
    }
}

fn open_box_contains(b: &AxisBox, p: &[f64]) -> bool {
    p.iter().zip(b.min.iter().zip(&b.max)).all(|(x, (lo, hi))| lo < x && x < hi)
}

impl SceneFile {
    pub fn validate(&self) -> Result<Scene> {
        let dim = self.ambient_dim;
        let x = AxisBox::new(self.bounding_box.min.clone(), self.bounding_box.max.clone())?;
        if x.dim() != dim {
            return Err(IakError::Invariant(format!("bounding box has dimension {} but ambient_dim is {dim}", x.dim())));
        }
        let maps = self.maps.iter().map(|m| build_map(m, dim)).collect::<Result<Vec<_>>>()?;
        let flags = SeparationFlags {
            sosc: self.flags.sosc,
            cosc: self.flags.cosc,
            bounded_distortion: self.flags.bounded_distortion_l,
        };
        let mut ifs = IFSystem::new(maps, dim, flags)?;
        if let Some(b) = self.budget {
            ifs = ifs.with_budget(WordBudget(b));
        }
        let condensation = build_condensation(&self.condensation)?;
        if condensation.dim() != dim {
            return Err(IakError::Invariant("condensation set dimension differs from ambient_dim".into()));
        }

        if ifs.has_point_action() {
            for (i, m) in ifs.maps().iter().enumerate() {
                let action = m.action().unwrap();
                for corner in x.corners() {
                    if !x.contains(&action.apply(&corner), CONTAINMENT_TOL) {
                        return Err(IakError::Invariant(format!("map {} sends X outside itself", i + 1)));
                    }
                }
            }
            let cb = condensation.bounding_box();
            if !cb.corners().iter().all(|p| x.contains(p, CONTAINMENT_TOL)) {
                return Err(IakError::Invariant("condensation set leaves X".into()));
            }
        }

        let mut ladder = Ladder::default_for(&x);
        if let Some(l) = &self.ladder {
            let ratio = l.ratio.unwrap_or(ladder.ratio);
            if !(l.delta_hi > 0.0 && l.levels >= 4 && ratio > 0.0 && ratio < 1.0) {
                return Err(IakError::Invariant("ladder needs delta_hi > 0, levels >= 4, ratio in (0,1)".into()));
            }
            ladder.delta_hi = l.delta_hi;
            ladder.levels = l.levels;
            ladder.ratio = ratio;
            if let Some(slack) = l.slack {
                if !(slack >= 0.0) {
                    return Err(IakError::Invariant("ladder slack >= 0".into()));
                }
                ladder.slack = slack;
            }
        }

        let mut warnings = Vec::new();
        if self.flags.cosc && !ifs.has_point_action() {
            warnings.push("COSC asserted for abstract maps; not checkable".into());
        }
        if let Some(u) = &self.flags.cosc_open_set {
            let u = AxisBox::new(u.min.clone(), u.max.clone())?;
            if ifs.has_point_action() {
                let probe = condensation.sample(16, crate::ifs::Sampling::Grid, 0);
                'maps: for (i, m) in ifs.maps().iter().enumerate() {
                    let inv = m
                        .action()
                        .unwrap()
                        .inverse()
                        .ok_or_else(|| IakError::Invariant(format!("map {} is singular", i + 1)))?;
                    for p in probe.iter() {
                        // p ∈ S_i(U) iff S_i⁻¹(p) ∈ U
                        if open_box_contains(&u, &inv.apply(p)) {
                            warnings.push(format!(
                                "condensation set meets S_{}(U); the asserted COSC looks violated",
                                i + 1
                            ));
                            continue 'maps;
                        }
                    }
                }
            }
        }
        Ok(Scene {
            name: self.name.clone(),
            ifs,
            condensation,
            ladder,
            bounding_box: x,
            expected: self.expected.clone(),
            warnings,
        })
    }
}

pub fn parse_scene(json: &str) -> Result<Scene> {
    let file: SceneFile = serde_json::from_str(json).map_err(|e| IakError::Parse(e.to_string()))?;
    file.validate()
}

pub fn load_scene(path: impl AsRef<Path>) -> Result<Scene> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| IakError::Io(format!("{}: {e}", path.display())))?;
    parse_scene(&text).map_err(|e| match e {
        IakError::Parse(m) => IakError::Parse(format!("{}: {m}", path.display())),
        other => other,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const CANTOR: &str = r#"{
        "name": "cantor",
        "ambient_dim": 1,
        "bounding_box": {"min": [0], "max": [1]},
        "maps": [
            {"type": "similarity", "ratio": 0.3333333333333333, "translation": [0]},
            {"type": "similarity", "ratio": 0.3333333333333333, "translation": [0.6666666666666666]}
        ],
        "condensation": {"type": "points", "points": [[0.5]]},
        "flags": {"cosc": true, "cosc_open_set": {"min": [0], "max": [1]}}
    }"#;

    #[test]
    fn parses_and_validates() {
        let s = parse_scene(CANTOR).unwrap();
        assert_eq!(s.ifs.len(), 2);
        assert!(s.ifs.flags().cosc);
        assert!(s.warnings.is_empty(), "{:?}", s.warnings);
    }

    #[test]
    fn detects_cosc_violation() {
        let bad = CANTOR.replace("[[0.5]]", "[[0.2]]");
        let s = parse_scene(&bad).unwrap();
        assert_eq!(s.warnings.len(), 1);
        assert!(s.warnings[0].contains("S_1(U)"));
    }

    #[test]
    fn rejects_escaping_maps_and_bad_json() {
        let bad = CANTOR.replace("[0.6666666666666666]", "[0.9]");
        assert!(matches!(parse_scene(&bad), Err(IakError::Invariant(_))));
        assert!(matches!(parse_scene("{"), Err(IakError::Parse(_))));
        let unknown = CANTOR.replace("\"cosc\": true", "\"cosc\": true, \"extra\": 1");
        assert!(matches!(parse_scene(&unknown), Err(IakError::Parse(_))));
    }

    #[test]
    fn missing_file_is_io_error() {
        assert!(matches!(load_scene("/nonexistent/scene.json"), Err(IakError::Io(_))));
    }
}
