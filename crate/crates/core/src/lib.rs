//! Inhomogeneous attractors of iterated function systems: construction,
//! dimension estimates and Hausdorff measure at the critical value.

pub mod boxcount;
pub mod error;
pub mod geometry;
pub mod hausdorff;
pub mod ifs;
pub mod linalg;
pub mod pressure;
pub mod scene;
pub mod stopping;
pub mod verify;

pub use error::{IakError, Result};
pub use geometry::{AxisBox, PointCloud};
pub use ifs::{
    apply, compose, homogeneous_points, iterate_system, orbital_points, CondensationSet, ContractionMap,
    HausdorffValue, IFSystem, SeparationFlags, Word, WordBudget,
};
pub use scene::{load_scene, parse_scene, Scene};
