//! C interface to `iak`.
//!
//! Every function returns an [`IakStatus`]; results go through out-pointers.
//! On a non-zero status, [`iak_last_error_message`] describes the failure on
//! the calling thread. Scenes and clouds are opaque handles released with
//! their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use iak::boxcount::verify_theorem_bounds;
use iak::hausdorff::{closed_form_self_similar, orbital_measure_ratio_empirical};
use iak::pressure::{partition_sum, similarity_dimension, solve_s_k, upper_lipschitz_dimension};
use iak::stopping::{b_t_constant, delta_stopping};
use iak::{homogeneous_points, load_scene, parse_scene, IakError, PointCloud, Scene};

/// Status codes. `IAK_STATUS_OK` is zero.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IakStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    Parse = 3,
    Io = 4,
    BudgetExceeded = 5,
    NoPointAction = 6,
    MissingAssertion = 7,
    SeriesDiverges = 8,
    InvariantViolated = 9,
    Panic = 10,
}

/// Loaded scene.
pub struct IakScene(Scene);

/// Points stored row-major, `dim` coordinates each.
pub struct IakCloud(PointCloud);

/// Finite-scale box-dimension sandwich for a scene's `F_C`.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct IakBoundsReport {
    pub lower: f64,
    pub upper: f64,
    pub estimate: f64,
    pub homogeneous_estimate: f64,
    pub upper_lipschitz: f64,
    pub slack: f64,
    pub r_squared: f64,
    pub holds: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(IakStatus, String);

impl From<IakError> for Failure {
    fn from(e: IakError) -> Self {
        let status = match &e {
            IakError::InvalidWord { .. }
            | IakError::WrongVariant(_)
            | IakError::EmptyInput(_)
            | IakError::InvalidInput(_)
            | IakError::NotFullDimensional => IakStatus::InvalidInput,
            IakError::NoPointAction => IakStatus::NoPointAction,
            IakError::BudgetExceeded { .. } => IakStatus::BudgetExceeded,
            IakError::SeriesDiverges { .. } => IakStatus::SeriesDiverges,
            IakError::MissingAssertion(_) => IakStatus::MissingAssertion,
            IakError::Invariant(_) => IakStatus::InvariantViolated,
            IakError::Parse(_) => IakStatus::Parse,
            IakError::Io(_) => IakStatus::Io,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(IakStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> IakStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => IakStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("panic: {msg}"));
            IakStatus::Panic
        }
    }
}

unsafe fn scene_ref<'a>(scene: *const IakScene) -> Result<&'a Scene, Failure> {
    unsafe { scene.as_ref() }.map(|s| &s.0).ok_or_else(|| null("scene"))
}

unsafe fn write<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    unsafe { out.write(value) };
    Ok(())
}

unsafe fn c_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(null(what));
    }
    unsafe { CStr::from_ptr(s) }
        .to_str()
        .map_err(|_| Failure(IakStatus::InvalidInput, format!("{what} is not valid UTF-8")))
}

/// Message for the last failure on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn iak_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Loads a scene file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn iak_scene_load(path: *const c_char, out: *mut *mut IakScene) -> IakStatus {
    guard(|| {
        let path = unsafe { c_str(path, "path") }?;
        let scene = load_scene(path)?;
        unsafe { write(out, Box::into_raw(Box::new(IakScene(scene)))) }
    })
}

/// Parses a scene from JSON text.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn iak_scene_from_json(json: *const c_char, out: *mut *mut IakScene) -> IakStatus {
    guard(|| {
        let json = unsafe { c_str(json, "json") }?;
        let scene = parse_scene(json)?;
        unsafe { write(out, Box::into_raw(Box::new(IakScene(scene)))) }
    })
}

/// # Safety
/// `scene` must come from a scene constructor and not be freed twice. Null is
/// ignored.
#[no_mangle]
pub unsafe extern "C" fn iak_scene_free(scene: *mut IakScene) {
    if !scene.is_null() {
        drop(unsafe { Box::from_raw(scene) });
    }
}

/// Number of load-time warnings, such as a violated open-set assertion.
///
/// # Safety
/// `scene` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn iak_scene_warning_count(scene: *const IakScene, out: *mut usize) -> IakStatus {
    guard(|| {
        let scene = unsafe { scene_ref(scene) }?;
        unsafe { write(out, scene.warnings.len()) }
    })
}

/// Root of `Σ r_i^s = 1`; similarity systems only.
///
/// # Safety
/// `scene` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn iak_similarity_dimension(scene: *const IakScene, out: *mut f64) -> IakStatus {
    guard(|| {
        let scene = unsafe { scene_ref(scene) }?;
        unsafe { write(out, similarity_dimension(&scene.ifs)?) }
    })
}

/// Last value of the doubling chain `s_1, s_2, s_4, …` within the scene's
/// word budget. `converged` is optional.
///
/// # Safety
/// `scene` must be a live handle; `out` must be writable; `converged` may be
/// null.
#[no_mangle]
pub unsafe extern "C" fn iak_upper_lipschitz_dimension(
    scene: *const IakScene,
    tol: f64,
    out: *mut f64,
    converged: *mut bool,
) -> IakStatus {
    guard(|| {
        let scene = unsafe { scene_ref(scene) }?;
        if !(tol > 0.0) {
            return Err(Failure(IakStatus::InvalidInput, format!("tol must be positive: got {tol}")));
        }
        let report = upper_lipschitz_dimension(&scene.ifs, scene.ifs.budget(), tol);
        unsafe { write(out, report.best_upper_bound) }?;
        if !converged.is_null() {
            unsafe { converged.write(report.converged) };
        }
        Ok(())
    })
}

/// Root of `Σ_{|w|=k} Lip⁺(S_w)^t = 1`.
///
/// # Safety
/// `scene` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn iak_solve_s_k(scene: *const IakScene, k: usize, tol: f64, out: *mut f64) -> IakStatus {
    guard(|| {
        let scene = unsafe { scene_ref(scene) }?;
        unsafe { write(out, solve_s_k(&scene.ifs, k, tol)?) }
    })
}

/// `Σ_{|w|=k} Lip⁺(S_w)^t`.
///
/// # Safety
/// `scene` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn iak_partition_sum(scene: *const IakScene, k: usize, t: f64, out: *mut f64) -> IakStatus {
    guard(|| {
        let scene = unsafe { scene_ref(scene) }?;
        unsafe { write(out, partition_sum(&scene.ifs, k, t)?) }
    })
}

/// `q/(1−q)` with `q = Σ_i Lip⁺(S_i)^t`.
///
/// # Safety
/// `scene` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn iak_b_t_constant(scene: *const IakScene, t: f64, out: *mut f64) -> IakStatus {
    guard(|| {
        let scene = unsafe { scene_ref(scene) }?;
        unsafe { write(out, b_t_constant(&scene.ifs, t)?) }
    })
}

/// Number of words in the δ-stopping.
///
/// # Safety
/// `scene` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn iak_stopping_count(scene: *const IakScene, delta: f64, out: *mut usize) -> IakStatus {
    guard(|| {
        let scene = unsafe { scene_ref(scene) }?;
        unsafe { write(out, delta_stopping(&scene.ifs, delta)?.len()) }
    })
}

/// Box-dimension sandwich on the scene's ladder. A negative `slack` keeps
/// the scene's own.
///
/// # Safety
/// `scene` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn iak_verify_bounds(scene: *const IakScene, slack: f64, out: *mut IakBoundsReport) -> IakStatus {
    guard(|| {
        let scene = unsafe { scene_ref(scene) }?;
        let mut ladder = scene.ladder.clone();
        if slack >= 0.0 {
            ladder.slack = slack;
        }
        let r = verify_theorem_bounds(&scene.ifs, &scene.condensation, ladder.max_render_delta(), &ladder)?;
        let report = IakBoundsReport {
            lower: r.lower,
            upper: r.upper,
            estimate: r.estimate,
            homogeneous_estimate: r.homogeneous_estimate,
            upper_lipschitz: r.upper_lipschitz,
            slack: r.slack,
            r_squared: r.fit.r_squared,
            holds: r.holds,
        };
        unsafe { write(out, report) }
    })
}

/// `H^d(C)·(1 + Σ_k (Σ_i r_i^d)^k)` from the Hausdorff value declared on C.
/// Writes infinity when the series diverges.
///
/// # Safety
/// `scene` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn iak_closed_form_measure(scene: *const IakScene, out: *mut f64) -> IakStatus {
    guard(|| {
        let scene = unsafe { scene_ref(scene) }?;
        let h = scene
            .condensation
            .hausdorff()
            .ok_or_else(|| Failure(IakStatus::InvalidInput, "condensation set has no Hausdorff value".into()))?;
        unsafe { write(out, closed_form_self_similar(&scene.ifs, h)?) }
    })
}

/// Rasterised area of the orbital set over the area of C, with the closed
/// ratio `1/(1 − Σ|det A_i|)` alongside.
///
/// # Safety
/// `scene` must be a live handle; `ratio` and `closed` must be writable.
#[no_mangle]
pub unsafe extern "C" fn iak_empirical_ratio(
    scene: *const IakScene,
    resolution: usize,
    ratio: *mut f64,
    closed: *mut f64,
) -> IakStatus {
    guard(|| {
        let scene = unsafe { scene_ref(scene) }?;
        let r = orbital_measure_ratio_empirical(&scene.ifs, &scene.condensation, &scene.bounding_box, resolution)?;
        unsafe { write(ratio, r.ratio) }?;
        unsafe { write(closed, r.closed_ratio) }
    })
}

/// One point per δ-stopping cylinder of the homogeneous attractor.
///
/// # Safety
/// `scene` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn iak_homogeneous_points(scene: *const IakScene, delta: f64, out: *mut *mut IakCloud) -> IakStatus {
    guard(|| {
        let scene = unsafe { scene_ref(scene) }?;
        let cloud = homogeneous_points(&scene.ifs, delta)?;
        unsafe { write(out, Box::into_raw(Box::new(IakCloud(cloud)))) }
    })
}

/// Number of points; zero for null.
///
/// # Safety
/// `cloud` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn iak_cloud_len(cloud: *const IakCloud) -> usize {
    unsafe { cloud.as_ref() }.map_or(0, |c| c.0.len())
}

/// Coordinates per point; zero for null.
///
/// # Safety
/// `cloud` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn iak_cloud_dim(cloud: *const IakCloud) -> usize {
    unsafe { cloud.as_ref() }.map_or(0, |c| c.0.dim())
}

/// `len·dim` coordinates, row-major, owned by the cloud.
///
/// # Safety
/// `cloud` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn iak_cloud_data(cloud: *const IakCloud) -> *const f64 {
    unsafe { cloud.as_ref() }.map_or(ptr::null(), |c| c.0.as_slice().as_ptr())
}

/// # Safety
/// `cloud` must come from a cloud constructor and not be freed twice. Null is
/// ignored.
#[no_mangle]
pub unsafe extern "C" fn iak_cloud_free(cloud: *mut IakCloud) {
    if !cloud.is_null() {
        drop(unsafe { Box::from_raw(cloud) });
    }
}
