//! C ABI over the capillary-penrose library.
//!
//! Objects cross the boundary as opaque handles: supports come from the
//! `cp_support_*` constructors, sweeps from `cp_sweep_run`, and each is
//! released with the matching `cp_*_free`. Every fallible
//! call returns a [`CpStatus`]; on failure `cp_last_error()` describes the
//! problem for the calling thread. Panics are caught and reported as
//! `CP_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use capillary_penrose::axisym::catenoid_exact;
use capillary_penrose::cli::report::sweep_csv;
use capillary_penrose::mesh::MeshError;
use capillary_penrose::solver::{continuation_sweep, default_seed, SolverError, SolverOptions, SweepOutcome};
use capillary_penrose::support::mass::exterior_mass;
use capillary_penrose::support::{AxisProfile, Bump, SupportSurface};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NonConvergence = 3,
    Degenerate = 4,
    Numerical = 5,
    Panic = 6,
}

/// Support surface handle.
pub struct CpSupport {
    inner: SupportSurface,
}

/// Result of a continuation sweep.
pub struct CpSweep {
    inner: SweepOutcome,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct CpCatenoidQuantities {
    pub m: f64,
    pub height: f64,
    pub disk_radius: f64,
    pub disk_area: f64,
    pub band_area: f64,
    pub contact_cosine: f64,
    pub free_energy_mass: f64,
    pub profile_convexity: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct CpSweepRecord {
    pub t: f64,
    pub area: f64,
    pub lateral_area: f64,
    pub mf: f64,
    pub residual: f64,
    pub grad_norm: f64,
    /// NaN when not computed.
    pub kappa: f64,
    pub components: usize,
    pub min_radius: f64,
    pub iters: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn fail(status: CpStatus, msg: impl Into<String>) -> CpStatus {
    set_error(msg);
    status
}

fn guard<F: FnOnce() -> CpStatus>(f: F) -> CpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(CpStatus::Panic, format!("panic: {msg}"))
        }
    }
}

fn solver_status(e: &SolverError) -> CpStatus {
    match e {
        SolverError::NonConvergence { .. } => CpStatus::NonConvergence,
        SolverError::Degenerate(MeshError::Degenerate { .. }) => CpStatus::Degenerate,
        SolverError::InvalidOptions(_) => CpStatus::InvalidArgument,
        _ => CpStatus::Numerical,
    }
}

/// Message of the last failed call on this thread, or NULL. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn cp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map(|s| s.as_ptr()).unwrap_or(ptr::null()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn cp_version() -> *const c_char {
    static VERSION: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
        Ok(v) => v,
        Err(_) => panic!("version string"),
    };
    VERSION.as_ptr()
}

/// Closed-form flat disk data at `height` inside the half-catenoid of mass `m`.
///
/// # Safety
/// `out` must be NULL or point to writable memory for one `CpCatenoidQuantities`.
#[no_mangle]
pub unsafe extern "C" fn cp_catenoid_exact(m: f64, height: f64, out: *mut CpCatenoidQuantities) -> CpStatus {
    guard(|| {
        if out.is_null() {
            return fail(CpStatus::NullPointer, "out is NULL");
        }
        if !(m > 0.0) || !height.is_finite() {
            return fail(CpStatus::InvalidArgument, "mass must be positive and height finite");
        }
        let q = catenoid_exact(m, height);
        *out = CpCatenoidQuantities {
            m: q.m,
            height: q.height,
            disk_radius: q.disk_radius,
            disk_area: q.disk_area,
            band_area: q.band_area,
            contact_cosine: q.contact_cosine,
            free_energy_mass: q.free_energy_mass,
            profile_convexity: q.profile_convexity,
        };
        CpStatus::Ok
    })
}

unsafe fn put_support(out: *mut *mut CpSupport, inner: SupportSurface) -> CpStatus {
    *out = Box::into_raw(Box::new(CpSupport { inner }));
    CpStatus::Ok
}

/// The plane `x₃ = 0`.
///
/// # Safety
/// `out` must be NULL or a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn cp_support_plane(out: *mut *mut CpSupport) -> CpStatus {
    guard(|| {
        if out.is_null() {
            return fail(CpStatus::NullPointer, "out is NULL");
        }
        put_support(out, SupportSurface::plane())
    })
}

/// Half-catenoid of mass `m` closed by a cap of depth `cap_depth`.
///
/// # Safety
/// `out` must be NULL or a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn cp_support_catenoid(m: f64, cap_depth: f64, out: *mut *mut CpSupport) -> CpStatus {
    guard(|| {
        if out.is_null() {
            return fail(CpStatus::NullPointer, "out is NULL");
        }
        match AxisProfile::catenoid(m, cap_depth, vec![]) {
            Ok(p) => put_support(out, SupportSurface::Axisymmetric(p)),
            Err(e) => fail(CpStatus::InvalidArgument, e.to_string()),
        }
    })
}

/// Neck of radius `neck` whose mean curvature is the sum of `n` bumps given
/// as parallel arrays.
///
/// # Safety
/// The three arrays must hold `n` values each; `out` must be a valid handle slot.
#[no_mangle]
pub unsafe extern "C" fn cp_support_curvature_bump(
    neck: f64,
    cap_depth: f64,
    centers: *const f64,
    widths: *const f64,
    amplitudes: *const f64,
    n: usize,
    out: *mut *mut CpSupport,
) -> CpStatus {
    guard(|| {
        if out.is_null() || (n > 0 && (centers.is_null() || widths.is_null() || amplitudes.is_null())) {
            return fail(CpStatus::NullPointer, "NULL argument");
        }
        let bumps: Vec<Bump> = (0..n).map(|k| Bump::new(*centers.add(k), *widths.add(k), *amplitudes.add(k))).collect();
        match AxisProfile::curvature_bump(neck, cap_depth, bumps) {
            Ok(p) => put_support(out, SupportSurface::Axisymmetric(p)),
            Err(e) => fail(CpStatus::InvalidArgument, e.to_string()),
        }
    })
}

/// # Safety
/// `support` must be NULL or a handle from a `cp_support_*` constructor, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cp_support_free(support: *mut CpSupport) {
    if !support.is_null() {
        drop(Box::from_raw(support));
    }
}

/// Extrapolated exterior mass from `n ≥ 3` increasing radii.
///
/// # Safety
/// `support` must be a live handle, `radii` must hold `n` values and `mass` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cp_exterior_mass(support: *const CpSupport, radii: *const f64, n: usize, mass: *mut f64) -> CpStatus {
    guard(|| {
        if support.is_null() || radii.is_null() || mass.is_null() {
            return fail(CpStatus::NullPointer, "NULL argument");
        }
        let radii = std::slice::from_raw_parts(radii, n);
        let support = &*support;
        match exterior_mass(&support.inner, radii) {
            Ok(r) => {
                *mass = r.mass;
                CpStatus::Ok
            }
            Err(e) => fail(CpStatus::InvalidArgument, e.to_string()),
        }
    })
}

/// Continuation sweep over `0, t_step, …, t_max` from the default seed with
/// `rings` rings. On non-convergence the partial sweep is still returned in
/// `out` together with `CP_STATUS_NON_CONVERGENCE`.
///
/// # Safety
/// `support` must be a live handle and `out` a valid handle slot.
#[no_mangle]
pub unsafe extern "C" fn cp_sweep_run(support: *const CpSupport, t_max: f64, t_step: f64, rings: usize, out: *mut *mut CpSweep) -> CpStatus {
    guard(|| {
        if support.is_null() || out.is_null() {
            return fail(CpStatus::NullPointer, "NULL argument");
        }
        *out = ptr::null_mut();
        if !(t_step > 0.0) || !(t_max >= 0.0) || rings == 0 {
            return fail(CpStatus::InvalidArgument, "need t_step > 0, t_max ≥ 0 and rings > 0");
        }
        let support = &*support;
        let SupportSurface::Axisymmetric(profile) = &support.inner else {
            return fail(CpStatus::InvalidArgument, "sweeps need an axisymmetric support");
        };
        let n = (t_max / t_step - 1e-9).ceil().max(0.0) as usize;
        let grid: Vec<f64> = (0..=n).map(|k| ((k as f64 * t_step * 1e12).round() / 1e12).min(t_max)).collect();
        let seed = match default_seed(profile, rings) {
            Ok(s) => s,
            Err(e) => return fail(solver_status(&e), e.to_string()),
        };
        match continuation_sweep(profile, &grid, seed, &SolverOptions::default()) {
            Ok(o) => {
                *out = Box::into_raw(Box::new(CpSweep { inner: o }));
                CpStatus::Ok
            }
            Err(f) => {
                let status = solver_status(&f.source);
                set_error(f.to_string());
                *out = Box::into_raw(Box::new(CpSweep { inner: f.partial }));
                status
            }
        }
    })
}

/// Number of records; 0 for NULL.
///
/// # Safety
/// `sweep` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cp_sweep_len(sweep: *const CpSweep) -> usize {
    if sweep.is_null() {
        0
    } else {
        (&*sweep).inner.records.len()
    }
}

/// # Safety
/// `sweep` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cp_sweep_record(sweep: *const CpSweep, index: usize, out: *mut CpSweepRecord) -> CpStatus {
    guard(|| {
        if sweep.is_null() || out.is_null() {
            return fail(CpStatus::NullPointer, "NULL argument");
        }
        let sweep = &*sweep;
        let Some(r) = sweep.inner.records.get(index) else {
            return fail(CpStatus::InvalidArgument, format!("record {index} out of range"));
        };
        *out = CpSweepRecord {
            t: r.t,
            area: r.area,
            lateral_area: r.lateral_area,
            mf: r.mf,
            residual: r.residual,
            grad_norm: r.grad_norm,
            kappa: r.kappa.unwrap_or(f64::NAN),
            components: r.components,
            min_radius: r.min_radius,
            iters: r.iters,
        };
        CpStatus::Ok
    })
}

/// The sweep as CSV text; release with `cp_string_free`. NULL on failure.
///
/// # Safety
/// `sweep` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cp_sweep_csv(sweep: *const CpSweep) -> *mut c_char {
    if sweep.is_null() {
        set_error("sweep is NULL");
        return ptr::null_mut();
    }
    let sweep = &*sweep;
    match CString::new(sweep_csv(&sweep.inner.records)) {
        Ok(s) => s.into_raw(),
        Err(_) => {
            set_error("CSV contains NUL");
            ptr::null_mut()
        }
    }
}

/// # Safety
/// `s` must be NULL or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `sweep` must be NULL or a handle from `cp_sweep_run`, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cp_sweep_free(sweep: *mut CpSweep) {
    if !sweep.is_null() {
        drop(Box::from_raw(sweep));
    }
}
