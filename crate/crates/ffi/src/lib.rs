//! C ABI over the eplab solver.
//!
//! Every object crosses the boundary as an opaque pointer created by an
//! `eplab_*_new` call and released by the matching `eplab_*_free`. Fallible
//! calls return an [`EplabStatus`]; on failure the message is kept per thread
//! and read with [`eplab_last_error_message`]. Panics never unwind into C.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use eplab::dynamics::EpState;
use eplab::initial::InitialData;
use eplab::integrate::{integrate, Model, RunOptions, SimParams};
use eplab::io::snapshot::{read_snapshot, write_snapshot};
use eplab::spectral::{self, TorusGrid, VelocityField};
use eplab::Error;

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EplabStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    BufferTooSmall = 3,
    BlowUp = 4,
    Io = 5,
    Panic = 6,
}

/// Periodic box `[0, length)^d` sampled on `n^d` points.
pub struct EplabGrid {
    grid: TorusGrid,
}

/// Real velocity field on a grid.
pub struct EplabField {
    field: VelocityField,
}

/// An EP_alpha integration in progress.
pub struct EplabSimulation {
    state: EpState,
    params: SimParams,
}

/// Integrator settings. `s` is the Sobolev index of the norm guard.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct EplabParams {
    pub alpha: f64,
    pub s: f64,
    pub cfl: f64,
    pub dt_max: f64,
    pub blowup_factor: f64,
    pub sample_every: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> EplabStatus {
    match e {
        Error::BlowUp(_) => EplabStatus::BlowUp,
        Error::Io { .. } | Error::Snapshot { .. } | Error::Csv { .. } => EplabStatus::Io,
        _ => EplabStatus::InvalidArgument,
    }
}

fn fail(status: EplabStatus, msg: impl Into<String>) -> EplabStatus {
    set_error(msg.into());
    status
}

fn guard(body: impl FnOnce() -> Result<(), EplabStatus>) -> EplabStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            EplabStatus::Ok
        }
        Ok(Err(s)) => s,
        Err(_) => fail(EplabStatus::Panic, "internal panic"),
    }
}

fn check<T>(r: eplab::Result<T>) -> Result<T, EplabStatus> {
    r.map_err(|e| fail(status_of(&e), e.to_string()))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, EplabStatus> {
    p.as_ref().ok_or_else(|| fail(EplabStatus::NullPointer, format!("{what} is null")))
}

unsafe fn out_ptr<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, EplabStatus> {
    p.as_mut().ok_or_else(|| fail(EplabStatus::NullPointer, format!("{what} is null")))
}

unsafe fn path_arg(p: *const c_char) -> Result<PathBuf, EplabStatus> {
    if p.is_null() {
        return Err(fail(EplabStatus::NullPointer, "path is null"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map(PathBuf::from)
        .map_err(|_| fail(EplabStatus::InvalidArgument, "path is not valid UTF-8"))
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next eplab call on the same thread.
#[no_mangle]
pub extern "C" fn eplab_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn eplab_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn eplab_grid_new(dim: u32, n: u32, length: f64, out: *mut *mut EplabGrid) -> EplabStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let grid = check(TorusGrid::new(dim as usize, n as usize, length))?;
        *out = Box::into_raw(Box::new(EplabGrid { grid }));
        Ok(())
    })
}

/// Number of samples per component, `n^d`; 0 for a null grid.
///
/// # Safety
/// `grid` must be null or a live grid.
#[no_mangle]
pub unsafe extern "C" fn eplab_grid_points(grid: *const EplabGrid) -> usize {
    grid.as_ref().map_or(0, |g| g.grid.len())
}

/// # Safety
/// `grid` must be null or come from [`eplab_grid_new`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn eplab_grid_free(grid: *mut EplabGrid) {
    if !grid.is_null() {
        drop(Box::from_raw(grid));
    }
}

/// Field from `d·n^d` samples laid out component by component.
///
/// # Safety
/// `samples` must point to `len` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn eplab_field_new(
    grid: *const EplabGrid,
    samples: *const f64,
    len: usize,
    out: *mut *mut EplabField,
) -> EplabStatus {
    guard(|| {
        let g = deref(grid, "grid")?.grid;
        let out = out_ptr(out, "out")?;
        if samples.is_null() {
            return Err(fail(EplabStatus::NullPointer, "samples is null"));
        }
        let want = g.dim() * g.len();
        if len != want {
            return Err(fail(EplabStatus::InvalidArgument, format!("expected {want} samples, got {len}")));
        }
        let data = std::slice::from_raw_parts(samples, len);
        let components = data.chunks(g.len()).map(<[f64]>::to_vec).collect();
        let field = check(VelocityField::new(g, components))?;
        *out = Box::into_raw(Box::new(EplabField { field }));
        Ok(())
    })
}

/// Seeded band-limited field with modes `0 < |j| <= k_max`, scaled to
/// `||u||_{H^s} = norm_hs`.
///
/// # Safety
/// `grid` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn eplab_field_bandlimited(
    grid: *const EplabGrid,
    k_max: usize,
    seed: u64,
    s: f64,
    norm_hs: f64,
    out: *mut *mut EplabField,
) -> EplabStatus {
    guard(|| {
        let g = deref(grid, "grid")?.grid;
        let out = out_ptr(out, "out")?;
        let field = check(InitialData::Bandlimited { k_max, seed, norm_hs }.generate(&g, s))?;
        *out = Box::into_raw(Box::new(EplabField { field }));
        Ok(())
    })
}

/// Total sample count `d·n^d`; 0 for a null field.
///
/// # Safety
/// `field` must be null or live.
#[no_mangle]
pub unsafe extern "C" fn eplab_field_len(field: *const EplabField) -> usize {
    field.as_ref().map_or(0, |f| f.field.dim() * f.field.grid().len())
}

/// Copies the samples into `buf`, which must hold [`eplab_field_len`] doubles.
///
/// # Safety
/// `buf` must point to `cap` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn eplab_field_copy_samples(field: *const EplabField, buf: *mut f64, cap: usize) -> EplabStatus {
    guard(|| {
        let f = &deref(field, "field")?.field;
        if buf.is_null() {
            return Err(fail(EplabStatus::NullPointer, "buf is null"));
        }
        let need = f.dim() * f.grid().len();
        if cap < need {
            return Err(fail(EplabStatus::BufferTooSmall, format!("need {need} doubles, got {cap}")));
        }
        let dst = std::slice::from_raw_parts_mut(buf, need);
        for (chunk, c) in dst.chunks_mut(f.grid().len()).zip(f.components()) {
            chunk.copy_from_slice(c);
        }
        Ok(())
    })
}

/// `||u||_{H^s}`.
///
/// # Safety
/// `field` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn eplab_field_sobolev_norm(field: *const EplabField, s: f64, out: *mut f64) -> EplabStatus {
    guard(|| {
        let f = &deref(field, "field")?.field;
        *out_ptr(out, "out")? = spectral::sobolev_norm(f, s);
        Ok(())
    })
}

/// # Safety
/// `field` must be null or come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn eplab_field_free(field: *mut EplabField) {
    if !field.is_null() {
        drop(Box::from_raw(field));
    }
}

/// Writes an EPF1 snapshot.
///
/// # Safety
/// `field` must be live; `path` a NUL-terminated UTF-8 string.
#[no_mangle]
pub unsafe extern "C" fn eplab_snapshot_write(
    field: *const EplabField,
    time: f64,
    alpha: f64,
    path: *const c_char,
) -> EplabStatus {
    guard(|| {
        let f = &deref(field, "field")?.field;
        let path = path_arg(path)?;
        check(write_snapshot(f, time, alpha, &path))
    })
}

/// Reads an EPF1 snapshot. `time` and `alpha` may be null.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` writable; `time` and
/// `alpha` null or writable.
#[no_mangle]
pub unsafe extern "C" fn eplab_snapshot_read(
    path: *const c_char,
    out: *mut *mut EplabField,
    time: *mut f64,
    alpha: *mut f64,
) -> EplabStatus {
    guard(|| {
        let path = path_arg(path)?;
        let out = out_ptr(out, "out")?;
        let (field, t, a) = check(read_snapshot(&path))?;
        if let Some(x) = time.as_mut() {
            *x = t;
        }
        if let Some(x) = alpha.as_mut() {
            *x = a;
        }
        *out = Box::into_raw(Box::new(EplabField { field }));
        Ok(())
    })
}

/// Defaults for dimension `dim`.
#[no_mangle]
pub extern "C" fn eplab_params_default(dim: u32) -> EplabParams {
    let p = SimParams::defaults_for(dim as usize);
    EplabParams {
        alpha: p.alpha,
        s: p.s,
        cfl: p.cfl,
        dt_max: p.dt_max,
        blowup_factor: p.blowup_factor,
        sample_every: p.sample_every,
    }
}

/// Starts a simulation at `t = 0` from a copy of `u0`.
///
/// # Safety
/// `u0` and `params` must be live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn eplab_simulation_new(
    u0: *const EplabField,
    params: *const EplabParams,
    out: *mut *mut EplabSimulation,
) -> EplabStatus {
    guard(|| {
        let u0 = &deref(u0, "u0")?.field;
        let p = deref(params, "params")?;
        let out = out_ptr(out, "out")?;
        let params = SimParams {
            alpha: p.alpha,
            s: p.s,
            t_end: 1.0,
            cfl: p.cfl,
            dt_max: p.dt_max,
            blowup_factor: p.blowup_factor,
            sample_every: p.sample_every,
        };
        check(params.validate(u0.dim()))?;
        let state = check(EpState::new(u0.clone(), 0.0, p.alpha))?;
        *out = Box::into_raw(Box::new(EplabSimulation { state, params }));
        Ok(())
    })
}

/// Integrates for `duration` time units. The blow-up guard compares against
/// the norm at the start of this call. On `EPLAB_STATUS_BLOW_UP` the
/// simulation holds the state that tripped the guard, or the last finite
/// state if a stage went non-finite.
///
/// # Safety
/// `sim` must be live.
#[no_mangle]
pub unsafe extern "C" fn eplab_simulation_advance(sim: *mut EplabSimulation, duration: f64) -> EplabStatus {
    guard(|| {
        let sim = out_ptr(sim, "sim")?;
        let params = SimParams { t_end: duration, ..sim.params };
        let model = Model::ep_alpha(sim.state.alpha);
        match integrate(&sim.state.u, &params, &model, RunOptions::default()) {
            Ok(run) => {
                sim.state.u = run.final_state.u;
                sim.state.t += duration;
                Ok(())
            }
            Err(Error::BlowUp(b)) => {
                sim.state.u = b.last_state.u.clone();
                sim.state.t += b.last_state.t;
                Err(fail(EplabStatus::BlowUp, Error::BlowUp(b).to_string()))
            }
            Err(e) => Err(fail(status_of(&e), e.to_string())),
        }
    })
}

/// Current simulation time; NaN for a null simulation.
///
/// # Safety
/// `sim` must be null or live.
#[no_mangle]
pub unsafe extern "C" fn eplab_simulation_time(sim: *const EplabSimulation) -> f64 {
    sim.as_ref().map_or(f64::NAN, |s| s.state.t)
}

/// Copy of the current field, owned by the caller.
///
/// # Safety
/// `sim` must be live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn eplab_simulation_field(sim: *const EplabSimulation, out: *mut *mut EplabField) -> EplabStatus {
    guard(|| {
        let sim = deref(sim, "sim")?;
        let out = out_ptr(out, "out")?;
        *out = Box::into_raw(Box::new(EplabField { field: sim.state.u.clone() }));
        Ok(())
    })
}

/// # Safety
/// `sim` must be null or come from [`eplab_simulation_new`] and not be freed
/// twice.
#[no_mangle]
pub unsafe extern "C" fn eplab_simulation_free(sim: *mut EplabSimulation) {
    if !sim.is_null() {
        drop(Box::from_raw(sim));
    }
}
