//! C ABI for the spin-boson toolkit.
//!
//! Conventions:
//! * handles are opaque pointers created by `*_new`/`*_run` functions
//!   and released by the matching `*_free`; passing them to any other
//!   library is undefined behaviour;
//! * every fallible function returns an [`SbmStatus`] code (0 success)
//!   and writes results through out-pointers;
//! * the status codes match the `sbm` CLI exit codes (1 usage, 2
//!   validation, 3 numerical);
//! * on failure, `sbm_last_error` returns a UTF-8 message for the
//!   current thread.
//!
//! The pointer contract is uniform — handles must come from this
//! library and buffers must satisfy the documented lengths — so it is
//! stated here once rather than per function.
#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::CString;
use std::os::raw::c_char;

use sbm_core::error::SbmError;
use sbm_core::evolve::{self, TimeSeries};
use sbm_core::experiments::{self, AuditMode, ResonanceScan, ScanOptions};
use sbm_core::model::{
    suggested_truncation, validated, DriveKind, DriveSpec, InitialState, ModelParams,
    NumericsConfig, RampProfile,
};
use sbm_core::{analytic, Result};

/// Status code returned by every fallible call.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq)]
pub enum SbmStatus {
    Ok = 0,
    /// Null pointer, bad enum value, undersized buffer.
    Usage = 1,
    /// Parameters violate a model invariant.
    Invalid = 2,
    /// Numerical failure (truncation, convergence, missing peaks).
    Numeric = 3,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: &str) {
    let owned = CString::new(message.replace('\0', "?")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = owned);
}

fn status_of(err: &SbmError) -> SbmStatus {
    match err {
        SbmError::Config(_) | SbmError::Io(_) => SbmStatus::Usage,
        SbmError::InvalidParams(_)
        | SbmError::UnsupportedRegime(_)
        | SbmError::RangeExceeded(_)
        | SbmError::NoOscillation(_)
        | SbmError::DomainExceeded(_)
        | SbmError::InconsistentMeasurement(_) => SbmStatus::Invalid,
        _ => SbmStatus::Numeric,
    }
}

fn fail(err: SbmError) -> SbmStatus {
    let status = status_of(&err);
    set_error(&err.to_string());
    status
}

fn usage(message: &str) -> SbmStatus {
    set_error(message);
    SbmStatus::Usage
}

/// Opaque model + numerics handle.
pub struct SbmSystem {
    params: ModelParams,
    cfg: NumericsConfig,
}

/// Opaque time-series handle.
pub struct SbmSeries {
    series: TimeSeries,
}

/// Opaque amplitude-scan handle.
pub struct SbmScan {
    scan: ResonanceScan,
}

/// Copy the current thread's last error message (NUL-terminated) into
/// `buffer`; returns the full message length in bytes excluding the
/// terminator. A null or undersized buffer leaves it untouched.
#[no_mangle]
pub unsafe extern "C" fn sbm_last_error(buffer: *mut c_char, capacity: usize) -> usize {
    LAST_ERROR.with(|slot| {
        let message = slot.borrow();
        let bytes = message.as_bytes_with_nul();
        if !buffer.is_null() && capacity >= bytes.len() {
            std::ptr::copy_nonoverlapping(bytes.as_ptr() as *const c_char, buffer, bytes.len());
        }
        bytes.len() - 1
    })
}

/// Create a system handle. `drive_kind`: 0 none, 1 photon, 2 atom.
/// Frequencies are in units of the photon frequency; the numerics
/// default to the automatically selected truncation, `dt` 1e-3, and a
/// horizon of 50π.
#[no_mangle]
pub unsafe extern "C" fn sbm_system_new(
    epsilon: f64,
    g: f64,
    drive_kind: i32,
    amplitude: f64,
    rise_time: f64,
    out: *mut *mut SbmSystem,
) -> SbmStatus {
    if out.is_null() {
        return usage("out pointer is null");
    }
    let kind = match drive_kind {
        0 => DriveKind::None,
        1 => DriveKind::Photon,
        2 => DriveKind::Atom,
        other => return usage(&format!("unknown drive kind {other}")),
    };
    let drive = DriveSpec { kind, amplitude, ramp: RampProfile { rise_time } };
    let params = ModelParams::new(epsilon, g, drive);
    let cfg = NumericsConfig::for_params(&params);
    if let Err(err) = validated(&params, &cfg) {
        return fail(err);
    }
    *out = Box::into_raw(Box::new(SbmSystem { params, cfg }));
    SbmStatus::Ok
}

/// Override the numerical configuration. Zero keeps the current value
/// (`n_max = 0` re-derives the automatic truncation).
#[no_mangle]
pub unsafe extern "C" fn sbm_system_set_numerics(
    system: *mut SbmSystem,
    n_max: usize,
    dt: f64,
    t_end: f64,
    sample_stride: usize,
    seed: u64,
) -> SbmStatus {
    let Some(system) = system.as_mut() else {
        return usage("system pointer is null");
    };
    system.cfg.n_max =
        if n_max == 0 { suggested_truncation(&system.params) } else { n_max };
    if dt > 0.0 {
        system.cfg.dt = dt;
    }
    if t_end > 0.0 {
        system.cfg.t_end = t_end;
    }
    if sample_stride > 0 {
        system.cfg.sample_stride = sample_stride;
    }
    system.cfg.seed = seed;
    match validated(&system.params, &system.cfg) {
        Ok(()) => SbmStatus::Ok,
        Err(err) => fail(err),
    }
}

#[no_mangle]
pub unsafe extern "C" fn sbm_system_free(system: *mut SbmSystem) {
    if !system.is_null() {
        drop(Box::from_raw(system));
    }
}

fn run_dynamics(system: &SbmSystem) -> Result<TimeSeries> {
    let initial = experiments::make_initial(&system.params, system.cfg.n_max, InitialState::Polaron)?;
    evolve::run_any(&system.params, &initial, &system.cfg)
}

/// Propagate from the default initial state and hand back a series
/// handle.
#[no_mangle]
pub unsafe extern "C" fn sbm_dynamics_run(
    system: *const SbmSystem,
    out: *mut *mut SbmSeries,
) -> SbmStatus {
    let Some(system) = system.as_ref() else {
        return usage("system pointer is null");
    };
    if out.is_null() {
        return usage("out pointer is null");
    }
    match run_dynamics(system) {
        Ok(series) => {
            *out = Box::into_raw(Box::new(SbmSeries { series }));
            SbmStatus::Ok
        }
        Err(err) => fail(err),
    }
}

#[no_mangle]
pub unsafe extern "C" fn sbm_series_len(series: *const SbmSeries) -> usize {
    series.as_ref().map_or(0, |s| s.series.len())
}

/// Copy series columns into caller buffers of length `len`; any column
/// pointer may be null to skip it.
#[no_mangle]
pub unsafe extern "C" fn sbm_series_copy(
    series: *const SbmSeries,
    t: *mut f64,
    sigma_z: *mut f64,
    sigma_x: *mut f64,
    norm: *mut f64,
    len: usize,
) -> SbmStatus {
    let Some(handle) = series.as_ref() else {
        return usage("series pointer is null");
    };
    let n = handle.series.len();
    if len < n {
        return usage(&format!("buffer length {len} below series length {n}"));
    }
    let copy = |dst: *mut f64, src: &[f64]| {
        if !dst.is_null() {
            std::ptr::copy_nonoverlapping(src.as_ptr(), dst, n);
        }
    };
    copy(t, &handle.series.t);
    copy(sigma_z, &handle.series.sigma_z);
    copy(sigma_x, &handle.series.sigma_x);
    copy(norm, &handle.series.norm);
    SbmStatus::Ok
}

#[no_mangle]
pub unsafe extern "C" fn sbm_series_free(series: *mut SbmSeries) {
    if !series.is_null() {
        drop(Box::from_raw(series));
    }
}

/// Long-time mean of the series' sigma_z over `[0, t_long]`.
#[no_mangle]
pub unsafe extern "C" fn sbm_series_mean(
    series: *const SbmSeries,
    t_long: f64,
    out: *mut f64,
) -> SbmStatus {
    let Some(handle) = series.as_ref() else {
        return usage("series pointer is null");
    };
    if out.is_null() {
        return usage("out pointer is null");
    }
    match evolve::mean_over_time(&handle.series, t_long) {
        Ok(mean) => {
            *out = mean;
            SbmStatus::Ok
        }
        Err(err) => fail(err),
    }
}

/// Closed-form `⟨σz(t)⟩` for the photon-driven system at ε = 0.
#[no_mangle]
pub unsafe extern "C" fn sbm_closed_sigma_z_photon(
    system: *const SbmSystem,
    t: f64,
    out: *mut f64,
) -> SbmStatus {
    let Some(system) = system.as_ref() else {
        return usage("system pointer is null");
    };
    if out.is_null() {
        return usage("out pointer is null");
    }
    match analytic::closed_sigma_z_photon(&system.params, t) {
        Ok(value) => {
            *out = value;
            SbmStatus::Ok
        }
        Err(err) => fail(err),
    }
}

/// Closed-form `⟨σz(t)⟩` for the atom-driven system at ε = 0.
#[no_mangle]
pub unsafe extern "C" fn sbm_closed_sigma_z_atom(
    system: *const SbmSystem,
    t: f64,
    out: *mut f64,
) -> SbmStatus {
    let Some(system) = system.as_ref() else {
        return usage("system pointer is null");
    };
    if out.is_null() {
        return usage("out pointer is null");
    }
    match analytic::closed_sigma_z_atom(&system.params, t) {
        Ok(value) => {
            *out = value;
            SbmStatus::Ok
        }
        Err(err) => fail(err),
    }
}

/// First-kind Bessel function `J_m(x)` for integer order `m ≤ 60`,
/// `0 ≤ x ≤ 60`.
#[no_mangle]
pub unsafe extern "C" fn sbm_bessel_j(m: u32, x: f64, out: *mut f64) -> SbmStatus {
    if out.is_null() {
        return usage("out pointer is null");
    }
    match analytic::bessel_j(m, x) {
        Ok(value) => {
            *out = value;
            SbmStatus::Ok
        }
        Err(err) => fail(err),
    }
}

/// Resonant drive amplitudes `mω²/4g` for `m = 1..=m_max`, written to
/// `out` (capacity `capacity`); `written` receives the count.
#[no_mangle]
pub unsafe extern "C" fn sbm_resonance_positions(
    g: f64,
    m_max: u32,
    out: *mut f64,
    capacity: usize,
    written: *mut usize,
) -> SbmStatus {
    if out.is_null() || written.is_null() {
        return usage("out pointers are null");
    }
    let positions = analytic::resonance_positions(g, 1.0, m_max);
    if positions.len() > capacity {
        return usage(&format!(
            "capacity {capacity} below {} resonance positions",
            positions.len()
        ));
    }
    std::ptr::copy_nonoverlapping(positions.as_ptr(), out, positions.len());
    *written = positions.len();
    SbmStatus::Ok
}

/// Coupling strength from two measured resonance means.
#[no_mangle]
pub unsafe extern "C" fn sbm_estimate_coupling(
    mean_m: f64,
    mean_mi: f64,
    m: u32,
    i: u32,
    out: *mut f64,
) -> SbmStatus {
    if out.is_null() {
        return usage("out pointer is null");
    }
    match analytic::estimate_coupling(mean_m, mean_mi, m, i) {
        Ok(value) => {
            *out = value;
            SbmStatus::Ok
        }
        Err(err) => fail(err),
    }
}

/// Scan the long-time mean over `[min, max]` in steps of `step` and
/// hand back a scan handle (peaks included).
#[no_mangle]
pub unsafe extern "C" fn sbm_amplitude_scan(
    system: *const SbmSystem,
    min: f64,
    max: f64,
    step: f64,
    t_long: f64,
    out: *mut *mut SbmScan,
) -> SbmStatus {
    let Some(system) = system.as_ref() else {
        return usage("system pointer is null");
    };
    if out.is_null() {
        return usage("out pointer is null");
    }
    if step.is_nan() || step <= 0.0 || max.is_nan() || max <= min {
        return usage("need max > min and step > 0");
    }
    let grid = experiments::amplitude_grid(min, max, step);
    let options = ScanOptions {
        dt: system.cfg.dt,
        sample_stride: system.cfg.sample_stride,
        audit: AuditMode::Off,
        ..ScanOptions::default()
    };
    match experiments::amplitude_scan(
        &system.params,
        &grid,
        t_long,
        InitialState::Polaron,
        &options,
    ) {
        Ok(scan) => {
            *out = Box::into_raw(Box::new(SbmScan { scan }));
            SbmStatus::Ok
        }
        Err(err) => fail(err),
    }
}

#[no_mangle]
pub unsafe extern "C" fn sbm_scan_len(scan: *const SbmScan) -> usize {
    scan.as_ref().map_or(0, |s| s.scan.grid.len())
}

/// Copy the amplitude grid and means into caller buffers of length
/// `len`; either pointer may be null to skip that column.
#[no_mangle]
pub unsafe extern "C" fn sbm_scan_copy(
    scan: *const SbmScan,
    amplitudes: *mut f64,
    means: *mut f64,
    len: usize,
) -> SbmStatus {
    let Some(handle) = scan.as_ref() else {
        return usage("scan pointer is null");
    };
    let n = handle.scan.grid.len();
    if len < n {
        return usage(&format!("buffer length {len} below scan length {n}"));
    }
    if !amplitudes.is_null() {
        std::ptr::copy_nonoverlapping(handle.scan.grid.as_ptr(), amplitudes, n);
    }
    if !means.is_null() {
        std::ptr::copy_nonoverlapping(handle.scan.means.as_ptr(), means, n);
    }
    SbmStatus::Ok
}

#[no_mangle]
pub unsafe extern "C" fn sbm_scan_peak_count(scan: *const SbmScan) -> usize {
    scan.as_ref().map_or(0, |s| s.scan.peaks.len())
}

/// Fetch one detected peak by index.
#[no_mangle]
pub unsafe extern "C" fn sbm_scan_peak(
    scan: *const SbmScan,
    index: usize,
    position: *mut f64,
    mean: *mut f64,
    m: *mut u32,
) -> SbmStatus {
    let Some(handle) = scan.as_ref() else {
        return usage("scan pointer is null");
    };
    let Some(peak) = handle.scan.peaks.get(index) else {
        return usage(&format!("peak index {index} out of range"));
    };
    if !position.is_null() {
        *position = peak.position;
    }
    if !mean.is_null() {
        *mean = peak.mean;
    }
    if !m.is_null() {
        *m = peak.m;
    }
    SbmStatus::Ok
}

#[no_mangle]
pub unsafe extern "C" fn sbm_scan_free(scan: *mut SbmScan) {
    if !scan.is_null() {
        drop(Box::from_raw(scan));
    }
}
