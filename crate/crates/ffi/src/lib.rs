//! C ABI over `hopf_futaki`.
//!
//! Every fallible call returns an [`HfStatus`]. On failure the message is
//! kept per thread and can be fetched with [`hf_last_error`]. Strings handed
//! out by this library must be released with [`hf_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use hopf_futaki::futaki::{certified_volume, futaki_report, IntegrationConfig, SamplingMethod};
use hopf_futaki::fields::invariant_fields;
use hopf_futaki::io::{field_json, parse_manifold, Json, ManifoldFile};
use hopf_futaki::resonance::RESONANCE_TOL;
use hopf_futaki::{EquivariantVolume, Error, NormalFormMap};
use num_complex::Complex64;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Invalid = 4,
    NotCertified = 5,
    Numerical = 6,
    Panic = 7,
}

/// Opaque normal-form contraction.
pub struct HfManifold {
    map: NormalFormMap,
}

/// Opaque equivariant volume form.
pub struct HfVolume {
    vol: EquivariantVolume,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HfMethod {
    Mc = 0,
    Qmc = 1,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NUL removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> HfStatus {
    match e {
        Error::Parse(_) | Error::Json(_) => HfStatus::Parse,
        Error::InvalidEigenvalues(_)
        | Error::Validation(_)
        | Error::InvalidParameter(_)
        | Error::DimensionMismatch { .. } => HfStatus::Invalid,
        Error::NotCertified { .. } | Error::NoAdmissibleT { .. } => HfStatus::NotCertified,
        _ => HfStatus::Numerical,
    }
}

fn guard(f: impl FnOnce() -> Result<(), HfStatus>) -> HfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HfStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("panic inside hopf_futaki".into());
            HfStatus::Panic
        }
    }
}

fn lib<T>(r: hopf_futaki::Result<T>) -> Result<T, HfStatus> {
    r.map_err(|e| {
        set_error(e.to_string());
        status_of(&e)
    })
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, HfStatus> {
    if p.is_null() {
        set_error("null string argument".into());
        return Err(HfStatus::NullPointer);
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error("string argument is not UTF-8".into());
        HfStatus::InvalidUtf8
    })
}

unsafe fn ref_arg<'a, T>(p: *const T) -> Result<&'a T, HfStatus> {
    p.as_ref().ok_or_else(|| {
        set_error("null handle".into());
        HfStatus::NullPointer
    })
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), HfStatus> {
    if out.is_null() {
        set_error("null output pointer".into());
        return Err(HfStatus::NullPointer);
    }
    out.write(value);
    Ok(())
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s).expect("JSON has no interior NUL").into_raw()
}

/// Message of the last failed call on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn hf_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn hf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses and validates a manifold description.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hf_manifold_from_json(json: *const c_char, out: *mut *mut HfManifold) -> HfStatus {
    guard(|| {
        let text = str_arg(json)?;
        let map = lib(parse_manifold(text))?;
        write_out(out, Box::into_raw(Box::new(HfManifold { map })))
    })
}

/// # Safety
/// `m` must come from this library and not have been freed. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn hf_manifold_free(m: *mut HfManifold) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Complex dimension, or 0 for NULL.
///
/// # Safety
/// `m` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hf_manifold_dim(m: *const HfManifold) -> usize {
    m.as_ref().map_or(0, |m| m.map.dim())
}

/// Manifold description as JSON.
///
/// # Safety
/// `m` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hf_manifold_to_json(m: *const HfManifold, out: *mut *mut c_char) -> HfStatus {
    guard(|| {
        let m = ref_arg(m)?;
        let json = ManifoldFile::from_map(&m.map).to_json().to_pretty();
        write_out(out, into_c_string(json))
    })
}

/// JSON array of invariant polynomial fields, each a list of terms.
///
/// # Safety
/// `m` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hf_invariant_fields_json(m: *const HfManifold, out: *mut *mut c_char) -> HfStatus {
    guard(|| {
        let m = ref_arg(m)?;
        let fields = lib(invariant_fields(&m.map, RESONANCE_TOL))?;
        let json = Json::Array(fields.iter().map(field_json).collect()).to_pretty();
        write_out(out, into_c_string(json))
    })
}

/// Smallest grid `t` for which the `d_t`-conjugate certifies the shell.
/// Writes `t` and a new handle for the conjugated map.
///
/// # Safety
/// `m` must be a live handle; `out_t` and `out_map` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hf_manifold_autotune(
    m: *const HfManifold,
    c: f64,
    outer_radius: f64,
    out_t: *mut f64,
    out_map: *mut *mut HfManifold,
) -> HfStatus {
    guard(|| {
        let m = ref_arg(m)?;
        let (map, t, _) = lib(certified_volume(&m.map, c, outer_radius))?;
        write_out(out_t, t)?;
        write_out(out_map, Box::into_raw(Box::new(HfManifold { map })))
    })
}

/// Equivariant volume for a map that certifies the shell as given.
///
/// # Safety
/// `m` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hf_volume_new(
    m: *const HfManifold,
    c: f64,
    outer_radius: f64,
    out: *mut *mut HfVolume,
) -> HfStatus {
    guard(|| {
        let m = ref_arg(m)?;
        let vol = lib(EquivariantVolume::new(&m.map, c, outer_radius))?;
        write_out(out, Box::into_raw(Box::new(HfVolume { vol })))
    })
}

/// # Safety
/// `v` must come from this library and not have been freed. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn hf_volume_free(v: *mut HfVolume) {
    if !v.is_null() {
        drop(Box::from_raw(v));
    }
}

/// Density at the point with coordinates `re[i] + i·im[i]`.
///
/// # Safety
/// `v` must be a live handle; `re` and `im` must point to `n` doubles;
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hf_volume_eval(
    v: *const HfVolume,
    re: *const f64,
    im: *const f64,
    n: usize,
    out: *mut f64,
) -> HfStatus {
    guard(|| {
        let v = ref_arg(v)?;
        if re.is_null() || im.is_null() {
            set_error("null coordinate array".into());
            return Err(HfStatus::NullPointer);
        }
        let re = std::slice::from_raw_parts(re, n);
        let im = std::slice::from_raw_parts(im, n);
        let z: Vec<Complex64> = re.iter().zip(im).map(|(&a, &b)| Complex64::new(a, b)).collect();
        let (f, _) = lib(v.vol.eval(&z))?;
        write_out(out, f)
    })
}

/// Futaki estimates for every invariant field, as a JSON object. The map is
/// conjugated first when it does not certify the shell.
///
/// # Safety
/// `m` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hf_futaki_json(
    m: *const HfManifold,
    c: f64,
    outer_radius: f64,
    samples: u64,
    seed: u64,
    method: HfMethod,
    out: *mut *mut c_char,
) -> HfStatus {
    guard(|| {
        let m = ref_arg(m)?;
        let cfg = IntegrationConfig {
            samples,
            seed,
            method: match method {
                HfMethod::Mc => SamplingMethod::Mc,
                HfMethod::Qmc => SamplingMethod::Qmc,
            },
            ..IntegrationConfig::default()
        };
        let report = lib(futaki_report(&m.map, None, c, outer_radius, &cfg))?;
        let entries = report
            .entries
            .iter()
            .map(|e| {
                Json::object()
                    .with("field", field_json(&e.field))
                    .with("value", Json::complex(e.estimate.value))
                    .with("stderr", Json::Real(e.estimate.stderr))
                    .with("scale", Json::Real(e.estimate.scale))
                    .with("vanishing", Json::Bool(e.vanishing))
            })
            .collect();
        let json = Json::object()
            .with("conjugation_t", Json::Real(report.conjugation_t))
            .with("fields", Json::Array(entries))
            .with("all_vanishing", Json::Bool(report.all_vanishing()))
            .to_pretty();
        write_out(out, into_c_string(json))
    })
}
