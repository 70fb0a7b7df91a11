//! C ABI over `minkpoly`.
//!
//! Polygons cross the boundary as opaque `MpPolygon` handles. Tangent and
//! ambient vectors are flat `double` arrays of length `3n`, edge by edge.
//! Every fallible call returns an `MpStatus`; the message of the most recent
//! failure on the calling thread is available from `mp_last_error_message`.
//! Strings returned by the library must be released with `mp_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;

use minkpoly::connection::{coordinate_field, nijenhuis_norm};
use minkpoly::harness::{run_suite, SuiteConfig};
use minkpoly::kaehler::{apply_I, metric_g, omega, project_normal, project_tangent, AmbientVector};
use minkpoly::mink3::{mink_bracket, mink_dot, MinkVector};
use minkpoly::polygon::{sample, serialize, Polygon, SampleOptions};
use minkpoly::tangent::{calibrate, tangent_basis, TangentVector};
use minkpoly::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidMass = 3,
    NoClosure = 4,
    Parse = 5,
    Validation = 6,
    SingularOperator = 7,
    RankDeficient = 8,
    NotCalibrated = 9,
    NotTangent = 10,
    StepTooLarge = 11,
    Config = 12,
    Io = 13,
    BufferTooSmall = 14,
    VerificationFailed = 15,
    Panic = 16,
}

/// Opaque polygon handle.
pub struct MpPolygon {
    inner: Arc<Polygon>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

struct Fail(MpStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::InvalidMass(_) => MpStatus::InvalidMass,
            Error::NoClosure { .. } => MpStatus::NoClosure,
            Error::Parse(_) => MpStatus::Parse,
            Error::Validation(_) => MpStatus::Validation,
            Error::SingularOperator { .. } => MpStatus::SingularOperator,
            Error::RankDeficient { .. } => MpStatus::RankDeficient,
            Error::NotCalibrated => MpStatus::NotCalibrated,
            Error::BaseMismatch | Error::LengthMismatch { .. } => MpStatus::InvalidArgument,
            Error::NotTangent { .. } => MpStatus::NotTangent,
            Error::StepTooLarge(_) => MpStatus::StepTooLarge,
            Error::Config(_) => MpStatus::Config,
            Error::Io(_) => MpStatus::Io,
        };
        Fail(status, e.to_string())
    }
}

fn fail(status: MpStatus, msg: impl Into<String>) -> Fail {
    Fail(status, msg.into())
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> MpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            MpStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            MpStatus::Panic
        }
    }
}

unsafe fn polygon<'a>(p: *const MpPolygon) -> Result<&'a Arc<Polygon>, Fail> {
    p.as_ref().map(|h| &h.inner).ok_or_else(|| fail(MpStatus::NullPointer, "null polygon handle"))
}

unsafe fn slice<'a>(data: *const f64, len: usize) -> Result<&'a [f64], Fail> {
    if data.is_null() {
        return Err(fail(MpStatus::NullPointer, "null input array"));
    }
    Ok(std::slice::from_raw_parts(data, len))
}

unsafe fn slice_mut<'a>(data: *mut f64, len: usize) -> Result<&'a mut [f64], Fail> {
    if data.is_null() {
        return Err(fail(MpStatus::NullPointer, "null output array"));
    }
    Ok(std::slice::from_raw_parts_mut(data, len))
}

unsafe fn out_ptr<'a, T>(p: *mut T) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| fail(MpStatus::NullPointer, "null output pointer"))
}

fn vectors(flat: &[f64]) -> Vec<MinkVector> {
    flat.chunks_exact(3).map(|c| MinkVector::new(c[0], c[1], c[2])).collect()
}

fn write_vectors(out: &mut [f64], v: &[MinkVector]) {
    for (o, c) in out.chunks_exact_mut(3).zip(v) {
        o.copy_from_slice(&c.to_array());
    }
}

fn expect_len(p: &Polygon, len: usize) -> Result<(), Fail> {
    if len == 3 * p.n() {
        Ok(())
    } else {
        Err(fail(MpStatus::InvalidArgument, format!("expected {} doubles, got {len}", 3 * p.n())))
    }
}

fn to_c_string(s: String) -> Result<*mut c_char, Fail> {
    CString::new(s).map(CString::into_raw).map_err(|_| fail(MpStatus::Parse, "interior NUL in output"))
}

unsafe fn from_c_str<'a>(s: *const c_char) -> Result<&'a str, Fail> {
    if s.is_null() {
        return Err(fail(MpStatus::NullPointer, "null string"));
    }
    CStr::from_ptr(s).to_str().map_err(|_| fail(MpStatus::Parse, "input is not UTF-8"))
}

fn boxed(p: Polygon) -> *mut MpPolygon {
    Box::into_raw(Box::new(MpPolygon { inner: Arc::new(p) }))
}

/// Message of the last failed call on this thread, or NULL. Valid until the
/// next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn mp_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Samples a closed polygon. `masses` holds `masses_len` values; a single
/// value is broadcast to all `n` edges.
///
/// # Safety
/// `masses` must point to `masses_len` doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mp_polygon_sample(
    n: usize,
    masses: *const f64,
    masses_len: usize,
    seed: u64,
    out: *mut *mut MpPolygon,
) -> MpStatus {
    guard(|| {
        let out = out_ptr(out)?;
        let m = slice(masses, masses_len)?;
        let masses: Vec<f64> = match m.len() {
            1 => vec![m[0]; n],
            k if k == n => m.to_vec(),
            k => return Err(fail(MpStatus::InvalidArgument, format!("{k} masses for n = {n}"))),
        };
        *out = boxed(sample(n, &masses, seed, &SampleOptions::default())?);
        Ok(())
    })
}

/// Parses and validates a polygon document.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mp_polygon_from_json(json: *const c_char, out: *mut *mut MpPolygon) -> MpStatus {
    guard(|| {
        let out = out_ptr(out)?;
        *out = boxed(minkpoly::polygon::deserialize(from_c_str(json)?)?);
        Ok(())
    })
}

/// Serializes a polygon; free the result with `mp_string_free`.
///
/// # Safety
/// `p` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mp_polygon_to_json(p: *const MpPolygon, out: *mut *mut c_char) -> MpStatus {
    guard(|| {
        let out = out_ptr(out)?;
        *out = to_c_string(serialize(polygon(p)?))?;
        Ok(())
    })
}

/// # Safety
/// `p` must come from this library and not be used afterwards. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn mp_polygon_free(p: *mut MpPolygon) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// # Safety
/// `s` must come from this library and not be used afterwards. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn mp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Number of edges, or 0 for a NULL handle.
///
/// # Safety
/// `p` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mp_polygon_len(p: *const MpPolygon) -> usize {
    p.as_ref().map_or(0, |h| h.inner.n())
}

/// Copies the edges into `out` (`3n` doubles).
///
/// # Safety
/// `out` must hold `out_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn mp_polygon_edges(p: *const MpPolygon, out: *mut f64, out_len: usize) -> MpStatus {
    guard(|| {
        let p = polygon(p)?;
        expect_len(p, out_len)?;
        write_vectors(slice_mut(out, out_len)?, p.edges());
        Ok(())
    })
}

/// Copies the masses into `out` (`n` doubles).
///
/// # Safety
/// `out` must hold `out_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn mp_polygon_masses(p: *const MpPolygon, out: *mut f64, out_len: usize) -> MpStatus {
    guard(|| {
        let p = polygon(p)?;
        if out_len != p.n() {
            return Err(fail(MpStatus::InvalidArgument, format!("expected {} doubles, got {out_len}", p.n())));
        }
        slice_mut(out, out_len)?.copy_from_slice(p.masses());
        Ok(())
    })
}

/// `(u, v)` for 3-vectors.
///
/// # Safety
/// `u` and `v` must each point to 3 doubles.
#[no_mangle]
pub unsafe extern "C" fn mp_mink_dot(u: *const f64, v: *const f64, out: *mut f64) -> MpStatus {
    guard(|| {
        let (u, v) = (vectors(slice(u, 3)?), vectors(slice(v, 3)?));
        *out_ptr(out)? = mink_dot(u[0], v[0]);
        Ok(())
    })
}

/// `[u, v]` for 3-vectors.
///
/// # Safety
/// `u`, `v` and `out` must each point to 3 doubles.
#[no_mangle]
pub unsafe extern "C" fn mp_mink_bracket(u: *const f64, v: *const f64, out: *mut f64) -> MpStatus {
    guard(|| {
        let (u, v) = (vectors(slice(u, 3)?), vectors(slice(v, 3)?));
        write_vectors(slice_mut(out, 3)?, &[mink_bracket(u[0], v[0])]);
        Ok(())
    })
}

/// Dimension `2n − 6` of the calibrated slice at `p`.
///
/// # Safety
/// `p` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mp_tangent_dim(p: *const MpPolygon, out: *mut usize) -> MpStatus {
    guard(|| {
        *out_ptr(out)? = minkpoly::tangent::slice_dimension(polygon(p)?)?;
        Ok(())
    })
}

/// Writes a `g`-orthonormal basis of the calibrated slice, vector after
/// vector, into `out`, which must hold `dim · 3n` doubles.
///
/// # Safety
/// `out` must hold `out_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn mp_tangent_basis(p: *const MpPolygon, out: *mut f64, out_len: usize) -> MpStatus {
    guard(|| {
        let p = polygon(p)?;
        let basis = tangent_basis(p)?;
        let stride = 3 * p.n();
        if out_len < basis.len() * stride {
            return Err(fail(MpStatus::BufferTooSmall, format!("need {} doubles", basis.len() * stride)));
        }
        let out = slice_mut(out, out_len)?;
        for (chunk, q) in out.chunks_exact_mut(stride).zip(&basis) {
            write_vectors(chunk, q.components());
        }
        Ok(())
    })
}

unsafe fn tangent_in(p: &Arc<Polygon>, q: *const f64, len: usize, calibrated: bool) -> Result<TangentVector, Fail> {
    expect_len(p, len)?;
    let comps = vectors(slice(q, len)?);
    Ok(if calibrated { TangentVector::calibrated(p.clone(), comps)? } else { TangentVector::raw(p.clone(), comps)? })
}

/// Gauge-fixes a raw tangent vector.
///
/// # Safety
/// `q` and `out` must each hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn mp_calibrate(p: *const MpPolygon, q: *const f64, out: *mut f64, len: usize) -> MpStatus {
    guard(|| {
        let p = polygon(p)?;
        let q = calibrate(&tangent_in(p, q, len, false)?)?;
        write_vectors(slice_mut(out, len)?, q.components());
        Ok(())
    })
}

/// `I q` for a calibrated tangent vector.
///
/// # Safety
/// `q` and `out` must each hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn mp_apply_i(p: *const MpPolygon, q: *const f64, out: *mut f64, len: usize) -> MpStatus {
    guard(|| {
        let p = polygon(p)?;
        let iq = apply_I(&tangent_in(p, q, len, true)?)?;
        write_vectors(slice_mut(out, len)?, iq.components());
        Ok(())
    })
}

/// `ω(q, q2)`; raw tangent vectors are accepted.
///
/// # Safety
/// `q` and `q2` must each hold `len` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mp_omega(
    p: *const MpPolygon,
    q: *const f64,
    q2: *const f64,
    len: usize,
    out: *mut f64,
) -> MpStatus {
    guard(|| {
        let p = polygon(p)?;
        *out_ptr(out)? = omega(&tangent_in(p, q, len, false)?, &tangent_in(p, q2, len, false)?)?;
        Ok(())
    })
}

/// `g(q, q2)` for calibrated tangent vectors.
///
/// # Safety
/// `q` and `q2` must each hold `len` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mp_metric_g(
    p: *const MpPolygon,
    q: *const f64,
    q2: *const f64,
    len: usize,
    out: *mut f64,
) -> MpStatus {
    guard(|| {
        let p = polygon(p)?;
        *out_ptr(out)? = metric_g(&tangent_in(p, q, len, true)?, &tangent_in(p, q2, len, true)?)?;
        Ok(())
    })
}

/// Normal part `πx` of an ambient vector.
///
/// # Safety
/// `x` and `out` must each hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn mp_project_normal(p: *const MpPolygon, x: *const f64, out: *mut f64, len: usize) -> MpStatus {
    guard(|| {
        let p = polygon(p)?;
        expect_len(p, len)?;
        let n = project_normal(&AmbientVector::new(vectors(slice(x, len)?)), p)?;
        write_vectors(slice_mut(out, len)?, n.components());
        Ok(())
    })
}

/// Calibrated tangent part `x − πx` of an ambient vector.
///
/// # Safety
/// `x` and `out` must each hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn mp_project_tangent(p: *const MpPolygon, x: *const f64, out: *mut f64, len: usize) -> MpStatus {
    guard(|| {
        let p = polygon(p)?;
        expect_len(p, len)?;
        let t = project_tangent(&AmbientVector::new(vectors(slice(x, len)?)), p)?;
        write_vectors(slice_mut(out, len)?, t.components());
        Ok(())
    })
}

/// Largest `‖N_I‖_g` over `pairs` random coordinate-field pairs, for each step
/// in `h` (in units of the mean mass). Writes `h_len` values into `out`.
///
/// # Safety
/// `h` and `out` must each hold `h_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn mp_nijenhuis_sweep(
    p: *const MpPolygon,
    h: *const f64,
    h_len: usize,
    pairs: usize,
    seed: u64,
    out: *mut f64,
) -> MpStatus {
    guard(|| {
        let p = polygon(p)?;
        let hs = slice(h, h_len)?;
        if pairs == 0 || hs.iter().any(|x| !(*x > 0.0)) {
            return Err(fail(MpStatus::InvalidArgument, "need pairs >= 1 and positive steps"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut random = || {
            AmbientVector::new(
                (0..p.n())
                    .map(|_| MinkVector::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                    .collect(),
            )
        };
        let fields: Vec<_> = (0..pairs).map(|_| (coordinate_field(random()), coordinate_field(random()))).collect();
        let out = slice_mut(out, h_len)?;
        for (o, &step) in out.iter_mut().zip(hs) {
            let mut max = 0.0_f64;
            for (x, y) in &fields {
                max = max.max(nijenhuis_norm(x, y, p, step * p.mean_mass())?);
            }
            *o = max;
        }
        Ok(())
    })
}

/// Runs the verification suite with a JSON configuration (NULL or `{}` for
/// defaults) and returns the JSON report. A failed verdict is reported as
/// `VerificationFailed` with the report still written.
///
/// # Safety
/// `config_json` must be NULL or NUL-terminated; `report` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mp_run_suite_json(config_json: *const c_char, report: *mut *mut c_char) -> MpStatus {
    let mut verdict = true;
    let status = guard(|| {
        let report = out_ptr(report)?;
        let cfg: SuiteConfig = if config_json.is_null() {
            SuiteConfig::default()
        } else {
            serde_json::from_str(from_c_str(config_json)?).map_err(|e| fail(MpStatus::Config, e.to_string()))?
        };
        let r = run_suite(&cfg)?;
        verdict = r.passed();
        *report = to_c_string(r.to_json())?;
        Ok(())
    });
    if status == MpStatus::Ok && !verdict {
        set_error("verification failed");
        return MpStatus::VerificationFailed;
    }
    status
}
