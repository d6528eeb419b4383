//! C ABI for `circle-ergodic`.
//!
//! Maps, measures and shredding results cross the boundary as opaque
//! handles. Rationals cross as `"n/d"` C strings. Every function returns a
//! [`CeStatus`]; on failure [`ce_last_error`] gives the message for the
//! calling thread. Strings handed out must be released with
//! [`ce_string_free`], handles with their own `_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use circle_ergodic::classify::{self, RotationNumber, Target, WProtocol};
use circle_ergodic::exact::{CirclePoint, Rational};
use circle_ergodic::measure::CircleMeasure;
use circle_ergodic::pl::PLCircleMap;
use circle_ergodic::shred::{self, ShredConfig, TrappingReport};
use circle_ergodic::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CeStatus {
    Ok = 0,
    VerificationFailed = 1,
    InvalidInput = 2,
    ResourceCap = 3,
    NullPointer = 4,
    Panic = 5,
}

/// A piecewise-linear circle map.
pub struct CeMap {
    inner: PLCircleMap,
}

/// A finite measure on the circle: atoms plus piecewise-constant density.
pub struct CeMeasure {
    inner: CircleMeasure,
}

/// A shredded map together with its trapping report.
pub struct CeShred {
    map: PLCircleMap,
    report: TrappingReport,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(CeStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = if e.exit_code() == 3 { CeStatus::ResourceCap } else { CeStatus::InvalidInput };
        Failure(status, e.to_string())
    }
}

fn set_error(msg: Option<String>) {
    let msg = msg.map(|m| CString::new(m.replace('\0', " ")).expect("no interior nul"));
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn guard(f: impl FnOnce() -> Result<CeStatus, Failure>) -> CeStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(status)) => {
            set_error(None);
            status
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(Some(msg));
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(Some(format!("panic: {msg}")));
            CeStatus::Panic
        }
    }
}

fn null() -> Failure {
    Failure(CeStatus::NullPointer, "null pointer argument".into())
}

unsafe fn borrow<'a, T>(p: *const T) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(null)
}

unsafe fn text<'a>(p: *const c_char) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null());
    }
    CStr::from_ptr(p).to_str().map_err(|e| Failure(CeStatus::InvalidInput, format!("not UTF-8: {e}")))
}

unsafe fn rational(p: *const c_char) -> Result<Rational, Failure> {
    Ok(text(p)?.parse::<Rational>()?)
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<CeStatus, Failure> {
    if out.is_null() {
        return Err(null());
    }
    *out = Box::into_raw(Box::new(value));
    Ok(CeStatus::Ok)
}

unsafe fn put_str(out: *mut *mut c_char, s: String) -> Result<CeStatus, Failure> {
    if out.is_null() {
        return Err(null());
    }
    *out = CString::new(s).map_err(|e| Failure(CeStatus::InvalidInput, e.to_string()))?.into_raw();
    Ok(CeStatus::Ok)
}

fn json<T: serde::Serialize>(value: &T) -> Result<String, Failure> {
    serde_json::to_string(value).map_err(|e| Error::from(e).into())
}

fn parse_json<T: serde::de::DeserializeOwned>(s: &str) -> Result<T, Failure> {
    serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()).into())
}

/// Library version, a static string; do not free.
#[no_mangle]
pub extern "C" fn ce_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copy of the calling thread's last error message, or NULL after a success.
#[no_mangle]
pub extern "C" fn ce_last_error() -> *mut c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null_mut(), |m| m.clone().into_raw()))
}

/// # Safety
/// `s` is NULL or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ce_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Map from its JSON form (`breakpoints`, `liftValues`).
///
/// # Safety
/// `json` is a nul-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn ce_map_from_json(json: *const c_char, out: *mut *mut CeMap) -> CeStatus {
    guard(|| {
        let inner: PLCircleMap = parse_json(text(json)?)?;
        put(out, CeMap { inner })
    })
}

/// Map from `len` breakpoints `0 = x_0 < ... < x_{len-1} = 1` and lift values.
///
/// # Safety
/// `breakpoints` and `values` point to `len` nul-terminated strings each.
#[no_mangle]
pub unsafe extern "C" fn ce_map_new(
    breakpoints: *const *const c_char,
    values: *const *const c_char,
    len: usize,
    out: *mut *mut CeMap,
) -> CeStatus {
    guard(|| {
        if breakpoints.is_null() || values.is_null() {
            return Err(null());
        }
        let read = |p: *const *const c_char| -> Result<Vec<Rational>, Failure> {
            (0..len).map(|i| rational(*p.add(i))).collect()
        };
        let inner = PLCircleMap::new(read(breakpoints)?, read(values)?)?;
        put(out, CeMap { inner })
    })
}

/// # Safety
/// `angle` is a nul-terminated rational; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn ce_map_rotation(angle: *const c_char, out: *mut *mut CeMap) -> CeStatus {
    guard(|| put(out, CeMap { inner: PLCircleMap::rotation(&rational(angle)?) }))
}

/// `x -> d x mod 1`.
///
/// # Safety
/// `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn ce_map_expanding(degree: i64, out: *mut *mut CeMap) -> CeStatus {
    guard(|| put(out, CeMap { inner: PLCircleMap::expanding(degree)? }))
}

/// # Safety
/// `map` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn ce_map_to_json(map: *const CeMap, out: *mut *mut c_char) -> CeStatus {
    guard(|| put_str(out, json(&borrow(map)?.inner)?))
}

/// `f(x)` in `[0, 1)`.
///
/// # Safety
/// `map` is a live handle, `x` a nul-terminated rational, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ce_map_evaluate(map: *const CeMap, x: *const c_char, out: *mut *mut c_char) -> CeStatus {
    guard(|| {
        let y = borrow(map)?.inner.evaluate(&CirclePoint::from_lift(&rational(x)?));
        put_str(out, y.value().to_string())
    })
}

/// `f ∘ g`.
///
/// # Safety
/// `f`, `g` are live handles; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn ce_map_compose(f: *const CeMap, g: *const CeMap, out: *mut *mut CeMap) -> CeStatus {
    guard(|| {
        let inner = borrow(f)?.inner.compose(&borrow(g)?.inner)?;
        put(out, CeMap { inner })
    })
}

/// Uniform distance `sup_x d(f(x), g(x))`.
///
/// # Safety
/// `f`, `g` are live handles; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn ce_map_c0_distance(f: *const CeMap, g: *const CeMap, out: *mut *mut c_char) -> CeStatus {
    guard(|| put_str(out, borrow(f)?.inner.c0_distance(&borrow(g)?.inner).to_string()))
}

/// Rotation number of a homeomorphism. Both outputs get the same value when
/// a periodic orbit of period at most `max_period` pins it exactly;
/// otherwise they bracket it.
///
/// # Safety
/// `map` is a live handle; `lower`, `upper` are writable.
#[no_mangle]
pub unsafe extern "C" fn ce_map_rotation_number(
    map: *const CeMap,
    max_period: usize,
    lower: *mut *mut c_char,
    upper: *mut *mut c_char,
) -> CeStatus {
    guard(|| {
        if lower.is_null() || upper.is_null() {
            return Err(null());
        }
        let (lo, hi) = match classify::rotation_number(&borrow(map)?.inner, max_period)? {
            RotationNumber::Exact { value, .. } => (value.clone(), value),
            RotationNumber::Bracket { lower, upper, .. } => (lower, upper),
        };
        put_str(lower, lo.to_string())?;
        put_str(upper, hi.to_string())
    })
}

/// Diagnostics JSON for the five labels. `protocol_json` may be NULL for the
/// default protocol.
///
/// # Safety
/// `map` is a live handle; `protocol_json` NULL or nul-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ce_map_classify(
    map: *const CeMap,
    protocol_json: *const c_char,
    out: *mut *mut c_char,
) -> CeStatus {
    guard(|| {
        let protocol: WProtocol =
            if protocol_json.is_null() { WProtocol::default() } else { parse_json(text(protocol_json)?)? };
        let diag = classify::classify(Target::Map(&borrow(map)?.inner), &protocol)?;
        put_str(out, json(&diag)?)
    })
}

/// # Safety
/// `map` is NULL or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ce_map_free(map: *mut CeMap) {
    if !map.is_null() {
        drop(Box::from_raw(map));
    }
}

/// # Safety
/// `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn ce_measure_lebesgue(out: *mut *mut CeMeasure) -> CeStatus {
    guard(|| put(out, CeMeasure { inner: CircleMeasure::lebesgue() }))
}

/// # Safety
/// `x` is a nul-terminated rational; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn ce_measure_dirac(x: *const c_char, out: *mut *mut CeMeasure) -> CeStatus {
    guard(|| put(out, CeMeasure { inner: CircleMeasure::dirac(CirclePoint::from_lift(&rational(x)?)) }))
}

/// # Safety
/// `json` is a nul-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn ce_measure_from_json(json: *const c_char, out: *mut *mut CeMeasure) -> CeStatus {
    guard(|| {
        let inner: CircleMeasure = parse_json(text(json)?)?;
        put(out, CeMeasure { inner })
    })
}

/// # Safety
/// `mu` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn ce_measure_to_json(mu: *const CeMeasure, out: *mut *mut c_char) -> CeStatus {
    guard(|| put_str(out, json(&borrow(mu)?.inner)?))
}

/// `f_* mu`, refused with `RESOURCE_CAP` past `max_pieces` atoms and pieces.
///
/// # Safety
/// `mu`, `f` are live handles; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn ce_measure_pushforward(
    mu: *const CeMeasure,
    f: *const CeMap,
    max_pieces: usize,
    out: *mut *mut CeMeasure,
) -> CeStatus {
    guard(|| {
        let inner = borrow(mu)?.inner.pushforward(&borrow(f)?.inner);
        let size = inner.atoms().len() + inner.raw_pieces().len();
        if size > max_pieces {
            return Err(Error::ResourceExhausted { what: "measure pieces", needed: size, cap: max_pieces }.into());
        }
        put(out, CeMeasure { inner })
    })
}

/// # Safety
/// `mu` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn ce_measure_total_mass(mu: *const CeMeasure, out: *mut *mut c_char) -> CeStatus {
    guard(|| put_str(out, borrow(mu)?.inner.total_mass().to_string()))
}

/// Exact equality of two measures.
///
/// # Safety
/// `a`, `b` are live handles; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn ce_measure_equal(a: *const CeMeasure, b: *const CeMeasure, out: *mut bool) -> CeStatus {
    guard(|| {
        let eq = borrow(a)?.inner == borrow(b)?.inner;
        *out.as_mut().ok_or_else(null)? = eq;
        Ok(CeStatus::Ok)
    })
}

/// # Safety
/// `mu` is NULL or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ce_measure_free(mu: *mut CeMeasure) {
    if !mu.is_null() {
        drop(Box::from_raw(mu));
    }
}

/// Shreds `f` at scale `eps` with the default configuration.
///
/// # Safety
/// `f` is a live handle, `eps` a nul-terminated rational, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ce_shred(f: *const CeMap, eps: *const c_char, out: *mut *mut CeShred) -> CeStatus {
    guard(|| {
        let (map, report) = shred::shred(&borrow(f)?.inner, &rational(eps)?, &ShredConfig::default())?;
        put(out, CeShred { map, report })
    })
}

/// A copy of the shredded map.
///
/// # Safety
/// `s` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn ce_shred_map(s: *const CeShred, out: *mut *mut CeMap) -> CeStatus {
    guard(|| put(out, CeMap { inner: borrow(s)?.map.clone() }))
}

/// # Safety
/// `s` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn ce_shred_region_count(s: *const CeShred, out: *mut usize) -> CeStatus {
    guard(|| {
        *out.as_mut().ok_or_else(null)? = borrow(s)?.report.regions.len();
        Ok(CeStatus::Ok)
    })
}

/// # Safety
/// `s` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn ce_shred_report_json(s: *const CeShred, out: *mut *mut c_char) -> CeStatus {
    guard(|| put_str(out, json(&borrow(s)?.report)?))
}

/// Checks `map` against the trapping regions of `s`. Returns `OK` or
/// `VERIFICATION_FAILED`; `min_slack` (may be NULL) receives the smallest
/// margin, or stays NULL when there is none.
///
/// # Safety
/// `map`, `s` are live handles; `min_slack` NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn ce_shred_verify(map: *const CeMap, s: *const CeShred, min_slack: *mut *mut c_char) -> CeStatus {
    guard(|| {
        let v = shred::verify_shredding(&borrow(map)?.inner, &borrow(s)?.report);
        if let (false, Some(slack)) = (min_slack.is_null(), v.min_slack()) {
            put_str(min_slack, slack.to_string())?;
        }
        if v.all_passed() {
            Ok(CeStatus::Ok)
        } else {
            let item = v.first_failure().map(|i| format!("{}: {}", i.item, i.detail)).unwrap_or_default();
            Err(Failure(CeStatus::VerificationFailed, format!("verification failed at item {item}")))
        }
    })
}

/// # Safety
/// `s` is NULL or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ce_shred_free(s: *mut CeShred) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}
