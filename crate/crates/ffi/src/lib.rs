//! C interface to hrvlab.
//!
//! Objects cross the boundary as opaque handles owned by the caller and
//! released with the matching `*_free` function. Every fallible call returns
//! an [`HrvStatus`]; on failure, [`hrv_last_error`] describes what went wrong
//! on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use hrvlab::diagnostics::{self, DetectConfig, DetectionReport};
use hrvlab::generators::{generate, GeneratorSpec, SampleBatch};
use hrvlab::pipeline::Experiment;
use hrvlab::transforms::{gpolar_axes, Larger};
use hrvlab::HrvError;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HrvStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidString = 2,
    Usage = 3,
    Config = 4,
    Domain = 5,
    DegenerateQuantile = 6,
    DegenerateData = 7,
    Parse = 8,
    Io = 9,
    Panic = 10,
}

/// Generated or caller-supplied sample of nonnegative pairs.
pub struct HrvSampleBatch(SampleBatch);

/// Result of running the detectors on a batch.
pub struct HrvReport(DetectionReport);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &HrvError) -> HrvStatus {
    match err.root() {
        HrvError::Config(_) | HrvError::Json(_) => HrvStatus::Config,
        HrvError::Usage(_) => HrvStatus::Usage,
        HrvError::Domain(_) => HrvStatus::Domain,
        HrvError::DegenerateQuantile(_) => HrvStatus::DegenerateQuantile,
        HrvError::DegenerateData(_) => HrvStatus::DegenerateData,
        HrvError::Parse { .. } => HrvStatus::Parse,
        HrvError::Io(_) => HrvStatus::Io,
        HrvError::Context { .. } => unreachable!("root strips context"),
    }
}

struct Fail(HrvStatus, String);

impl From<HrvError> for Fail {
    fn from(e: HrvError) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> HrvStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HrvStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            HrvStatus::Panic
        }
    }
}

fn non_null<T>(p: *const T, what: &str) -> Result<(), Fail> {
    if p.is_null() {
        Err(Fail(HrvStatus::NullPointer, format!("{what} is null")))
    } else {
        Ok(())
    }
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    non_null(p, what)?;
    CStr::from_ptr(p).to_str().map_err(|_| {
        Fail(
            HrvStatus::InvalidString,
            format!("{what} is not valid UTF-8"),
        )
    })
}

unsafe fn read_slice<'a>(p: *const f64, len: usize, what: &str) -> Result<&'a [f64], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    non_null(p, what)?;
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), Fail> {
    non_null(out as *const T, "output pointer")?;
    out.write(value);
    Ok(())
}

/// Message for the most recent failure on this thread, or null. Valid until
/// the next failing call on the same thread; do not free.
#[no_mangle]
pub extern "C" fn hrv_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn hrv_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Draws `n` pairs from a generator spec given as JSON.
///
/// # Safety
/// `spec_json` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn hrv_generate_json(
    spec_json: *const c_char,
    n: usize,
    seed: u64,
    partitions: usize,
    out: *mut *mut HrvSampleBatch,
) -> HrvStatus {
    guard(|| {
        let text = read_str(spec_json, "spec_json")?;
        let spec: GeneratorSpec =
            serde_json::from_str(text).map_err(|e| HrvError::Config(e.to_string()))?;
        let batch = generate(&spec, n, seed, partitions)?;
        write_out(out, Box::into_raw(Box::new(HrvSampleBatch(batch))))
    })
}

/// Draws `n` pairs from a canned experiment such as `"ex31-case1"`.
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn hrv_generate_experiment(
    name: *const c_char,
    n: usize,
    seed: u64,
    partitions: usize,
    out: *mut *mut HrvSampleBatch,
) -> HrvStatus {
    guard(|| {
        let e: Experiment = read_str(name, "name")?.parse()?;
        let batch = generate(&e.spec(), n, seed, partitions)?;
        write_out(out, Box::into_raw(Box::new(HrvSampleBatch(batch))))
    })
}

/// Copies `len` pairs from two coordinate arrays into a new batch.
///
/// # Safety
/// `z1` and `z2` must each point to `len` readable doubles.
#[no_mangle]
pub unsafe extern "C" fn hrv_batch_from_pairs(
    z1: *const f64,
    z2: *const f64,
    len: usize,
    out: *mut *mut HrvSampleBatch,
) -> HrvStatus {
    guard(|| {
        let a = read_slice(z1, len, "z1")?;
        let b = read_slice(z2, len, "z2")?;
        let batch = SampleBatch::from_pairs(a.iter().copied().zip(b.iter().copied()).collect())?;
        write_out(out, Box::into_raw(Box::new(HrvSampleBatch(batch))))
    })
}

/// Number of pairs in a batch; 0 for null.
///
/// # Safety
/// `batch` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hrv_batch_len(batch: *const HrvSampleBatch) -> usize {
    batch.as_ref().map_or(0, |b| b.0.len())
}

/// Reads pair `i`.
///
/// # Safety
/// `batch` must be a live handle; `z1` and `z2` writable.
#[no_mangle]
pub unsafe extern "C" fn hrv_batch_get(
    batch: *const HrvSampleBatch,
    i: usize,
    z1: *mut f64,
    z2: *mut f64,
) -> HrvStatus {
    guard(|| {
        non_null(batch, "batch")?;
        let pairs = &(*batch).0.pairs;
        let &(a, b) = pairs.get(i).ok_or_else(|| {
            Fail(
                HrvStatus::Usage,
                format!("index {i} out of range for {} pairs", pairs.len()),
            )
        })?;
        write_out(z1, a)?;
        write_out(z2, b)
    })
}

/// # Safety
/// `batch` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hrv_batch_free(batch: *mut HrvSampleBatch) {
    if !batch.is_null() {
        drop(Box::from_raw(batch));
    }
}

/// Runs the detectors. `config_json` may be null for defaults.
///
/// # Safety
/// `batch` must be a live handle, `config_json` null or NUL-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hrv_detect(
    batch: *const HrvSampleBatch,
    config_json: *const c_char,
    out: *mut *mut HrvReport,
) -> HrvStatus {
    guard(|| {
        non_null(batch, "batch")?;
        let config = if config_json.is_null() {
            DetectConfig::default()
        } else {
            serde_json::from_str(read_str(config_json, "config_json")?)
                .map_err(|e| HrvError::Config(e.to_string()))?
        };
        let report = diagnostics::detect_report(&(*batch).0, &config)?;
        write_out(out, Box::into_raw(Box::new(HrvReport(report))))
    })
}

/// Serializes a report as JSON. Free the string with [`hrv_string_free`].
///
/// # Safety
/// `report` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hrv_report_json(
    report: *const HrvReport,
    out: *mut *mut c_char,
) -> HrvStatus {
    guard(|| {
        non_null(report, "report")?;
        let json = serde_json::to_string(&(*report).0).map_err(HrvError::from)?;
        let c = CString::new(json).expect("JSON has no interior NUL");
        write_out(out, c.into_raw())
    })
}

/// Value of a report series at `k`; NaN when the label or `k` is absent.
///
/// # Safety
/// `report` must be a live handle and `label` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn hrv_report_value(
    report: *const HrvReport,
    label: *const c_char,
    k: usize,
) -> f64 {
    let Some(r) = report.as_ref() else {
        return f64::NAN;
    };
    if label.is_null() {
        return f64::NAN;
    }
    let Ok(label) = CStr::from_ptr(label).to_str() else {
        return f64::NAN;
    };
    r.0.value(label, k).unwrap_or(f64::NAN)
}

/// # Safety
/// `report` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hrv_report_free(report: *mut HrvReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn hrv_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Hill estimate of the tail index from the `k` largest of `len` positive values.
///
/// # Safety
/// `x` must point to `len` readable doubles.
#[no_mangle]
pub unsafe extern "C" fn hrv_hill(x: *const f64, len: usize, k: usize, out: *mut f64) -> HrvStatus {
    guard(|| {
        let v = diagnostics::hill_at(read_slice(x, len, "x")?, k)?;
        write_out(out, v)
    })
}

/// Hillish statistic of `eta` concomitants ordered by `xi`.
///
/// # Safety
/// `xi` and `eta` must each point to `len` readable doubles.
#[no_mangle]
pub unsafe extern "C" fn hrv_hillish(
    xi: *const f64,
    eta: *const f64,
    len: usize,
    k: usize,
    out: *mut f64,
) -> HrvStatus {
    guard(|| {
        let v = diagnostics::hillish(read_slice(xi, len, "xi")?, read_slice(eta, len, "eta")?, k)?;
        write_out(out, v)
    })
}

/// Pickandsish statistic at level `q`.
///
/// # Safety
/// `xi` and `eta` must each point to `len` readable doubles.
#[no_mangle]
pub unsafe extern "C" fn hrv_pickandsish(
    xi: *const f64,
    eta: *const f64,
    len: usize,
    k: usize,
    q: f64,
    out: *mut f64,
) -> HrvStatus {
    guard(|| {
        let v = diagnostics::pickandsish(
            read_slice(xi, len, "xi")?,
            read_slice(eta, len, "eta")?,
            k,
            q,
        )?;
        write_out(out, v)
    })
}

/// Polar coordinates relative to the axes. `which_larger` is 1 or 2 for the
/// larger coordinate, 0 on a tie.
///
/// # Safety
/// Output pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn hrv_gpolar_axes(
    z1: f64,
    z2: f64,
    radius: *mut f64,
    theta: *mut f64,
    which_larger: *mut i32,
) -> HrvStatus {
    guard(|| {
        let p = gpolar_axes((z1, z2))?;
        write_out(radius, p.radius)?;
        write_out(theta, p.theta)?;
        write_out(
            which_larger,
            match p.which_larger {
                Larger::First => 1,
                Larger::Second => 2,
                Larger::Tie => 0,
            },
        )
    })
}
