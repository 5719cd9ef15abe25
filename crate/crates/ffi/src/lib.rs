//! C ABI over the citefore library: opaque handles, integer status
//! codes and a thread-local last-error message.
//!
//! Conventions:
//! - Every fallible call returns a [`CfStatus`]; `CF_OK` means the out
//!   parameters are valid.
//! - Handles are created and released by this library only
//!   (`cf_corpus_free`, `cf_results_free`); strings returned as
//!   `char *` must be released with `cf_string_free`.
//! - On any non-OK status, `cf_last_error_message` returns a
//!   human-readable description of the failure on the calling thread.

#![deny(unsafe_op_in_unsafe_fn)]

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::os::raw::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use citefore::analysis::{run_sc_sweep, sort_results, FitResult, ModelContext};
use citefore::config::with_pool;
use citefore::corpus::{expand_by_sc, filter_sc_min_count, parse_publications, Publication};
use citefore::error::Error;
use citefore::report::{write_results_csv, Metadata};
use citefore::synth::{generate_corpus, GeneratorConfig};
use citefore::transforms::{compute_baselines, Variant};

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CfStatus {
    CfOk = 0,
    CfNullArgument = 1,
    CfInvalidUtf8 = 2,
    CfParseError = 3,
    CfValidationError = 4,
    CfComputationError = 5,
    CfIoError = 6,
    CfIndexOutOfRange = 7,
    CfPanic = 8,
}

/// Model variant selector.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CfVariant {
    CfVariantRescaled = 0,
    CfVariantLog = 1,
}

impl From<CfVariant> for Variant {
    fn from(v: CfVariant) -> Variant {
        match v {
            CfVariant::CfVariantRescaled => Variant::Rescaled,
            CfVariant::CfVariantLog => Variant::Log,
        }
    }
}

/// One fit-result row in flat C layout. `t` is -1 for subset-level skip
/// entries; coefficient slots are meaningful only when `skipped` is 0,
/// and the `b2/se2/p2` slots only when `has_early` is 1.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct CfFitRow {
    pub t: i32,
    pub n: u64,
    pub skipped: i32,
    pub has_early: i32,
    pub b0: f64,
    pub se0: f64,
    pub p0: f64,
    pub b1: f64,
    pub se1: f64,
    pub p1: f64,
    pub b2: f64,
    pub se2: f64,
    pub p2: f64,
    pub r2: f64,
    pub bp_stat: f64,
    pub bp_p: f64,
}

/// Opaque corpus handle.
pub struct CfCorpus {
    publications: Vec<Publication>,
}

/// Opaque fit-results handle.
pub struct CfResults {
    rows: Vec<FitResult>,
    variant: Variant,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: &str) {
    let sanitized: Vec<u8> = message.bytes().filter(|&b| b != 0).collect();
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).ok();
    });
}

fn status_of(err: &Error) -> CfStatus {
    match err {
        Error::ParseRow { .. } | Error::Csv(_) => CfStatus::CfParseError,
        Error::Io { .. } => CfStatus::CfIoError,
        Error::Validation(_) | Error::Config(_) | Error::UnmappedSubjectCategory { .. }
        | Error::MixedWindows => CfStatus::CfValidationError,
        _ => CfStatus::CfComputationError,
    }
}

fn fail(err: &Error) -> CfStatus {
    set_error(&err.to_string());
    status_of(err)
}

/// Runs `f` with panics converted into `CfPanic`.
fn guarded(f: impl FnOnce() -> CfStatus) -> CfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic");
            CfStatus::CfPanic
        }
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn cf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Returns a copy of the last error message raised on this thread, or
/// NULL when none was recorded. Free it with `cf_string_free`.
#[no_mangle]
pub extern "C" fn cf_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|slot| match &*slot.borrow() {
        Some(msg) => msg.clone().into_raw(),
        None => std::ptr::null_mut(),
    })
}

/// Frees a string returned by this library. NULL is accepted.
///
/// # Safety
/// `s` must be a pointer previously returned by this library and not
/// freed since.
#[no_mangle]
pub unsafe extern "C" fn cf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}

unsafe fn path_from(ptr: *const c_char) -> Result<&'static Path, CfStatus> {
    if ptr.is_null() {
        set_error("null path argument");
        return Err(CfStatus::CfNullArgument);
    }
    match unsafe { CStr::from_ptr(ptr) }.to_str() {
        Ok(s) => Ok(Path::new(s)),
        Err(_) => {
            set_error("path is not valid UTF-8");
            Err(CfStatus::CfInvalidUtf8)
        }
    }
}

fn emit_corpus(publications: Vec<Publication>, out: *mut *mut CfCorpus) -> CfStatus {
    let handle = Box::new(CfCorpus { publications });
    unsafe { *out = Box::into_raw(handle) };
    CfStatus::CfOk
}

/// Parses a corpus CSV file into a new corpus handle.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cf_corpus_load_csv(
    path: *const c_char,
    out: *mut *mut CfCorpus,
) -> CfStatus {
    if out.is_null() {
        set_error("null out argument");
        return CfStatus::CfNullArgument;
    }
    let path = match unsafe { path_from(path) } {
        Ok(p) => p,
        Err(status) => return status,
    };
    guarded(|| {
        let file = match std::fs::File::open(path) {
            Ok(f) => f,
            Err(e) => {
                set_error(&format!("cannot open {}: {e}", path.display()));
                return CfStatus::CfIoError;
            }
        };
        match parse_publications(std::io::BufReader::new(file)) {
            Ok((publications, _report)) => emit_corpus(publications, out),
            Err(e) => fail(&e),
        }
    })
}

/// Parses an in-memory corpus CSV buffer into a new corpus handle.
///
/// # Safety
/// `data` must point to `len` readable bytes; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn cf_corpus_parse(
    data: *const u8,
    len: usize,
    out: *mut *mut CfCorpus,
) -> CfStatus {
    if data.is_null() || out.is_null() {
        set_error("null argument");
        return CfStatus::CfNullArgument;
    }
    let bytes = unsafe { std::slice::from_raw_parts(data, len) };
    guarded(|| match parse_publications(bytes) {
        Ok((publications, _report)) => emit_corpus(publications, out),
        Err(e) => fail(&e),
    })
}

/// Generates a deterministic synthetic corpus. `fast_peak` selects the
/// fast-peak accrual preset (nonzero) or the slow one (zero).
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cf_corpus_synth(
    seed: u64,
    n_scs: usize,
    n_pubs: usize,
    fast_peak: i32,
    out: *mut *mut CfCorpus,
) -> CfStatus {
    if out.is_null() {
        set_error("null out argument");
        return CfStatus::CfNullArgument;
    }
    guarded(|| {
        let cfg = if fast_peak != 0 {
            GeneratorConfig::fast_peak(seed, n_scs, n_pubs)
        } else {
            GeneratorConfig::slow(seed, n_scs, n_pubs)
        };
        match generate_corpus(&cfg) {
            Ok(publications) => emit_corpus(publications, out),
            Err(e) => fail(&e),
        }
    })
}

/// Number of publications in the corpus; 0 on a NULL handle.
///
/// # Safety
/// `corpus` must be a live handle from this library or NULL.
#[no_mangle]
pub unsafe extern "C" fn cf_corpus_publication_count(corpus: *const CfCorpus) -> usize {
    if corpus.is_null() {
        return 0;
    }
    unsafe { &*corpus }.publications.len()
}

/// Number of (publication, SC) observations after multi-category
/// expansion; 0 on a NULL handle.
///
/// # Safety
/// `corpus` must be a live handle from this library or NULL.
#[no_mangle]
pub unsafe extern "C" fn cf_corpus_observation_count(corpus: *const CfCorpus) -> usize {
    if corpus.is_null() {
        return 0;
    }
    let corpus = unsafe { &*corpus };
    corpus.publications.iter().map(|p| p.sc_ids.len()).sum()
}

/// Releases a corpus handle. NULL is accepted.
///
/// # Safety
/// `corpus` must be a live handle from this library or NULL.
#[no_mangle]
pub unsafe extern "C" fn cf_corpus_free(corpus: *mut CfCorpus) {
    if !corpus.is_null() {
        drop(unsafe { Box::from_raw(corpus) });
    }
}

/// Runs the per-SC regression sweep of one variant over windows
/// `t_min..=t_max` and returns a results handle. `workers` = 0 uses the
/// default thread pool.
///
/// # Safety
/// `corpus` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cf_fit_sweep(
    corpus: *const CfCorpus,
    variant: CfVariant,
    t_min: u32,
    t_max: u32,
    long_window: u32,
    sc_threshold: usize,
    workers: usize,
    out: *mut *mut CfResults,
) -> CfStatus {
    if corpus.is_null() || out.is_null() {
        set_error("null argument");
        return CfStatus::CfNullArgument;
    }
    let corpus = unsafe { &*corpus };
    guarded(|| {
        let long_window = long_window as usize;
        if long_window == 0
            || long_window >= citefore::TRAJECTORY_LEN
            || t_min > t_max
            || t_max as usize >= long_window
        {
            set_error(&format!(
                "invalid window setup: t range [{t_min}, {t_max}], long window {long_window}"
            ));
            return CfStatus::CfValidationError;
        }
        let pubs = &corpus.publications;
        let obs = expand_by_sc(pubs);
        let groups = filter_sc_min_count(pubs, &obs, sc_threshold);
        let table = compute_baselines(pubs, &obs);
        let ctx = ModelContext::new(pubs, &table, long_window);
        let rust_variant: Variant = variant.into();
        let sweep = with_pool(workers, || {
            run_sc_sweep(&ctx, &groups, rust_variant, t_min as usize..=t_max as usize)
        });
        match sweep {
            Ok(mut rows) => {
                sort_results(&mut rows);
                let handle = Box::new(CfResults {
                    rows,
                    variant: rust_variant,
                });
                unsafe { *out = Box::into_raw(handle) };
                CfStatus::CfOk
            }
            Err(e) => fail(&e),
        }
    })
}

/// Number of rows in a results handle; 0 on NULL.
///
/// # Safety
/// `results` must be a live handle from this library or NULL.
#[no_mangle]
pub unsafe extern "C" fn cf_results_len(results: *const CfResults) -> usize {
    if results.is_null() {
        return 0;
    }
    unsafe { &*results }.rows.len()
}

/// Copies row `idx` into `row`.
///
/// # Safety
/// `results` must be a live handle and `row` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cf_results_row(
    results: *const CfResults,
    idx: usize,
    row: *mut CfFitRow,
) -> CfStatus {
    if results.is_null() || row.is_null() {
        set_error("null argument");
        return CfStatus::CfNullArgument;
    }
    let results = unsafe { &*results };
    let Some(r) = results.rows.get(idx) else {
        set_error(&format!(
            "row index {idx} out of range (len {})",
            results.rows.len()
        ));
        return CfStatus::CfIndexOutOfRange;
    };
    let mut flat = CfFitRow {
        t: r.t.map(|t| t as i32).unwrap_or(-1),
        n: r.n as u64,
        skipped: r.stats.is_none() as i32,
        has_early: 0,
        b0: f64::NAN,
        se0: f64::NAN,
        p0: f64::NAN,
        b1: f64::NAN,
        se1: f64::NAN,
        p1: f64::NAN,
        b2: f64::NAN,
        se2: f64::NAN,
        p2: f64::NAN,
        r2: f64::NAN,
        bp_stat: f64::NAN,
        bp_p: f64::NAN,
    };
    if let Some(stats) = &r.stats {
        let c = &stats.coefficients;
        flat.b0 = c[0].estimate;
        flat.se0 = c[0].std_error;
        flat.p0 = c[0].p_value;
        flat.b1 = c[1].estimate;
        flat.se1 = c[1].std_error;
        flat.p1 = c[1].p_value;
        if let Some(early) = c.get(2) {
            flat.has_early = 1;
            flat.b2 = early.estimate;
            flat.se2 = early.std_error;
            flat.p2 = early.p_value;
        }
        flat.r2 = stats.r_squared;
        flat.bp_stat = stats.bp_statistic;
        flat.bp_p = stats.bp_pvalue;
    }
    unsafe { *row = flat };
    CfStatus::CfOk
}

/// Subset label (SC code) of row `idx` as a fresh string, or NULL on a
/// bad index. Free with `cf_string_free`.
///
/// # Safety
/// `results` must be a live handle from this library or NULL.
#[no_mangle]
pub unsafe extern "C" fn cf_results_subset(
    results: *const CfResults,
    idx: usize,
) -> *mut c_char {
    if results.is_null() {
        return std::ptr::null_mut();
    }
    let results = unsafe { &*results };
    match results.rows.get(idx) {
        Some(r) => CString::new(r.subset.clone())
            .map(CString::into_raw)
            .unwrap_or(std::ptr::null_mut()),
        None => std::ptr::null_mut(),
    }
}

/// Skip reason of row `idx`, or NULL when the row was fitted. Free with
/// `cf_string_free`.
///
/// # Safety
/// `results` must be a live handle from this library or NULL.
#[no_mangle]
pub unsafe extern "C" fn cf_results_skip_reason(
    results: *const CfResults,
    idx: usize,
) -> *mut c_char {
    if results.is_null() {
        return std::ptr::null_mut();
    }
    let results = unsafe { &*results };
    match results.rows.get(idx).and_then(|r| r.skip_reason.as_ref()) {
        Some(reason) => CString::new(reason.clone())
            .map(CString::into_raw)
            .unwrap_or(std::ptr::null_mut()),
        None => std::ptr::null_mut(),
    }
}

/// Writes the results in the standard 20-column CSV layout.
///
/// # Safety
/// `results` must be a live handle; `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn cf_results_write_csv(
    results: *const CfResults,
    path: *const c_char,
) -> CfStatus {
    if results.is_null() {
        set_error("null results handle");
        return CfStatus::CfNullArgument;
    }
    let path = match unsafe { path_from(path) } {
        Ok(p) => p,
        Err(status) => return status,
    };
    let results = unsafe { &*results };
    guarded(|| {
        let mut meta = Metadata::new("ffi-fit", "-");
        meta.push("variant", results.variant.label());
        let mut buf = Vec::new();
        if let Err(e) = write_results_csv(&mut buf, &results.rows, &meta, None) {
            return fail(&e);
        }
        match std::fs::write(path, &buf) {
            Ok(()) => CfStatus::CfOk,
            Err(e) => {
                set_error(&format!("cannot write {}: {e}", path.display()));
                CfStatus::CfIoError
            }
        }
    })
}

/// Releases a results handle. NULL is accepted.
///
/// # Safety
/// `results` must be a live handle from this library or NULL.
#[no_mangle]
pub unsafe extern "C" fn cf_results_free(results: *mut CfResults) {
    if !results.is_null() {
        drop(unsafe { Box::from_raw(results) });
    }
}

/// The model prediction `b0 + b1*x + b2*y_t`.
#[no_mangle]
pub extern "C" fn cf_predict(b0: f64, b1: f64, b2: f64, x: f64, y_t: f64) -> f64 {
    b0 + b1 * x + b2 * y_t
}
