//! Exercises the C surface exactly as a foreign caller would: through
//! raw pointers, status codes and the last-error channel.

use std::ffi::{CStr, CString};
use std::ptr;

use citefore_ffi::*;

fn last_error() -> String {
    let ptr = cf_last_error_message();
    assert!(!ptr.is_null(), "expected an error message");
    let msg = unsafe { CStr::from_ptr(ptr) }.to_string_lossy().into_owned();
    unsafe { cf_string_free(ptr) };
    msg
}

#[test]
fn version_is_a_static_string() {
    let v = unsafe { CStr::from_ptr(cf_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn synth_fit_and_row_access() {
    let mut corpus: *mut CfCorpus = ptr::null_mut();
    let status = unsafe { cf_corpus_synth(42, 2, 300, 1, &mut corpus) };
    assert_eq!(status, CfStatus::CfOk);
    assert_eq!(unsafe { cf_corpus_publication_count(corpus) }, 600);
    assert_eq!(unsafe { cf_corpus_observation_count(corpus) }, 600);

    let mut results: *mut CfResults = ptr::null_mut();
    let status = unsafe {
        cf_fit_sweep(
            corpus,
            CfVariant::CfVariantRescaled,
            0,
            8,
            9,
            100,
            1,
            &mut results,
        )
    };
    assert_eq!(status, CfStatus::CfOk);
    let len = unsafe { cf_results_len(results) };
    assert_eq!(len, 18, "2 SCs x 9 windows");

    let mut seen_fitted = 0;
    for idx in 0..len {
        let mut row = CfFitRow {
            t: 0,
            n: 0,
            skipped: 0,
            has_early: 0,
            b0: 0.0,
            se0: 0.0,
            p0: 0.0,
            b1: 0.0,
            se1: 0.0,
            p1: 0.0,
            b2: 0.0,
            se2: 0.0,
            p2: 0.0,
            r2: 0.0,
            bp_stat: 0.0,
            bp_p: 0.0,
        };
        assert_eq!(unsafe { cf_results_row(results, idx, &mut row) }, CfStatus::CfOk);
        let subset_ptr = unsafe { cf_results_subset(results, idx) };
        assert!(!subset_ptr.is_null());
        let subset = unsafe { CStr::from_ptr(subset_ptr) }.to_str().unwrap().to_string();
        unsafe { cf_string_free(subset_ptr) };
        assert!(subset.starts_with("SC0"), "{subset}");
        if row.skipped == 0 {
            seen_fitted += 1;
            assert_eq!(row.has_early, 1);
            assert!(row.r2.is_finite() && (0.0..=1.0).contains(&row.r2));
            assert!(row.n > 0);
            let reason = unsafe { cf_results_skip_reason(results, idx) };
            assert!(reason.is_null());
        }
    }
    assert!(seen_fitted >= 16, "almost every window fits: {seen_fitted}");

    // Out-of-range row access reports an index error.
    let mut row = unsafe { std::mem::zeroed::<CfFitRow>() };
    assert_eq!(
        unsafe { cf_results_row(results, len, &mut row) },
        CfStatus::CfIndexOutOfRange
    );
    assert!(last_error().contains("out of range"));

    // CSV emission through the handle.
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("results.csv");
    let c_path = CString::new(path.to_str().unwrap()).unwrap();
    assert_eq!(
        unsafe { cf_results_write_csv(results, c_path.as_ptr()) },
        CfStatus::CfOk
    );
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains("subset,variant,t,n,b0"), "{text}");

    unsafe {
        cf_results_free(results);
        cf_corpus_free(corpus);
    }
}

#[test]
fn parse_errors_carry_messages() {
    let csv = b"pub_id,year,journal_id,if,sc,c0,c1,c2,c3,c4,c5,c6,c7,c8,c9\nP1,2004,J1,1.0,A,5,4,3,2,1,0,0,0,0,0\n";
    let mut corpus: *mut CfCorpus = ptr::null_mut();
    let status = unsafe { cf_corpus_parse(csv.as_ptr(), csv.len(), &mut corpus) };
    assert_eq!(status, CfStatus::CfParseError);
    assert!(last_error().contains("nonmonotone citation trajectory"));

    let status = unsafe { cf_corpus_parse(ptr::null(), 0, &mut corpus) };
    assert_eq!(status, CfStatus::CfNullArgument);

    let missing = CString::new("/definitely/not/here.csv").unwrap();
    let status = unsafe { cf_corpus_load_csv(missing.as_ptr(), &mut corpus) };
    assert_eq!(status, CfStatus::CfIoError);
}

#[test]
fn memory_round_trip_load_csv() {
    let mut corpus: *mut CfCorpus = ptr::null_mut();
    assert_eq!(
        unsafe { cf_corpus_synth(7, 1, 120, 0, &mut corpus) },
        CfStatus::CfOk
    );

    // Null-handle queries degrade to zero rather than crashing.
    assert_eq!(unsafe { cf_corpus_publication_count(ptr::null()) }, 0);
    assert_eq!(unsafe { cf_results_len(ptr::null()) }, 0);

    // Window validation happens before any work.
    let mut results: *mut CfResults = ptr::null_mut();
    let status = unsafe {
        cf_fit_sweep(corpus, CfVariant::CfVariantLog, 5, 2, 9, 100, 0, &mut results)
    };
    assert_eq!(status, CfStatus::CfValidationError);
    assert!(last_error().contains("invalid window setup"));

    unsafe { cf_corpus_free(corpus) };
    unsafe { cf_corpus_free(ptr::null_mut()) };
    unsafe { cf_results_free(ptr::null_mut()) };
}

#[test]
fn predict_is_the_linear_combination() {
    assert_eq!(cf_predict(1.0, 2.0, 3.0, 1.0, 1.0), 6.0);
    assert_eq!(cf_predict(0.0, 0.0, 1.0, 9.0, 5.0), 5.0);
}

#[test]
fn generated_header_exposes_the_surface() {
    let header = std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("include")
        .join("citefore.h");
    let text = std::fs::read_to_string(&header)
        .unwrap_or_else(|e| panic!("missing generated header {}: {e}", header.display()));
    for needle in [
        "typedef struct CfCorpus CfCorpus;",
        "typedef struct CfResults CfResults;",
        "CfStatus",
        "cf_corpus_load_csv",
        "cf_fit_sweep",
        "cf_results_row",
        "cf_last_error_message",
        "cf_string_free",
        "cf_predict",
    ] {
        assert!(text.contains(needle), "header lacks '{needle}'");
    }
}
