//! C interface to the labeled graph analyzer.
//!
//! A graph in `.lgr` or JSON text goes in, an opaque `LabelanaAnalysis`
//! handle comes out. Every fallible call returns a `LabelanaStatus`; on
//! failure `labelana_last_error_message` describes the error for the calling
//! thread. Strings returned by the library are owned by the caller and freed
//! with `labelana_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use labelana::analysis::{analyze, Analysis};
use labelana::error::{AnalysisError, ErrorKind};
use labelana::graph::{parse, Limits};
use labelana::report::{analysis_json, render_json};
use labelana::verdict::{Question, Status};
use labelana::Config;

/// Result of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LabelanaStatus {
    Ok = 0,
    NullArgument = 1,
    ParseError = 2,
    ValidationError = 3,
    ResourceError = 4,
    InvalidUtf8 = 5,
    InvalidArgument = 6,
    InternalError = 70,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LabelanaQuestion {
    Simple = 0,
    Ih = 1,
    PurelyInfinite = 2,
    GaugeInvariantIdeals = 3,
    InfiniteProjectionExists = 4,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LabelanaVerdict {
    Unknown = 0,
    Certified = 1,
    Refuted = 2,
}

/// Opaque analysis result.
pub struct LabelanaAnalysis {
    analysis: Analysis,
    warnings: Vec<String>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn fail(status: LabelanaStatus, msg: impl Into<String>) -> LabelanaStatus {
    set_error(msg);
    status
}

fn status_of(e: &AnalysisError) -> LabelanaStatus {
    match e.kind() {
        ErrorKind::Parse => LabelanaStatus::ParseError,
        ErrorKind::Validation => LabelanaStatus::ValidationError,
        ErrorKind::Resource => LabelanaStatus::ResourceError,
        ErrorKind::Internal => LabelanaStatus::InternalError,
    }
}

/// Runs `f`, turning a panic into `InternalError`.
fn guard(f: impl FnOnce() -> LabelanaStatus) -> LabelanaStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(LabelanaStatus::InternalError, "internal panic"),
    }
}

fn question(q: LabelanaQuestion) -> Question {
    match q {
        LabelanaQuestion::Simple => Question::Simple,
        LabelanaQuestion::Ih => Question::IH,
        LabelanaQuestion::PurelyInfinite => Question::PurelyInfinite,
        LabelanaQuestion::GaugeInvariantIdeals => Question::GaugeInvariantIdeals,
        LabelanaQuestion::InfiniteProjectionExists => Question::InfiniteProjectionExists,
    }
}

/// Parses and analyzes a graph description.
///
/// `max_atoms` of 0 keeps the default budget. On success `*out` receives a
/// handle to free with `labelana_analysis_free`; on failure it is set to NULL.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn labelana_analyze(
    text: *const c_char,
    max_atoms: u32,
    out: *mut *mut LabelanaAnalysis,
) -> LabelanaStatus {
    guard(|| {
        if out.is_null() {
            return fail(LabelanaStatus::NullArgument, "out is NULL");
        }
        *out = ptr::null_mut();
        if text.is_null() {
            return fail(LabelanaStatus::NullArgument, "text is NULL");
        }
        let Ok(text) = CStr::from_ptr(text).to_str() else {
            return fail(LabelanaStatus::InvalidUtf8, "text is not UTF-8");
        };
        if max_atoms >= 64 {
            return fail(LabelanaStatus::InvalidArgument, "max_atoms must be below 64");
        }
        let mut config = Config::default();
        if max_atoms > 0 {
            config.max_atoms = max_atoms as usize;
        }
        let parsed = match parse(text, Limits::default()) {
            Ok(p) => p,
            Err(e) => {
                let e = AnalysisError::from(e);
                return fail(status_of(&e), e.to_string());
            }
        };
        match analyze(parsed.graph, &config) {
            Ok(analysis) => {
                clear_error();
                *out = Box::into_raw(Box::new(LabelanaAnalysis {
                    analysis,
                    warnings: parsed.warnings,
                }));
                LabelanaStatus::Ok
            }
            Err(e) => fail(status_of(&e), e.to_string()),
        }
    })
}

/// Frees a handle. NULL is ignored.
///
/// # Safety
/// `handle` must come from `labelana_analyze` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn labelana_analysis_free(handle: *mut LabelanaAnalysis) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// The full JSON report. Free the result with `labelana_string_free`.
/// Returns NULL if `handle` is NULL.
///
/// # Safety
/// `handle` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn labelana_report_json(handle: *const LabelanaAnalysis) -> *mut c_char {
    let Some(h) = handle.as_ref() else {
        set_error("handle is NULL");
        return ptr::null_mut();
    };
    let json = render_json(&analysis_json(&h.analysis, &h.warnings));
    CString::new(json).map_or(ptr::null_mut(), CString::into_raw)
}

/// Writes the verdict for `q` to `*out`.
///
/// # Safety
/// `handle` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn labelana_verdict(
    handle: *const LabelanaAnalysis,
    q: LabelanaQuestion,
    out: *mut LabelanaVerdict,
) -> LabelanaStatus {
    let (Some(h), false) = (handle.as_ref(), out.is_null()) else {
        return fail(LabelanaStatus::NullArgument, "handle or out is NULL");
    };
    *out = match h.analysis.verdict(question(q)).status {
        Status::Certified => LabelanaVerdict::Certified,
        Status::Refuted => LabelanaVerdict::Refuted,
        Status::Unknown => LabelanaVerdict::Unknown,
    };
    LabelanaStatus::Ok
}

/// Decision tag of the rule behind the verdict for `q`, e.g.
/// `"simple-iff-trivial-cores-and-l-e"`. Static storage; do not free.
/// Returns NULL if `handle` is NULL.
///
/// # Safety
/// `handle` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn labelana_verdict_rule(handle: *const LabelanaAnalysis, q: LabelanaQuestion) -> *const c_char {
    let Some(h) = handle.as_ref() else {
        return ptr::null();
    };
    static_cstr(h.analysis.verdict(question(q)).rule.tag())
}

fn static_cstr(s: &'static str) -> *const c_char {
    use std::collections::HashMap;
    use std::sync::{Mutex, OnceLock};
    static TABLE: OnceLock<Mutex<HashMap<&'static str, &'static CStr>>> = OnceLock::new();
    let mut t = TABLE
        .get_or_init(Default::default)
        .lock()
        .unwrap_or_else(|e| e.into_inner());
    t.entry(s)
        .or_insert_with(|| Box::leak(CString::new(s).expect("tags have no NUL").into_boxed_c_str()))
        .as_ptr()
}

/// Writes whether the space is disagreeable.
///
/// # Safety
/// `handle` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn labelana_is_disagreeable(handle: *const LabelanaAnalysis, out: *mut bool) -> LabelanaStatus {
    let (Some(h), false) = (handle.as_ref(), out.is_null()) else {
        return fail(LabelanaStatus::NullArgument, "handle or out is NULL");
    };
    *out = h.analysis.disagreeable.disagreeable;
    LabelanaStatus::Ok
}

/// Writes whether every quotient by a core is disagreeable.
///
/// # Safety
/// `handle` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn labelana_is_strongly_disagreeable(
    handle: *const LabelanaAnalysis,
    out: *mut bool,
) -> LabelanaStatus {
    let (Some(h), false) = (handle.as_ref(), out.is_null()) else {
        return fail(LabelanaStatus::NullArgument, "handle or out is NULL");
    };
    *out = h.analysis.strong.holds;
    LabelanaStatus::Ok
}

/// Number of atoms, or 0 for a NULL handle.
///
/// # Safety
/// `handle` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn labelana_atom_count(handle: *const LabelanaAnalysis) -> usize {
    handle.as_ref().map_or(0, |h| h.analysis.space.atom_count())
}

/// Number of hereditary saturated cores, or 0 for a NULL handle.
///
/// # Safety
/// `handle` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn labelana_core_count(handle: *const LabelanaAnalysis) -> usize {
    handle.as_ref().map_or(0, |h| h.analysis.lattice.len())
}

/// Frees a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn labelana_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message for the last failed call on this thread, or NULL. Valid until the
/// next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn labelana_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version, static storage.
#[no_mangle]
pub extern "C" fn labelana_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
