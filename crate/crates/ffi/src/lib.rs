//! C interface to `lcfrs-core`.
//!
//! Every function returns an [`LcfrsStatus`]; on failure a description is
//! available from [`lcfrs_last_error`] until the next call on the same
//! thread. Strings returned through `out` parameters are owned by the caller
//! and released with [`lcfrs_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use lcfrs_core::boolean::Backend;
use lcfrs_core::grammar::{contact_rank, is_balanced, parse_grammar, AnalysisReport, Grammar};
use lcfrs_core::recognizer::{extract_derivation, recognize, ClosureAlgorithm, Multiplier, Options};
use lcfrs_core::{bundled, Error};

/// A parsed, validated grammar.
pub struct LcfrsGrammar {
    inner: Grammar,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LcfrsStatus {
    Ok = 0,
    /// The sentence is not in the language.
    Reject = 1,
    NullArgument = 2,
    InvalidUtf8 = 3,
    /// Syntax or validation error in the grammar text.
    Grammar = 4,
    /// The grammar cannot be recognized with, or the input is too large.
    Recognition = 5,
    Internal = 6,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LcfrsBackend {
    Naive = 0,
    Bitset = 1,
    Strassen = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LcfrsClosure {
    Fixpoint = 0,
    Valiant = 1,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(LcfrsStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Syntax { .. }
            | Error::FanOutMismatch { .. }
            | Error::UnknownSymbol { .. }
            | Error::Invalid(_)
            | Error::NotBinary(_) => LcfrsStatus::Grammar,
            Error::Internal(_) => LcfrsStatus::Internal,
            _ => LcfrsStatus::Recognition,
        };
        Failure(status, e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<LcfrsStatus, Failure>) -> LcfrsStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(s)) => s,
        Ok(Err(Failure(s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("panic inside lcfrs".into());
            LcfrsStatus::Internal
        }
    }
}

unsafe fn c_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(LcfrsStatus::NullArgument, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(LcfrsStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn grammar<'a>(g: *const LcfrsGrammar) -> Result<&'a Grammar, Failure> {
    g.as_ref()
        .map(|g| &g.inner)
        .ok_or_else(|| Failure(LcfrsStatus::NullArgument, "grammar is null".into()))
}

fn non_null<T>(p: *mut T, what: &str) -> Result<(), Failure> {
    if p.is_null() {
        Err(Failure(LcfrsStatus::NullArgument, format!("{what} is null")))
    } else {
        Ok(())
    }
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s).map(CString::into_raw).unwrap_or(ptr::null_mut())
}

fn tokens(s: &str) -> Vec<String> {
    s.split_whitespace().map(String::from).collect()
}

/// Parses grammar text. On success `*out` receives a handle to release with
/// `lcfrs_grammar_free`.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lcfrs_grammar_parse(text: *const c_char, out: *mut *mut LcfrsGrammar) -> LcfrsStatus {
    guard(|| {
        non_null(out, "out")?;
        let g = parse_grammar(c_str(text, "text")?)?;
        *out = Box::into_raw(Box::new(LcfrsGrammar { inner: g }));
        Ok(LcfrsStatus::Ok)
    })
}

/// Loads one of the grammars shipped with the library by name.
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lcfrs_grammar_bundled(name: *const c_char, out: *mut *mut LcfrsGrammar) -> LcfrsStatus {
    guard(|| {
        non_null(out, "out")?;
        let name = c_str(name, "name")?;
        let g = bundled::bundled(name)
            .ok_or_else(|| Failure(LcfrsStatus::Grammar, format!("no bundled grammar `{name}`")))?;
        *out = Box::into_raw(Box::new(LcfrsGrammar { inner: g }));
        Ok(LcfrsStatus::Ok)
    })
}

/// # Safety
/// `g` must be null or a handle from this library that was not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lcfrs_grammar_free(g: *mut LcfrsGrammar) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// # Safety
/// `g` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lcfrs_contact_rank(g: *const LcfrsGrammar, out: *mut usize) -> LcfrsStatus {
    guard(|| {
        non_null(out, "out")?;
        *out = contact_rank(grammar(g)?);
        Ok(LcfrsStatus::Ok)
    })
}

/// # Safety
/// `g` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lcfrs_is_balanced(g: *const LcfrsGrammar, out: *mut bool) -> LcfrsStatus {
    guard(|| {
        non_null(out, "out")?;
        *out = is_balanced(grammar(g)?);
        Ok(LcfrsStatus::Ok)
    })
}

fn options(backend: LcfrsBackend, closure: LcfrsClosure) -> Options {
    let b = match backend {
        LcfrsBackend::Naive => Backend::Naive,
        LcfrsBackend::Bitset => Backend::Bitset,
        LcfrsBackend::Strassen => Backend::STRASSEN,
    };
    let c = match closure {
        LcfrsClosure::Fixpoint => ClosureAlgorithm::Fixpoint,
        LcfrsClosure::Valiant => ClosureAlgorithm::Valiant,
    };
    Options {
        multiplier: Multiplier::Boolean(b),
        closure: c,
    }
}

/// Recognizes a whitespace-separated sentence. Returns `LCFRS_STATUS_OK` on
/// acceptance and `LCFRS_STATUS_REJECT` otherwise.
///
/// # Safety
/// `g` must be a live handle and `sentence` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn lcfrs_recognize(
    g: *const LcfrsGrammar,
    sentence: *const c_char,
    backend: LcfrsBackend,
    closure: LcfrsClosure,
) -> LcfrsStatus {
    guard(|| {
        let g = grammar(g)?;
        let s = tokens(c_str(sentence, "sentence")?);
        let rec = recognize(g, &s, options(backend, closure))?;
        Ok(if rec.accepted {
            LcfrsStatus::Ok
        } else {
            LcfrsStatus::Reject
        })
    })
}

/// Writes a derivation of the sentence as JSON to `*out`, or the string
/// `null` with status `LCFRS_STATUS_REJECT`.
///
/// # Safety
/// `g` must be a live handle, `sentence` a NUL-terminated string and `out`
/// a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lcfrs_parse_json(
    g: *const LcfrsGrammar,
    sentence: *const c_char,
    out: *mut *mut c_char,
) -> LcfrsStatus {
    guard(|| {
        non_null(out, "out")?;
        let g = grammar(g)?;
        let s = tokens(c_str(sentence, "sentence")?);
        let rec = recognize(g, &s, Options::default())?;
        let tree = extract_derivation(&rec)?;
        let json = match &tree {
            Some(t) => serde_json_string(t)?,
            None => "null".to_string(),
        };
        *out = into_c_string(json);
        Ok(if rec.accepted {
            LcfrsStatus::Ok
        } else {
            LcfrsStatus::Reject
        })
    })
}

fn serde_json_string<T: serde::Serialize>(v: &T) -> Result<String, Failure> {
    serde_json::to_string(v).map_err(|e| Failure(LcfrsStatus::Internal, e.to_string()))
}

/// Writes the analysis report as JSON to `*out`. A non-positive `omega`
/// selects the default exponent.
///
/// # Safety
/// `g` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lcfrs_analyze_json(g: *const LcfrsGrammar, omega: f64, out: *mut *mut c_char) -> LcfrsStatus {
    guard(|| {
        non_null(out, "out")?;
        let omega = if omega > 0.0 {
            omega
        } else {
            lcfrs_core::grammar::DEFAULT_OMEGA
        };
        let report = AnalysisReport::new(grammar(g)?, omega);
        *out = into_c_string(serde_json_string(&report)?);
        Ok(LcfrsStatus::Ok)
    })
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn lcfrs_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// The message for the last failed call on this thread, or null. The
/// pointer stays valid until the next call into the library.
#[no_mangle]
pub extern "C" fn lcfrs_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}
