//! C ABI for `setmatch`.
//!
//! Automata and match sets are opaque heap handles released with their
//! `*_free` function. Every fallible call returns an [`SmStatus`]; on failure
//! [`sm_last_error`] describes the problem for the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use setmatch::serial::{deserialize, serialize};
use setmatch::term::{parse_term_in, ParseOptions};
use setmatch::{build, evaluate, BuildOptions, EvalOptions, LabelStrategy, PatternSet, SetAutomaton, Signature, Strategy};

/// Result of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SmStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Build = 4,
    Json = 5,
    Evaluation = 6,
    OutOfRange = 7,
    InvalidArgument = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SmLabel {
    Rightmost = 0,
    Leftmost = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SmStrategy {
    DepthFirst = 0,
    BreadthFirst = 1,
    Parallel = 2,
}

/// A compiled set automaton.
pub struct SmAutomaton {
    inner: SetAutomaton,
}

/// The matches found in one subject.
pub struct SmMatches {
    patterns: Vec<u32>,
    positions: Vec<CString>,
    inspections: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(SmStatus, String);

type FfiResult<T> = Result<T, Failure>;

fn fail<E: std::fmt::Display>(status: SmStatus) -> impl FnOnce(E) -> Failure {
    move |e| Failure(status, e.to_string())
}

fn guard(body: impl FnOnce() -> FfiResult<()>) -> SmStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            SmStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".to_owned());
            SmStatus::Panic
        }
    }
}

/// # Safety
/// `p` must be null or a valid NUL-terminated string.
unsafe fn text<'a>(p: *const c_char, what: &str) -> FfiResult<&'a str> {
    if p.is_null() {
        return Err(Failure(SmStatus::NullArgument, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(SmStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

fn check_out<T>(out: *mut T, what: &str) -> FfiResult<()> {
    if out.is_null() {
        Err(Failure(SmStatus::NullArgument, format!("{what} is null")))
    } else {
        Ok(())
    }
}

/// # Safety
/// `p` must be null or a handle returned by this library and not yet freed.
unsafe fn handle<'a, T>(p: *const T, what: &str) -> FfiResult<&'a T> {
    p.as_ref()
        .ok_or_else(|| Failure(SmStatus::NullArgument, format!("{what} is null")))
}

/// Message for the last failed call on this thread, or null after a
/// successful call. Valid until the next call into this library.
#[no_mangle]
pub extern "C" fn sm_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn sm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Compiles newline-separated patterns. `signature` holds `name/arity` lines
/// and may be null to infer symbols from the patterns.
///
/// # Safety
/// String arguments must be null or NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sm_automaton_compile(
    patterns: *const c_char,
    signature: *const c_char,
    label: SmLabel,
    out: *mut *mut SmAutomaton,
) -> SmStatus {
    guard(|| {
        check_out(out, "out")?;
        let patterns = text(patterns, "patterns")?;
        let signature = if signature.is_null() {
            None
        } else {
            Some(Signature::parse(text(signature, "signature")?).map_err(fail(SmStatus::Parse))?)
        };
        let ps = PatternSet::parse(patterns, signature).map_err(fail(SmStatus::Parse))?;
        let strategy = match label {
            SmLabel::Rightmost => LabelStrategy::Rightmost,
            SmLabel::Leftmost => LabelStrategy::Leftmost,
        };
        let inner = build(&ps, BuildOptions::with_strategy(strategy)).map_err(fail(SmStatus::Build))?;
        *out = Box::into_raw(Box::new(SmAutomaton { inner }));
        Ok(())
    })
}

/// Loads an automaton from its JSON form.
///
/// # Safety
/// `json` must be null or NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sm_automaton_from_json(json: *const c_char, out: *mut *mut SmAutomaton) -> SmStatus {
    guard(|| {
        check_out(out, "out")?;
        let inner = deserialize(text(json, "json")?).map_err(fail(SmStatus::Json))?;
        *out = Box::into_raw(Box::new(SmAutomaton { inner }));
        Ok(())
    })
}

/// Writes the JSON form of `automaton` to `out`; release it with
/// [`sm_string_free`].
///
/// # Safety
/// `automaton` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sm_automaton_to_json(automaton: *const SmAutomaton, out: *mut *mut c_char) -> SmStatus {
    guard(|| {
        check_out(out, "out")?;
        let a = handle(automaton, "automaton")?;
        let s = CString::new(serialize(&a.inner)).map_err(fail(SmStatus::Json))?;
        *out = s.into_raw();
        Ok(())
    })
}

/// Number of states, or 0 for a null handle.
///
/// # Safety
/// `automaton` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sm_automaton_state_count(automaton: *const SmAutomaton) -> usize {
    automaton.as_ref().map_or(0, |a| a.inner.state_count())
}

/// Finds every match in `subject`. `workers` is used only by the parallel
/// strategy and must be at least 1 there.
///
/// # Safety
/// `automaton` must be a live handle, `subject` NUL-terminated and `out`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn sm_automaton_match(
    automaton: *const SmAutomaton,
    subject: *const c_char,
    strategy: SmStrategy,
    workers: u32,
    out: *mut *mut SmMatches,
) -> SmStatus {
    guard(|| {
        check_out(out, "out")?;
        let a = &handle(automaton, "automaton")?.inner;
        let t = parse_term_in(text(subject, "subject")?.trim(), a.signature(), ParseOptions::SUBJECT)
            .map_err(fail(SmStatus::Parse))?;
        let strategy = match strategy {
            SmStrategy::DepthFirst => Strategy::DepthFirst,
            SmStrategy::BreadthFirst => Strategy::BreadthFirst,
            SmStrategy::Parallel if workers == 0 => {
                return Err(Failure(SmStatus::InvalidArgument, "workers must be at least 1".into()))
            }
            SmStrategy::Parallel => Strategy::Parallel(workers as usize),
        };
        let report = evaluate(a, &t, &EvalOptions::new(strategy).instrumented())
            .map_err(fail(SmStatus::Evaluation))?;
        let matches = SmMatches {
            patterns: report.matches.iter().map(|m| m.pattern.0).collect(),
            positions: report
                .matches
                .iter()
                .map(|m| CString::new(m.position.to_string()).expect("positions have no NUL"))
                .collect(),
            inspections: report.count_inspections(),
        };
        *out = Box::into_raw(Box::new(matches));
        Ok(())
    })
}

/// Number of matches, or 0 for a null handle.
///
/// # Safety
/// `matches` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sm_matches_len(matches: *const SmMatches) -> usize {
    matches.as_ref().map_or(0, |m| m.patterns.len())
}

/// Subject positions inspected while matching.
///
/// # Safety
/// `matches` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sm_matches_inspections(matches: *const SmMatches) -> usize {
    matches.as_ref().map_or(0, |m| m.inspections)
}

/// Match `index` in sorted order: the 0-based pattern index and the position
/// in dotted form (`ε` for the root). The string is owned by `matches`.
///
/// # Safety
/// `matches` must be a live handle; the out pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn sm_matches_get(
    matches: *const SmMatches,
    index: usize,
    pattern: *mut u32,
    position: *mut *const c_char,
) -> SmStatus {
    guard(|| {
        check_out(pattern, "pattern")?;
        check_out(position, "position")?;
        let m = handle(matches, "matches")?;
        if index >= m.patterns.len() {
            return Err(Failure(
                SmStatus::OutOfRange,
                format!("index {index} out of range for {} matches", m.patterns.len()),
            ));
        }
        *pattern = m.patterns[index];
        *position = m.positions[index].as_ptr();
        Ok(())
    })
}

/// # Safety
/// `automaton` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sm_automaton_free(automaton: *mut SmAutomaton) {
    if !automaton.is_null() {
        drop(Box::from_raw(automaton));
    }
}

/// # Safety
/// `matches` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sm_matches_free(matches: *mut SmMatches) {
    if !matches.is_null() {
        drop(Box::from_raw(matches));
    }
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must be null or a string from [`sm_automaton_to_json`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sm_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
